#include <iostream>

#include "lsamarl/experiment/cli.hpp"

int main(int argc, char** argv) { return lsamarl::experiment::run_cli(argc, argv, std::cout, std::cerr); }
