#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lsamarl/tensor/init.hpp"
#include "lsamarl/train/gae.hpp"

using namespace lsamarl;
using train::compute_gae;

namespace {

struct Episode {
  std::vector<double> rewards, values, dones;
  double bootstrap = 0.0;
  double gamma = 0.0, lambda = 0.0;
};

// Direct double sum: A_t = sum_l (gamma*lambda)^l delta_{t+l}, stopping after
// the first done at or past t.
std::vector<double> brute_force(const Episode& ep) {
  const std::size_t T = ep.rewards.size();
  auto value_after = [&](std::size_t t) { return t + 1 < T ? ep.values[t + 1] : ep.bootstrap; };
  std::vector<double> out(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    long double sum = 0.0L;
    for (std::size_t k = t; k < T; ++k) {
      const long double delta =
          ep.rewards[k] + ep.gamma * value_after(k) * (1.0 - ep.dones[k]) - static_cast<long double>(ep.values[k]);
      sum += std::pow(static_cast<long double>(ep.gamma * ep.lambda), static_cast<long double>(k - t)) * delta;
      if (ep.dones[k] != 0.0) break;
    }
    out[t] = static_cast<double>(sum);
  }
  return out;
}

Episode random_episode(Rng& rng, std::size_t T, bool with_dones) {
  Episode ep;
  ep.gamma = uniform01(rng) * 0.999;
  ep.lambda = uniform01(rng);
  for (std::size_t t = 0; t < T; ++t) {
    ep.rewards.push_back(uniform01(rng));
    ep.values.push_back(10.0 * (uniform01(rng) - 0.5));
    ep.dones.push_back(with_dones && uniform01(rng) < 0.2 ? 1.0 : 0.0);
  }
  ep.bootstrap = 10.0 * (uniform01(rng) - 0.5);
  return ep;
}

}  // namespace

TEST_CASE("GAE matches the direct double sum on random episodes") {
  Rng rng = make_rng({31});
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t T = 1 + rng() % 10;
    const auto ep = random_episode(rng, T, trial % 2 == 1);
    const auto buf = compute_gae(ep.rewards, ep.values, ep.dones, ep.bootstrap, ep.gamma, ep.lambda);
    const auto expected = brute_force(ep);
    REQUIRE(buf.advantages.size() == T);
    for (std::size_t t = 0; t < T; ++t) worst = std::max(worst, std::abs(buf.advantages[t] - expected[t]));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("GAE on an 8-step episode") {
  Rng rng = make_rng({32});
  const auto ep = random_episode(rng, 8, false);
  const auto buf = compute_gae(ep.rewards, ep.values, ep.dones, ep.bootstrap, ep.gamma, ep.lambda);
  const auto expected = brute_force(ep);
  for (std::size_t t = 0; t < 8; ++t) CHECK(buf.advantages[t] == doctest::Approx(expected[t]).epsilon(1e-12));
}

TEST_CASE("lambda zero leaves one TD residual") {
  Rng rng = make_rng({33});
  auto ep = random_episode(rng, 7, true);
  ep.lambda = 0.0;
  const auto buf = compute_gae(ep.rewards, ep.values, ep.dones, ep.bootstrap, ep.gamma, ep.lambda);
  for (std::size_t t = 0; t < 7; ++t) {
    const double next = t + 1 < 7 ? ep.values[t + 1] : ep.bootstrap;
    const double delta = ep.rewards[t] + ep.gamma * next * (1.0 - ep.dones[t]) - ep.values[t];
    CHECK(buf.deltas[t] == delta);
    CHECK(buf.advantages[t] == delta);
  }
}

TEST_CASE("gamma zero gives reward minus value") {
  Rng rng = make_rng({34});
  auto ep = random_episode(rng, 6, false);
  ep.gamma = 0.0;
  const auto buf = compute_gae(ep.rewards, ep.values, ep.dones, ep.bootstrap, ep.gamma, ep.lambda);
  for (std::size_t t = 0; t < 6; ++t) CHECK(buf.advantages[t] == ep.rewards[t] - ep.values[t]);
}

TEST_CASE("a done flag stops bootstrap and recursion") {
  const std::vector<double> r{1, 1, 1}, v{0.5, 0.5, 0.5}, d{0, 1, 0};
  const auto buf = compute_gae(r, v, d, 100.0, 0.9, 1.0);
  CHECK(buf.deltas[1] == 1.0 - 0.5);
  CHECK(buf.advantages[1] == 0.5);
  CHECK(buf.advantages[0] == doctest::Approx((1.0 + 0.9 * 0.5 - 0.5) + 0.9 * 0.5).epsilon(1e-15));
  CHECK(buf.deltas[2] == 1.0 + 0.9 * 100.0 - 0.5);
}

TEST_CASE("returns are advantages plus old values, exactly") {
  Rng rng = make_rng({35});
  for (int trial = 0; trial < 100; ++trial) {
    const auto ep = random_episode(rng, 1 + rng() % 10, true);
    const auto buf = compute_gae(ep.rewards, ep.values, ep.dones, ep.bootstrap, ep.gamma, ep.lambda);
    for (std::size_t t = 0; t < ep.values.size(); ++t) REQUIRE(buf.returns[t] - (buf.advantages[t] + ep.values[t]) == 0.0);
    CHECK(train::verify_return_identity(buf, ep.values) == ep.values.size());
  }
  train::AdvantageBuffer broken{{0.0}, {1.0}, {1.5}};
  const std::vector<double> values{0.25};
  CHECK_THROWS_AS(train::verify_return_identity(broken, values), std::logic_error);
}

TEST_CASE("GAE rejects mismatched lengths") {
  const std::vector<double> three{1, 2, 3}, two{1, 2};
  CHECK_THROWS_AS(compute_gae(three, two, three, 0.0, 0.9, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(compute_gae(three, three, two, 0.0, 0.9, 0.9), std::invalid_argument);
}
