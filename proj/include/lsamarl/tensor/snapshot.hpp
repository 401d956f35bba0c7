#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "lsamarl/tensor/graph.hpp"

namespace lsamarl {

// Binary parameter snapshot:
//   "MRLP" | version:u32 | { name_len:u32 | utf8 name | rank:u32 | dims:u32[rank] | f64[...] }*
// All integers and doubles little-endian.
inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(std::ostream& out, const ParamSet& params);
ParamSet read_snapshot(std::istream& in);

void save_snapshot(const std::filesystem::path& path, const ParamSet& params);
ParamSet load_snapshot(const std::filesystem::path& path);

// Copies values from `source` into the same-named parameters of `target`.
// Every parameter of `target` must be present with a matching shape.
void assign_from(ParamSet& target, const ParamSet& source);

}  // namespace lsamarl
