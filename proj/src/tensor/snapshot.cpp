#include "lsamarl/tensor/snapshot.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <stdexcept>
#include <string>

namespace lsamarl {

namespace {

constexpr std::array<char, 4> kMagic = {'M', 'R', 'L', 'P'};

void put_u32(std::ostream& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_f64(std::ostream& out, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((bits >> (8 * i)) & 0xFFu));
}

bool get_bytes(std::istream& in, unsigned char* dst, std::size_t n) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount()) == n;
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  if (!get_bytes(in, b.data(), b.size())) throw std::runtime_error("snapshot truncated");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double get_f64(std::istream& in) {
  std::array<unsigned char, 8> b{};
  if (!get_bytes(in, b.data(), b.size())) throw std::runtime_error("snapshot truncated");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_snapshot(std::ostream& out, const ParamSet& params) {
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kSnapshotVersion);
  for (ParamId id = 0; id < params.size(); ++id) {
    const std::string& name = params.name(id);
    const Tensor& t = params.value(id);
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) put_u32(out, static_cast<std::uint32_t>(d));
    for (double x : t.data()) put_f64(out, x);
  }
  if (!out) throw std::runtime_error("failed writing snapshot");
}

ParamSet read_snapshot(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != 4 || magic != kMagic) throw std::runtime_error("not a parameter snapshot (bad magic)");
  const auto version = get_u32(in);
  if (version != kSnapshotVersion) {
    throw std::runtime_error("unsupported snapshot version " + std::to_string(version));
  }
  ParamSet params;
  while (in.peek() != std::char_traits<char>::eof()) {
    const auto name_len = get_u32(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (static_cast<std::uint32_t>(in.gcount()) != name_len) throw std::runtime_error("snapshot truncated");
    const auto rank = get_u32(in);
    Shape shape(rank);
    for (auto& d : shape) d = get_u32(in);
    Tensor t(shape, 0.0);
    for (auto& x : t.data()) x = get_f64(in);
    params.add(std::move(name), std::move(t));
  }
  return params;
}

void save_snapshot(const std::filesystem::path& path, const ParamSet& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_snapshot(out, params);
}

ParamSet load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_snapshot(in);
}

void assign_from(ParamSet& target, const ParamSet& source) {
  for (ParamId id = 0; id < target.size(); ++id) {
    auto src = source.find(target.name(id));
    if (!src) throw std::runtime_error("snapshot lacks parameter " + target.name(id));
    if (!source.value(*src).same_shape(target.value(id))) {
      throw std::runtime_error("snapshot shape mismatch for " + target.name(id));
    }
    target.value(id) = source.value(*src);
  }
}

}  // namespace lsamarl
