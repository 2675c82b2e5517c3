#include "radae/snapshot.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "radae/errors.hpp"

namespace radae {

namespace {


template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ostream& out, double v) {
  auto bits = to_little(std::bit_cast<std::uint64_t>(v));
  out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
}

void put_reals(std::ostream& out, std::span<const double> v) {
  for (double x : v) put_f64(out, x);
}

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw std::runtime_error("snapshot truncated");
  return to_little(v);
}

double get_f64(std::istream& in) {
  std::uint64_t bits = 0;
  if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) {
    throw std::runtime_error("snapshot truncated");
  }
  return std::bit_cast<double>(to_little(bits));
}

void get_reals(std::istream& in, std::span<double> v) {
  for (double& x : v) x = get_f64(in);
}

std::uint32_t narrow(std::size_t v) {
  if (v > 0xffffffffu) throw ContractError("snapshot dimension exceeds u32");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void write_snapshot(const AdaptiveNet& net, std::ostream& out) {
  net.validate();
  out.write("RADA", 4);
  put_u32(out, kSnapshotVersion);
  put_u32(out, static_cast<std::uint32_t>(net.variant));
  put_u32(out, narrow(net.layers.size()));
  put_u32(out, narrow(kNumActions));
  put_u32(out, narrow(net.input_dim));
  for (const auto& layer : net.layers) put_u32(out, narrow(layer.width()));
  for (std::size_t w : net.initial_widths) put_u32(out, narrow(w));
  for (const auto& layer : net.layers) {
    put_reals(out, layer.w.data());
    put_reals(out, layer.b);
    put_reals(out, layer.b_prime);
  }
  for (const auto& head : net.heads) {
    put_reals(out, head.w);
    put_f64(out, head.b);
  }
  if (!out) throw std::runtime_error("snapshot write failed");
}

AdaptiveNet read_snapshot(std::istream& in) {
  char magic[4] = {};
  if (!in.read(magic, 4) || std::memcmp(magic, "RADA", 4) != 0) {
    throw std::runtime_error("not a network snapshot (bad magic)");
  }
  const auto version = get_u32(in);
  if (version != kSnapshotVersion) {
    throw std::runtime_error("unsupported snapshot version " + std::to_string(version));
  }
  AdaptiveNet net;
  const auto variant = get_u32(in);
  if (variant > 2) throw std::runtime_error("snapshot has unknown variant");
  net.variant = static_cast<Variant>(variant);
  const auto depth = get_u32(in);
  if (get_u32(in) != kNumActions) throw std::runtime_error("snapshot head count mismatch");
  net.input_dim = get_u32(in);
  std::vector<std::size_t> widths(depth);
  for (auto& w : widths) w = get_u32(in);
  net.initial_widths.resize(depth);
  for (auto& w : net.initial_widths) w = get_u32(in);
  std::size_t in_dim = net.input_dim;
  for (std::size_t width : widths) {
    AELayer layer;
    layer.w = Matrix(width, in_dim);
    layer.b.resize(width);
    layer.b_prime.resize(in_dim);
    get_reals(in, layer.w.data());
    get_reals(in, layer.b);
    get_reals(in, layer.b_prime);
    net.layers.push_back(std::move(layer));
    in_dim = width;
  }
  for (auto& head : net.heads) {
    head.w.resize(in_dim);
    get_reals(in, head.w);
    head.b = get_f64(in);
  }
  net.validate();
  return net;
}

void save_snapshot(const AdaptiveNet& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_snapshot(net, out);
}

AdaptiveNet load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_snapshot(in);
}

}  // namespace radae
