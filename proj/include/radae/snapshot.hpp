#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "radae/model.hpp"

namespace radae {

// Binary network snapshot, all integers little-endian u32, all reals little-endian
// IEEE-754 binary64:
//
//   "RADA" | version=1 | variant | J | K | input_dim | widths[J] | initial_widths[J]
//   for each layer l = 1..J:  W (width x input, row-major) | b (width) | b' (input)
//   for each head a = L,S,R:  w (top width) | b
inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(const AdaptiveNet& net, std::ostream& out);
AdaptiveNet read_snapshot(std::istream& in);

void save_snapshot(const AdaptiveNet& net, const std::string& path);
AdaptiveNet load_snapshot(const std::string& path);

}  // namespace radae
