#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace radae {

/// Preprocessed grayscale image, flattened row-major, every component in [0,1].
using Frame = std::vector<double>;

/// Discrete robot motions. The order is also the tie-break order.
enum class Action : std::uint8_t { Left = 0, Straight = 1, Right = 2 };

inline constexpr std::size_t kNumActions = 3;
inline constexpr std::array<Action, kNumActions> kAllActions = {Action::Left, Action::Straight,
                                                                Action::Right};

constexpr std::size_t index_of(Action a) { return static_cast<std::size_t>(a); }

constexpr std::string_view to_string(Action a) {
  switch (a) {
    case Action::Left: return "L";
    case Action::Straight: return "S";
    case Action::Right: return "R";
  }
  return "?";
}

inline std::optional<Action> parse_action(std::string_view s) {
  if (s == "L") return Action::Left;
  if (s == "S") return Action::Straight;
  if (s == "R") return Action::Right;
  return std::nullopt;
}

/// Frames of one episode with the shared self-supervised label (1 = safe, 0 = collided)
/// and the action whose execution produced them.
struct EpisodeBatch {
  std::size_t episode = 0;
  Action action = Action::Straight;
  std::vector<Frame> frames;
  int label = 1;

  std::size_t size() const { return frames.size(); }
};

}  // namespace radae
