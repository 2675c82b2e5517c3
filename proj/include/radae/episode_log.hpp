#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "radae/adaptation.hpp"
#include "radae/simworld.hpp"
#include "radae/types.hpp"

namespace radae {

/// Everything logged about one episode.
struct EpisodeRecord {
  std::size_t episode = 0;
  Action action = Action::Straight;
  bool collided = false;
  double p_chosen = 1.0;  // probability the net gave `action` when it was selected
  std::vector<std::size_t> widths;
  std::optional<AdaptKind> adapt_action;  // executed structural action (adaptive net only)
  double reward = 0.0;
  double l_g = 0.0;
  double l_c = 0.0;
  double train_time_s = 0.0;
  double predict_time_s = 0.0;
  RobotPose pose_before;
  RobotPose pose_after;

  // Not part of the CSV.
  std::optional<AdaptKind> adapt_chosen;
  double nu_1 = 1.0;
  double l_c_prev = 0.0;
  std::size_t frames = 0;
  std::array<double, kNumActions> next_probs{};  // head outputs behind the next selection
};

inline constexpr std::string_view kEpisodeCsvHeader =
    "episode,action,collided,p_chosen,width_l1,width_l2,width_l3,adapt_action,reward,L_g,L_c,"
    "train_time_s,predict_time_s,x,y,heading";

/// Shortest decimal form that parses back to the same double.
std::string format_real(double v);

void write_episode_csv(const std::vector<EpisodeRecord>& records, std::ostream& out);
/// Reads the CSV columns back; fields outside the CSV keep their defaults.
std::vector<EpisodeRecord> read_episode_csv(std::istream& in);
std::vector<EpisodeRecord> read_episode_csv(const std::string& path);

}  // namespace radae
