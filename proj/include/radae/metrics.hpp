#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "radae/episode_log.hpp"

namespace radae {

/// Collision counts over the episodes [window_end - M, window_end - 1].
struct WindowSummary {
  std::size_t window_end = 0;
  std::size_t l_nw = 0;
  double l_w = 0.0;
  double pct = 0.0;  // l_nw * 100 / M
  std::array<double, 3> mean_widths{};
  double mean_train_time_s = 0.0;
  double mean_predict_time_s = 0.0;
};

/// Number of collided episodes in [i - M, i - 1]. Requires M <= i <= records.size().
std::size_t l_nw(std::span<const EpisodeRecord> records, std::size_t i, std::size_t m);

/// Sum of p_chosen over collided episodes in the same window. Episode 0 has no
/// preceding prediction and never contributes.
double l_w(std::span<const EpisodeRecord> records, std::size_t i, std::size_t m);

/// Mean of the last `span_episodes / M` window percentages (all windows when fewer exist).
struct Aggregate {
  std::size_t windows = 0;
  double l_nw_pct = 0.0;
  double l_w_pct = 0.0;
};

struct Summary {
  std::size_t window = 25;
  std::vector<WindowSummary> windows;
  Aggregate aggregate;
};

inline constexpr std::size_t kAggregateEpisodes = 250;

/// Non-overlapping windows ending at skip + M, skip + 2M, ... A log shorter than skip + M
/// gives no windows.
Summary summarize(std::span<const EpisodeRecord> records, std::size_t m, std::size_t skip);

Aggregate aggregate_last(const std::vector<WindowSummary>& windows, std::size_t m,
                         std::size_t span_episodes = kAggregateEpisodes);

/// Collision percentage over the last `count` episodes.
double tail_collision_pct(std::span<const EpisodeRecord> records, std::size_t count);

/// Columns: window_end, l_nw, l_w, pct, mean_width_l1..l3, mean_train_time_s,
/// mean_predict_time_s. pct has one decimal; everything else is exact.
void write_summary_csv(const Summary& summary, std::ostream& out);
/// Columns: windows, l_nw_pct, l_w_pct.
void write_aggregate_csv(const Summary& summary, std::ostream& out);

std::string format_pct(double pct);

}  // namespace radae
