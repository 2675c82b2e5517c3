#include "radae/metrics.hpp"

#include <cstdio>
#include <ostream>

#include "radae/errors.hpp"

namespace radae {

namespace {
void check_window(std::span<const EpisodeRecord> records, std::size_t i, std::size_t m) {
  if (m < 1 || i < m || i > records.size()) {
    throw ContractError("window [" + std::to_string(i) + " - " + std::to_string(m) + ", " +
                        std::to_string(i) + ") outside the log of " +
                        std::to_string(records.size()) + " episodes");
  }
}
}  // namespace

std::size_t l_nw(std::span<const EpisodeRecord> records, std::size_t i, std::size_t m) {
  check_window(records, i, m);
  std::size_t count = 0;
  for (std::size_t k = i - m; k < i; ++k) count += records[k].collided ? 1 : 0;
  return count;
}

double l_w(std::span<const EpisodeRecord> records, std::size_t i, std::size_t m) {
  check_window(records, i, m);
  double sum = 0.0;
  for (std::size_t k = i - m; k < i; ++k) {
    if (records[k].collided && records[k].episode != 0) sum += records[k].p_chosen;
  }
  return sum;
}

Aggregate aggregate_last(const std::vector<WindowSummary>& windows, std::size_t m,
                         std::size_t span_episodes) {
  Aggregate agg;
  const std::size_t want = std::max<std::size_t>(span_episodes / m, 1);
  agg.windows = std::min(want, windows.size());
  if (agg.windows == 0) return agg;
  const double scale = 100.0 / static_cast<double>(m);
  for (std::size_t k = windows.size() - agg.windows; k < windows.size(); ++k) {
    agg.l_nw_pct += windows[k].pct;
    agg.l_w_pct += windows[k].l_w * scale;
  }
  agg.l_nw_pct /= static_cast<double>(agg.windows);
  agg.l_w_pct /= static_cast<double>(agg.windows);
  return agg;
}

Summary summarize(std::span<const EpisodeRecord> records, std::size_t m, std::size_t skip) {
  if (m < 1) throw ContractError("window length must be at least 1");
  Summary summary;
  summary.window = m;
  const double scale = 100.0 / static_cast<double>(m);
  for (std::size_t end = skip + m; end <= records.size(); end += m) {
    WindowSummary w;
    w.window_end = end;
    w.l_nw = l_nw(records, end, m);
    w.l_w = l_w(records, end, m);
    w.pct = static_cast<double>(w.l_nw) * scale;
    for (std::size_t k = end - m; k < end; ++k) {
      const auto& r = records[k];
      for (std::size_t l = 0; l < 3; ++l) {
        w.mean_widths[l] += l < r.widths.size() ? static_cast<double>(r.widths[l]) : 0.0;
      }
      w.mean_train_time_s += r.train_time_s;
      w.mean_predict_time_s += r.predict_time_s;
    }
    for (double& v : w.mean_widths) v /= static_cast<double>(m);
    w.mean_train_time_s /= static_cast<double>(m);
    w.mean_predict_time_s /= static_cast<double>(m);
    summary.windows.push_back(w);
  }
  summary.aggregate = aggregate_last(summary.windows, m);
  return summary;
}

double tail_collision_pct(std::span<const EpisodeRecord> records, std::size_t count) {
  if (count == 0 || count > records.size()) throw ContractError("tail longer than the log");
  std::size_t hits = 0;
  for (std::size_t k = records.size() - count; k < records.size(); ++k) hits += records[k].collided;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(count);
}

std::string format_pct(double pct) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", pct);
  return buf;
}

void write_summary_csv(const Summary& summary, std::ostream& out) {
  out << "window_end,l_nw,l_w,pct,mean_width_l1,mean_width_l2,mean_width_l3,mean_train_time_s,"
         "mean_predict_time_s\n";
  for (const auto& w : summary.windows) {
    out << w.window_end << ',' << w.l_nw << ',' << format_real(w.l_w) << ',' << format_pct(w.pct);
    for (double mw : w.mean_widths) out << ',' << format_real(mw);
    out << ',' << format_real(w.mean_train_time_s) << ',' << format_real(w.mean_predict_time_s)
        << '\n';
  }
}

void write_aggregate_csv(const Summary& summary, std::ostream& out) {
  out << "windows,l_nw_pct,l_w_pct\n";
  out << summary.aggregate.windows << ',' << format_real(summary.aggregate.l_nw_pct) << ','
      << format_real(summary.aggregate.l_w_pct) << '\n';
}

}  // namespace radae
