#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <iosfwd>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "radae/model.hpp"
#include "radae/pools.hpp"
#include "radae/rng.hpp"

namespace radae {

/// Structural actions of the controller, in tie-break order.
enum class AdaptKind : std::uint8_t { Pool = 0, Increment = 1, Merge = 2 };

inline constexpr std::array<AdaptKind, 3> kAllAdaptKinds = {AdaptKind::Pool, AdaptKind::Increment,
                                                            AdaptKind::Merge};

std::string_view to_string(AdaptKind k);

struct AdaptAction {
  AdaptKind kind = AdaptKind::Pool;
  std::size_t delta = 0;
};

/// Continuous controller state: smoothed generative and classification losses and the
/// width ratio of the first hidden layer.
struct ControllerState {
  double l_g_ema = 0.0;
  double l_c_ema = 0.0;
  double nu_1 = 1.0;
};

struct BinSpec {
  std::size_t count = 10;
  double lo = 0.0;
  double hi = 1.0;
};

struct StateBins {
  BinSpec g{10, 0.0, 1.0};
  BinSpec c{10, 0.0, 1.0};
  BinSpec nu{8, 0.25, 4.25};
};

struct StateKey {
  std::size_t g = 0;
  std::size_t c = 0;
  std::size_t nu = 0;
  auto operator<=>(const StateKey&) const = default;
};

struct ControllerParams {
  double alpha_q = 0.5;
  double gamma = 0.9;
  double epsilon = 0.1;
  std::size_t eta1 = 5;
  std::size_t eta2 = 30;
  double alpha_ema = 0.5;
  std::size_t ema_window = 15;  // m
  std::size_t delta = 5;        // nodes per structural step
  double u = 1.75;
  double v1 = 0.5;
  double v2 = 3.0;
  std::size_t h_min = 4;
  std::size_t greedy_epochs = 10;
  InitScheme growth_init = InitScheme::SigmoidGlorot;
  GenGradient gen_gradient = GenGradient::Local;
  StateBins bins;
};

/// alpha * current + (1 - alpha) * prev.
double ema(double prev, double current, double alpha);

/// Exponential moving average over the last `window` observations: the recursion is
/// seeded with the oldest value still in the window.
class EmaTracker {
 public:
  EmaTracker(double alpha, std::size_t window) : alpha_(alpha), window_(window) {}
  double push(double value);
  double value() const { return value_; }
  bool empty() const { return history_.empty(); }

 private:
  double alpha_;
  std::size_t window_;
  std::deque<double> history_;
  double value_ = 0.0;
};

/// Structural reward: g = (1 - (l_c - l_c_prev)) * (1 - l_c), minus |u - nu_1| when nu_1
/// leaves [v1, v2].
double reward(double l_c, double l_c_prev, double nu_1, double u, double v1, double v2);

StateKey discretize(const ControllerState& state, const StateBins& bins);

class QController {
 public:
  QController(ControllerParams params, std::vector<std::size_t> initial_widths, Rng rng);

  const ControllerParams& params() const { return params_; }
  std::size_t n() const { return n_; }

  double q(const StateKey& s, AdaptKind a) const;
  void set_q(const StateKey& s, AdaptKind a, double value);
  double max_q(const StateKey& s) const;
  const std::map<std::pair<StateKey, AdaptKind>, double>& table() const { return q_table_; }

  /// Feeds batch stats into both moving averages and returns the resulting state.
  ControllerState observe(const TrainStats& stats, const std::vector<std::size_t>& widths);
  double nu_1(const std::vector<std::size_t>& widths) const;

  /// Starts iteration n + 1 and returns the new counter.
  std::size_t advance() { return ++n_; }

  const std::optional<StateKey>& current_state() const { return current_; }
  void set_current_state(const StateKey& s) { current_ = s; }
  double prev_l_c() const { return prev_l_c_; }
  void set_prev_l_c(double l_c) { prev_l_c_ = l_c; }

  Rng& rng() { return rng_; }

 private:
  ControllerParams params_;
  std::vector<std::size_t> initial_widths_;
  Rng rng_;
  std::map<std::pair<StateKey, AdaptKind>, double> q_table_;
  std::size_t n_ = 0;
  EmaTracker l_g_ema_;
  EmaTracker l_c_ema_;
  std::optional<StateKey> current_;
  double prev_l_c_ = 0.0;
};

/// Step 1 (n <= eta1): Pool. Exploration (eta1 < n <= eta2): uniform over the three
/// actions. After eta2: epsilon-greedy on Q, ties broken Pool < Increment < Merge.
/// Uses the controller's counter as n.
AdaptAction choose_adaptation(const QController& ctrl, const StateKey& state, Rng& rng);

/// Q(s,a) <- (1 - alpha_q) Q(s,a) + alpha_q (r + gamma max_a' Q(s',a')). Returns the new value.
double q_update(QController& ctrl, const StateKey& s_prev, AdaptKind a_prev, double r,
                const StateKey& s_now);

struct AdaptReport {
  std::size_t n = 0;
  AdaptKind chosen = AdaptKind::Pool;
  AdaptKind executed = AdaptKind::Pool;  // Merge downgrades to Pool when no layer can merge
  StateKey state;
  StateKey next_state;
  std::vector<std::size_t> widths;
  double nu_1 = 1.0;
  double l_c_prev = 0.0;
  double reward = 0.0;
  bool q_updated = false;
  TrainStats stats;
  double train_time_s = 0.0;
  std::vector<GrowthReport> growth;
  std::vector<MergeReport> merges;
};

/// One controller iteration for batch n: choose a structural action, apply it layer by
/// layer (or run a pool pass), train on the batch, then reward and Q-update.
AdaptReport adapt_and_train(AdaptiveNet& net, QController& ctrl, Pools& pools,
                            const EpisodeBatch& batch, double lr, double p_c, Rng& rng);

/// One training pass over every batch of a pool, in stored order.
void train_pool(AdaptiveNet& net, const std::vector<EpisodeBatch>& pool, double lr, double p_c,
                Rng& rng, GenGradient mode = GenGradient::Local);

/// Columns: state_bin_g, state_bin_c, state_bin_nu, action, q_value.
void write_qtable_csv(const QController& ctrl, std::ostream& out);

}  // namespace radae
