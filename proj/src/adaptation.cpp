#include "radae/adaptation.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>

#include "radae/errors.hpp"

namespace radae {

std::string_view to_string(AdaptKind k) {
  switch (k) {
    case AdaptKind::Pool: return "pool";
    case AdaptKind::Increment: return "increment";
    case AdaptKind::Merge: return "merge";
  }
  return "?";
}

double ema(double prev, double current, double alpha) {
  return alpha * current + (1.0 - alpha) * prev;
}

double EmaTracker::push(double value) {
  history_.push_back(value);
  while (history_.size() > std::max<std::size_t>(window_, 1)) history_.pop_front();
  value_ = history_.front();
  for (std::size_t k = 1; k < history_.size(); ++k) value_ = ema(value_, history_[k], alpha_);
  return value_;
}

double reward(double l_c, double l_c_prev, double nu_1, double u, double v1, double v2) {
  const double g = (1.0 - (l_c - l_c_prev)) * (1.0 - l_c);
  if (nu_1 < v1 || nu_1 > v2) return g - std::abs(u - nu_1);
  return g;
}

namespace {
std::size_t bin_of(double value, const BinSpec& spec) {
  const std::size_t count = std::max<std::size_t>(spec.count, 1);
  const double clamped = std::clamp(value, spec.lo, spec.hi);
  const double t = (clamped - spec.lo) / (spec.hi - spec.lo);
  const auto bin = static_cast<std::size_t>(std::floor(t * static_cast<double>(count)));
  return std::min(bin, count - 1);
}
}  // namespace

StateKey discretize(const ControllerState& state, const StateBins& bins) {
  return {bin_of(state.l_g_ema, bins.g), bin_of(state.l_c_ema, bins.c), bin_of(state.nu_1, bins.nu)};
}

QController::QController(ControllerParams params, std::vector<std::size_t> initial_widths, Rng rng)
    : params_(params),
      initial_widths_(std::move(initial_widths)),
      rng_(rng),
      l_g_ema_(params.alpha_ema, params.ema_window),
      l_c_ema_(params.alpha_ema, params.ema_window) {
  if (initial_widths_.empty() || initial_widths_.front() == 0) {
    throw ContractError("controller needs a non-empty first hidden layer");
  }
  if (!(params_.alpha_q >= 0.0 && params_.alpha_q <= 1.0)) {
    throw ConfigError("alpha_q must lie in [0,1]");
  }
  if (!(params_.gamma >= 0.0 && params_.gamma < 1.0)) throw ConfigError("gamma must lie in [0,1)");
  if (!(params_.alpha_ema >= 0.0 && params_.alpha_ema <= 1.0)) {
    throw ConfigError("alpha_ema must lie in [0,1]");
  }
  if (!(params_.v1 < params_.v2)) throw ConfigError("V1 must be below V2");
}

double QController::q(const StateKey& s, AdaptKind a) const {
  const auto it = q_table_.find({s, a});
  return it == q_table_.end() ? 0.0 : it->second;
}

void QController::set_q(const StateKey& s, AdaptKind a, double value) { q_table_[{s, a}] = value; }

double QController::max_q(const StateKey& s) const {
  double best = q(s, kAllAdaptKinds[0]);
  for (AdaptKind a : kAllAdaptKinds) best = std::max(best, q(s, a));
  return best;
}

double QController::nu_1(const std::vector<std::size_t>& widths) const {
  if (widths.empty()) throw ContractError("nu_1 needs at least one hidden layer");
  return static_cast<double>(widths.front()) / static_cast<double>(initial_widths_.front());
}

ControllerState QController::observe(const TrainStats& stats, const std::vector<std::size_t>& widths) {
  ControllerState s;
  s.l_g_ema = std::clamp(l_g_ema_.push(std::clamp(stats.l_g, 0.0, 1.0)), 0.0, 1.0);
  s.l_c_ema = std::clamp(l_c_ema_.push(stats.l_c), 0.0, 1.0);
  s.nu_1 = nu_1(widths);
  return s;
}

AdaptAction choose_adaptation(const QController& ctrl, const StateKey& state, Rng& rng) {
  const auto& p = ctrl.params();
  const std::size_t n = ctrl.n();
  auto make = [&](AdaptKind k) {
    return AdaptAction{k, k == AdaptKind::Pool ? std::size_t{0} : p.delta};
  };
  if (n <= p.eta1) return make(AdaptKind::Pool);
  if (n <= p.eta2) return make(kAllAdaptKinds[rng.index(3)]);
  if (rng.uniform() < p.epsilon) return make(kAllAdaptKinds[rng.index(3)]);
  AdaptKind best = kAllAdaptKinds[0];
  for (AdaptKind a : kAllAdaptKinds) {
    if (ctrl.q(state, a) > ctrl.q(state, best)) best = a;
  }
  return make(best);
}

double q_update(QController& ctrl, const StateKey& s_prev, AdaptKind a_prev, double r,
                const StateKey& s_now) {
  const auto& p = ctrl.params();
  const double target = r + p.gamma * ctrl.max_q(s_now);
  const double value = (1.0 - p.alpha_q) * ctrl.q(s_prev, a_prev) + p.alpha_q * target;
  ctrl.set_q(s_prev, a_prev, value);
  return value;
}

void train_pool(AdaptiveNet& net, const std::vector<EpisodeBatch>& pool, double lr, double p_c,
                Rng& rng, GenGradient mode) {
  for (const auto& batch : pool) train_batch(net, batch, lr, p_c, rng, mode);
}

AdaptReport adapt_and_train(AdaptiveNet& net, QController& ctrl, Pools& pools,
                            const EpisodeBatch& batch, double lr, double p_c, Rng& rng) {
  if (batch.frames.empty()) throw ContractError("adapt_and_train: empty batch");
  if (net.layers.empty()) throw ContractError("adapt_and_train needs at least one hidden layer");
  const auto& p = ctrl.params();

  AdaptReport report;
  report.n = ctrl.advance();

  if (!ctrl.current_state()) {
    // Nothing trained yet: bootstrap the state from the untrained net on this batch.
    const TrainStats initial = evaluate_batch(net, batch);
    ctrl.set_current_state(discretize(ctrl.observe(initial, net.widths()), p.bins));
    ctrl.set_prev_l_c(initial.l_c);
  }
  report.state = *ctrl.current_state();

  const auto start = std::chrono::steady_clock::now();
  const AdaptAction action = choose_adaptation(ctrl, report.state, ctrl.rng());
  report.chosen = action.kind;
  report.executed = action.kind;

  const std::size_t depth = net.layers.size();
  switch (action.kind) {
    case AdaptKind::Increment: {
      const GrowthOptions opts{p.greedy_epochs, lr, p_c, p.growth_init};
      for (std::size_t l = 1; l <= depth; ++l) {
        report.growth.push_back(grow_layer(net, l, action.delta, pools.recent, opts, rng));
      }
      break;
    }
    case AdaptKind::Merge: {
      bool any = false;
      for (std::size_t l = 1; l <= depth; ++l) {
        report.merges.push_back(merge_layer(net, l, action.delta, p.h_min));
        any = any || report.merges.back().merged;
      }
      if (!any) report.executed = AdaptKind::Pool;
      break;
    }
    case AdaptKind::Pool:
      break;
  }
  if (report.executed == AdaptKind::Pool) {
    train_pool(net, report.n <= p.eta1 ? pools.recent : pools.finetune, lr, p_c, rng,
               p.gen_gradient);
  }
  report.stats = train_batch(net, batch, lr, p_c, rng, p.gen_gradient);
  report.train_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  report.widths = net.widths();
  report.nu_1 = ctrl.nu_1(report.widths);
  report.l_c_prev = ctrl.prev_l_c();
  report.reward = reward(report.stats.l_c, report.l_c_prev, report.nu_1, p.u, p.v1, p.v2);
  report.next_state = discretize(ctrl.observe(report.stats, report.widths), p.bins);
  if (report.n > p.eta1) {
    q_update(ctrl, report.state, report.executed, report.reward, report.next_state);
    report.q_updated = true;
  }
  ctrl.set_prev_l_c(report.stats.l_c);
  ctrl.set_current_state(report.next_state);
  return report;
}

void write_qtable_csv(const QController& ctrl, std::ostream& out) {
  out << "state_bin_g,state_bin_c,state_bin_nu,action,q_value\n";
  char buf[64];
  for (const auto& [key, value] : ctrl.table()) {
    const auto& [s, a] = key;
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    out << s.g << ',' << s.c << ',' << s.nu << ',' << to_string(a) << ','
        << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
  }
}

}  // namespace radae
