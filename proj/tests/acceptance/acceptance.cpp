// Acceptance suite: prints one PASS/FAIL line per criterion and exits non-zero if any fail.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "radae/adaptation.hpp"
#include "radae/episode_log.hpp"
#include "radae/harness.hpp"
#include "radae/metrics.hpp"
#include "radae/snapshot.hpp"
#include "support/oracles.hpp"

using namespace radae;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int report(int id, const std::string& name, const Outcome& o) {
  std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << " (" << name << "): " << o.detail
            << std::endl;
  return o.pass ? 0 : 1;
}

Outcome gradient_check() {
  const auto t0 = Clock::now();
  double worst = 0.0, gap = 0.0;
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto r = oracle::finite_difference_check(seed, GenGradient::Full);
    worst = std::max(worst, r.max_rel);
    gap = std::max(gap, r.objective_gap);
    checked += r.checked;
  }
  const double t = seconds_since(t0);
  return {worst < 1e-4 && gap < 1e-12 && t < 10.0,
          std::to_string(checked) + " parameters, max rel error " + fmt("%.2e", worst) + ", " +
              fmt("%.2f", t) + " s"};
}

Outcome controller_oracles() {
  std::vector<std::pair<std::string, double>> errors;
  errors.emplace_back("ema", std::abs(ema(0.4, 0.2, 0.5) - 0.3));
  errors.emplace_back("ema a=1", std::abs(ema(0.4, 0.2, 1.0) - 0.2));
  errors.emplace_back("ema a=0", std::abs(ema(0.4, 0.2, 0.0) - 0.4));
  errors.emplace_back("reward", std::abs(reward(0.2, 0.3, 1.0, 1.75, 0.5, 3.0) - 0.88));
  errors.emplace_back("reward penalty", std::abs(reward(0.2, 0.3, 4.0, 1.75, 0.5, 3.0) + 1.37));
  errors.emplace_back("reward perfect", std::abs(reward(0.0, 0.0, 1.0, 1.75, 0.5, 3.0) - 1.0));

  ControllerParams p;
  p.alpha_q = 0.5;
  p.gamma = 0.9;
  const StateKey s{0, 0, 0}, t{1, 0, 0};
  QController half(p, {64}, Rng(1));
  errors.emplace_back("q_update", std::abs(q_update(half, s, AdaptKind::Pool, 1.0, t) - 0.5));
  p.alpha_q = 0.0;
  QController frozen(p, {64}, Rng(1));
  frozen.set_q(s, AdaptKind::Merge, 0.25);
  errors.emplace_back("q_update a=0", std::abs(q_update(frozen, s, AdaptKind::Merge, 1.0, t) - 0.25));
  p.alpha_q = 1.0;
  p.gamma = 0.0;
  QController full(p, {64}, Rng(1));
  errors.emplace_back("q_update a=1", std::abs(q_update(full, s, AdaptKind::Increment, 0.88, t) - 0.88));

  p = {};
  QController chained(p, {64}, Rng(1));
  chained.observe({0.1, 0.4, 0.0}, {64});
  errors.emplace_back("chained ema", std::abs(chained.observe({0.1, 0.2, 0.0}, {64}).l_c_ema - 0.3));

  double worst = 0.0;
  std::string worst_name = errors.front().first;
  for (const auto& [name, e] : errors) {
    if (e > worst) {
      worst = e;
      worst_name = name;
    }
  }
  return {worst <= 1e-12, std::to_string(errors.size()) + " oracles, max abs error " +
                              fmt("%.1e", worst) + " (" + worst_name + ")"};
}

Outcome pool_replay() {
  Rng rng(20240501);
  std::size_t mismatches = 0, admitted = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto history = oracle::random_history(1 + rng.index(200), rng);
    const std::size_t tau = 1 + rng.index(100);
    Pools pools(tau);
    for (std::size_t i = 0; i < history.size(); ++i) {
      admitted += update_finetune(pools, history[i], i ? &history[i - 1] : nullptr);
    }
    const auto expected = oracle::replay_finetune(history, tau);
    bool same = expected.size() == pools.finetune.size();
    for (std::size_t k = 0; same && k < expected.size(); ++k) {
      same = expected[k].episode == pools.finetune[k].episode &&
             expected[k].frames == pools.finetune[k].frames &&
             expected[k].label == pools.finetune[k].label;
    }
    mismatches += !same;
  }
  return {mismatches == 0, "1000 sequences, " + std::to_string(admitted) + " admissions, " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome overfit() {
  const auto t0 = Clock::now();
  Rng rng(4);
  // Near-binary frames: the reconstruction cross-entropy can only approach zero when the
  // targets themselves carry no entropy.
  EpisodeBatch batch;
  batch.action = Action::Straight;
  batch.label = 1;
  for (int j = 0; j < 5; ++j) {
    Frame f(64);
    for (double& v : f) v = rng.uniform() < 0.5 ? 0.02 : 0.98;
    batch.frames.push_back(f);
  }
  AdaptiveNet net = make_net(Variant::Radae, 64, Config{}.widths_radae, rng);
  const TrainStats initial = evaluate_batch(net, batch);
  TrainStats stats = initial;
  std::size_t epochs = 0;
  while (epochs < 200) {
    stats = train_batch(net, batch, 0.1, 0.15, rng);
    ++epochs;
    if (misclassification_rate(net, batch) == 0.0 && stats.l_g <= 0.5 * initial.l_g) break;
  }
  const double miss = misclassification_rate(net, batch);
  const double t = seconds_since(t0);
  return {miss == 0.0 && stats.l_g <= 0.5 * initial.l_g && t < 5.0,
          std::to_string(epochs) + " epochs, misclassification " + fmt("%.2f", miss) + ", L_g " +
              fmt("%.3f", initial.l_g) + " -> " + fmt("%.3f", stats.l_g) + ", " + fmt("%.2f", t) +
              " s"};
}

struct Run {
  std::string preset;
  std::uint64_t seed = 0;
  ExperimentLog log;
  Summary summary;
  double seconds = 0.0;
};

// Window percentages whose windows end in [first_end, last_end].
std::vector<double> window_pcts(const Summary& s, std::size_t first_end, std::size_t last_end) {
  std::vector<double> out;
  for (const auto& w : s.windows) {
    if (w.window_end >= first_end && w.window_end <= last_end) out.push_back(w.pct);
  }
  return out;
}

Outcome learning_trend(const std::vector<const Run*>& runs) {
  std::vector<double> early, late;
  std::string per_seed;
  for (const Run* r : runs) {
    const auto e = window_pcts(r->summary, 50, 125), l = window_pcts(r->summary, 225, 300);
    early.insert(early.end(), e.begin(), e.end());
    late.insert(late.end(), l.begin(), l.end());
    per_seed += " s" + std::to_string(r->seed) + "=" + fmt("%.0f", median(e)) + "/" +
                fmt("%.0f", median(l));
  }
  const double me = median(early), ml = median(late);
  return {ml <= 0.6 * me, "median L_NW% episodes 26-125 " + fmt("%.1f", me) + ", 201-300 " +
                              fmt("%.1f", ml) + " (need <= " + fmt("%.1f", 0.6 * me) +
                              "); early/late per seed:" + per_seed};
}

Outcome baseline_ordering(const std::vector<const Run*>& radae, const std::vector<const Run*>& lr) {
  std::vector<double> a, b;
  for (const Run* r : radae) a.push_back(tail_collision_pct(r->log.records, 100));
  for (const Run* r : lr) b.push_back(tail_collision_pct(r->log.records, 100));
  const double ma = median(a), mb = median(b);
  return {ma <= mb, "median last-100 collision % RA-DAE " + fmt("%.1f", ma) + ", LR " +
                        fmt("%.1f", mb)};
}

Outcome depth_trend(const std::vector<const Run*>& deep, const std::vector<const Run*>& shallow) {
  std::vector<double> a, b;
  for (const Run* r : deep) a.push_back(r->summary.aggregate.l_nw_pct);
  for (const Run* r : shallow) b.push_back(r->summary.aggregate.l_nw_pct);
  const double ma = median(a), mb = median(b);
  return {ma <= mb + 3.0, "median last-250 L_NW% 3-layer " + fmt("%.1f", ma) + ", 1-layer " +
                              fmt("%.1f", mb) + " (need <= " + fmt("%.1f", mb + 3.0) + ")"};
}

Outcome timing_trend(const std::vector<const Run*>& radae, const std::vector<const Run*>& sdae) {
  auto pooled = [](const std::vector<const Run*>& runs) {
    std::vector<double> t;
    for (const Run* r : runs) {
      for (const auto& rec : r->log.records) t.push_back(rec.train_time_s);
    }
    return median(t);
  };
  const double ta = pooled(radae), ts = pooled(sdae);
  return {ta <= 0.75 * ts, "median train time per episode RA-DAE " + fmt("%.2f", ta * 1e3) +
                               " ms, SDAE " + fmt("%.2f", ts * 1e3) + " ms (ratio " +
                               fmt("%.2f", ta / ts) + ")"};
}

Outcome growth_behavior(const std::vector<const Run*>& runs) {
  bool ok = true;
  std::string detail;
  for (const Run* r : runs) {
    const Config& c = r->log.config;
    std::size_t late_increments = 0, outside = 0, unpenalised = 0;
    for (const auto& rec : r->log.records) {
      // The controller counter n equals episode + 1.
      if (rec.episode + 1 > c.eta2 && rec.adapt_action == AdaptKind::Increment) ++late_increments;
      if (rec.nu_1 < c.v1 || rec.nu_1 > c.v2) {
        ++outside;
        const double g = (1.0 - (rec.l_c - rec.l_c_prev)) * (1.0 - rec.l_c);
        if (std::abs(rec.reward - (g - std::abs(c.u - rec.nu_1))) > 1e-12) ++unpenalised;
      }
    }
    bool valid = true;
    try {
      r->log.final_net.validate();
    } catch (const std::exception&) {
      valid = false;
    }
    ok = ok && late_increments > 0 && valid && unpenalised == 0;
    const auto w = r->log.final_net.widths();
    std::string widths;
    for (std::size_t k = 0; k < w.size(); ++k) widths += (k ? "/" : "") + std::to_string(w[k]);
    detail += " s" + std::to_string(r->seed) + ": " + std::to_string(late_increments) +
              " increments, " + std::to_string(outside) + " out-of-band, final " + widths +
              (valid ? "" : " INVALID") + (unpenalised ? " UNPENALISED" : "") + ";";
  }
  return {ok, detail.substr(1)};
}

// Wall-clock times are part of the logs, so both runs use timing = off.
Outcome determinism(Config cfg) {
  cfg.timing = TimingMode::Off;
  auto bytes = [](const ExperimentLog& log) {
    std::ostringstream episodes, summary, net;
    write_episode_csv(log.records, episodes);
    write_summary_csv(summarize(log.records, log.config.window, log.config.skip), summary);
    write_snapshot(log.final_net, net);
    return std::array<std::string, 3>{episodes.str(), summary.str(), net.str()};
  };
  const auto a = bytes(run_experiment(cfg)), b = bytes(run_experiment(cfg));
  const bool same = a == b;
  return {same, "episode CSV " + std::to_string(a[0].size()) + " B, summary CSV " +
                    std::to_string(a[1].size()) + " B, snapshot " + std::to_string(a[2].size()) +
                    " B, " + (same ? "identical" : "DIFFERENT") + " across two runs"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria for the navigation learner"};
  std::string config_dir = std::string(RADAE_SOURCE_DIR) + "/configs";
  std::string out_dir = "acceptance_runs";
  std::size_t n_seeds = 5;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--configs", config_dir, "Directory holding the desk presets");
  app.add_option("--out", out_dir, "Where per-run outputs are written");
  app.add_option("--seeds", n_seeds, "Seeds 1..N per preset")->check(CLI::Range(1, 100));
  app.add_option("--jobs", jobs, "Concurrent experiments")->check(CLI::Range(1, 256));
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  failures += report(1, "gradient correctness", gradient_check());
  failures += report(2, "controller arithmetic", controller_oracles());
  failures += report(3, "fine-tune pool replay", pool_replay());
  failures += report(4, "overfit sanity", overfit());

  const std::vector<std::string> presets = {"desk", "desk_1layer", "desk_sdae", "desk_lr"};
  std::vector<Run> runs;
  for (const auto& preset : presets) {
    const Config base = parse_config(config_dir + "/" + preset + ".cfg");
    for (std::uint64_t seed = 1; seed <= n_seeds; ++seed) {
      Run r;
      r.preset = preset;
      r.seed = seed;
      r.log.config = base;
      r.log.config.seed = seed;
      runs.push_back(std::move(r));
    }
  }
  const auto t0 = Clock::now();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < runs.size(); k = next++) {
      Run& r = runs[k];
      const auto start = Clock::now();
      r.log = run_experiment(r.log.config);
      r.seconds = seconds_since(start);
      r.summary = summarize(r.log.records, r.log.config.window, r.log.config.skip);
      write_run_outputs(r.log, fs::path(out_dir) / (r.preset + "_s" + std::to_string(r.seed)), true);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < std::min(jobs, runs.size()); ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::map<std::string, std::vector<const Run*>> by_preset;
  double slowest = 0.0;
  for (const Run& r : runs) {
    by_preset[r.preset].push_back(&r);
    slowest = std::max(slowest, r.seconds);
  }
  std::cout << "closed-loop runs: " << runs.size() << " in " << fmt("%.0f", seconds_since(t0))
            << " s with " << jobs << " jobs, slowest run " << fmt("%.0f", slowest) << " s"
            << std::endl;

  Outcome trend = learning_trend(by_preset["desk"]);
  if (slowest > 600.0) {
    trend.pass = false;
    trend.detail += "; a run exceeded 10 min";
  }
  failures += report(5, "learning trend", trend);
  failures += report(6, "baseline ordering", baseline_ordering(by_preset["desk"], by_preset["desk_lr"]));
  failures += report(7, "depth trend", depth_trend(by_preset["desk"], by_preset["desk_1layer"]));
  failures += report(8, "timing trend", timing_trend(by_preset["desk"], by_preset["desk_sdae"]));
  failures += report(9, "growth behaviour", growth_behavior(by_preset["desk"]));
  failures += report(10, "determinism", determinism(by_preset["desk"].front()->log.config));

  std::cout << (failures ? std::to_string(failures) + " criteria failed" : "all criteria passed")
            << std::endl;
  return failures ? 1 : 0;
}
