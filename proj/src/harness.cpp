#include "radae/harness.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "radae/errors.hpp"
#include "radae/metrics.hpp"
#include "radae/snapshot.hpp"

namespace radae {

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  return f;
}

std::string frame_name(std::size_t episode, std::size_t j) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "e%05zu_f%02zu.pgm", episode, j);
  return buf;
}

// Summary rows with a variant/seed/config prefix.
void append_comparison(std::ostream& out, const Config& cfg, const std::string& stem,
                       const Summary& summary) {
  std::ostringstream rows;
  write_summary_csv(summary, rows);
  std::istringstream in(rows.str());
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    out << to_string(cfg.variant) << ',' << cfg.seed << ',' << stem << ',' << line << '\n';
  }
}

}  // namespace

fs::path output_root(const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("RADAE_OUT"); env && *env) return env;
  return "runs";
}

Config resolve_run_config(const RunOptions& opts) {
  Config cfg = opts.config_path.empty() ? Config{} : parse_config(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (!opts.out.empty()) cfg.out = opts.out;
  cfg.validate();
  return cfg;
}

void write_run_outputs(const ExperimentLog& log, const fs::path& dir, bool dump_qtable) {
  fs::create_directories(dir);
  {
    auto f = open_out(dir / "config.cfg");
    f << log.config.to_text();
  }
  {
    auto f = open_out(dir / "episodes.csv");
    write_episode_csv(log.records, f);
  }
  const Summary summary = summarize(log.records, log.config.window, log.config.skip);
  {
    auto f = open_out(dir / "summary.csv");
    write_summary_csv(summary, f);
  }
  {
    auto f = open_out(dir / "aggregate.csv");
    write_aggregate_csv(summary, f);
  }
  save_snapshot(log.final_net, (dir / "net.rada").string());
  if (dump_qtable && log.controller) {
    auto f = open_out(dir / "qtable.csv");
    write_qtable_csv(*log.controller, f);
  }
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const Config cfg = resolve_run_config(opts);
    const fs::path dir = cfg.out.empty() ? output_root() / "run" : fs::path(cfg.out);
    FrameSink sink;
    if (opts.dump_frames) {
      const fs::path frames = dir / "frames";
      fs::create_directories(frames);
      const FrameGeometry g = cfg.geometry();
      sink = [frames, g](std::size_t episode, std::size_t j, const Frame& f) {
        write_pgm((frames / frame_name(episode, j)).string(), f, g.out_width(), g.out_height());
      };
    }
    const ExperimentLog log = run_experiment(cfg, sink);
    write_run_outputs(log, dir, opts.dump_qtable);
    const Summary summary = summarize(log.records, cfg.window, cfg.skip);
    out << "wrote " << dir.string() << ": " << log.records.size() << " episodes, "
        << summary.windows.size() << " windows, aggregate L_NW "
        << format_pct(summary.aggregate.l_nw_pct) << "%\n";
    return 0;
  } catch (const std::exception& e) {
    err << "run: " << e.what() << '\n';
    return 1;
  }
}

int cmd_compare(const CompareOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    if (opts.config_paths.empty()) throw ConfigError("compare needs at least one config");
    if (opts.seeds.empty()) throw ConfigError("compare needs at least one seed");
    const fs::path root = output_root(opts.out);

    struct Job {
      Config cfg;
      std::string stem;
      fs::path dir;
      Summary summary;
      std::string error;
    };
    std::vector<Job> jobs;
    for (const auto& path : opts.config_paths) {
      const Config base = parse_config(path);
      const std::string stem = fs::path(path).stem().string();
      for (std::uint64_t seed : opts.seeds) {
        Job job;
        job.cfg = base;
        job.cfg.seed = seed;
        job.stem = stem;
        job.dir = root / (stem + "_s" + std::to_string(seed));
        job.cfg.out = job.dir.string();
        job.cfg.validate();
        jobs.push_back(std::move(job));
      }
    }

    // One experiment per worker; experiments share nothing.
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k = next++; k < jobs.size(); k = next++) {
        Job& job = jobs[k];
        try {
          const ExperimentLog log = run_experiment(job.cfg);
          write_run_outputs(log, job.dir, false);
          job.summary = summarize(log.records, job.cfg.window, job.cfg.skip);
        } catch (const std::exception& e) {
          job.error = e.what();
        }
      }
    };
    const std::size_t n_workers = std::clamp<std::size_t>(opts.jobs, 1, jobs.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    int status = 0;
    fs::create_directories(root);
    auto f = open_out(root / "comparison.csv");
    f << kComparisonHeader << '\n';
    for (const auto& job : jobs) {
      if (!job.error.empty()) {
        err << "compare: " << job.dir.string() << ": " << job.error << '\n';
        status = 1;
        continue;
      }
      append_comparison(f, job.cfg, job.stem, job.summary);
      out << job.dir.string() << ": aggregate L_NW " << format_pct(job.summary.aggregate.l_nw_pct)
          << "%\n";
    }
    return status;
  } catch (const std::exception& e) {
    err << "compare: " << e.what() << '\n';
    return 1;
  }
}

int cmd_summarize(const SummarizeOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    if (opts.window < 1) throw ConfigError("window must be at least 1");
    const auto records = read_episode_csv(opts.log_path);
    const Summary summary = summarize(records, opts.window, opts.skip);
    if (opts.out.empty()) {
      write_summary_csv(summary, out);
    } else {
      auto f = open_out(opts.out);
      write_summary_csv(summary, f);
    }
    return 0;
  } catch (const std::exception& e) {
    err << "summarize: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace radae
