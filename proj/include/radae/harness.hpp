#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "radae/config.hpp"
#include "radae/navigator.hpp"

namespace radae {

namespace fs = std::filesystem;

/// Output root: `explicit_dir` when given, else $RADAE_OUT, else "runs".
fs::path output_root(const std::string& explicit_dir = {});

struct RunOptions {
  std::string config_path;  // empty: built-in defaults
  std::optional<std::uint64_t> seed;
  std::string out;          // overrides the config's `out`
  bool dump_frames = false;
  bool dump_qtable = false;
};

struct CompareOptions {
  std::vector<std::string> config_paths;
  std::vector<std::uint64_t> seeds;
  std::string out;
  std::size_t jobs = 1;
};

struct SummarizeOptions {
  std::string log_path;
  std::size_t window = 25;
  std::size_t skip = 0;
  std::string out;  // empty: write to the stream
};

/// Resolves a run's config from file plus overrides. Throws ConfigError.
Config resolve_run_config(const RunOptions& opts);

/// Writes config.cfg, episodes.csv, summary.csv, aggregate.csv and net.rada into `dir`,
/// plus qtable.csv and frames/ when requested.
void write_run_outputs(const ExperimentLog& log, const fs::path& dir, bool dump_qtable);

/// Each command returns a process exit status and reports failures on `err`.
int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareOptions& opts, std::ostream& out, std::ostream& err);
int cmd_summarize(const SummarizeOptions& opts, std::ostream& out, std::ostream& err);

/// Header of the merged comparison CSV: variant, seed, config, then the summary columns.
inline constexpr std::string_view kComparisonHeader =
    "variant,seed,config,window_end,l_nw,l_w,pct,mean_width_l1,mean_width_l2,mean_width_l3,"
    "mean_train_time_s,mean_predict_time_s";

}  // namespace radae
