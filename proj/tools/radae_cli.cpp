// radae: run, compare and summarize self-supervised navigation experiments.
#include <CLI11.hpp>

#include <iostream>

#include "radae/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Self-supervised collision-avoidance learner with an adaptive denoising autoencoder"};
  app.require_subcommand(1);

  radae::RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment");
  run_cmd->add_option("--config", run.config_path, "key = value config file");
  run_cmd->add_option("--seed", run.seed, "Override the config seed");
  run_cmd->add_option("--out", run.out, "Output directory");
  run_cmd->add_flag("--dump-frames", run.dump_frames, "Write every preprocessed frame as PGM");
  run_cmd->add_flag("--dump-qtable", run.dump_qtable, "Write the final Q-table");

  radae::CompareOptions compare;
  auto* cmp_cmd = app.add_subcommand("compare", "Run a config x seed matrix");
  cmp_cmd->add_option("--configs", compare.config_paths, "Config files")
      ->required()
      ->delimiter(',');
  cmp_cmd->add_option("--seeds", compare.seeds, "Seeds, comma separated")
      ->required()
      ->delimiter(',');
  cmp_cmd->add_option("--out", compare.out, "Output root");
  cmp_cmd->add_option("--jobs", compare.jobs, "Experiments run concurrently")
      ->check(CLI::PositiveNumber);

  radae::SummarizeOptions summ;
  auto* sum_cmd = app.add_subcommand("summarize", "Recompute window summaries from episodes.csv");
  sum_cmd->add_option("--log", summ.log_path, "Episode CSV")->required();
  sum_cmd->add_option("--window", summ.window, "Window length M");
  sum_cmd->add_option("--skip", summ.skip, "Leading episodes to discard");
  sum_cmd->add_option("--out", summ.out, "Write the summary here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  if (*run_cmd) return radae::cmd_run(run, std::cout, std::cerr);
  if (*cmp_cmd) return radae::cmd_compare(compare, std::cout, std::cerr);
  return radae::cmd_summarize(summ, std::cout, std::cerr);
}
