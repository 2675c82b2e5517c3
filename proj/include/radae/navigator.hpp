#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "radae/adaptation.hpp"
#include "radae/config.hpp"
#include "radae/episode_log.hpp"
#include "radae/model.hpp"
#include "radae/pools.hpp"
#include "radae/rng.hpp"
#include "radae/simworld.hpp"

namespace radae {

/// Band selection. Keeps actions with mu1 <= p <= mu2 and returns the smallest
/// (Argmin) or largest (Argmax) member, ties broken L < S < R. An empty band draws uniformly.
Action select_action(const std::array<double, kNumActions>& probs, double mu1, double mu2,
                     SelectionMode mode, Rng& rng);

/// Indices of `m` evenly spaced picks out of `n` frames; the last frame is always included.
std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t m);

/// Called with (episode, frame index, preprocessed frame) for every captured frame.
using FrameSink = std::function<void(std::size_t, std::size_t, const Frame&)>;

/// State of one closed-loop run: world, robot, net, pools and controller.
class Experiment {
 public:
  explicit Experiment(Config config);

  /// Executes the pending action, trains on the outcome and picks the next action.
  EpisodeRecord run_episode();

  const Config& config() const { return config_; }
  const World& world() const { return world_; }
  const AdaptiveNet& net() const { return net_; }
  const Pools& pools() const { return pools_; }
  const std::optional<QController>& controller() const { return controller_; }
  const RobotPose& pose() const { return pose_; }
  const RobotPose& last_safe_pose() const { return last_safe_; }
  Action pending_action() const { return pending_; }
  std::size_t episode() const { return episode_; }

  void set_frame_sink(FrameSink sink) { sink_ = std::move(sink); }

 private:
  // Applies brightness jitter and preprocessing; optionally reports the frame to the sink.
  Frame capture(RawImage& img, bool to_sink = true);

  Config config_;
  World world_;
  FrameGeometry geometry_;
  CameraSpec camera_;
  MotionParams motion_;
  Rng init_rng_;
  Rng train_rng_;
  Rng select_rng_;
  Rng jitter_rng_;
  AdaptiveNet net_;
  Pools pools_;
  std::optional<QController> controller_;
  std::optional<EpisodeBatch> prev_batch_;
  RobotPose pose_;
  RobotPose last_safe_;
  Action pending_ = Action::Straight;
  double pending_p_ = 1.0;
  std::size_t episode_ = 0;
  FrameSink sink_;
  std::size_t sink_index_ = 0;
};

struct ExperimentLog {
  Config config;
  std::vector<EpisodeRecord> records;
  AdaptiveNet final_net;
  std::optional<QController> controller;
};

/// Validates the config, then runs `config.episodes` episodes from a fresh experiment.
ExperimentLog run_experiment(const Config& config, FrameSink sink = {});

}  // namespace radae
