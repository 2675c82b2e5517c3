#include "radae/navigator.hpp"

#include <algorithm>
#include <chrono>

#include "radae/errors.hpp"
#include "radae/kernels.hpp"

namespace radae {

namespace {

// Stream ids for Rng::derive.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kTrainStream = 2;
constexpr std::uint64_t kControllerStream = 3;
constexpr std::uint64_t kSelectStream = 4;
constexpr std::uint64_t kJitterStream = 5;

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    if (!enabled_) return 0.0;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

Action select_action(const std::array<double, kNumActions>& probs, double mu1, double mu2,
                     SelectionMode mode, Rng& rng) {
  std::optional<Action> best;
  for (Action a : kAllActions) {
    const double p = probs[index_of(a)];
    if (p < mu1 || p > mu2) continue;
    if (!best) {
      best = a;
      continue;
    }
    const double q = probs[index_of(*best)];
    if (mode == SelectionMode::Argmin ? p < q : p > q) best = a;
  }
  if (best) return *best;
  return kAllActions[rng.index(kNumActions)];
}

std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t m) {
  m = std::min(m, n);
  std::vector<std::size_t> idx;
  idx.reserve(m);
  for (std::size_t k = 0; k < m; ++k) idx.push_back((k + 1) * n / m - 1);
  return idx;
}

Experiment::Experiment(Config config)
    : config_(std::move(config)),
      world_(load_world(config_.world)),
      geometry_(config_.geometry()),
      camera_(config_.camera()),
      motion_(config_.motion()),
      init_rng_(Rng::derive(config_.seed, kInitStream)),
      train_rng_(Rng::derive(config_.seed, kTrainStream)),
      select_rng_(Rng::derive(config_.seed, kSelectStream)),
      jitter_rng_(Rng::derive(config_.seed, kJitterStream)),
      pools_(config_.tau),
      pose_(world_.start),
      last_safe_(world_.start) {
  config_.validate();
  net_ = make_net(config_.variant, geometry_.dim(), config_.widths(), init_rng_, config_.init);
  if (config_.variant == Variant::Radae) {
    controller_.emplace(config_.controller_params(), net_.widths(),
                        Rng::derive(config_.seed, kControllerStream));
  }
}

Frame Experiment::capture(RawImage& img, bool to_sink) {
  if (config_.brightness_jitter > 0.0) {
    const double gain =
        1.0 + jitter_rng_.uniform(-config_.brightness_jitter, config_.brightness_jitter);
    for (double& v : img.data) v *= gain;
  }
  Frame f = preprocess(img, geometry_);
  if (to_sink && sink_) sink_(episode_, sink_index_++, f);
  return f;
}

EpisodeRecord Experiment::run_episode() {
  sink_index_ = 0;
  const kernels::ScopedThreads threads(config_.kernel_threads);
  const bool timed = config_.timing == TimingMode::Wall;

  EpisodeRecord rec;
  rec.episode = episode_;
  rec.action = pending_;
  rec.p_chosen = pending_p_;
  rec.pose_before = pose_;

  MotionResult motion = execute_action(world_, pose_, pending_, motion_, camera_);
  rec.collided = motion.collided;

  std::vector<Frame> frames;
  frames.reserve(motion.frames.size());
  for (auto& img : motion.frames) frames.push_back(capture(img));
  rec.frames = frames.size();

  if (motion.collided) {
    // Back to the last safe position; the heading of the failed move is kept so the
    // robot does not retry the identical motion forever.
    pose_ = RobotPose{last_safe_.x, last_safe_.y, motion.end_pose.heading};
  } else {
    pose_ = motion.end_pose;
    last_safe_ = pose_;
  }
  rec.pose_after = pose_;

  EpisodeBatch batch;
  batch.episode = episode_;
  batch.action = pending_;
  batch.label = motion.collided ? 0 : 1;
  for (std::size_t k : subsample_indices(frames.size(), config_.batch_size)) {
    batch.frames.push_back(frames[k]);
  }

  const double lr = config_.learning_rate();
  const double p_c = config_.corruption;
  if (controller_) {
    const AdaptReport report =
        adapt_and_train(net_, *controller_, pools_, batch, lr, p_c, train_rng_);
    rec.adapt_action = report.executed;
    rec.adapt_chosen = report.chosen;
    rec.reward = report.reward;
    rec.l_g = report.stats.l_g;
    rec.l_c = report.stats.l_c;
    rec.nu_1 = report.nu_1;
    rec.l_c_prev = report.l_c_prev;
    rec.train_time_s = timed ? report.train_time_s : 0.0;
  } else {
    const Stopwatch sw(timed);
    if (config_.variant == Variant::Sdae) {
      train_pool(net_, pools_.finetune, lr, p_c, train_rng_, config_.gen_gradient);
    }
    const TrainStats stats = train_batch(net_, batch, lr, p_c, train_rng_, config_.gen_gradient);
    rec.train_time_s = sw.seconds();
    rec.l_g = stats.l_g;
    rec.l_c = stats.l_c;
  }
  rec.widths = net_.widths();

  update_finetune(pools_, batch, prev_batch_ ? &*prev_batch_ : nullptr);
  push_recent(pools_, batch);
  prev_batch_ = std::move(batch);

  const Stopwatch sw(timed);
  if (rec.collided && config_.predict_view == PredictView::Pose) {
    // The robot now looks out from the restored pose; that view decides the next action.
    RawImage view = render(world_, pose_, camera_);
    frames.push_back(capture(view, false));
  }
  const std::size_t k = std::min<std::size_t>(config_.predict_frames, frames.size());
  std::array<double, kNumActions> probs{};
  for (std::size_t j = frames.size() - k; j < frames.size(); ++j) {
    const auto p = head_probabilities(net_, frames[j]);
    for (std::size_t a = 0; a < kNumActions; ++a) probs[a] += p[a];
  }
  for (double& p : probs) p /= static_cast<double>(k);
  rec.next_probs = probs;
  pending_ = select_action(probs, config_.mu1, config_.mu2, config_.selection_mode, select_rng_);
  pending_p_ = probs[index_of(pending_)];
  rec.predict_time_s = sw.seconds();

  ++episode_;
  return rec;
}

ExperimentLog run_experiment(const Config& config, FrameSink sink) {
  config.validate();
  Experiment exp(config);
  if (sink) exp.set_frame_sink(std::move(sink));
  ExperimentLog log;
  log.config = config;
  log.records.reserve(config.episodes);
  for (std::size_t i = 0; i < config.episodes; ++i) log.records.push_back(exp.run_episode());
  log.final_net = exp.net();
  log.controller = exp.controller();
  return log;
}

}  // namespace radae
