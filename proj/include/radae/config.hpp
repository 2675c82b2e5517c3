#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "radae/adaptation.hpp"
#include "radae/model.hpp"
#include "radae/perception.hpp"
#include "radae/simworld.hpp"

namespace radae {

enum class SelectionMode : std::uint8_t { Argmin, Argmax };
enum class TimingMode : std::uint8_t { Wall, Off };
/// Which view feeds next-action prediction after a collision: the last frame captured during
/// the motion, or a frame rendered at the pose the robot was restored to.
enum class PredictView : std::uint8_t { LastFrame, Pose };

std::string_view to_string(SelectionMode m);
std::string_view to_string(TimingMode m);
std::string_view to_string(PredictView v);

/// Fully resolved experiment configuration. Defaults are the full-scale settings.
struct Config {
  Variant variant = Variant::Radae;
  std::string world = "cluttered";
  std::uint64_t seed = 1;
  std::size_t episodes = 500;

  // camera and preprocessing
  std::size_t camera_width = 640;
  std::size_t camera_height = 480;
  double fov_deg = 100.0;
  std::size_t resize_width = 128;
  std::size_t resize_height = 96;
  std::size_t crop_rows = 19;
  double brightness_jitter = 0.0;

  // network
  std::vector<std::size_t> widths_radae = {64, 48, 32};
  std::vector<std::size_t> widths_sdae = {256, 196, 128};
  double lr_radae = 0.01;
  double lr_sdae = 0.05;
  double lr_lr = 0.001;
  double corruption = 0.15;
  std::size_t batch_size = 5;
  InitScheme init = InitScheme::SigmoidGlorot;
  GenGradient gen_gradient = GenGradient::Local;

  // motion
  double delta = 1.0;  // step length in metres
  double turn_deg = 30.0;
  std::size_t n_sub = 10;

  // action selection
  double mu1 = 0.45;
  double mu2 = 0.95;
  SelectionMode selection_mode = SelectionMode::Argmin;
  std::size_t predict_frames = 1;
  PredictView predict_view = PredictView::Pose;

  // structure controller and pools
  std::size_t nodes_delta = 5;
  std::size_t tau = 10000;
  std::size_t ema_window = 15;
  std::size_t eta1 = 5;
  std::size_t eta2 = 30;
  double alpha_ema = 0.5;
  double alpha_q = 0.5;
  double gamma = 0.9;
  double epsilon = 0.1;
  double u = 1.75;
  double v1 = 0.5;
  double v2 = 3.0;
  std::size_t h_min = 4;
  std::size_t greedy_epochs = 10;

  // metrics and output
  std::size_t window = 25;
  std::size_t skip = 0;
  std::string out;
  TimingMode timing = TimingMode::Wall;
  int kernel_threads = 1;

  const std::vector<std::size_t>& widths() const;
  double learning_rate() const;
  FrameGeometry geometry() const;
  CameraSpec camera() const;
  MotionParams motion() const;
  ControllerParams controller_params() const;

  /// Throws ConfigError naming the first offending key.
  void validate() const;
  /// `key = value` lines for every key, in a fixed order; parses back to the same config.
  std::string to_text() const;
};

/// Names of every accepted key.
std::vector<std::string> config_keys();

/// Applies `key = value` lines on top of `base`. Blank lines and '#' comments are skipped.
/// Unknown keys, malformed values and out-of-range values raise ConfigError naming the key.
Config parse_config_text(std::string_view text, const Config& base = Config{});
Config parse_config(const std::string& path, const Config& base = Config{});

/// Sets one key from its textual value.
void set_config_value(Config& cfg, std::string_view key, std::string_view value);

}  // namespace radae
