#include "radae/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "radae/errors.hpp"

namespace radae {

std::string_view to_string(SelectionMode m) { return m == SelectionMode::Argmin ? "argmin" : "argmax"; }
std::string_view to_string(TimingMode m) { return m == TimingMode::Wall ? "wall" : "off"; }
std::string_view to_string(PredictView v) { return v == PredictView::Pose ? "pose" : "last_frame"; }

const std::vector<std::size_t>& Config::widths() const {
  static const std::vector<std::size_t> none;
  switch (variant) {
    case Variant::Radae: return widths_radae;
    case Variant::Sdae: return widths_sdae;
    case Variant::Lr: return none;
  }
  return none;
}

double Config::learning_rate() const {
  switch (variant) {
    case Variant::Radae: return lr_radae;
    case Variant::Sdae: return lr_sdae;
    case Variant::Lr: return lr_lr;
  }
  return lr_radae;
}

FrameGeometry Config::geometry() const { return {resize_width, resize_height, crop_rows}; }

CameraSpec Config::camera() const { return {deg_to_rad(fov_deg), camera_width, camera_height}; }

MotionParams Config::motion() const { return {delta, deg_to_rad(turn_deg), n_sub}; }

ControllerParams Config::controller_params() const {
  ControllerParams p;
  p.alpha_q = alpha_q;
  p.gamma = gamma;
  p.epsilon = epsilon;
  p.eta1 = eta1;
  p.eta2 = eta2;
  p.alpha_ema = alpha_ema;
  p.ema_window = ema_window;
  p.delta = nodes_delta;
  p.u = u;
  p.v1 = v1;
  p.v2 = v2;
  p.h_min = h_min;
  p.greedy_epochs = greedy_epochs;
  p.growth_init = init;
  p.gen_gradient = gen_gradient;
  return p;
}

namespace {

[[noreturn]] void bad(std::string_view key, const std::string& why) {
  throw ConfigError("config key '" + std::string(key) + "': " + why);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    bad(key, "expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    bad(key, "expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

std::vector<std::size_t> to_widths(std::string_view key, std::string_view v) {
  std::vector<std::size_t> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    const auto item = trim(v.substr(0, comma));
    out.push_back(static_cast<std::size_t>(to_uint(key, item)));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt_widths(const std::vector<std::size_t>& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(w[i]);
  }
  return out;
}

struct KeySpec {
  std::string_view name;
  std::function<void(Config&, std::string_view)> set;
  std::function<std::string(const Config&)> get;
};

#define RADAE_REAL(field)                                                           \
  KeySpec {                                                                         \
    #field, [](Config& c, std::string_view v) { c.field = to_double(#field, v); }, \
        [](const Config& c) { return fmt(c.field); }                                \
  }
#define RADAE_SIZE(field)                                                                   \
  KeySpec {                                                                                 \
    #field,                                                                                 \
        [](Config& c, std::string_view v) { c.field = static_cast<std::size_t>(to_uint(#field, v)); }, \
        [](const Config& c) { return std::to_string(c.field); }                             \
  }

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      {"variant",
       [](Config& c, std::string_view v) {
         if (v == "radae") c.variant = Variant::Radae;
         else if (v == "sdae") c.variant = Variant::Sdae;
         else if (v == "lr") c.variant = Variant::Lr;
         else bad("variant", "expected radae, sdae or lr, got '" + std::string(v) + "'");
       },
       [](const Config& c) { return std::string(to_string(c.variant)); }},
      {"world", [](Config& c, std::string_view v) { c.world = std::string(v); },
       [](const Config& c) { return c.world; }},
      {"seed", [](Config& c, std::string_view v) { c.seed = to_uint("seed", v); },
       [](const Config& c) { return std::to_string(c.seed); }},
      RADAE_SIZE(episodes),
      RADAE_SIZE(camera_width),
      RADAE_SIZE(camera_height),
      RADAE_REAL(fov_deg),
      RADAE_SIZE(resize_width),
      RADAE_SIZE(resize_height),
      RADAE_SIZE(crop_rows),
      RADAE_REAL(brightness_jitter),
      {"widths_radae",
       [](Config& c, std::string_view v) { c.widths_radae = to_widths("widths_radae", v); },
       [](const Config& c) { return fmt_widths(c.widths_radae); }},
      {"widths_sdae",
       [](Config& c, std::string_view v) { c.widths_sdae = to_widths("widths_sdae", v); },
       [](const Config& c) { return fmt_widths(c.widths_sdae); }},
      RADAE_REAL(lr_radae),
      RADAE_REAL(lr_sdae),
      RADAE_REAL(lr_lr),
      RADAE_REAL(corruption),
      {"init",
       [](Config& c, std::string_view v) {
         if (v == "glorot") c.init = InitScheme::SigmoidGlorot;
         else if (v == "fan_in") c.init = InitScheme::FanIn;
         else bad("init", "expected glorot or fan_in, got '" + std::string(v) + "'");
       },
       [](const Config& c) { return std::string(to_string(c.init)); }},
      {"gen_gradient",
       [](Config& c, std::string_view v) {
         if (v == "local") c.gen_gradient = GenGradient::Local;
         else if (v == "full") c.gen_gradient = GenGradient::Full;
         else bad("gen_gradient", "expected local or full, got '" + std::string(v) + "'");
       },
       [](const Config& c) { return std::string(to_string(c.gen_gradient)); }},
      RADAE_SIZE(batch_size),
      RADAE_REAL(delta),
      RADAE_REAL(turn_deg),
      RADAE_SIZE(n_sub),
      RADAE_REAL(mu1),
      RADAE_REAL(mu2),
      {"selection_mode",
       [](Config& c, std::string_view v) {
         if (v == "argmin") c.selection_mode = SelectionMode::Argmin;
         else if (v == "argmax") c.selection_mode = SelectionMode::Argmax;
         else bad("selection_mode", "expected argmin or argmax, got '" + std::string(v) + "'");
       },
       [](const Config& c) { return std::string(to_string(c.selection_mode)); }},
      RADAE_SIZE(predict_frames),
      {"predict_view",
       [](Config& c, std::string_view v) {
         if (v == "pose") c.predict_view = PredictView::Pose;
         else if (v == "last_frame") c.predict_view = PredictView::LastFrame;
         else bad("predict_view", "expected pose or last_frame, got '" + std::string(v) + "'");
       },
       [](const Config& c) { return std::string(to_string(c.predict_view)); }},
      RADAE_SIZE(nodes_delta),
      RADAE_SIZE(tau),
      RADAE_SIZE(ema_window),
      RADAE_SIZE(eta1),
      RADAE_SIZE(eta2),
      RADAE_REAL(alpha_ema),
      RADAE_REAL(alpha_q),
      RADAE_REAL(gamma),
      RADAE_REAL(epsilon),
      RADAE_REAL(u),
      RADAE_REAL(v1),
      RADAE_REAL(v2),
      RADAE_SIZE(h_min),
      RADAE_SIZE(greedy_epochs),
      RADAE_SIZE(window),
      RADAE_SIZE(skip),
      {"out", [](Config& c, std::string_view v) { c.out = std::string(v); },
       [](const Config& c) { return c.out; }},
      {"timing",
       [](Config& c, std::string_view v) {
         if (v == "wall") c.timing = TimingMode::Wall;
         else if (v == "off") c.timing = TimingMode::Off;
         else bad("timing", "expected wall or off, got '" + std::string(v) + "'");
       },
       [](const Config& c) { return std::string(to_string(c.timing)); }},
      {"kernel_threads",
       [](Config& c, std::string_view v) {
         c.kernel_threads = static_cast<int>(to_uint("kernel_threads", v));
       },
       [](const Config& c) { return std::to_string(c.kernel_threads); }},
  };
  return table;
}

#undef RADAE_REAL
#undef RADAE_SIZE

void check(bool ok, std::string_view key, const std::string& why) {
  if (!ok) bad(key, why);
}

void check_widths(const std::vector<std::size_t>& w, std::string_view key) {
  check(!w.empty(), key, "needs at least one layer");
  check(std::all_of(w.begin(), w.end(), [](std::size_t x) { return x >= 1; }), key,
        "widths must be positive");
}

bool unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : key_table()) out.emplace_back(k.name);
  return out;
}

void set_config_value(Config& cfg, std::string_view key, std::string_view value) {
  const auto& table = key_table();
  const auto it = std::find_if(table.begin(), table.end(), [&](const KeySpec& k) { return k.name == key; });
  if (it == table.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  it->set(cfg, value);
}

void Config::validate() const {
  check(episodes >= 1, "episodes", "must be at least 1");
  check(camera_width >= 1 && camera_height >= 1, "camera_width", "camera must be at least 1x1");
  check(fov_deg > 0.0 && fov_deg < 180.0, "fov_deg", "must lie in (0,180)");
  check(resize_width >= 1, "resize_width", "must be positive");
  check(resize_height > 2 * crop_rows, "crop_rows", "crop leaves no rows");
  check(brightness_jitter >= 0.0 && brightness_jitter < 1.0, "brightness_jitter", "must lie in [0,1)");
  check_widths(widths_radae, "widths_radae");
  check_widths(widths_sdae, "widths_sdae");
  check(lr_radae > 0.0, "lr_radae", "must be positive");
  check(lr_sdae > 0.0, "lr_sdae", "must be positive");
  check(lr_lr > 0.0, "lr_lr", "must be positive");
  check(unit(corruption), "corruption", "must lie in [0,1]");
  check(batch_size >= 1, "batch_size", "must be at least 1");
  check(delta > 0.0, "delta", "step length must be positive");
  check(turn_deg >= 0.0 && turn_deg <= 180.0, "turn_deg", "must lie in [0,180]");
  check(n_sub >= 2, "n_sub", "must be at least 2");
  check(mu1 >= 0.0 && mu1 < mu2 && mu2 <= 1.0, "mu1", "need 0 <= mu1 < mu2 <= 1");
  check(predict_frames >= 1, "predict_frames", "must be at least 1");
  check(nodes_delta >= 1, "nodes_delta", "must be at least 1");
  check(tau >= 1, "tau", "must be at least 1");
  check(ema_window >= 1, "ema_window", "must be at least 1");
  check(eta1 <= eta2, "eta1", "must not exceed eta2");
  check(unit(alpha_ema), "alpha_ema", "must lie in [0,1]");
  check(unit(alpha_q), "alpha_q", "must lie in [0,1]");
  check(gamma >= 0.0 && gamma < 1.0, "gamma", "must lie in [0,1)");
  check(unit(epsilon), "epsilon", "must lie in [0,1]");
  check(v1 > 0.0 && v1 < v2, "v1", "need 0 < v1 < v2");
  check(h_min >= 1, "h_min", "must be at least 1");
  check(window >= 1, "window", "must be at least 1");
  check(kernel_threads >= 1, "kernel_threads", "must be at least 1");
}

std::string Config::to_text() const {
  std::string out;
  for (const auto& k : key_table()) {
    out += k.name;
    out += " = ";
    out += k.get(*this);
    out += '\n';
  }
  return out;
}

Config parse_config_text(std::string_view text, const Config& base) {
  Config cfg = base;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    set_config_value(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

Config parse_config(const std::string& path, const Config& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), base);
}

}  // namespace radae
