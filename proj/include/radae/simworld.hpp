#pragma once

#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "radae/perception.hpp"
#include "radae/types.hpp"

namespace radae {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Circle {
  Vec2 center;
  double radius = 0.5;
  double albedo = 0.5;
};

struct Box {
  Vec2 min;
  Vec2 max;
  double albedo = 0.5;
};

using Obstacle = std::variant<Circle, Box>;

/// Position in metres, heading in radians measured counter-clockwise from +x.
struct RobotPose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

/// Wraps an angle into (-pi, pi].
double normalize_angle(double a);

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// 2D arena. Without bounds the plane is open and nothing is drawn at the horizon.
struct World {
  std::optional<Box> bounds;  // albedo is the arena wall albedo
  std::vector<Obstacle> obstacles;
  double background_albedo = 0.8;
  double robot_radius = 0.25;
  RobotPose start;

  /// Throws ContractError for non-positive radii, albedo outside [0,1] or obstacles
  /// outside the bounds.
  void validate() const;
};

struct CameraSpec {
  double fov = deg_to_rad(100.0);
  std::size_t width = 640;
  std::size_t height = 480;
};

struct MotionParams {
  double step = 1.0;                 // metres travelled per action
  double turn = deg_to_rad(30.0);    // rotation applied before L/R translate
  std::size_t sub_steps = 10;
};

struct MotionResult {
  std::vector<RawImage> frames;
  bool collided = false;
  RobotPose end_pose;
  std::optional<RobotPose> contact_pose;
};

struct RayHit {
  double distance = 0.0;
  double albedo = 0.0;
};

/// Nearest intersection of a ray with any obstacle or arena wall.
std::optional<RayHit> cast_ray(const World& world, Vec2 origin, double angle);

/// Shade of a wall seen at distance t.
inline double wall_shade(double albedo, double t) { return albedo / (1.0 + 0.3 * t); }

/// Column-wise raycast. A hit at distance t draws a vertically centred band of height
/// 0.5 * image_height / t; everything else is a sky-to-floor gradient (floor darker).
RawImage render(const World& world, const RobotPose& pose, const CameraSpec& camera);

/// True when the robot disc centred at `p` overlaps an obstacle or leaves the arena.
bool in_collision(const World& world, Vec2 p);

/// L/R rotate by +-turn first (left is counter-clockwise), then every action translates
/// `step` metres in equal sub-steps. A frame is rendered after each sub-step; the first
/// contact stops the motion.
MotionResult execute_action(const World& world, const RobotPose& pose, Action action,
                            const MotionParams& params, const CameraSpec& camera);

// Scene text, one item per line, '#' starts a comment:
//   bounds x0 y0 x1 y1 [wall_albedo]
//   circle x y r albedo
//   rect x0 y0 x1 y1 albedo
//   start x y heading_deg
//   background albedo
//   robot_radius r
World parse_scene(std::istream& in);
World parse_scene_text(std::string_view text);
std::string format_scene(const World& world);

/// Names of the worlds shipped with the library.
std::vector<std::string> bundled_world_names();
/// Scene text of a bundled world; throws std::invalid_argument for unknown names.
std::string_view bundled_scene(std::string_view name);
/// A bundled world name or a path to a scene file.
World load_world(const std::string& name_or_path);

}  // namespace radae
