#include "radae/simworld.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "radae/errors.hpp"

namespace radae {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::optional<double> ray_circle(Vec2 o, Vec2 d, const Circle& c) {
  const double fx = o.x - c.center.x;
  const double fy = o.y - c.center.y;
  const double b = fx * d.x + fy * d.y;
  const double cc = fx * fx + fy * fy - c.radius * c.radius;
  const double disc = b * b - cc;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  double t = -b - root;
  if (t < 0.0) t = -b + root;
  if (t < 0.0) return std::nullopt;
  return t;
}

// Slab test. Returns entry distance, or exit distance when the origin is inside.
std::optional<double> ray_box(Vec2 o, Vec2 d, const Box& box) {
  double t_near = -kInf;
  double t_far = kInf;
  const double origin[2] = {o.x, o.y};
  const double dir[2] = {d.x, d.y};
  const double lo[2] = {box.min.x, box.min.y};
  const double hi[2] = {box.max.x, box.max.y};
  for (int axis = 0; axis < 2; ++axis) {
    if (std::abs(dir[axis]) < 1e-15) {
      if (origin[axis] < lo[axis] || origin[axis] > hi[axis]) return std::nullopt;
      continue;
    }
    double t0 = (lo[axis] - origin[axis]) / dir[axis];
    double t1 = (hi[axis] - origin[axis]) / dir[axis];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
  }
  if (t_near > t_far || t_far < 0.0) return std::nullopt;
  return t_near >= 0.0 ? t_near : t_far;
}

double distance_to_box(Vec2 p, const Box& box) {
  const double dx = std::max({box.min.x - p.x, 0.0, p.x - box.max.x});
  const double dy = std::max({box.min.y - p.y, 0.0, p.y - box.max.y});
  return std::hypot(dx, dy);
}

void check_albedo(double a, const char* what) {
  if (!(a >= 0.0 && a <= 1.0)) throw ContractError(std::string(what) + " albedo outside [0,1]");
}

}  // namespace

double normalize_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

void World::validate() const {
  check_albedo(background_albedo, "background");
  if (!(robot_radius > 0.0)) throw ContractError("robot radius must be positive");
  if (bounds) {
    check_albedo(bounds->albedo, "wall");
    if (!(bounds->min.x < bounds->max.x && bounds->min.y < bounds->max.y)) {
      throw ContractError("bounds must have positive extent");
    }
  }
  auto inside = [&](double x0, double y0, double x1, double y1) {
    return !bounds || (x0 >= bounds->min.x && y0 >= bounds->min.y && x1 <= bounds->max.x &&
                       y1 <= bounds->max.y);
  };
  for (const auto& ob : obstacles) {
    if (const auto* c = std::get_if<Circle>(&ob)) {
      if (!(c->radius > 0.0)) throw ContractError("circle radius must be positive");
      check_albedo(c->albedo, "circle");
      if (!inside(c->center.x - c->radius, c->center.y - c->radius, c->center.x + c->radius,
                  c->center.y + c->radius)) {
        throw ContractError("circle lies outside the bounds");
      }
    } else {
      const auto& b = std::get<Box>(ob);
      if (!(b.min.x < b.max.x && b.min.y < b.max.y)) throw ContractError("rect must have positive extent");
      check_albedo(b.albedo, "rect");
      if (!inside(b.min.x, b.min.y, b.max.x, b.max.y)) throw ContractError("rect lies outside the bounds");
    }
  }
}

std::optional<RayHit> cast_ray(const World& world, Vec2 origin, double angle) {
  const Vec2 dir{std::cos(angle), std::sin(angle)};
  std::optional<RayHit> best;
  auto consider = [&](std::optional<double> t, double albedo) {
    if (t && (!best || *t < best->distance)) best = RayHit{*t, albedo};
  };
  for (const auto& ob : world.obstacles) {
    if (const auto* c = std::get_if<Circle>(&ob)) {
      consider(ray_circle(origin, dir, *c), c->albedo);
    } else {
      const auto& b = std::get<Box>(ob);
      consider(ray_box(origin, dir, b), b.albedo);
    }
  }
  if (world.bounds) consider(ray_box(origin, dir, *world.bounds), world.bounds->albedo);
  return best;
}

RawImage render(const World& world, const RobotPose& pose, const CameraSpec& camera) {
  RawImage img;
  img.width = camera.width;
  img.height = camera.height;
  img.channels = 1;
  img.range = PixelRange::Unit;
  img.data.resize(camera.width * camera.height);

  const double h = static_cast<double>(camera.height);
  const double horizon = 0.5 * h;
  const double bg = world.background_albedo;
  std::vector<double> background(camera.height);
  for (std::size_t y = 0; y < camera.height; ++y) {
    const double yc = static_cast<double>(y) + 0.5;
    if (yc < horizon) {
      background[y] = bg * (1.0 - 0.2 * yc / horizon);  // sky, brightest at the top
    } else {
      background[y] = bg * (0.25 + 0.2 * (yc - horizon) / horizon);  // floor
    }
  }

  const Vec2 origin{pose.x, pose.y};
  for (std::size_t x = 0; x < camera.width; ++x) {
    const double frac = (static_cast<double>(x) + 0.5) / static_cast<double>(camera.width);
    const double angle = pose.heading + 0.5 * camera.fov - frac * camera.fov;
    const auto hit = cast_ray(world, origin, angle);
    double half = -1.0;
    double shade = 0.0;
    if (hit) {
      half = 0.25 * h / std::max(hit->distance, 1e-9);
      shade = wall_shade(hit->albedo, hit->distance);
    }
    for (std::size_t y = 0; y < camera.height; ++y) {
      const double yc = static_cast<double>(y) + 0.5;
      const bool band = hit && std::abs(yc - horizon) <= half;
      img.data[y * camera.width + x] = band ? shade : background[y];
    }
  }
  return img;
}

bool in_collision(const World& world, Vec2 p) {
  const double r = world.robot_radius;
  if (world.bounds) {
    const Box& b = *world.bounds;
    if (p.x - r < b.min.x || p.x + r > b.max.x || p.y - r < b.min.y || p.y + r > b.max.y) {
      return true;
    }
  }
  for (const auto& ob : world.obstacles) {
    if (const auto* c = std::get_if<Circle>(&ob)) {
      if (std::hypot(p.x - c->center.x, p.y - c->center.y) < c->radius + r) return true;
    } else if (distance_to_box(p, std::get<Box>(ob)) < r) {
      return true;
    }
  }
  return false;
}

MotionResult execute_action(const World& world, const RobotPose& pose, Action action,
                            const MotionParams& params, const CameraSpec& camera) {
  if (!(params.step > 0.0)) throw ContractError("motion step must be positive");
  if (params.sub_steps < 2) throw ContractError("motion needs at least two sub-steps");

  double heading = pose.heading;
  if (action == Action::Left) heading += params.turn;
  if (action == Action::Right) heading -= params.turn;
  heading = normalize_angle(heading);
  const double dx = std::cos(heading);
  const double dy = std::sin(heading);

  MotionResult result;
  result.end_pose = {pose.x, pose.y, heading};
  for (std::size_t k = 1; k <= params.sub_steps; ++k) {
    const double travelled =
        params.step * static_cast<double>(k) / static_cast<double>(params.sub_steps);
    const RobotPose current{pose.x + travelled * dx, pose.y + travelled * dy, heading};
    result.frames.push_back(render(world, current, camera));
    result.end_pose = current;
    if (in_collision(world, {current.x, current.y})) {
      result.collided = true;
      result.contact_pose = current;
      break;
    }
  }
  return result;
}

namespace {

double parse_number(std::istringstream& ls, std::size_t line_no, const std::string& item) {
  double v = 0.0;
  if (!(ls >> v)) {
    throw std::invalid_argument("scene line " + std::to_string(line_no) + ": malformed '" + item +
                                "'");
  }
  return v;
}

}  // namespace

World parse_scene(std::istream& in) {
  World world;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string item;
    if (!(ls >> item)) continue;
    auto num = [&] { return parse_number(ls, line_no, item); };
    if (item == "bounds") {
      Box b;
      b.min = {num(), num()};
      b.max = {num(), num()};
      double albedo = 0.55;
      if (ls >> albedo) b.albedo = albedo; else b.albedo = 0.55;
      world.bounds = b;
    } else if (item == "circle") {
      Circle c;
      c.center = {num(), num()};
      c.radius = num();
      c.albedo = num();
      world.obstacles.emplace_back(c);
    } else if (item == "rect") {
      Box b;
      b.min = {num(), num()};
      b.max = {num(), num()};
      b.albedo = num();
      world.obstacles.emplace_back(b);
    } else if (item == "start") {
      world.start.x = num();
      world.start.y = num();
      world.start.heading = normalize_angle(deg_to_rad(num()));
    } else if (item == "background") {
      world.background_albedo = num();
    } else if (item == "robot_radius") {
      world.robot_radius = num();
    } else {
      throw std::invalid_argument("scene line " + std::to_string(line_no) + ": unknown item '" +
                                  item + "'");
    }
    std::string extra;
    if (ls >> extra) {
      throw std::invalid_argument("scene line " + std::to_string(line_no) + ": trailing '" +
                                  extra + "'");
    }
  }
  world.validate();
  if (in_collision(world, {world.start.x, world.start.y})) {
    throw std::invalid_argument("scene start pose collides with the world");
  }
  return world;
}

World parse_scene_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_scene(in);
}

std::string format_scene(const World& world) {
  std::ostringstream out;
  out.precision(17);
  if (world.bounds) {
    const Box& b = *world.bounds;
    out << "bounds " << b.min.x << ' ' << b.min.y << ' ' << b.max.x << ' ' << b.max.y << ' '
        << b.albedo << '\n';
  }
  out << "background " << world.background_albedo << '\n';
  out << "robot_radius " << world.robot_radius << '\n';
  out << "start " << world.start.x << ' ' << world.start.y << ' '
      << world.start.heading * 180.0 / std::numbers::pi << '\n';
  for (const auto& ob : world.obstacles) {
    if (const auto* c = std::get_if<Circle>(&ob)) {
      out << "circle " << c->center.x << ' ' << c->center.y << ' ' << c->radius << ' ' << c->albedo
          << '\n';
    } else {
      const auto& b = std::get<Box>(ob);
      out << "rect " << b.min.x << ' ' << b.min.y << ' ' << b.max.x << ' ' << b.max.y << ' '
          << b.albedo << '\n';
    }
  }
  return out.str();
}

namespace {

// Keep in sync with worlds/*.scene (checked by the simworld tests).
constexpr std::string_view kCorridorScene = R"(# corridor: a loop around a central block
bounds 0 0 16 10 0.35
background 0.8
start 2 2 0
rect 4 4 12 6 0.3
)";

constexpr std::string_view kClutteredScene = R"(# cluttered: 12 obstacles of mixed shape and albedo
bounds 0 0 20 20 0.35
background 0.8
start 10 2 90
circle 4.5 4.5 0.8 0.2
rect 9.0 5.0 11.0 6.0 0.3
circle 15.5 4.5 0.7 0.6
rect 2.5 9.2 4.0 10.8 0.1
circle 10.0 10.0 1.0 0.5
rect 15.2 9.0 16.8 11.0 0.4
circle 4.5 15.5 0.9 0.45
rect 9.2 14.5 10.8 16.0 0.2
circle 15.5 15.5 0.8 0.9
circle 7.0 12.5 0.5 0.7
rect 12.5 7.2 13.5 8.0 0.05
circle 13.0 13.0 0.5 0.25
)";

}  // namespace

std::vector<std::string> bundled_world_names() { return {"corridor", "cluttered"}; }

std::string_view bundled_scene(std::string_view name) {
  if (name == "corridor") return kCorridorScene;
  if (name == "cluttered") return kClutteredScene;
  throw std::invalid_argument("unknown bundled world '" + std::string(name) + "'");
}

World load_world(const std::string& name_or_path) {
  for (const auto& name : bundled_world_names()) {
    if (name == name_or_path) return parse_scene_text(bundled_scene(name));
  }
  std::ifstream in(name_or_path);
  if (!in) throw std::invalid_argument("cannot open world file '" + name_or_path + "'");
  return parse_scene(in);
}

}  // namespace radae
