#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ipose {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double& operator[](std::size_t axis) { return axis == 0 ? x : (axis == 1 ? y : z); }
  double operator[](std::size_t axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

double norm(Vec3 v);

/// What a coordinate triple is measured in. `Cells` is the heat-map grid
/// unit produced by soft-argmax.
enum class Units { ImagePixels, PatchPixels, Millimeters, Cells };

enum class Space { Absolute, RootRelative };

std::string_view to_string(Units u);
std::string_view to_string(Space s);
Units parse_units(std::string_view tag);
Space parse_space(std::string_view tag);

bool is_pixel(Units u);

/// One frame of per-joint coordinates, tagged with unit and space.
struct Pose {
  Units units = Units::Millimeters;
  Space space = Space::Absolute;
  std::vector<Vec3> joints;

  std::size_t size() const { return joints.size(); }
};

/// Throws UnitError unless `pose.units == expected`. `what` names the operand.
void require_units(const Pose& pose, Units expected, std::string_view what);

/// Returns the pose with `root` subtracted from every joint, tagged root-relative.
Pose root_aligned(const Pose& pose, std::size_t root);

}  // namespace ipose
