#include "ipose/pose.hpp"

#include <cmath>
#include <string>

#include "ipose/error.hpp"

namespace ipose {

double norm(Vec3 v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

std::string_view to_string(Units u) {
  switch (u) {
    case Units::ImagePixels: return "px";
    case Units::PatchPixels: return "patch_px";
    case Units::Millimeters: return "mm";
    case Units::Cells: return "cells";
  }
  return "?";
}

std::string_view to_string(Space s) {
  return s == Space::Absolute ? "absolute" : "root-relative";
}

Units parse_units(std::string_view tag) {
  if (tag == "px") return Units::ImagePixels;
  if (tag == "patch_px") return Units::PatchPixels;
  if (tag == "mm") return Units::Millimeters;
  if (tag == "cells") return Units::Cells;
  throw FormatError("unknown units tag '" + std::string(tag) + "' (expected px|patch_px|mm|cells)");
}

Space parse_space(std::string_view tag) {
  if (tag == "absolute") return Space::Absolute;
  if (tag == "root-relative") return Space::RootRelative;
  throw FormatError("unknown space tag '" + std::string(tag) + "' (expected absolute|root-relative)");
}

bool is_pixel(Units u) { return u == Units::ImagePixels || u == Units::PatchPixels; }

void require_units(const Pose& pose, Units expected, std::string_view what) {
  if (pose.units != expected) {
    throw UnitError(std::string(what) + " is in " + std::string(to_string(pose.units)) +
                    ", expected " + std::string(to_string(expected)));
  }
}

Pose root_aligned(const Pose& pose, std::size_t root) {
  if (root >= pose.size()) {
    throw ShapeError("root index " + std::to_string(root) + " out of range for " +
                     std::to_string(pose.size()) + " joints");
  }
  Pose out{pose.units, Space::RootRelative, pose.joints};
  const Vec3 origin = pose.joints[root];
  for (auto& j : out.joints) j = j - origin;
  return out;
}

}  // namespace ipose
