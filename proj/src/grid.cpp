#include "ipose/grid.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ipose/error.hpp"
#include "ipose/kernels.hpp"

namespace ipose {

std::size_t GridDims::size(std::size_t axis) const {
  switch (axis) {
    case 0: return width;
    case 1: return height;
    case 2: return depth;
  }
  throw InvalidInput("axis " + std::to_string(axis) + " out of range");
}

void GridDims::validate() const {
  if (depth == 0 || height == 0 || width == 0) {
    throw InvalidInput("grid dims must all be >= 1, got " + std::to_string(depth) + "x" +
                       std::to_string(height) + "x" + std::to_string(width));
  }
  // Checked one factor at a time so the product cannot wrap.
  if (depth > kMaxCells || height > kMaxCells / depth || width > kMaxCells / (depth * height)) {
    throw InvalidInput("grid volume exceeds the maximum of " + std::to_string(kMaxCells) +
                       " cells");
  }
}

namespace {

void check_layout(const GridDims& dims, std::size_t joints, std::size_t length) {
  dims.validate();
  if (joints == 0) throw InvalidInput("grid must hold at least one joint");
  if (joints > std::numeric_limits<std::size_t>::max() / dims.cells() ||
      length != joints * dims.cells()) {
    throw ShapeError("score array has " + std::to_string(length) + " entries, expected " +
                     std::to_string(joints) + " joints x " + std::to_string(dims.cells()) +
                     " cells");
  }
}

void check_finite(const LikelihoodGrid& grid) {
  const auto s = grid.scores();
  const std::size_t cells = grid.dims().cells();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i])) {
      throw InvalidInput("non-finite score at joint " + std::to_string(i / cells) + ", cell " +
                         std::to_string(i % cells));
    }
  }
}

}  // namespace

LikelihoodGrid::LikelihoodGrid(GridDims dims, std::size_t joints, std::vector<double> scores)
    : dims_(dims), joints_(joints), scores_(std::move(scores)) {
  check_layout(dims_, joints_, scores_.size());
}

std::span<const double> LikelihoodGrid::joint(std::size_t k) const {
  return std::span<const double>(scores_).subspan(k * dims_.cells(), dims_.cells());
}

ProbGrid::ProbGrid(GridDims dims, std::size_t joints, std::vector<double> probs)
    : dims_(dims), joints_(joints), probs_(std::move(probs)) {
  check_layout(dims_, joints_, probs_.size());
  const std::size_t cells = dims_.cells();
  for (std::size_t k = 0; k < joints_; ++k) {
    double total = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      const double p = probs_[k * cells + c];
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw InvalidInput("probability at joint " + std::to_string(k) + ", cell " +
                           std::to_string(c) + " is negative or non-finite");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw InvalidInput("probabilities of joint " + std::to_string(k) + " sum to " +
                         std::to_string(total) + ", not 1");
    }
  }
}

ProbGrid::ProbGrid(Trusted, GridDims dims, std::size_t joints, std::vector<double> probs)
    : dims_(dims), joints_(joints), probs_(std::move(probs)) {}

std::span<const double> ProbGrid::joint(std::size_t k) const {
  return std::span<const double>(probs_).subspan(k * dims_.cells(), dims_.cells());
}

ProbGrid normalize(const LikelihoodGrid& grid) {
  check_finite(grid);
  std::vector<double> out(grid.scores().size());
  kernels::omp::softmax_rows(grid.scores(), grid.joints(), grid.dims().cells(), out);
  return ProbGrid(ProbGrid::Trusted{}, grid.dims(), grid.joints(), std::move(out));
}

ProbGrid normalize_serial(const LikelihoodGrid& grid) {
  check_finite(grid);
  std::vector<double> out(grid.scores().size());
  kernels::serial::softmax_rows(grid.scores(), grid.joints(), grid.dims().cells(), out);
  return ProbGrid(ProbGrid::Trusted{}, grid.dims(), grid.joints(), std::move(out));
}

AxisCoordinates cell_coordinates(const GridDims& dims) {
  dims.validate();
  AxisCoordinates c;
  c.x.resize(dims.width);
  c.y.resize(dims.height);
  c.z.resize(dims.depth);
  for (std::size_t i = 0; i < dims.width; ++i) c.x[i] = static_cast<double>(i);
  for (std::size_t i = 0; i < dims.height; ++i) c.y[i] = static_cast<double>(i);
  for (std::size_t i = 0; i < dims.depth; ++i) c.z[i] = static_cast<double>(i);
  return c;
}

}  // namespace ipose
