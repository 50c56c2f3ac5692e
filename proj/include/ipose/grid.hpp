#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ipose {

/// Heat-map volume shape. A 2D heat map is a grid with depth 1.
struct GridDims {
  std::size_t depth = 64;
  std::size_t height = 64;
  std::size_t width = 64;

  static constexpr std::size_t kMaxCells = std::size_t{1} << 24;

  std::size_t cells() const { return depth * height * width; }
  std::size_t size(std::size_t axis) const;  // axis 0 = x, 1 = y, 2 = z

  /// Throws InvalidInput if any axis is zero or the volume exceeds kMaxCells.
  void validate() const;

  friend bool operator==(const GridDims&, const GridDims&) = default;
};

/// Index of cell (z, y, x) inside one joint's block. Layout is z, y, x row-major.
inline std::size_t cell_index(const GridDims& d, std::size_t z, std::size_t y, std::size_t x) {
  return (z * d.height + y) * d.width + x;
}

/// Unnormalized per-joint scores, joint-major then z, y, x.
class LikelihoodGrid {
 public:
  LikelihoodGrid(GridDims dims, std::size_t joints, std::vector<double> scores);

  const GridDims& dims() const { return dims_; }
  std::size_t joints() const { return joints_; }
  std::span<const double> scores() const { return scores_; }
  std::span<const double> joint(std::size_t k) const;

 private:
  GridDims dims_;
  std::size_t joints_;
  std::vector<double> scores_;
};

/// Per-joint probability distribution over the grid cells.
class ProbGrid {
 public:
  /// Validates non-negativity and per-joint unit mass (1e-9 absolute).
  ProbGrid(GridDims dims, std::size_t joints, std::vector<double> probs);

  const GridDims& dims() const { return dims_; }
  std::size_t joints() const { return joints_; }
  std::span<const double> probs() const { return probs_; }
  std::span<const double> joint(std::size_t k) const;

 private:
  struct Trusted {};
  ProbGrid(Trusted, GridDims dims, std::size_t joints, std::vector<double> probs);
  friend ProbGrid normalize(const LikelihoodGrid&);
  friend ProbGrid normalize_serial(const LikelihoodGrid&);

  GridDims dims_;
  std::size_t joints_;
  std::vector<double> probs_;
};

/// Per-joint softmax over all cells, max-subtracted. Throws InvalidInput
/// naming the joint and cell of the first non-finite score.
ProbGrid normalize(const LikelihoodGrid& grid);

/// Single-threaded reference of `normalize`.
ProbGrid normalize_serial(const LikelihoodGrid& grid);

struct AxisCoordinates {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> z;
};

/// Cell i along any axis has coordinate i.
AxisCoordinates cell_coordinates(const GridDims& dims);

}  // namespace ipose
