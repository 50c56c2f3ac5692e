#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ipose/kernels.hpp"

namespace ipose::kernels::omp {

namespace {
using Index = std::int64_t;
}

void softmax_rows(std::span<const double> logits, std::size_t rows, std::size_t cols,
                  std::span<double> out) {
  const Index n = static_cast<Index>(rows);
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < n; ++r) {
    const double* in = logits.data() + static_cast<std::size_t>(r) * cols;
    double* o = out.data() + static_cast<std::size_t>(r) * cols;
    const double peak = *std::max_element(in, in + cols);
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const double e = std::exp(in[c] - peak);
      o[c] = e;
      total += e;
    }
    const double inv = 1.0 / total;
    for (std::size_t c = 0; c < cols; ++c) o[c] *= inv;
  }
}

void expectation(std::span<const double> probs, const GridDims& dims, std::size_t joints,
                 std::span<Vec3> out) {
  const std::size_t cells = dims.cells();
  const std::size_t plane = dims.height * dims.width;
  const Index n = static_cast<Index>(joints);
#pragma omp parallel
  {
    std::vector<double> mx(dims.width);
#pragma omp for schedule(static)
    for (Index k = 0; k < n; ++k) {
      const double* p = probs.data() + static_cast<std::size_t>(k) * cells;
      std::fill(mx.begin(), mx.end(), 0.0);
      double ey = 0.0;
      double ez = 0.0;
      // Row sums give the y marginal directly; slab sums give z.
      for (std::size_t z = 0; z < dims.depth; ++z) {
        double slab = 0.0;
        for (std::size_t y = 0; y < dims.height; ++y) {
          const double* row = p + z * plane + y * dims.width;
          double row_sum = 0.0;
          for (std::size_t x = 0; x < dims.width; ++x) {
            mx[x] += row[x];
            row_sum += row[x];
          }
          ey += static_cast<double>(y) * row_sum;
          slab += row_sum;
        }
        ez += static_cast<double>(z) * slab;
      }
      double ex = 0.0;
      for (std::size_t x = 0; x < dims.width; ++x) ex += static_cast<double>(x) * mx[x];
      out[static_cast<std::size_t>(k)] = Vec3{ex, ey, ez};
    }
  }
}

void expectation_vjp(std::span<const double> probs, const GridDims& dims, std::size_t joints,
                     std::span<const Vec3> estimate, std::span<const Vec3> upstream,
                     std::span<double> grad) {
  const std::size_t cells = dims.cells();
  const std::size_t plane = dims.height * dims.width;
  const Index n = static_cast<Index>(joints);
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < n; ++k) {
    const std::size_t base = static_cast<std::size_t>(k) * cells;
    const Vec3 j = estimate[static_cast<std::size_t>(k)];
    const Vec3 u = upstream[static_cast<std::size_t>(k)];
    for (std::size_t z = 0; z < dims.depth; ++z) {
      const double tz = u.z * (static_cast<double>(z) - j.z);
      for (std::size_t y = 0; y < dims.height; ++y) {
        const double tyz = u.y * (static_cast<double>(y) - j.y) + tz;
        const std::size_t row = base + z * plane + y * dims.width;
        for (std::size_t x = 0; x < dims.width; ++x) {
          grad[row + x] = probs[row + x] * (u.x * (static_cast<double>(x) - j.x) + tyz);
        }
      }
    }
  }
}

void expectation_jacobian(std::span<const double> probs, const GridDims& dims,
                          std::size_t joints, std::span<const Vec3> estimate,
                          std::span<double> dx, std::span<double> dy, std::span<double> dz) {
  const std::size_t cells = dims.cells();
  const std::size_t plane = dims.height * dims.width;
  const Index n = static_cast<Index>(joints);
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < n; ++k) {
    const std::size_t base = static_cast<std::size_t>(k) * cells;
    const Vec3 j = estimate[static_cast<std::size_t>(k)];
    for (std::size_t z = 0; z < dims.depth; ++z) {
      for (std::size_t y = 0; y < dims.height; ++y) {
        const std::size_t row = base + z * plane + y * dims.width;
        for (std::size_t x = 0; x < dims.width; ++x) {
          const double p = probs[row + x];
          dx[row + x] = p * (static_cast<double>(x) - j.x);
          dy[row + x] = p * (static_cast<double>(y) - j.y);
          dz[row + x] = p * (static_cast<double>(z) - j.z);
        }
      }
    }
  }
}

void root_aligned_errors(std::span<const Vec3> pred, std::span<const Vec3> gt,
                         std::size_t frames, std::size_t joints, std::size_t root,
                         std::span<double> errors) {
  const Index n = static_cast<Index>(frames);
#pragma omp parallel for schedule(static)
  for (Index f = 0; f < n; ++f) {
    const std::size_t base = static_cast<std::size_t>(f) * joints;
    const Vec3 pr = pred[base + root];
    const Vec3 gr = gt[base + root];
    for (std::size_t j = 0; j < joints; ++j) {
      errors[base + j] = norm((pred[base + j] - pr) - (gt[base + j] - gr));
    }
  }
}

}  // namespace ipose::kernels::omp
