#include <algorithm>
#include <cmath>
#include <vector>

#include "ipose/kernels.hpp"

namespace ipose::kernels::serial {

void softmax_rows(std::span<const double> logits, std::size_t rows, std::size_t cols,
                  std::span<double> out) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = logits.data() + r * cols;
    double* o = out.data() + r * cols;
    double peak = in[0];
    for (std::size_t c = 1; c < cols; ++c) peak = std::max(peak, in[c]);
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      o[c] = std::exp(in[c] - peak);
      total += o[c];
    }
    for (std::size_t c = 0; c < cols; ++c) o[c] /= total;
  }
}

void expectation(std::span<const double> probs, const GridDims& dims, std::size_t joints,
                 std::span<Vec3> out) {
  const std::size_t cells = dims.cells();
  std::vector<double> mx(dims.width), my(dims.height), mz(dims.depth);
  for (std::size_t k = 0; k < joints; ++k) {
    std::fill(mx.begin(), mx.end(), 0.0);
    std::fill(my.begin(), my.end(), 0.0);
    std::fill(mz.begin(), mz.end(), 0.0);
    const double* p = probs.data() + k * cells;
    for (std::size_t z = 0; z < dims.depth; ++z)
      for (std::size_t y = 0; y < dims.height; ++y)
        for (std::size_t x = 0; x < dims.width; ++x) {
          const double v = p[cell_index(dims, z, y, x)];
          mx[x] += v;
          my[y] += v;
          mz[z] += v;
        }
    Vec3 e;
    for (std::size_t i = 0; i < dims.width; ++i) e.x += static_cast<double>(i) * mx[i];
    for (std::size_t i = 0; i < dims.height; ++i) e.y += static_cast<double>(i) * my[i];
    for (std::size_t i = 0; i < dims.depth; ++i) e.z += static_cast<double>(i) * mz[i];
    out[k] = e;
  }
}

void expectation_vjp(std::span<const double> probs, const GridDims& dims, std::size_t joints,
                     std::span<const Vec3> estimate, std::span<const Vec3> upstream,
                     std::span<double> grad) {
  const std::size_t cells = dims.cells();
  for (std::size_t k = 0; k < joints; ++k) {
    const Vec3 j = estimate[k];
    const Vec3 u = upstream[k];
    for (std::size_t z = 0; z < dims.depth; ++z)
      for (std::size_t y = 0; y < dims.height; ++y)
        for (std::size_t x = 0; x < dims.width; ++x) {
          const std::size_t i = k * cells + cell_index(dims, z, y, x);
          const double dot = u.x * (static_cast<double>(x) - j.x) +
                             u.y * (static_cast<double>(y) - j.y) +
                             u.z * (static_cast<double>(z) - j.z);
          grad[i] = probs[i] * dot;
        }
  }
}

void expectation_jacobian(std::span<const double> probs, const GridDims& dims,
                          std::size_t joints, std::span<const Vec3> estimate,
                          std::span<double> dx, std::span<double> dy, std::span<double> dz) {
  const std::size_t cells = dims.cells();
  for (std::size_t k = 0; k < joints; ++k) {
    const Vec3 j = estimate[k];
    for (std::size_t z = 0; z < dims.depth; ++z)
      for (std::size_t y = 0; y < dims.height; ++y)
        for (std::size_t x = 0; x < dims.width; ++x) {
          const std::size_t i = k * cells + cell_index(dims, z, y, x);
          dx[i] = probs[i] * (static_cast<double>(x) - j.x);
          dy[i] = probs[i] * (static_cast<double>(y) - j.y);
          dz[i] = probs[i] * (static_cast<double>(z) - j.z);
        }
  }
}

void root_aligned_errors(std::span<const Vec3> pred, std::span<const Vec3> gt,
                         std::size_t frames, std::size_t joints, std::size_t root,
                         std::span<double> errors) {
  for (std::size_t f = 0; f < frames; ++f) {
    const Vec3* p = pred.data() + f * joints;
    const Vec3* g = gt.data() + f * joints;
    for (std::size_t j = 0; j < joints; ++j) {
      errors[f * joints + j] = norm((p[j] - p[root]) - (g[j] - g[root]));
    }
  }
}

}  // namespace ipose::kernels::serial
