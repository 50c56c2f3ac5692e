#pragma once

// Data-parallel inner loops. Each kernel exists twice: a straightforward
// single-threaded reference in `serial` and an OpenMP version in `omp`.
// The OpenMP kernels parallelize across independent rows (joints or frames)
// and run each row sequentially, so their output does not depend on the
// thread count.

#include <cstddef>
#include <span>

#include "ipose/grid.hpp"
#include "ipose/pose.hpp"

namespace ipose::kernels {

namespace serial {

void softmax_rows(std::span<const double> logits, std::size_t rows, std::size_t cols,
                  std::span<double> out);

void expectation(std::span<const double> probs, const GridDims& dims, std::size_t joints,
                 std::span<Vec3> out);

void expectation_vjp(std::span<const double> probs, const GridDims& dims, std::size_t joints,
                     std::span<const Vec3> estimate, std::span<const Vec3> upstream,
                     std::span<double> grad);

void expectation_jacobian(std::span<const double> probs, const GridDims& dims,
                          std::size_t joints, std::span<const Vec3> estimate,
                          std::span<double> dx, std::span<double> dy, std::span<double> dz);

/// errors[f * joints + j] = |(pred_j - pred_root) - (gt_j - gt_root)| for frame f.
void root_aligned_errors(std::span<const Vec3> pred, std::span<const Vec3> gt,
                         std::size_t frames, std::size_t joints, std::size_t root,
                         std::span<double> errors);

}  // namespace serial

namespace omp {

void softmax_rows(std::span<const double> logits, std::size_t rows, std::size_t cols,
                  std::span<double> out);

void expectation(std::span<const double> probs, const GridDims& dims, std::size_t joints,
                 std::span<Vec3> out);

void expectation_vjp(std::span<const double> probs, const GridDims& dims, std::size_t joints,
                     std::span<const Vec3> estimate, std::span<const Vec3> upstream,
                     std::span<double> grad);

void expectation_jacobian(std::span<const double> probs, const GridDims& dims,
                          std::size_t joints, std::span<const Vec3> estimate,
                          std::span<double> dx, std::span<double> dy, std::span<double> dz);

void root_aligned_errors(std::span<const Vec3> pred, std::span<const Vec3> gt,
                         std::size_t frames, std::size_t joints, std::size_t root,
                         std::span<double> errors);

}  // namespace omp

}  // namespace ipose::kernels
