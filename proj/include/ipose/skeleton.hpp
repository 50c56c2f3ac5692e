#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace ipose {

/// Joint tree with left/right mirror pairs.
struct Skeleton {
  std::string name;
  std::vector<std::string> joint_names;
  std::vector<int> parent;  // -1 marks the root
  std::vector<std::pair<std::size_t, std::size_t>> flip_pairs;  // (left, right)
  std::size_t root = 0;

  std::size_t size() const { return joint_names.size(); }

  /// Throws SkeletonError if the parent array is not a tree rooted at `root`
  /// or the flip pairs overlap or fall out of range.
  void validate() const;

  /// (parent, child) for every non-root joint, in child order.
  std::vector<std::pair<std::size_t, std::size_t>> bones() const;

  /// mirror[j] is the joint that j maps to under a horizontal flip.
  std::vector<std::size_t> mirror_permutation() const;

  /// 17-joint Human3.6M-style tree rooted at the pelvis.
  static Skeleton h36m17();
};

}  // namespace ipose
