#include "ipose/skeleton.hpp"

#include "ipose/error.hpp"

namespace ipose {

void Skeleton::validate() const {
  const std::size_t n = size();
  if (n == 0) throw SkeletonError("skeleton has no joints");
  if (parent.size() != n) {
    throw SkeletonError("parent array has " + std::to_string(parent.size()) + " entries for " +
                        std::to_string(n) + " joints");
  }
  if (root >= n) throw SkeletonError("root index " + std::to_string(root) + " out of range");
  for (std::size_t j = 0; j < n; ++j) {
    const int p = parent[j];
    if (j == root) {
      if (p != -1) throw SkeletonError("root joint must have parent -1");
      continue;
    }
    if (p < 0 || static_cast<std::size_t>(p) >= n || static_cast<std::size_t>(p) == j) {
      throw SkeletonError("joint " + std::to_string(j) + " has invalid parent " +
                          std::to_string(p));
    }
  }
  // Every joint must reach the root in fewer than n hops.
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t cur = j;
    std::size_t hops = 0;
    while (cur != root) {
      cur = static_cast<std::size_t>(parent[cur]);
      if (++hops > n) throw SkeletonError("cycle in parent graph through joint " + std::to_string(j));
    }
  }
  std::vector<bool> seen(n, false);
  for (const auto& [l, r] : flip_pairs) {
    if (l >= n || r >= n) {
      throw SkeletonError("flip pair (" + std::to_string(l) + ", " + std::to_string(r) +
                          ") out of range");
    }
    if (l == r || seen[l] || seen[r]) {
      throw SkeletonError("flip pairs must be disjoint; joint " +
                          std::to_string(seen[l] || l == r ? l : r) + " repeats");
    }
    seen[l] = seen[r] = true;
  }
}

std::vector<std::pair<std::size_t, std::size_t>> Skeleton::bones() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t j = 0; j < parent.size(); ++j) {
    if (parent[j] >= 0) out.emplace_back(static_cast<std::size_t>(parent[j]), j);
  }
  return out;
}

std::vector<std::size_t> Skeleton::mirror_permutation() const {
  std::vector<std::size_t> m(size());
  for (std::size_t j = 0; j < m.size(); ++j) m[j] = j;
  for (const auto& [l, r] : flip_pairs) {
    if (l >= m.size() || r >= m.size()) {
      throw SkeletonError("flip pair (" + std::to_string(l) + ", " + std::to_string(r) +
                          ") out of range");
    }
    m[l] = r;
    m[r] = l;
  }
  return m;
}

Skeleton Skeleton::h36m17() {
  Skeleton s;
  s.name = "h36m17";
  s.joint_names = {"pelvis",     "r_hip",      "r_knee",  "r_ankle",  "l_hip",    "l_knee",
                   "l_ankle",    "spine",      "thorax",  "neck",     "head",     "l_shoulder",
                   "l_elbow",    "l_wrist",    "r_shoulder", "r_elbow", "r_wrist"};
  s.parent = {-1, 0, 1, 2, 0, 4, 5, 0, 7, 8, 9, 8, 11, 12, 8, 14, 15};
  s.flip_pairs = {{4, 1}, {5, 2}, {6, 3}, {11, 14}, {12, 15}, {13, 16}};
  s.root = 0;
  return s;
}

}  // namespace ipose
