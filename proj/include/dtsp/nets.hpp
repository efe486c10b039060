#pragma once

#include <string>
#include <vector>

#include "dtsp/metric.hpp"

namespace dtsp {

/// Largest integer i with base^i <= value (relative tolerance kRadiusTol).
/// Returns a negative level for value < 1; value <= 0 maps to INT_MIN / 2.
int level_for(double value, double base);

/// One occurrence of a base point in a net level. Copies of the same point at
/// adjacent levels are joined by zero-length edges that no partition cuts.
struct NetPointCopy {
  PointId base;
  int level;
};

/// Nested nets H_0 = S ⊇ H_1 ⊇ ... ⊇ H_L, each H_i an s^i-net of S.
///
/// Levels outside [0, L] are answered virtually: i < 0 behaves as H_0 and
/// i > L as H_L.
class NetHierarchy {
 public:
  NetHierarchy() = default;
  /// Assembles a hierarchy from explicit levels (nets[i] = H_i, sorted).
  /// Covers are recomputed as nearest net points; no invariant is enforced,
  /// so verify_nets() can audit hand-made or damaged hierarchies.
  NetHierarchy(const MetricSpace& space, double s,
               std::vector<PointSet> nets);

  double s() const { return s_; }
  int top() const { return static_cast<int>(nets_.size()) - 1; }
  std::size_t num_points() const { return top_level_.size(); }
  double radius(int level) const;

  const PointSet& net(int level) const;
  bool contains(int level, PointId p) const;
  /// Nearest point of H_level to p (ties to the lowest index).
  PointId cover(PointId p, int level) const;
  /// Highest level whose net contains p.
  int top_level(PointId p) const { return top_level_[p]; }
  std::vector<NetPointCopy> copies(PointId p) const;

  bool operator==(const NetHierarchy&) const = default;

 private:
  double s_ = 4.0;
  std::vector<PointSet> nets_;
  std::vector<std::vector<PointId>> cover_;  // cover_[i][p]
  std::vector<int> top_level_;
};

/// Top-down greedy construction in ascending index order. Requires a
/// normalized space (minimum distance 1) and s >= 4; throws BadScale
/// otherwise.
NetHierarchy build_hierarchy(const MetricSpace& space, double s);

inline PointId cover_point(const NetHierarchy& h, PointId p, int level) {
  return h.cover(p, level);
}

struct NetReport {
  bool pass = true;
  std::vector<std::size_t> level_sizes;
  std::vector<std::string> violations;
  std::size_t packing_balls_checked = 0;
};

/// Exhaustive packing / covering / nesting audit plus the packing-count bound
/// |H_i ∩ B(x,R)| <= (2 diam / alpha)^ddim on audit_balls sampled balls per
/// level. Level 0 is audited with non-strict packing (H_0 = S and the
/// minimum distance is exactly 1).
NetReport verify_nets(const MetricSpace& space, const NetHierarchy& h,
                      double ddim_upper, std::size_t audit_balls = 32,
                      std::uint64_t seed = 0);

}  // namespace dtsp
