#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "dtsp/metric.hpp"
#include "dtsp/nets.hpp"
#include "dtsp/partition.hpp"
#include "dtsp/tour.hpp"

namespace dtsp {

/// Smallest power of s that is >= ddim * L / eps (at least s).
double portal_grid(double s, double ddim, int top, double eps);

/// Theoretical portal count (8 log_s n * s * ddim / eps)^ddim, reported for
/// reference only; the DP runs with a user cap.
double theoretical_portal_count(double s, double ddim, std::size_t n, double eps);

struct PortalSet {
  int fine_level = 0;  // net level of the finest portals, i - log_s M
  PointSet portals;    // sorted
  /// Largest distance from a member to its nearest portal.
  double coverage = 0.0;
};

/// Portals of a level-i cluster. Candidates are the covering net points of
/// the members, taken level by level from i down to i - log_s M (coarse
/// first, ascending index within a level, no repeats); the first m_cap of
/// them are kept, so a larger cap only adds portals. Portals may lie outside
/// the cluster; such copies need not be visited.
PortalSet choose_portals(const MetricSpace& space, const NetHierarchy& h,
                         int level, std::span<const PointId> members, double M,
                         std::size_t m_cap);

struct LightParams {
  int r = 2;                  // crossings allowed per cluster (even, >= 2)
  std::size_t m_cap = 6;      // portals per cluster
  double M = 0.0;             // portal grid; 0 picks portal_grid(s, ddim, L, eps)
  double eps = 0.05;
  double ddim = 1.0;
  std::size_t state_budget = 4'000'000;  // DP states per cluster
  std::size_t formation_cap = 16;        // formations kept per cluster
  unsigned threads = 0;
};

struct PlanStep {
  std::uint32_t child;    // index into the formation's children
  std::uint32_t option;   // option of that child
  std::uint32_t segment;  // segment of that option
  bool reversed;          // traversed from its second endpoint to its first
};

/// One path through a cluster, entering at portal a and leaving at b.
struct PlanSegment {
  PointId a, b;
  std::vector<PlanStep> steps;
};

/// A table entry: a canonical portal configuration (pairs sorted, a <= b
/// within each pair), its cheapest cost and how to realize it.
struct LightOption {
  std::vector<std::pair<PointId, PointId>> pairs;
  double cost = 0.0;
  std::uint32_t formation = 0;
  std::vector<PlanSegment> plan;  // plan[k] realizes pairs[k]
};

struct DpNode {
  int level = 0;
  PointSet members;
  PointSet portals;
  /// Child clusters per formation; a cluster without a formation treats its
  /// members as single-point children.
  std::vector<std::vector<std::shared_ptr<const DpNode>>> formations;
  std::vector<LightOption> options;
  std::size_t states = 0;        // DP states explored for this node
  std::size_t pruned = 0;        // options dropped as dominated
};

struct LightStats {
  std::size_t nodes = 0;
  std::size_t states = 0;
  std::size_t max_options = 0;
  std::size_t max_children = 0;
  std::size_t max_portals = 0;
  std::size_t formations = 0;
  std::size_t formations_truncated = 0;
};

struct LightResult {
  Tour tour;             // closed, Hamiltonian after shortcutting
  double dp_cost = 0.0;  // optimal value of the DP at the root
  double weight = 0.0;   // weight of `tour`
  LightStats stats;
  /// Post-hoc audit over the chosen plans: every used option has at most
  /// r/2 segments and every segment endpoint is a portal of its cluster.
  bool light_ok = true;
  std::size_t max_segments_used = 0;
};

/// Options for a cluster whose children are the given nodes (or its members
/// as single points when children is empty). Throws BudgetExceeded.
std::vector<LightOption> combine_children(
    const MetricSpace& space, std::span<const PointId> portals,
    const std::vector<std::shared_ptr<const DpNode>>& children, int max_pairs,
    bool closed_root, std::size_t state_budget, std::size_t* states = nullptr);

/// Removes options B having a segment e whose removal leaves another option
/// B' with cost(B') + d(e) <= cost(B). Returns the number removed.
std::size_t prune_dominated(const MetricSpace& space,
                            std::vector<LightOption>& options);

/// Single-point node (portal = the point, one option (p,p) of cost 0).
std::shared_ptr<const DpNode> point_node(PointId p);

/// Bottom-up DP over a fixed cluster tree.
LightResult solve_light_tour(const MetricSpace& space, const NetHierarchy& h,
                             const ClusterTree& tree, const LightParams& params);

/// The DP on a tree with one cluster (all points) whose children are the
/// single points, with every point a portal: an exact solver for small n.
LightResult solve_flat(const MetricSpace& space);

/// DP over formations: every cluster tries the partitions of its members
/// produced by g keyed radius guesses per center and keeps, per portal
/// configuration, the cheapest. g = 1 reproduces hierarchical_clustering
/// with the same seed exactly.
LightResult solve_with_radius_guessing(const MetricSpace& space,
                                       const NetHierarchy& h, std::uint32_t g,
                                       const LightParams& params,
                                       std::uint64_t seed);

/// Closed point sequence realizing a root option (before shortcutting).
std::vector<PointId> expand_option(const DpNode& node, std::size_t option);

}  // namespace dtsp
