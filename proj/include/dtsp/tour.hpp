#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dtsp/metric.hpp"
#include "dtsp/nets.hpp"

namespace dtsp {

/// Finite point sequence, possibly with repeats. A closed tour also
/// transitions from the last point back to the first.
struct Tour {
  std::vector<PointId> seq;
  bool closed = true;

  std::size_t num_transitions() const {
    if (seq.size() < 2) return 0;
    return closed ? seq.size() : seq.size() - 1;
  }
  std::pair<PointId, PointId> transition(std::size_t k) const {
    return {seq[k], seq[(k + 1) % seq.size()]};
  }
  bool operator==(const Tour&) const = default;
};

struct Edge {
  PointId u, v;
  double w;
};

/// Multiset of weighted unordered pairs.
using EdgeSet = std::vector<Edge>;

double tour_weight(const MetricSpace& space, const Tour& t);
double edges_weight(const EdgeSet& edges);

/// Sorted distinct points visited by t.
PointSet visited(const Tour& t);

/// True when every point of `points` appears in t.
bool visits_all(const Tour& t, std::span<const PointId> points);

/// Repeatedly rewrites E1 e E2 e E3 -> E1 rev(E2) E3 while some edge is
/// traversed twice in the same direction. Zero-length transitions are
/// dropped first.
Tour shortcut_repeated_edges(const MetricSpace& space, Tour t);

/// Keeps only the first visit of each point (closed tours stay closed).
Tour shortcut_to_hamiltonian(Tour t);

/// Minimum spanning tree of the complete graph on subset (Prim, ties broken
/// towards the lexicographically smaller edge).
EdgeSet mst(const MetricSpace& space, std::span<const PointId> subset);
double mst_weight(const MetricSpace& space, std::span<const PointId> subset);

/// Preorder walk of mst(subset), each point visited once.
Tour double_tree_tour(const MetricSpace& space, std::span<const PointId> subset);

/// Pairs the odd vertices along an Euler walk of the doubled tree; the
/// matching weighs at most w(tree). Throws OddParity when |odd| is odd.
EdgeSet odd_matching_by_tree(const MetricSpace& space, const EdgeSet& tree,
                             std::span<const PointId> odd);

/// Hierholzer walk over a multigraph, lowest-index neighbour first. Starts at
/// `start`; if the graph has exactly two odd vertices start must be one of
/// them and the walk is open. Throws Disconnected if some edge is unreachable.
std::vector<PointId> euler_walk(const EdgeSet& edges, PointId start);

struct NetRespectCheck {
  bool ok = true;
  std::optional<std::pair<PointId, PointId>> violation;
};

/// A transition of length l respects the nets when both endpoints lie in H_i
/// for the i with s^i <= eps*l < s^{i+1}.
bool transition_respects_nets(const MetricSpace& space, const NetHierarchy& h,
                              double eps, PointId x, PointId y);

NetRespectCheck is_net_respecting(const MetricSpace& space, const Tour& t,
                                  const NetHierarchy& h, double eps);

/// Reroutes every non-respecting transition through covering net points,
/// recursively, until the tour respects the nets. Requires 0 < eps <= 1/8.
Tour make_net_respecting(const MetricSpace& space, const Tour& t,
                         const NetHierarchy& h, double eps);

std::size_t count_crossings(const Tour& t, std::span<const PointId> cluster);

/// Inside endpoints of all crossing transitions.
PointSet cross_points(const Tour& t, std::span<const PointId> cluster);

enum class PatchTree { CrossPoints, WholeCluster };

/// Reduces the crossings of `cluster` to at most two. The returned tour has
/// the same endpoints, visits every point t visits, and weighs at most
/// w(t) + 4 w(MST(Ĉ)) where Ĉ is the cross-point set (or the whole cluster
/// with PatchTree::WholeCluster). For open tours an inside endpoint of t is
/// treated as a retained cross-point and joins Ĉ.
Tour patch_crossings(const MetricSpace& space, const Tour& t,
                     std::span<const PointId> cluster,
                     PatchTree tree = PatchTree::CrossPoints);

/// The point set Ĉ that patch_crossings charges against.
PointSet patch_anchor_set(const Tour& t, std::span<const PointId> cluster);

/// Joins subtours (open or closed) into one closed tour via MST(cross_points)
/// plus a tree matching on odd-degree vertices. Weight at most
/// sum w(T_i) + 2 w(MST(cross_points)).
Tour stitch_subtours(const MetricSpace& space, std::span<const Tour> subtours,
                     std::span<const PointId> cross_points);

}  // namespace dtsp
