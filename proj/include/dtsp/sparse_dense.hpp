#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtsp/light_dp.hpp"
#include "dtsp/metric.hpp"
#include "dtsp/nets.hpp"
#include "dtsp/tour.hpp"

namespace dtsp {

struct SparsityWitness {
  int level = 0;
  PointId center = 0;
  double weight = 0.0;     // tour weight with both endpoints in B(center, 3 s^level)
  double threshold = 0.0;  // q s^level
};

struct SparsityReport {
  double q_tested = 0.0;
  bool pass = true;
  std::optional<SparsityWitness> witness;  // first failure, levels ascending
};

/// Checks every level 0..L and every net point u of that level.
SparsityReport is_q_sparse(const MetricSpace& space, const Tour& t,
                           const NetHierarchy& h, double q);

/// w(MST(B(u, 3 s^level))) for every u in H_level.
std::map<PointId, double> ball_mst_weights(const MetricSpace& space,
                                           const NetHierarchy& h, int level);

struct DenseRegion {
  int level = 0;
  PointId center = 0;
  double weight = 0.0;  // w(MST(B(center, 3 s^level)))
  double q_star = 0.0;  // weight / s^level
};

/// Lowest level 0..L at which some point u has w(MST(B(u, 3 s^i))) > 2 q s^i;
/// the center maximizes that weight (ties to the lowest index).
std::optional<DenseRegion> find_dense_region(const MetricSpace& space,
                                             const NetHierarchy& h, double q);

struct SplitRadius {
  double h = 0.0;
  double cost = 0.0;       // surrogate crossing cost at h
  double mean_cost = 0.0;  // mean over all candidates
};

/// Grid search over [12 s^i, 13 s^i]. The cost of a radius is the weight of
/// MST(S) edges with an endpoint in the open-closed annulus
/// (h - 6 delta s^i, h + 6 delta s^i] around v. Ties go to the smaller radius.
SplitRadius choose_split_radius(const MetricSpace& space, double s, PointId v,
                                int level, double delta,
                                std::size_t candidates = 64);

struct SplitResult {
  PointSet S1, S2;  // sorted
  PointId v = 0;
  int level = 0;
  double h = 0.0;
  double q_star = 0.0;
  int k = 0;  // level of the boundary nets, s^k <= delta s^i
  int j = 0;  // level of the skeleton nets, s^j <= eps delta s^i
  std::size_t inside = 0;  // |B(v, h)|
};

/// Splits S around B(v, h). S1 holds the ball, the k-level covers of the
/// boundary annulus with their s^k neighbourhoods and the j-level covers of
/// the ball. S2 holds the outside, the j-level net of the ball and the
/// k-level net points of the ball covering outside points, with their s^k
/// neighbourhoods. Throws DegenerateSplit when S2 = S.
SplitResult split_instance(const MetricSpace& space, const NetHierarchy& h,
                           PointId v, int level, double radius, double delta,
                           double eps, double q_star = 0.0);

/// w(MST(B(v, 13 s^i))) against 2^{5 ddim} q* s^i.
struct DenseMstBound {
  double lhs = 0.0, rhs = 0.0;
  bool ok = true;
};
DenseMstBound dense_mst_bound(const MetricSpace& space, double s,
                              const SplitResult& split, double ddim);

struct LocalTourBounds {
  double inner_weight = 0.0;  // w(T ∩ B*(u, R))
  double ball_mst = 0.0;      // w(MST(B(u, R)))
  double upper = 0.0;         // 6 (1 + 16 eps) ball_mst
  double outer_weight = 0.0;  // w(T ∩ B*(u, 4R))
  double lower = 0.0;         // ball_mst - (s/eps)^{2 ddim} R
  bool upper_ok = true, lower_ok = true;
  double upper_slack = 0.0, lower_slack = 0.0;
};

/// Evaluates both local comparisons between a tour and the MST of a ball.
/// B* keeps the tour edges with both endpoints in the ball.
LocalTourBounds check_local_tour_bounds(const MetricSpace& space, const Tour& t,
                                        PointId u, double R, double eps,
                                        double s, double ddim);

struct SolveParams {
  double eps = 0.05;
  double s = 6.0;
  double q = 0.0;  // 0 picks 64 (s / eps)^2
  double delta = 1.0 / 12.0;
  std::size_t m_cap = 6;
  int r = 2;
  std::uint32_t g = 1;  // radius guesses per center
  int max_recursion_depth = 64;
  std::uint64_t seed = 0;
  double ddim = 0.0;  // 0 estimates ddim_upper from the instance
  std::size_t state_budget = 4'000'000;
  std::size_t formation_cap = 16;
  unsigned threads = 0;
  std::size_t split_candidates = 64;

  double q_effective() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// One sparse solve inside the recursion.
struct SparseSolve {
  int depth = 0;
  std::size_t n = 0;
  /// "dp", "dp_g1", "dp_m2" or "christofides": the first stage of the
  /// fallback chain that completed within the state budget.
  std::string method;
  double dp_cost = 0.0;
  double weight = 0.0;
  std::size_t states = 0;
};

struct SplitTrace {
  int depth = 0;
  std::size_t n = 0;
  int level = 0;
  PointId v = 0;  // id in the input space
  double q_star = 0.0;
  double h = 0.0;
  double surrogate_cost = 0.0;
  std::size_t s1 = 0, s2 = 0, overlap = 0;
  bool degenerate = false;  // split aborted, solved as sparse
  bool union_ok = true, overlap_ok = true, shrink_ok = true;
  DenseMstBound bound;
  PointId splice_point = 0;
};

struct SolveReport {
  double q = 0.0;
  double q_theory = 0.0;  // (s / eps)^ddim, the leading factor only
  double ddim = 0.0;
  int depth = 0;
  std::vector<SplitTrace> splits;
  std::vector<SparseSolve> sparse;
  double weight = 0.0;
  double mst = 0.0;
  std::optional<double> optimum;  // Held-Karp when n <= 18
};

struct SolveResult {
  Tour tour;  // closed, each point once
  SolveReport report;
};

/// Top-level solver: splits off dense regions, solves each piece with the
/// light-tour DP and splices the tours at shared points.
SolveResult solve_tsp(const MetricSpace& space, const SolveParams& params);

/// The sparse path alone on the whole instance (no dense splits).
SparseSolve solve_sparse(const MetricSpace& space, const SolveParams& params,
                         double ddim, Tour* tour);

/// Inserts t2 into t1 at the first occurrence in t1 of the lowest point both
/// visit. Throws Disconnected when they share no point.
Tour splice_tours(const Tour& t1, const Tour& t2, PointId* at = nullptr);

}  // namespace dtsp
