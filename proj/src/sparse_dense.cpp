#include "dtsp/sparse_dense.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iterator>

#include "dtsp/errors.hpp"
#include "dtsp/oracles.hpp"
#include "dtsp/partition.hpp"

namespace dtsp {

namespace {

PointSet merge(PointSet a, const PointSet& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

// Points within radius of some point of `around`.
PointSet neighbourhood(const MetricSpace& space, const PointSet& around,
                       double radius) {
  PointSet out;
  for (PointId p = 0; p < space.size(); ++p)
    for (PointId x : around)
      if (within(space.dist(p, x), radius)) {
        out.push_back(p);
        break;
      }
  return out;
}

PointSet lift(const PointSet& local, const PointSet& ids) {
  PointSet out;
  out.reserve(local.size());
  for (PointId p : local) out.push_back(ids[p]);
  return out;
}

Tour lift(const Tour& local, const PointSet& ids) {
  Tour t{{}, local.closed};
  t.seq.reserve(local.seq.size());
  for (PointId p : local.seq) t.seq.push_back(ids[p]);
  return t;
}

}  // namespace

SparsityReport is_q_sparse(const MetricSpace& space, const Tour& t,
                           const NetHierarchy& h, double q) {
  SparsityReport rep;
  rep.q_tested = q;
  if (h.num_points() == 0 || t.num_transitions() == 0) return rep;
  const double total = tour_weight(space, t);
  for (int i = 0; i <= h.top(); ++i) {
    const double a = h.radius(i);
    if (total <= q * a) break;  // no restriction can exceed the total
    for (PointId u : h.net(i)) {
      double w = 0.0;
      for (std::size_t k = 0; k < t.num_transitions(); ++k) {
        const auto [x, y] = t.transition(k);
        if (within(space.dist(u, x), 3.0 * a) && within(space.dist(u, y), 3.0 * a))
          w += space.dist(x, y);
      }
      if (w > q * a) {
        rep.pass = false;
        rep.witness = SparsityWitness{i, u, w, q * a};
        return rep;
      }
    }
  }
  return rep;
}

std::map<PointId, double> ball_mst_weights(const MetricSpace& space,
                                           const NetHierarchy& h, int level) {
  std::map<PointId, double> out;
  const double R = 3.0 * h.radius(level);
  for (PointId u : h.net(level)) out[u] = mst_weight(space, ball(space, u, R));
  return out;
}

std::optional<DenseRegion> find_dense_region(const MetricSpace& space,
                                             const NetHierarchy& h, double q) {
  if (!(q > 0.0)) throw ConfigError("q must be positive");
  if (space.size() < 2) return std::nullopt;
  // A ball MST is at most twice the MST of everything.
  const double cap = 2.0 * mst_weight(space, space.all_points());
  for (int i = 0; i <= h.top(); ++i) {
    const double a = h.radius(i);
    if (cap <= 2.0 * q * a) break;
    std::optional<DenseRegion> best;
    for (PointId u = 0; u < space.size(); ++u) {
      const PointSet b = ball(space, u, 3.0 * a);
      if (b.size() < 2) continue;
      const double w = mst_weight(space, b);
      if (w > 2.0 * q * a && (!best || w > best->weight))
        best = DenseRegion{i, u, w, w / a};
    }
    if (best) return best;
  }
  return std::nullopt;
}

SplitRadius choose_split_radius(const MetricSpace& space, double s, PointId v,
                                int level, double delta,
                                std::size_t candidates) {
  if (candidates == 0) throw ConfigError("split_candidates must be positive");
  const double a = std::pow(s, level);
  const double half = 6.0 * delta * a;
  const EdgeSet tree = mst(space, space.all_points());
  std::vector<double> dv(space.size());
  for (PointId p = 0; p < space.size(); ++p) dv[p] = space.dist(v, p);

  SplitRadius best{12.0 * a, 0.0, 0.0};
  double sum = 0.0;
  for (std::size_t c = 0; c < candidates; ++c) {
    const double h =
        candidates == 1 ? 12.0 * a : 12.0 * a + a * double(c) / double(candidates - 1);
    auto in_band = [&](PointId p) {
      return dv[p] > h - half && within(dv[p], h + half);
    };
    double cost = 0.0;
    for (const Edge& e : tree)
      if (in_band(e.u) || in_band(e.v)) cost += e.w;
    sum += cost;
    if (c == 0 || cost < best.cost) {
      best.h = h;
      best.cost = cost;
    }
  }
  best.mean_cost = sum / double(candidates);
  return best;
}

SplitResult split_instance(const MetricSpace& space, const NetHierarchy& h,
                           PointId v, int level, double radius, double delta,
                           double eps, double q_star) {
  const double s = h.s();
  const double a = std::pow(s, level);
  SplitResult out;
  out.v = v;
  out.level = level;
  out.h = radius;
  out.q_star = q_star;
  out.k = level_for(delta * a, s);
  out.j = level_for(eps * delta * a, s);
  const double reach = std::pow(s, out.k);

  const PointSet inside = ball(space, v, radius);
  std::vector<bool> in(space.size(), false);
  for (PointId p : inside) in[p] = true;
  out.inside = inside.size();
  PointSet outside;
  for (PointId p = 0; p < space.size(); ++p)
    if (!in[p]) outside.push_back(p);

  // k-level covers of the boundary annulus.
  PointSet boundary;
  for (PointId p = 0; p < space.size(); ++p) {
    const double d = space.dist(v, p);
    if (d > radius - delta * a && within(d, radius + delta * a))
      boundary.push_back(h.cover(p, out.k));
  }
  boundary = merge(boundary, {});

  PointSet skeleton;
  for (PointId p : inside) skeleton.push_back(h.cover(p, out.j));
  skeleton = merge(skeleton, {});

  // k-level net points inside the ball that cover outside points.
  PointSet bridges;
  for (PointId p : outside) {
    const PointId c = h.cover(p, out.k);
    if (in[c]) bridges.push_back(c);
  }
  bridges = merge(bridges, {});

  out.S1 = merge(merge(merge(inside, boundary), neighbourhood(space, boundary, reach)),
                 skeleton);
  out.S2 = merge(merge(merge(outside, skeleton), bridges),
                 neighbourhood(space, bridges, reach));
  if (out.S2.size() == space.size())
    throw DegenerateSplit("split at level " + std::to_string(level) +
                          " keeps every point on the outside");
  return out;
}

DenseMstBound dense_mst_bound(const MetricSpace& space, double s,
                              const SplitResult& split, double ddim) {
  const double a = std::pow(s, split.level);
  DenseMstBound b;
  b.lhs = mst_weight(space, ball(space, split.v, 13.0 * a));
  b.rhs = std::pow(2.0, 5.0 * ddim) * split.q_star * a;
  b.ok = b.lhs < b.rhs;
  return b;
}

LocalTourBounds check_local_tour_bounds(const MetricSpace& space, const Tour& t,
                                        PointId u, double R, double eps,
                                        double s, double ddim) {
  auto restricted = [&](double radius) {
    double w = 0.0;
    for (std::size_t k = 0; k < t.num_transitions(); ++k) {
      const auto [x, y] = t.transition(k);
      if (within(space.dist(u, x), radius) && within(space.dist(u, y), radius))
        w += space.dist(x, y);
    }
    return w;
  };
  LocalTourBounds b;
  b.inner_weight = restricted(R);
  b.outer_weight = restricted(4.0 * R);
  b.ball_mst = mst_weight(space, ball(space, u, R));
  b.upper = 6.0 * (1.0 + 16.0 * eps) * b.ball_mst;
  b.lower = b.ball_mst - std::pow(s / eps, 2.0 * ddim) * R;
  b.upper_slack = b.upper - b.inner_weight;
  b.lower_slack = b.outer_weight - b.lower;
  b.upper_ok = b.inner_weight <= b.upper * (1.0 + 1e-9) + 1e-9;
  b.lower_ok = b.lower_slack >= -1e-9;
  return b;
}

double SolveParams::q_effective() const {
  return q > 0.0 ? q : 64.0 * (s / eps) * (s / eps);
}

void SolveParams::validate() const {
  if (!(eps > 0.0 && eps <= 0.05)) throw ConfigError("eps must lie in (0, 1/20]");
  if (!(s >= 6.0)) throw ConfigError("s must be at least 6");
  if (!(q >= 0.0)) throw ConfigError("q must be nonnegative");
  if (!(delta > 0.0 && delta <= 1.0 / 12.0 + 1e-15))
    throw ConfigError("delta must lie in (0, 1/12]");
  if (m_cap < 1) throw ConfigError("m_cap must be positive");
  if (r < 2 || r % 2 != 0) throw ConfigError("r must be even and at least 2");
  if (g < 1) throw ConfigError("g must be at least 1");
  if (max_recursion_depth < 1) throw ConfigError("max_recursion_depth must be positive");
  if (!(ddim >= 0.0)) throw ConfigError("ddim must be nonnegative");
  if (split_candidates < 1) throw ConfigError("split_candidates must be positive");
}

SparseSolve solve_sparse(const MetricSpace& space, const SolveParams& params,
                         double ddim, Tour* tour) {
  SparseSolve out;
  out.n = space.size();
  if (space.size() <= 1) {
    out.method = "trivial";
    if (tour) *tour = Tour{space.size() ? PointSet{0} : PointSet{}, true};
    return out;
  }
  const NetHierarchy h = build_hierarchy(space, params.s);
  LightParams lp;
  lp.r = params.r;
  lp.m_cap = params.m_cap;
  lp.eps = params.eps;
  lp.ddim = std::max(1.0, ddim);
  lp.state_budget = params.state_budget;
  lp.formation_cap = params.formation_cap;
  lp.threads = params.threads;

  struct Stage {
    const char* name;
    std::uint32_t g;
    std::size_t m_cap;
  };
  std::vector<Stage> stages{{"dp", params.g, params.m_cap}};
  if (params.g > 1) stages.push_back({"dp_g1", 1, params.m_cap});
  if (params.m_cap > 2) stages.push_back({"dp_m2", 1, 2});

  for (const Stage& st : stages) {
    lp.m_cap = st.m_cap;
    try {
      LightResult r = solve_with_radius_guessing(space, h, st.g, lp, params.seed);
      out.method = st.name;
      out.dp_cost = r.dp_cost;
      out.weight = r.weight;
      out.states = r.stats.states;
      if (tour) *tour = std::move(r.tour);
      return out;
    } catch (const BudgetExceeded&) {
    }
  }
  OracleResult c = christofides(space);
  out.method = "christofides";
  out.weight = c.weight;
  if (tour) *tour = std::move(c.tour);
  return out;
}

Tour splice_tours(const Tour& t1, const Tour& t2, PointId* at) {
  const PointSet v1 = visited(t1), v2 = visited(t2);
  PointSet common;
  std::set_intersection(v1.begin(), v1.end(), v2.begin(), v2.end(),
                        std::back_inserter(common));
  if (common.empty()) throw Disconnected("tours share no point");
  const PointId x = common.front();
  if (at) *at = x;
  const auto p1 = std::find(t1.seq.begin(), t1.seq.end(), x) - t1.seq.begin();
  const auto p2 = std::find(t2.seq.begin(), t2.seq.end(), x) - t2.seq.begin();

  Tour out{{}, true};
  out.seq.assign(t1.seq.begin(), t1.seq.begin() + p1 + 1);
  for (std::size_t k = 1; k < t2.seq.size(); ++k)
    out.seq.push_back(t2.seq[(p2 + k) % t2.seq.size()]);
  if (t2.seq.size() > 1) out.seq.push_back(x);
  out.seq.insert(out.seq.end(), t1.seq.begin() + p1 + 1, t1.seq.end());
  return out;
}

namespace {

struct Piece {
  Tour tour;
  int depth = 0;
  std::vector<SplitTrace> splits;
  std::vector<SparseSolve> sparse;
};

struct Recursion {
  const MetricSpace& space;
  const SolveParams& params;
  double ddim, q;

  Piece sparse_piece(const PointSet& ids, int depth) const {
    Piece out;
    out.depth = depth;
    Tour local;
    SparseSolve sv = solve_sparse(space.subspace(ids), params, ddim, &local);
    sv.depth = depth;
    out.sparse.push_back(sv);
    out.tour = lift(local, ids);
    return out;
  }

  Piece solve(const PointSet& ids, int depth) const {
    if (depth > params.max_recursion_depth)
      throw RecursionLimit("recursion depth exceeded " +
                           std::to_string(params.max_recursion_depth));
    if (ids.size() <= 3) return sparse_piece(ids, depth);
    const MetricSpace sub = space.subspace(ids);
    const NetHierarchy h = build_hierarchy(sub, params.s);
    const auto dense = find_dense_region(sub, h, q);
    if (!dense) return sparse_piece(ids, depth);

    SplitTrace tr;
    tr.depth = depth;
    tr.n = ids.size();
    tr.level = dense->level;
    tr.v = ids[dense->center];
    tr.q_star = dense->q_star;
    const SplitRadius rad = choose_split_radius(sub, params.s, dense->center,
                                                dense->level, params.delta,
                                                params.split_candidates);
    tr.h = rad.h;
    tr.surrogate_cost = rad.cost;

    SplitResult split;
    try {
      split = split_instance(sub, h, dense->center, dense->level, rad.h,
                             params.delta, params.eps, dense->q_star);
    } catch (const DegenerateSplit&) {
      tr.degenerate = true;
      Piece out = sparse_piece(ids, depth);
      out.splits.insert(out.splits.begin(), tr);
      return out;
    }

    const PointSet both = merge(split.S1, split.S2);
    PointSet common;
    std::set_intersection(split.S1.begin(), split.S1.end(), split.S2.begin(),
                          split.S2.end(), std::back_inserter(common));
    tr.s1 = split.S1.size();
    tr.s2 = split.S2.size();
    tr.overlap = common.size();
    tr.union_ok = both.size() == ids.size();
    tr.overlap_ok = !common.empty();
    tr.shrink_ok = split.S2.size() < ids.size();
    tr.bound = dense_mst_bound(sub, params.s, split, ddim);
    if (!tr.union_ok || !tr.overlap_ok || !tr.shrink_ok)
      throw Infeasible("split at depth " + std::to_string(depth) +
                       " broke the cover/overlap/shrink invariants");

    const PointSet s1 = lift(split.S1, ids), s2 = lift(split.S2, ids);
    Piece inner, outer;
    if (params.threads > 1) {
      auto f = std::async(std::launch::async, [&] { return sparse_piece(s1, depth); });
      outer = solve(s2, depth + 1);
      inner = f.get();
    } else {
      inner = sparse_piece(s1, depth);
      outer = solve(s2, depth + 1);
    }

    Piece out;
    out.depth = std::max(depth, outer.depth);
    out.tour = splice_tours(inner.tour, outer.tour, &tr.splice_point);
    out.splits.push_back(tr);
    out.splits.insert(out.splits.end(), outer.splits.begin(), outer.splits.end());
    out.sparse = std::move(inner.sparse);
    out.sparse.insert(out.sparse.end(), outer.sparse.begin(), outer.sparse.end());
    return out;
  }
};

}  // namespace

SolveResult solve_tsp(const MetricSpace& space, const SolveParams& params) {
  params.validate();
  if (space.size() == 0) throw DegenerateInstance("empty instance");
  SolveResult res;
  SolveReport& rep = res.report;
  rep.ddim = params.ddim > 0.0
                 ? params.ddim
                 : std::max(1.0, estimate_doubling(space, 32, params.seed).ddim_upper);
  rep.q = params.q_effective();
  rep.q_theory = std::pow(params.s / params.eps, rep.ddim);

  const Recursion rec{space, params, rep.ddim, rep.q};
  Piece top = rec.solve(space.all_points(), 0);
  res.tour = shortcut_to_hamiltonian(std::move(top.tour));
  rep.depth = top.depth;
  rep.splits = std::move(top.splits);
  rep.sparse = std::move(top.sparse);
  rep.weight = tour_weight(space, res.tour);
  rep.mst = mst_weight(space, space.all_points());
  if (space.size() <= kHeldKarpMax) rep.optimum = held_karp_tsp(space).weight;
  return res;
}

}  // namespace dtsp
