#include "dtsp/oracles.hpp"

#include <algorithm>
#include <limits>
#include <bit>
#include <numeric>

#include "dtsp/errors.hpp"

namespace dtsp {

std::string to_string(OracleMethod m) {
  switch (m) {
    case OracleMethod::Brute: return "brute";
    case OracleMethod::HeldKarp: return "held_karp";
    case OracleMethod::Christofides: return "christofides";
    case OracleMethod::DoubleTree: return "double_tree";
    case OracleMethod::NearestNeighbor: return "nearest_neighbor";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

OracleResult finish(const MetricSpace& space, Tour t, OracleMethod m, bool exact) {
  OracleResult r;
  r.weight = tour_weight(space, t);
  r.tour = std::move(t);
  r.method = m;
  r.exact = exact;
  return r;
}

}  // namespace

OracleResult brute_force_tsp(const MetricSpace& space, std::size_t max_n) {
  const std::size_t n = space.size();
  if (n > max_n) throw TooLarge("brute force limited to n <= " + std::to_string(max_n));
  if (n == 0) throw DegenerateInstance("empty instance");
  std::vector<PointId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<PointId> best = perm;
  double best_w = kInf;
  do {
    if (n > 2 && perm[1] > perm[n - 1]) continue;  // mirror image
    double w = 0.0;
    for (std::size_t k = 0; k < n; ++k) w += space.dist(perm[k], perm[(k + 1) % n]);
    if (w < best_w) {
      best_w = w;
      best = perm;
    }
  } while (std::next_permutation(perm.begin() + 1, perm.end()));
  return finish(space, {best, true}, OracleMethod::Brute, true);
}

OracleResult held_karp_tsp(const MetricSpace& space, std::size_t max_n) {
  const std::size_t n = space.size();
  if (n > max_n) throw TooLarge("Held-Karp limited to n <= " + std::to_string(max_n));
  if (n == 0) throw DegenerateInstance("empty instance");
  if (n <= 2) {
    Tour t;
    for (PointId p = 0; p < n; ++p) t.seq.push_back(p);
    return finish(space, t, OracleMethod::HeldKarp, true);
  }
  // Point 0 is the fixed start; bit k of a mask stands for point k + 1.
  const std::size_t m = n - 1, full = (std::size_t(1) << m) - 1;
  std::vector<double> dp((full + 1) * m, kInf);
  std::vector<std::uint8_t> parent((full + 1) * m, 0);
  for (std::size_t j = 0; j < m; ++j) dp[(std::size_t(1) << j) * m + j] = space.dist(0, PointId(j + 1));
  for (std::size_t mask = 1; mask <= full; ++mask)
    for (std::size_t j = 0; j < m; ++j) {
      if (!(mask >> j & 1)) continue;
      const double here = dp[mask * m + j];
      if (here == kInf) continue;
      for (std::size_t k = 0; k < m; ++k) {
        if (mask >> k & 1) continue;
        const std::size_t next = mask | (std::size_t(1) << k);
        const double w = here + space.dist(PointId(j + 1), PointId(k + 1));
        if (w < dp[next * m + k]) {
          dp[next * m + k] = w;
          parent[next * m + k] = std::uint8_t(j);
        }
      }
    }
  double best = kInf;
  std::size_t last = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const double w = dp[full * m + j] + space.dist(PointId(j + 1), 0);
    if (w < best) {
      best = w;
      last = j;
    }
  }
  std::vector<PointId> rev;
  std::size_t mask = full, j = last;
  while (mask) {
    rev.push_back(PointId(j + 1));
    const std::size_t pj = parent[mask * m + j];
    mask &= ~(std::size_t(1) << j);
    j = pj;
  }
  Tour t;
  t.seq.push_back(0);
  t.seq.insert(t.seq.end(), rev.rbegin(), rev.rend());
  return finish(space, t, OracleMethod::HeldKarp, true);
}

Matching brute_force_matching(const MetricSpace& space,
                              std::span<const PointId> vertices,
                              std::size_t max_n) {
  if (vertices.size() % 2) throw OddParity("matching needs an even vertex count");
  if (vertices.size() > max_n)
    throw TooLarge("brute-force matching limited to " + std::to_string(max_n) + " vertices");
  std::vector<PointId> v(vertices.begin(), vertices.end());
  Matching best{{}, kInf};
  EdgeSet cur;
  std::vector<bool> used(v.size(), false);
  auto rec = [&](auto&& self, double w) -> void {
    if (w >= best.weight) return;
    std::size_t a = 0;
    while (a < v.size() && used[a]) ++a;
    if (a == v.size()) {
      best = {cur, w};
      return;
    }
    used[a] = true;
    for (std::size_t b = a + 1; b < v.size(); ++b) {
      if (used[b]) continue;
      used[b] = true;
      const double d = space.dist(v[a], v[b]);
      cur.push_back({v[a], v[b], d});
      self(self, w + d);
      cur.pop_back();
      used[b] = false;
    }
    used[a] = false;
  };
  rec(rec, 0.0);
  if (v.empty()) best.weight = 0.0;
  return best;
}

Matching dp_matching(const MetricSpace& space, std::span<const PointId> vertices) {
  const std::size_t k = vertices.size();
  if (k % 2) throw OddParity("matching needs an even vertex count");
  if (k > 24) throw TooLarge("subset-DP matching limited to 24 vertices");
  const std::size_t full = (std::size_t(1) << k) - 1;
  std::vector<double> dp(full + 1, kInf);
  std::vector<std::uint8_t> partner(full + 1, 0);
  dp[0] = 0.0;
  // dp[mask]: best matching of the vertices in mask, always pairing the
  // lowest set bit.
  for (std::size_t mask = 1; mask <= full; ++mask) {
    if (std::popcount(mask) % 2) continue;
    const std::size_t a = std::countr_zero(mask);
    const std::size_t rest = mask & ~(std::size_t(1) << a);
    for (std::size_t b = a + 1; b < k; ++b) {
      if (!(rest >> b & 1)) continue;
      const double w = dp[rest & ~(std::size_t(1) << b)] + space.dist(vertices[a], vertices[b]);
      if (w < dp[mask]) {
        dp[mask] = w;
        partner[mask] = std::uint8_t(b);
      }
    }
  }
  Matching out{{}, dp[full]};
  std::size_t mask = full;
  while (mask) {
    const std::size_t a = std::countr_zero(mask), b = partner[mask];
    out.pairs.push_back({vertices[a], vertices[b], space.dist(vertices[a], vertices[b])});
    mask &= ~((std::size_t(1) << a) | (std::size_t(1) << b));
  }
  return out;
}

OracleResult christofides(const MetricSpace& space, std::size_t exact_matching_max) {
  const std::size_t n = space.size();
  if (n < 2) throw DegenerateInstance("christofides needs at least two points");
  const PointSet all = space.all_points();
  EdgeSet g = mst(space, all);
  std::vector<int> deg(n, 0);
  for (const Edge& e : g) {
    ++deg[e.u];
    ++deg[e.v];
  }
  PointSet odd;
  for (PointId p = 0; p < n; ++p)
    if (deg[p] % 2) odd.push_back(p);
  const bool exact = odd.size() <= exact_matching_max;
  const EdgeSet match = exact ? dp_matching(space, odd).pairs
                              : odd_matching_by_tree(space, g, odd);
  g.insert(g.end(), match.begin(), match.end());
  Tour t{euler_walk(g, 0), true};
  t.seq.pop_back();
  OracleResult r = finish(space, shortcut_to_hamiltonian(t), OracleMethod::Christofides, false);
  r.exact_matching = exact;
  return r;
}

OracleResult double_tree(const MetricSpace& space) {
  const PointSet all = space.all_points();
  return finish(space, double_tree_tour(space, all), OracleMethod::DoubleTree, false);
}

OracleResult nearest_neighbor(const MetricSpace& space) {
  const std::size_t n = space.size();
  Tour t;
  if (n == 0) return finish(space, t, OracleMethod::NearestNeighbor, false);
  std::vector<bool> used(n, false);
  PointId cur = 0;
  used[0] = true;
  t.seq.push_back(0);
  for (std::size_t step = 1; step < n; ++step) {
    PointId best = 0;
    double best_d = kInf;
    for (PointId p = 0; p < n; ++p)
      if (!used[p] && space.dist(cur, p) < best_d) {
        best_d = space.dist(cur, p);
        best = p;
      }
    used[best] = true;
    t.seq.push_back(best);
    cur = best;
  }
  return finish(space, t, OracleMethod::NearestNeighbor, false);
}

}  // namespace dtsp
