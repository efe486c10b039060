#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "dtsp/errors.hpp"
#include "dtsp/oracles.hpp"
#include "dtsp/tour.hpp"
#include "support.hpp"

using namespace dtsp;

namespace {

// Minimum spanning tree weight by enumerating all Prüfer sequences.
double brute_mst(const MetricSpace& m) {
  const std::size_t n = m.size();
  if (n < 2) return 0.0;
  if (n == 2) return m.dist(0, 1);
  std::vector<std::size_t> code(n - 2, 0);
  double best = 1e300;
  for (;;) {
    std::vector<int> deg(n, 1);
    for (auto c : code) ++deg[c];
    double w = 0.0;
    for (auto c : code) {
      std::size_t leaf = 0;
      while (deg[leaf] != 1) ++leaf;
      w += m.dist(PointId(leaf), PointId(c));
      --deg[leaf];
      --deg[c];
    }
    std::size_t a = n, b = n;
    for (std::size_t v = 0; v < n; ++v)
      if (deg[v] == 1) (a == n ? a : b) = v;
    w += m.dist(PointId(a), PointId(b));
    best = std::min(best, w);
    std::size_t k = 0;
    while (k < code.size() && ++code[k] == n) code[k++] = 0;
    if (k == code.size()) break;
  }
  return best;
}

double sum_transitions(const MetricSpace& m, const std::vector<PointId>& seq, bool closed) {
  double w = 0.0;
  for (std::size_t k = 0; k + 1 < seq.size(); ++k) w += m.dist(seq[k], seq[k + 1]);
  if (closed && seq.size() > 1) w += m.dist(seq.back(), seq.front());
  return w;
}

Tour random_walk(std::size_t n, std::size_t len, std::mt19937_64& rng, bool closed) {
  std::vector<PointId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::uniform_int_distribution<PointId> pick(0, PointId(n - 1));
  while (perm.size() < len) perm.insert(perm.begin() + pick(rng) % perm.size(), pick(rng));
  Tour t{perm, closed};
  // remove accidental zero-length hops
  t.seq.erase(std::unique(t.seq.begin(), t.seq.end()), t.seq.end());
  return t;
}

PointSet random_cluster(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::vector<PointId> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  PointSet c(all.begin(), all.begin() + k);
  std::sort(c.begin(), c.end());
  return c;
}

}  // namespace

TEST_CASE("tour weight") {
  const auto tri = MetricSpace::from_points({{0, 0}, {1, 0}, {0.5, std::sqrt(0.75)}});
  CHECK(tour_weight(tri, Tour{{1}, true}) == 0.0);
  CHECK(tour_weight(tri, Tour{{0, 1, 2}, true}) == doctest::Approx(3.0));
  CHECK(tour_weight(tri, Tour{{0, 1, 2}, false}) == doctest::Approx(2.0));

  std::mt19937_64 rng(1);
  const auto m = testing::random_plane(10, 5);
  std::vector<PointId> p(10);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  CHECK(tour_weight(m, Tour{p, true}) == doctest::Approx(sum_transitions(m, p, true)));
}

TEST_CASE("shortcut repeated edges") {
  const auto m = testing::line(4);
  SUBCASE("no repeat is identity") {
    const Tour t{{0, 2, 1, 3}, true};
    CHECK(shortcut_repeated_edges(m, t) == t);
  }
  SUBCASE("a-b-a-b") {
    const Tour t{{0, 1, 0, 1}, false};
    const Tour out = shortcut_repeated_edges(m, t);
    CHECK(out.seq == std::vector<PointId>{0, 1});
    CHECK(tour_weight(m, t) - tour_weight(m, out) == doctest::Approx(2.0));
  }
  SUBCASE("random tours with injected duplicates") {
    std::mt19937_64 rng(7);
    const auto r = testing::random_plane(12, 3);
    for (int trial = 0; trial < 200; ++trial) {
      Tour t = random_walk(12, 16, rng, trial % 2 == 0);
      // duplicate one directed edge somewhere later in the sequence
      const std::size_t k = rng() % (t.seq.size() - 1);
      const PointId a = t.seq[k], b = t.seq[k + 1];
      t.seq.insert(t.seq.end(), {a, b});
      t.seq.erase(std::unique(t.seq.begin(), t.seq.end()), t.seq.end());
      const Tour out = shortcut_repeated_edges(r, t);
      CHECK(visited(out) == visited(t));
      CHECK(tour_weight(r, out) <= tour_weight(r, t) + 1e-9);
      CHECK(out.seq.front() == t.seq.front());
      if (!t.closed) CHECK(out.seq.back() == t.seq.back());
      // no directed edge repeats
      std::vector<std::pair<PointId, PointId>> e;
      for (std::size_t q = 0; q < out.num_transitions(); ++q) e.push_back(out.transition(q));
      std::sort(e.begin(), e.end());
      CHECK(std::adjacent_find(e.begin(), e.end()) == e.end());
    }
  }
}

TEST_CASE("minimum spanning tree") {
  const auto tri = MetricSpace::from_points({{0, 0}, {1, 0}, {0.5, std::sqrt(0.75)}});
  CHECK(mst(tri, PointSet{2}).empty());
  CHECK(mst_weight(tri, tri.all_points()) == doctest::Approx(2.0));
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 3 + seed % 6;
    const auto m = testing::random_plane(n, seed);
    const EdgeSet t = mst(m, m.all_points());
    CHECK(t.size() == n - 1);
    CHECK(edges_weight(t) == doctest::Approx(brute_mst(m)));
  }
}

TEST_CASE("double tree tour") {
  const auto m = testing::line(3);
  const Tour single = double_tree_tour(m, PointSet{1});
  CHECK(single.seq == std::vector<PointId>{1});
  CHECK(tour_weight(m, double_tree_tour(m, m.all_points())) == doctest::Approx(4.0));
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto r = testing::random_plane(4 + seed % 9, 100 + seed);
    const double w = tour_weight(r, double_tree_tour(r, r.all_points()));
    const double opt = held_karp_tsp(r).weight;
    const double tree = mst_weight(r, r.all_points());
    CHECK(w >= opt - 1e-9);
    CHECK(w <= 2 * tree + 1e-9);
    // MST sandwich
    CHECK(tree <= opt + 1e-9);
    CHECK(opt <= 2 * tree + 1e-9);
  }
}

TEST_CASE("MST weight against n^(1-1/ddim) * diam") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto m = testing::random_normalized(60, seed);
    const auto e = estimate_doubling(m, 64, seed);
    for (PointId c = 0; c < 60; c += 11) {
      const auto s = ball(m, c, m.diameter() / 3);
      const double bound = 4 * std::pow(double(s.size()), 1 - 1 / e.ddim_upper) *
                           diameter_of(m, s);
      CHECK(mst_weight(m, s) <= bound + 1e-9);
    }
  }
}

TEST_CASE("tree matching") {
  const auto m = testing::line(3);
  const EdgeSet path = mst(m, m.all_points());
  CHECK(odd_matching_by_tree(m, path, PointSet{}).empty());
  const auto pair = odd_matching_by_tree(m, path, PointSet{0, 2});
  REQUIRE(pair.size() == 1);
  CHECK(edges_weight(pair) <= 2.0 + 1e-12);
  CHECK_THROWS_AS(odd_matching_by_tree(m, path, PointSet{0}), OddParity);

  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto r = testing::random_plane(14, seed);
    const EdgeSet tree = mst(r, r.all_points());
    const std::size_t k = 2 * (1 + seed % 5);
    const PointSet odd = random_cluster(14, k, rng);
    const EdgeSet match = odd_matching_by_tree(r, tree, odd);
    CHECK(match.size() == k / 2);
    PointSet covered;
    for (const Edge& e : match) covered.insert(covered.end(), {e.u, e.v});
    std::sort(covered.begin(), covered.end());
    CHECK(covered == odd);
    const double w = edges_weight(match);
    CHECK(w <= edges_weight(tree) + 1e-9);
    CHECK(w >= brute_force_matching(r, odd).weight - 1e-9);
  }
}

TEST_CASE("Euler walks") {
  const EdgeSet square{{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 0, 1}};
  CHECK(euler_walk(square, 0) == std::vector<PointId>{0, 1, 2, 3, 0});
  const EdgeSet path{{0, 1, 1}, {1, 2, 1}};
  CHECK(euler_walk(path, 2) == std::vector<PointId>{2, 1, 0});
  const EdgeSet split{{0, 1, 1}, {1, 0, 1}, {2, 3, 1}, {3, 2, 1}};
  CHECK_THROWS_AS(euler_walk(split, 0), Disconnected);
}

TEST_CASE("net-respecting conversion") {
  const auto m = testing::random_normalized(30, 77);
  const auto h = build_hierarchy(m, 4.0);
  const double eps = 0.125;

  SUBCASE("already respecting tours are unchanged") {
    const Tour t{{0, 1}, true};
    if (is_net_respecting(m, t, h, eps).ok) CHECK(make_net_respecting(m, t, h, eps) == t);
    const auto l = testing::line(6);
    const auto hl = build_hierarchy(l, 4.0);
    const Tour short_hop{{0, 5}, false};  // length 5 < 1/eps between H_0 points
    CHECK(make_net_respecting(l, short_hop, hl, eps) == short_hop);
  }

  SUBCASE("forced violation is reported") {
    // Two points far apart and outside H_3 relative to the hop length.
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 1000; ++i) pts.push_back({double(i)});
    const auto l = MetricSpace::from_points(pts);
    const auto hl = build_hierarchy(l, 4.0);
    PointId a = 1, b = 0;
    while (hl.contains(3, a)) ++a;
    for (b = PointId(a + 1); b < 1000; ++b)
      if (!hl.contains(3, b) && l.dist(a, b) >= 64 / eps) break;
    REQUIRE(b < 1000);
    const Tour t{{a, b}, false};
    const auto check = is_net_respecting(l, t, hl, eps);
    CHECK_FALSE(check.ok);
    REQUIRE(check.violation);
    CHECK(check.violation->first == a);
    CHECK(check.violation->second == b);
  }

  SUBCASE("random tours") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
      const Tour t = random_walk(30, 30, rng, trial % 3 != 0);
      const Tour out = make_net_respecting(m, t, h, eps);
      CHECK(is_net_respecting(m, out, h, eps).ok);
      CHECK(visits_all(out, visited(t)));
      CHECK(out.seq.front() == t.seq.front());
      if (!t.closed) CHECK(out.seq.back() == t.seq.back());
      CHECK(tour_weight(m, out) <= (1 + 16 * eps) * tour_weight(m, t) + 1e-9);
      // independent per-transition check
      bool ok = true;
      for (std::size_t k = 0; k < t.num_transitions(); ++k) {
        const auto [x, y] = t.transition(k);
        const double l = m.dist(x, y);
        int i = 0;
        while (std::pow(4.0, i + 1) <= eps * l * (1 + 1e-9)) ++i;
        if (eps * l >= 4.0 * (1 - 1e-9)) ok = ok && h.contains(i, x) && h.contains(i, y);
      }
      CHECK(ok == is_net_respecting(m, t, h, eps).ok);
    }
  }
  CHECK_THROWS_AS(make_net_respecting(m, Tour{{0, 1}, true}, h, 0.2), ConfigError);
}

TEST_CASE("patching: explicit four-crossing tour") {
  // cluster {0,1} near the origin, outside points far to each side
  const auto m = MetricSpace::from_points({{0, 0}, {1, 0}, {-10, 0}, {11, 0}, {0, 10}, {1, 10}});
  const PointSet c{0, 1};
  const Tour t{{0, 2, 1, 3, 5, 0, 4, 1}, true};
  REQUIRE(count_crossings(t, c) >= 4);
  const Tour out = patch_crossings(m, t, c);
  CHECK(count_crossings(out, c) <= 2);
  CHECK(visits_all(out, visited(t)));
  CHECK(out.seq.front() == t.seq.front());
  const PointSet hat = patch_anchor_set(t, c);
  CHECK(tour_weight(m, out) <= tour_weight(m, t) + 4 * mst_weight(m, hat) + 1e-9);
}

TEST_CASE("patching: tours with at most two crossings are unchanged") {
  const auto m = testing::random_plane(8, 4);
  const Tour t{{0, 1, 2, 3, 4, 5, 6, 7}, true};
  CHECK(patch_crossings(m, t, PointSet{2, 3}) == t);
}

TEST_CASE("patching: property sweep") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 6 + rng() % 15;
    const auto m = testing::random_plane(n, 1000 + trial);
    const bool closed = trial % 2 == 0;
    const Tour t = random_walk(n, n + rng() % n, rng, closed);
    const PointSet c = random_cluster(n, 1 + rng() % (n - 2), rng);
    const bool whole = trial % 5 == 0;
    const Tour out = patch_crossings(m, t, c, whole ? PatchTree::WholeCluster : PatchTree::CrossPoints);
    CAPTURE(trial);
    CHECK(out.closed == t.closed);
    CHECK(count_crossings(out, c) <= 2);
    CHECK(visits_all(out, visited(t)));
    CHECK(out.seq.front() == t.seq.front());
    if (!closed) CHECK(out.seq.back() == t.seq.back());
    const double tree = whole ? mst_weight(m, c) : mst_weight(m, patch_anchor_set(t, c));
    CHECK(tour_weight(m, out) <= tour_weight(m, t) + 4 * tree + 1e-9);
  }
}

TEST_CASE("stitching subtours") {
  SUBCASE("one closed subtour") {
    const auto m = testing::random_plane(6, 2);
    const std::vector<Tour> parts{{{0, 1, 2, 3, 4, 5}, true}};
    const PointSet cross{1, 4};
    const Tour out = stitch_subtours(m, parts, cross);
    CHECK(out.closed);
    CHECK(visits_all(out, m.all_points()));
    CHECK(tour_weight(m, out) <= tour_weight(m, parts[0]) + 2 * mst_weight(m, cross) + 1e-9);
  }
  SUBCASE("two open pieces on a square") {
    const auto m = MetricSpace::from_points({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const std::vector<Tour> parts{{{0, 1}, false}, {{2, 3}, false}};
    const PointSet cross{0, 1, 2, 3};
    const Tour out = stitch_subtours(m, parts, cross);
    CHECK(visited(out) == PointSet{0, 1, 2, 3});
    CHECK(tour_weight(m, out) <= 2.0 + 2 * mst_weight(m, cross) + 1e-9);
  }
  SUBCASE("random decompositions") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 4 + rng() % 17;
      const auto m = testing::random_plane(n, 500 + trial);
      std::vector<PointId> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<Tour> parts;
      PointSet cross;
      std::size_t at = 0;
      while (at < n) {
        const std::size_t len = std::min(n - at, std::size_t(1 + rng() % 5));
        Tour piece{{perm.begin() + at, perm.begin() + at + len}, false};
        cross.push_back(piece.seq.front());
        cross.push_back(piece.seq.back());
        parts.push_back(std::move(piece));
        at += len;
      }
      std::sort(cross.begin(), cross.end());
      cross.erase(std::unique(cross.begin(), cross.end()), cross.end());
      const Tour out = stitch_subtours(m, parts, cross);
      double sum = 0.0;
      for (const Tour& p : parts) sum += tour_weight(m, p);
      CHECK(visits_all(out, m.all_points()));
      CHECK(tour_weight(m, out) <= sum + 2 * mst_weight(m, cross) + 1e-9);
    }
  }
  SUBCASE("disconnected pieces are rejected") {
    const auto m = testing::random_plane(4, 1);
    const std::vector<Tour> parts{{{0, 1}, true}, {{2, 3}, true}};
    CHECK_THROWS_AS(stitch_subtours(m, parts, PointSet{0}), Disconnected);
  }
}
