#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "dtsp/errors.hpp"
#include "dtsp/oracles.hpp"
#include "dtsp/sparse_dense.hpp"
#include "support.hpp"

using namespace dtsp;

namespace {

bool valid_closed(const Tour& t, std::size_t n) {
  if (!t.closed || t.seq.size() != n) return false;
  std::vector<PointId> s = t.seq;
  std::sort(s.begin(), s.end());
  for (std::size_t k = 0; k < n; ++k)
    if (s[k] != k) return false;
  return true;
}

// First (level, net point) whose 3 s^i ball holds more than q s^i of tour
// weight, scanning the same order the library documents.
std::optional<std::pair<int, PointId>> first_heavy_ball(const MetricSpace& m,
                                                        const Tour& t,
                                                        const NetHierarchy& h,
                                                        double q) {
  for (int i = 0; i <= h.top(); ++i) {
    const double a = std::pow(h.s(), i);
    for (PointId u : h.net(i)) {
      const auto b = testing::scan_ball(m, u, 3 * a);
      const std::set<PointId> in(b.begin(), b.end());
      double w = 0;
      for (std::size_t k = 0; k < t.seq.size(); ++k) {
        const PointId x = t.seq[k], y = t.seq[(k + 1) % t.seq.size()];
        if (in.count(x) && in.count(y)) w += m.dist(x, y);
      }
      if (w > q * a) return std::make_pair(i, u);
    }
  }
  return std::nullopt;
}

// Brute re-scan for the lowest dense level and its heaviest ball.
std::optional<std::pair<int, PointId>> rescan_dense(const MetricSpace& m,
                                                    const NetHierarchy& h, double q) {
  for (int i = 0; i <= h.top(); ++i) {
    const double a = std::pow(h.s(), i);
    double best = -1;
    PointId arg = 0;
    for (PointId u = 0; u < m.size(); ++u) {
      const double w = testing::kruskal_weight(m, testing::scan_ball(m, u, 3 * a));
      if (w > 2 * q * a && w > best * (1 + 1e-12)) {
        best = w;
        arg = u;
      }
    }
    if (best >= 0) return std::make_pair(i, arg);
  }
  return std::nullopt;
}

MetricSpace micro_cluster(std::uint64_t seed) {
  // 100 points on a unit grid, plus 20 sparse points far away.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::vector<double>> pts;
  for (int k = 0; k < 100; ++k) pts.push_back({double(k % 10), double(k / 10)});
  for (int k = 0; k < 20; ++k) pts.push_back({5000 + 40000 * u(rng), 40000 * u(rng)});
  return normalize(MetricSpace::from_points(pts)).space;
}

}  // namespace

TEST_CASE("q-sparsity") {
  const auto m = testing::random_normalized(30, 3);
  const auto h = build_hierarchy(m, 6);
  CHECK(is_q_sparse(m, Tour{}, h, 1.0).pass);
  CHECK(is_q_sparse(m, Tour{{4}, true}, h, 1.0).pass);
  const Tour t = double_tree_tour(m, m.all_points());
  CHECK(is_q_sparse(m, t, h, tour_weight(m, t)).pass);

  for (double q : {0.5, 2.0, 5.0, 20.0}) {
    const auto rep = is_q_sparse(m, t, h, q);
    const auto ref = first_heavy_ball(m, t, h, q);
    CAPTURE(q);
    REQUIRE(rep.pass == !ref.has_value());
    if (ref) {
      CHECK(rep.witness->level == ref->first);
      CHECK(rep.witness->center == ref->second);
      CHECK(rep.witness->weight > rep.witness->threshold);
    }
  }

  // A tour zig-zagging inside the grid cluster is heavy there.
  const auto mc = micro_cluster(1);
  const auto hc = build_hierarchy(mc, 6);
  Tour zig{{}, true};
  for (int rep = 0; rep < 3; ++rep)
    for (PointId p = 0; p < 100; p += 7) zig.seq.push_back(p);
  for (PointId p = 0; p < mc.size(); ++p) zig.seq.push_back(p);
  const auto rep = is_q_sparse(mc, zig, hc, 4.0);
  const auto ref = first_heavy_ball(mc, zig, hc, 4.0);
  REQUIRE(ref);
  REQUIRE_FALSE(rep.pass);
  CHECK(rep.witness->level == ref->first);
  CHECK(rep.witness->center == ref->second);
  CHECK(rep.witness->center < 100);
}

TEST_CASE("ball MST weights") {
  const auto two = MetricSpace::from_points({{0, 0}, {0, 1}, {100, 0}});
  const auto h2 = build_hierarchy(two, 6);
  const auto w0 = ball_mst_weights(two, h2, 0);
  CHECK(w0.at(0) == doctest::Approx(1));
  CHECK(w0.at(2) == 0.0);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto m = testing::random_normalized(40, 100 + seed);
    const auto h = build_hierarchy(m, 6);
    for (int i = 0; i <= h.top(); ++i)
      for (const auto& [u, w] : ball_mst_weights(m, h, i))
        CHECK(w == doctest::Approx(testing::kruskal_weight(
                       m, testing::scan_ball(m, u, 3 * std::pow(6.0, i)))));
  }
}

TEST_CASE("dense region detection") {
  const auto m = testing::random_normalized(50, 5);
  const auto h = build_hierarchy(m, 6);
  CHECK_FALSE(find_dense_region(m, h, 1e9));
  CHECK_FALSE(find_dense_region(m, h, mst_weight(m, m.all_points())));
  CHECK_THROWS_AS(find_dense_region(m, h, 0.0), ConfigError);

  for (double q : {0.5, 1.0, 3.0, 8.0}) {
    const auto got = find_dense_region(m, h, q);
    const auto ref = rescan_dense(m, h, q);
    CAPTURE(q);
    REQUIRE(got.has_value() == ref.has_value());
    if (got) {
      CHECK(got->level == ref->first);
      CHECK(got->center == ref->second);
      CHECK(got->q_star > 2 * q);
    }
  }

  const auto mc = micro_cluster(2);
  const auto hc = build_hierarchy(mc, 6);
  const auto d = find_dense_region(mc, hc, 4.0);
  REQUIRE(d);
  CHECK(d->center < 100);
  CHECK(d->level <= 1);
  const auto ref = rescan_dense(mc, hc, 4.0);
  CHECK(d->level == ref->first);
  CHECK(d->center == ref->second);
}

TEST_CASE("split radius") {
  // Nothing near the candidate band.
  const auto far = MetricSpace::from_points({{0, 0}, {1, 0}, {1000, 0}});
  const auto r0 = choose_split_radius(far, 6, 0, 1, 1.0 / 12);
  CHECK(r0.cost == 0.0);
  CHECK(r0.h == doctest::Approx(72));

  // A thin shell at 73 inside [72, 78]: the chosen band must miss it.
  std::vector<std::vector<double>> pts{{0, 0}};
  for (int k = 0; k < 40; ++k) {
    const double a = 2 * 3.14159265358979 * k / 40;
    pts.push_back({73 * std::cos(a), 73 * std::sin(a)});
  }
  const auto shell = MetricSpace::from_points(pts);
  const auto rs = choose_split_radius(shell, 6, 0, 1, 1.0 / 12);
  CHECK(rs.cost == 0.0);
  CHECK(rs.h - 73 >= 6.0 * 6 / 12);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto m = normalize(testing::random_plane(80, 300 + seed)).space;
    const PointId v = PointId(seed);
    const int level = 1;
    const auto r = choose_split_radius(m, 6, v, level, 1.0 / 12);
    CHECK(r.cost <= r.mean_cost + 1e-9);
    CHECK(r.h >= 72 - 1e-9);
    CHECK(r.h <= 78 + 1e-9);
  }
}

TEST_CASE("split invariants") {
  // Every point inside the ball: nothing is left outside.
  const auto small = testing::random_normalized(10, 9);
  const auto hs = build_hierarchy(small, 6);
  CHECK_THROWS_AS(split_instance(small, hs, 0, 3, 12 * 216.0, 1.0 / 12, 0.05),
                  DegenerateSplit);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto m = testing::pair_chain(24, seed);
    const auto h = build_hierarchy(m, 6);
    const auto d = find_dense_region(m, h, 1.0);
    REQUIRE(d);
    CHECK(d->level == 5);
    const auto r = choose_split_radius(m, 6, d->center, d->level, 1.0 / 12);
    const auto sp = split_instance(m, h, d->center, d->level, r.h, 1.0 / 12, 0.05,
                                   d->q_star);
    std::set<PointId> all(sp.S1.begin(), sp.S1.end());
    all.insert(sp.S2.begin(), sp.S2.end());
    CHECK(all.size() == m.size());
    std::vector<PointId> common;
    std::set_intersection(sp.S1.begin(), sp.S1.end(), sp.S2.begin(), sp.S2.end(),
                          std::back_inserter(common));
    CHECK_FALSE(common.empty());
    CHECK(sp.S2.size() < m.size());
    for (PointId p : testing::scan_ball(m, d->center, r.h))
      CHECK(std::binary_search(sp.S1.begin(), sp.S1.end(), p));
    CHECK(sp.j == 1);
    CHECK(dense_mst_bound(m, 6, sp, 1.0).ok);
  }
}

TEST_CASE("splicing") {
  const Tour a{{0, 1, 2, 3}, true}, b{{5, 3, 4}, true};
  PointId at = 99;
  const Tour s = splice_tours(a, b, &at);
  CHECK(at == 3);
  CHECK(s.seq == std::vector<PointId>{0, 1, 2, 3, 4, 5, 3});
  CHECK(splice_tours(a, Tour{{2}, true}).seq == a.seq);
  CHECK_THROWS_AS(splice_tours(a, Tour{{7, 8}, true}), Disconnected);
}

TEST_CASE("solve on small instances") {
  SolveParams p;
  const auto one = MetricSpace::from_points({{3, 4}});
  const auto r1 = solve_tsp(one, p);
  CHECK(r1.tour.seq == std::vector<PointId>{0});
  CHECK(r1.report.weight == 0.0);

  const auto tri = testing::random_normalized(3, 1);
  CHECK(solve_tsp(tri, p).report.weight ==
        doctest::Approx(held_karp_tsp(tri).weight));

  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const std::size_t n = 8 + seed % 9;
    const auto m = testing::random_normalized(n, 500 + seed);
    p.seed = seed;
    const auto r = solve_tsp(m, p);
    CAPTURE(seed);
    CHECK(valid_closed(r.tour, n));
    const double opt = held_karp_tsp(m).weight;
    REQUIRE(r.report.optimum);
    CHECK(*r.report.optimum == doctest::Approx(opt));
    CHECK(r.report.weight >= opt * (1 - 1e-9));
    CHECK(r.report.weight <= 2 * mst_weight(m, m.all_points()) * (1 + 1e-9));
    CHECK(r.report.splits.empty());
  }

  p.eps = 0.1;
  CHECK_THROWS_AS(solve_tsp(tri, p), ConfigError);
  p.eps = 0.05;
  p.s = 5;
  CHECK_THROWS_AS(solve_tsp(tri, p), ConfigError);
  p.s = 6;
  p.r = 3;
  CHECK_THROWS_AS(solve_tsp(tri, p), ConfigError);
}

TEST_CASE("solve through dense splits") {
  SolveParams p;
  p.q = 1.0;
  p.ddim = 2.0;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto m = testing::pair_chain(20, 40 + seed);
    p.seed = seed;
    const auto r = solve_tsp(m, p);
    CAPTURE(seed);
    CHECK(valid_closed(r.tour, m.size()));
    REQUIRE_FALSE(r.report.splits.empty());
    bool split_done = false;
    for (const auto& s : r.report.splits) {
      if (s.degenerate) continue;
      split_done = true;
      CHECK(s.union_ok);
      CHECK(s.overlap_ok);
      CHECK(s.shrink_ok);
      CHECK(s.bound.ok);
    }
    CHECK(split_done);
    CHECK(r.report.depth <= int(r.report.splits.size()));
    CHECK(r.report.weight >= mst_weight(m, m.all_points()) * (1 - 1e-9));

    SolveParams shallow = p;
    shallow.max_recursion_depth = 1;
    if (r.report.depth > 1) CHECK_THROWS_AS(solve_tsp(m, shallow), RecursionLimit);
  }
}

TEST_CASE("local tour bounds") {
  const auto one = MetricSpace::from_points({{0, 0}, {50, 0}});
  const auto b0 = check_local_tour_bounds(one, Tour{{0, 1}, true}, 0, 1, 0.05, 6, 1);
  CHECK(b0.inner_weight == 0.0);
  CHECK(b0.ball_mst == 0.0);
  CHECK(b0.upper_ok);
  CHECK(b0.lower_ok);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 6 + seed % 4;
    const auto m = testing::random_normalized(n, 700 + seed);
    const auto h = build_hierarchy(m, 6);
    const Tour opt = brute_force_tsp(m).tour;
    const Tour nr = make_net_respecting(m, opt, h, 1.0 / 16);
    for (PointId u = 0; u < n; ++u)
      for (double R : {2.0, 5.0, 12.0}) {
        const auto b = check_local_tour_bounds(m, nr, u, R, 1.0 / 16, 6, 2);
        CAPTURE(seed);
        CAPTURE(R);
        CHECK(b.upper_ok);
        CHECK(b.lower_ok);
      }
  }
}
