#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "dtsp/metric.hpp"

namespace testing {

inline dtsp::MetricSpace random_plane(std::size_t n, std::uint64_t seed,
                                      double side = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, side);
  std::vector<std::vector<double>> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng)};
  return dtsp::MetricSpace::from_points(std::move(pts));
}

inline dtsp::MetricSpace random_normalized(std::size_t n, std::uint64_t seed) {
  return dtsp::normalize(random_plane(n, seed)).space;
}

inline dtsp::MetricSpace line(std::size_t n, double spacing = 1.0) {
  std::vector<std::vector<double>> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = {spacing * double(i)};
  return dtsp::MetricSpace::from_points(std::move(pts));
}

inline dtsp::MetricSpace grid(std::size_t side) {
  std::vector<std::vector<double>> pts;
  for (std::size_t y = 0; y < side; ++y)
    for (std::size_t x = 0; x < side; ++x) pts.push_back({double(x), double(y)});
  return dtsp::MetricSpace::from_points(std::move(pts));
}

// Brute-force ball membership, written independently of the library.
inline std::vector<dtsp::PointId> scan_ball(const dtsp::MetricSpace& m,
                                            dtsp::PointId c, double r) {
  std::vector<dtsp::PointId> out;
  for (dtsp::PointId p = 0; p < m.size(); ++p) {
    const auto a = m.coords(c), b = m.coords(p);
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
    if (std::sqrt(acc) * m.scale() <= r * (1 + 1e-9) + 1e-12) out.push_back(p);
  }
  return out;
}

}  // namespace testing

namespace testing {

// Kruskal with a plain union-find; independent of the library's Prim.
inline double kruskal_weight(const dtsp::MetricSpace& m,
                             const std::vector<dtsp::PointId>& ids) {
  struct E { double w; std::size_t a, b; };
  std::vector<E> es;
  for (std::size_t a = 0; a < ids.size(); ++a)
    for (std::size_t b = a + 1; b < ids.size(); ++b)
      es.push_back({m.dist(ids[a], ids[b]), a, b});
  std::sort(es.begin(), es.end(), [](const E& x, const E& y) { return x.w < y.w; });
  std::vector<std::size_t> up(ids.size());
  for (std::size_t k = 0; k < up.size(); ++k) up[k] = k;
  auto find = [&](std::size_t x) {
    while (up[x] != x) x = up[x] = up[up[x]];
    return x;
  };
  double w = 0.0;
  for (const E& e : es) {
    const auto ra = find(e.a), rb = find(e.b);
    if (ra != rb) {
      up[ra] = rb;
      w += e.w;
    }
  }
  return w;
}

// Pairs of points one unit apart, strung along a gently bending chain with
// steps of about `step`. Dense at the level where a 3 s^i ball reaches the
// neighbouring pairs, sparse below it.
inline dtsp::MetricSpace pair_chain(std::size_t pairs, std::uint64_t seed,
                                    double step = 2.5 * 7776.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> pts;
  double x = 0.0, y = 0.0, heading = u(rng);
  for (std::size_t k = 0; k < pairs; ++k) {
    const double turn = 0.15 * u(rng);
    heading += turn;
    const double len = step * (1.0 + 0.04 * u(rng));
    x += len * std::cos(heading);
    y += len * std::sin(heading);
    const double phi = 3.14159265358979 * u(rng);
    pts.push_back({x + 0.5 * std::cos(phi), y + 0.5 * std::sin(phi)});
    pts.push_back({x - 0.5 * std::cos(phi), y - 0.5 * std::sin(phi)});
  }
  return dtsp::normalize(dtsp::MetricSpace::from_points(std::move(pts))).space;
}

}  // namespace testing
