#include "dtsp/metric.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <string>

#include "dtsp/errors.hpp"

namespace dtsp {

MetricSpace MetricSpace::from_points(std::vector<std::vector<double>> points) {
  MetricSpace m;
  m.n_ = points.size();
  m.dim_ = points.empty() ? 1 : points.front().size();
  if (m.dim_ == 0) throw ConfigError("points must have at least one coordinate");
  m.coords_.reserve(m.n_ * m.dim_);
  for (const auto& p : points) {
    if (p.size() != m.dim_) throw ConfigError("points have mixed dimension");
    for (double x : p) {
      if (!std::isfinite(x)) throw ConfigError("non-finite coordinate");
      m.coords_.push_back(x);
    }
  }
  return m;
}

MetricSpace MetricSpace::from_matrix(std::vector<std::vector<double>> matrix) {
  MetricSpace m;
  m.n_ = matrix.size();
  m.matrix_.reserve(m.n_ * m.n_);
  for (const auto& row : matrix) {
    if (row.size() != m.n_) throw ConfigError("distance matrix is not square");
    for (double x : row) {
      if (!std::isfinite(x)) throw ConfigError("non-finite distance");
      m.matrix_.push_back(x);
    }
  }
  return m;
}

std::vector<std::vector<double>> MetricSpace::points() const {
  std::vector<std::vector<double>> out;
  if (!has_coords()) return out;
  out.reserve(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    std::vector<double> p(dim_);
    for (std::size_t k = 0; k < dim_; ++k) p[k] = coords_[i * dim_ + k] * scale_;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::vector<double>> MetricSpace::matrix() const {
  std::vector<std::vector<double>> out(n_, std::vector<double>(n_));
  for (PointId i = 0; i < n_; ++i)
    for (PointId j = 0; j < n_; ++j) out[i][j] = dist(i, j);
  return out;
}

double MetricSpace::diameter() const {
  double best = 0.0;
  for (PointId i = 0; i < n_; ++i)
    for (PointId j = i + 1; j < n_; ++j) best = std::max(best, dist(i, j));
  return best;
}

double MetricSpace::min_distance() const {
  double best = std::numeric_limits<double>::infinity();
  for (PointId i = 0; i < n_; ++i)
    for (PointId j = i + 1; j < n_; ++j) best = std::min(best, dist(i, j));
  return best;
}

MetricSpace MetricSpace::subspace(std::span<const PointId> ids) const {
  MetricSpace m;
  m.n_ = ids.size();
  m.dim_ = dim_;
  m.scale_ = scale_;
  if (dim_ > 0) {
    m.coords_.reserve(m.n_ * dim_);
    for (PointId id : ids)
      for (std::size_t k = 0; k < dim_; ++k)
        m.coords_.push_back(coords_[std::size_t(id) * dim_ + k]);
  } else {
    m.matrix_.reserve(m.n_ * m.n_);
    for (PointId a : ids)
      for (PointId b : ids) m.matrix_.push_back(matrix_[std::size_t(a) * n_ + b]);
  }
  return m;
}

PointSet MetricSpace::all_points() const {
  PointSet out(n_);
  for (PointId i = 0; i < n_; ++i) out[i] = i;
  return out;
}

ValidationReport validate_metric(const MetricSpace& space, std::uint64_t seed) {
  ValidationReport rep;
  const auto n = static_cast<PointId>(space.size());
  for (PointId i = 0; i < n; ++i) {
    if (space.dist(i, i) != 0.0) rep.nonzero_diagonal.push_back(i);
    for (PointId j = i + 1; j < n; ++j) {
      const double a = space.dist(i, j), b = space.dist(j, i);
      if (a < 0.0 || b < 0.0) rep.negative.emplace_back(i, j);
      if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
        rep.asymmetric.emplace_back(i, j);
    }
  }
  auto check = [&](PointId i, PointId j, PointId k) {
    const double direct = space.dist(i, j);
    const double via = space.dist(i, k) + space.dist(k, j);
    if (direct > via * (1.0 + kRadiusTol) + 1e-12)
      rep.triangle.push_back({i, j, k, direct - via});
  };
  if (n <= 200) {
    for (PointId i = 0; i < n; ++i)
      for (PointId j = i + 1; j < n; ++j)
        for (PointId k = 0; k < n; ++k)
          if (k != i && k != j) check(i, j, k);
  } else {
    rep.exhaustive = false;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<PointId> pick(0, n - 1);
    const std::size_t samples = 10 * std::size_t(n) * n;
    for (std::size_t t = 0; t < samples; ++t) check(pick(rng), pick(rng), pick(rng));
  }
  rep.pass = rep.nonzero_diagonal.empty() && rep.negative.empty() &&
             rep.asymmetric.empty() && rep.triangle.empty();
  return rep;
}

Normalized normalize(const MetricSpace& space, double eps, bool snap_to_grid) {
  const auto n = static_cast<PointId>(space.size());
  if (n < 2) throw DegenerateInstance("normalize needs at least two points");
  MetricSpace out = space;
  if (snap_to_grid && out.has_coords()) {
    const double pitch_raw = eps * out.diameter() / double(n) / out.scale_;
    if (pitch_raw > 0.0)
      for (double& x : out.coords_) x = std::round(x / pitch_raw) * pitch_raw;
  }
  for (PointId i = 0; i < n; ++i)
    for (PointId j = i + 1; j < n; ++j)
      if (out.dist(i, j) == 0.0)
        throw DegenerateInstance("points " + std::to_string(i) + " and " +
                                 std::to_string(j) +
                                 " coincide; deduplicate the instance first");
  const double md = out.min_distance();
  if (!std::isfinite(md)) throw DegenerateInstance("non-finite distances");
  const double factor = 1.0 / md;
  out.scale_ *= factor;
  return {std::move(out), factor};
}

PointSet ball(const MetricSpace& space, PointId center, double radius) {
  PointSet out;
  for (PointId p = 0; p < space.size(); ++p)
    if (p == center || within(space.dist(center, p), radius)) out.push_back(p);
  return out;
}

PointSet annulus(const MetricSpace& space, PointId center, double r1,
                 double r2) {
  PointSet out;
  for (PointId p = 0; p < space.size(); ++p) {
    const double d = space.dist(center, p);
    if (within(d, r2) && !within(d, r1)) out.push_back(p);
  }
  return out;
}

PointSet ball_within(const MetricSpace& space, std::span<const PointId> from,
                     PointId center, double radius) {
  PointSet out;
  for (PointId p : from)
    if (p == center || within(space.dist(center, p), radius)) out.push_back(p);
  return out;
}

double diameter_of(const MetricSpace& space, std::span<const PointId> ids) {
  double best = 0.0;
  for (std::size_t a = 0; a < ids.size(); ++a)
    for (std::size_t b = a + 1; b < ids.size(); ++b)
      best = std::max(best, space.dist(ids[a], ids[b]));
  return best;
}

double min_distance_of(const MetricSpace& space, std::span<const PointId> ids) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < ids.size(); ++a)
    for (std::size_t b = a + 1; b < ids.size(); ++b)
      best = std::min(best, space.dist(ids[a], ids[b]));
  return best;
}

PointSet greedy_half_cover(const MetricSpace& space, PointId center,
                           double radius) {
  const PointSet members = ball(space, center, radius);
  const double half = radius / 2.0;
  PointSet centres{center};
  std::vector<double> gap(members.size());
  for (std::size_t k = 0; k < members.size(); ++k)
    gap[k] = space.dist(center, members[k]);
  for (;;) {
    std::size_t far = 0;
    for (std::size_t k = 1; k < members.size(); ++k)
      if (gap[k] > gap[far]) far = k;
    if (members.empty() || within(gap[far], half)) break;
    const PointId c = members[far];
    centres.push_back(c);
    for (std::size_t k = 0; k < members.size(); ++k)
      gap[k] = std::min(gap[k], space.dist(c, members[k]));
  }
  return centres;
}

DoublingEstimate estimate_doubling(const MetricSpace& space,
                                   std::size_t audit_balls, std::uint64_t seed) {
  DoublingEstimate est;
  const auto n = static_cast<PointId>(space.size());
  if (n < 2) return est;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<PointId> pick(0, n - 1);
  for (std::size_t t = 0; t < audit_balls; ++t) {
    const PointId c = pick(rng);
    PointId other = pick(rng);
    if (other == c) other = (c + 1) % n;
    // Radii are interpoint distances, so every audited ball is "tight".
    const double radius = space.dist(c, other);
    if (radius <= 0.0) continue;
    est.lambda_upper =
        std::max(est.lambda_upper, greedy_half_cover(space, c, radius).size());
    ++est.balls_audited;
  }
  est.ddim_upper = std::max(1.0, std::log2(double(est.lambda_upper)));
  return est;
}

}  // namespace dtsp
