#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dtsp {

using PointId = std::uint32_t;
using PointSet = std::vector<PointId>;

// Relative tolerance used whenever a distance is compared against a radius.
// Boundary ties resolve toward inclusion.
inline constexpr double kRadiusTol = 1e-9;

inline bool within(double d, double radius) {
  return d <= radius * (1.0 + kRadiusTol) + 1e-12;
}

/// Finite metric space backed either by coordinates (Euclidean distance,
/// evaluated on demand) or by an explicit symmetric n x n matrix.
///
/// Distances reported by dist() already include the scale factor applied by
/// normalize(); scale() records that factor so weights can be mapped back to
/// the original units.
class MetricSpace {
 public:
  MetricSpace() = default;

  static MetricSpace from_points(std::vector<std::vector<double>> points);
  static MetricSpace from_matrix(std::vector<std::vector<double>> matrix);

  std::size_t size() const { return n_; }
  bool has_coords() const { return dim_ > 0; }
  std::size_t dim() const { return dim_; }
  std::span<const double> coords(PointId i) const {
    return {coords_.data() + std::size_t(i) * dim_, dim_};
  }
  std::vector<std::vector<double>> points() const;
  std::vector<std::vector<double>> matrix() const;

  double dist(PointId i, PointId j) const {
    if (dim_ == 0) return matrix_[std::size_t(i) * n_ + j] * scale_;
    const double* a = coords_.data() + std::size_t(i) * dim_;
    const double* b = coords_.data() + std::size_t(j) * dim_;
    double acc = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      const double t = a[k] - b[k];
      acc += t * t;
    }
    return std::sqrt(acc) * scale_;
  }

  /// Factor by which raw distances are multiplied.
  double scale() const { return scale_; }

  double diameter() const;
  double min_distance() const;

  /// Restriction to the listed points; index k of the result is ids[k].
  MetricSpace subspace(std::span<const PointId> ids) const;

  PointSet all_points() const;

 private:
  friend struct Normalized normalize(const MetricSpace&, double, bool);

  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<double> matrix_;
  double scale_ = 1.0;
};

struct TripleViolation {
  PointId i, j, k;  // dist(i,j) > dist(i,k) + dist(k,j)
  double slack;     // dist(i,j) - dist(i,k) - dist(k,j) (positive)
};

struct ValidationReport {
  bool pass = true;
  bool exhaustive = true;
  std::vector<std::pair<PointId, PointId>> asymmetric;
  std::vector<PointId> nonzero_diagonal;
  std::vector<std::pair<PointId, PointId>> negative;
  std::vector<TripleViolation> triangle;
};

/// Checks symmetry, zero diagonal, nonnegativity and the triangle
/// inequality. Triples are enumerated exhaustively up to n = 200 and sampled
/// (10 n^2 triples, seeded) beyond that.
ValidationReport validate_metric(const MetricSpace& space,
                                 std::uint64_t seed = 0);

struct Normalized {
  MetricSpace space;
  double factor = 1.0;  // multiplier applied by this call
};

/// Rescales so the minimum interpoint distance is 1. With snap_to_grid (and
/// coordinates present), points are first moved to a grid of pitch
/// eps * diam / n. Throws DegenerateInstance on coincident points.
Normalized normalize(const MetricSpace& space, double eps = 0.04,
                     bool snap_to_grid = false);

PointSet ball(const MetricSpace& space, PointId center, double radius);

/// B(center, r2) \ B(center, r1).
PointSet annulus(const MetricSpace& space, PointId center, double r1,
                 double r2);

PointSet ball_within(const MetricSpace& space, std::span<const PointId> from,
                     PointId center, double radius);

double diameter_of(const MetricSpace& space, std::span<const PointId> ids);
double min_distance_of(const MetricSpace& space, std::span<const PointId> ids);

struct DoublingEstimate {
  std::size_t lambda_upper = 1;
  double ddim_upper = 1.0;
  std::size_t balls_audited = 0;
};

/// Farthest-point greedy cover of sampled balls B(x, R) by balls of radius
/// R/2 centred at points of the set. Returns the largest cover size seen,
/// an upper bound for the audited balls only.
DoublingEstimate estimate_doubling(const MetricSpace& space,
                                   std::size_t audit_balls,
                                   std::uint64_t seed = 0);

/// Greedy R/2-cover centres for B(center, radius); exposed for audits.
PointSet greedy_half_cover(const MetricSpace& space, PointId center,
                           double radius);

}  // namespace dtsp
