#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "dtsp/metric.hpp"
#include "dtsp/nets.hpp"
#include "dtsp/tour.hpp"

namespace dtsp {

/// Truncated exponential on [a, 2a] with rate k = 8 ddim ln2 / a:
///   f(r) = k e^{-k (r - a)} / (1 - 2^{-8 ddim}).
class RadiusDistribution {
 public:
  RadiusDistribution(double a, double ddim);

  double a() const { return a_; }
  double ddim() const { return ddim_; }
  double pdf(double r) const;
  double cdf(double r) const;
  double quantile(double u) const;
  /// Probability mass of [lo, hi] (clipped to the support).
  double mass(double lo, double hi) const;

 private:
  double a_, ddim_, rate_, norm_;
};

/// Inverse-CDF sample driven by rng.
double sample_radius(double a, double ddim, std::mt19937_64& rng);

/// Deterministic uniform in [0, 1) for one radius draw. Every draw is keyed by
/// where it happens, so results do not depend on evaluation order or thread
/// scheduling.
double keyed_uniform(std::uint64_t seed, int level, PointId center,
                     std::uint32_t guess, std::uint32_t attempt);

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Accepts or rejects radius r for the given center.
using RadiusFilter = std::function<bool(PointId center, double r)>;

struct Cluster {
  PointId center = 0;
  double radius = 0.0;
  PointSet members;
};

struct SingleScalePartition {
  int level = 0;
  std::vector<Cluster> clusters;  // in π order (ascending center index)
  std::size_t resamples = 0;      // filter rejections across all centers

  /// Index into clusters of the cluster holding p; clusters.size() if none.
  std::size_t cluster_of(PointId p) const;
};

struct PartitionParams {
  double ddim = 1.0;
  std::uint64_t seed = 0;
  std::uint32_t guess = 0;  // radius-guess index (see solve_with_radius_guessing)
};

/// Carves subset with balls B(u, h_u), u over H_level in ascending order,
/// h_u drawn from RadiusDistribution(s^level, ddim). Centers whose 2 s^level
/// ball holds no unassigned point are skipped (their draw cannot matter).
/// Throws FilterStarvation after 64 max(1, ln n) consecutive rejections.
SingleScalePartition single_scale_partition(const MetricSpace& space,
                                            const NetHierarchy& h,
                                            std::span<const PointId> subset,
                                            int level,
                                            const PartitionParams& params,
                                            const RadiusFilter& filter = {});

/// Radius h_u as drawn for (center, level) under params; attempt counts
/// filter rejections.
double keyed_radius(const NetHierarchy& h, int level, PointId center,
                    const PartitionParams& params, std::uint32_t attempt = 0);

struct ClusterNode {
  int level = 0;
  PointId center = 0;
  double radius = 0.0;
  PointSet members;
  std::vector<std::size_t> children;  // indices into ClusterTree::nodes
};

/// Flat cluster tree; nodes[0] is the root (all points, level L). Leaves are
/// at level 0 and may hold several points (radii at level 0 reach 2).
struct ClusterTree {
  std::vector<ClusterNode> nodes;

  std::size_t max_children() const;
  /// Nodes at a given level, in creation order.
  std::vector<std::size_t> at_level(int level) const;
};

using LevelFilters = std::function<RadiusFilter(int level)>;

ClusterTree hierarchical_clustering(const MetricSpace& space,
                                    const NetHierarchy& h,
                                    const PartitionParams& params,
                                    const LevelFilters& filters = {});

/// Fraction of `trials` independent level-i partitions of {u, v} that
/// separate u and v. threads <= 1 runs sequentially; the result is identical
/// either way.
double estimate_cut_probability(const MetricSpace& space, const NetHierarchy& h,
                                PointId u, PointId v, int level, double ddim,
                                std::size_t trials, std::uint64_t seed,
                                unsigned threads = 0);

/// Radii in [s^j, 2 s^j] around u cutting fewer than
/// 9 q 2^{3 ddim} ddim short tour edges (length <= s^j, an endpoint within
/// 2 s^j of u). An edge is cut when exactly one endpoint lies in B(u, r).
class ValidRadiusSet {
 public:
  ValidRadiusSet(const MetricSpace& space, const NetHierarchy& h, PointId u,
                 int level, const Tour& t, double q, double ddim);

  bool accepts(double r) const { return cut_count(r) < threshold_; }
  std::size_t cut_count(double r) const;
  double threshold() const { return threshold_; }
  std::size_t short_edges() const { return spans_.size(); }
  /// Mass of the rejected radii under RadiusDistribution(s^level, ddim).
  double rejected_mass() const;

 private:
  double lo_, hi_, ddim_, threshold_;
  // (near, far) endpoint distances from u of each short edge
  std::vector<std::pair<double, double>> spans_;
};

/// Per-center ValidRadiusSet filters for one level, built lazily.
RadiusFilter valid_radius_filter(const MetricSpace& space,
                                 const NetHierarchy& h, int level,
                                 const Tour& t, double q, double ddim);

}  // namespace dtsp
