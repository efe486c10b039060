#pragma once

#include <span>
#include <string>

#include "dtsp/metric.hpp"
#include "dtsp/tour.hpp"

namespace dtsp {

enum class OracleMethod { Brute, HeldKarp, Christofides, DoubleTree, NearestNeighbor };

std::string to_string(OracleMethod m);

struct OracleResult {
  Tour tour;
  double weight = 0.0;
  OracleMethod method = OracleMethod::Brute;
  bool exact = false;
  /// Christofides only: true when the odd-vertex matching was exact.
  bool exact_matching = false;
};

inline constexpr std::size_t kBruteMax = 10;
inline constexpr std::size_t kHeldKarpMax = 18;
inline constexpr std::size_t kMatchingBruteMax = 12;
inline constexpr std::size_t kMatchingDpMax = 16;

/// Enumerates all tours through point 0; throws TooLarge above max_n.
OracleResult brute_force_tsp(const MetricSpace& space,
                             std::size_t max_n = kBruteMax);

/// Subset DP; throws TooLarge above max_n.
OracleResult held_karp_tsp(const MetricSpace& space,
                           std::size_t max_n = kHeldKarpMax);

OracleResult christofides(const MetricSpace& space,
                          std::size_t exact_matching_max = kMatchingDpMax);

OracleResult double_tree(const MetricSpace& space);

/// Greedy nearest neighbour from point 0, ties to the lowest index.
OracleResult nearest_neighbor(const MetricSpace& space);

struct Matching {
  EdgeSet pairs;
  double weight = 0.0;
};

/// Exact minimum perfect matching by recursion over pairings.
Matching brute_force_matching(const MetricSpace& space,
                              std::span<const PointId> vertices,
                              std::size_t max_n = kMatchingBruteMax);

/// Exact minimum perfect matching by subset DP (the vertex count is bounded
/// by the caller; 2^k states).
Matching dp_matching(const MetricSpace& space, std::span<const PointId> vertices);

}  // namespace dtsp
