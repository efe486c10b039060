#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

#include "dtsp/metric.hpp"
#include "dtsp/sparse_dense.hpp"

namespace dtsp {

enum class InstanceFormat { Auto, TsplibEuc2d, TsplibMatrix, PointsCsv, PointsJson };

InstanceFormat parse_format(const std::string& tag);
std::string to_string(InstanceFormat f);
/// Picks a format from the file extension (.tsp, .csv, .json).
InstanceFormat format_from_path(const std::string& path);

/// Parses and validates an instance. Coincident points raise
/// DegenerateInstance; matrices failing the triangle inequality raise
/// TriangleViolation naming the triple. Syntax errors raise ParseError.
MetricSpace parse_instance(const std::string& text, InstanceFormat format);
MetricSpace load_instance(const std::string& path,
                          InstanceFormat format = InstanceFormat::Auto);

/// Writes with 17 significant digits so a reload is bit-identical.
std::string format_instance(const MetricSpace& space, InstanceFormat format,
                            const std::string& name = "instance");
void save_instance(const std::string& path, const MetricSpace& space,
                   InstanceFormat format = InstanceFormat::Auto);

struct GenSpec {
  std::string kind = "uniform2d";  // uniform2d | clustered | line | matrix_random_metric
  std::size_t n = 10;
  std::uint64_t seed = 0;
  std::map<std::string, double> params;
};

/// Deterministic generators.
///   uniform2d: side (1000)
///   clustered: groups (2), group_radius (1), spacing (1000), bend (0.15),
///     jitter (0.04); each group is spread evenly on a circle of
///     group_radius, group centres follow a gently turning path
///   line: spacing (1)
///   matrix_random_metric: lo (1), hi (10); shortest-path closure of
///     uniform random weights
MetricSpace generate_instance(const GenSpec& spec);

/// FNV-1a over the size, kind and raw coordinates or matrix entries.
std::string instance_hash(const MetricSpace& space);

struct RunConfig {
  std::string mode = "solve";  // solve | sparse_only | baseline | oracle | partition_stats | lemma_checks
  SolveParams solve;
  bool include_tours = true;

  /// Throws ConfigError naming the field.
  void validate() const;
};

/// Runs one pipeline on a raw (unnormalized) instance. Weights are computed
/// on the normalized copy; "weight_original" maps them back. Every run-time
/// measurement sits under the "timing" key.
nlohmann::json run(const MetricSpace& raw, const RunConfig& config);

/// Sorted keys, numbers rounded to 12 significant digits.
std::string dump_report(const nlohmann::json& report, int indent = 2);

/// The report without its "timing" subtree.
nlohmann::json strip_timing(nlohmann::json report);

/// Worker count from TSP_THREADS (unset or invalid -> 0).
unsigned threads_from_env();

}  // namespace dtsp
