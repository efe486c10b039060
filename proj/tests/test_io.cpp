#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "dtsp/errors.hpp"
#include "dtsp/io.hpp"
#include "dtsp/oracles.hpp"
#include "dtsp/sparse_dense.hpp"

using namespace dtsp;
using nlohmann::json;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("dtsp_io_" + name)).string();
}

double seq_weight(const MetricSpace& m, const json& tour) {
  const auto seq = tour.get<std::vector<PointId>>();
  double w = 0;
  for (std::size_t k = 0; k < seq.size(); ++k) w += m.dist(seq[k], seq[(k + 1) % seq.size()]);
  return w;
}

}  // namespace

TEST_CASE("TSPLIB coordinates") {
  const std::string text =
      "NAME : tri\nTYPE : TSP\nCOMMENT : three points\nDIMENSION : 3\n"
      "EDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 0 1\n3 1 0\nEOF\n";
  const auto m = parse_instance(text, InstanceFormat::TsplibEuc2d);
  CHECK(m.size() == 3);
  CHECK(m.dist(1, 2) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(parse_instance(text, InstanceFormat::TsplibMatrix), ParseError);

  const std::string bad =
      "NAME: x\nTYPE: TSP\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 0 zz\n";
  try {
    parse_instance(bad, InstanceFormat::Auto);
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 7);
    CHECK(e.column() == 5);
  }
  CHECK_THROWS_AS(parse_instance("NAME: x\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: GEO\n",
                                 InstanceFormat::Auto),
                  ParseError);

  const std::string dup =
      "DIMENSION: 2\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 3 4\n2 3 4\nEOF\n";
  CHECK_THROWS_AS(parse_instance(dup, InstanceFormat::Auto), DegenerateInstance);
}

TEST_CASE("TSPLIB matrix") {
  const std::string ok =
      "NAME: m\nTYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EXPLICIT\n"
      "EDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n0 2 3\n2 0 4\n3 4 0\nEOF\n";
  const auto m = parse_instance(ok, InstanceFormat::TsplibMatrix);
  CHECK(m.dist(1, 2) == 4.0);

  const std::string broken =
      "DIMENSION: 3\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\n"
      "EDGE_WEIGHT_SECTION\n0 1 9\n1 0 1\n9 1 0\nEOF\n";
  try {
    parse_instance(broken, InstanceFormat::Auto);
    FAIL("no error");
  } catch (const TriangleViolation& e) {
    const std::string msg = e.what();
    CHECK(msg.find("(0, 2, 1)") != std::string::npos);
  }
  const std::string shortm =
      "DIMENSION: 2\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\n"
      "EDGE_WEIGHT_SECTION\n0 1\n1\nEOF\n";
  CHECK_THROWS_AS(parse_instance(shortm, InstanceFormat::Auto), ParseError);
}

TEST_CASE("CSV and JSON") {
  const auto m = parse_instance("x,y\n0,0\n3,4\n# note\n\n6,0\n", InstanceFormat::PointsCsv);
  CHECK(m.size() == 3);
  CHECK(m.dist(0, 1) == 5.0);
  try {
    parse_instance("0,0\n1,2,3\n", InstanceFormat::PointsCsv);
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }

  const auto j = parse_instance(R"({"points": [[0,0],[0,2]]})", InstanceFormat::PointsJson);
  CHECK(j.dist(0, 1) == 2.0);
  const auto jm = parse_instance(R"({"matrix": [[0,5],[5,0]]})", InstanceFormat::PointsJson);
  CHECK(jm.dist(0, 1) == 5.0);
  try {
    parse_instance("{\"points\": [[0,0],\n [1,]]}", InstanceFormat::PointsJson);
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_instance(R"({"points": [[0,0],[0,0]]})", InstanceFormat::PointsJson),
                  DegenerateInstance);
}

TEST_CASE("round trips are bit-identical") {
  const auto m = generate_instance({"uniform2d", 100, 11, {}});
  for (InstanceFormat f : {InstanceFormat::PointsCsv, InstanceFormat::PointsJson,
                           InstanceFormat::TsplibEuc2d}) {
    const std::string path = temp_path("rt" + to_string(f));
    save_instance(path, m, f);
    const auto back = load_instance(path, f);
    CHECK(back.points() == m.points());
    CHECK(instance_hash(back) == instance_hash(m));
    std::filesystem::remove(path);
  }
  const auto mm = generate_instance({"matrix_random_metric", 12, 4, {}});
  for (InstanceFormat f : {InstanceFormat::TsplibMatrix, InstanceFormat::PointsJson}) {
    const auto back = parse_instance(format_instance(mm, f), f);
    CHECK(back.matrix() == mm.matrix());
  }
}

TEST_CASE("generators") {
  const auto l = generate_instance({"line", 5, 0, {}});
  for (PointId k = 0; k < 5; ++k) CHECK(l.dist(0, k) == double(k));

  const auto u = generate_instance({"uniform2d", 50, 7, {}});
  CHECK(u.size() == 50);
  CHECK(validate_metric(u).pass);
  CHECK(instance_hash(u) == instance_hash(generate_instance({"uniform2d", 50, 7, {}})));
  CHECK(instance_hash(u) != instance_hash(generate_instance({"uniform2d", 50, 8, {}})));

  const auto r = generate_instance({"matrix_random_metric", 20, 3, {}});
  CHECK_FALSE(r.has_coords());
  CHECK(validate_metric(r).pass);

  const auto c = generate_instance({"clustered", 40, 5, {{"groups", 2}}});
  const auto cn = normalize(c).space;
  const auto h = build_hierarchy(cn, 6);
  CHECK(find_dense_region(cn, h, 1.0).has_value());
  CHECK_FALSE(find_dense_region(cn, h, 1e9).has_value());

  CHECK_THROWS_AS(generate_instance({"spiral", 5, 0, {}}), ConfigError);
}

TEST_CASE("run reports") {
  const auto five = generate_instance({"uniform2d", 5, 1, {}});
  RunConfig cfg;
  cfg.mode = "oracle";
  const json o = run(five, cfg);
  CHECK(o["results"]["held_karp"]["exact"] == true);
  const double scale = o["instance"]["normalization_factor"].get<double>();
  CHECK(o["results"]["held_karp"]["weight_original"].get<double>() ==
        doctest::Approx(brute_force_tsp(five).weight));
  CHECK(o["results"]["held_karp"]["weight"].get<double>() ==
        doctest::Approx(brute_force_tsp(five).weight * scale));

  const auto m = generate_instance({"uniform2d", 14, 42, {}});
  for (const char* mode : {"solve", "sparse_only", "baseline"}) {
    cfg.mode = mode;
    cfg.solve.seed = 42;
    const json a = run(m, cfg), b = run(m, cfg);
    CAPTURE(mode);
    CHECK(dump_report(strip_timing(a)) == dump_report(strip_timing(b)));
    CHECK(a.contains("timing"));
    for (const auto& [name, r] : a["results"].items()) {
      // Tours re-evaluate to the reported weights on the raw instance.
      CHECK(seq_weight(m, r["tour"]) == doctest::Approx(r["weight_original"].get<double>()));
      for (const auto& [bound, value] : a["lower_bounds"].items())
        CHECK(a["ratios"][name][bound].get<double>() ==
              doctest::Approx(r["weight"].get<double>() / value.get<double>()));
      CHECK(r["weight"].get<double>() >=
            a["lower_bounds"]["optimum"].get<double>() * (1 - 1e-9));
    }
  }

  cfg.mode = "lemma_checks";
  const json lc = run(generate_instance({"uniform2d", 30, 3, {}}), cfg);
  CHECK(lc["all_pass"] == true);
  CHECK(lc["checks"]["patching"]["pass"] == true);

  cfg.mode = "partition_stats";
  const json ps = run(generate_instance({"uniform2d", 40, 3, {}}), cfg);
  CHECK(ps["clusters"].size() == ps["nets"]["levels"].size());
  cfg.solve.threads = 4;
  CHECK(dump_report(strip_timing(run(generate_instance({"uniform2d", 40, 3, {}}), cfg))) ==
        dump_report(strip_timing(ps)));
  cfg.solve.threads = 0;

  cfg.mode = "plot";
  try {
    run(m, cfg);
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("mode") != std::string::npos);
  }
  cfg.mode = "solve";
  cfg.solve.eps = 0.5;
  try {
    run(m, cfg);
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("eps") != std::string::npos);
  }
}

TEST_CASE("report formatting") {
  const json j = {{"b", 1.23456789012345}, {"a", 2}, {"c", {{"z", 1.0 / 3}}}};
  const std::string s = dump_report(j, -1);
  CHECK(s == R"({"a":2,"b":1.23456789012,"c":{"z":0.333333333333}})");
  CHECK(strip_timing({{"timing", 1}, {"x", 2}}) == json{{"x", 2}});

  ::setenv("TSP_THREADS", "4", 1);
  CHECK(threads_from_env() == 4);
  ::setenv("TSP_THREADS", "four", 1);
  CHECK(threads_from_env() == 0);
  ::unsetenv("TSP_THREADS");
  CHECK(threads_from_env() == 0);
}
