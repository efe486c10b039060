// tsp: command-line front end for the dtsp library.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "dtsp/errors.hpp"
#include "dtsp/io.hpp"
#include "dtsp/oracles.hpp"

using namespace dtsp;

namespace {

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("out: cannot write '" + path + "'");
  out << text << '\n';
}

InstanceFormat resolve(const std::string& tag, const std::string& path) {
  const InstanceFormat f = parse_format(tag);
  return f == InstanceFormat::Auto ? format_from_path(path) : f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metric TSP toolkit: light-tour DP with dense-region splitting"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "solve an instance and print a JSON report");
  std::string instance, format = "auto", out_path, mode = "solve";
  RunConfig cfg;
  bool no_tours = false;
  run_cmd->add_option("--instance", instance, "instance file")->required();
  run_cmd->add_option("--format", format, "auto | tsplib_euc2d | tsplib_matrix | points_csv | points_json");
  run_cmd->add_option("--mode", mode,
                      "solve | sparse_only | baseline | oracle | partition_stats | lemma_checks");
  run_cmd->add_option("--eps", cfg.solve.eps);
  run_cmd->add_option("--s", cfg.solve.s);
  run_cmd->add_option("--q", cfg.solve.q, "0 picks 64 (s/eps)^2");
  run_cmd->add_option("--delta", cfg.solve.delta);
  run_cmd->add_option("--m-cap", cfg.solve.m_cap);
  run_cmd->add_option("--r", cfg.solve.r);
  run_cmd->add_option("--guesses", cfg.solve.g);
  run_cmd->add_option("--ddim", cfg.solve.ddim, "0 estimates it");
  run_cmd->add_option("--state-budget", cfg.solve.state_budget);
  run_cmd->add_option("--seed", cfg.solve.seed);
  run_cmd->add_option("--out", out_path, "report path (stdout if omitted)");
  run_cmd->add_flag("--no-tours", no_tours, "omit tour sequences from the report");

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "generate an instance");
  GenSpec gen;
  std::vector<std::string> gen_params;
  std::string gen_out, gen_format = "auto";
  gen_cmd->add_option("--kind", gen.kind, "uniform2d | clustered | line | matrix_random_metric");
  gen_cmd->add_option("--n", gen.n)->required();
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--param", gen_params, "key=value, repeatable");
  gen_cmd->add_option("--format", gen_format);
  gen_cmd->add_option("--out", gen_out)->required();

  // validate
  auto* val_cmd = app.add_subcommand("validate", "parse an instance and check the metric axioms");
  std::string val_instance, val_format = "auto";
  val_cmd->add_option("--instance", val_instance)->required();
  val_cmd->add_option("--format", val_format);

  // oracle
  auto* orc_cmd = app.add_subcommand("oracle", "exact or classical reference tour");
  std::string orc_instance, orc_format = "auto", orc_method = "held_karp", orc_out;
  orc_cmd->add_option("--instance", orc_instance)->required();
  orc_cmd->add_option("--format", orc_format);
  orc_cmd->add_option("--method", orc_method,
                      "held_karp | brute | christofides | double_tree | nearest_neighbor");
  orc_cmd->add_option("--out", orc_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      cfg.mode = mode;
      cfg.include_tours = !no_tours;
      cfg.solve.threads = threads_from_env();
      const MetricSpace raw = load_instance(instance, resolve(format, instance));
      emit(dump_report(run(raw, cfg)), out_path);
    } else if (*gen_cmd) {
      for (const std::string& kv : gen_params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("param: expected key=value, got '" + kv + "'");
        gen.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
      }
      const MetricSpace m = generate_instance(gen);
      InstanceFormat f = parse_format(gen_format);
      if (f == InstanceFormat::Auto) f = format_from_path(gen_out);
      if (f == InstanceFormat::Auto)
        f = m.has_coords() ? InstanceFormat::TsplibEuc2d : InstanceFormat::TsplibMatrix;
      save_instance(gen_out, m, f);
    } else if (*val_cmd) {
      const MetricSpace m = load_instance(val_instance, resolve(val_format, val_instance));
      nlohmann::json rep = {{"n", m.size()},
                            {"valid", true},
                            {"kind", m.has_coords() ? "points" : "matrix"},
                            {"hash", instance_hash(m)},
                            {"diameter", m.size() > 1 ? m.diameter() : 0.0},
                            {"min_distance", m.size() > 1 ? m.min_distance() : 0.0}};
      emit(dump_report(rep), "");
    } else if (*orc_cmd) {
      const MetricSpace m = load_instance(orc_instance, resolve(orc_format, orc_instance));
      OracleResult r;
      if (orc_method == "held_karp") r = held_karp_tsp(m);
      else if (orc_method == "brute") r = brute_force_tsp(m);
      else if (orc_method == "christofides") r = christofides(m);
      else if (orc_method == "double_tree") r = double_tree(m);
      else if (orc_method == "nearest_neighbor") r = nearest_neighbor(m);
      else throw ConfigError("method: unknown value '" + orc_method + "'");
      nlohmann::json rep = {{"method", to_string(r.method)},
                            {"exact", r.exact},
                            {"weight", r.weight},
                            {"tour", r.tour.seq},
                            {"n", m.size()}};
      emit(dump_report(rep), orc_out);
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
