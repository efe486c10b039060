#include "dtsp/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "dtsp/errors.hpp"
#include "dtsp/light_dp.hpp"
#include "dtsp/nets.hpp"
#include "dtsp/oracles.hpp"
#include "dtsp/partition.hpp"
#include "dtsp/tour.hpp"

namespace dtsp {

using nlohmann::json;

InstanceFormat parse_format(const std::string& tag) {
  if (tag == "auto") return InstanceFormat::Auto;
  if (tag == "tsplib_euc2d") return InstanceFormat::TsplibEuc2d;
  if (tag == "tsplib_matrix") return InstanceFormat::TsplibMatrix;
  if (tag == "points_csv") return InstanceFormat::PointsCsv;
  if (tag == "points_json") return InstanceFormat::PointsJson;
  throw ConfigError("format: unknown value '" + tag + "'");
}

std::string to_string(InstanceFormat f) {
  switch (f) {
    case InstanceFormat::Auto: return "auto";
    case InstanceFormat::TsplibEuc2d: return "tsplib_euc2d";
    case InstanceFormat::TsplibMatrix: return "tsplib_matrix";
    case InstanceFormat::PointsCsv: return "points_csv";
    case InstanceFormat::PointsJson: return "points_json";
  }
  return "auto";
}

InstanceFormat format_from_path(const std::string& path) {
  auto ends = [&](const std::string& ext) {
    return path.size() >= ext.size() &&
           path.compare(path.size() - ext.size(), ext.size(), ext) == 0;
  };
  if (ends(".csv")) return InstanceFormat::PointsCsv;
  if (ends(".json")) return InstanceFormat::PointsJson;
  if (ends(".tsp")) return InstanceFormat::Auto;  // type decided by the header
  throw ConfigError("format: cannot infer from '" + path + "'");
}

namespace {

// ---- text scanning ----------------------------------------------------------

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> split_tokens(std::string_view line, char sep = 0) {
  std::vector<Token> out;
  std::size_t k = 0;
  auto is_sep = [&](char c) {
    return sep ? c == sep : std::isspace(static_cast<unsigned char>(c)) != 0;
  };
  if (sep) {
    std::size_t start = 0;
    for (k = 0; k <= line.size(); ++k)
      if (k == line.size() || line[k] == sep) {
        std::size_t a = start, b = k;
        while (a < b && std::isspace(static_cast<unsigned char>(line[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(line[b - 1]))) --b;
        out.push_back({line.substr(a, b - a), a + 1});
        start = k + 1;
      }
    return out;
  }
  while (k < line.size()) {
    while (k < line.size() && is_sep(line[k])) ++k;
    if (k >= line.size()) break;
    const std::size_t start = k;
    while (k < line.size() && !is_sep(line[k])) ++k;
    out.push_back({line.substr(start, k - start), start + 1});
  }
  return out;
}

double to_number(const Token& t, std::size_t line) {
  double v = 0.0;
  const char* b = t.text.data();
  const char* e = b + t.text.size();
  if (!t.text.empty() && *b == '+') ++b;
  const auto [p, ec] = std::from_chars(b, e, v);
  if (t.text.empty() || ec != std::errc() || p != e || !std::isfinite(v))
    throw ParseError("expected a number, got '" + std::string(t.text) + "'", line,
                     t.column);
  return v;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string upper(std::string s) {
  for (char& c : s) c = char(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// ---- validation ---------------------------------------------------------------

void check_instance(const MetricSpace& space) {
  const std::size_t n = space.size();
  if (n == 0) throw DegenerateInstance("instance has no points");
  if (space.has_coords()) {
    for (PointId i = 0; i < n; ++i)
      for (PointId j = i + 1; j < n; ++j)
        if (space.dist(i, j) == 0.0)
          throw DegenerateInstance("points " + std::to_string(i) + " and " +
                                   std::to_string(j) + " coincide");
    return;
  }
  const ValidationReport rep = validate_metric(space);
  if (!rep.asymmetric.empty())
    throw DegenerateInstance(
        "matrix is not symmetric at (" + std::to_string(rep.asymmetric[0].first) +
        ", " + std::to_string(rep.asymmetric[0].second) + ")");
  if (!rep.nonzero_diagonal.empty())
    throw DegenerateInstance("nonzero diagonal entry at " +
                             std::to_string(rep.nonzero_diagonal[0]));
  if (!rep.negative.empty())
    throw DegenerateInstance(
        "negative distance at (" + std::to_string(rep.negative[0].first) + ", " +
        std::to_string(rep.negative[0].second) + ")");
  for (PointId i = 0; i < n; ++i)
    for (PointId j = i + 1; j < n; ++j)
      if (space.dist(i, j) == 0.0)
        throw DegenerateInstance("points " + std::to_string(i) + " and " +
                                 std::to_string(j) + " coincide");
  if (!rep.triangle.empty()) {
    const auto& t = rep.triangle[0];
    throw TriangleViolation("triangle inequality fails for (" + std::to_string(t.i) +
                            ", " + std::to_string(t.j) + ", " + std::to_string(t.k) +
                            "): d(i,j) exceeds d(i,k) + d(k,j) by " +
                            std::to_string(t.slack));
  }
}

// ---- formats --------------------------------------------------------------------

MetricSpace parse_tsplib(const std::string& text, InstanceFormat expect) {
  const auto lines = lines_of(text);
  std::size_t dimension = 0;
  std::string weight_type, weight_format;
  std::vector<std::vector<double>> coords;
  std::vector<double> weights;
  bool have_coords = false, have_weights = false;

  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::string line = trim(lines[ln]);
    const std::size_t lineno = ln + 1;
    if (line.empty()) continue;
    const std::string head = upper(line);
    if (head == "EOF") break;

    if (head.rfind("NODE_COORD_SECTION", 0) == 0) {
      if (dimension == 0) throw ParseError("DIMENSION must precede NODE_COORD_SECTION", lineno, 1);
      coords.assign(dimension, {});
      std::vector<bool> seen(dimension, false);
      for (std::size_t k = 0; k < dimension; ++k) {
        if (++ln >= lines.size())
          throw ParseError("NODE_COORD_SECTION ended early", lineno + k + 1, 1);
        const auto toks = split_tokens(lines[ln]);
        if (toks.size() != 3)
          throw ParseError("expected 'id x y'", ln + 1, toks.empty() ? 1 : toks[0].column);
        const double id = to_number(toks[0], ln + 1);
        if (id < 1 || id > double(dimension) || id != std::floor(id) || seen[std::size_t(id) - 1])
          throw ParseError("bad node id '" + std::string(toks[0].text) + "'", ln + 1,
                           toks[0].column);
        seen[std::size_t(id) - 1] = true;
        coords[std::size_t(id) - 1] = {to_number(toks[1], ln + 1), to_number(toks[2], ln + 1)};
      }
      have_coords = true;
      continue;
    }
    if (head.rfind("EDGE_WEIGHT_SECTION", 0) == 0) {
      if (dimension == 0) throw ParseError("DIMENSION must precede EDGE_WEIGHT_SECTION", lineno, 1);
      const std::size_t want = dimension * dimension;
      while (weights.size() < want) {
        if (++ln >= lines.size())
          throw ParseError("EDGE_WEIGHT_SECTION ended early", ln + 1, 1);
        for (const Token& t : split_tokens(lines[ln])) {
          if (upper(std::string(t.text)) == "EOF")
            throw ParseError("EDGE_WEIGHT_SECTION ended early", ln + 1, t.column);
          if (weights.size() == want)
            throw ParseError("too many weights", ln + 1, t.column);
          weights.push_back(to_number(t, ln + 1));
        }
      }
      have_weights = true;
      continue;
    }

    const auto colon = line.find(':');
    const std::string key = upper(trim(line.substr(0, colon == std::string::npos ? line.size() : colon)));
    const std::string value = colon == std::string::npos ? "" : trim(line.substr(colon + 1));
    const std::size_t vcol = colon == std::string::npos ? 1 : colon + 2;
    if (key == "NAME" || key == "COMMENT") continue;
    if (key == "TYPE") {
      if (upper(value) != "TSP") throw ParseError("only TYPE: TSP is supported", lineno, vcol);
    } else if (key == "DIMENSION") {
      const double d = to_number({value, vcol}, lineno);
      if (d < 1 || d != std::floor(d)) throw ParseError("bad DIMENSION", lineno, vcol);
      dimension = std::size_t(d);
    } else if (key == "EDGE_WEIGHT_TYPE") {
      weight_type = upper(value);
      if (weight_type != "EUC_2D" && weight_type != "EXPLICIT")
        throw ParseError("unsupported EDGE_WEIGHT_TYPE '" + value + "'", lineno, vcol);
    } else if (key == "EDGE_WEIGHT_FORMAT") {
      weight_format = upper(value);
      if (weight_format != "FULL_MATRIX")
        throw ParseError("unsupported EDGE_WEIGHT_FORMAT '" + value + "'", lineno, vcol);
    } else {
      throw ParseError("unknown keyword '" + key + "'", lineno, 1);
    }
  }

  if (weight_type.empty()) throw ParseError("missing EDGE_WEIGHT_TYPE", lines.size(), 1);
  if (weight_type == "EUC_2D") {
    if (expect == InstanceFormat::TsplibMatrix)
      throw ParseError("expected EDGE_WEIGHT_TYPE: EXPLICIT", 1, 1);
    if (!have_coords) throw ParseError("missing NODE_COORD_SECTION", lines.size(), 1);
    return MetricSpace::from_points(std::move(coords));
  }
  if (expect == InstanceFormat::TsplibEuc2d)
    throw ParseError("expected EDGE_WEIGHT_TYPE: EUC_2D", 1, 1);
  if (weight_format.empty()) throw ParseError("missing EDGE_WEIGHT_FORMAT", lines.size(), 1);
  if (!have_weights) throw ParseError("missing EDGE_WEIGHT_SECTION", lines.size(), 1);
  std::vector<std::vector<double>> mat(dimension, std::vector<double>(dimension));
  for (std::size_t i = 0; i < dimension; ++i)
    for (std::size_t j = 0; j < dimension; ++j) mat[i][j] = weights[i * dimension + j];
  return MetricSpace::from_matrix(std::move(mat));
}

MetricSpace parse_csv(const std::string& text) {
  const auto lines = lines_of(text);
  std::vector<std::vector<double>> pts;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::string line = trim(lines[ln]);
    if (line.empty() || line[0] == '#') continue;
    const auto toks = split_tokens(lines[ln], ',');
    if (toks.size() != 2)
      throw ParseError("expected 'x,y'", ln + 1, 1);
    if (pts.empty() && ln == 0 &&
        std::any_of(line.begin(), line.end(),
                    [](char c) { return std::isalpha(static_cast<unsigned char>(c)) && c != 'e' && c != 'E'; }))
      continue;  // header row
    pts.push_back({to_number(toks[0], ln + 1), to_number(toks[1], ln + 1)});
  }
  return MetricSpace::from_points(std::move(pts));
}

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

MetricSpace parse_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [l, c] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError("malformed JSON", l, c);
  }
  auto rows = [&](const char* key) {
    std::vector<std::vector<double>> out;
    const json& arr = doc.at(key);
    if (!arr.is_array()) throw ParseError(std::string(key) + " must be an array", 1, 1);
    for (std::size_t r = 0; r < arr.size(); ++r) {
      if (!arr[r].is_array())
        throw ParseError(std::string(key) + "[" + std::to_string(r) + "] must be an array", 1, 1);
      std::vector<double> row;
      for (const auto& v : arr[r]) {
        if (!v.is_number())
          throw ParseError(std::string(key) + "[" + std::to_string(r) + "] holds a non-number", 1, 1);
        row.push_back(v.get<double>());
      }
      out.push_back(std::move(row));
    }
    return out;
  };
  if (!doc.is_object()) throw ParseError("expected an object", 1, 1);
  if (doc.contains("points")) {
    auto pts = rows("points");
    for (std::size_t r = 0; r < pts.size(); ++r)
      if (pts[r].size() != 2)
        throw ParseError("points[" + std::to_string(r) + "] must have two coordinates", 1, 1);
    return MetricSpace::from_points(std::move(pts));
  }
  if (doc.contains("matrix")) {
    auto mat = rows("matrix");
    for (std::size_t r = 0; r < mat.size(); ++r)
      if (mat[r].size() != mat.size())
        throw ParseError("matrix row " + std::to_string(r) + " has the wrong length", 1, 1);
    return MetricSpace::from_matrix(std::move(mat));
  }
  throw ParseError("expected a 'points' or 'matrix' member", 1, 1);
}

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::vector<std::vector<double>> planar(const MetricSpace& space) {
  if (!space.has_coords() || space.dim() > 2)
    throw ConfigError("format: needs planar coordinates");
  auto pts = space.points();
  for (auto& p : pts) p.resize(2, 0.0);
  return pts;
}

}  // namespace

MetricSpace parse_instance(const std::string& text, InstanceFormat format) {
  MetricSpace out;
  switch (format) {
    case InstanceFormat::Auto:
    case InstanceFormat::TsplibEuc2d:
    case InstanceFormat::TsplibMatrix:
      out = parse_tsplib(text, format);
      break;
    case InstanceFormat::PointsCsv:
      out = parse_csv(text);
      break;
    case InstanceFormat::PointsJson:
      out = parse_json(text);
      break;
  }
  check_instance(out);
  return out;
}

MetricSpace load_instance(const std::string& path, InstanceFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("instance: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  if (format == InstanceFormat::Auto) format = format_from_path(path);
  return parse_instance(buf.str(), format);
}

std::string format_instance(const MetricSpace& space, InstanceFormat format,
                            const std::string& name) {
  std::ostringstream out;
  switch (format) {
    case InstanceFormat::Auto:
    case InstanceFormat::TsplibEuc2d: {
      if (format == InstanceFormat::Auto && !space.has_coords())
        return format_instance(space, InstanceFormat::TsplibMatrix, name);
      const auto pts = planar(space);
      out << "NAME : " << name << "\nTYPE : TSP\nDIMENSION : " << pts.size()
          << "\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n";
      for (std::size_t k = 0; k < pts.size(); ++k)
        out << k + 1 << ' ' << num(pts[k][0]) << ' ' << num(pts[k][1]) << '\n';
      out << "EOF\n";
      break;
    }
    case InstanceFormat::TsplibMatrix: {
      const auto mat = space.matrix();
      out << "NAME : " << name << "\nTYPE : TSP\nDIMENSION : " << mat.size()
          << "\nEDGE_WEIGHT_TYPE : EXPLICIT\nEDGE_WEIGHT_FORMAT : FULL_MATRIX\n"
             "EDGE_WEIGHT_SECTION\n";
      for (const auto& row : mat) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << num(row[j]);
        out << '\n';
      }
      out << "EOF\n";
      break;
    }
    case InstanceFormat::PointsCsv:
      for (const auto& p : planar(space)) out << num(p[0]) << ',' << num(p[1]) << '\n';
      break;
    case InstanceFormat::PointsJson: {
      json doc;
      if (space.has_coords())
        doc["points"] = planar(space);
      else
        doc["matrix"] = space.matrix();
      out << doc.dump() << '\n';
      break;
    }
  }
  return out.str();
}

void save_instance(const std::string& path, const MetricSpace& space,
                   InstanceFormat format) {
  if (format == InstanceFormat::Auto) format = format_from_path(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("out: cannot write '" + path + "'");
  out << format_instance(space, format);
}

// ---- generators -------------------------------------------------------------------

MetricSpace generate_instance(const GenSpec& spec) {
  if (spec.n < 1) throw ConfigError("n: must be at least 1");
  auto param = [&](const std::string& key, double fallback) {
    const auto it = spec.params.find(key);
    return it == spec.params.end() ? fallback : it->second;
  };
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double pi = std::acos(-1.0);

  if (spec.kind == "uniform2d") {
    const double side = param("side", 1000.0);
    std::vector<std::vector<double>> pts(spec.n);
    for (auto& p : pts) {
      const double x = side * unit(rng);
      p = {x, side * unit(rng)};
    }
    return MetricSpace::from_points(std::move(pts));
  }
  if (spec.kind == "clustered") {
    const std::size_t groups =
        std::clamp<std::size_t>(std::size_t(param("groups", 2)), 1, spec.n);
    const double radius = param("group_radius", 1.0);
    const double spacing = param("spacing", 1000.0);
    const double bend = param("bend", 0.15);
    const double jitter = param("jitter", 0.04);
    std::vector<std::vector<double>> pts;
    double x = 0.0, y = 0.0, heading = pi * (2.0 * unit(rng) - 1.0);
    for (std::size_t g = 0; g < groups; ++g) {
      if (g > 0) {
        heading += bend * (2.0 * unit(rng) - 1.0);
        const double step = spacing * (1.0 + jitter * (2.0 * unit(rng) - 1.0));
        x += step * std::cos(heading);
        y += step * std::sin(heading);
      }
      const std::size_t size = spec.n / groups + (g < spec.n % groups ? 1 : 0);
      const double phase = 2.0 * pi * unit(rng);
      for (std::size_t t = 0; t < size; ++t) {
        if (size == 1) {
          pts.push_back({x, y});
          continue;
        }
        const double a = phase + 2.0 * pi * double(t) / double(size);
        pts.push_back({x + radius * std::cos(a), y + radius * std::sin(a)});
      }
    }
    return MetricSpace::from_points(std::move(pts));
  }
  if (spec.kind == "line") {
    const double spacing = param("spacing", 1.0);
    std::vector<std::vector<double>> pts(spec.n);
    for (std::size_t k = 0; k < spec.n; ++k) pts[k] = {spacing * double(k), 0.0};
    return MetricSpace::from_points(std::move(pts));
  }
  if (spec.kind == "matrix_random_metric") {
    const double lo = param("lo", 1.0), hi = param("hi", 10.0);
    if (!(lo > 0.0 && hi >= lo)) throw ConfigError("lo/hi: need 0 < lo <= hi");
    const std::size_t n = spec.n;
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = lo + (hi - lo) * unit(rng);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return MetricSpace::from_matrix(std::move(d));
  }
  throw ConfigError("kind: unknown value '" + spec.kind + "'");
}

std::string instance_hash(const MetricSpace& space) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < len; ++k) {
      h ^= p[k];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t n = space.size();
  const std::uint8_t kind = space.has_coords() ? 1 : 2;
  feed(&n, sizeof n);
  feed(&kind, 1);
  for (const auto& row : space.has_coords() ? space.points() : space.matrix())
    for (double v : row) feed(&v, sizeof v);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---- runs ---------------------------------------------------------------------------

void RunConfig::validate() const {
  static const char* modes[] = {"solve", "sparse_only", "baseline",
                                "oracle", "partition_stats", "lemma_checks"};
  if (std::find_if(std::begin(modes), std::end(modes),
                   [&](const char* m) { return mode == m; }) == std::end(modes))
    throw ConfigError("mode: unknown value '" + mode + "'");
  solve.validate();
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

json params_json(const SolveParams& p) {
  return {{"eps", p.eps},
          {"s", p.s},
          {"q", p.q_effective()},
          {"delta", p.delta},
          {"m_cap", p.m_cap},
          {"r", p.r},
          {"guesses", p.g},
          {"max_recursion_depth", p.max_recursion_depth},
          {"ddim", p.ddim},
          {"state_budget", p.state_budget},
          {"formation_cap", p.formation_cap},
          {"split_candidates", p.split_candidates}};
}

struct Reporter {
  json& rep;
  double factor;
  bool tours;

  void result(const std::string& name, const Tour& t, double weight, json extra = json::object()) {
    json r = std::move(extra);
    r["weight"] = weight;
    r["weight_original"] = weight / factor;
    if (tours) r["tour"] = t.seq;
    rep["results"][name] = std::move(r);
  }
};

void add_ratios(json& rep) {
  if (!rep.contains("results")) return;
  const json& lb = rep["lower_bounds"];
  for (auto& [name, r] : rep["results"].items()) {
    json ratios;
    for (const auto& [bound, value] : lb.items())
      if (value.is_number() && value.get<double>() > 0.0)
        ratios[bound] = r["weight"].get<double>() / value.get<double>();
    rep["ratios"][name] = ratios;
  }
}

json split_json(const SplitTrace& s) {
  return {{"depth", s.depth},
          {"n", s.n},
          {"level", s.level},
          {"center", s.v},
          {"q_star", s.q_star},
          {"radius", s.h},
          {"surrogate_cost", s.surrogate_cost},
          {"s1", s.s1},
          {"s2", s.s2},
          {"overlap", s.overlap},
          {"degenerate", s.degenerate},
          {"union_ok", s.union_ok},
          {"overlap_ok", s.overlap_ok},
          {"shrink_ok", s.shrink_ok},
          {"dense_mst", s.bound.lhs},
          {"dense_mst_bound", s.bound.rhs},
          {"dense_mst_ok", s.bound.ok},
          {"splice_point", s.splice_point}};
}

json sparse_json(const SparseSolve& s) {
  return {{"depth", s.depth},   {"n", s.n},           {"method", s.method},
          {"dp_cost", s.dp_cost}, {"weight", s.weight}, {"states", s.states}};
}

void partition_stats(const MetricSpace& m, const SolveParams& p, double ddim,
                     json& rep) {
  const NetHierarchy h = build_hierarchy(m, p.s);
  json levels = json::array();
  for (int i = 0; i <= h.top(); ++i) levels.push_back(h.net(i).size());
  rep["nets"] = {{"levels", levels}, {"top", h.top()}};

  const ClusterTree tree = hierarchical_clustering(m, h, PartitionParams{std::max(1.0, ddim), p.seed, 0});
  json per_level = json::array();
  for (int i = h.top(); i >= 0; --i) {
    std::size_t clusters = 0, max_members = 0, max_children = 0;
    for (std::size_t k : tree.at_level(i)) {
      ++clusters;
      max_members = std::max(max_members, tree.nodes[k].members.size());
      max_children = std::max(max_children, tree.nodes[k].children.size());
    }
    per_level.push_back({{"level", i},
                         {"clusters", clusters},
                         {"max_members", max_members},
                         {"max_children", max_children}});
  }
  rep["clusters"] = per_level;

  json cuts = json::array();
  if (m.size() >= 2) {
    PointId nearest = 1;
    for (PointId q = 1; q < m.size(); ++q)
      if (m.dist(0, q) < m.dist(0, nearest)) nearest = q;
    for (int i = 0; i <= h.top(); ++i) {
      const double f = estimate_cut_probability(m, h, 0, nearest, i, std::max(1.0, ddim),
                                                2000, p.seed, p.threads);
      cuts.push_back({{"level", i},
                      {"u", 0},
                      {"v", nearest},
                      {"distance", m.dist(0, nearest)},
                      {"trials", 2000},
                      {"frequency", f}});
    }
  }
  rep["cut_frequency"] = cuts;
  rep["portals"] = {
      {"grid", portal_grid(p.s, std::max(1.0, ddim), h.top(), p.eps)},
      {"theoretical_count", theoretical_portal_count(p.s, std::max(1.0, ddim), m.size(), p.eps)},
      {"cap", p.m_cap}};
}

void lemma_checks(const MetricSpace& m, const SolveParams& p, double ddim,
                  json& rep) {
  const double du = std::max(1.0, ddim);
  const NetHierarchy h = build_hierarchy(m, p.s);
  json checks;
  bool all = true;

  const NetReport nets = verify_nets(m, h, du, 32, p.seed);
  checks["nets"] = {{"pass", nets.pass}, {"violations", nets.violations.size()}};
  all = all && nets.pass;

  const double tree_w = mst_weight(m, m.all_points());
  if (m.size() <= kHeldKarpMax) {
    const double opt = held_karp_tsp(m).weight;
    const bool ok = tree_w <= opt * (1 + 1e-9) && opt <= 2 * tree_w * (1 + 1e-9);
    checks["mst_sandwich"] = {{"pass", ok}, {"mst", tree_w}, {"optimum", opt},
                              {"upper_slack", 2 * tree_w - opt}, {"lower_slack", opt - tree_w}};
    all = all && ok;
  }

  const Tour base = christofides(m).tour;
  const double base_w = tour_weight(m, base);
  {
    const double e = std::min(p.eps, 0.125);
    const Tour nr = make_net_respecting(m, base, h, e);
    const double w = tour_weight(m, nr);
    const bool respects = is_net_respecting(m, nr, h, e).ok;
    const bool ok = respects && w <= (1 + 16 * e) * base_w * (1 + 1e-9);
    checks["net_respecting"] = {{"pass", ok}, {"eps", e}, {"ratio", base_w > 0 ? w / base_w : 1.0},
                                {"bound", 1 + 16 * e}};
    all = all && ok;

    std::size_t upper_ok = 0, lower_ok = 0;
    double worst_upper = 0, worst_lower = 0;
    bool first = true;
    for (PointId u = 0; u < m.size(); ++u) {
      const auto b = check_local_tour_bounds(m, nr, u, p.s, e, p.s, du);
      upper_ok += b.upper_ok;
      lower_ok += b.lower_ok;
      if (first || b.upper_slack < worst_upper) worst_upper = b.upper_slack;
      if (first || b.lower_slack < worst_lower) worst_lower = b.lower_slack;
      first = false;
    }
    checks["local_bounds"] = {{"balls", m.size()},
                              {"upper_holds", upper_ok},
                              {"lower_holds", lower_ok},
                              {"min_upper_slack", worst_upper},
                              {"min_lower_slack", worst_lower}};
    all = all && lower_ok == m.size();
  }

  const ClusterTree tree = hierarchical_clustering(m, h, PartitionParams{du, p.seed, 0});
  {
    bool ok = true;
    for (const ClusterNode& node : tree.nodes) {
      if (node.children.empty()) continue;
      PointSet u;
      for (std::size_t c : node.children) {
        const ClusterNode& ch = tree.nodes[c];
        u.insert(u.end(), ch.members.begin(), ch.members.end());
        const double a = h.radius(ch.level);
        ok = ok && ch.radius >= a * (1 - 1e-9) && ch.radius <= 2 * a * (1 + 1e-9);
      }
      std::sort(u.begin(), u.end());
      ok = ok && u == node.members;
    }
    checks["partition"] = {{"pass", ok}, {"clusters", tree.nodes.size()}};
    all = all && ok;
  }
  {
    bool ok = true;
    double worst = 0.0;
    std::size_t patched = 0;
    for (const ClusterNode& node : tree.nodes) {
      if (node.members.size() == m.size() || node.members.empty()) continue;
      const Tour t = patch_crossings(m, base, node.members);
      const double extra = tour_weight(m, t) - base_w;
      const double allow = 4 * mst_weight(m, patch_anchor_set(base, node.members));
      ok = ok && count_crossings(t, node.members) <= 2 && visits_all(t, m.all_points()) &&
           extra <= allow + 1e-9 * (1 + base_w);
      worst = patched == 0 ? allow - extra : std::min(worst, allow - extra);
      if (++patched == 32) break;
    }
    checks["patching"] = {{"pass", ok}, {"clusters", patched}, {"min_slack", worst}};
    all = all && ok;
  }
  {
    const auto sp = is_q_sparse(m, base, h, p.q_effective());
    json s = {{"q", p.q_effective()}, {"pass", sp.pass}};
    if (sp.witness)
      s["witness"] = {{"level", sp.witness->level}, {"center", sp.witness->center},
                      {"weight", sp.witness->weight}, {"threshold", sp.witness->threshold}};
    checks["sparsity"] = s;
  }
  rep["checks"] = checks;
  rep["all_pass"] = all;
}

}  // namespace

json run(const MetricSpace& raw, const RunConfig& config) {
  config.validate();
  if (raw.size() == 0) throw DegenerateInstance("instance has no points");
  const SolveParams& p = config.solve;
  json rep;
  json timing = json::object();

  const auto t0 = Clock::now();
  const Normalized nm = raw.size() >= 2 ? normalize(raw) : Normalized{raw, 1.0};
  const MetricSpace& m = nm.space;
  const double ddim_upper = raw.size() >= 2 ? estimate_doubling(m, 32, p.seed).ddim_upper : 1.0;
  const double ddim = p.ddim > 0 ? p.ddim : std::max(1.0, ddim_upper);
  timing["prepare"] = seconds_since(t0);

  rep["mode"] = config.mode;
  rep["seed"] = p.seed;
  rep["params"] = params_json(p);
  rep["instance"] = {{"n", raw.size()},
                     {"diameter", raw.size() >= 2 ? raw.diameter() : 0.0},
                     {"ddim_upper", ddim_upper},
                     {"hash", instance_hash(raw)},
                     {"kind", raw.has_coords() ? "points" : "matrix"},
                     {"normalization_factor", nm.factor}};
  Reporter out{rep, nm.factor, config.include_tours};

  auto bounds = [&] {
    const auto tb = Clock::now();
    rep["lower_bounds"]["mst"] = mst_weight(m, m.all_points());
    if (m.size() <= kHeldKarpMax) rep["lower_bounds"]["optimum"] = held_karp_tsp(m).weight;
    timing["lower_bounds"] = seconds_since(tb);
  };

  const auto tm = Clock::now();
  if (config.mode == "solve") {
    SolveParams sp = p;
    sp.ddim = ddim;
    const SolveResult r = solve_tsp(m, sp);
    json trace = {{"depth", r.report.depth}, {"splits", json::array()}, {"sparse", json::array()}};
    for (const auto& s : r.report.splits) trace["splits"].push_back(split_json(s));
    for (const auto& s : r.report.sparse) trace["sparse"].push_back(sparse_json(s));
    rep["trace"] = trace;
    rep["q"] = {{"used", r.report.q}, {"theory_leading_factor", r.report.q_theory}};
    out.result("solve", r.tour, r.report.weight);
    timing["solve"] = seconds_since(tm);
    bounds();
  } else if (config.mode == "sparse_only") {
    Tour t;
    const SparseSolve s = solve_sparse(m, p, ddim, &t);
    out.result("sparse_only", t, tour_weight(m, t), {{"dp_cost", s.dp_cost}, {"method", s.method}, {"states", s.states}});
    timing["sparse_only"] = seconds_since(tm);
    bounds();
  } else if (config.mode == "baseline") {
    const auto tc = Clock::now();
    const OracleResult c = christofides(m);
    out.result("christofides", c.tour, c.weight, {{"exact_matching", c.exact_matching}});
    timing["christofides"] = seconds_since(tc);
    const auto td = Clock::now();
    const OracleResult d = double_tree(m);
    out.result("double_tree", d.tour, d.weight);
    timing["double_tree"] = seconds_since(td);
    const auto tn = Clock::now();
    const OracleResult nn = nearest_neighbor(m);
    out.result("nearest_neighbor", nn.tour, nn.weight);
    timing["nearest_neighbor"] = seconds_since(tn);
    bounds();
  } else if (config.mode == "oracle") {
    const OracleResult o = held_karp_tsp(m);
    out.result("held_karp", o.tour, o.weight, {{"exact", o.exact}});
    timing["held_karp"] = seconds_since(tm);
    bounds();
  } else if (config.mode == "partition_stats") {
    partition_stats(m, p, ddim, rep);
    timing["partition_stats"] = seconds_since(tm);
  } else {
    lemma_checks(m, p, ddim, rep);
    timing["lemma_checks"] = seconds_since(tm);
  }
  add_ratios(rep);
  rep["timing"] = timing;
  return rep;
}

namespace {

void round_numbers(json& j) {
  if (j.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", j.get<double>());
    j = std::strtod(buf, nullptr);
  } else if (j.is_structured()) {
    for (auto& v : j) round_numbers(v);
  }
}

}  // namespace

std::string dump_report(const json& report, int indent) {
  json copy = report;
  round_numbers(copy);
  return copy.dump(indent);
}

json strip_timing(json report) {
  report.erase("timing");
  return report;
}

unsigned threads_from_env() {
  const char* v = std::getenv("TSP_THREADS");
  if (!v || !*v) return 0;
  unsigned n = 0;
  const auto [p, ec] = std::from_chars(v, v + std::strlen(v), n);
  if (ec != std::errc() || *p != '\0') return 0;
  return n;
}

}  // namespace dtsp
