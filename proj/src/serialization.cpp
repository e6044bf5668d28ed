#include "dirac_gap/serialization.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dirac_gap {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw std::invalid_argument("not a number: '" + text + "'");
  return x;
}

namespace {

// Reads a required key, naming it in the error.
template <typename T>
T field(const Json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string(where) + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw std::invalid_argument(std::string(where) + ": field '" + key + "' has the wrong type");
  }
}

void only_keys(const Json& j, std::initializer_list<const char*> keys, const char* where) {
  if (!j.is_object()) throw std::invalid_argument(std::string(where) + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* allowed : keys) ok = ok || k == allowed;
    if (!ok) throw std::invalid_argument(std::string(where) + ": unknown field '" + k + "'");
  }
}

SpaceDim dim_from_string(const std::string& s) {
  if (s == "3d") return SpaceDim::ThreeD;
  if (s == "2d") return SpaceDim::TwoD;
  throw std::invalid_argument("dim must be '3d' or '2d', got '" + s + "'");
}

PotentialKind kind_from_string(const std::string& s) {
  for (auto k : {PotentialKind::Coulomb, PotentialKind::Truncated, PotentialKind::Scaled, PotentialKind::CoulombStep})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("potential kind must be coulomb|truncated|scaled|coulomb_step, got '" + s + "'");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream row(line);
  while (std::getline(row, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Data rows of a CSV with the expected header.
std::vector<std::vector<std::string>> read_csv(std::istream& is, const std::string& header) {
  std::string line;
  if (!std::getline(is, line) || line != header) throw std::invalid_argument("csv: expected header '" + header + "'");
  const std::size_t width = split(header).size();
  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != width) throw std::invalid_argument("csv: row has wrong width: " + line);
    rows.push_back(std::move(cells));
  }
  return rows;
}

Json sector_to_json(const Sector& s) { return Json{{"kappa", s.coupling}, {"degeneracy", s.degeneracy}}; }

Sector sector_from_json(const Json& j, SpaceDim dim) {
  Sector s = make_sector(dim, field<double>(j, "kappa", "sector"));
  if (j.contains("degeneracy") && field<int>(j, "degeneracy", "sector") != s.degeneracy)
    throw std::invalid_argument("sector: degeneracy does not match kappa");
  return s;
}

Json doubles(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

std::vector<double> doubles_from(const Json& j, const char* key, const char* where) {
  return field<std::vector<double>>(j, key, where);
}

}  // namespace

Json potential_to_json(const PotentialSpec& spec) {
  Json j{{"dim", to_string(spec.dim)}, {"kind", to_string(spec.kind)}, {"nu", spec.nu}};
  switch (spec.kind) {
    case PotentialKind::Truncated:
    case PotentialKind::Scaled:
      if (std::isfinite(spec.eps)) j["eps"] = spec.eps;
      break;
    case PotentialKind::CoulombStep:
      j["height"] = spec.height;
      j["radius"] = spec.radius;
      break;
    case PotentialKind::Coulomb: break;
  }
  if (spec.cutoff) j["cutoff"] = *spec.cutoff;
  return j;
}

PotentialSpec potential_from_json(const Json& j) {
  only_keys(j, {"dim", "kind", "nu", "eps", "height", "radius", "cutoff"}, "spec");
  PotentialSpec s;
  s.dim = j.contains("dim") ? dim_from_string(field<std::string>(j, "dim", "spec")) : SpaceDim::ThreeD;
  s.kind = j.contains("kind") ? kind_from_string(field<std::string>(j, "kind", "spec")) : PotentialKind::Coulomb;
  s.nu = field<double>(j, "nu", "spec");
  if (s.kind == PotentialKind::Truncated)
    s.eps = j.contains("eps") ? field<double>(j, "eps", "spec") : std::numeric_limits<double>::infinity();
  else if (s.kind == PotentialKind::Scaled)
    s.eps = field<double>(j, "eps", "spec");
  if (s.kind == PotentialKind::CoulombStep) {
    s.height = field<double>(j, "height", "spec");
    s.radius = field<double>(j, "radius", "spec");
  }
  if (j.contains("cutoff")) s.cutoff = field<double>(j, "cutoff", "spec");
  return s;
}

Json mesh_to_json(const MeshParams& mesh) {
  if (const auto* a = std::get_if<AlgebraicMeshParams>(&mesh))
    return Json{{"kind", "algebraic"}, {"rmax", a->r_max}, {"n", a->n}, {"p", a->grade}};
  const auto& g = std::get<GeometricMeshParams>(mesh);
  return Json{{"kind", "geometric"}, {"rmax", g.r_max}, {"n", g.n}, {"rmin", g.r_min}};
}

MeshParams mesh_from_json(const Json& j) {
  if (j.is_string()) return parse_mesh_params(j.get<std::string>());
  only_keys(j, {"kind", "rmax", "n", "p", "rmin"}, "mesh");
  const auto kind = field<std::string>(j, "kind", "mesh");
  if (kind == "algebraic") {
    if (j.contains("rmin")) throw std::invalid_argument("mesh: 'rmin' is not a field of algebraic meshes");
    AlgebraicMeshParams p;
    p.r_max = field<double>(j, "rmax", "mesh");
    p.n = field<int>(j, "n", "mesh");
    if (j.contains("p")) p.grade = field<double>(j, "p", "mesh");
    return p;
  }
  if (kind == "geometric") {
    if (j.contains("p")) throw std::invalid_argument("mesh: 'p' is not a field of geometric meshes");
    GeometricMeshParams p;
    p.r_max = field<double>(j, "rmax", "mesh");
    p.n = field<int>(j, "n", "mesh");
    p.r_min = field<double>(j, "rmin", "mesh");
    return p;
  }
  throw std::invalid_argument("mesh: kind must be 'algebraic' or 'geometric', got '" + kind + "'");
}

Json report_to_json(const SpectrumReport& report) {
  Json levels = Json::array();
  for (const auto& l : report.levels)
    levels.push_back(Json{{"sector", sector_to_json(l.sector)},
                          {"k", l.k_in_sector},
                          {"E", l.energy},
                          {"bracket", l.bracket_width},
                          {"residual", l.residual},
                          {"shared_bracket", l.shared_bracket}});
  Json expanded = Json::array();
  for (const auto& e : report.expanded_levels)
    expanded.push_back(Json{{"E", e.energy}, {"kappa", e.coupling}, {"k", e.k_in_sector}, {"copy", e.copy}});
  return Json{{"spec", potential_to_json(report.spec)},
              {"gap", Json::array({report.gap.lower, report.gap.upper})},
              {"mesh", mesh_to_json(report.mesh)},
              {"dof", report.dof},
              {"levels", levels},
              {"expanded_levels", expanded},
              {"walltime_s", report.walltime_s}};
}

SpectrumReport report_from_json(const Json& j) {
  only_keys(j, {"spec", "gap", "mesh", "dof", "levels", "expanded_levels", "walltime_s"}, "report");
  SpectrumReport r;
  r.spec = potential_from_json(field<Json>(j, "spec", "report"));
  const auto gap = field<std::vector<double>>(j, "gap", "report");
  if (gap.size() != 2) throw std::invalid_argument("report: 'gap' must be [lower, upper]");
  r.gap = {gap[0], gap[1]};
  r.mesh = mesh_from_json(field<Json>(j, "mesh", "report"));
  r.dof = field<Eigen::Index>(j, "dof", "report");
  for (const auto& l : field<Json>(j, "levels", "report")) {
    MinMaxLevel m;
    m.sector = sector_from_json(field<Json>(l, "sector", "level"), r.spec.dim);
    m.k_in_sector = field<int>(l, "k", "level");
    m.energy = field<double>(l, "E", "level");
    m.bracket_width = field<double>(l, "bracket", "level");
    m.residual = field<double>(l, "residual", "level");
    m.shared_bracket = l.contains("shared_bracket") && field<bool>(l, "shared_bracket", "level");
    r.levels.push_back(std::move(m));
  }
  if (j.contains("expanded_levels"))
    for (const auto& e : j.at("expanded_levels"))
      r.expanded_levels.push_back({field<double>(e, "E", "expanded level"), field<double>(e, "kappa", "expanded level"),
                                   field<int>(e, "k", "expanded level"), field<int>(e, "copy", "expanded level")});
  r.walltime_s = field<double>(j, "walltime_s", "report");
  return r;
}

void write_spectrum_csv(std::ostream& os, const SpectrumReport& report) {
  os << "E,kappa,k,copy\n";
  for (const auto& e : report.expanded_levels)
    os << format_double(e.energy) << ',' << format_double(e.coupling) << ',' << e.k_in_sector << ',' << e.copy << '\n';
}

std::vector<ExpandedLevel> read_spectrum_csv(std::istream& is) {
  std::vector<ExpandedLevel> out;
  for (const auto& c : read_csv(is, "E,kappa,k,copy"))
    out.push_back({parse_double(c[0]), parse_double(c[1]), std::stoi(c[2]), std::stoi(c[3])});
  return out;
}

Json oracle_to_json(SpaceDim dim, double nu, const std::vector<OracleLevel>& levels) {
  Json arr = Json::array();
  for (const auto& l : levels)
    arr.push_back(Json{{"sector", l.sector.coupling}, {"n_index", l.n_index}, {"E", l.energy}, {"residual", l.wronskian_residual}});
  return Json{{"dim", to_string(dim)}, {"nu", nu}, {"levels", arr}};
}

std::vector<OracleLevel> oracle_from_json(const Json& j) {
  only_keys(j, {"dim", "nu", "levels"}, "oracle");
  const SpaceDim dim = dim_from_string(field<std::string>(j, "dim", "oracle"));
  std::vector<OracleLevel> out;
  for (const auto& l : field<Json>(j, "levels", "oracle")) {
    OracleLevel o;
    o.sector = make_sector(dim, field<double>(l, "sector", "oracle level"));
    o.n_index = field<int>(l, "n_index", "oracle level");
    o.energy = field<double>(l, "E", "oracle level");
    o.wronskian_residual = field<double>(l, "residual", "oracle level");
    out.push_back(o);
  }
  return out;
}

Json truncation_to_json(const TruncationTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) rows.push_back(Json{{"eps", r.eps}, {"lambda1", r.lambda1}});
  return Json{{"spec", potential_to_json(t.base)},
              {"mesh", mesh_to_json(t.mesh)},
              {"rows", rows},
              {"lambda1_untruncated", t.lambda1_exact},
              {"non_increasing", t.non_increasing},
              {"bounded_below", t.bounded_below},
              {"final_gap", t.final_gap}};
}

TruncationTable truncation_from_json(const Json& j) {
  only_keys(j, {"spec", "mesh", "rows", "lambda1_untruncated", "non_increasing", "bounded_below", "final_gap"},
            "truncation");
  TruncationTable t;
  t.base = potential_from_json(field<Json>(j, "spec", "truncation"));
  t.mesh = mesh_from_json(field<Json>(j, "mesh", "truncation"));
  for (const auto& r : field<Json>(j, "rows", "truncation"))
    t.rows.push_back({field<double>(r, "eps", "truncation row"), field<double>(r, "lambda1", "truncation row")});
  t.lambda1_exact = field<double>(j, "lambda1_untruncated", "truncation");
  t.non_increasing = field<bool>(j, "non_increasing", "truncation");
  t.bounded_below = field<bool>(j, "bounded_below", "truncation");
  t.final_gap = field<double>(j, "final_gap", "truncation");
  return t;
}

void write_truncation_csv(std::ostream& os, const TruncationTable& t) {
  os << "eps,lambda1,gap_to_untruncated\n";
  for (const auto& r : t.rows)
    os << format_double(r.eps) << ',' << format_double(r.lambda1) << ',' << format_double(r.lambda1 - t.lambda1_exact)
       << '\n';
  os << "inf," << format_double(t.lambda1_exact) << ",0\n";
}

TruncationTable read_truncation_csv(std::istream& is) {
  TruncationTable t;
  const auto rows = read_csv(is, "eps,lambda1,gap_to_untruncated");
  if (rows.empty() || rows.back()[0] != "inf") throw std::invalid_argument("truncation csv: missing final 'inf' row");
  t.lambda1_exact = parse_double(rows.back()[1]);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    TruncationRow r{parse_double(rows[i][0]), parse_double(rows[i][1])};
    if (!t.rows.empty() && r.lambda1 > t.rows.back().lambda1) t.non_increasing = false;
    if (r.lambda1 < t.lambda1_exact - 1e-8) t.bounded_below = false;
    t.rows.push_back(r);
  }
  if (!t.rows.empty()) t.final_gap = t.rows.back().lambda1 - t.lambda1_exact;
  return t;
}

Json mesh_convergence_to_json(const MeshConvergence& c) {
  Json meshes = Json::array(), rows = Json::array();
  for (const auto& m : c.meshes) meshes.push_back(mesh_to_json(m));
  for (const auto& r : c.rows) rows.push_back(Json{{"dof", r.dof}, {"lambda", r.lambda}, {"decrement", r.decrement}});
  Json j{{"spec", potential_to_json(c.spec)}, {"sector", sector_to_json(c.sector)}, {"k", c.k},
         {"meshes", meshes}, {"rows", rows}, {"non_increasing", c.non_increasing}};
  j["extrapolated"] = c.extrapolated ? Json(*c.extrapolated) : Json(nullptr);
  return j;
}

MeshConvergence mesh_convergence_from_json(const Json& j) {
  only_keys(j, {"spec", "sector", "k", "meshes", "rows", "non_increasing", "extrapolated"}, "mesh convergence");
  MeshConvergence c;
  c.spec = potential_from_json(field<Json>(j, "spec", "mesh convergence"));
  c.sector = sector_from_json(field<Json>(j, "sector", "mesh convergence"), c.spec.dim);
  c.k = field<int>(j, "k", "mesh convergence");
  for (const auto& m : field<Json>(j, "meshes", "mesh convergence")) c.meshes.push_back(mesh_from_json(m));
  for (const auto& r : field<Json>(j, "rows", "mesh convergence"))
    c.rows.push_back({field<Eigen::Index>(r, "dof", "row"), field<double>(r, "lambda", "row"), field<double>(r, "decrement", "row")});
  c.non_increasing = field<bool>(j, "non_increasing", "mesh convergence");
  if (j.contains("extrapolated") && !j.at("extrapolated").is_null()) c.extrapolated = field<double>(j, "extrapolated", "mesh convergence");
  return c;
}

void write_mesh_convergence_csv(std::ostream& os, const MeshConvergence& c) {
  os << "dof,lambda,decrement\n";
  for (const auto& r : c.rows) os << r.dof << ',' << format_double(r.lambda) << ',' << format_double(r.decrement) << '\n';
}

std::vector<MeshConvergenceRow> read_mesh_convergence_csv(std::istream& is) {
  std::vector<MeshConvergenceRow> out;
  for (const auto& c : read_csv(is, "dof,lambda,decrement"))
    out.push_back({static_cast<Eigen::Index>(std::stoll(c[0])), parse_double(c[1]), parse_double(c[2])});
  return out;
}

Json pollution_to_json(const PollutionReport& rep) {
  return Json{{"dim", to_string(rep.sector.dim)},     {"sector", sector_to_json(rep.sector)},
              {"nu", rep.nu},                         {"dof", rep.dof},
              {"threshold", rep.threshold},           {"naive_levels", doubles(rep.naive_levels)},
              {"oracle_levels", doubles(rep.oracle_levels)}, {"spurious", doubles(rep.spurious)},
              {"minmax_levels", doubles(rep.minmax_levels)}};
}

PollutionReport pollution_from_json(const Json& j) {
  only_keys(j, {"dim", "sector", "nu", "dof", "threshold", "naive_levels", "oracle_levels", "spurious", "minmax_levels"},
            "pollution");
  PollutionReport r;
  r.sector = sector_from_json(field<Json>(j, "sector", "pollution"), dim_from_string(field<std::string>(j, "dim", "pollution")));
  r.nu = field<double>(j, "nu", "pollution");
  r.dof = field<Eigen::Index>(j, "dof", "pollution");
  r.threshold = field<double>(j, "threshold", "pollution");
  r.naive_levels = doubles_from(j, "naive_levels", "pollution");
  r.oracle_levels = doubles_from(j, "oracle_levels", "pollution");
  r.spurious = doubles_from(j, "spurious", "pollution");
  r.minmax_levels = doubles_from(j, "minmax_levels", "pollution");
  return r;
}

void write_pollution_csv(std::ostream& os, const PollutionReport& rep) {
  os << "set,E\n";
  auto emit = [&](const char* name, const std::vector<double>& v) {
    for (double e : v) os << name << ',' << format_double(e) << '\n';
  };
  emit("naive", rep.naive_levels);
  emit("oracle", rep.oracle_levels);
  emit("spurious", rep.spurious);
  emit("minmax", rep.minmax_levels);
}

PollutionReport read_pollution_csv(std::istream& is) {
  PollutionReport r;
  for (const auto& c : read_csv(is, "set,E")) {
    const double e = parse_double(c[1]);
    if (c[0] == "naive") r.naive_levels.push_back(e);
    else if (c[0] == "oracle") r.oracle_levels.push_back(e);
    else if (c[0] == "spurious") r.spurious.push_back(e);
    else if (c[0] == "minmax") r.minmax_levels.push_back(e);
    else throw std::invalid_argument("pollution csv: unknown set '" + c[0] + "'");
  }
  return r;
}

Json verdict_to_json(const std::vector<CheckResult>& checks) {
  Json j = Json::object();
  for (const auto& c : checks) j[c.name] = Json{{"pass", c.pass}, {"worst", c.worst}, {"config", c.config}};
  return j;
}

std::vector<CheckResult> verdict_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("verdict: expected an object");
  std::vector<CheckResult> out;
  for (const auto& [name, v] : j.items())
    out.push_back({name, field<bool>(v, "pass", "verdict"), field<double>(v, "worst", "verdict"),
                   field<std::string>(v, "config", "verdict")});
  return out;
}

void write_verdict_csv(std::ostream& os, const std::vector<CheckResult>& checks) {
  os << "name,pass,worst\n";
  for (const auto& c : checks) os << c.name << ',' << (c.pass ? "true" : "false") << ',' << format_double(c.worst) << '\n';
}

std::vector<CheckResult> read_verdict_csv(std::istream& is) {
  std::vector<CheckResult> out;
  for (const auto& c : read_csv(is, "name,pass,worst")) {
    if (c[1] != "true" && c[1] != "false") throw std::invalid_argument("verdict csv: pass must be true|false");
    out.push_back({c[0], c[1] == "true", parse_double(c[2]), ""});
  }
  return out;
}

}  // namespace dirac_gap
