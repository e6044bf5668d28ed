#include "dirac_gap/radial_mesh.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dirac_gap {

GeometricMeshParams geometric_per_decade(double r_min, double r_max, int per_decade) {
  if (!(r_min > 0.0 && r_min < r_max) || per_decade < 1)
    throw std::domain_error("geometric_per_decade: need 0 < r_min < r_max and per_decade >= 1");
  GeometricMeshParams p;
  p.r_min = r_min;
  p.r_max = r_max;
  p.n = static_cast<int>(std::lround(std::log10(r_max / r_min) * per_decade));
  if (p.n < 2) p.n = 2;
  return p;
}

namespace {

Eigen::VectorXd algebraic_nodes(const AlgebraicMeshParams& p) {
  if (!(p.r_max > 0.0) || !std::isfinite(p.r_max)) throw std::domain_error("algebraic mesh: rmax must be > 0");
  if (p.n < 2) throw std::domain_error("algebraic mesh: n >= 2 required");
  if (!(p.grade >= 1.0)) throw std::domain_error("algebraic mesh: grade p >= 1 required");
  Eigen::VectorXd r(p.n + 1);
  for (int i = 0; i <= p.n; ++i) r[i] = p.r_max * std::pow(static_cast<double>(i) / p.n, p.grade);
  r[p.n] = p.r_max;
  return r;
}

Eigen::VectorXd geometric_nodes(const GeometricMeshParams& p) {
  if (!(p.r_min > 0.0)) throw std::domain_error("geometric mesh: rmin must be > 0");
  if (!(p.r_min < p.r_max) || !std::isfinite(p.r_max)) throw std::domain_error("geometric mesh: rmin < rmax required");
  if (p.n < 2) throw std::domain_error("geometric mesh: n >= 2 required");
  Eigen::VectorXd r(p.n + 2);
  r[0] = 0.0;
  const double lo = std::log(p.r_min);
  const double span = std::log(p.r_max) - lo;
  r[1] = p.r_min;
  for (int i = 1; i < p.n; ++i) r[i + 1] = std::exp(lo + span * (static_cast<double>(i) / p.n));
  r[p.n + 1] = p.r_max;
  return r;
}

std::map<std::string, std::string> parse_fields(const std::string& body) {
  std::map<std::string, std::string> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("mesh spec: expected key=value, got '" + item + "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

double number(const std::map<std::string, std::string>& f, const std::string& key, double fallback, bool required) {
  const auto it = f.find(key);
  if (it == f.end()) {
    if (required) throw std::invalid_argument("mesh spec: missing '" + key + "'");
    return fallback;
  }
  std::size_t used = 0;
  const double v = std::stod(it->second, &used);
  if (used != it->second.size()) throw std::invalid_argument("mesh spec: bad number for '" + key + "'");
  return v;
}

}  // namespace

RadialMesh::RadialMesh(const MeshParams& params) : params_(params) {
  nodes_ = std::visit(
      [](const auto& p) -> Eigen::VectorXd {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, AlgebraicMeshParams>)
          return algebraic_nodes(p);
        else
          return geometric_nodes(p);
      },
      params_);
  for (Eigen::Index i = 1; i < nodes_.size(); ++i)
    if (!(nodes_[i] > nodes_[i - 1])) throw std::domain_error("radial mesh: nodes not strictly increasing (underflow?)");
}

MeshParams parse_mesh_params(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const auto fields = parse_fields(colon == std::string::npos ? std::string() : text.substr(colon + 1));
  for (const auto& [k, v] : fields)
    if (k != "rmax" && k != "rmin" && k != "n" && k != "p")
      throw std::invalid_argument("mesh spec: unknown key '" + k + "'");
  if (kind == "algebraic") {
    AlgebraicMeshParams p;
    p.r_max = number(fields, "rmax", p.r_max, false);
    p.n = static_cast<int>(number(fields, "n", p.n, true));
    p.grade = number(fields, "p", p.grade, false);
    return p;
  }
  if (kind == "geometric") {
    GeometricMeshParams p;
    p.r_min = number(fields, "rmin", p.r_min, true);
    p.r_max = number(fields, "rmax", p.r_max, false);
    p.n = static_cast<int>(number(fields, "n", p.n, true));
    return p;
  }
  throw std::invalid_argument("mesh spec: kind must be 'algebraic' or 'geometric', got '" + kind + "'");
}

std::string format_mesh_params(const MeshParams& params) {
  char buf[160];
  if (const auto* a = std::get_if<AlgebraicMeshParams>(&params))
    std::snprintf(buf, sizeof buf, "algebraic:rmax=%.17g,n=%d,p=%.17g", a->r_max, a->n, a->grade);
  else {
    const auto& g = std::get<GeometricMeshParams>(params);
    std::snprintf(buf, sizeof buf, "geometric:rmin=%.17g,rmax=%.17g,n=%d", g.r_min, g.r_max, g.n);
  }
  return buf;
}

}  // namespace dirac_gap
