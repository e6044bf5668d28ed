#include "dirac_gap/operator_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dirac_gap {

const char* to_string(SpaceDim dim) { return dim == SpaceDim::ThreeD ? "3d" : "2d"; }

const char* to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Coulomb: return "coulomb";
    case PotentialKind::Truncated: return "truncated";
    case PotentialKind::Scaled: return "scaled";
    case PotentialKind::CoulombStep: return "coulomb_step";
  }
  return "?";
}

PotentialSpec PotentialSpec::coulomb(double nu, SpaceDim dim) {
  PotentialSpec s;
  s.dim = dim;
  s.kind = PotentialKind::Coulomb;
  s.nu = nu;
  return s;
}

PotentialSpec PotentialSpec::truncated(double nu, double eps, SpaceDim dim) {
  PotentialSpec s = coulomb(nu, dim);
  s.kind = PotentialKind::Truncated;
  s.eps = eps;
  return s;
}

PotentialSpec PotentialSpec::scaled(double nu, double eps, SpaceDim dim) {
  PotentialSpec s = coulomb(nu, dim);
  s.kind = PotentialKind::Scaled;
  s.eps = eps;
  return s;
}

PotentialSpec PotentialSpec::coulomb_step(double nu, double height, double radius, SpaceDim dim) {
  PotentialSpec s = coulomb(nu, dim);
  s.kind = PotentialKind::CoulombStep;
  s.height = height;
  s.radius = radius;
  return s;
}

namespace {

// max(v, -1/eps) with eps = +inf meaning "no cutoff".
double floor_at(double v, double eps) {
  if (std::isinf(eps)) return v;
  return std::max(v, -1.0 / eps);
}

double base_potential(const PotentialSpec& spec, double r) {
  const double coulomb = -spec.nu / r;
  switch (spec.kind) {
    case PotentialKind::Coulomb: return coulomb;
    case PotentialKind::Truncated: return floor_at(coulomb, spec.eps);
    case PotentialKind::Scaled: return (1.0 - spec.eps) * coulomb;
    case PotentialKind::CoulombStep: return r < spec.radius ? coulomb + spec.height : coulomb;
  }
  return coulomb;
}

}  // namespace

double evaluate_potential(const PotentialSpec& spec, double r) {
  if (!(r > 0.0)) throw std::domain_error("evaluate_potential: radius must be > 0");
  double v = base_potential(spec, r);
  if (spec.cutoff) v = floor_at(v, *spec.cutoff);
  return v;
}

std::optional<double> potential_at_origin(const PotentialSpec& spec) {
  std::optional<double> floor;
  if (spec.kind == PotentialKind::Truncated && !std::isinf(spec.eps)) floor = -1.0 / spec.eps;
  if (spec.cutoff && !std::isinf(*spec.cutoff)) {
    const double c = -1.0 / *spec.cutoff;
    floor = floor ? std::max(*floor, c) : c;
  }
  return floor;
}

double potential_sup_bound(const PotentialSpec& spec) {
  // Every kind is <= 0 except the step, whose bound is its height.
  if (spec.kind == PotentialKind::CoulombStep) return std::max(spec.height, 0.0);
  return 0.0;
}

std::vector<double> potential_breakpoints(const PotentialSpec& spec) {
  std::vector<double> pts;
  auto cut = [&](double eps) {
    if (spec.nu > 0.0 && eps > 0.0 && !std::isinf(eps)) pts.push_back(spec.nu * eps * (spec.kind == PotentialKind::Scaled ? (1.0 - spec.eps) : 1.0));
  };
  if (spec.kind == PotentialKind::Truncated) cut(spec.eps);
  if (spec.kind == PotentialKind::CoulombStep && spec.radius > 0.0) pts.push_back(spec.radius);
  if (spec.cutoff) {
    if (spec.kind == PotentialKind::CoulombStep) {
      // Kink where height - nu/r = -1/cutoff, and where -nu/r = -1/cutoff outside the step.
      const double inv = 1.0 / *spec.cutoff;
      if (!std::isinf(*spec.cutoff)) {
        const double inner = spec.nu / (spec.height + inv);
        if (inner < spec.radius) pts.push_back(inner);
        const double outer = spec.nu / inv;
        if (outer >= spec.radius) pts.push_back(outer);
      }
    } else {
      cut(*spec.cutoff);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

PotentialSpec with_truncation(const PotentialSpec& spec, double eps) {
  if (!(eps > 0.0)) throw std::domain_error("with_truncation: eps must be > 0");
  PotentialSpec out = spec;
  if (spec.kind == PotentialKind::Coulomb && !spec.cutoff) {
    out.kind = PotentialKind::Truncated;
    out.eps = eps;
    return out;
  }
  out.cutoff = out.cutoff ? std::max(*out.cutoff, eps) : eps;
  return out;
}

AdmissibilityReport check_admissible(const PotentialSpec& spec) {
  AdmissibilityReport rep;
  auto fail = [&](std::string what, double witness) {
    rep.ok = false;
    rep.violation = std::move(what);
    rep.witness = witness;
    return rep;
  };
  const double crit = critical_coupling(spec.dim);
  if (!std::isfinite(spec.nu) || !(spec.nu > 0.0)) return fail("nu must be positive", spec.nu);
  if (spec.nu > crit) {
    std::ostringstream os;
    os << "nu exceeds critical coupling " << crit;
    return fail(os.str(), spec.nu);
  }
  switch (spec.kind) {
    case PotentialKind::Coulomb: break;
    case PotentialKind::Truncated:
      if (!(spec.eps > 0.0)) return fail("truncation eps must be > 0", spec.eps);
      break;
    case PotentialKind::Scaled:
      if (!(spec.eps > 0.0 && spec.eps < 1.0)) return fail("scaling eps must lie in (0, 1)", spec.eps);
      break;
    case PotentialKind::CoulombStep:
      if (!(spec.radius > 0.0) || !std::isfinite(spec.radius)) return fail("step radius must be > 0", spec.radius);
      if (spec.height < 0.0) return fail("V >= -nu/r violated: step height is negative", spec.height);
      break;
  }
  if (spec.cutoff && !(*spec.cutoff > 0.0)) return fail("cutoff must be > 0", *spec.cutoff);
  const double sup = potential_sup_bound(spec);
  const double bound = 1.0 + std::sqrt(1.0 - (spec.nu / crit) * (spec.nu / crit));
  if (!(sup < bound)) {
    std::ostringstream os;
    os << "sup V = " << sup << " >= 1 + sqrt(1 - " << (spec.dim == SpaceDim::ThreeD ? "nu^2" : "4 nu^2") << ") = " << bound;
    return fail(os.str(), sup);
  }
  return rep;
}

int degeneracy_3d(int kappa) {
  const double j = std::abs(kappa) - 0.5;
  return static_cast<int>(2.0 * j + 1.0);
}

Sector make_sector(SpaceDim dim, double coupling) {
  Sector s;
  s.dim = dim;
  s.coupling = coupling;
  if (dim == SpaceDim::ThreeD) {
    if (coupling == 0.0 || coupling != std::round(coupling))
      throw std::domain_error("3d sector coupling must be a nonzero integer");
    s.degeneracy = degeneracy_3d(static_cast<int>(coupling));
  } else {
    if (coupling - 0.5 != std::round(coupling - 0.5))
      throw std::domain_error("2d sector coupling must be a half-odd integer");
    s.degeneracy = 1;
  }
  return s;
}

std::vector<Sector> enumerate_sectors(SpaceDim dim, double coupling_max) {
  const double first = dim == SpaceDim::ThreeD ? 1.0 : 0.5;
  if (!(coupling_max >= first)) throw std::domain_error("enumerate_sectors: coupling_max below the smallest sector");
  std::vector<Sector> out;
  for (double c = first; c <= coupling_max + 1e-12; c += 1.0) {
    out.push_back(make_sector(dim, -c));
    out.push_back(make_sector(dim, c));
  }
  return out;
}

double indicial_exponent(double coupling, double nu) {
  const double c = std::abs(coupling);
  if (nu > c) throw std::domain_error("indicial_exponent: nu exceeds |coupling| (overcritical sector)");
  return std::sqrt((c - nu) * (c + nu));
}

GapWindow gap_window(const PotentialSpec& spec) {
  GapWindow w;
  w.lower = std::max(potential_sup_bound(spec) - 1.0, -1.0);
  w.upper = 1.0;
  return w;
}

}  // namespace dirac_gap
