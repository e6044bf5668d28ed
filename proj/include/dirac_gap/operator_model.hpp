#pragma once

#include <optional>
#include <string>
#include <vector>

namespace dirac_gap {

enum class SpaceDim { ThreeD, TwoD };

/// Largest Coulomb coupling with a distinguished self-adjoint extension.
constexpr double critical_coupling(SpaceDim dim) { return dim == SpaceDim::ThreeD ? 1.0 : 0.5; }

const char* to_string(SpaceDim dim);

enum class PotentialKind { Coulomb, Truncated, Scaled, CoulombStep };

const char* to_string(PotentialKind kind);

/// Radial electrostatic potential built on the attractive Coulomb tail -nu/r.
///
///   Coulomb      V(r) = -nu/r
///   Truncated    V(r) = max(-nu/r, -1/eps)            (eps = +inf: no cutoff)
///   Scaled       V(r) = (1 - eps) * (-nu/r),           0 < eps < 1
///   CoulombStep  V(r) = -nu/r + height * [r < radius]
///
/// Independently of the kind, an optional `cutoff` applies V <- max(V, -1/cutoff);
/// this is how truncation ladders are formed on non-Coulomb bases.
struct PotentialSpec {
  SpaceDim dim = SpaceDim::ThreeD;
  PotentialKind kind = PotentialKind::Coulomb;
  double nu = 0.5;
  double eps = 0.0;
  double height = 0.0;
  double radius = 1.0;
  std::optional<double> cutoff;

  static PotentialSpec coulomb(double nu, SpaceDim dim = SpaceDim::ThreeD);
  static PotentialSpec truncated(double nu, double eps, SpaceDim dim = SpaceDim::ThreeD);
  static PotentialSpec scaled(double nu, double eps, SpaceDim dim = SpaceDim::ThreeD);
  static PotentialSpec coulomb_step(double nu, double height, double radius, SpaceDim dim = SpaceDim::ThreeD);

  friend bool operator==(const PotentialSpec&, const PotentialSpec&) = default;
};

/// V(r) for r > 0. Throws std::domain_error for r <= 0.
double evaluate_potential(const PotentialSpec& spec, double r);

/// Limit of V at the origin, or nullopt when V -> -infinity there.
std::optional<double> potential_at_origin(const PotentialSpec& spec);

/// Upper bound on sup V used by the admissibility test and the gap window.
/// Exact for all kinds except CoulombStep, where `height` is reported.
double potential_sup_bound(const PotentialSpec& spec);

/// Radii where V is not smooth (cutoff kinks, step edges); quadrature splits there.
std::vector<double> potential_breakpoints(const PotentialSpec& spec);

/// Returns `spec` with its potential truncated below at -1/eps.
PotentialSpec with_truncation(const PotentialSpec& spec, double eps);

struct AdmissibilityReport {
  bool ok = true;
  std::string violation;
  double witness = 0.0;

  explicit operator bool() const { return ok; }
};

/// Checks 0 < nu <= nu_crit, V >= -nu/r and sup V < 1 + sqrt(1 - (nu/nu_crit)^2).
AdmissibilityReport check_admissible(const PotentialSpec& spec);

/// One angular-momentum channel. In 3d `coupling` is the integer kappa; in 2d
/// it is the half-odd-integer kappa_eff = l + 1/2.
struct Sector {
  SpaceDim dim = SpaceDim::ThreeD;
  double coupling = -1.0;
  int degeneracy = 2;

  int kappa() const { return static_cast<int>(coupling); }
  friend bool operator==(const Sector&, const Sector&) = default;
};

/// Number of magnetic substates in a 3d sector: 2j + 1 with j = |kappa| - 1/2.
int degeneracy_3d(int kappa);

Sector make_sector(SpaceDim dim, double coupling);

/// All sectors with |coupling| <= coupling_max, ordered by |coupling| then sign
/// (negative first). Throws std::domain_error below the smallest coupling.
std::vector<Sector> enumerate_sectors(SpaceDim dim, double coupling_max);

/// s = sqrt(coupling^2 - nu^2); throws std::domain_error if nu > |coupling|.
double indicial_exponent(double coupling, double nu);
inline double indicial_exponent(const Sector& sector, double nu) { return indicial_exponent(sector.coupling, nu); }

/// Energy interval (lower, upper] searched for gap eigenvalues.
struct GapWindow {
  double lower = -1.0;
  double upper = 1.0;

  bool contains(double e) const { return lower < e && e <= upper; }
};

GapWindow gap_window(const PotentialSpec& spec);

}  // namespace dirac_gap
