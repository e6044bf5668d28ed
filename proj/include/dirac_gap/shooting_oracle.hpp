#pragma once

#include "dirac_gap/operator_model.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dirac_gap {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ShootingConfig {
  double r0 = 1e-10;
  double r_match = 1.0;
  /// Fixed outer radius; when empty r_out = min(40 / sqrt(1 - E^2), 5000).
  std::optional<double> r_out;
  double ode_tol = 1e-12;
  /// Looser integrator tolerance used only while scanning for sign changes.
  double scan_tol = 1e-9;
  int scan = 2000;
  double bisect_tol = 1e-12;

  double outer_radius(double energy) const;
  /// Throws std::invalid_argument naming the violated field.
  void validate() const;
};

struct OracleLevel {
  Sector sector;
  int n_index = 1;
  double energy = 0.0;
  /// |W(E)| / (|y_L| |y_R|) at the matching radius.
  double wronskian_residual = 0.0;
};

using Spinor2 = std::array<double, 2>;

/// Regular solution (nu, s + kappa) r0^s at the origin. For |nu| < 1e-8 the free
/// regular direction is used instead: (1, 0) for kappa < 0, (0, 1) for kappa > 0.
Spinor2 regular_start(double kappa, double nu, double energy, double r0);

/// Decaying solution at r_out, normalized: (1, -sqrt((1-E)/(1+E))) / norm.
Spinor2 decaying_start(double energy, double r_out);

/// W(E) = u_L v_R - v_L u_R at r_match for V = -nu/r, with the given integrator tolerance.
double wronskian(double kappa, double nu, double energy, const ShootingConfig& cfg, double tol);

/// First `count` Wronskian roots in the gap, ascending.
std::vector<OracleLevel> oracle_levels(const Sector& sector, double nu, const ShootingConfig& cfg, int count);

/// Hydrogenic closed form E = (1 + nu^2 / (n_r + sqrt(kappa^2 - nu^2))^2)^(-1/2).
/// n_r = 0 is admitted only for kappa < 0, the sector holding the nodeless level.
double fine_structure(double nu, double kappa, int n_r);

/// Closed form for the k-th level (1-based) of a sector: n_r = k - 1 (kappa < 0) or k (kappa > 0).
double fine_structure_level(double nu, double kappa, int k);

/// CSV with header "sector,n_index,E,residual".
void write_oracle_csv(std::ostream& os, const std::vector<OracleLevel>& levels);
std::vector<OracleLevel> read_oracle_csv(std::istream& is, SpaceDim dim);

}  // namespace dirac_gap
