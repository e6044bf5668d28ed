#pragma once

#include "dirac_gap/operator_model.hpp"
#include "dirac_gap/radial_mesh.hpp"
#include "dirac_gap/tridiagonal.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <vector>

namespace dirac_gap {

/// Continuous piecewise-linear hats b_1..b_{n-1} on a radial mesh, b_i(r_j) = delta_ij.
/// Every trial function vanishes at the origin and at r_max.
class TrialBasis {
 public:
  explicit TrialBasis(RadialMesh mesh) : mesh_(std::move(mesh)) {}
  explicit TrialBasis(const MeshParams& params) : mesh_(params) {}

  const RadialMesh& mesh() const { return mesh_; }
  Eigen::Index dof() const { return mesh_.dof(); }

  /// Nodal values including the two Dirichlet end nodes.
  Eigen::VectorXd nodal_values(const Eigen::VectorXd& coeffs) const;
  /// Interpolant value at r in [0, r_max].
  double evaluate(const Eigen::VectorXd& coeffs, double r) const;

 private:
  RadialMesh mesh_;
};

class AssemblyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gauss points of every element with cached hat values, hat "kinetic" values
/// d = b' + kappa b / r, and V. Elements with a large end ratio are split into
/// geometric cells (and split at potential kinks) so the integrals of the
/// rational integrands stay at round-off accuracy.
struct QuadraturePoint {
  Eigen::Index element = 0;
  double r = 0.0;
  double weight = 0.0;
  double potential = 0.0;
  double b_left = 0.0, b_right = 0.0;
  double d_left = 0.0, d_right = 0.0;
};

struct QuadratureCache {
  int order = 6;
  double max_cell_ratio = 1.1;
  std::vector<QuadraturePoint> points;
};

QuadratureCache build_quadrature(const RadialMesh& mesh, const Sector& sector, const PotentialSpec& spec,
                                 int order = 6, double max_cell_ratio = 1.1);

/// Per-sector matrices of the reduced form
///   q_E(u) = int (u' + kappa u / r)^2 / (1 + E - V) dr + int (1 + V - E) u^2 dr
/// on the hat basis:  Q(E) = A1(E) + M + P - E M,  Q'(E) = -A2(E) - M.
/// M and P are fixed at construction; A1/A2 are rebuilt per energy from the
/// cached quadrature data and all energy-dependent calls are const/reentrant.
class AssembledForms {
 public:
  AssembledForms(TrialBasis basis, Sector sector, PotentialSpec spec, int gauss_order = 6);

  const TrialBasis& basis() const { return basis_; }
  const Sector& sector() const { return sector_; }
  const PotentialSpec& spec() const { return spec_; }
  const GapWindow& window() const { return window_; }
  const QuadratureCache& quadrature() const { return quad_; }
  Eigen::Index dof() const { return basis_.dof(); }

  const Tridiagonal& mass() const { return mass_; }
  const Tridiagonal& potential() const { return potential_; }
  Tridiagonal a1(double energy) const { return weighted_kinetic(energy, 1); }
  Tridiagonal a2(double energy) const { return weighted_kinetic(energy, 2); }
  Tridiagonal q(double energy) const;
  Tridiagonal dq(double energy) const;

  /// u^T Q(E) u.
  double form_value(double energy, const Eigen::VectorXd& u) const;

 private:
  Tridiagonal weighted_kinetic(double energy, int power) const;

  TrialBasis basis_;
  Sector sector_;
  PotentialSpec spec_;
  GapWindow window_;
  QuadratureCache quad_;
  Tridiagonal mass_;
  Tridiagonal potential_;
};

inline AssembledForms assemble(const TrialBasis& basis, const Sector& sector, const PotentialSpec& spec,
                               int gauss_order = 6) {
  return AssembledForms(basis, sector, spec, gauss_order);
}

inline double form_value(const AssembledForms& forms, double energy, const Eigen::VectorXd& u) {
  return forms.form_value(energy, u);
}

}  // namespace dirac_gap
