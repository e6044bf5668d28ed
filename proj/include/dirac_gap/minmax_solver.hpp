#pragma once

#include "dirac_gap/operator_model.hpp"
#include "dirac_gap/radial_forms.hpp"
#include "dirac_gap/radial_mesh.hpp"
#include "dirac_gap/tridiagonal.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace dirac_gap {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PencilEigenpair {
  double mu = 0.0;
  Eigen::VectorXd x;  // x^T M x = 1
  double residual = 0.0;  // ||Q x - mu M x|| / (||Q|| ||x||)
};

/// k-th smallest eigenvalue (1-based) of Q x = mu M x for tridiagonal Q and M > 0:
/// bisection on inertia counts of Q - mu M, then shifted inverse iteration.
PencilEigenpair pencil_eig_k(const Tridiagonal& q, const Tridiagonal& m, Eigen::Index k);
PencilEigenpair pencil_eig_k(const AssembledForms& forms, double energy, Eigen::Index k);

/// mu_k'(E) = x_k^T Q'(E) x_k for an M-normalized eigenvector.
double pencil_slope(const AssembledForms& forms, double energy, const Eigen::VectorXd& x);

struct RootOptions {
  double tol = 1e-10;
  /// Newton polish starts once the bisection bracket is this narrow.
  double newton_switch = 1e-4;
  /// Distance of the initial bracket from the gap edges.
  double edge_offset = 1e-9;
  int max_iterations = 400;
};

struct MinMaxLevel {
  Sector sector;
  int k_in_sector = 1;
  double energy = 0.0;
  double bracket_width = 0.0;
  double residual = 0.0;  // |mu_k(E)|
  bool shared_bracket = false;
  Eigen::VectorXd u;  // hat coefficients, u^T M u = 1
  Eigen::VectorXd v;  // lower component on all mesh nodes
};

/// The k-th level sits at or above the essential-spectrum edge.
struct NoLevelBelowB {
  double probe_energy = 1.0;
};

using LevelOutcome = std::variant<MinMaxLevel, NoLevelBelowB>;

/// Root of mu_k(E) = 0 in the gap window. Throws SolverError when the level
/// falls below the window or the inertia sequence is not monotone in E.
LevelOutcome level_root(const AssembledForms& forms, int k, const GapWindow& window, const RootOptions& opts = {});

/// Lower radial component v = (u' + kappa u / r) / (1 + E - V) on every mesh node,
/// with u' the mean of the adjacent element slopes.
Eigen::VectorXd recover_lower(const Eigen::VectorXd& u, const AssembledForms& forms, double energy);

/// L2 norm of a nodal piecewise-linear function on the mesh (end nodes included).
double nodal_l2_norm(const RadialMesh& mesh, const Eigen::VectorXd& nodal);

struct ExpandedLevel {
  double energy = 0.0;
  double coupling = 0.0;
  int k_in_sector = 1;
  int copy = 0;
};

struct SpectrumOptions {
  double coupling_max = 1.0;
  int k_max = 1;
  RootOptions root;
  int gauss_order = 6;
  int threads = 1;
};

struct SpectrumReport {
  PotentialSpec spec;
  MeshParams mesh;
  Eigen::Index dof = 0;
  GapWindow gap;
  std::vector<MinMaxLevel> levels;  // ascending in E
  std::vector<ExpandedLevel> expanded_levels;
  double walltime_s = 0.0;
};

/// Solves every (sector, k) pair and merges the levels in canonical order.
SpectrumReport spectrum(const PotentialSpec& spec, const MeshParams& mesh, const SpectrumOptions& opts);

}  // namespace dirac_gap
