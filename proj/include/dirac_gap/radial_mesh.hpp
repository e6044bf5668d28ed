#pragma once

#include <Eigen/Core>

#include <string>
#include <variant>

namespace dirac_gap {

/// Nodes r_i = r_max (i/n)^grade, i = 0..n: n elements, n - 1 interior dof.
struct AlgebraicMeshParams {
  double r_max = 200.0;
  int n = 8000;
  double grade = 6.0;
  friend bool operator==(const AlgebraicMeshParams&, const AlgebraicMeshParams&) = default;
};

/// Origin plus n + 1 geometric nodes r_min (r_max/r_min)^(i/n), i = 0..n:
/// n + 1 elements, n interior dof.
struct GeometricMeshParams {
  double r_min = 1e-8;
  double r_max = 200.0;
  int n = 16000;
  friend bool operator==(const GeometricMeshParams&, const GeometricMeshParams&) = default;
};

using MeshParams = std::variant<AlgebraicMeshParams, GeometricMeshParams>;

/// Geometric mesh with a fixed number of nodes per decade. Meshes built with the
/// same r_max and per_decade but different r_min (integer decades apart) are nested.
GeometricMeshParams geometric_per_decade(double r_min, double r_max, int per_decade);

/// Parses "algebraic:rmax=200,n=8000,p=6" or "geometric:rmin=1e-8,rmax=200,n=16000".
MeshParams parse_mesh_params(const std::string& text);
std::string format_mesh_params(const MeshParams& params);

class RadialMesh {
 public:
  /// Throws std::domain_error on invalid parameters.
  explicit RadialMesh(const MeshParams& params);

  const MeshParams& params() const { return params_; }
  /// Strictly increasing, nodes()[0] == 0, nodes()[last] == r_max.
  const Eigen::VectorXd& nodes() const { return nodes_; }
  Eigen::Index elements() const { return nodes_.size() - 1; }
  /// Interior nodes carry the hat functions; both end nodes are Dirichlet.
  Eigen::Index dof() const { return nodes_.size() - 2; }
  double r_max() const { return nodes_[nodes_.size() - 1]; }

 private:
  MeshParams params_;
  Eigen::VectorXd nodes_;
};

inline RadialMesh build_mesh(const MeshParams& params) { return RadialMesh(params); }

}  // namespace dirac_gap
