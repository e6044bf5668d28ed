#pragma once

#include "dirac_gap/minmax_solver.hpp"

#include <optional>
#include <vector>

namespace dirac_gap {

struct MeshConvergenceRow {
  Eigen::Index dof = 0;
  double lambda = 0.0;
  double decrement = 0.0;  // previous row minus this one; 0 on the first row
};

struct MeshConvergence {
  PotentialSpec spec;
  Sector sector;
  int k = 1;
  std::vector<MeshParams> meshes;
  std::vector<MeshConvergenceRow> rows;
  bool non_increasing = true;
  /// Aitken extrapolation from the last three rows; informational only.
  std::optional<double> extrapolated;
};

/// True when every node of `coarse` is (to 1e-12 relative) a node of `fine`.
bool mesh_nested(const RadialMesh& coarse, const RadialMesh& fine);

/// Level k of one sector on each mesh of a nested ladder (at least 3 meshes).
MeshConvergence converge_mesh(const PotentialSpec& spec, const Sector& sector, int k, const std::vector<MeshParams>& ladder,
                              const RootOptions& root = {}, int gauss_order = 6);

}  // namespace dirac_gap
