#include "dirac_gap/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dirac_gap {

bool mesh_nested(const RadialMesh& coarse, const RadialMesh& fine) {
  const auto& c = coarse.nodes();
  const auto& f = fine.nodes();
  Eigen::Index j = 0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double tol = 1e-12 * std::max(std::abs(c[i]), 1e-300);
    while (j < f.size() && f[j] < c[i] - tol) ++j;
    if (j == f.size() || std::abs(f[j] - c[i]) > tol) return false;
  }
  return true;
}

MeshConvergence converge_mesh(const PotentialSpec& spec, const Sector& sector, int k, const std::vector<MeshParams>& ladder,
                              const RootOptions& root, int gauss_order) {
  if (ladder.size() < 3) throw std::invalid_argument("converge_mesh: ladder needs at least 3 meshes");
  if (k < 1) throw std::invalid_argument("converge_mesh: k must be >= 1");
  std::vector<RadialMesh> meshes;
  for (const auto& p : ladder) meshes.emplace_back(p);
  for (std::size_t i = 1; i < meshes.size(); ++i)
    if (!mesh_nested(meshes[i - 1], meshes[i]))
      throw std::invalid_argument("converge_mesh: mesh " + std::to_string(i) + " does not contain mesh " +
                                  std::to_string(i - 1));

  MeshConvergence out;
  out.spec = spec;
  out.sector = sector;
  out.k = k;
  out.meshes = ladder;
  for (auto& mesh : meshes) {
    const AssembledForms forms(TrialBasis(std::move(mesh)), sector, spec, gauss_order);
    const auto outcome = level_root(forms, k, forms.window(), root);
    const auto* level = std::get_if<MinMaxLevel>(&outcome);
    if (!level) throw SolverError("converge_mesh: level " + std::to_string(k) + " not below the gap edge on mesh " +
                                  format_mesh_params(forms.basis().mesh().params()));
    MeshConvergenceRow row{forms.dof(), level->energy, 0.0};
    if (!out.rows.empty()) {
      row.decrement = out.rows.back().lambda - row.lambda;
      if (row.decrement < -root.tol) out.non_increasing = false;
    }
    out.rows.push_back(row);
  }
  const std::size_t n = out.rows.size();
  const double d1 = out.rows[n - 2].decrement, d2 = out.rows[n - 1].decrement;
  if (std::abs(d1 - d2) > 0.0 && std::isfinite(d2 * d2 / (d1 - d2)))
    out.extrapolated = out.rows[n - 1].lambda - d2 * d2 / (d1 - d2);
  return out;
}

}  // namespace dirac_gap
