#include "dirac_gap/radial_forms.hpp"

#include "dirac_gap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dirac_gap {

Eigen::VectorXd TrialBasis::nodal_values(const Eigen::VectorXd& coeffs) const {
  if (coeffs.size() != dof()) throw std::invalid_argument("TrialBasis: coefficient length must equal dof");
  Eigen::VectorXd all = Eigen::VectorXd::Zero(mesh_.nodes().size());
  all.segment(1, dof()) = coeffs;
  return all;
}

double TrialBasis::evaluate(const Eigen::VectorXd& coeffs, double r) const {
  const auto& x = mesh_.nodes();
  if (r <= 0.0 || r >= mesh_.r_max()) return 0.0;
  const auto it = std::upper_bound(x.data(), x.data() + x.size(), r);
  const Eigen::Index e = (it - x.data()) - 1;
  const Eigen::VectorXd all = nodal_values(coeffs);
  const double t = (r - x[e]) / (x[e + 1] - x[e]);
  return (1.0 - t) * all[e] + t * all[e + 1];
}

QuadratureCache build_quadrature(const RadialMesh& mesh, const Sector& sector, const PotentialSpec& spec, int order,
                                 double max_cell_ratio) {
  if (order < 4) throw std::invalid_argument("build_quadrature: Gauss order must be >= 4");
  QuadratureCache cache;
  cache.order = order;
  cache.max_cell_ratio = max_cell_ratio;
  const auto rule = gauss_legendre<double>(order);
  const auto breaks = potential_breakpoints(spec);
  const auto& x = mesh.nodes();
  const double kappa = sector.coupling;
  cache.points.reserve(static_cast<std::size_t>(mesh.elements() * order));
  for (Eigen::Index e = 0; e < mesh.elements(); ++e) {
    const double ra = x[e], rb = x[e + 1], h = rb - ra;
    for (const auto& [lo, hi] : geometric_cells(ra, rb, max_cell_ratio, breaks)) {
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (int q = 0; q < order; ++q) {
        QuadraturePoint p;
        p.element = e;
        p.r = mid + half * rule.nodes[q];
        p.weight = half * rule.weights[q];
        p.potential = evaluate_potential(spec, p.r);
        p.b_left = (rb - p.r) / h;
        p.b_right = (p.r - ra) / h;
        p.d_left = -1.0 / h + kappa * p.b_left / p.r;
        // b_right / r is 1/h exactly on the element touching the origin
        p.d_right = 1.0 / h + kappa * (ra == 0.0 ? 1.0 / h : p.b_right / p.r);
        cache.points.push_back(p);
      }
    }
  }
  return cache;
}

namespace {

// Adds w * (f_left, f_right) outer (g_left, g_right) of element e into t.
inline void scatter(Tridiagonal& t, Eigen::Index e, Eigen::Index n_elem, double ll, double lr, double rr) {
  const bool left = e >= 1;              // node e is a dof (index e - 1)
  const bool right = e + 1 <= n_elem - 1;  // node e + 1 is a dof (index e)
  if (left) t.diag()[e - 1] += ll;
  if (right) t.diag()[e] += rr;
  if (left && right) t.off()[e - 1] += lr;
}

}  // namespace

AssembledForms::AssembledForms(TrialBasis basis, Sector sector, PotentialSpec spec, int gauss_order)
    : basis_(std::move(basis)), sector_(sector), spec_(std::move(spec)), window_(gap_window(spec_)) {
  if (sector_.dim != spec_.dim) throw std::invalid_argument("assemble: sector and potential dimensions differ");
  if (const auto adm = check_admissible(spec_); !adm) throw AssemblyError("assemble: inadmissible potential: " + adm.violation);
  quad_ = build_quadrature(basis_.mesh(), sector_, spec_, gauss_order);
  const Eigen::Index n = dof();
  const Eigen::Index ne = basis_.mesh().elements();
  mass_ = Tridiagonal(n);
  potential_ = Tridiagonal(n);
  for (const auto& p : quad_.points) {
    if (!(1.0 + window_.lower - p.potential > 0.0)) {
      std::ostringstream os;
      os << "assemble: 1 + E_min - V <= 0 at r = " << p.r << " (V = " << p.potential << ")";
      throw AssemblyError(os.str());
    }
    const double w = p.weight;
    scatter(mass_, p.element, ne, w * p.b_left * p.b_left, w * p.b_left * p.b_right, w * p.b_right * p.b_right);
    const double wv = w * p.potential;
    scatter(potential_, p.element, ne, wv * p.b_left * p.b_left, wv * p.b_left * p.b_right,
            wv * p.b_right * p.b_right);
  }
}

Tridiagonal AssembledForms::weighted_kinetic(double energy, int power) const {
  const Eigen::Index ne = basis_.mesh().elements();
  Tridiagonal t(dof());
  for (const auto& p : quad_.points) {
    const double inv = 1.0 / (1.0 + energy - p.potential);
    const double w = p.weight * (power == 1 ? inv : inv * inv);
    scatter(t, p.element, ne, w * p.d_left * p.d_left, w * p.d_left * p.d_right, w * p.d_right * p.d_right);
  }
  return t;
}

Tridiagonal AssembledForms::q(double energy) const {
  Tridiagonal t = a1(energy);
  t += potential_;
  t += (1.0 - energy) * mass_;
  return t;
}

Tridiagonal AssembledForms::dq(double energy) const {
  Tridiagonal t = a2(energy);
  t += mass_;
  t *= -1.0;
  return t;
}

double AssembledForms::form_value(double energy, const Eigen::VectorXd& u) const {
  if (u.size() != dof()) throw std::invalid_argument("form_value: coefficient length must equal dof");
  return q(energy).quadratic(u);
}

}  // namespace dirac_gap
