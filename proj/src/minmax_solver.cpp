#include "dirac_gap/minmax_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <future>
#include <sstream>
#include <thread>

namespace dirac_gap {

namespace {

Eigen::Index count_below(const Tridiagonal& q, const Tridiagonal& m, double sigma) {
  return inertia_negcount(q - sigma * m).negative;
}

void fix_sign(Eigen::VectorXd& x) {
  Eigen::Index imax = 0;
  x.cwiseAbs().maxCoeff(&imax);
  if (x[imax] < 0.0) x = -x;
}

}  // namespace

PencilEigenpair pencil_eig_k(const Tridiagonal& q, const Tridiagonal& m, Eigen::Index k) {
  const Eigen::Index n = q.size();
  if (m.size() != n) throw std::invalid_argument("pencil_eig_k: Q and M sizes differ");
  if (k < 1 || k > n) throw std::invalid_argument("pencil_eig_k: k must lie in [1, dof]");

  // Bracket [lo, hi] with count(lo) < k <= count(hi).
  double lo = -1.0, hi = 1.0, step = 1.0;
  while (count_below(q, m, lo) >= k) {
    hi = lo;
    lo -= step;
    step *= 2.0;
    if (!std::isfinite(lo)) throw SolverError("pencil_eig_k: cannot bracket eigenvalue from below");
  }
  step = 1.0;
  while (count_below(q, m, hi) < k) {
    lo = std::max(lo, hi);
    hi += step;
    step *= 2.0;
    if (!std::isfinite(hi)) throw SolverError("pencil_eig_k: cannot bracket eigenvalue from above");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 1e-13 * std::max(1.0, std::abs(mid))) break;
    if (count_below(q, m, mid) >= k)
      hi = mid;
    else
      lo = mid;
  }
  const double sigma = 0.5 * (lo + hi);

  const Tridiagonal shifted = q - sigma * m;
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3);
  x /= std::sqrt(m.quadratic(x));
  const double qnorm = std::max(q.norm_inf(), m.norm_inf() * std::abs(sigma));
  PencilEigenpair out;
  // Graded meshes make ||Q|| huge, so the scaled residual alone stops too early;
  // also wait for the Rayleigh quotient to settle.
  double prev_mu = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 30; ++it) {
    Eigen::VectorXd y = solve_tridiagonal(shifted, Eigen::VectorXd(m * x));
    const double ny = std::sqrt(m.quadratic(y));
    if (!(ny > 0.0) || !std::isfinite(ny)) throw SolverError("pencil_eig_k: inverse iteration broke down");
    x = y / ny;
    out.mu = q.quadratic(x);
    const Eigen::VectorXd r = q * x - out.mu * (m * x);
    out.residual = r.norm() / (qnorm * x.norm());
    const bool settled = std::abs(out.mu - prev_mu) <= 1e-15 * std::max(1.0, std::abs(out.mu));
    prev_mu = out.mu;
    if (it >= 1 && out.residual <= 1e-13 && settled) break;
  }
  if (!(out.residual <= 1e-10)) {
    std::ostringstream os;
    os << "pencil_eig_k: no convergence, last residual " << out.residual;
    throw SolverError(os.str());
  }
  fix_sign(x);
  out.x = std::move(x);
  return out;
}

PencilEigenpair pencil_eig_k(const AssembledForms& forms, double energy, Eigen::Index k) {
  return pencil_eig_k(forms.q(energy), forms.mass(), k);
}

double pencil_slope(const AssembledForms& forms, double energy, const Eigen::VectorXd& x) {
  return forms.dq(energy).quadratic(x);
}

LevelOutcome level_root(const AssembledForms& forms, int k, const GapWindow& window, const RootOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("level_root: tol must be > 0");
  if (k < 1 || k > forms.dof()) throw std::invalid_argument("level_root: k must lie in [1, dof]");
  auto count = [&](double e) { return inertia_negcount(forms.q(e)).negative; };

  double lo = window.lower + opts.edge_offset;
  double hi = window.upper - std::max(opts.edge_offset, opts.tol);
  Eigen::Index c_lo = count(lo), c_hi = count(hi);
  if (c_hi < k) return NoLevelBelowB{hi};
  if (c_lo >= k) {
    std::ostringstream os;
    os << "level_root: level " << k << " lies below the gap window (count " << c_lo << " at E = " << lo << ")";
    throw SolverError(os.str());
  }

  auto update = [&](double e) {
    const Eigen::Index c = count(e);
    if (c < c_lo || c > c_hi) throw SolverError("level_root: non-monotone inertia sequence in E (assembly bug?)");
    if (c >= k) {
      hi = e;
      c_hi = c;
    } else {
      lo = e;
      c_lo = c;
    }
  };

  double estimate = 0.5 * (lo + hi);
  for (int it = 0; it < opts.max_iterations && hi - lo > opts.tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo > opts.newton_switch) {
      update(mid);
      estimate = 0.5 * (lo + hi);
      continue;
    }
    const double width_before = hi - lo;
    const auto pair = pencil_eig_k(forms, estimate, k);
    const double slope = pencil_slope(forms, estimate, pair.x);
    if (!(slope < 0.0)) throw SolverError("level_root: Hellmann-Feynman slope is not negative");
    double next = estimate - pair.mu / slope;
    if (!(next > lo && next < hi)) next = mid;
    const double delta = 0.25 * opts.tol;
    if (next - delta > lo) update(next - delta);
    if (next + delta < hi) update(next + delta);
    estimate = std::clamp(next, lo, hi);
    if (hi - lo > 0.5 * width_before) {
      update(0.5 * (lo + hi));
      estimate = 0.5 * (lo + hi);
    }
  }

  MinMaxLevel level;
  level.sector = forms.sector();
  level.k_in_sector = k;
  level.energy = 0.5 * (lo + hi);
  level.bracket_width = hi - lo;
  const auto pair = pencil_eig_k(forms, level.energy, k);
  level.residual = std::abs(pair.mu);
  level.u = pair.x;
  level.v = recover_lower(level.u, forms, level.energy);
  return level;
}

Eigen::VectorXd recover_lower(const Eigen::VectorXd& u, const AssembledForms& forms, double energy) {
  const auto& mesh = forms.basis().mesh();
  const auto& r = mesh.nodes();
  const Eigen::VectorXd all = forms.basis().nodal_values(u);
  const Eigen::Index nn = r.size();
  const double kappa = forms.sector().coupling;
  Eigen::VectorXd slope(nn - 1);
  for (Eigen::Index e = 0; e + 1 < nn; ++e) slope[e] = (all[e + 1] - all[e]) / (r[e + 1] - r[e]);
  Eigen::VectorXd v(nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    const double du = i == 0 ? slope[0] : (i == nn - 1 ? slope[nn - 2] : 0.5 * (slope[i - 1] + slope[i]));
    if (i == 0) {
      const auto v0 = potential_at_origin(forms.spec());
      v[i] = v0 ? (1.0 + kappa) * slope[0] / (1.0 + energy - *v0) : 0.0;
      continue;
    }
    v[i] = (du + kappa * all[i] / r[i]) / (1.0 + energy - evaluate_potential(forms.spec(), r[i]));
  }
  return v;
}

double nodal_l2_norm(const RadialMesh& mesh, const Eigen::VectorXd& f) {
  const auto& r = mesh.nodes();
  if (f.size() != r.size()) throw std::invalid_argument("nodal_l2_norm: need one value per mesh node");
  double acc = 0.0;
  for (Eigen::Index e = 0; e + 1 < r.size(); ++e)
    acc += (r[e + 1] - r[e]) / 3.0 * (f[e] * f[e] + f[e] * f[e + 1] + f[e + 1] * f[e + 1]);
  return std::sqrt(acc);
}

namespace {

std::vector<MinMaxLevel> solve_sector(const PotentialSpec& spec, const TrialBasis& basis, const Sector& sector,
                                      const SpectrumOptions& opts) {
  std::vector<MinMaxLevel> out;
  const AssembledForms forms(basis, sector, spec, opts.gauss_order);
  for (int k = 1; k <= opts.k_max && k <= forms.dof(); ++k) {
    LevelOutcome outcome;
    try {
      outcome = level_root(forms, k, forms.window(), opts.root);
    } catch (const SolverError& err) {
      std::ostringstream os;
      os << err.what() << " [sector kappa = " << sector.coupling << ", k = " << k << "]";
      throw SolverError(os.str());
    }
    if (std::holds_alternative<NoLevelBelowB>(outcome)) break;
    auto level = std::get<MinMaxLevel>(std::move(outcome));
    if (!(level.energy < forms.window().upper - opts.root.tol)) break;
    if (!out.empty() && std::abs(level.energy - out.back().energy) <= opts.root.tol) {
      level.shared_bracket = true;
      out.back().shared_bracket = true;
    }
    out.push_back(std::move(level));
  }
  return out;
}

}  // namespace

SpectrumReport spectrum(const PotentialSpec& spec, const MeshParams& mesh, const SpectrumOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  if (const auto adm = check_admissible(spec); !adm) throw std::invalid_argument("spectrum: " + adm.violation);
  const auto sectors = enumerate_sectors(spec.dim, opts.coupling_max);
  const TrialBasis basis(mesh);

  std::vector<std::vector<MinMaxLevel>> per_sector(sectors.size());
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(opts.threads, 1)), 1, sectors.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < sectors.size(); ++i) per_sector[i] = solve_sector(spec, basis, sectors[i], opts);
  } else {
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w)
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < sectors.size(); i += workers) per_sector[i] = solve_sector(spec, basis, sectors[i], opts);
      }));
    for (auto& j : jobs) j.get();
  }

  SpectrumReport rep;
  rep.spec = spec;
  rep.mesh = mesh;
  rep.dof = basis.dof();
  rep.gap = gap_window(spec);
  for (auto& levels : per_sector)
    for (auto& l : levels) rep.levels.push_back(std::move(l));
  std::stable_sort(rep.levels.begin(), rep.levels.end(), [](const MinMaxLevel& a, const MinMaxLevel& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    if (a.sector.coupling != b.sector.coupling) return a.sector.coupling < b.sector.coupling;
    return a.k_in_sector < b.k_in_sector;
  });
  for (const auto& l : rep.levels)
    for (int c = 0; c < l.sector.degeneracy; ++c) rep.expanded_levels.push_back({l.energy, l.sector.coupling, l.k_in_sector, c});
  rep.walltime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace dirac_gap
