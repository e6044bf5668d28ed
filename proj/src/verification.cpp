#include "dirac_gap/verification.hpp"

#include "dirac_gap/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace dirac_gap {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <typename F>
double shared_integrate(F&& f, double a, double b, const IdentityQuadrature& quad) {
  const auto rule = gauss_legendre<double>(quad.order);
  const double h = (b - a) / quad.cells;
  double sum = 0.0;
  for (int c = 0; c < quad.cells; ++c) {
    const double lo = a + c * h, hi = c + 1 == quad.cells ? b : a + (c + 1) * h;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double cell = 0.0;
    for (int q = 0; q < quad.order; ++q) cell += rule.weights[q] * f(mid + half * rule.nodes[q]);
    sum += half * cell;
  }
  return sum;
}

double horner(const std::vector<double>& c, double x) {
  double s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
  return s;
}

double horner_derivative(const std::vector<double>& c, double x) {
  double s = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) s = s * x + static_cast<double>(k) * c[k];
  return s;
}

}  // namespace

double Bump::value(double r) const {
  if (r <= a || r >= b) return 0.0;
  const double x = (r - a) / (b - a);
  return r * r * (r - a) * (r - a) * (b - r) * (b - r) * horner(poly, x);
}

double Bump::derivative(double r) const {
  if (r <= a || r >= b) return 0.0;
  const double x = (r - a) / (b - a);
  const double p = r - a, q = b - r;
  const double g = r * r * p * p * q * q;
  const double dg = 2.0 * r * p * p * q * q + 2.0 * r * r * p * q * q - 2.0 * r * r * p * p * q;
  return dg * horner(poly, x) + g * horner_derivative(poly, x) / (b - a);
}

TrialFamily::TrialFamily(std::uint64_t seed, int size, double r_max, int degree) : seed_(seed) {
  if (size < 0) throw std::invalid_argument("TrialFamily: size must be >= 0");
  if (!(r_max > 0.0)) throw std::invalid_argument("TrialFamily: r_max must be > 0");
  if (degree < 0) throw std::invalid_argument("TrialFamily: degree must be >= 0");
  Rng rng(seed);
  trials_.reserve(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) {
    Bump u;
    u.a = std::exp(rng.uniform(std::log(0.01 * r_max / 20.0), std::log(0.5 * r_max)));
    u.b = u.a + rng.uniform(0.05, 0.95) * (r_max - u.a);
    // scale so that the envelope peaks near 1
    const double mid = 0.5 * (u.a + u.b), half = 0.5 * (u.b - u.a);
    const double scale = 1.0 / (mid * mid * half * half * half * half);
    u.poly.resize(static_cast<std::size_t>(degree) + 1);
    for (auto& c : u.poly) c = scale * rng.uniform(-1.0, 1.0);
    trials_.push_back(std::move(u));
  }
}

double hardy_value(const Bump& u, double a, double kappa, SpaceDim dim, const IdentityQuadrature& quad) {
  if (!(a > 0.0)) throw std::invalid_argument("hardy_value: a must be > 0");
  const double c = critical_coupling(dim);
  const double form = shared_integrate(
      [&](double r) {
        const double f = u.value(r), g = u.derivative(r) + kappa * f / r;
        return g * g * r / (a * r + c) + (a - c / r) * f * f;
      },
      u.a, u.b, quad);
  const double norm = shared_integrate([&](double r) { return (a + c / r) * u.value(r) * u.value(r); }, u.a, u.b, quad);
  return norm > 0.0 ? form / norm : 0.0;
}

double hardy_value_power(double t, double a, SpaceDim dim) {
  if (!(t > 0.0)) throw std::invalid_argument("hardy_value_power: t must be > 0");
  const double c = critical_coupling(dim), kappa = -c;
  auto u2 = [t](double r) { return std::exp(2.0 * (t * std::log(r) - r)); };
  const double lo = 1e-300, hi = 60.0;
  const double form = integrate(
      [&](double r) {
        const double g = t + kappa - r;
        return (g * g / (a * r + c) + (a * r - c)) * u2(r) / r;
      },
      lo, hi);
  const double norm = integrate([&](double r) { return (a * r + c) * u2(r) / r; }, lo, hi);
  return form / norm;
}

HardyResult hardy_check(double a, const TrialFamily& trials, double kappa, SpaceDim dim, const IdentityQuadrature& quad) {
  if (std::abs(std::abs(kappa) - critical_coupling(dim)) > 1e-12)
    throw std::invalid_argument("hardy_check: |kappa| must equal the critical coupling of the dimension");
  HardyResult res;
  res.min_normalized = std::numeric_limits<double>::infinity();
  for (const auto& u : trials.trials()) {
    res.min_normalized = std::min(res.min_normalized, hardy_value(u, a, kappa, dim, quad));
    ++res.evaluated;
  }
  if (res.evaluated == 0) res.min_normalized = 0.0;
  return res;
}

double IdentitySides::discrepancy() const { return std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1.0); }

IdentitySides sos_sides(const Bump& phi, SpaceDim dim, Channel channel, const IdentityQuadrature& quad) {
  const bool one = channel == Channel::Phi1;
  IdentitySides s;
  if (dim == SpaceDim::ThreeD) {
    s.lhs = kFourPi * shared_integrate(
                          [&](double r) {
                            const double f = phi.value(r);
                            const double w = phi.derivative(r) + (one ? 2.0 * f / r : 0.0);
                            return r * r * r / (1.0 + r) * w * w + (r * r - r) * f * f;
                          },
                          phi.a, phi.b, quad);
    s.rhs = kFourPi * shared_integrate(
                          [&](double r) {
                            const double f = phi.value(r);
                            const double g = r * phi.derivative(r) + f + (one ? -r * f : r * f);
                            return r / (1.0 + r) * g * g;
                          },
                          phi.a, phi.b, quad);
  } else {
    s.lhs = kTwoPi * shared_integrate(
                         [&](double r) {
                           const double f = phi.value(r);
                           const double w = phi.derivative(r) + (one ? f / r : 0.0);
                           return 2.0 * r * r / (1.0 + 2.0 * r) * w * w + (r - 0.5) * f * f;
                         },
                         phi.a, phi.b, quad);
    s.rhs = 2.0 * kTwoPi * shared_integrate(
                               [&](double r) {
                                 const double f = phi.value(r);
                                 const double g = r * phi.derivative(r) + 0.5 * f + (one ? -r * f : r * f);
                                 return g * g / (1.0 + 2.0 * r);
                               },
                               phi.a, phi.b, quad);
  }
  return s;
}

double sos_identity_check(const TrialFamily& trials, SpaceDim dim, Channel channel, const IdentityQuadrature& quad) {
  double worst = 0.0;
  for (const auto& u : trials.trials()) worst = std::max(worst, sos_sides(u, dim, channel, quad).discrepancy());
  return worst;
}

IdentitySides qshift_sides(const Bump& phi, double lambda, Channel channel, const IdentityQuadrature& quad) {
  if (!(lambda > -1.0 && lambda < 1.0)) throw std::invalid_argument("qshift_sides: lambda must lie in (-1, 1)");
  const bool one = channel == Channel::Phi1;
  auto w = [&](double r) { return phi.derivative(r) + (one ? 2.0 * phi.value(r) / r : 0.0); };
  auto q = [&](double lam) {
    return kFourPi * shared_integrate(
                         [&](double r) {
                           const double f = phi.value(r), g = w(r);
                           return r * r * r / (1.0 + (1.0 + lam) * r) * g * g + (1.0 - lam - 1.0 / r) * r * r * f * f;
                         },
                         phi.a, phi.b, quad);
  };
  const double shift_kinetic = kFourPi * shared_integrate(
                                             [&](double r) {
                                               const double g = w(r);
                                               return r * r * r * r * g * g / ((1.0 + r) * (1.0 + (1.0 + lambda) * r));
                                             },
                                             phi.a, phi.b, quad);
  const double shift_mass =
      kFourPi * shared_integrate([&](double r) { return r * r * phi.value(r) * phi.value(r); }, phi.a, phi.b, quad);
  return {q(lambda), q(0.0) - lambda * shift_kinetic - lambda * shift_mass};
}

double qshift_identity_check(const TrialFamily& trials, const std::vector<double>& lambdas, Channel channel,
                             const IdentityQuadrature& quad) {
  double worst = 0.0;
  for (double lam : lambdas)
    for (const auto& u : trials.trials()) worst = std::max(worst, qshift_sides(u, lam, channel, quad).discrepancy());
  return worst;
}

namespace {

double lowest_level(const PotentialSpec& spec, const MeshParams& mesh, const SpectrumOptions& opts) {
  SpectrumOptions o = opts;
  o.k_max = std::max(o.k_max, 1);
  const auto rep = spectrum(spec, mesh, o);
  if (rep.levels.empty()) throw SolverError("no gap level found for " + std::string(to_string(spec.kind)) + " potential");
  return rep.levels.front().energy;
}

}  // namespace

TruncationTable truncation_convergence(const PotentialSpec& spec, const std::vector<double>& eps_ladder,
                                       const MeshParams& mesh, const SpectrumOptions& opts) {
  if (eps_ladder.empty()) throw std::invalid_argument("truncation_convergence: empty eps ladder");
  for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
    if (!(eps_ladder[i] > 0.0)) throw std::invalid_argument("truncation_convergence: eps must be > 0");
    if (i > 0 && !(eps_ladder[i] < eps_ladder[i - 1]))
      throw std::invalid_argument("truncation_convergence: eps ladder must be strictly decreasing");
  }
  TruncationTable t;
  t.base = spec;
  t.mesh = mesh;
  t.lambda1_exact = lowest_level(spec, mesh, opts);
  const double slack = opts.root.tol;
  for (double eps : eps_ladder) {
    TruncationRow row{eps, lowest_level(with_truncation(spec, eps), mesh, opts)};
    if (!t.rows.empty() && row.lambda1 > t.rows.back().lambda1 + slack) t.non_increasing = false;
    if (row.lambda1 < t.lambda1_exact - 1e-8) t.bounded_below = false;
    t.rows.push_back(row);
  }
  t.final_gap = t.rows.back().lambda1 - t.lambda1_exact;
  return t;
}

std::vector<PotentialSpec> random_admissible_potentials(std::uint64_t seed, int count, double nu, SpaceDim dim) {
  Rng rng(seed);
  std::vector<PotentialSpec> out;
  const double sup_limit = 1.0 + std::sqrt(std::max(0.0, 1.0 - std::pow(nu / critical_coupling(dim), 2)));
  for (int i = 0; i < count; ++i) {
    PotentialSpec s;
    switch (i % 4) {
      case 0:
        s = PotentialSpec::truncated(nu, std::exp(rng.uniform(std::log(1e-3), std::log(2.0))), dim);
        break;
      case 1:
        s = PotentialSpec::scaled(nu, rng.uniform(0.01, 0.5), dim);
        break;
      case 2:
        s = PotentialSpec::coulomb_step(nu, rng.uniform(0.05, 0.9) * std::min(sup_limit, 1.0), rng.uniform(0.1, 5.0), dim);
        break;
      default:
        s = PotentialSpec::coulomb_step(nu, rng.uniform(0.05, 0.5), rng.uniform(0.1, 5.0), dim);
        s.cutoff = std::exp(rng.uniform(std::log(1e-3), std::log(1.0)));
        break;
    }
    out.push_back(s);
  }
  return out;
}

std::vector<double> naive_gap_eigenvalues(const AssembledForms& forms) {
  const Eigen::Index n = forms.dof();
  const Eigen::Index ne = forms.basis().mesh().elements();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (const auto& p : forms.quadrature().points) {
    const Eigen::Index e = p.element;
    const bool left = e >= 1, right = e + 1 <= ne - 1;
    if (left) d(e - 1, e - 1) += p.weight * p.b_left * p.d_left;
    if (right) d(e, e) += p.weight * p.b_right * p.d_right;
    if (left && right) {
      d(e - 1, e) += p.weight * p.b_left * p.d_right;
      d(e, e - 1) += p.weight * p.b_right * p.d_left;
    }
  }
  const Eigen::MatrixXd m = forms.mass().to_dense(), pv = forms.potential().to_dense();
  Eigen::MatrixXd h(2 * n, 2 * n), b = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  h << m + pv, d.transpose(), d, -m + pv;
  b.topLeftCorner(n, n) = m;
  b.bottomRightCorner(n, n) = m;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(h, b, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolverError("naive_gap_eigenvalues: dense eigensolve failed");
  std::vector<double> out;
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    const double e = es.eigenvalues()[i];
    if (e > -1.0 && e < 1.0) out.push_back(e);
  }
  return out;
}

MeshParams pollution_mesh(int dof) { return AlgebraicMeshParams{40.0, dof + 1, 4.0}; }

PollutionReport pollution_demo(const Sector& sector, double nu, const MeshParams& mesh, double threshold,
                               int minmax_count) {
  const PotentialSpec spec = PotentialSpec::coulomb(nu, sector.dim);
  const TrialBasis basis(mesh);
  if (basis.dof() > 400) throw std::invalid_argument("pollution_demo: dof must be <= 400 for the dense baseline");
  if (!(threshold > 0.0)) throw std::invalid_argument("pollution_demo: threshold must be > 0");
  const AssembledForms forms(basis, sector, spec);

  PollutionReport rep;
  rep.sector = sector;
  rep.nu = nu;
  rep.dof = forms.dof();
  rep.threshold = threshold;
  rep.naive_levels = naive_gap_eigenvalues(forms);
  for (const auto& l : oracle_levels(sector, nu, ShootingConfig{}, 200)) rep.oracle_levels.push_back(l.energy);
  for (double e : rep.naive_levels) {
    double dist = std::numeric_limits<double>::infinity();
    for (double o : rep.oracle_levels) dist = std::min(dist, std::abs(e - o));
    if (dist > threshold) rep.spurious.push_back(e);
  }
  for (int k = 1; k <= minmax_count && k <= forms.dof(); ++k) {
    const auto outcome = level_root(forms, k, forms.window());
    if (const auto* l = std::get_if<MinMaxLevel>(&outcome))
      rep.minmax_levels.push_back(l->energy);
    else
      break;
  }
  return rep;
}

MonotonicityAudit audit_monotonicity(const AssembledForms& forms, int k, double energy, int samples, double h) {
  if (samples < 2) throw std::invalid_argument("audit_monotonicity: need at least 2 samples");
  const auto& win = forms.window();
  // Q(E) is defined for every E above the lower edge, so only that edge limits the step.
  const double w = std::min(h, 0.5 * (energy - win.lower));
  if (!(w > 0.0) || !(energy <= win.upper)) throw std::invalid_argument("audit_monotonicity: energy must lie inside the gap window");
  auto mu = [&](double e) { return pencil_eig_k(forms, e, k).mu; };

  MonotonicityAudit a;
  const double span = 0.25 * w;
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double m = mu(energy - span + 2.0 * span * i / (samples - 1));
    if (!(m < prev)) a.strictly_decreasing = false;
    prev = m;
  }
  const auto pair = pencil_eig_k(forms, energy, k);
  a.slope_hf = pencil_slope(forms, energy, pair.x);

  // mu_k is often affine to ~1e-13 (exact Coulomb) while other potentials leave the
  // h^2 regime only below h ~ 0.1, so halve from w and take the finest pair whose
  // finer error still clears the evaluation noise.
  const double floor = 1e-9 * std::max(1.0, std::abs(a.slope_hf));
  std::vector<double> steps, errors;
  for (double step = w; steps.size() < 7; step *= 0.5) {
    steps.push_back(step);
    errors.push_back(std::abs((mu(energy + step) - mu(energy - step)) / (2.0 * step) - a.slope_hf));
  }
  a.noise_floor = true;
  for (std::size_t j = 0; j + 1 < steps.size(); ++j) {
    if (errors[j + 1] < floor) break;
    a.noise_floor = false;
    a.step = steps[j];
    a.fd_error_coarse = errors[j];
    a.fd_error_fine = errors[j + 1];
  }
  if (a.noise_floor) {
    a.step = steps[0];
    a.fd_error_coarse = errors[0];
    a.fd_error_fine = errors[1];
    a.observed_order = std::numeric_limits<double>::quiet_NaN();
  } else {
    a.observed_order = std::log2(a.fd_error_coarse / a.fd_error_fine);
  }
  return a;
}

std::vector<CheckResult> run_verification_suite(const SuiteOptions& opts) {
  std::vector<CheckResult> out;
  {
    CheckResult c{"hardy", true, std::numeric_limits<double>::infinity(), ""};
    const TrialFamily fam(opts.seed, opts.hardy_trials);
    for (SpaceDim dim : {SpaceDim::ThreeD, SpaceDim::TwoD})
      for (double sign : {-1.0, 1.0})
        for (double a : {0.1, 1.0, 10.0})
          c.worst = std::min(c.worst, hardy_check(a, fam, sign * critical_coupling(dim), dim).min_normalized);
    c.pass = c.worst >= -1e-10;
    c.config = "trials=" + std::to_string(opts.hardy_trials) + ";a=0.1,1,10;dims=3d,2d;|kappa|=nu_crit";
    out.push_back(c);
  }
  {
    CheckResult c{"sos", true, 0.0, ""};
    const TrialFamily fam(opts.seed + 1, opts.identity_trials);
    for (SpaceDim dim : {SpaceDim::ThreeD, SpaceDim::TwoD})
      for (Channel ch : {Channel::Phi0, Channel::Phi1}) c.worst = std::max(c.worst, sos_identity_check(fam, dim, ch));
    c.pass = c.worst <= 1e-10;
    c.config = "trials=" + std::to_string(opts.identity_trials) + ";channels=phi0,phi1;dims=3d,2d";
    out.push_back(c);
  }
  {
    CheckResult c{"qshift", true, 0.0, ""};
    const TrialFamily fam(opts.seed + 2, opts.identity_trials);
    const std::vector<double> lambdas{-0.9, -0.5, 0.0, 0.5, 0.9};
    for (Channel ch : {Channel::Phi0, Channel::Phi1}) c.worst = std::max(c.worst, qshift_identity_check(fam, lambdas, ch));
    c.pass = c.worst <= 1e-10;
    c.config = "trials=" + std::to_string(opts.identity_trials) + ";lambda=-0.9,-0.5,0,0.5,0.9";
    out.push_back(c);
  }
  {
    CheckResult c{"truncation", true, 0.0, ""};
    const MeshParams mesh = GeometricMeshParams{1e-10, 100.0, 2000};
    const std::vector<double> ladder{1.0, 0.1, 0.01, 0.001};
    const auto sub = truncation_convergence(PotentialSpec::coulomb(0.9), ladder, mesh);
    const auto crit = truncation_convergence(PotentialSpec::coulomb(1.0), ladder, mesh);
    bool nonneg = crit.lambda1_exact >= 0.0;
    for (const auto& r : crit.rows) nonneg = nonneg && r.lambda1 >= 0.0;
    c.pass = sub.non_increasing && sub.bounded_below && crit.non_increasing && crit.bounded_below && nonneg;
    c.worst = sub.final_gap;
    c.config = "nu=0.9,1;eps=1,0.1,0.01,0.001;mesh=" + format_mesh_params(mesh);
    out.push_back(c);
  }
  return out;
}

}  // namespace dirac_gap
