#pragma once

#include "dirac_gap/minmax_solver.hpp"
#include "dirac_gap/operator_model.hpp"
#include "dirac_gap/radial_forms.hpp"
#include "dirac_gap/radial_mesh.hpp"
#include "dirac_gap/shooting_oracle.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace dirac_gap {

/// Seeded generator with a platform-independent double conversion.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// u(r) = r^2 (r - a)^2 (b - r)^2 p((r - a)/(b - a)) on [a, b], zero elsewhere.
struct Bump {
  double a = 1.0, b = 2.0;
  std::vector<double> poly;  // ascending coefficients in the local variable

  double value(double r) const;
  double derivative(double r) const;
};

/// Seeded family of bumps supported in (0, r_max).
class TrialFamily {
 public:
  TrialFamily(std::uint64_t seed, int size, double r_max = 20.0, int degree = 3);

  std::uint64_t seed() const { return seed_; }
  int size() const { return static_cast<int>(trials_.size()); }
  const Bump& operator[](int i) const { return trials_[static_cast<std::size_t>(i)]; }
  const std::vector<Bump>& trials() const { return trials_; }

 private:
  std::uint64_t seed_;
  std::vector<Bump> trials_;
};

/// Quadrature shared by the identity checks: `cells` uniform cells on the support, Gauss order `order`.
struct IdentityQuadrature {
  int cells = 64;
  int order = 16;
};

/// Sector-reduced Hardy form with critical weight c = nu_crit:
///   int (u' + kappa u/r)^2 / (a + c/r) + (a - c/r) u^2,  normalized by int (a + c/r) u^2.
double hardy_value(const Bump& u, double a, double kappa, SpaceDim dim, const IdentityQuadrature& quad = {});
/// Same for u_t(r) = r^t e^{-r} (integrated to r = 60), kappa = -1 / -1/2.
double hardy_value_power(double t, double a, SpaceDim dim);

struct HardyResult {
  double min_normalized = 0.0;
  int evaluated = 0;
};

/// Minimum over the family; |kappa| must equal the smallest coupling of `dim`.
HardyResult hardy_check(double a, const TrialFamily& trials, double kappa, SpaceDim dim,
                        const IdentityQuadrature& quad = {});

enum class Channel { Phi0, Phi1 };

struct IdentitySides {
  double lhs = 0.0, rhs = 0.0;
  double discrepancy() const;
};

/// Direct Coulomb-critical form vs its sum-of-squares rewriting for one radial channel.
IdentitySides sos_sides(const Bump& phi, SpaceDim dim, Channel channel, const IdentityQuadrature& quad = {});
double sos_identity_check(const TrialFamily& trials, SpaceDim dim, Channel channel, const IdentityQuadrature& quad = {});

/// q_lambda vs q_0 minus the two shift integrals, 3d radial channel.
IdentitySides qshift_sides(const Bump& phi, double lambda, Channel channel, const IdentityQuadrature& quad = {});
double qshift_identity_check(const TrialFamily& trials, const std::vector<double>& lambdas, Channel channel,
                             const IdentityQuadrature& quad = {});

struct TruncationRow {
  double eps = 0.0;
  double lambda1 = 0.0;
};

struct TruncationTable {
  PotentialSpec base;
  MeshParams mesh;
  std::vector<TruncationRow> rows;
  double lambda1_exact = 0.0;
  bool non_increasing = true;
  bool bounded_below = true;
  double final_gap = 0.0;
};

/// Lowest level for each truncation eps (decreasing ladder) and for the base spec itself.
TruncationTable truncation_convergence(const PotentialSpec& spec, const std::vector<double>& eps_ladder,
                                       const MeshParams& mesh, const SpectrumOptions& opts = {});

/// Seeded admissible potentials above -nu/r: truncations, scalings and steps.
std::vector<PotentialSpec> random_admissible_potentials(std::uint64_t seed, int count, double nu,
                                                        SpaceDim dim = SpaceDim::ThreeD);

struct PollutionReport {
  Sector sector;
  double nu = 0.0;
  Eigen::Index dof = 0;
  double threshold = 0.05;
  std::vector<double> naive_levels;
  std::vector<double> oracle_levels;
  std::vector<double> spurious;
  std::vector<double> minmax_levels;
};

/// Equal-basis two-spinor Galerkin on the hat space, all eigenvalues in (-1, 1).
std::vector<double> naive_gap_eigenvalues(const AssembledForms& forms);

PollutionReport pollution_demo(const Sector& sector, double nu, const MeshParams& mesh, double threshold = 0.05,
                               int minmax_count = 3);

/// Default dof-200 mesh of the pollution regression.
MeshParams pollution_mesh(int dof);

struct MonotonicityAudit {
  bool strictly_decreasing = true;
  double slope_hf = 0.0;
  /// Coarser step of the pair the order was measured on; errors at step and step/2.
  double step = 0.0;
  double fd_error_coarse = 0.0, fd_error_fine = 0.0;
  double observed_order = 0.0;
  /// Every difference error is within evaluation noise of the slope (mu_k is
  /// affine to round-off); the order is then not observable and is reported as NaN.
  bool noise_floor = false;
  bool passes(double min_order = 1.9) const {
    return strictly_decreasing && slope_hf < 0.0 && (noise_floor || observed_order >= min_order);
  }
};
/// Samples mu_k at `samples` energies in [energy - w/4, energy + w/4], w = h clipped
/// to half the distance to the lower gap edge, and compares the Hellmann-Feynman
/// slope with central differences at w, w/2, ..., w/64; the observed order comes
/// from the finest pair still resolved above evaluation noise.
MonotonicityAudit audit_monotonicity(const AssembledForms& forms, int k, double energy, int samples = 20,
                                     double h = 0.4);

struct CheckResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;
  std::string config;
};

struct SuiteOptions {
  std::uint64_t seed = 7;
  int hardy_trials = 1000;
  int identity_trials = 20;
};

/// Hardy, sum-of-squares, lambda-shift and truncation checks.
std::vector<CheckResult> run_verification_suite(const SuiteOptions& opts);

}  // namespace dirac_gap
