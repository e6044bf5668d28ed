#include "dirac_gap/minmax_solver.hpp"
#include "dirac_gap/shooting_oracle.hpp"
#include "dirac_gap/verification.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace dirac_gap;

namespace {

Tridiagonal diag_of(std::initializer_list<double> values) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) d[i++] = v;
  return Tridiagonal(d, Eigen::VectorXd::Zero(d.size() - 1));
}

Tridiagonal random_tridiagonal(Rng& rng, Eigen::Index n) {
  Tridiagonal t(n);
  for (Eigen::Index i = 0; i < n; ++i) t.diag()[i] = rng.uniform(-2.0, 2.0);
  for (Eigen::Index i = 0; i + 1 < n; ++i) t.off()[i] = rng.uniform(-1.0, 1.0);
  return t;
}

AssembledForms forms_for(const PotentialSpec& spec, double coupling, const MeshParams& mesh) {
  return assemble(TrialBasis(mesh), make_sector(spec.dim, coupling), spec);
}

MinMaxLevel solve(const AssembledForms& f, int k) {
  auto out = level_root(f, k, f.window());
  REQUIRE(std::holds_alternative<MinMaxLevel>(out));
  return std::get<MinMaxLevel>(out);
}

const MeshParams kStrong = GeometricMeshParams{1e-8, 200.0, 16000};

}  // namespace

TEST_CASE("inertia_negcount on diagonal matrices") {
  CHECK(inertia_negcount(diag_of({1, 2, 3})).negative == 0);
  CHECK(inertia_negcount(diag_of({-1, 0.5, -2})).negative == 2);
}

TEST_CASE("inertia_negcount agrees with a dense eigensolve") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Tridiagonal t = random_tridiagonal(rng, 50);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.to_dense(), Eigen::EigenvaluesOnly);
    CHECK(inertia_negcount(t).negative == (es.eigenvalues().array() < 0.0).count());
  }
}

TEST_CASE("solve_tridiagonal matches a dense LU") {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Tridiagonal t = random_tridiagonal(rng, 40);
    Eigen::VectorXd b(40);
    for (int i = 0; i < 40; ++i) b[i] = rng.uniform(-1.0, 1.0);
    const Eigen::VectorXd want = t.to_dense().partialPivLu().solve(b);
    CHECK((solve_tridiagonal(t, b) - want).norm() <= 1e-10 * want.norm());
  }
}

TEST_CASE("pencil_eig_k on hand pencils") {
  Rng rng(4);
  Tridiagonal m = random_tridiagonal(rng, 6);
  m.diag().array() = m.diag().array().abs() + 3.0;  // diagonally dominant, so M > 0
  for (int k = 1; k <= 6; ++k) {
    const auto p = pencil_eig_k(m, m, k);
    CHECK(p.mu == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.quadratic(p.x) == doctest::Approx(1.0).epsilon(1e-12));
  }
  const Tridiagonal q = diag_of({-1, 0, 2}), id = diag_of({1, 1, 1});
  CHECK(pencil_eig_k(q, id, 1).mu == doctest::Approx(-1.0));
  CHECK(std::abs(pencil_eig_k(q, id, 2).mu) < 1e-12);
  CHECK(pencil_eig_k(q, id, 3).mu == doctest::Approx(2.0));
  CHECK_THROWS_AS(pencil_eig_k(q, id, 4), std::invalid_argument);
}

TEST_CASE("pencil_eig_k against the dense generalized eigensolver") {
  Rng rng(12);
  const auto f = forms_for(PotentialSpec::coulomb(0.7), -1, AlgebraicMeshParams{30.0, 50, 3.0});
  const double e = 0.6;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(f.q(e).to_dense(), f.mass().to_dense());
  for (int k : {1, 2, 5, 20}) {
    const auto p = pencil_eig_k(f, e, k);
    CHECK(p.mu == doctest::Approx(es.eigenvalues()[k - 1]).epsilon(1e-10));
    CHECK(p.residual <= 1e-10);
  }
}

TEST_CASE("pencil at E = 0.9 is consistent with form_value") {
  const auto f = forms_for(PotentialSpec::coulomb(0.5), -1, AlgebraicMeshParams{200.0, 200, 6.0});
  const auto p = pencil_eig_k(f, 0.9, 1);
  CHECK(form_value(f, 0.9, p.x) == doctest::Approx(p.mu * f.mass().quadratic(p.x)).epsilon(1e-10));
  // mu_1 is decreasing in E, so it is negative above the level sqrt(0.75) and positive below
  CHECK(p.mu < 0.0);
  CHECK(pencil_eig_k(f, 0.8, 1).mu > 0.0);
}

TEST_CASE("level_root: subcritical Coulomb ground state") {
  const auto f = forms_for(PotentialSpec::coulomb(0.5), -1, AlgebraicMeshParams{200.0, 4000, 6.0});
  const auto lvl = solve(f, 1);
  CHECK(lvl.energy == doctest::Approx(0.866025403784).epsilon(1e-6));
  CHECK(f.mass().quadratic(lvl.u) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lvl.bracket_width <= 1e-10);
  // certificate: the k-th pencil eigenvalue changes sign across the reported energy
  CHECK(pencil_eig_k(f, lvl.energy - 1e-9, 1).mu > 0.0);
  CHECK(pencil_eig_k(f, lvl.energy + 1e-9, 1).mu < 0.0);
}

TEST_CASE("level_root: free case has no level in the gap") {
  const auto f = forms_for(PotentialSpec::coulomb(1e-12), -1, AlgebraicMeshParams{200.0, 400, 3.0});
  const auto out = level_root(f, 1, f.window());
  CHECK(std::holds_alternative<NoLevelBelowB>(out));
}

TEST_CASE("level_root: second level at nu = 0.9 matches the shooting oracle") {
  const auto f = forms_for(PotentialSpec::coulomb(0.9), -1, kStrong);
  const auto lvl = solve(f, 2);
  const auto oracle = oracle_levels(make_sector(SpaceDim::ThreeD, -1), 0.9, {}, 2);
  REQUIRE(oracle.size() == 2);
  CHECK(std::abs(lvl.energy - oracle[1].energy) <= 1e-6 * oracle[1].energy);
}

TEST_CASE("recover_lower") {
  const double nu = 0.5;
  const auto f = forms_for(PotentialSpec::coulomb(nu), -1, AlgebraicMeshParams{200.0, 4000, 6.0});
  const auto lvl = solve(f, 1);
  // hydrogenic ground state: both components share r^s e^{-ar}, amplitudes sqrt(1 +/- E)
  const double ratio = nodal_l2_norm(f.basis().mesh(), lvl.v) /
                       nodal_l2_norm(f.basis().mesh(), f.basis().nodal_values(lvl.u));
  CHECK(ratio < 1.0);
  CHECK(ratio == doctest::Approx(std::sqrt((1.0 - lvl.energy) / (1.0 + lvl.energy))).epsilon(1e-3));

  const Eigen::VectorXd flipped = recover_lower(-lvl.u, f, lvl.energy);
  CHECK((flipped + lvl.v).cwiseAbs().maxCoeff() <= 1e-14 * lvl.v.cwiseAbs().maxCoeff());
  CHECK(recover_lower(Eigen::VectorXd::Zero(f.dof()), f, lvl.energy).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("recover_lower ratio stays below one up to nu = 0.9") {
  const auto f = forms_for(PotentialSpec::coulomb(0.9), -1, kStrong);
  const auto lvl = solve(f, 1);
  const double ratio = nodal_l2_norm(f.basis().mesh(), lvl.v) /
                       nodal_l2_norm(f.basis().mesh(), f.basis().nodal_values(lvl.u));
  CHECK(ratio < 1.0);
  CHECK(ratio == doctest::Approx(std::sqrt((1.0 - lvl.energy) / (1.0 + lvl.energy))).epsilon(1e-3));
}

TEST_CASE("spectrum: 3d ground level is doubly degenerate and sits in kappa = -1") {
  SpectrumOptions opts;
  const auto rep = spectrum(PotentialSpec::coulomb(0.5), AlgebraicMeshParams{200.0, 4000, 6.0}, opts);
  REQUIRE(rep.levels.size() >= 2);
  CHECK(rep.levels[0].sector.coupling == -1.0);
  CHECK(rep.levels[0].energy == doctest::Approx(std::sqrt(0.75)).epsilon(1e-6));
  CHECK(rep.levels[1].energy > rep.levels[0].energy + 0.01);
  REQUIRE(rep.expanded_levels.size() >= 3);
  CHECK(rep.expanded_levels[0].coupling == -1.0);
  CHECK(rep.expanded_levels[1].coupling == -1.0);
  CHECK(rep.expanded_levels[1].copy == 1);
  CHECK(rep.expanded_levels[2].coupling == 1.0);
  for (std::size_t i = 1; i < rep.levels.size(); ++i) CHECK(rep.levels[i - 1].energy <= rep.levels[i].energy);
}

TEST_CASE("spectrum: 2d ground level") {
  SpectrumOptions opts;
  opts.coupling_max = 0.5;
  const auto rep = spectrum(PotentialSpec::coulomb(0.25, SpaceDim::TwoD), AlgebraicMeshParams{200.0, 4000, 6.0}, opts);
  REQUIRE_FALSE(rep.levels.empty());
  CHECK(rep.levels[0].energy == doctest::Approx(std::sqrt(0.75)).epsilon(1e-6));
  CHECK(std::abs(rep.levels[0].sector.coupling) == 0.5);
}

TEST_CASE("spectrum is identical for any thread count") {
  SpectrumOptions one;
  one.coupling_max = 3;
  one.k_max = 3;
  SpectrumOptions four = one;
  four.threads = 4;
  const MeshParams mesh = AlgebraicMeshParams{200.0, 1500, 5.0};
  const auto a = spectrum(PotentialSpec::coulomb(0.6), mesh, one);
  const auto b = spectrum(PotentialSpec::coulomb(0.6), mesh, four);
  REQUIRE(a.levels.size() == b.levels.size());
  for (std::size_t i = 0; i < a.levels.size(); ++i) {
    CHECK(a.levels[i].energy == b.levels[i].energy);
    CHECK(a.levels[i].sector == b.levels[i].sector);
    CHECK(a.levels[i].k_in_sector == b.levels[i].k_in_sector);
  }
}

TEST_CASE("mu_k is strictly decreasing with a Hellmann-Feynman slope") {
  // a step breaks the near-affine behaviour of exact Coulomb, so the order is observable
  const auto f = forms_for(PotentialSpec::coulomb_step(0.7, 0.3, 2.0), 1, AlgebraicMeshParams{200.0, 2000, 5.0});
  for (int k : {1, 2}) {
    const auto lvl = solve(f, k);
    const auto audit = audit_monotonicity(f, k, lvl.energy);
    CHECK(audit.strictly_decreasing);
    CHECK(audit.slope_hf < 0.0);
    CHECK(audit.observed_order >= 1.9);
    CHECK_FALSE(audit.noise_floor);
    CHECK(audit.passes());
  }
  // exact and scaled Coulomb: mu_1 is affine to round-off around the level
  const auto flat = forms_for(PotentialSpec::scaled(0.8, 0.011457894090728782), -1,
                              geometric_per_decade(1e-10, 200.0, 200));
  const auto audit = audit_monotonicity(flat, 1, 0.612033449707606);
  CHECK(audit.strictly_decreasing);
  CHECK(audit.noise_floor);
  CHECK(audit.fd_error_coarse <= 1e-9);
  CHECK(audit.passes());
}

TEST_CASE("level_root option checks") {
  const auto f = forms_for(PotentialSpec::coulomb(0.5), -1, AlgebraicMeshParams{20.0, 20, 2.0});
  RootOptions bad;
  bad.tol = 0.0;
  CHECK_THROWS_AS(level_root(f, 1, f.window(), bad), std::invalid_argument);
  CHECK_THROWS_AS(level_root(f, 0, f.window()), std::invalid_argument);
}
