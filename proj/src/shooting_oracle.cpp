#include "dirac_gap/shooting_oracle.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace dirac_gap {

namespace odeint = boost::numeric::odeint;

double ShootingConfig::outer_radius(double energy) const {
  if (r_out) return *r_out;
  return std::min(40.0 / std::sqrt((1.0 - energy) * (1.0 + energy)), 5000.0);
}

void ShootingConfig::validate() const {
  if (!(r0 > 0.0)) throw std::invalid_argument("ShootingConfig.r0 must be > 0");
  if (!(r_match > r0)) throw std::invalid_argument("ShootingConfig.r_match must exceed r0");
  if (r_out && !(*r_out > r_match)) throw std::invalid_argument("ShootingConfig.r_out must exceed r_match");
  if (!(ode_tol > 0.0 && ode_tol <= 1e-10)) throw std::invalid_argument("ShootingConfig.ode_tol must lie in (0, 1e-10]");
  if (!(scan_tol > 0.0)) throw std::invalid_argument("ShootingConfig.scan_tol must be > 0");
  if (scan < 2) throw std::invalid_argument("ShootingConfig.scan must be >= 2");
  if (!(bisect_tol > 0.0)) throw std::invalid_argument("ShootingConfig.bisect_tol must be > 0");
}

Spinor2 regular_start(double kappa, double nu, double energy, double r0) {
  if (!(r0 > 0.0)) throw std::domain_error("regular_start: r0 must be > 0");
  if (r0 * (1.0 + std::abs(energy)) > 1e-6) throw std::domain_error("regular_start: r0 (1 + |E|) must be <= 1e-6");
  const double s = indicial_exponent(kappa, nu);
  const double scale = std::pow(r0, s);
  if (std::abs(nu) < 1e-8) return kappa < 0 ? Spinor2{scale, 0.0} : Spinor2{0.0, scale};
  return {nu * scale, (s + kappa) * scale};
}

Spinor2 decaying_start(double energy, double r_out) {
  if (!(std::abs(energy) < 1.0)) throw std::domain_error("decaying_start: |E| must be < 1");
  if (!(r_out > 0.0)) throw std::domain_error("decaying_start: r_out must be > 0");
  const double ratio = -std::sqrt((1.0 - energy) / (1.0 + energy));
  const double norm = std::hypot(1.0, ratio);
  return {1.0 / norm, ratio / norm};
}

namespace {

Spinor2 normalized(Spinor2 y) {
  const double n = std::hypot(y[0], y[1]);
  return {y[0] / n, y[1] / n};
}

template <typename System>
void integrate(System sys, Spinor2& y, double from, double to, double tol) {
  auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<Spinor2>>(tol, tol);
  const double dt = (to - from) * 1e-3;
  try {
    odeint::integrate_adaptive(stepper, sys, y, from, to, dt);
  } catch (const std::exception& err) {
    throw OracleError(std::string("shooting integrator failed: ") + err.what());
  }
  if (!std::isfinite(y[0]) || !std::isfinite(y[1])) throw OracleError("shooting integrator produced non-finite values");
}

struct Matched {
  Spinor2 left, right;
};

Matched shoot(double kappa, double nu, double energy, const ShootingConfig& cfg, double tol) {
  Spinor2 left = normalized(regular_start(kappa, nu, energy, cfg.r0));
  // t = ln r near the origin
  integrate(
      [=](const Spinor2& y, Spinor2& dy, double t) {
        const double r = std::exp(t);
        dy[0] = -kappa * y[0] + (r * (1.0 + energy) + nu) * y[1];
        dy[1] = kappa * y[1] + (r * (1.0 - energy) - nu) * y[0];
      },
      left, std::log(cfg.r0), std::log(cfg.r_match), tol);
  const double r_out = cfg.outer_radius(energy);
  Spinor2 right = decaying_start(energy, r_out);
  integrate(
      [=](const Spinor2& y, Spinor2& dy, double r) {
        dy[0] = -kappa * y[0] / r + (1.0 + energy + nu / r) * y[1];
        dy[1] = kappa * y[1] / r + (1.0 - energy - nu / r) * y[0];
      },
      right, r_out, cfg.r_match, tol);
  return {left, right};
}

double matched_wronskian(const Matched& m) {
  const double w = m.left[0] * m.right[1] - m.left[1] * m.right[0];
  return w / (std::hypot(m.left[0], m.left[1]) * std::hypot(m.right[0], m.right[1]));
}

}  // namespace

double wronskian(double kappa, double nu, double energy, const ShootingConfig& cfg, double tol) {
  return matched_wronskian(shoot(kappa, nu, energy, cfg, tol));
}

std::vector<OracleLevel> oracle_levels(const Sector& sector, double nu, const ShootingConfig& cfg, int count) {
  cfg.validate();
  if (count < 1) return {};
  const double kappa = sector.coupling;
  if (nu > std::abs(kappa)) throw std::domain_error("oracle_levels: nu exceeds |kappa|");
  const double lo = -1.0 + 1e-6, hi = 1.0 - 1e-6;

  std::vector<OracleLevel> out;
  double e_prev = lo;
  double w_prev = wronskian(kappa, nu, e_prev, cfg, cfg.scan_tol);
  for (int i = 1; i < cfg.scan && static_cast<int>(out.size()) < count; ++i) {
    const double e = lo + (hi - lo) * i / (cfg.scan - 1);
    const double w = wronskian(kappa, nu, e, cfg, cfg.scan_tol);
    if (w == 0.0 || (w_prev < 0.0) != (w < 0.0)) {
      double a = e_prev, b = e;
      double wa = wronskian(kappa, nu, a, cfg, cfg.ode_tol);
      const double wb = wronskian(kappa, nu, b, cfg, cfg.ode_tol);
      if ((wa < 0.0) == (wb < 0.0) && wb != 0.0) {
        std::ostringstream os;
        os << "oracle_levels: sign change near E = " << e << " lost at full tolerance";
        throw OracleError(os.str());
      }
      while (b - a > cfg.bisect_tol) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double wm = wronskian(kappa, nu, mid, cfg, cfg.ode_tol);
        if ((wm < 0.0) == (wa < 0.0)) {
          a = mid;
          wa = wm;
        } else {
          b = mid;
        }
      }
      OracleLevel level;
      level.sector = sector;
      level.n_index = static_cast<int>(out.size()) + 1;
      level.energy = 0.5 * (a + b);
      level.wronskian_residual = std::abs(wronskian(kappa, nu, level.energy, cfg, cfg.ode_tol));
      out.push_back(level);
    }
    e_prev = e;
    w_prev = w;
  }
  return out;
}

double fine_structure(double nu, double kappa, int n_r) {
  if (!(nu >= 0.0 && nu < std::abs(kappa))) throw std::domain_error("fine_structure: need 0 <= nu < |kappa|");
  if (n_r < 0) throw std::domain_error("fine_structure: n_r must be >= 0");
  if (n_r == 0 && kappa > 0) throw std::domain_error("fine_structure: no nodeless level for kappa > 0");
  const double d = n_r + std::sqrt(kappa * kappa - nu * nu);
  return 1.0 / std::sqrt(1.0 + nu * nu / (d * d));
}

double fine_structure_level(double nu, double kappa, int k) {
  if (k < 1) throw std::domain_error("fine_structure_level: k must be >= 1");
  return fine_structure(nu, kappa, kappa < 0 ? k - 1 : k);
}

void write_oracle_csv(std::ostream& os, const std::vector<OracleLevel>& levels) {
  os << "sector,n_index,E,residual\n";
  for (const auto& l : levels) {
    os << std::setprecision(17) << l.sector.coupling << ',' << l.n_index << ',' << l.energy << ','
       << l.wronskian_residual << '\n';
  }
}

std::vector<OracleLevel> read_oracle_csv(std::istream& is, SpaceDim dim) {
  std::string line;
  if (!std::getline(is, line) || line != "sector,n_index,E,residual")
    throw std::invalid_argument("read_oracle_csv: missing header");
  std::vector<OracleLevel> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string f[4];
    for (auto& cell : f)
      if (!std::getline(row, cell, ',')) throw std::invalid_argument("read_oracle_csv: short row: " + line);
    OracleLevel l;
    l.sector = make_sector(dim, std::stod(f[0]));
    l.n_index = std::stoi(f[1]);
    l.energy = std::stod(f[2]);
    l.wronskian_residual = std::stod(f[3]);
    out.push_back(l);
  }
  return out;
}

}  // namespace dirac_gap
