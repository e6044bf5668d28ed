#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dirac_gap {

template <typename Scalar>
struct GaussRule {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;    // on [-1, 1]
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
};

/// Gauss-Legendre rule with `order` points, roots by Newton on P_order.
template <typename Scalar = double>
GaussRule<Scalar> gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  GaussRule<Scalar> rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  // (P_order(x), P_order'(x)) by the three-term recurrence
  auto legendre = [order](Scalar x) {
    Scalar p0 = 1, p1 = x;
    for (int k = 2; k <= order; ++k) {
      const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    return std::pair<Scalar, Scalar>{p1, order * (x * p1 - p0) / (x * x - 1)};
  };
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    Scalar x = std::cos(std::numbers::pi_v<Scalar> * (Scalar(i) + Scalar(0.75)) / (Scalar(order) + Scalar(0.5)));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(x);
      const Scalar dx = p / dp;
      x -= dx;
      if (std::abs(dx) <= Scalar(4) * std::numeric_limits<Scalar>::epsilon()) break;
    }
    const Scalar dp = legendre(x).second;
    const Scalar w = Scalar(2) / ((1 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.nodes[order - 1 - i] = x;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0;
  return rule;
}

/// Splits [a, b] at interior breakpoints and, when a > 0, into geometric cells
/// whose end ratio stays below `max_ratio`. Returned cells cover [a, b] in order.
inline std::vector<std::pair<double, double>> geometric_cells(double a, double b, double max_ratio,
                                                              const std::vector<double>& breakpoints = {}) {
  std::vector<double> cuts{a};
  for (double p : breakpoints)
    if (p > a && p < b) cuts.push_back(p);
  cuts.push_back(b);
  std::vector<std::pair<double, double>> cells;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double lo = cuts[c], hi = cuts[c + 1];
    int m = 1;
    if (lo > 0.0 && hi / lo > max_ratio) m = static_cast<int>(std::ceil(std::log(hi / lo) / std::log(max_ratio)));
    double left = lo;
    for (int j = 1; j <= m; ++j) {
      const double right = j == m ? hi : lo * std::pow(hi / lo, static_cast<double>(j) / m);
      cells.emplace_back(left, right);
      left = right;
    }
  }
  return cells;
}

/// Composite Gauss integral of f over [a, b] on geometric cells.
template <typename F>
double integrate(F&& f, double a, double b, int order = 16, double max_ratio = 1.25,
                 const std::vector<double>& breakpoints = {}) {
  const auto rule = gauss_legendre<double>(order);
  double sum = 0.0;
  for (const auto& [lo, hi] : geometric_cells(a, b, max_ratio, breakpoints)) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double cell = 0.0;
    for (int q = 0; q < order; ++q) cell += rule.weights[q] * f(mid + half * rule.nodes[q]);
    sum += half * cell;
  }
  return sum;
}

}  // namespace dirac_gap
