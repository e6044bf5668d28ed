#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>

namespace dirac_gap {

/// Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal.
template <typename Scalar>
class SymTridiagonal {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  SymTridiagonal() = default;
  explicit SymTridiagonal(Eigen::Index n) : diag_(Vector::Zero(n)), off_(Vector::Zero(n > 0 ? n - 1 : 0)) {}
  SymTridiagonal(Vector diag, Vector off) : diag_(std::move(diag)), off_(std::move(off)) {
    if (diag_.size() > 0 && off_.size() != diag_.size() - 1)
      throw std::invalid_argument("SymTridiagonal: off-diagonal length must be n-1");
  }

  Eigen::Index size() const { return diag_.size(); }
  const Vector& diag() const { return diag_; }
  const Vector& off() const { return off_; }
  Vector& diag() { return diag_; }
  Vector& off() { return off_; }

  SymTridiagonal& operator+=(const SymTridiagonal& o) {
    diag_ += o.diag_;
    off_ += o.off_;
    return *this;
  }
  SymTridiagonal& operator-=(const SymTridiagonal& o) {
    diag_ -= o.diag_;
    off_ -= o.off_;
    return *this;
  }
  SymTridiagonal& operator*=(Scalar s) {
    diag_ *= s;
    off_ *= s;
    return *this;
  }

  friend SymTridiagonal operator+(SymTridiagonal a, const SymTridiagonal& b) { return a += b; }
  friend SymTridiagonal operator-(SymTridiagonal a, const SymTridiagonal& b) { return a -= b; }
  friend SymTridiagonal operator*(Scalar s, SymTridiagonal a) { return a *= s; }
  friend SymTridiagonal operator*(SymTridiagonal a, Scalar s) { return a *= s; }

  /// y = T x
  template <typename Derived>
  Vector operator*(const Eigen::MatrixBase<Derived>& x) const {
    const Eigen::Index n = size();
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar acc = diag_[i] * x[i];
      if (i > 0) acc += off_[i - 1] * x[i - 1];
      if (i + 1 < n) acc += off_[i] * x[i + 1];
      y[i] = acc;
    }
    return y;
  }

  /// x^T T x with Neumaier-compensated summation. On graded meshes the terms
  /// are large and of both signs while the form itself is O(1), so a plain sum
  /// loses about 1e-11 absolute.
  template <typename Derived>
  Scalar quadratic(const Eigen::MatrixBase<Derived>& x) const {
    Scalar sum = 0, comp = 0;
    auto add = [&](Scalar term) {
      const Scalar t = sum + term;
      comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
      sum = t;
    };
    for (Eigen::Index i = 0; i < size(); ++i) add(diag_[i] * x[i] * x[i]);
    for (Eigen::Index i = 0; i < off_.size(); ++i) add(Scalar(2) * off_[i] * x[i] * x[i + 1]);
    return sum + comp;
  }

  /// Max-abs-row-sum norm.
  Scalar norm_inf() const {
    Scalar best = 0;
    const Eigen::Index n = size();
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar row = std::abs(diag_[i]);
      if (i > 0) row += std::abs(off_[i - 1]);
      if (i + 1 < n) row += std::abs(off_[i]);
      best = std::max(best, row);
    }
    return best;
  }

  Dense to_dense() const {
    const Eigen::Index n = size();
    Dense d = Dense::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) d(i, i) = diag_[i];
    for (Eigen::Index i = 0; i + 1 < n; ++i) d(i, i + 1) = d(i + 1, i) = off_[i];
    return d;
  }

 private:
  Vector diag_;
  Vector off_;
};

using Tridiagonal = SymTridiagonal<double>;

struct Inertia {
  Eigen::Index negative = 0;
  /// Zero pivots replaced by a tiny multiple of the matrix norm.
  Eigen::Index perturbed_pivots = 0;
};

/// Sylvester inertia of a symmetric tridiagonal matrix from the pivots of
/// T = L D L^T. Exact zero pivots are shifted to -eta*||T|| so the count is
/// the number of eigenvalues of T - 0 that are < 0 after an O(eta) backward
/// perturbation; the shift is counted in the result.
template <typename Scalar>
Inertia inertia_negcount(const SymTridiagonal<Scalar>& t, Scalar eta = Scalar(1e-14)) {
  Inertia out;
  const Eigen::Index n = t.size();
  if (n == 0) return out;
  Scalar scale = t.norm_inf();
  if (scale == Scalar(0)) scale = std::numeric_limits<Scalar>::min();
  const Scalar shift = eta * scale;
  Scalar d = t.diag()[0];
  for (Eigen::Index i = 0;; ++i) {
    if (d == Scalar(0)) {
      d = shift;
      ++out.perturbed_pivots;
    }
    if (d < Scalar(0)) ++out.negative;
    if (i + 1 == n) break;
    const Scalar b = t.off()[i];
    d = t.diag()[i + 1] - (b / d) * b;
  }
  return out;
}

/// Count of eigenvalues of the pencil (A, B) below sigma: inertia of A - sigma B.
template <typename Scalar>
Eigen::Index pencil_count_below(const SymTridiagonal<Scalar>& a, const SymTridiagonal<Scalar>& b, Scalar sigma) {
  return inertia_negcount(a - sigma * b).negative;
}

/// Solves T x = rhs for a (possibly indefinite, nearly singular) tridiagonal T
/// by Gaussian elimination with partial pivoting. Exactly singular pivots are
/// replaced by a tiny value so inverse iteration can proceed.
template <typename Scalar>
typename SymTridiagonal<Scalar>::Vector solve_tridiagonal(const SymTridiagonal<Scalar>& t,
                                                          const typename SymTridiagonal<Scalar>::Vector& rhs) {
  using Vector = typename SymTridiagonal<Scalar>::Vector;
  const Eigen::Index n = t.size();
  if (rhs.size() != n) throw std::invalid_argument("solve_tridiagonal: size mismatch");
  if (n == 0) return Vector();
  // Row i holds (lower, diag, upper, upper2) after pivoting, as in LAPACK gtsv.
  Vector dl(n), d(n), du(n), du2 = Vector::Zero(n), x = rhs;
  for (Eigen::Index i = 0; i < n; ++i) {
    d[i] = t.diag()[i];
    dl[i] = i + 1 < n ? t.off()[i] : Scalar(0);
    du[i] = i + 1 < n ? t.off()[i] : Scalar(0);
  }
  const Scalar tiny = std::numeric_limits<Scalar>::epsilon() * std::max(t.norm_inf(), std::numeric_limits<Scalar>::min());
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == Scalar(0)) d[i] = tiny;
      const Scalar f = dl[i] / d[i];
      d[i + 1] -= f * du[i];
      x[i + 1] -= f * x[i];
      dl[i] = 0;
    } else {
      const Scalar f = d[i] / dl[i];
      d[i] = dl[i];
      const Scalar tmp = d[i + 1];
      d[i + 1] = du[i] - f * tmp;
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -f * du2[i];
      }
      du[i] = tmp;
      std::swap(x[i], x[i + 1]);
      x[i + 1] -= f * x[i];
    }
  }
  if (d[n - 1] == Scalar(0)) d[n - 1] = tiny;
  x[n - 1] /= d[n - 1];
  if (n > 1) x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
  for (Eigen::Index i = n - 3; i >= 0; --i) x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
  return x;
}

}  // namespace dirac_gap
