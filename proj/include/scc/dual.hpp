#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "scc/error.hpp"

namespace scc::diff {

/// Forward-mode dual number. Nesting (Dual<Dual<double>>) yields
/// second-order propagation; all branch decisions compare primal values
/// so every nesting level follows the same code path.
template <class T>
struct Dual {
  T v{};  // value
  T d{};  // tangent

  Dual() = default;
  Dual(double c) : v(c), d(0.0) {}  // NOLINT: implicit for scalar literals
  Dual(T value, T tangent) : v(std::move(value)), d(std::move(tangent)) {}
};

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual<double>>;

inline double scalar_value(double x) { return x; }
template <class T>
double scalar_value(const Dual<T>& x) {
  return scalar_value(x.v);
}

// -- arithmetic ---------------------------------------------------------

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  return {a.v + b.v, a.d + b.d};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  return {a.v - b.v, a.d - b.d};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.v * b.v, a.v * b.d + a.d * b.v};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}
template <class T>
Dual<T> operator-(const Dual<T>& a) {
  return {-a.v, -a.d};
}
template <class T>
Dual<T> operator+(const Dual<T>& a) {
  return a;
}

template <class T>
Dual<T> operator+(const Dual<T>& a, double b) {
  return {a.v + b, a.d};
}
template <class T>
Dual<T> operator+(double a, const Dual<T>& b) {
  return {a + b.v, b.d};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, double b) {
  return {a.v - b, a.d};
}
template <class T>
Dual<T> operator-(double a, const Dual<T>& b) {
  return {a - b.v, -b.d};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, double b) {
  return {a.v * b, a.d * b};
}
template <class T>
Dual<T> operator*(double a, const Dual<T>& b) {
  return {a * b.v, a * b.d};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, double b) {
  return {a.v / b, a.d / b};
}
template <class T>
Dual<T> operator/(double a, const Dual<T>& b) {
  Dual<T> r = Dual<T>(a) / b;
  return r;
}

template <class T>
Dual<T>& operator+=(Dual<T>& a, const Dual<T>& b) {
  a = a + b;
  return a;
}
template <class T>
Dual<T>& operator-=(Dual<T>& a, const Dual<T>& b) {
  a = a - b;
  return a;
}
template <class T>
Dual<T>& operator*=(Dual<T>& a, const Dual<T>& b) {
  a = a * b;
  return a;
}
template <class T>
Dual<T>& operator/=(Dual<T>& a, const Dual<T>& b) {
  a = a / b;
  return a;
}
template <class T>
Dual<T>& operator+=(Dual<T>& a, double b) {
  a = a + b;
  return a;
}
template <class T>
Dual<T>& operator-=(Dual<T>& a, double b) {
  a = a - b;
  return a;
}
template <class T>
Dual<T>& operator*=(Dual<T>& a, double b) {
  a = a * b;
  return a;
}

// Comparisons act on primal values so control flow is identical for
// double and dual evaluation of the same code.
template <class T>
bool operator<(const Dual<T>& a, const Dual<T>& b) {
  return scalar_value(a) < scalar_value(b);
}
template <class T>
bool operator>(const Dual<T>& a, const Dual<T>& b) {
  return scalar_value(a) > scalar_value(b);
}
template <class T>
bool operator<=(const Dual<T>& a, const Dual<T>& b) {
  return scalar_value(a) <= scalar_value(b);
}
template <class T>
bool operator>=(const Dual<T>& a, const Dual<T>& b) {
  return scalar_value(a) >= scalar_value(b);
}
template <class T>
bool operator==(const Dual<T>& a, const Dual<T>& b) {
  return scalar_value(a) == scalar_value(b);
}
template <class T>
bool operator!=(const Dual<T>& a, const Dual<T>& b) {
  return scalar_value(a) != scalar_value(b);
}
template <class T>
bool operator<(const Dual<T>& a, double b) {
  return scalar_value(a) < b;
}
template <class T>
bool operator<(double a, const Dual<T>& b) {
  return a < scalar_value(b);
}
template <class T>
bool operator>(const Dual<T>& a, double b) {
  return scalar_value(a) > b;
}
template <class T>
bool operator>(double a, const Dual<T>& b) {
  return a > scalar_value(b);
}
template <class T>
bool operator<=(const Dual<T>& a, double b) {
  return scalar_value(a) <= b;
}
template <class T>
bool operator>=(const Dual<T>& a, double b) {
  return scalar_value(a) >= b;
}
template <class T>
bool operator==(const Dual<T>& a, double b) {
  return scalar_value(a) == b;
}

// -- elementary functions ------------------------------------------------

using std::abs;
using std::atan2;
using std::cos;
using std::exp;
using std::log;
using std::log1p;
using std::sin;
using std::sqrt;

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  T s = sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.v);
  return {e, a.d * e};
}
template <class T>
Dual<T> log(const Dual<T>& a) {
  return {log(a.v), a.d / a.v};
}
template <class T>
Dual<T> log1p(const Dual<T>& a) {
  return {log1p(a.v), a.d / (1.0 + a.v)};
}
template <class T>
Dual<T> sin(const Dual<T>& a) {
  return {sin(a.v), a.d * cos(a.v)};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  return {cos(a.v), -a.d * sin(a.v)};
}
template <class T>
Dual<T> abs(const Dual<T>& a) {
  return scalar_value(a) < 0.0 ? -a : a;
}
template <class T>
Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
  T den = x.v * x.v + y.v * y.v;
  return {atan2(y.v, x.v), (x.v * y.d - y.v * x.d) / den};
}
template <class T>
const Dual<T>& min(const Dual<T>& a, const Dual<T>& b) {
  return b < a ? b : a;
}
template <class T>
const Dual<T>& max(const Dual<T>& a, const Dual<T>& b) {
  return a < b ? b : a;
}

inline bool is_finite(double x) { return std::isfinite(x); }
template <class T>
bool is_finite(const Dual<T>& x) {
  return is_finite(x.v) && is_finite(x.d);
}

}  // namespace scc::diff

namespace Eigen {

template <class T>
struct NumTraits<scc::diff::Dual<T>> : NumTraits<double> {
  using Self = scc::diff::Dual<T>;
  using Real = Self;
  using NonInteger = Self;
  using Nested = Self;
  using Literal = double;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2 * NumTraits<T>::ReadCost,
    AddCost = 2 * NumTraits<T>::AddCost,
    MulCost = 3 * NumTraits<T>::MulCost,
  };
  static Self epsilon() { return Self(NumTraits<double>::epsilon()); }
  static Self dummy_precision() {
    return Self(NumTraits<double>::dummy_precision());
  }
  static Self highest() { return Self(NumTraits<double>::highest()); }
  static Self lowest() { return Self(NumTraits<double>::lowest()); }
  static int digits10() { return NumTraits<double>::digits10(); }
};

template <class T, class BinaryOp>
struct ScalarBinaryOpTraits<scc::diff::Dual<T>, double, BinaryOp> {
  using ReturnType = scc::diff::Dual<T>;
};
template <class T, class BinaryOp>
struct ScalarBinaryOpTraits<double, scc::diff::Dual<T>, BinaryOp> {
  using ReturnType = scc::diff::Dual<T>;
};

}  // namespace Eigen

namespace scc::diff {

template <class T>
using VecX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

/// Gradient of a scalar field via n forward-mode evaluations.
/// F must accept VecX<Dual1> and return Dual1.
template <class F>
Eigen::VectorXd gradient(F&& f, const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  VecX<Dual1> xd(n);
  for (Eigen::Index i = 0; i < n; ++i) xd[i] = Dual1(x[i], 0.0);
  Eigen::VectorXd g(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    xd[k].d = 1.0;
    Dual1 fx = f(xd);
    xd[k].d = 0.0;
    if (!is_finite(fx)) {
      throw NumericalError("gradient: non-finite derivative at index " +
                           std::to_string(k));
    }
    g[k] = fx.d;
  }
  return g;
}

/// Hessian via n^2 nested-dual evaluations, exactly symmetrized.
/// F must accept VecX<Dual2> and return Dual2.
template <class F>
Eigen::MatrixXd hessian(F&& f, const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  VecX<Dual2> xd(n);
  for (Eigen::Index i = 0; i < n; ++i) xd[i] = Dual2(x[i]);
  Eigen::MatrixXd h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      xd[i].d.v = 1.0;
      xd[j].v.d = 1.0;
      Dual2 fx = f(xd);
      xd[i].d.v = 0.0;
      xd[j].v.d = 0.0;
      if (!is_finite(fx)) {
        throw NumericalError("hessian: non-finite derivative at (" +
                             std::to_string(i) + "," + std::to_string(j) +
                             ")");
      }
      h(i, j) = fx.d.d;
    }
  }
  return 0.5 * (h + h.transpose()).eval();
}

/// Largest relative asymmetry |H - H^T| of the raw (pre-symmetrized)
/// Hessian; diagnostic used by tests.
template <class F>
double hessian_asymmetry(F&& f, const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  VecX<Dual2> xd(n);
  for (Eigen::Index i = 0; i < n; ++i) xd[i] = Dual2(x[i]);
  Eigen::MatrixXd h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      xd[i].d.v = 1.0;
      xd[j].v.d = 1.0;
      h(i, j) = f(xd).d.d;
      xd[i].d.v = 0.0;
      xd[j].v.d = 0.0;
    }
  }
  double scale = std::max(1e-300, h.cwiseAbs().maxCoeff());
  return (h - h.transpose()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace scc::diff
