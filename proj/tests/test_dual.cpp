#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "scc/dual.hpp"

using namespace scc;
using diff::Dual1;
using diff::Dual2;
using Catch::Approx;

TEST_CASE("first-order arithmetic follows product and chain rules") {
  Dual1 x(2.0, 1.0);
  Dual1 y = x * x * x;  // d/dx x^3 = 3x^2
  CHECK(y.v == Approx(8.0));
  CHECK(y.d == Approx(12.0));

  Dual1 z = exp(sin(x));
  CHECK(z.v == Approx(std::exp(std::sin(2.0))));
  CHECK(z.d == Approx(std::cos(2.0) * std::exp(std::sin(2.0))));

  Dual1 w = sqrt(x) / (1.0 + x);
  double dv = (0.5 / std::sqrt(2.0) * 3.0 - std::sqrt(2.0)) / 9.0;
  CHECK(w.d == Approx(dv));

  Dual1 r = log1p(x * x);
  CHECK(r.d == Approx(2.0 * 2.0 / 5.0));
}

TEST_CASE("nested duals give exact second derivatives of polynomials") {
  // f(x) = x^4: f'' = 12 x^2, exact in floating point at x = 1.5
  Dual2 x;
  x.v.v = 1.5;
  x.v.d = 1.0;
  x.d.v = 1.0;
  Dual2 f = x * x * x * x;
  CHECK(f.v.v == 5.0625);
  CHECK(f.d.d == 12.0 * 1.5 * 1.5);
}

TEST_CASE("gradient on closed forms") {
  auto norm2 = [](const auto& x) {
    return x[0] * x[0] + x[1] * x[1];
  };
  Eigen::VectorXd x(2);
  x << 1.0, 2.0;
  Eigen::VectorXd g = diff::gradient(norm2, x);
  CHECK(g[0] == Approx(2.0));
  CHECK(g[1] == Approx(4.0));

  auto constant = [](const auto&) { return Dual1(3.0); };
  Eigen::VectorXd gc = diff::gradient(constant, x);
  CHECK(gc.norm() == 0.0);
}

TEST_CASE("hessian of quadratic form is 2Q") {
  Eigen::Matrix2d q;
  q << 3.0, 1.0, 1.0, 2.0;
  auto f = [&](const auto& x) {
    return x[0] * (q(0, 0) * x[0] + q(0, 1) * x[1]) +
           x[1] * (q(1, 0) * x[0] + q(1, 1) * x[1]);
  };
  Eigen::VectorXd x(2);
  x << 0.3, -0.7;
  Eigen::MatrixXd h = diff::hessian(f, x);
  CHECK((h - 2.0 * q).cwiseAbs().maxCoeff() < 1e-14);

  auto lin = [](const auto& x) { return 4.0 * x[0] - x[1]; };
  CHECK(diff::hessian(lin, x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hessian symmetry on a transcendental field") {
  auto f = [](const auto& x) {
    return sin(x[0] * x[1]) + exp(x[0]) * x[2] * x[2] + log(2.0 + x[2]);
  };
  Eigen::VectorXd x(3);
  x << 0.4, -0.3, 0.9;
  Eigen::MatrixXd h = diff::hessian(f, x);
  CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(diff::hessian_asymmetry(f, x) < 1e-8);

  // spot-check an analytic mixed partial: d2/dx0 dx1 sin(x0 x1)
  double v = -x[0] * x[1] * std::sin(x[0] * x[1]) + std::cos(x[0] * x[1]);
  CHECK(h(0, 1) == Approx(v).margin(1e-12));
}

TEST_CASE("non-finite derivative is reported with its index") {
  auto f = [](const auto& x) { return sqrt(x[1]); };  // d/dx at 0 -> inf
  Eigen::VectorXd x(2);
  x << 1.0, 0.0;
  CHECK_THROWS_AS(diff::gradient(f, x), NumericalError);
}

TEST_CASE("eigen matrices of duals multiply correctly") {
  Eigen::Matrix<Dual1, 2, 2> m;
  m(0, 0) = Dual1(1.0, 1.0);
  m(0, 1) = Dual1(2.0, 0.0);
  m(1, 0) = Dual1(0.0, 0.0);
  m(1, 1) = Dual1(3.0, 1.0);
  Eigen::Matrix<Dual1, 2, 2> mm = m.transpose() * m;
  CHECK(mm(0, 0).v == Approx(1.0));
  CHECK(mm(0, 0).d == Approx(2.0));  // d/dt (t+1)^2 at t=0
  CHECK(mm(1, 1).v == Approx(13.0));
  CHECK(mm(1, 1).d == Approx(6.0));  // d/dt (4 + (3+t)^2)
}
