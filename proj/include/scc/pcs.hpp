#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "scc/dual.hpp"
#include "scc/error.hpp"
#include "scc/geom.hpp"

namespace scc::pcs {

using geom::Vec2;
using geom::Vec2T;

/// Geometric and material parameters of the N-segment planar robot.
/// Strain coordinates per segment: (bending kappa [1/m], shear sigma_x,
/// axial sigma_y), measured as deviations from the rest strain (0,0,1).
struct PcsParams {
  int num_segments = 2;
  std::vector<double> segment_length = {0.13, 0.13};  // m
  double backbone_radius = 0.02;                      // m
  double density = 1070.0;                            // kg/m^3
  double elastic_modulus = 2000.0;                    // Pa
  double shear_modulus = 1000.0;                      // Pa
  double damping_scale = 0.1;                         // s, D = scale * K
  Vec2 gravity = Vec2::Zero();                        // m/s^2
  Vec2 base_position = Vec2::Zero();
  double base_angle = 0.0;  // rad; 0 points the rest robot along +y

  int dof() const { return 3 * num_segments; }

  double total_length() const {
    double L = 0.0;
    for (double l : segment_length) L += l;
    return L;
  }

  double cross_section_area() const {
    return std::numbers::pi * backbone_radius * backbone_radius;
  }

  double second_moment() const {
    double r = backbone_radius;
    return std::numbers::pi * r * r * r * r / 4.0;
  }

  void validate() const {
    if (num_segments < 1) throw InvalidArgument("pcs: num_segments < 1");
    if (static_cast<int>(segment_length.size()) != num_segments)
      throw InvalidArgument("pcs: segment_length size != num_segments");
    for (double l : segment_length)
      if (!(l > 0.0)) throw InvalidArgument("pcs: segment length must be > 0");
    if (!(backbone_radius > 0.0) || !(density > 0.0) ||
        !(elastic_modulus > 0.0) || !(shear_modulus > 0.0))
      throw InvalidArgument("pcs: physical scalars must be > 0");
    if (!(damping_scale >= 0.0))
      throw InvalidArgument("pcs: damping_scale must be >= 0");
  }
};

struct RobotState {
  Eigen::VectorXd q;   // 3N strain deviations
  Eigen::VectorXd qd;  // 3N strain rates

  static RobotState zero(const PcsParams& p) {
    return {Eigen::VectorXd::Zero(p.dof()), Eigen::VectorXd::Zero(p.dof())};
  }
};

inline void validate_state(const PcsParams& p, const RobotState& s) {
  if (s.q.size() != p.dof() || s.qd.size() != p.dof())
    throw InvalidArgument("state: dimension mismatch");
  if (!s.q.allFinite() || !s.qd.allFinite())
    throw InvalidArgument("state: non-finite entries");
  for (int i = 0; i < p.num_segments; ++i) {
    if (s.q[3 * i + 2] <= -1.0 + 1e-6)
      throw InvalidArgument("state: axial stretch non-positive in segment " +
                            std::to_string(i));
  }
}

struct Pose2 {
  double theta = 0.0;  // rad, wrapped to [-pi, pi)
  Vec2 p = Vec2::Zero();
};

template <class T>
struct PoseT {
  T theta;
  Vec2T<T> p;
};

namespace detail {

// Integrals of cos/sin(kappa*t) over [0, l]; series branch keeps the
// kappa -> 0 limit smooth (|x| < 1e-6, error ~ x^4).
template <class T>
void arc_integrals(const T& kappa, double l, T& c_int, T& s_int) {
  using diff::cos;
  using diff::sin;
  using std::cos;
  using std::sin;
  T x = kappa * l;
  if (std::abs(diff::scalar_value(x)) < 1e-6) {
    c_int = l * (1.0 - x * x / 6.0);
    s_int = l * (x / 2.0 - x * x * x / 24.0);
  } else {
    c_int = sin(x) / kappa;
    s_int = (1.0 - cos(x)) / kappa;
  }
}

template <class T>
T wrap_angle(const T& theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double k = std::floor((diff::scalar_value(theta) + std::numbers::pi) /
                        two_pi);
  return theta - k * two_pi;
}

}  // namespace detail

/// Pose of the backbone point at arc length s, by closed-form constant
/// strain integration chained across segments.
template <class T>
PoseT<T> fk_pose_t(const PcsParams& params, const diff::VecX<T>& q,
                   double s) {
  using diff::cos;
  using diff::sin;
  using std::cos;
  using std::sin;
  const double L = params.total_length();
  if (!(s > 0.0) || s > L + 1e-12)
    throw InvalidArgument("fk: arc length s out of (0, L]");
  T theta = params.base_angle;
  Vec2T<T> p(T(params.base_position.x()), T(params.base_position.y()));
  double s_done = 0.0;
  for (int i = 0; i < params.num_segments && s_done < s; ++i) {
    double l = std::min(params.segment_length[i], s - s_done);
    T kappa = q[3 * i];
    T sig_x = q[3 * i + 1];
    T sig_y = q[3 * i + 2] + 1.0;  // rest strain is unit axial
    T c_int, s_int;
    detail::arc_integrals(kappa, l, c_int, s_int);
    Vec2T<T> d_local(c_int * sig_x - s_int * sig_y,
                     s_int * sig_x + c_int * sig_y);
    T ct = cos(theta), st = sin(theta);
    p.x() += ct * d_local.x() - st * d_local.y();
    p.y() += st * d_local.x() + ct * d_local.y();
    theta += kappa * l;
    s_done += l;
  }
  return {detail::wrap_angle(theta), p};
}

inline Pose2 fk_pose(const PcsParams& params, const Eigen::VectorXd& q,
                     double s) {
  PoseT<double> r = fk_pose_t<double>(params, q, s);
  return {r.theta, r.p};
}

/// 3 x 3N kinematic Jacobian, rows (theta, x, y), by forward-mode
/// differentiation of the pose map. Columns of segments starting past s
/// are exactly zero.
template <class T>
Eigen::Matrix<T, 3, Eigen::Dynamic> jacobian_t(const PcsParams& params,
                                               const diff::VecX<T>& q,
                                               double s) {
  using D = diff::Dual<T>;
  const int n = params.dof();
  diff::VecX<D> qd(n);
  for (int i = 0; i < n; ++i) qd[i] = D(q[i], T(0.0));
  Eigen::Matrix<T, 3, Eigen::Dynamic> J(3, n);
  J.setZero();
  for (int k = 0; k < n; ++k) {
    qd[k].d = T(1.0);
    PoseT<D> pose = fk_pose_t<D>(params, qd, s);
    qd[k].d = T(0.0);
    J(0, k) = pose.theta.d;
    J(1, k) = pose.p.x().d;
    J(2, k) = pose.p.y().d;
  }
  return J;
}

inline Eigen::Matrix<double, 3, Eigen::Dynamic> jacobian(
    const PcsParams& params, const Eigen::VectorXd& q, double s) {
  return jacobian_t<double>(params, q, s);
}

namespace detail {

// 8-point Gauss-Legendre on [-1, 1].
inline constexpr int kQuadOrder = 8;
inline constexpr double kQuadNodes[kQuadOrder] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
inline constexpr double kQuadWeights[kQuadOrder] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

}  // namespace detail

/// Inertia matrix and gravity torque assembled by fixed Gauss-Legendre
/// quadrature per segment.
template <class T>
void mass_gravity_t(const PcsParams& params, const diff::VecX<T>& q,
                    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& M,
                    diff::VecX<T>& G_vec) {
  const int n = params.dof();
  const double rho_a = params.density * params.cross_section_area();
  const double rho_i = params.density * params.second_moment();
  M.setZero(n, n);
  G_vec.setZero(n);
  Vec2T<T> g(T(params.gravity.x()), T(params.gravity.y()));
  double s_start = 0.0;
  for (int i = 0; i < params.num_segments; ++i) {
    const double l = params.segment_length[i];
    for (int k = 0; k < detail::kQuadOrder; ++k) {
      const double s = s_start + 0.5 * l * (1.0 + detail::kQuadNodes[k]);
      const double w = 0.5 * l * detail::kQuadWeights[k];
      Eigen::Matrix<T, 3, Eigen::Dynamic> J = jacobian_t<T>(params, q, s);
      auto J_xy = J.template bottomRows<2>();
      auto J_th = J.template topRows<1>();
      M += (w * rho_a) * (J_xy.transpose() * J_xy) +
           (w * rho_i) * (J_th.transpose() * J_th);
      G_vec -= (w * rho_a) * (J_xy.transpose() * g);
    }
    s_start += l;
  }
}

/// Block-diagonal stiffness: per segment L_i * diag(E*I_z, G*A_c, E*A_c).
inline Eigen::MatrixXd stiffness_matrix(const PcsParams& params) {
  const int n = params.dof();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  const double a = params.cross_section_area();
  const double iz = params.second_moment();
  for (int i = 0; i < params.num_segments; ++i) {
    const double l = params.segment_length[i];
    K(3 * i, 3 * i) = l * params.elastic_modulus * iz;
    K(3 * i + 1, 3 * i + 1) = l * params.shear_modulus * a;
    K(3 * i + 2, 3 * i + 2) = l * params.elastic_modulus * a;
  }
  return K;
}

struct DynamicsTerms {
  Eigen::MatrixXd M;      // inertia
  Eigen::MatrixXd C;      // Coriolis (Christoffel form)
  Eigen::VectorXd G_vec;  // gravity torque
  Eigen::MatrixXd K;      // stiffness
  Eigen::MatrixXd D;      // damping
  Eigen::MatrixXd A;      // actuation map (identity)
};

/// All terms of the equations of motion at the given state. C is built
/// from Christoffel symbols of dM/dq so that dM/dt - 2C is skew.
inline DynamicsTerms dynamics_terms(const PcsParams& params,
                                    const RobotState& state) {
  const int n = params.dof();
  DynamicsTerms t;
  mass_gravity_t<double>(params, state.q, t.M, t.G_vec);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.M);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12)
    throw NumericalError("dynamics: inertia matrix not positive definite");

  // dM/dq by one dual pass per coordinate.
  std::vector<Eigen::MatrixXd> dM(n);
  {
    diff::VecX<diff::Dual1> qd(n);
    for (int i = 0; i < n; ++i) qd[i] = diff::Dual1(state.q[i], 0.0);
    Eigen::Matrix<diff::Dual1, Eigen::Dynamic, Eigen::Dynamic> Md;
    diff::VecX<diff::Dual1> Gd;
    for (int k = 0; k < n; ++k) {
      qd[k].d = 1.0;
      mass_gravity_t<diff::Dual1>(params, qd, Md, Gd);
      qd[k].d = 0.0;
      dM[k].resize(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dM[k](i, j) = Md(i, j).d;
    }
  }
  t.C.setZero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double cij = 0.0;
      for (int k = 0; k < n; ++k)
        cij += 0.5 *
               (dM[k](i, j) + dM[j](i, k) - dM[i](j, k)) * state.qd[k];
      t.C(i, j) = cij;
    }

  t.K = stiffness_matrix(params);
  t.D = params.damping_scale * t.K;
  t.A = Eigen::MatrixXd::Identity(n, n);
  return t;
}

/// Strain acceleration from the equations of motion,
/// M qdd = A u + tau_c - C qd - G - K q - D qd.
inline Eigen::VectorXd forward_dynamics(const PcsParams& params,
                                        const RobotState& state,
                                        const Eigen::VectorXd& u,
                                        const Eigen::VectorXd& tau_c,
                                        const DynamicsTerms& t) {
  Eigen::VectorXd rhs = t.A * u + tau_c - t.C * state.qd - t.G_vec -
                        t.K * state.q - t.D * state.qd;
  Eigen::LLT<Eigen::MatrixXd> llt(t.M);
  if (llt.info() != Eigen::Success)
    throw NumericalError("forward_dynamics: singular inertia matrix");
  Eigen::VectorXd qdd = llt.solve(rhs);
  // One refinement pass keeps the residual at solver precision.
  qdd += llt.solve(rhs - t.M * qdd);
  const double res = (t.M * qdd - rhs).norm();
  if (res > 1e-10 * (1.0 + rhs.norm()))
    throw NumericalError("forward_dynamics: linear solve residual too large");
  return qdd;
}

inline Eigen::VectorXd forward_dynamics(const PcsParams& params,
                                        const RobotState& state,
                                        const Eigen::VectorXd& u,
                                        const Eigen::VectorXd& tau_c) {
  return forward_dynamics(params, state, u, tau_c,
                          dynamics_terms(params, state));
}

/// Arc length of segment i's tip (1-based cumulative end).
inline double tip_arclength(const PcsParams& params, int segment) {
  if (segment < 0 || segment >= params.num_segments)
    throw InvalidArgument("tip_arclength: segment index out of range");
  double s = 0.0;
  for (int i = 0; i <= segment; ++i) s += params.segment_length[i];
  return s;
}

/// Total mechanical energy (kinetic + elastic); used by passivity checks.
inline double energy(const PcsParams& params, const RobotState& state) {
  Eigen::MatrixXd M;
  Eigen::VectorXd G;
  mass_gravity_t<double>(params, state.q, M, G);
  Eigen::MatrixXd K = stiffness_matrix(params);
  return 0.5 * state.qd.dot(M * state.qd) + 0.5 * state.q.dot(K * state.q);
}

}  // namespace scc::pcs
