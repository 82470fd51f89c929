// SE(2) and SE(3) group elements with exp/log maps, composition, relative-pose
// residuals, and the analytic Jacobians used by the solver.
//
// Conventions:
//  * tangent ordering is translation-first, rotation-last: (dx, dy, dtheta)
//    for SE(2) and (rho, phi) = (3 translation, 3 rotation-vector) for SE(3);
//  * perturbations are right-multiplicative, X <- X * exp(delta);
//  * Pose2.theta is wrapped to (-pi, pi]; Pose3 stores a unit quaternion with
//    canonical sign (w >= 0).
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace pgo {

// Below this rotation magnitude the closed forms switch to series expansions.
inline constexpr double kSmallAngle = 1e-7;

double wrap_angle(double theta);  // into (-pi, pi]

// ---------------------------------------------------------------------------
// SE(2)

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // wrapped to (-pi, pi]

  Pose2() = default;
  Pose2(double x_, double y_, double theta_)
      : x(x_), y(y_), theta(wrap_angle(theta_)) {}

  Eigen::Matrix2d rotation() const;
  Eigen::Vector2d translation() const { return {x, y}; }
};

Pose2 compose(const Pose2& a, const Pose2& b);
Pose2 inverse(const Pose2& a);
Pose2 between(const Pose2& a, const Pose2& b);  // a^-1 * b

Pose2 exp_se2(const Eigen::Vector3d& xi);
Eigen::Vector3d log_se2(const Pose2& p);

// Inverse right Jacobian of the exponential map at tangent r:
// d/d(delta) log(exp(r) * exp(delta)) at delta = 0.
Eigen::Matrix3d right_jacobian_inv_se2(const Eigen::Vector3d& r);
Eigen::Matrix3d adjoint_se2(const Pose2& p);

// log(Z^-1 * Xi^-1 * Xj); zero iff between(Xi, Xj) == Z.
Eigen::Vector3d relative_residual(const Pose2& z, const Pose2& xi,
                                  const Pose2& xj);
// Same, with Jacobians w.r.t. right perturbations of Xi and Xj.
Eigen::Vector3d relative_residual(const Pose2& z, const Pose2& xi,
                                  const Pose2& xj, Eigen::Matrix3d* ji,
                                  Eigen::Matrix3d* jj);

// ---------------------------------------------------------------------------
// SO(3) helpers shared by Pose3 and the SE(3) Jacobians.

Eigen::Quaterniond exp_so3(const Eigen::Vector3d& phi);
// Principal branch; at rotation angle exactly pi either sign may be returned.
Eigen::Vector3d log_so3(const Eigen::Quaterniond& q);
Eigen::Matrix3d hat(const Eigen::Vector3d& v);
Eigen::Matrix3d left_jacobian_so3(const Eigen::Vector3d& phi);
Eigen::Matrix3d left_jacobian_inv_so3(const Eigen::Vector3d& phi);

// ---------------------------------------------------------------------------
// SE(3)

struct Pose3 {
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();  // (w, x, y, z)

  Pose3() = default;
  Pose3(const Eigen::Vector3d& t_, const Eigen::Quaterniond& q_);

  Eigen::Matrix3d rotation() const { return q.toRotationMatrix(); }
  const Eigen::Vector3d& translation() const { return t; }
};

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

Pose3 compose(const Pose3& a, const Pose3& b);
Pose3 inverse(const Pose3& a);
Pose3 between(const Pose3& a, const Pose3& b);

Pose3 exp_se3(const Vector6d& xi);
Vector6d log_se3(const Pose3& p);

Matrix6d right_jacobian_inv_se3(const Vector6d& r);
Matrix6d adjoint_se3(const Pose3& p);

Vector6d relative_residual(const Pose3& z, const Pose3& xi, const Pose3& xj);
Vector6d relative_residual(const Pose3& z, const Pose3& xi, const Pose3& xj,
                           Matrix6d* ji, Matrix6d* jj);

// ---------------------------------------------------------------------------
// Group traits so graph/solver code can be written once for both groups.

template <class PoseT>
struct GroupTraits;

template <>
struct GroupTraits<Pose2> {
  static constexpr int kDof = 3;
  using Pose = Pose2;
  using Tangent = Eigen::Vector3d;
  using Jacobian = Eigen::Matrix3d;
  using Position = Eigen::Vector2d;

  static Pose identity() { return {}; }
  static Pose exp(const Tangent& xi) { return exp_se2(xi); }
  static Tangent log(const Pose& p) { return log_se2(p); }
  static Pose compose(const Pose& a, const Pose& b) { return pgo::compose(a, b); }
  static Pose inverse(const Pose& a) { return pgo::inverse(a); }
  static Pose between(const Pose& a, const Pose& b) { return pgo::between(a, b); }
  static Jacobian right_jacobian_inv(const Tangent& r) {
    return right_jacobian_inv_se2(r);
  }
  static Jacobian adjoint(const Pose& p) { return adjoint_se2(p); }
  static Position position(const Pose& p) { return p.translation(); }
  static double rotation_angle(const Pose& p) { return std::abs(p.theta); }
};

template <>
struct GroupTraits<Pose3> {
  static constexpr int kDof = 6;
  using Pose = Pose3;
  using Tangent = Vector6d;
  using Jacobian = Matrix6d;
  using Position = Eigen::Vector3d;

  static Pose identity() { return {}; }
  static Pose exp(const Tangent& xi) { return exp_se3(xi); }
  static Tangent log(const Pose& p) { return log_se3(p); }
  static Pose compose(const Pose& a, const Pose& b) { return pgo::compose(a, b); }
  static Pose inverse(const Pose& a) { return pgo::inverse(a); }
  static Pose between(const Pose& a, const Pose& b) { return pgo::between(a, b); }
  static Jacobian right_jacobian_inv(const Tangent& r) {
    return right_jacobian_inv_se3(r);
  }
  static Jacobian adjoint(const Pose& p) { return adjoint_se3(p); }
  static Position position(const Pose& p) { return p.t; }
  static double rotation_angle(const Pose& p) {
    return log_so3(p.q).norm();
  }
};

}  // namespace pgo
