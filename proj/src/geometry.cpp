#include "pgo/geometry.hpp"

#include <cmath>

namespace pgo {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// sin(t)/t with series fallback.
double sinc(double t) {
  if (std::abs(t) < kSmallAngle) {
    const double t2 = t * t;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(t) / t;
}

// (1 - cos(t))/t = 2*sin^2(t/2)/t; the half-angle form avoids cancellation.
double one_minus_cos_over(double t) {
  if (std::abs(t) < kSmallAngle) {
    const double t2 = t * t;
    return 0.5 * t - t * t2 / 24.0;
  }
  const double sh = std::sin(0.5 * t);
  return 2.0 * sh * sh / t;
}

// a(t) = (t/2)*cot(t/2), the diagonal coefficient of V^-1 in SE(2).
double half_cot_half(double t) {
  if (std::abs(t) < kSmallAngle) {
    const double t2 = t * t;
    return 1.0 - t2 / 12.0 - t2 * t2 / 720.0;
  }
  const double h = 0.5 * t;
  return h * std::cos(h) / std::sin(h);
}

// d/dt of half_cot_half.
double half_cot_half_deriv(double t) {
  if (std::abs(t) < 1e-4) {
    const double t2 = t * t;
    return -t / 6.0 - t * t2 / 180.0;
  }
  const double h = 0.5 * t;
  const double s = std::sin(h);
  return 0.5 * (std::cos(h) / s - h / (s * s));
}

}  // namespace

double wrap_angle(double theta) {
  double t = std::remainder(theta, 2.0 * kPi);
  if (t <= -kPi) t += 2.0 * kPi;
  return t;
}

// ---------------------------------------------------------------------------
// SE(2)

Eigen::Matrix2d Pose2::rotation() const {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

Pose2 compose(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.theta), s = std::sin(a.theta);
  return {a.x + c * b.x - s * b.y, a.y + s * b.x + c * b.y, a.theta + b.theta};
}

Pose2 inverse(const Pose2& a) {
  const double c = std::cos(a.theta), s = std::sin(a.theta);
  return {-(c * a.x + s * a.y), -(-s * a.x + c * a.y), -a.theta};
}

Pose2 between(const Pose2& a, const Pose2& b) {
  return compose(inverse(a), b);
}

Pose2 exp_se2(const Eigen::Vector3d& xi) {
  const double w = xi[2];
  const double sa = sinc(w);
  const double cb = one_minus_cos_over(w);
  return {sa * xi[0] - cb * xi[1], cb * xi[0] + sa * xi[1], w};
}

Eigen::Vector3d log_se2(const Pose2& p) {
  const double w = p.theta;
  const double a = half_cot_half(w);
  const double h = 0.5 * w;
  return {a * p.x + h * p.y, -h * p.x + a * p.y, w};
}

Eigen::Matrix3d right_jacobian_inv_se2(const Eigen::Vector3d& r) {
  // Chain rule: log(exp(r) * exp(delta)) differentiated at delta = 0 is
  // D log at E = exp(r), times the derivative of composition, which rotates
  // the translational part of delta by R(E.theta).
  const Pose2 e = exp_se2(r);
  const double a = half_cot_half(e.theta);
  const double da = half_cot_half_deriv(e.theta);
  const double h = 0.5 * e.theta;
  Eigen::Matrix3d dlog;
  dlog << a, h, da * e.x + 0.5 * e.y,
      -h, a, -0.5 * e.x + da * e.y,
      0.0, 0.0, 1.0;
  Eigen::Matrix3d dcomp = Eigen::Matrix3d::Identity();
  dcomp.topLeftCorner<2, 2>() = e.rotation();
  return dlog * dcomp;
}

Eigen::Matrix3d adjoint_se2(const Pose2& p) {
  Eigen::Matrix3d ad = Eigen::Matrix3d::Identity();
  ad.topLeftCorner<2, 2>() = p.rotation();
  ad(0, 2) = p.y;
  ad(1, 2) = -p.x;
  return ad;
}

Eigen::Vector3d relative_residual(const Pose2& z, const Pose2& xi,
                                  const Pose2& xj) {
  return log_se2(compose(inverse(z), between(xi, xj)));
}

Eigen::Vector3d relative_residual(const Pose2& z, const Pose2& xi,
                                  const Pose2& xj, Eigen::Matrix3d* ji,
                                  Eigen::Matrix3d* jj) {
  const Pose2 b = between(xi, xj);
  const Eigen::Vector3d r = log_se2(compose(inverse(z), b));
  const Eigen::Matrix3d jr_inv = right_jacobian_inv_se2(r);
  if (jj) *jj = jr_inv;
  if (ji) *ji = -jr_inv * adjoint_se2(inverse(b));
  return r;
}

// ---------------------------------------------------------------------------
// SO(3)

Eigen::Matrix3d hat(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

namespace {

Eigen::Quaterniond canonical(Eigen::Quaterniond q) {
  q.normalize();
  if (q.w() < 0.0 ||
      (q.w() == 0.0 &&
       (q.x() < 0.0 || (q.x() == 0.0 && (q.y() < 0.0 || (q.y() == 0.0 && q.z() < 0.0)))))) {
    q.coeffs() = -q.coeffs();
  }
  return q;
}

}  // namespace

Eigen::Quaterniond exp_so3(const Eigen::Vector3d& phi) {
  const double theta = phi.norm();
  double w, k;  // q = (w, k * phi)
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    w = 1.0 - t2 / 8.0;
    k = 0.5 - t2 / 48.0;
  } else {
    w = std::cos(0.5 * theta);
    k = std::sin(0.5 * theta) / theta;
  }
  return canonical({w, k * phi.x(), k * phi.y(), k * phi.z()});
}

Eigen::Vector3d log_so3(const Eigen::Quaterniond& q_in) {
  const Eigen::Quaterniond q = canonical(q_in);
  const Eigen::Vector3d v(q.x(), q.y(), q.z());
  const double s = v.norm();
  double k;  // phi = k * v
  if (s < kSmallAngle) {
    k = 2.0 / q.w() - 2.0 * s * s / (3.0 * q.w() * q.w() * q.w());
  } else {
    k = 2.0 * std::atan2(s, q.w()) / s;
  }
  return k * v;
}

Eigen::Matrix3d left_jacobian_so3(const Eigen::Vector3d& phi) {
  const double theta = phi.norm();
  double b, c;
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    b = 0.5 - t2 / 24.0;
    c = 1.0 / 6.0 - t2 / 120.0;
  } else {
    const double sh = std::sin(0.5 * theta);
    b = 2.0 * sh * sh / (theta * theta);
    c = (theta - std::sin(theta)) / (theta * theta * theta);
  }
  const Eigen::Matrix3d px = hat(phi);
  return Eigen::Matrix3d::Identity() + b * px + c * px * px;
}

Eigen::Matrix3d left_jacobian_inv_so3(const Eigen::Vector3d& phi) {
  const double theta = phi.norm();
  double e;  // (1 - (theta/2) cot(theta/2)) / theta^2
  if (theta < kSmallAngle) {
    e = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    e = (1.0 - half_cot_half(theta)) / (theta * theta);
  }
  const Eigen::Matrix3d px = hat(phi);
  return Eigen::Matrix3d::Identity() - 0.5 * px + e * px * px;
}

// ---------------------------------------------------------------------------
// SE(3)

Pose3::Pose3(const Eigen::Vector3d& t_, const Eigen::Quaterniond& q_)
    : t(t_), q(canonical(q_)) {}

Pose3 compose(const Pose3& a, const Pose3& b) {
  return {a.t + a.q * b.t, a.q * b.q};
}

Pose3 inverse(const Pose3& a) {
  const Eigen::Quaterniond qi = a.q.conjugate();
  return {qi * -a.t, qi};
}

Pose3 between(const Pose3& a, const Pose3& b) {
  return compose(inverse(a), b);
}

Pose3 exp_se3(const Vector6d& xi) {
  const Eigen::Vector3d rho = xi.head<3>();
  const Eigen::Vector3d phi = xi.tail<3>();
  return {left_jacobian_so3(phi) * rho, exp_so3(phi)};
}

Vector6d log_se3(const Pose3& p) {
  const Eigen::Vector3d phi = log_so3(p.q);
  Vector6d xi;
  xi.head<3>() = left_jacobian_inv_so3(phi) * p.t;
  xi.tail<3>() = phi;
  return xi;
}

namespace {

// Translation/rotation coupling block of the SE(3) left Jacobian.
Eigen::Matrix3d q_block(const Eigen::Vector3d& rho, const Eigen::Vector3d& phi) {
  const double theta = phi.norm();
  double q1, q2, q3;
  if (theta < 1e-2) {
    const double t2 = theta * theta;
    q1 = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0;
    q2 = -1.0 / 24.0 + t2 / 720.0 - t2 * t2 / 40320.0;
    q3 = -1.0 / 120.0 + t2 / 5040.0 - t2 * t2 / 362880.0;
  } else {
    const double s = std::sin(theta), c = std::cos(theta);
    const double t3 = theta * theta * theta;
    q1 = (theta - s) / t3;
    q2 = (1.0 - 0.5 * theta * theta - c) / (t3 * theta);
    q3 = (theta - s - t3 / 6.0) / (t3 * theta * theta);
  }
  const Eigen::Matrix3d rx = hat(rho);
  const Eigen::Matrix3d px = hat(phi);
  const Eigen::Matrix3d prp = px * rx * px;
  return 0.5 * rx + q1 * (px * rx + rx * px + prp) -
         q2 * (px * px * rx + rx * px * px - 3.0 * prp) -
         0.5 * (q2 - 3.0 * q3) * (prp * px + px * prp);
}

}  // namespace

Matrix6d right_jacobian_inv_se3(const Vector6d& r) {
  // Jr^-1(xi) = Jl^-1(-xi).
  const Eigen::Vector3d rho = -r.head<3>();
  const Eigen::Vector3d phi = -r.tail<3>();
  const Eigen::Matrix3d jinv = left_jacobian_inv_so3(phi);
  Matrix6d out = Matrix6d::Zero();
  out.topLeftCorner<3, 3>() = jinv;
  out.bottomRightCorner<3, 3>() = jinv;
  out.topRightCorner<3, 3>() = -jinv * q_block(rho, phi) * jinv;
  return out;
}

Matrix6d adjoint_se3(const Pose3& p) {
  const Eigen::Matrix3d r = p.rotation();
  Matrix6d ad = Matrix6d::Zero();
  ad.topLeftCorner<3, 3>() = r;
  ad.bottomRightCorner<3, 3>() = r;
  ad.topRightCorner<3, 3>() = hat(p.t) * r;
  return ad;
}

Vector6d relative_residual(const Pose3& z, const Pose3& xi, const Pose3& xj) {
  return log_se3(compose(inverse(z), between(xi, xj)));
}

Vector6d relative_residual(const Pose3& z, const Pose3& xi, const Pose3& xj,
                           Matrix6d* ji, Matrix6d* jj) {
  const Pose3 b = between(xi, xj);
  const Vector6d r = log_se3(compose(inverse(z), b));
  const Matrix6d jr_inv = right_jacobian_inv_se3(r);
  if (jj) *jj = jr_inv;
  if (ji) *ji = -jr_inv * adjoint_se3(inverse(b));
  return r;
}

}  // namespace pgo
