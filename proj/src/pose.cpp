#include "posegate/pose.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "posegate/error.hpp"

namespace posegate {

namespace {

void CheckFinite(const Eigen::Vector3d& p, const Eigen::Vector4d& q) {
  if (!p.allFinite() || !q.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "pose has non-finite components");
  }
}

}  // namespace

Pose::Pose() : position_(Eigen::Vector3d::Zero()), orientation_(1.0, 0.0, 0.0, 0.0) {}

Pose::Pose(const Eigen::Vector3d& position, const Eigen::Vector4d& orientation_wxyz)
    : position_(position), orientation_(orientation_wxyz) {
  CheckFinite(position_, orientation_);
  if (QuaternionNorm(orientation_) == 0.0) {
    throw Error(ErrorCode::kZeroNormOrientation, "pose orientation has zero norm");
  }
}

Pose Pose::FromArray(const std::array<double, 7>& v) {
  return Pose(Eigen::Vector3d(v[0], v[1], v[2]), Eigen::Vector4d(v[3], v[4], v[5], v[6]));
}

double Pose::orientation_norm() const { return QuaternionNorm(orientation_); }

Eigen::Vector4d Pose::unit_orientation() const { return NormalizeQuaternion(orientation_); }

Eigen::Quaterniond Pose::rotation() const {
  const Eigen::Vector4d u = unit_orientation();
  return Eigen::Quaterniond(u[0], u[1], u[2], u[3]);
}

Pose Pose::Normalized() const { return Pose(position_, unit_orientation()); }

std::array<double, 7> Pose::ToArray() const {
  return {position_[0],    position_[1],    position_[2],   orientation_[0],
          orientation_[1], orientation_[2], orientation_[3]};
}

Pose PoseFromRotation(const Eigen::Vector3d& position, const Eigen::Quaterniond& rotation) {
  return Pose(position, Eigen::Vector4d(rotation.w(), rotation.x(), rotation.y(), rotation.z()));
}

double QuaternionNorm(const Eigen::Vector4d& q) {
  return std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
}

Eigen::Vector4d NormalizeQuaternion(const Eigen::Vector4d& q) {
  const double n = QuaternionNorm(q);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::kZeroNormOrientation, "quaternion cannot be normalized");
  }
  return Eigen::Vector4d(q[0] / n, q[1] / n, q[2] / n, q[3] / n);
}

double PositionDistance(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double PositionDistance(const Pose& a, const Pose& b) {
  return PositionDistance(a.position(), b.position());
}

double UnitOrientationDistance(const Eigen::Vector4d& u, const Eigen::Vector4d& r,
                               const DistanceConfig& cfg) {
  const double d0 = u[0] - r[0];
  const double d1 = u[1] - r[1];
  const double d2 = u[2] - r[2];
  const double d3 = u[3] - r[3];
  const double direct = std::sqrt(d0 * d0 + d1 * d1 + d2 * d2 + d3 * d3);
  if (!cfg.sign_invariant_orientation) return direct;
  const double f0 = u[0] + r[0];
  const double f1 = u[1] + r[1];
  const double f2 = u[2] + r[2];
  const double f3 = u[3] + r[3];
  return std::min(direct, std::sqrt(f0 * f0 + f1 * f1 + f2 * f2 + f3 * f3));
}

double OrientationDistance(const Pose& predicted, const Pose& reference,
                           const DistanceConfig& cfg) {
  return UnitOrientationDistance(NormalizeQuaternion(predicted.orientation()),
                                 reference.orientation(), cfg);
}

double RotationErrorDegrees(const Pose& a, const Pose& b) {
  const Eigen::Vector4d ua = NormalizeQuaternion(a.orientation());
  const Eigen::Vector4d ub = NormalizeQuaternion(b.orientation());
  const double dot = std::abs(ua.dot(ub));
  return 2.0 * std::acos(std::min(1.0, dot)) * 180.0 / std::numbers::pi;
}

}  // namespace posegate
