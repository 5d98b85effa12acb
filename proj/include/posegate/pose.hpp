#pragma once

#include <array>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace posegate {

// Options for the quaternion distance. The default reproduces the raw
// Euclidean distance, which treats q and -q as far apart.
struct DistanceConfig {
  bool sign_invariant_orientation = false;
};

// Camera pose: position in meters plus an orientation quaternion stored in
// (w, x, y, z) order. The quaternion is not required to be unit length, only
// non-zero, because regressors emit raw quaternions.
class Pose {
 public:
  Pose();
  Pose(const Eigen::Vector3d& position, const Eigen::Vector4d& orientation_wxyz);

  static Pose FromArray(const std::array<double, 7>& values);

  const Eigen::Vector3d& position() const { return position_; }
  const Eigen::Vector4d& orientation() const { return orientation_; }

  double orientation_norm() const;
  Eigen::Vector4d unit_orientation() const;
  Eigen::Quaterniond rotation() const;

  // Same position, orientation scaled to unit length.
  Pose Normalized() const;

  // tx ty tz qw qx qy qz
  std::array<double, 7> ToArray() const;

  bool operator==(const Pose& other) const {
    return position_ == other.position_ && orientation_ == other.orientation_;
  }

 private:
  Eigen::Vector3d position_;
  Eigen::Vector4d orientation_;
};

struct AxisAlignedBox {
  Eigen::Vector3d min = Eigen::Vector3d::Zero();
  Eigen::Vector3d max = Eigen::Vector3d::Zero();

  bool Contains(const Eigen::Vector3d& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  Eigen::Vector3d extent() const { return max - min; }
};

Pose PoseFromRotation(const Eigen::Vector3d& position, const Eigen::Quaterniond& rotation);

double QuaternionNorm(const Eigen::Vector4d& q);

// Divides by the norm; throws kZeroNormOrientation when the norm is zero.
Eigen::Vector4d NormalizeQuaternion(const Eigen::Vector4d& q);

// ||a.x - b.x||_2
double PositionDistance(const Pose& a, const Pose& b);
double PositionDistance(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

// ||q_pred / ||q_pred|| - q_ref||_2. Only the predicted side is normalized;
// the reference is expected to be a unit database quaternion.
double OrientationDistance(const Pose& predicted, const Pose& reference,
                           const DistanceConfig& cfg = {});

// Same metric with the predicted quaternion already normalized.
double UnitOrientationDistance(const Eigen::Vector4d& unit_predicted,
                               const Eigen::Vector4d& reference,
                               const DistanceConfig& cfg = {});

// Geodesic angle between the two rotations in degrees, in [0, 180].
double RotationErrorDegrees(const Pose& a, const Pose& b);

}  // namespace posegate
