#pragma once

#include <Eigen/Core>

namespace mocap {

// Unit quaternion in Hamilton convention: right-handed frames, rotates
// column vectors, q and -q denote the same rotation. Canonical form picks
// w >= 0 (tie broken by the first nonzero component being positive).
struct Quat {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Quat() = default;
  Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

  static Quat identity() { return {1.0, 0.0, 0.0, 0.0}; }

  double norm() const;
  bool is_finite() const;

  // Scales to unit norm. Throws ValidationError for non-finite components
  // or norm below 1e-12.
  Quat normalized() const;

  // Sign-canonical representative of the same rotation. Idempotent.
  Quat canonical() const;

  Quat conjugate() const { return {w, -x, -y, -z}; }

  // Rotation matrix of a normalized quaternion. Throws ValidationError on
  // non-finite components.
  Eigen::Matrix3d to_matrix() const;

  Eigen::Vector3d rotate(const Eigen::Vector3d& v) const;

  // Rotation angle in [0, pi]: 2*acos(|w|).
  double angle() const;
};

// Hamilton product. to_matrix(a * b) == to_matrix(a) * to_matrix(b).
Quat operator*(const Quat& a, const Quat& b);

Quat quat_from_axis_angle(const Eigen::Vector3d& axis, double angle);

// Inverse of Quat::to_matrix, returns the canonical quaternion.
Quat quat_from_matrix(const Eigen::Matrix3d& m);

// Minimal rotation taking u/|u| onto v/|v|. Antiparallel inputs rotate 180
// degrees about the coordinate axis least aligned with u (orthogonalized);
// ties pick the first such axis. Throws ValidationError when |u| or |v| is
// below 1e-9.
Quat shortest_arc(const Eigen::Vector3d& u, const Eigen::Vector3d& v);

}  // namespace mocap
