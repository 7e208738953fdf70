#include "mocap/quat.hpp"

#include <Eigen/Geometry>
#include <cmath>

#include "mocap/errors.hpp"

namespace mocap {

double Quat::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

bool Quat::is_finite() const {
  return std::isfinite(w) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
}

Quat Quat::normalized() const {
  if (!is_finite()) {
    throw ValidationError("invalid quaternion: non-finite components");
  }
  const double n = norm();
  if (n < 1e-12) {
    throw ValidationError("invalid quaternion: norm below 1e-12");
  }
  return {w / n, x / n, y / n, z / n};
}

Quat Quat::canonical() const {
  bool flip = false;
  if (w < 0.0) {
    flip = true;
  } else if (w == 0.0) {
    if (x < 0.0) {
      flip = true;
    } else if (x == 0.0) {
      if (y < 0.0) {
        flip = true;
      } else if (y == 0.0 && z < 0.0) {
        flip = true;
      }
    }
  }
  return flip ? Quat{-w, -x, -y, -z} : *this;
}

Eigen::Matrix3d Quat::to_matrix() const {
  if (!is_finite()) {
    throw ValidationError("invalid quaternion: non-finite components");
  }
  Eigen::Matrix3d m;
  m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return m;
}

Eigen::Vector3d Quat::rotate(const Eigen::Vector3d& v) const {
  // v + 2w(q x v) + 2 q x (q x v)
  const Eigen::Vector3d qv(x, y, z);
  const Eigen::Vector3d t = qv.cross(v);
  return v + 2.0 * w * t + 2.0 * qv.cross(t);
}

double Quat::angle() const {
  const double c = std::min(1.0, std::abs(w));
  return 2.0 * std::acos(c);
}

Quat operator*(const Quat& a, const Quat& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

Quat quat_from_axis_angle(const Eigen::Vector3d& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 1e-12) || !std::isfinite(angle)) {
    throw ValidationError("axis-angle: degenerate axis or non-finite angle");
  }
  const double half = 0.5 * angle;
  const double s = std::sin(half) / n;
  return {std::cos(half), axis.x() * s, axis.y() * s, axis.z() * s};
}

Quat quat_from_matrix(const Eigen::Matrix3d& m) {
  // Shepperd's method: branch on the largest of (trace, diagonal entries).
  Quat q;
  const double tr = m(0, 0) + m(1, 1) + m(2, 2);
  if (tr > m(0, 0) && tr > m(1, 1) && tr > m(2, 2)) {
    const double s = std::sqrt(tr + 1.0) * 2.0;
    q.w = 0.25 * s;
    q.x = (m(2, 1) - m(1, 2)) / s;
    q.y = (m(0, 2) - m(2, 0)) / s;
    q.z = (m(1, 0) - m(0, 1)) / s;
  } else if (m(0, 0) > m(1, 1) && m(0, 0) > m(2, 2)) {
    const double s = std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2)) * 2.0;
    q.w = (m(2, 1) - m(1, 2)) / s;
    q.x = 0.25 * s;
    q.y = (m(0, 1) + m(1, 0)) / s;
    q.z = (m(0, 2) + m(2, 0)) / s;
  } else if (m(1, 1) > m(2, 2)) {
    const double s = std::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2)) * 2.0;
    q.w = (m(0, 2) - m(2, 0)) / s;
    q.x = (m(0, 1) + m(1, 0)) / s;
    q.y = 0.25 * s;
    q.z = (m(1, 2) + m(2, 1)) / s;
  } else {
    const double s = std::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1)) * 2.0;
    q.w = (m(1, 0) - m(0, 1)) / s;
    q.x = (m(0, 2) + m(2, 0)) / s;
    q.y = (m(1, 2) + m(2, 1)) / s;
    q.z = 0.25 * s;
  }
  return q.normalized().canonical();
}

Quat shortest_arc(const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (!(nu > 1e-9) || !(nv > 1e-9)) {
    throw ValidationError("shortest_arc: zero-length input vector");
  }
  const Eigen::Vector3d a = u / nu;
  const Eigen::Vector3d b = v / nv;
  const double d = a.dot(b);
  if (1.0 + d < 1e-12) {
    // Antiparallel: 180 degrees about the coordinate axis least aligned
    // with u, orthogonalized against u. Ties pick the lowest axis index.
    int least = 0;
    for (int i = 1; i < 3; ++i) {
      if (std::abs(a[i]) < std::abs(a[least])) least = i;
    }
    Eigen::Vector3d axis = Eigen::Vector3d::Unit(least);
    axis -= axis.dot(a) * a;
    axis.normalize();
    return Quat{0.0, axis.x(), axis.y(), axis.z()}.canonical();
  }
  const Eigen::Vector3d c = a.cross(b);
  return Quat{1.0 + d, c.x(), c.y(), c.z()}.normalized().canonical();
}

}  // namespace mocap
