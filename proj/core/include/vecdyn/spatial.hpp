#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>

#include "vecdyn/errors.hpp"

namespace vecdyn {

template <typename T>
using Vec3 = Eigen::Matrix<T, 3, 1>;
template <typename T>
using Mat3 = Eigen::Matrix<T, 3, 3>;
template <typename T>
using Vec6 = Eigen::Matrix<T, 6, 1>;
template <typename T>
using Mat6 = Eigen::Matrix<T, 6, 6>;
template <typename T>
using VecX = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using MatX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

using Vec3d = Vec3<double>;
using Mat3d = Mat3<double>;
using Vec6d = Vec6<double>;
using Mat6d = Mat6<double>;

template <typename T>
Mat3<T> skew(const Vec3<T>& v) {
  Mat3<T> m;
  // clang-format off
  m << T(0), -v.z(),  v.y(),
       v.z(),  T(0), -v.x(),
      -v.y(),  v.x(),  T(0);
  // clang-format on
  return m;
}

/// 6-D motion quantity (velocity, acceleration, or joint axis).
/// Components are stored angular-first throughout the library.
template <typename T>
struct SpatialMotionT {
  Vec3<T> angular = Vec3<T>::Zero();
  Vec3<T> linear = Vec3<T>::Zero();

  SpatialMotionT() = default;
  SpatialMotionT(const Vec3<T>& angular, const Vec3<T>& linear)
      : angular(angular), linear(linear) {}

  static SpatialMotionT Zero() { return SpatialMotionT(); }

  Vec6<T> vector() const {
    Vec6<T> v;
    v << angular, linear;
    return v;
  }

  static SpatialMotionT FromVector(const Vec6<T>& v) {
    return SpatialMotionT(v.template head<3>(), v.template tail<3>());
  }

  SpatialMotionT operator+(const SpatialMotionT& o) const {
    return {angular + o.angular, linear + o.linear};
  }
  SpatialMotionT operator-(const SpatialMotionT& o) const {
    return {angular - o.angular, linear - o.linear};
  }
  SpatialMotionT operator-() const { return {-angular, -linear}; }
  SpatialMotionT operator*(const T& s) const { return {angular * s, linear * s}; }
  SpatialMotionT& operator+=(const SpatialMotionT& o) {
    angular += o.angular;
    linear += o.linear;
    return *this;
  }

  template <typename U>
  SpatialMotionT<U> cast() const {
    return {angular.template cast<U>(), linear.template cast<U>()};
  }
};

/// 6-D force quantity: moment about the frame origin and linear force.
template <typename T>
struct SpatialForceT {
  Vec3<T> moment = Vec3<T>::Zero();
  Vec3<T> force = Vec3<T>::Zero();

  SpatialForceT() = default;
  SpatialForceT(const Vec3<T>& moment, const Vec3<T>& force)
      : moment(moment), force(force) {}

  static SpatialForceT Zero() { return SpatialForceT(); }

  Vec6<T> vector() const {
    Vec6<T> v;
    v << moment, force;
    return v;
  }

  static SpatialForceT FromVector(const Vec6<T>& v) {
    return SpatialForceT(v.template head<3>(), v.template tail<3>());
  }

  SpatialForceT operator+(const SpatialForceT& o) const {
    return {moment + o.moment, force + o.force};
  }
  SpatialForceT operator-(const SpatialForceT& o) const {
    return {moment - o.moment, force - o.force};
  }
  SpatialForceT& operator+=(const SpatialForceT& o) {
    moment += o.moment;
    force += o.force;
    return *this;
  }
  SpatialForceT& operator-=(const SpatialForceT& o) {
    moment -= o.moment;
    force -= o.force;
    return *this;
  }

  template <typename U>
  SpatialForceT<U> cast() const {
    return {moment.template cast<U>(), force.template cast<U>()};
  }
};

/// Rigid transform stored as (rotation, translation) rather than a dense
/// 6x6 Plücker matrix. Maps coordinates of the child/local frame into the
/// parent/target frame: x_target = R x_local + p.
template <typename T>
struct SpatialTransformT {
  Mat3<T> rotation = Mat3<T>::Identity();
  Vec3<T> translation = Vec3<T>::Zero();

  SpatialTransformT() = default;
  SpatialTransformT(const Mat3<T>& rotation, const Vec3<T>& translation)
      : rotation(rotation), translation(translation) {}

  static SpatialTransformT Identity() { return SpatialTransformT(); }

  /// Composition: (this ∘ other), i.e. other is expressed in this->local frame.
  SpatialTransformT operator*(const SpatialTransformT& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }

  SpatialTransformT inverse() const {
    Mat3<T> rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }

  /// Maps a point from the local frame to the target frame.
  Vec3<T> apply(const Vec3<T>& point) const { return rotation * point + translation; }

  template <typename U>
  SpatialTransformT<U> cast() const {
    return {rotation.template cast<U>(), translation.template cast<U>()};
  }
};

/// 6x6 spatial inertia about the frame origin, angular-first block layout:
/// [[ I_o, m cx ], [ m cx^T, m 1 ]].
template <typename T>
struct SpatialInertiaT {
  Mat6<T> matrix = Mat6<T>::Zero();

  SpatialInertiaT() = default;
  explicit SpatialInertiaT(const Mat6<T>& matrix) : matrix(matrix) {}

  static SpatialInertiaT Zero() { return SpatialInertiaT(); }

  double mass() const
    requires std::is_same_v<T, double>
  {
    return matrix(5, 5);
  }

  SpatialForceT<T> operator*(const SpatialMotionT<T>& v) const {
    Vec6<T> f = matrix * v.vector();
    return SpatialForceT<T>::FromVector(f);
  }

  SpatialInertiaT operator+(const SpatialInertiaT& o) const {
    return SpatialInertiaT(matrix + o.matrix);
  }
  SpatialInertiaT& operator+=(const SpatialInertiaT& o) {
    matrix += o.matrix;
    return *this;
  }

  template <typename U>
  SpatialInertiaT<U> cast() const {
    return SpatialInertiaT<U>(matrix.template cast<U>());
  }
};

using SpatialMotion = SpatialMotionT<double>;
using SpatialForce = SpatialForceT<double>;
using SpatialTransform = SpatialTransformT<double>;
using SpatialInertia = SpatialInertiaT<double>;

/// Motion cross product v × m, the 6x6 operator [[wx, 0], [vx, wx]] applied to m.
template <typename T>
SpatialMotionT<T> cross_motion(const SpatialMotionT<T>& v, const SpatialMotionT<T>& m) {
  return {v.angular.cross(m.angular),
          v.angular.cross(m.linear) + v.linear.cross(m.angular)};
}

/// Force cross product v ×* f, equal to minus the transpose of the motion
/// operator of v applied to f.
template <typename T>
SpatialForceT<T> cross_force(const SpatialMotionT<T>& v, const SpatialForceT<T>& f) {
  return {v.angular.cross(f.moment) + v.linear.cross(f.force),
          v.angular.cross(f.force)};
}

/// Dual pairing of a force with a motion (instantaneous power for velocities).
template <typename T>
T dot(const SpatialForceT<T>& f, const SpatialMotionT<T>& m) {
  return f.moment.dot(m.angular) + f.force.dot(m.linear);
}

/// Re-expresses a motion vector from T's local frame in T's target frame.
template <typename T>
SpatialMotionT<T> transform_motion(const SpatialTransformT<T>& X,
                                   const SpatialMotionT<T>& m) {
  Vec3<T> w = X.rotation * m.angular;
  return {w, X.rotation * m.linear + X.translation.cross(w)};
}

/// Inverse of transform_motion: target frame to local frame.
template <typename T>
SpatialMotionT<T> inverse_transform_motion(const SpatialTransformT<T>& X,
                                           const SpatialMotionT<T>& m) {
  return {X.rotation.transpose() * m.angular,
          X.rotation.transpose() * (m.linear - X.translation.cross(m.angular))};
}

/// Re-expresses a force vector from T's local frame in T's target frame.
template <typename T>
SpatialForceT<T> transform_force(const SpatialTransformT<T>& X,
                                 const SpatialForceT<T>& f) {
  Vec3<T> fr = X.rotation * f.force;
  return {X.rotation * f.moment + X.translation.cross(fr), fr};
}

/// Inverse of transform_force: target frame to local frame.
template <typename T>
SpatialForceT<T> inverse_transform_force(const SpatialTransformT<T>& X,
                                         const SpatialForceT<T>& f) {
  return {X.rotation.transpose() * (f.moment - X.translation.cross(f.force)),
          X.rotation.transpose() * f.force};
}

/// Re-expresses a spatial inertia from T's local frame in T's target frame.
/// With Y the inverse-transpose motion operator of X, I' = Y I Y^T, which
/// preserves kinetic energy 1/2 V^T I V under the matching motion transform.
template <typename T>
SpatialInertiaT<T> transform_inertia(const SpatialTransformT<T>& X,
                                     const SpatialInertiaT<T>& inertia) {
  Mat6<T> y = Mat6<T>::Zero();
  y.template topLeftCorner<3, 3>() = X.rotation;
  y.template topRightCorner<3, 3>() = skew<T>(X.translation) * X.rotation;
  y.template bottomRightCorner<3, 3>() = X.rotation;
  return SpatialInertiaT<T>(y * inertia.matrix * y.transpose());
}

/// True when R is orthonormal with determinant +1 within `tol`.
inline bool is_valid_rotation(const Mat3d& r, double tol = 1e-9) {
  return (r.transpose() * r - Mat3d::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(r.determinant() - 1.0) <= tol;
}

/// Builds a spatial inertia from mass, center of mass, and the 3x3 rotational
/// inertia about the center of mass (parallel-axis coupling included).
inline SpatialInertia inertia_from_params(double mass, const Vec3d& com,
                                          const Mat3d& inertia_about_com) {
  if (mass < 0.0) {
    throw ModelError("inertia_from_params: negative mass " + std::to_string(mass));
  }
  const double scale = std::max(1.0, inertia_about_com.cwiseAbs().maxCoeff());
  if ((inertia_about_com - inertia_about_com.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * scale) {
    throw ModelError("inertia_from_params: rotational inertia is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3d> es(inertia_about_com);
  if (es.eigenvalues().minCoeff() < -1e-9 * scale) {
    throw ModelError("inertia_from_params: rotational inertia is not positive semidefinite");
  }
  const Mat3d cx = skew<double>(com);
  Mat6d m = Mat6d::Zero();
  m.topLeftCorner<3, 3>() = inertia_about_com + mass * cx * cx.transpose();
  m.topRightCorner<3, 3>() = mass * cx;
  m.bottomLeftCorner<3, 3>() = mass * cx.transpose();
  m.bottomRightCorner<3, 3>() = mass * Mat3d::Identity();
  return SpatialInertia(m);
}

/// Rodrigues closed form for rotation about a unit axis. Generic in the
/// scalar so dual numbers differentiate through it.
template <typename T>
Mat3<T> axis_angle_rotation(const Vec3d& unit_axis, const T& angle) {
  using std::cos;
  using std::sin;
  const Mat3<T> k = skew<T>(unit_axis.cast<T>());
  return Mat3<T>::Identity() + sin(angle) * k + (T(1) - cos(angle)) * (k * k);
}

}  // namespace vecdyn
