#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Cholesky>

#include "vecdyn/errors.hpp"
#include "vecdyn/model.hpp"

namespace vecdyn {

/// World transforms of every moving joint, in topological order.
template <typename T>
struct FrameSetT {
  std::vector<SpatialTransformT<T>> world;

  const SpatialTransformT<T>& operator[](int i) const {
    return world[static_cast<size_t>(i)];
  }
};

using FrameSet = FrameSetT<double>;

namespace detail {

inline void check_q_size(const RobotModel& model, Eigen::Index size) {
  if (size != model.dof()) {
    throw DimensionError("configuration vector has size " + std::to_string(size) +
                         ", model has " + std::to_string(model.dof()) + " dof");
  }
}

/// Local transform of joint i at q_i, relative to its parent joint frame.
template <typename T>
SpatialTransformT<T> local_joint_transform(const Joint& joint, const T& q) {
  return joint.offset.template cast<T>() * joint_motion<T>(joint, q);
}

}  // namespace detail

/// Forward kinematics: world transform of every joint in one topological pass.
template <typename T>
FrameSetT<T> forward_kinematics(const RobotModel& model, const VecX<T>& q) {
  detail::check_q_size(model, q.size());
  const int n = model.dof();
  FrameSetT<T> frames;
  frames.world.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Joint& joint = model.joint(i);
    SpatialTransformT<T> local = detail::local_joint_transform<T>(joint, q[i]);
    frames.world[static_cast<size_t>(i)] =
        joint.parent < 0 ? local : frames.world[static_cast<size_t>(joint.parent)] * local;
  }
  return frames;
}

/// Forward kinematics for serial chains via an associative parallel-prefix
/// (Hillis–Steele) over transform composition. Output matches
/// forward_kinematics; the combination order differs, the result does not.
template <typename T>
FrameSetT<T> forward_kinematics_scan(const RobotModel& model, const VecX<T>& q) {
  if (!model.is_serial_chain()) {
    throw UnsupportedStructureError(
        "forward_kinematics_scan requires a serial chain (every joint's parent "
        "must be its predecessor)");
  }
  detail::check_q_size(model, q.size());
  const int n = model.dof();
  FrameSetT<T> frames;
  frames.world.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    frames.world[static_cast<size_t>(i)] =
        detail::local_joint_transform<T>(model.joint(i), q[i]);
  }
  for (int step = 1; step < n; step *= 2) {
    // Inclusive scan: combine pairs `step` apart, back to front so reads
    // see the previous round only.
    for (int i = n - 1; i >= step; --i) {
      frames.world[static_cast<size_t>(i)] =
          frames.world[static_cast<size_t>(i - step)] *
          frames.world[static_cast<size_t>(i)];
    }
  }
  return frames;
}

/// World pose of a named frame given precomputed forward kinematics.
template <typename T>
SpatialTransformT<T> frame_transform(const RobotModel& model,
                                     const FrameSetT<T>& frames,
                                     std::string_view frame_name) {
  const Frame& f = model.frame(frame_name);
  const SpatialTransformT<T> offset = f.offset.template cast<T>();
  return f.joint < 0 ? offset : frames[f.joint] * offset;
}

template <typename T>
SpatialTransformT<T> frame_transform(const RobotModel& model, const VecX<T>& q,
                                     std::string_view frame_name) {
  return frame_transform(model, forward_kinematics(model, q), frame_name);
}

/// Geometric Jacobian of a named frame, 6 x n, rows angular-first, expressed
/// in the root frame. Column j is joint j's world axis translated to measure
/// the velocity of the frame's origin point; columns of non-ancestor joints
/// are exactly zero, so J q̇ = (world angular velocity, frame-point velocity).
template <typename T>
Eigen::Matrix<T, 6, Eigen::Dynamic> geometric_jacobian(const RobotModel& model,
                                                       const FrameSetT<T>& frames,
                                                       std::string_view frame_name) {
  const Frame& f = model.frame(frame_name);
  Eigen::Matrix<T, 6, Eigen::Dynamic> jac =
      Eigen::Matrix<T, 6, Eigen::Dynamic>::Zero(6, model.dof());
  const SpatialTransformT<T> target = frame_transform(model, frames, frame_name);
  for (int j = f.joint; j >= 0; j = model.joint(j).parent) {
    const Joint& joint = model.joint(j);
    const SpatialTransformT<T>& x = frames[j];
    const Vec3<T> world_axis = x.rotation * joint.axis.cast<T>();
    if (joint.type == JointType::Revolute) {
      jac.template block<3, 1>(0, j) = world_axis;
      jac.template block<3, 1>(3, j) =
          world_axis.cross(Vec3<T>(target.translation - x.translation));
    } else {
      jac.template block<3, 1>(3, j) = world_axis;
    }
  }
  return jac;
}

template <typename T>
Eigen::Matrix<T, 6, Eigen::Dynamic> geometric_jacobian(const RobotModel& model,
                                                       const VecX<T>& q,
                                                       std::string_view frame_name) {
  return geometric_jacobian(model, forward_kinematics(model, q), frame_name);
}

/// Yoshikawa manipulability index sqrt(det(J J^T)), computed as the pivot
/// product of a Cholesky factorization. Returns 0 at singular configurations
/// (including any roundoff-negative determinant).
template <typename T>
T manipulability(const Eigen::Matrix<T, 6, Eigen::Dynamic>& jacobian) {
  const Mat6<T> gram = jacobian * jacobian.transpose();
  Eigen::LLT<Mat6<T>> llt(gram);
  if (llt.info() != Eigen::Success) {
    return T(0);
  }
  T det_sqrt = T(1);
  for (int i = 0; i < 6; ++i) {
    det_sqrt = det_sqrt * llt.matrixLLT()(i, i);
  }
  return det_sqrt;
}

}  // namespace vecdyn
