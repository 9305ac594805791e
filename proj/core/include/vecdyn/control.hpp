#pragma once

#include <string>

#include "vecdyn/autodiff.hpp"
#include "vecdyn/dynamics.hpp"
#include "vecdyn/kinematics.hpp"

namespace vecdyn {

/// Per-axis task gains, angular-first like every 6-D quantity here.
struct TaskGains {
  Vec6d kp = Vec6d::Zero();
  Vec6d kd = Vec6d::Zero();

  static TaskGains uniform(double kp_value, double kd_value = 0.0) {
    TaskGains g;
    g.kp.setConstant(kp_value);
    g.kd.setConstant(kd_value);
    return g;
  }
};

/// Desired pose (and optional feedforward) for one task frame.
struct TaskTarget {
  std::string frame;
  SpatialTransform pose;
  SpatialMotion twist_ff;   // feedforward twist, used by differential IK
  SpatialMotion accel_ff;   // feedforward acceleration, used by OSC
  TaskGains gains;

  void validate() const {
    if ((gains.kp.array() < 0.0).any() || (gains.kd.array() < 0.0).any()) {
      throw Error("task gains must be nonnegative");
    }
  }
};

struct PostureGains {
  double kp = 0.0;
  double kd = 0.0;
};

/// Axis-angle logarithm of a rotation matrix (ω with ‖ω‖ = angle ≤ π).
inline Vec3d rotation_log(const Mat3d& r) {
  const double trace = r.trace();
  const Vec3d antisym(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  const double cos_angle = std::clamp(0.5 * (trace - 1.0), -1.0, 1.0);
  const double angle = std::acos(cos_angle);
  if (angle < 1e-9) {
    return 0.5 * antisym;  // first-order form, exact at zero
  }
  if (angle > M_PI - 1e-6) {
    // Near π the antisymmetric part vanishes; recover the axis from the
    // dominant diagonal of (R + I)/2 = axis axisᵀ + O(π - angle).
    Mat3d s = 0.5 * (r + Mat3d::Identity());
    int k = 0;
    s.diagonal().maxCoeff(&k);
    Vec3d axis = s.col(k) / std::sqrt(std::max(s(k, k), 1e-12));
    axis.normalize();
    // Fix the sign using the antisymmetric remainder.
    if (antisym.dot(axis) < 0.0) {
      axis = -axis;
    }
    return angle * axis;
  }
  return (0.5 * angle / std::sin(angle)) * antisym;
}

/// Pose error twist: rotation error via the log-map of R_target R_currentᵀ,
/// translation error taken directly. Pairs with the geometric Jacobian
/// convention (world angular velocity, frame-point velocity).
inline SpatialMotion pose_error(const SpatialTransform& target,
                                const SpatialTransform& current) {
  return {rotation_log(target.rotation * current.rotation.transpose()),
          target.translation - current.translation};
}

/// One step of damped-least-squares differential IK:
/// q̇ = Jᵀ (J Jᵀ + λ² 1)⁻¹ (kp ⊙ err + twist_ff).
inline Eigen::VectorXd diff_ik_step(const RobotModel& model, const Eigen::VectorXd& q,
                                    const TaskTarget& target, double damping) {
  if (damping <= 0.0) {
    throw Error("diff_ik_step: damping must be positive");
  }
  target.validate();
  const FrameSet frames = forward_kinematics<double>(model, q);
  const Eigen::Matrix<double, 6, Eigen::Dynamic> jac =
      geometric_jacobian<double>(model, frames, target.frame);
  const SpatialMotion err =
      pose_error(target.pose, frame_transform<double>(model, frames, target.frame));
  const Vec6d rhs =
      target.gains.kp.cwiseProduct(err.vector()) + target.twist_ff.vector();
  Mat6d gram = jac * jac.transpose();
  gram.diagonal().array() += damping * damping;
  return jac.transpose() * gram.llt().solve(rhs);
}

/// One step of operational space control (Khatib formulation):
///   Λ = (J M⁻¹ Jᵀ + ε1)⁻¹
///   τ = Jᵀ Λ (kp ⊙ err - kd ⊙ J q̇ + accel_ff) + (1 - Jᵀ J̄ᵀ) τ_posture + c + g
/// with J̄ = M⁻¹ Jᵀ Λ the dynamically consistent pseudoinverse. The ε
/// regularizer (default 1e-6) conditions the task-inertia solve near
/// singularities; the null-space projector uses the unregularized solve so
/// posture torques cannot leak into the task (falls back to the regularized
/// one only if that factorization fails). Computes each of FK, J, M, and the
/// c+g bias exactly once.
inline Eigen::VectorXd osc_step(const RobotModel& model, const Eigen::VectorXd& q,
                                const Eigen::VectorXd& qd, const TaskTarget& target,
                                const Eigen::VectorXd& posture,
                                const PostureGains& posture_gains,
                                const GravitySpec& gravity = GravitySpec::standard(),
                                double epsilon = 1e-6) {
  target.validate();
  const int n = model.dof();
  detail::check_state_size<double>(model, qd.size(), "qd");
  detail::check_state_size<double>(model, posture.size(), "posture");

  const FrameSet frames = forward_kinematics<double>(model, q);
  DynamicsWorkspace ws;
  prepare_world_arrays(model, frames, ws);
  const Eigen::MatrixXd mass = crba_from_workspace(model, ws);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd bias = rnea_from_workspace(
      model, ws, qd, zero, gravity, ExternalForces::none());  // c(q, q̇) + g(q)
  const Eigen::Matrix<double, 6, Eigen::Dynamic> jac =
      geometric_jacobian<double>(model, frames, target.frame);
  const SpatialMotion err =
      pose_error(target.pose, frame_transform<double>(model, frames, target.frame));

  const Eigen::LLT<Eigen::MatrixXd> mass_llt(mass);
  if (mass_llt.info() != Eigen::Success) {
    throw SingularInertiaError("osc_step: mass matrix is not positive definite");
  }
  const Eigen::MatrixXd minv_jt = mass_llt.solve(jac.transpose());  // n x 6
  const Mat6d gram = jac * minv_jt;                                 // J M⁻¹ Jᵀ

  Mat6d gram_reg = gram;
  gram_reg.diagonal().array() += epsilon;
  const Vec6d task_acc = target.gains.kp.cwiseProduct(err.vector()) -
                         target.gains.kd.cwiseProduct(jac * qd) +
                         target.accel_ff.vector();
  const Vec6d task_force = gram_reg.llt().solve(task_acc);

  Eigen::LLT<Mat6d> gram_llt(gram);
  const Eigen::Matrix<double, 6, Eigen::Dynamic> jbar_t =
      gram_llt.info() == Eigen::Success
          ? gram_llt.solve(minv_jt.transpose()).eval()
          : gram_reg.llt().solve(minv_jt.transpose()).eval();

  const Eigen::VectorXd tau_posture =
      posture_gains.kp * (posture - q) - posture_gains.kd * qd;
  return jac.transpose() * task_force + tau_posture -
         jac.transpose() * (jbar_t * tau_posture) + bias;
}

/// Lie derivative L_f h(z) = ⟨∇h(z), f(z)⟩, evaluated as a single JVP of h
/// along f(z); the gradient of h is never materialized.
template <typename H, typename F>
double lie_derivative(H&& h, F&& f, const Eigen::VectorXd& z) {
  const Eigen::VectorXd direction = f(z);
  return jvp_scalar(std::forward<H>(h), z, direction).second;
}

}  // namespace vecdyn
