#pragma once

#include <Eigen/Cholesky>

#include <type_traits>

#include "vecdyn/kinematics.hpp"
#include "vecdyn/model.hpp"

namespace vecdyn {

template <typename T>
using JointRows = Eigen::Matrix<T, Eigen::Dynamic, 6>;
// Row i holds the 6x6 inertia of joint i flattened row-major. The matrices
// are symmetric, so the flattening order carries no information; row-major
// storage keeps each row contiguous for the per-row matrix-vector products.
template <typename T>
using InertiaRows = Eigen::Matrix<T, Eigen::Dynamic, 36, Eigen::RowMajor>;

/// Per-call arrays of the vectorized dynamics, all expressed in the root
/// frame: spatial axes S (n x 6), inertias I (n x 6 x 6), velocities V,
/// accelerations A, forces F (n x 6), and composite inertias C (n x 6 x 6).
template <typename T>
struct DynamicsWorkspaceT {
  JointRows<T> S;
  InertiaRows<T> I;
  JointRows<T> V;
  JointRows<T> A;
  JointRows<T> F;
  InertiaRows<T> C;
};

using DynamicsWorkspace = DynamicsWorkspaceT<double>;

/// Uniform base acceleration used to realize gravity: a_g is the negative of
/// the gravitational field, so rnea(q, 0, 0, a_g, 0) returns +g(q), the
/// torques needed to hold the robot against gravity. Default is
/// (0,0,0, 0,0,+9.81) for a field of 9.81 m/s² along -z.
struct GravitySpec {
  SpatialMotion accel{Vec3d::Zero(), Vec3d(0.0, 0.0, 9.81)};

  GravitySpec() = default;
  explicit GravitySpec(const Vec3d& linear_accel)
      : accel(Vec3d::Zero(), linear_accel) {}

  static GravitySpec standard() { return GravitySpec(); }
  static GravitySpec zero() { return GravitySpec(Vec3d::Zero()); }
  /// From the field itself (e.g. (0,0,-9.81)): a_g = -field.
  static GravitySpec from_field(const Vec3d& field) { return GravitySpec(-field); }
};

/// Per-joint external wrenches applied to the robot, expressed in the root
/// frame as Plücker forces (moment about the world origin, linear force).
/// An empty instance means no external forces.
template <typename T>
struct ExternalForcesT {
  Eigen::Matrix<T, Eigen::Dynamic, 6> wrench;

  ExternalForcesT() : wrench(0, 6) {}
  explicit ExternalForcesT(int n)
      : wrench(Eigen::Matrix<T, Eigen::Dynamic, 6>::Zero(n, 6)) {}

  static ExternalForcesT none() { return ExternalForcesT(); }

  bool empty() const { return wrench.rows() == 0; }
  int size() const { return static_cast<int>(wrench.rows()); }

  SpatialForceT<T> at(int joint) const {
    return SpatialForceT<T>::FromVector(wrench.row(joint).transpose());
  }
  void set(int joint, const SpatialForceT<T>& f) {
    wrench.row(joint) = f.vector().transpose();
  }
  /// Adds a point force (and optional couple) acting at a world-frame point
  /// on the body of `joint`.
  void add_at_point(int joint, const Vec3<T>& point, const Vec3<T>& force,
                    const Vec3<T>& couple = Vec3<T>::Zero()) {
    SpatialForceT<T> f(couple + point.cross(force), force);
    wrench.row(joint) += f.vector().transpose();
  }
};

using ExternalForces = ExternalForcesT<double>;

namespace detail {

template <typename T>
void check_state_size(const RobotModel& model, Eigen::Index size, const char* what) {
  if (size != model.dof()) {
    throw DimensionError(std::string(what) + " has size " + std::to_string(size) +
                         ", model has " + std::to_string(model.dof()) + " dof");
  }
}

template <typename T>
void check_fext(const RobotModel& model, const ExternalForcesT<T>& fext) {
  if (!fext.empty() && fext.size() != model.dof()) {
    throw DimensionError("external forces have " + std::to_string(fext.size()) +
                         " rows, model has " + std::to_string(model.dof()) + " dof");
  }
}

/// Returns the ancestor mask in the requested scalar type without copying
/// when the type is already double.
template <typename T>
const MatX<T>& ancestor_mask_as(const RobotModel& model, MatX<T>& storage) {
  if constexpr (std::is_same_v<T, double>) {
    return model.ancestor_mask();
  } else {
    storage = model.ancestor_mask().template cast<T>();
    return storage;
  }
}

/// Row-wise motion cross product: out.row(i) = v_i × m_i. Pure column
/// arithmetic, no per-row branching.
template <typename T>
JointRows<T> cross_motion_rows(const JointRows<T>& v, const JointRows<T>& m) {
  JointRows<T> out(v.rows(), 6);
  const auto v0 = v.col(0).array(), v1 = v.col(1).array(), v2 = v.col(2).array(),
             v3 = v.col(3).array(), v4 = v.col(4).array(), v5 = v.col(5).array();
  const auto m0 = m.col(0).array(), m1 = m.col(1).array(), m2 = m.col(2).array(),
             m3 = m.col(3).array(), m4 = m.col(4).array(), m5 = m.col(5).array();
  out.col(0) = v1 * m2 - v2 * m1;
  out.col(1) = v2 * m0 - v0 * m2;
  out.col(2) = v0 * m1 - v1 * m0;
  out.col(3) = v1 * m5 - v2 * m4 + v4 * m2 - v5 * m1;
  out.col(4) = v2 * m3 - v0 * m5 + v5 * m0 - v3 * m2;
  out.col(5) = v0 * m4 - v1 * m3 + v3 * m1 - v4 * m0;
  return out;
}

/// Row-wise force cross product: out.row(i) = v_i ×* f_i.
template <typename T>
JointRows<T> cross_force_rows(const JointRows<T>& v, const JointRows<T>& f) {
  JointRows<T> out(v.rows(), 6);
  const auto v0 = v.col(0).array(), v1 = v.col(1).array(), v2 = v.col(2).array(),
             v3 = v.col(3).array(), v4 = v.col(4).array(), v5 = v.col(5).array();
  const auto f0 = f.col(0).array(), f1 = f.col(1).array(), f2 = f.col(2).array(),
             f3 = f.col(3).array(), f4 = f.col(4).array(), f5 = f.col(5).array();
  out.col(0) = v1 * f2 - v2 * f1 + v4 * f5 - v5 * f4;
  out.col(1) = v2 * f0 - v0 * f2 + v5 * f3 - v3 * f5;
  out.col(2) = v0 * f1 - v1 * f0 + v3 * f4 - v4 * f3;
  out.col(3) = v1 * f5 - v2 * f4;
  out.col(4) = v2 * f3 - v0 * f5;
  out.col(5) = v0 * f4 - v1 * f3;
  return out;
}

/// Row-wise application of the stacked 6x6 matrices: out.row(i) = M_i x_i.
template <typename T>
JointRows<T> apply_matrix_rows(const InertiaRows<T>& matrices,
                               const JointRows<T>& x) {
  JointRows<T> out(x.rows(), 6);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::Map<const Eigen::Matrix<T, 6, 6, Eigen::RowMajor>> m(
        matrices.row(i).data());
    out.row(i) = (m * x.row(i).transpose()).transpose();
  }
  return out;
}

/// Rows scaled elementwise by a vector: out.row(i) = rows.row(i) * s[i].
template <typename T>
JointRows<T> scale_rows(const JointRows<T>& rows, const VecX<T>& s) {
  return (rows.array().colwise() * s.array()).matrix();
}

template <typename T>
SpatialMotionT<T> local_axis(const Joint& joint) {
  if (joint.type == JointType::Revolute) {
    return {joint.axis.cast<T>(), Vec3<T>::Zero()};
  }
  return {Vec3<T>::Zero(), joint.axis.cast<T>()};
}

}  // namespace detail

/// Fills the root-frame spatial axes S and inertias I for the given forward
/// kinematics: S_i is joint i's world axis (with the moment-arm coupling of
/// the frame origin for revolute joints), I_i = transform_inertia(T_i, local).
template <typename T>
void prepare_world_arrays(const RobotModel& model, const FrameSetT<T>& frames,
                          DynamicsWorkspaceT<T>& ws) {
  const int n = model.dof();
  ws.S.resize(n, 6);
  ws.I.resize(n, 36);
  for (int i = 0; i < n; ++i) {
    const Joint& joint = model.joint(i);
    const SpatialTransformT<T>& x = frames[i];
    const Vec3<T> world_axis = x.rotation * joint.axis.cast<T>();
    if (joint.type == JointType::Revolute) {
      ws.S.row(i).template head<3>() = world_axis.transpose();
      ws.S.row(i).template tail<3>() = x.translation.cross(world_axis).transpose();
    } else {
      ws.S.row(i).template head<3>().setZero();
      ws.S.row(i).template tail<3>() = world_axis.transpose();
    }
    const SpatialInertiaT<T> world_inertia =
        transform_inertia(x, model.joint_inertia(i).template cast<T>());
    Eigen::Map<Eigen::Matrix<T, 6, 6, Eigen::RowMajor>>(ws.I.row(i).data()) =
        world_inertia.matrix;
  }
}

/// Convenience variant returning a fresh workspace with S and I filled.
template <typename T>
DynamicsWorkspaceT<T> prepare_world_arrays(const RobotModel& model,
                                           const FrameSetT<T>& frames) {
  DynamicsWorkspaceT<T> ws;
  prepare_world_arrays(model, frames, ws);
  return ws;
}

/// Vectorized inverse dynamics on a prepared workspace (S and I filled).
/// Everything past forward kinematics is mask products with U/Uᵀ and
/// row-wise broadcasts; no tree traversal:
///   V = U (S_i q̇_i)
///   A = a_g + U (S_i q̈_i + V_i × S_i q̇_i)
///   F = Uᵀ (I_i A_i + V_i ×* I_i V_i - F_ext,i)
///   Γ = (S_i · F_i)
template <typename T>
VecX<T> rnea_from_workspace(const RobotModel& model, DynamicsWorkspaceT<T>& ws,
                            const VecX<T>& qd, const VecX<T>& qdd,
                            const GravitySpec& gravity,
                            const ExternalForcesT<T>& fext) {
  using detail::cross_force_rows;
  using detail::cross_motion_rows;
  detail::check_state_size<T>(model, qd.size(), "qd");
  detail::check_state_size<T>(model, qdd.size(), "qdd");
  detail::check_fext(model, fext);

  MatX<T> mask_storage;
  const MatX<T>& u = detail::ancestor_mask_as<T>(model, mask_storage);

  const JointRows<T> s_qd = detail::scale_rows(ws.S, qd);
  ws.V.noalias() = u * s_qd;
  ws.A.noalias() = u * (detail::scale_rows(ws.S, qdd) + cross_motion_rows(ws.V, s_qd));
  ws.A.rowwise() += gravity.accel.vector().cast<T>().transpose();

  JointRows<T> f_body = detail::apply_matrix_rows(ws.I, ws.A) +
                        cross_force_rows(ws.V, detail::apply_matrix_rows(ws.I, ws.V));
  if (!fext.empty()) {
    f_body -= fext.wrench;
  }
  ws.F.noalias() = u.transpose() * f_body;
  return (ws.S.array() * ws.F.array()).rowwise().sum();
}

/// Vectorized recursive Newton-Euler: joint torques that realize q̈ at state
/// (q, q̇) under gravity and optional external wrenches.
template <typename T>
VecX<T> rnea(const RobotModel& model, const VecX<T>& q, const VecX<T>& qd,
             const VecX<T>& qdd, const GravitySpec& gravity,
             const ExternalForcesT<T>& fext, DynamicsWorkspaceT<T>& ws) {
  const FrameSetT<T> frames = forward_kinematics(model, q);
  prepare_world_arrays(model, frames, ws);
  return rnea_from_workspace(model, ws, qd, qdd, gravity, fext);
}

template <typename T>
VecX<T> rnea(const RobotModel& model, const VecX<T>& q, const VecX<T>& qd,
             const VecX<T>& qdd, const GravitySpec& gravity = GravitySpec::standard(),
             const ExternalForcesT<T>& fext = ExternalForcesT<T>::none()) {
  DynamicsWorkspaceT<T> ws;
  return rnea(model, q, qd, qdd, gravity, fext, ws);
}

/// Loop-based inverse dynamics: the classic recursive formulation in local
/// link coordinates, O(n) forward/backward passes over the tree. Kept as an
/// independently-derived equivalence oracle for rnea.
template <typename T>
VecX<T> rnea_loop(const RobotModel& model, const VecX<T>& q, const VecX<T>& qd,
                  const VecX<T>& qdd,
                  const GravitySpec& gravity = GravitySpec::standard(),
                  const ExternalForcesT<T>& fext = ExternalForcesT<T>::none()) {
  detail::check_q_size(model, q.size());
  detail::check_state_size<T>(model, qd.size(), "qd");
  detail::check_state_size<T>(model, qdd.size(), "qdd");
  detail::check_fext(model, fext);
  const int n = model.dof();
  const bool has_fext = !fext.empty();

  std::vector<SpatialTransformT<T>> x_pc(static_cast<size_t>(n));  // parent <- child
  std::vector<SpatialTransformT<T>> world;
  if (has_fext) {
    world.resize(static_cast<size_t>(n));
  }
  std::vector<SpatialMotionT<T>> vel(static_cast<size_t>(n));
  std::vector<SpatialMotionT<T>> acc(static_cast<size_t>(n));
  std::vector<SpatialForceT<T>> net(static_cast<size_t>(n));
  // Gravity enters as a fictitious base acceleration propagated down the tree.
  const SpatialMotionT<T> a_base = gravity.accel.cast<T>();

  for (int i = 0; i < n; ++i) {
    const Joint& joint = model.joint(i);
    const int p = joint.parent;
    const size_t ui = static_cast<size_t>(i);
    x_pc[ui] = detail::local_joint_transform<T>(joint, q[i]);
    const SpatialMotionT<T> axis = detail::local_axis<T>(joint);
    const SpatialMotionT<T> joint_vel = axis * qd[i];
    vel[ui] = inverse_transform_motion(
                  x_pc[ui], p < 0 ? SpatialMotionT<T>::Zero()
                                  : vel[static_cast<size_t>(p)]) +
              joint_vel;
    acc[ui] = inverse_transform_motion(
                  x_pc[ui], p < 0 ? a_base : acc[static_cast<size_t>(p)]) +
              axis * qdd[i] + cross_motion(vel[ui], joint_vel);
    const SpatialInertiaT<T> inertia = model.joint_inertia(i).template cast<T>();
    net[ui] = inertia * acc[ui] + cross_force(vel[ui], inertia * vel[ui]);
    if (has_fext) {
      world[ui] = p < 0 ? x_pc[ui] : world[static_cast<size_t>(p)] * x_pc[ui];
      net[ui] -= inverse_transform_force(world[ui], fext.at(i));
    }
  }

  VecX<T> tau(n);
  for (int i = n - 1; i >= 0; --i) {
    const Joint& joint = model.joint(i);
    tau[i] = dot(net[static_cast<size_t>(i)], detail::local_axis<T>(joint));
    if (joint.parent >= 0) {
      net[static_cast<size_t>(joint.parent)] +=
          transform_force(x_pc[static_cast<size_t>(i)], net[static_cast<size_t>(i)]);
    }
  }
  return tau;
}

/// M = M_lower + M_lowerᵀ - diag(M_lower).
template <typename T>
MatX<T> symmetrize_lower(const MatX<T>& lower) {
  MatX<T> m = lower + lower.transpose();
  m.diagonal() = lower.diagonal();
  return m;
}

/// Vectorized composite-rigid-body algorithm on a prepared workspace:
///   C = Uᵀ I          (composite inertias: subtree sums)
///   M_lower = U ⊙ (S_iᵀ C_i S_j)
///   M = Symmetrize(M_lower)
template <typename T>
MatX<T> crba_from_workspace(const RobotModel& model, DynamicsWorkspaceT<T>& ws) {
  MatX<T> mask_storage;
  const MatX<T>& u = detail::ancestor_mask_as<T>(model, mask_storage);
  ws.C.noalias() = u.transpose() * ws.I;
  const JointRows<T> cs = detail::apply_matrix_rows(ws.C, ws.S);
  MatX<T> lower = (cs * ws.S.transpose()).eval();
  lower.array() *= u.array();
  return symmetrize_lower(lower);
}

/// Joint-space mass matrix M(q) by the vectorized composite-rigid-body
/// algorithm. Symmetric positive definite for all-positive link masses.
template <typename T>
MatX<T> crba(const RobotModel& model, const VecX<T>& q, DynamicsWorkspaceT<T>& ws) {
  const FrameSetT<T> frames = forward_kinematics(model, q);
  prepare_world_arrays(model, frames, ws);
  return crba_from_workspace(model, ws);
}

template <typename T>
MatX<T> crba(const RobotModel& model, const VecX<T>& q) {
  DynamicsWorkspaceT<T> ws;
  return crba(model, q, ws);
}

/// Loop-based mass matrix: classic O(nd) child-to-parent composite
/// accumulation in local link coordinates. Equivalence oracle for crba.
template <typename T>
MatX<T> crba_loop(const RobotModel& model, const VecX<T>& q) {
  detail::check_q_size(model, q.size());
  const int n = model.dof();
  std::vector<SpatialTransformT<T>> x_pc(static_cast<size_t>(n));
  std::vector<SpatialInertiaT<T>> composite(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    x_pc[static_cast<size_t>(i)] =
        detail::local_joint_transform<T>(model.joint(i), q[i]);
    composite[static_cast<size_t>(i)] = model.joint_inertia(i).template cast<T>();
  }
  for (int i = n - 1; i >= 0; --i) {
    const int p = model.joint(i).parent;
    if (p >= 0) {
      composite[static_cast<size_t>(p)] += transform_inertia(
          x_pc[static_cast<size_t>(i)], composite[static_cast<size_t>(i)]);
    }
  }
  MatX<T> m = MatX<T>::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const SpatialMotionT<T> axis_i = detail::local_axis<T>(model.joint(i));
    SpatialForceT<T> f = composite[static_cast<size_t>(i)] * axis_i;
    m(i, i) = dot(f, axis_i);
    int j = i;
    while (model.joint(j).parent >= 0) {
      f = transform_force(x_pc[static_cast<size_t>(j)], f);
      j = model.joint(j).parent;
      m(i, j) = m(j, i) = dot(f, detail::local_axis<T>(model.joint(j)));
    }
  }
  return m;
}

/// Gravity torques g(q) = rnea(q, 0, 0, a_g, 0).
template <typename T>
VecX<T> gravity_vector(const RobotModel& model, const VecX<T>& q,
                       const GravitySpec& gravity = GravitySpec::standard()) {
  const VecX<T> zero = VecX<T>::Zero(model.dof());
  return rnea<T>(model, q, zero, zero, gravity);
}

/// Centrifugal/Coriolis torques c(q, q̇) = rnea(q, q̇, 0, 0, 0).
template <typename T>
VecX<T> coriolis_vector(const RobotModel& model, const VecX<T>& q,
                        const VecX<T>& qd) {
  const VecX<T> zero = VecX<T>::Zero(model.dof());
  return rnea<T>(model, q, qd, zero, GravitySpec::zero());
}

/// Forward dynamics q̈ = M⁻¹ (τ - c - g - Jᵀf) via a Cholesky solve of the
/// mass matrix; external forces are folded in through the rnea bias term.
/// Throws SingularInertiaError when M(q) is not positive definite.
template <typename T>
VecX<T> forward_dynamics(const RobotModel& model, const VecX<T>& q,
                         const VecX<T>& qd, const VecX<T>& tau,
                         const GravitySpec& gravity = GravitySpec::standard(),
                         const ExternalForcesT<T>& fext = ExternalForcesT<T>::none()) {
  detail::check_state_size<T>(model, tau.size(), "tau");
  const int n = model.dof();
  if (n == 0) {
    return VecX<T>();
  }
  DynamicsWorkspaceT<T> ws;
  const FrameSetT<T> frames = forward_kinematics(model, q);
  prepare_world_arrays(model, frames, ws);
  const VecX<T> zero = VecX<T>::Zero(n);
  const VecX<T> bias = rnea_from_workspace(model, ws, qd, zero, gravity, fext);
  const MatX<T> m = crba_from_workspace(model, ws);
  Eigen::LLT<MatX<T>> llt(m);
  if (llt.info() != Eigen::Success) {
    throw SingularInertiaError(
        "forward_dynamics: mass matrix is not positive definite (zero-inertia "
        "degree of freedom?)");
  }
  return llt.solve(tau - bias);
}

}  // namespace vecdyn
