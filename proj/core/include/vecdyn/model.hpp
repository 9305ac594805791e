#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vecdyn/spatial.hpp"

namespace vecdyn {

enum class JointType { Revolute, Prismatic, Fixed };

struct JointLimits {
  double lower = 0.0;
  double upper = 0.0;
  double effort = 0.0;
  double velocity = 0.0;
};

/// Link entry of a model description. Inertial parameters are expressed in
/// the link frame: `com` is the center of mass, `inertia` the rotational
/// inertia about the center of mass in link axes.
struct LinkSpec {
  std::string name;
  bool has_inertial = false;
  double mass = 0.0;
  Vec3d com = Vec3d::Zero();
  Mat3d inertia = Mat3d::Zero();
};

/// Joint entry of a model description. `origin` maps child-link coordinates
/// into the parent-link frame at the joint's zero position.
struct JointSpec {
  std::string name;
  JointType type = JointType::Fixed;
  std::string parent_link;
  std::string child_link;
  SpatialTransform origin;
  Vec3d axis = Vec3d::UnitZ();
  std::optional<JointLimits> limits;
};

/// Unbuilt joint graph; input to build_model. Listing order is irrelevant:
/// the builder normalizes to a canonical topological order.
struct ModelDescription {
  std::string name;
  std::vector<LinkSpec> links;
  std::vector<JointSpec> joints;

  LinkSpec& add_link(std::string link_name);
  LinkSpec& add_link(std::string link_name, double mass, const Vec3d& com,
                     const Mat3d& inertia_about_com);
  JointSpec& add_joint(std::string joint_name, JointType type,
                       std::string parent_link, std::string child_link,
                       const SpatialTransform& origin,
                       const Vec3d& axis = Vec3d::UnitZ());
};

/// A moving joint of a built model. Fixed joints have been fused away, so
/// every Joint contributes exactly one degree of freedom and one column of
/// the spatial-axis array.
struct Joint {
  std::string name;
  JointType type = JointType::Revolute;
  int parent = -1;  // index of the parent joint; -1 denotes the root
  SpatialTransform offset;  // parent joint frame -> this joint's zero pose
  Vec3d axis = Vec3d::UnitZ();
  std::optional<JointLimits> limits;
};

/// Named attachment point: a fixed offset from a joint frame (-1 = root).
struct Frame {
  std::string name;
  int joint = -1;
  SpatialTransform offset;
};

/// Position/velocity pair for a model with n degrees of freedom.
struct JointState {
  VecX<double> q;
  VecX<double> qd;
};

/// Immutable kinematic tree. Joints are stored in topological order (parent
/// index strictly less than child index), fixed joints are fused at build
/// time, and the ancestor mask U is precomputed. Safe to share across
/// threads without synchronization.
class RobotModel {
 public:
  const std::string& name() const { return name_; }

  /// Number of degrees of freedom == number of moving joints.
  int dof() const { return static_cast<int>(joints_.size()); }

  const Joint& joint(int i) const { return joints_[static_cast<size_t>(i)]; }
  const std::vector<Joint>& joints() const { return joints_; }

  /// Spatial inertia attached to joint i, in the joint's child-link frame.
  /// Includes the inertia of any links fused through fixed joints.
  const SpatialInertia& joint_inertia(int i) const {
    return inertias_[static_cast<size_t>(i)];
  }
  double joint_mass(int i) const { return inertias_[static_cast<size_t>(i)].mass(); }
  double total_mass() const { return total_mass_; }

  /// Ancestor mask U: U(i, j) = 1 iff j == i or j is an ancestor of i.
  /// Lower triangular with unit diagonal under the topological order.
  const Eigen::MatrixXd& ancestor_mask() const { return ancestor_mask_; }

  bool is_ancestor(int ancestor, int joint) const {
    return ancestor_mask_(joint, ancestor) != 0.0;
  }

  /// Maximum number of moving joints on any root-to-leaf path.
  /// Only the loop-based dynamics depend on it (their cost is O(n d)).
  int max_depth() const { return max_depth_; }

  /// True when joint i's parent is joint i-1 for all i (single unbranched chain).
  bool is_serial_chain() const { return serial_chain_; }

  bool has_frame(std::string_view frame_name) const;
  const Frame& frame(std::string_view frame_name) const;  // throws UnknownFrameError
  const std::vector<Frame>& frames() const { return frames_; }

  int joint_index(std::string_view joint_name) const;  // -1 if absent

  /// Non-fatal findings from the build (e.g. zero-mass links with moving children).
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// The description this model was built from (pre-fusion).
  const ModelDescription& description() const { return description_; }

 private:
  friend RobotModel build_model(const ModelDescription& description);

  std::string name_;
  std::vector<Joint> joints_;
  std::vector<SpatialInertia> inertias_;
  Eigen::MatrixXd ancestor_mask_;
  std::vector<Frame> frames_;
  std::unordered_map<std::string, int> frame_index_;
  int max_depth_ = 0;
  bool serial_chain_ = false;
  double total_mass_ = 0.0;
  std::vector<std::string> warnings_;
  ModelDescription description_;
};

/// Builds the n x n ancestor mask from parent indices (-1 = root). Requires
/// a topologically sorted forest: parent[i] < i.
Eigen::MatrixXd build_ancestor_mask(const std::vector<int>& parents);

/// Validates and normalizes a description into an immutable model: fuses
/// fixed joints, topologically reorders moving joints, folds inertias, and
/// precomputes the ancestor mask. Throws ModelError on structural problems.
RobotModel build_model(const ModelDescription& description);

/// Returns a copy of the model with a 6-joint floating-base stack prepended:
/// prismatic x, y, z, then revolute z, y, x. Emulates an unactuated free
/// base; the Euler-style stack has the usual gimbal-lock caveat at pitch ±π/2.
RobotModel floating_base(const RobotModel& model);

/// Local motion transform of a joint at position q: rotation about the axis
/// for revolute joints, translation along it for prismatic joints.
template <typename T>
SpatialTransformT<T> joint_motion(const Joint& joint, const T& q) {
  if (joint.type == JointType::Revolute) {
    return {axis_angle_rotation<T>(joint.axis, q), Vec3<T>::Zero()};
  }
  return {Mat3<T>::Identity(), joint.axis.cast<T>() * q};
}

}  // namespace vecdyn
