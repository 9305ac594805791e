#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vecdyn/model.hpp"

namespace vecdyn::urdf {

struct UrdfInertial {
  bool present = false;
  double mass = 0.0;
  Vec3d origin_xyz = Vec3d::Zero();   // center of mass in the link frame
  Vec3d origin_rpy = Vec3d::Zero();   // orientation of the inertial axes
  Mat3d inertia = Mat3d::Zero();      // about the com, in inertial axes
};

struct UrdfLink {
  std::string name;
  UrdfInertial inertial;
};

enum class UrdfJointType { Revolute, Continuous, Prismatic, Fixed };

struct UrdfJoint {
  std::string name;
  UrdfJointType type = UrdfJointType::Fixed;
  std::string parent_link;
  std::string child_link;
  Vec3d origin_xyz = Vec3d::Zero();
  Vec3d origin_rpy = Vec3d::Zero();
  Vec3d axis = Vec3d::UnitX();  // URDF default
  std::optional<JointLimits> limits;
};

/// The recognized subset of a URDF document: links with inertials, joints of
/// type revolute/continuous/prismatic/fixed with origin, axis, and limits.
/// Anything else (visual, collision, transmission, ...) is skipped and
/// reported in `warnings`.
struct UrdfDocument {
  std::string robot_name;
  std::vector<UrdfLink> links;
  std::vector<UrdfJoint> joints;
  std::vector<std::string> warnings;
};

/// Extrinsic x-y-z rotation per the URDF convention:
/// R = R_z(yaw) · R_y(pitch) · R_x(roll).
Mat3d rpy_to_rotation(double roll, double pitch, double yaw);

/// Parses URDF XML. Throws ParseError (with line/column) on malformed XML,
/// UnsupportedFeatureError on planar/floating joints, and ModelError on
/// semantic problems (duplicate names, dangling references, no unique root).
UrdfDocument parse_urdf(std::string_view text);

UrdfDocument parse_urdf_file(const std::string& path);

/// Writes the recognized subset back out as URDF XML. parse ∘ serialize is
/// idempotent on recognized fields.
std::string serialize_urdf(const UrdfDocument& doc);

/// Converts a parsed document into a buildable description. Inertia tensors
/// are rotated into link axes and symmetrized; asymmetry beyond 1e-6
/// relative is an error.
ModelDescription to_description(const UrdfDocument& doc);

/// parse + convert + build in one call.
RobotModel load_model(const std::string& path);
RobotModel load_model_from_string(std::string_view text);

}  // namespace vecdyn::urdf
