#pragma once

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vecdyn/model.hpp"
#include "vecdyn/spatial.hpp"

namespace vecdyn::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = -1.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3d random_vec3(Rng& rng, double scale = 1.0) {
  return Vec3d(uniform(rng), uniform(rng), uniform(rng)) * scale;
}

inline Eigen::VectorXd random_vector(Rng& rng, int n, double scale = M_PI) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = uniform(rng, -scale, scale);
  }
  return v;
}

inline Mat3d random_rotation(Rng& rng) {
  const Vec3d axis = random_vec3(rng).normalized();
  return axis_angle_rotation<double>(axis, uniform(rng, -M_PI, M_PI));
}

/// Deterministic non-axis-aligned rotation for hand-built fixtures.
inline Mat3d test_rotation(double angle) {
  return axis_angle_rotation<double>(Vec3d(1.0, 2.0, 3.0).normalized(), angle);
}

inline SpatialTransform random_transform(Rng& rng, double translation_scale = 1.0) {
  return SpatialTransform(random_rotation(rng), random_vec3(rng, translation_scale));
}

inline SpatialMotion random_motion(Rng& rng) {
  return SpatialMotion(random_vec3(rng), random_vec3(rng));
}

inline SpatialForce random_force(Rng& rng) {
  return SpatialForce(random_vec3(rng), random_vec3(rng));
}

/// Random physically valid spatial inertia: positive mass, com offset, and a
/// positive definite rotational inertia about the com.
inline SpatialInertia random_inertia(Rng& rng) {
  const double mass = uniform(rng, 0.1, 5.0);
  const Vec3d com = random_vec3(rng, 0.3);
  Mat3d a;
  a << uniform(rng), uniform(rng), uniform(rng), uniform(rng), uniform(rng),
      uniform(rng), uniform(rng), uniform(rng), uniform(rng);
  const Mat3d rot = a * a.transpose() + 0.05 * Mat3d::Identity();
  return inertia_from_params(mass, com, rot);
}

/// Max-norm relative error with a unit floor on the denominator.
inline double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale =
      std::max({1e-30, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, scale);
}

// --- Dense 6x6 oracles (materialized only here, never in the library) ---

/// Motion cross operator [[wx, 0], [vx, wx]].
inline Mat6d motion_cross_operator(const SpatialMotion& v) {
  Mat6d op = Mat6d::Zero();
  op.topLeftCorner<3, 3>() = skew<double>(v.angular);
  op.bottomLeftCorner<3, 3>() = skew<double>(v.linear);
  op.bottomRightCorner<3, 3>() = skew<double>(v.angular);
  return op;
}

/// Dense Plücker motion transform [[R, 0], [px R, R]].
inline Mat6d motion_transform_operator(const SpatialTransform& x) {
  Mat6d op = Mat6d::Zero();
  op.topLeftCorner<3, 3>() = x.rotation;
  op.bottomLeftCorner<3, 3>() = skew<double>(x.translation) * x.rotation;
  op.bottomRightCorner<3, 3>() = x.rotation;
  return op;
}

/// Naive 4x4 homogeneous-matrix FK oracle, written independently of the
/// library's transform composition.
inline Eigen::Matrix4d homogeneous(const Mat3d& r, const Vec3d& p) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = r;
  m.topRightCorner<3, 1>() = p;
  return m;
}

inline std::vector<Eigen::Matrix4d> naive_fk(const RobotModel& model,
                                             const Eigen::VectorXd& q) {
  std::vector<Eigen::Matrix4d> world(static_cast<size_t>(model.dof()));
  for (int i = 0; i < model.dof(); ++i) {
    const Joint& joint = model.joint(i);
    Eigen::Matrix4d motion = Eigen::Matrix4d::Identity();
    if (joint.type == JointType::Revolute) {
      motion.topLeftCorner<3, 3>() = axis_angle_rotation<double>(joint.axis, q[i]);
    } else {
      motion.topRightCorner<3, 1>() = joint.axis * q[i];
    }
    const Eigen::Matrix4d local =
        homogeneous(joint.offset.rotation, joint.offset.translation) * motion;
    world[static_cast<size_t>(i)] =
        joint.parent < 0 ? local : world[static_cast<size_t>(joint.parent)] * local;
  }
  return world;
}

/// Random kinematic tree description for property tests. `branchiness` in
/// [0,1]: 0 gives a serial chain, larger values more branching.
inline ModelDescription random_tree(Rng& rng, int n, double branchiness = 0.5) {
  ModelDescription desc;
  desc.name = "random_tree";
  desc.add_link("link0", uniform(rng, 0.5, 2.0), random_vec3(rng, 0.1),
                Mat3d::Identity() * uniform(rng, 0.01, 0.1));
  for (int i = 1; i <= n; ++i) {
    const std::string link = "link" + std::to_string(i);
    Mat3d a;
    a << uniform(rng), uniform(rng), uniform(rng), uniform(rng), uniform(rng),
        uniform(rng), uniform(rng), uniform(rng), uniform(rng);
    desc.add_link(link, uniform(rng, 0.2, 3.0), random_vec3(rng, 0.15),
                  (a * a.transpose() + 0.02 * Mat3d::Identity()) * 0.05);
    int parent = i - 1;
    if (uniform(rng, 0.0, 1.0) < branchiness && i > 1) {
      parent = static_cast<int>(uniform(rng, 0.0, static_cast<double>(i) - 1e-9));
    }
    const JointType type =
        uniform(rng, 0.0, 1.0) < 0.8 ? JointType::Revolute : JointType::Prismatic;
    // Zero-pad the joint index so lexicographic order matches creation order.
    char name[16];
    std::snprintf(name, sizeof(name), "j%03d", i);
    desc.add_joint(name, type, "link" + std::to_string(parent), link,
                   random_transform(rng, 0.4),
                   random_vec3(rng).normalized());
  }
  return desc;
}

}  // namespace vecdyn::testing
