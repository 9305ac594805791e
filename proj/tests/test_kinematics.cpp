#include <doctest.h>

#include <Eigen/SVD>

#include "helpers.hpp"
#include "vecdyn/kinematics.hpp"
#include "vecdyn/robots.hpp"

using namespace vecdyn;
using namespace vecdyn::testing;

TEST_SUITE_BEGIN("kinematics");

namespace {

ModelDescription chain_description(Rng& rng, int n) {
  return random_tree(rng, n, 0.0);
}

/// Central-difference twist of a frame: (angular from dR R^T, linear from dp).
Vec6d finite_difference_twist(const RobotModel& model, const Eigen::VectorXd& q,
                              const Eigen::VectorXd& qd, const std::string& frame,
                              double step) {
  const SpatialTransform plus =
      frame_transform<double>(model, Eigen::VectorXd(q + step * qd), frame);
  const SpatialTransform minus =
      frame_transform<double>(model, Eigen::VectorXd(q - step * qd), frame);
  const SpatialTransform center = frame_transform<double>(model, q, frame);
  const Mat3d dr = (plus.rotation - minus.rotation) / (2.0 * step);
  const Mat3d omega_hat = dr * center.rotation.transpose();
  Vec6d twist;
  twist.head<3>() =
      Vec3d(omega_hat(2, 1) - omega_hat(1, 2), omega_hat(0, 2) - omega_hat(2, 0),
            omega_hat(1, 0) - omega_hat(0, 1)) *
      0.5;
  twist.tail<3>() = (plus.translation - minus.translation) / (2.0 * step);
  return twist;
}

}  // namespace

TEST_CASE("FK matches the naive homogeneous-matrix oracle") {
  Rng rng(100);
  for (int trial = 0; trial < 20; ++trial) {
    const RobotModel model = build_model(random_tree(rng, 7, 0.3));
    const Eigen::VectorXd q = random_vector(rng, model.dof());
    const auto frames = forward_kinematics<double>(model, q);
    const auto oracle = naive_fk(model, q);
    for (int i = 0; i < model.dof(); ++i) {
      CHECK(rel_err(frames[i].rotation, oracle[static_cast<size_t>(i)]
                                            .topLeftCorner<3, 3>()) < 1e-13);
      CHECK(rel_err(frames[i].translation, oracle[static_cast<size_t>(i)]
                                               .topRightCorner<3, 1>()) < 1e-13);
    }
  }
}

TEST_CASE("all-zero q on identity-offset chain gives identity transforms") {
  ModelDescription desc;
  desc.add_link("l0", 1.0, Vec3d::Zero(), 0.01 * Mat3d::Identity());
  for (int i = 1; i <= 4; ++i) {
    desc.add_link("l" + std::to_string(i), 1.0, Vec3d::Zero(),
                  0.01 * Mat3d::Identity());
    desc.add_joint("j" + std::to_string(i), JointType::Revolute,
                   "l" + std::to_string(i - 1), "l" + std::to_string(i),
                   SpatialTransform::Identity(), Vec3d::UnitZ());
  }
  const RobotModel model = build_model(desc);
  const auto frames =
      forward_kinematics<double>(model, Eigen::VectorXd::Zero(model.dof()));
  for (int i = 0; i < model.dof(); ++i) {
    CHECK(rel_err(frames[i].rotation, Mat3d::Identity()) == 0.0);
    CHECK(frames[i].translation.norm() == 0.0);
  }
}

TEST_CASE("single revolute z joint at pi/2 maps x to y") {
  ModelDescription desc;
  desc.add_link("base");
  desc.add_link("spinner", 1.0, Vec3d::Zero(), 0.01 * Mat3d::Identity());
  desc.add_joint("j", JointType::Revolute, "base", "spinner",
                 SpatialTransform::Identity(), Vec3d::UnitZ());
  const RobotModel model = build_model(desc);
  Eigen::VectorXd q(1);
  q << M_PI / 2;
  const auto frames = forward_kinematics<double>(model, q);
  CHECK(rel_err(frames[0].rotation * Vec3d::UnitX(), Vec3d::UnitY()) < 1e-15);
}

TEST_CASE("FK rotations stay orthonormal on deep chains") {
  Rng rng(101);
  const RobotModel model = build_model(chain_description(rng, 16));
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd q = random_vector(rng, model.dof());
    const auto frames = forward_kinematics<double>(model, q);
    for (int i = 0; i < model.dof(); ++i) {
      CHECK((frames[i].rotation.transpose() * frames[i].rotation -
             Mat3d::Identity())
                .cwiseAbs()
                .maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("scan FK equals sequential FK on serial chains, n = 1..16") {
  Rng rng(102);
  for (int n = 1; n <= 16; ++n) {
    const RobotModel model = build_model(chain_description(rng, n));
    REQUIRE(model.is_serial_chain());
    for (int trial = 0; trial < 25; ++trial) {
      const Eigen::VectorXd q = random_vector(rng, n);
      const auto sequential = forward_kinematics<double>(model, q);
      const auto scanned = forward_kinematics_scan<double>(model, q);
      for (int i = 0; i < n; ++i) {
        CHECK(rel_err(sequential[i].rotation, scanned[i].rotation) < 1e-12);
        CHECK(rel_err(sequential[i].translation, scanned[i].translation) < 1e-12);
      }
    }
  }
}

TEST_CASE("scan FK rejects branched trees") {
  Rng rng(103);
  RobotModel branched = build_model(random_tree(rng, 8, 0.9));
  while (branched.is_serial_chain()) {
    branched = build_model(random_tree(rng, 8, 0.9));
  }
  CHECK_THROWS_AS(
      forward_kinematics_scan<double>(branched, random_vector(rng, branched.dof())),
      UnsupportedStructureError);
}

TEST_CASE("frame transforms") {
  const RobotModel model = robots::chain7();
  SUBCASE("frame at a joint with identity offset equals the FrameSet entry") {
    Rng rng(104);
    const Eigen::VectorXd q = random_vector(rng, model.dof());
    const auto frames = forward_kinematics<double>(model, q);
    const SpatialTransform link4 = frame_transform<double>(model, frames, "link4");
    const int idx = model.joint_index("joint4");
    CHECK(rel_err(link4.rotation, frames[idx].rotation) == 0.0);
    CHECK(rel_err(link4.translation, frames[idx].translation) == 0.0);
  }
  SUBCASE("ee frame at q = 0 equals the hand-composed product of offsets") {
    Eigen::Matrix4d product = Eigen::Matrix4d::Identity();
    for (int i = 0; i < model.dof(); ++i) {
      product = product * homogeneous(model.joint(i).offset.rotation,
                                      model.joint(i).offset.translation);
    }
    const Frame& ee = model.frame("ee");
    product = product * homogeneous(ee.offset.rotation, ee.offset.translation);
    const SpatialTransform tool =
        frame_transform<double>(model, Eigen::VectorXd::Zero(model.dof()), "ee");
    CHECK(rel_err(tool.rotation, product.topLeftCorner<3, 3>()) < 1e-14);
    CHECK(rel_err(tool.translation, product.topRightCorner<3, 1>()) < 1e-14);
  }
  SUBCASE("root-attached frame ignores q") {
    Rng rng(105);
    const SpatialTransform base1 = frame_transform<double>(
        model, random_vector(rng, model.dof()), "base_link");
    const SpatialTransform base2 = frame_transform<double>(
        model, random_vector(rng, model.dof()), "base_link");
    CHECK(rel_err(base1.rotation, base2.rotation) == 0.0);
    CHECK(rel_err(base1.translation, base2.translation) == 0.0);
  }
  SUBCASE("unknown frame throws") {
    CHECK_THROWS_AS(
        frame_transform<double>(model, Eigen::VectorXd::Zero(7), "nope"),
        UnknownFrameError);
  }
}

TEST_CASE("geometric jacobian") {
  SUBCASE("J qd equals the finite-difference frame twist") {
    Rng rng(106);
    const RobotModel chain = robots::chain7();
    const RobotModel tree = build_model(random_tree(rng, 12, 0.5));
    for (const RobotModel* model : {&chain, &tree}) {
      const std::string frame =
          model->dof() == 7 ? "ee" : model->frames().back().name;
      for (int trial = 0; trial < 25; ++trial) {
        const Eigen::VectorXd q = random_vector(rng, model->dof());
        const Eigen::VectorXd qd = random_vector(rng, model->dof(), 1.0);
        const Eigen::Matrix<double, 6, Eigen::Dynamic> jac =
            geometric_jacobian<double>(*model, q, frame);
        const Vec6d twist = jac * qd;
        const Vec6d expected = finite_difference_twist(*model, q, qd, frame, 1e-6);
        CHECK(rel_err(twist, expected) < 1e-5);
      }
    }
  }
  SUBCASE("non-ancestor columns are exactly zero, matching the mask row") {
    Rng rng(107);
    RobotModel tree = build_model(random_tree(rng, 12, 0.8));
    while (tree.is_serial_chain()) {
      tree = build_model(random_tree(rng, 12, 0.8));
    }
    const std::string frame = tree.frames().back().name;
    const int target = tree.frame(frame).joint;
    const Eigen::VectorXd q = random_vector(rng, tree.dof());
    const auto jac = geometric_jacobian<double>(tree, q, frame);
    for (int j = 0; j < tree.dof(); ++j) {
      if (tree.ancestor_mask()(target, j) == 0.0) {
        CHECK(jac.col(j).norm() == 0.0);
      } else {
        CHECK(jac.col(j).norm() > 0.0);
      }
    }
  }
  SUBCASE("1-dof revolute with point at distance L along x") {
    ModelDescription desc;
    desc.add_link("base");
    desc.add_link("rod", 1.0, Vec3d(0.25, 0, 0), 0.01 * Mat3d::Identity());
    desc.add_joint("j", JointType::Revolute, "base", "rod",
                   SpatialTransform::Identity(), Vec3d::UnitZ());
    desc.add_link("tip");
    desc.add_joint("tip_mount", JointType::Fixed, "rod", "tip",
                   SpatialTransform(Mat3d::Identity(), Vec3d(0.5, 0, 0)));
    const RobotModel model = build_model(desc);
    const auto jac =
        geometric_jacobian<double>(model, Eigen::VectorXd::Zero(1), "tip");
    Vec6d expected;
    expected << 0, 0, 1, 0, 0.5, 0;
    CHECK(rel_err(jac.col(0), expected) < 1e-15);
  }
}

TEST_CASE("manipulability") {
  SUBCASE("zero jacobian gives zero") {
    const Eigen::Matrix<double, 6, Eigen::Dynamic> jac =
        Eigen::Matrix<double, 6, Eigen::Dynamic>::Zero(6, 7);
    CHECK(manipulability<double>(jac) == 0.0);
  }
  SUBCASE("orthonormal rows give one") {
    Eigen::Matrix<double, 6, Eigen::Dynamic> jac =
        Eigen::Matrix<double, 6, Eigen::Dynamic>::Zero(6, 8);
    jac.leftCols<6>() = Mat6d::Identity();
    CHECK(manipulability<double>(jac) == doctest::Approx(1.0));
  }
  SUBCASE("matches the singular-value product oracle") {
    Rng rng(108);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::Matrix<double, 6, Eigen::Dynamic> jac(6, 9);
      for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 9; ++c) {
          jac(r, c) = uniform(rng);
        }
      }
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
      const double expected = svd.singularValues().prod();
      CHECK(manipulability<double>(jac) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
  SUBCASE("rank-deficient jacobian gives zero") {
    // Fewer columns than rows: J J^T is singular.
    Eigen::Matrix<double, 6, Eigen::Dynamic> jac(6, 3);
    jac.setOnes();
    CHECK(manipulability<double>(jac) == 0.0);
  }
}

TEST_SUITE_END();
