#pragma once

#include <string_view>
#include <vector>

#include "vecdyn/model.hpp"

namespace vecdyn::robots {

/// 7-DOF serial arm (Franka-style geometry) with a fixed "ee" flange frame.
RobotModel chain7();

/// 23-DOF branched humanoid: 1 waist, 2x6 legs, 2x5 arms, fixed head/palms.
RobotModel humanoid23();

/// humanoid23 with the 6-joint floating-base stack prepended (29 DOF).
RobotModel tree29();

/// Lookup by name ("chain7", "humanoid23", "tree29"); throws Error otherwise.
RobotModel by_name(std::string_view name);

std::vector<std::string> names();

/// The embedded URDF documents the builtin models are built from.
std::string_view chain7_urdf();
std::string_view humanoid23_urdf();

}  // namespace vecdyn::robots
