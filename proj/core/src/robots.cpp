#include "vecdyn/robots.hpp"

#include "embedded_assets.hpp"
#include "vecdyn/errors.hpp"
#include "vecdyn/urdf.hpp"

namespace vecdyn::robots {

std::string_view chain7_urdf() { return embedded::kChain7Urdf; }
std::string_view humanoid23_urdf() { return embedded::kHumanoid23Urdf; }

RobotModel chain7() { return urdf::load_model_from_string(embedded::kChain7Urdf); }

RobotModel humanoid23() {
  return urdf::load_model_from_string(embedded::kHumanoid23Urdf);
}

RobotModel tree29() { return floating_base(humanoid23()); }

RobotModel by_name(std::string_view name) {
  if (name == "chain7") {
    return chain7();
  }
  if (name == "humanoid23") {
    return humanoid23();
  }
  if (name == "tree29") {
    return tree29();
  }
  throw Error("unknown builtin robot '" + std::string(name) +
              "'; available: chain7, humanoid23, tree29");
}

std::vector<std::string> names() { return {"chain7", "humanoid23", "tree29"}; }

}  // namespace vecdyn::robots
