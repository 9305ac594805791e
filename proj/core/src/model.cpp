#include "vecdyn/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "vecdyn/errors.hpp"

namespace vecdyn {

LinkSpec& ModelDescription::add_link(std::string link_name) {
  links.push_back(LinkSpec{std::move(link_name)});
  return links.back();
}

LinkSpec& ModelDescription::add_link(std::string link_name, double mass,
                                     const Vec3d& com,
                                     const Mat3d& inertia_about_com) {
  LinkSpec& link = add_link(std::move(link_name));
  link.has_inertial = true;
  link.mass = mass;
  link.com = com;
  link.inertia = inertia_about_com;
  return link;
}

JointSpec& ModelDescription::add_joint(std::string joint_name, JointType type,
                                       std::string parent_link,
                                       std::string child_link,
                                       const SpatialTransform& origin,
                                       const Vec3d& axis) {
  JointSpec spec;
  spec.name = std::move(joint_name);
  spec.type = type;
  spec.parent_link = std::move(parent_link);
  spec.child_link = std::move(child_link);
  spec.origin = origin;
  spec.axis = axis;
  joints.push_back(std::move(spec));
  return joints.back();
}

Eigen::MatrixXd build_ancestor_mask(const std::vector<int>& parents) {
  const int n = static_cast<int>(parents.size());
  Eigen::MatrixXd mask = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int p = parents[static_cast<size_t>(i)];
    if (p >= i) {
      throw ModelError("build_ancestor_mask: joint " + std::to_string(i) +
                       " has forward or self parent reference " + std::to_string(p) +
                       " (parents must be topologically sorted)");
    }
    if (p < -1) {
      throw ModelError("build_ancestor_mask: invalid parent index " +
                       std::to_string(p));
    }
    mask(i, i) = 1.0;
    if (p >= 0) {
      // Row of the parent already holds the parent's full ancestry.
      mask.row(i) += mask.row(p);
    }
  }
  return mask;
}

namespace {

struct LinkGraph {
  const ModelDescription* desc = nullptr;
  std::map<std::string, int> link_index;
  // Joints grouped by parent link, sorted by joint name for a canonical order.
  std::vector<std::vector<int>> children;
  std::vector<int> parent_joint_of_link;  // -1 for the root link
  int root_link = -1;
};

LinkGraph analyze(const ModelDescription& desc) {
  LinkGraph g;
  g.desc = &desc;
  for (size_t i = 0; i < desc.links.size(); ++i) {
    if (!g.link_index.emplace(desc.links[i].name, static_cast<int>(i)).second) {
      throw ModelError("duplicate link name '" + desc.links[i].name + "'");
    }
  }
  std::set<std::string> joint_names;
  g.children.resize(desc.links.size());
  g.parent_joint_of_link.assign(desc.links.size(), -1);
  std::vector<bool> is_child(desc.links.size(), false);
  for (size_t j = 0; j < desc.joints.size(); ++j) {
    const JointSpec& spec = desc.joints[j];
    if (!joint_names.insert(spec.name).second) {
      throw ModelError("duplicate joint name '" + spec.name + "'");
    }
    auto parent_it = g.link_index.find(spec.parent_link);
    auto child_it = g.link_index.find(spec.child_link);
    if (parent_it == g.link_index.end()) {
      throw ModelError("joint '" + spec.name + "' references unknown parent link '" +
                       spec.parent_link + "'");
    }
    if (child_it == g.link_index.end()) {
      throw ModelError("joint '" + spec.name + "' references unknown child link '" +
                       spec.child_link + "'");
    }
    if (is_child[static_cast<size_t>(child_it->second)]) {
      throw ModelError("link '" + spec.child_link +
                       "' is the child of more than one joint");
    }
    is_child[static_cast<size_t>(child_it->second)] = true;
    g.parent_joint_of_link[static_cast<size_t>(child_it->second)] =
        static_cast<int>(j);
    g.children[static_cast<size_t>(parent_it->second)].push_back(
        static_cast<int>(j));
  }
  for (auto& list : g.children) {
    std::sort(list.begin(), list.end(), [&](int a, int b) {
      return desc.joints[static_cast<size_t>(a)].name <
             desc.joints[static_cast<size_t>(b)].name;
    });
  }
  for (size_t i = 0; i < desc.links.size(); ++i) {
    if (!is_child[i]) {
      if (g.root_link >= 0) {
        throw ModelError("model has multiple root links ('" +
                         desc.links[static_cast<size_t>(g.root_link)].name +
                         "' and '" + desc.links[i].name + "')");
      }
      g.root_link = static_cast<int>(i);
    }
  }
  if (g.root_link < 0) {
    throw ModelError("model has no root link (joint graph contains a cycle)");
  }
  return g;
}

SpatialInertia link_inertia(const LinkSpec& link) {
  if (!link.has_inertial) {
    return SpatialInertia::Zero();
  }
  return inertia_from_params(link.mass, link.com, link.inertia);
}

Vec3d normalized_axis(const JointSpec& spec) {
  const double norm = spec.axis.norm();
  if (std::abs(norm - 1.0) > 1e-9) {
    throw ModelError("joint '" + spec.name + "' axis has norm " +
                     std::to_string(norm) + "; expected a unit vector");
  }
  return spec.axis / norm;
}

struct Builder {
  const ModelDescription& desc;
  const LinkGraph& graph;
  std::vector<bool> visited_link;
  std::vector<int> depth;
  std::vector<Joint> joints;
  std::vector<SpatialInertia> inertias;
  std::vector<Frame> frames;
  std::unordered_map<std::string, int> frame_index;
  double total_mass = 0.0;

  void add_frame(const std::string& frame_name, int joint, const SpatialTransform& x) {
    if (frame_index.count(frame_name) != 0) {
      throw ModelError("duplicate frame name '" + frame_name + "'");
    }
    frame_index.emplace(frame_name, static_cast<int>(frames.size()));
    frames.push_back(Frame{frame_name, joint, x});
  }

  // Walks the subtree under `link`, expressing everything relative to the
  // frame of moving joint `moving_parent` (or the root when -1) through the
  // accumulated fixed transform `rel`.
  void process_link(int link, int moving_parent, const SpatialTransform& rel) {
    visited_link[static_cast<size_t>(link)] = true;
    const LinkSpec& link_spec = desc.links[static_cast<size_t>(link)];
    add_frame(link_spec.name, moving_parent, rel);
    if (moving_parent >= 0) {
      inertias[static_cast<size_t>(moving_parent)] +=
          transform_inertia(rel, link_inertia(link_spec));
      total_mass += link_spec.mass;
    }
    for (int j : graph.children[static_cast<size_t>(link)]) {
      const JointSpec& spec = desc.joints[static_cast<size_t>(j)];
      if (!is_valid_rotation(spec.origin.rotation)) {
        throw ModelError("joint '" + spec.name +
                         "' origin rotation is not orthonormal");
      }
      const int child = graph.link_index.at(spec.child_link);
      if (spec.type == JointType::Fixed) {
        process_link(child, moving_parent, rel * spec.origin);
        continue;
      }
      Joint joint;
      joint.name = spec.name;
      joint.type = spec.type;
      joint.parent = moving_parent;
      joint.offset = rel * spec.origin;
      joint.axis = normalized_axis(spec);
      joint.limits = spec.limits;
      const int index = static_cast<int>(joints.size());
      joints.push_back(std::move(joint));
      inertias.push_back(SpatialInertia::Zero());
      depth.push_back(moving_parent >= 0 ? depth[static_cast<size_t>(moving_parent)] + 1
                                         : 1);
      process_link(child, index, SpatialTransform::Identity());
    }
  }
};

}  // namespace

RobotModel build_model(const ModelDescription& description) {
  const LinkGraph graph = analyze(description);

  // Missing inertials are only an error where they would make dynamics
  // meaningless: a link that carries a moving child joint.
  for (size_t i = 0; i < description.links.size(); ++i) {
    const LinkSpec& link = description.links[i];
    if (link.has_inertial || static_cast<int>(i) == graph.root_link) {
      continue;
    }
    const int pj = graph.parent_joint_of_link[i];
    const bool attached_by_moving =
        pj >= 0 &&
        description.joints[static_cast<size_t>(pj)].type != JointType::Fixed;
    const bool has_moving_child = std::any_of(
        graph.children[i].begin(), graph.children[i].end(), [&](int j) {
          return description.joints[static_cast<size_t>(j)].type != JointType::Fixed;
        });
    if (attached_by_moving && has_moving_child) {
      throw ModelError("link '" + link.name +
                       "' has no inertial but carries a moving child joint");
    }
  }

  Builder builder{description, graph};
  builder.visited_link.assign(description.links.size(), false);
  builder.process_link(graph.root_link, -1, SpatialTransform::Identity());

  for (size_t i = 0; i < description.links.size(); ++i) {
    if (!builder.visited_link[i]) {
      throw ModelError("link '" + description.links[i].name +
                       "' is not connected to the root link '" +
                       description.links[static_cast<size_t>(graph.root_link)].name +
                       "'");
    }
  }

  RobotModel model;
  model.name_ = description.name;
  model.description_ = description;
  model.joints_ = std::move(builder.joints);
  model.inertias_ = std::move(builder.inertias);
  model.frames_ = std::move(builder.frames);
  model.frame_index_ = std::move(builder.frame_index);
  model.total_mass_ = builder.total_mass;

  const int n = model.dof();
  std::vector<int> parents(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    parents[static_cast<size_t>(i)] = model.joints_[static_cast<size_t>(i)].parent;
  }
  model.ancestor_mask_ = build_ancestor_mask(parents);
  model.max_depth_ =
      builder.depth.empty() ? 0 : *std::max_element(builder.depth.begin(),
                                                    builder.depth.end());
  model.serial_chain_ = true;
  for (int i = 0; i < n; ++i) {
    if (parents[static_cast<size_t>(i)] != i - 1) {
      model.serial_chain_ = false;
      break;
    }
  }

  for (int i = 0; i < n; ++i) {
    const bool has_moving_child =
        std::any_of(model.joints_.begin(), model.joints_.end(),
                    [i](const Joint& j) { return j.parent == i; });
    if (has_moving_child && model.joint_mass(i) <= 0.0) {
      model.warnings_.push_back("joint '" + model.joints_[static_cast<size_t>(i)].name +
                                "' drives a zero-mass link but has moving children");
    }
  }
  return model;
}

RobotModel floating_base(const RobotModel& model) {
  const ModelDescription& original = model.description();
  // Identify the root link again; build_model already validated uniqueness.
  std::set<std::string> child_links;
  for (const JointSpec& j : original.joints) {
    child_links.insert(j.child_link);
  }
  std::string root;
  for (const LinkSpec& l : original.links) {
    if (child_links.count(l.name) == 0) {
      root = l.name;
      break;
    }
  }

  ModelDescription desc;
  desc.name = original.name.empty() ? "floating" : original.name + "_floating";
  desc.add_link("__world");
  const char* stage_links[5] = {"__fb_x", "__fb_y", "__fb_z", "__fb_rz", "__fb_ry"};
  for (const char* name : stage_links) {
    // Explicit zero inertials: the stack is massless by design.
    desc.add_link(name, 0.0, Vec3d::Zero(), Mat3d::Zero());
  }
  desc.add_joint("base_tx", JointType::Prismatic, "__world", "__fb_x",
                 SpatialTransform::Identity(), Vec3d::UnitX());
  desc.add_joint("base_ty", JointType::Prismatic, "__fb_x", "__fb_y",
                 SpatialTransform::Identity(), Vec3d::UnitY());
  desc.add_joint("base_tz", JointType::Prismatic, "__fb_y", "__fb_z",
                 SpatialTransform::Identity(), Vec3d::UnitZ());
  desc.add_joint("base_rz", JointType::Revolute, "__fb_z", "__fb_rz",
                 SpatialTransform::Identity(), Vec3d::UnitZ());
  desc.add_joint("base_ry", JointType::Revolute, "__fb_rz", "__fb_ry",
                 SpatialTransform::Identity(), Vec3d::UnitY());
  desc.add_joint("base_rx", JointType::Revolute, "__fb_ry", root,
                 SpatialTransform::Identity(), Vec3d::UnitX());
  for (const LinkSpec& l : original.links) {
    desc.links.push_back(l);
  }
  for (const JointSpec& j : original.joints) {
    desc.joints.push_back(j);
  }
  return build_model(desc);
}

bool RobotModel::has_frame(std::string_view frame_name) const {
  return frame_index_.count(std::string(frame_name)) != 0;
}

const Frame& RobotModel::frame(std::string_view frame_name) const {
  auto it = frame_index_.find(std::string(frame_name));
  if (it == frame_index_.end()) {
    throw UnknownFrameError("unknown frame '" + std::string(frame_name) + "'");
  }
  return frames_[static_cast<size_t>(it->second)];
}

int RobotModel::joint_index(std::string_view joint_name) const {
  for (size_t i = 0; i < joints_.size(); ++i) {
    if (joints_[i].name == joint_name) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

}  // namespace vecdyn
