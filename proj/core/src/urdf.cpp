#include "vecdyn/urdf.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "vecdyn/errors.hpp"
#include "vecdyn/xml.hpp"

namespace vecdyn::urdf {

Mat3d rpy_to_rotation(double roll, double pitch, double yaw) {
  const double cr = std::cos(roll), sr = std::sin(roll);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  Mat3d rx, ry, rz;
  // clang-format off
  rx << 1, 0, 0,
        0, cr, -sr,
        0, sr, cr;
  ry << cp, 0, sp,
        0, 1, 0,
        -sp, 0, cp;
  rz << cy, -sy, 0,
        sy, cy, 0,
        0, 0, 1;
  // clang-format on
  return rz * ry * rx;
}

namespace {

[[noreturn]] void fail_at(const xml::Element& e, const std::string& message) {
  throw ParseError(message, e.line, e.column);
}

double parse_double(const xml::Element& e, const std::string& text,
                    const char* what) {
  size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &consumed);
  } catch (const std::exception&) {
    fail_at(e, std::string("invalid number '") + text + "' in " + what);
  }
  while (consumed < text.size() &&
         std::isspace(static_cast<unsigned char>(text[consumed]))) {
    ++consumed;
  }
  if (consumed != text.size()) {
    fail_at(e, std::string("invalid number '") + text + "' in " + what);
  }
  return value;
}

Vec3d parse_vec3(const xml::Element& e, const std::string& text, const char* what) {
  std::istringstream stream(text);
  Vec3d out;
  std::string token;
  for (int i = 0; i < 3; ++i) {
    if (!(stream >> token)) {
      fail_at(e, std::string("expected 3 numbers in ") + what + ", got '" + text + "'");
    }
    out[i] = parse_double(e, token, what);
  }
  if (stream >> token) {
    fail_at(e, std::string("expected 3 numbers in ") + what + ", got '" + text + "'");
  }
  return out;
}

double required_double_attr(const xml::Element& e, const char* attr) {
  const std::string* value = e.find_attribute(attr);
  if (value == nullptr) {
    fail_at(e, "<" + e.name + "> is missing the '" + attr + "' attribute");
  }
  return parse_double(e, *value, attr);
}

void parse_origin(const xml::Element& parent, Vec3d* xyz, Vec3d* rpy) {
  const xml::Element* origin = parent.find_child("origin");
  if (origin == nullptr) {
    return;
  }
  if (const std::string* v = origin->find_attribute("xyz")) {
    *xyz = parse_vec3(*origin, *v, "origin xyz");
  }
  if (const std::string* v = origin->find_attribute("rpy")) {
    *rpy = parse_vec3(*origin, *v, "origin rpy");
  }
}

UrdfLink parse_link(const xml::Element& e, std::vector<std::string>* warnings) {
  UrdfLink link;
  const std::string* name = e.find_attribute("name");
  if (name == nullptr) {
    fail_at(e, "<link> is missing the 'name' attribute");
  }
  link.name = *name;
  for (const xml::Element& child : e.children) {
    if (child.name == "inertial") {
      link.inertial.present = true;
      parse_origin(child, &link.inertial.origin_xyz, &link.inertial.origin_rpy);
      const xml::Element* mass = child.find_child("mass");
      if (mass == nullptr) {
        fail_at(child, "link '" + link.name + "' inertial is missing <mass>");
      }
      link.inertial.mass = required_double_attr(*mass, "value");
      const xml::Element* inertia = child.find_child("inertia");
      if (inertia == nullptr) {
        fail_at(child, "link '" + link.name + "' inertial is missing <inertia>");
      }
      const double ixx = required_double_attr(*inertia, "ixx");
      const double ixy = required_double_attr(*inertia, "ixy");
      const double ixz = required_double_attr(*inertia, "ixz");
      const double iyy = required_double_attr(*inertia, "iyy");
      const double iyz = required_double_attr(*inertia, "iyz");
      const double izz = required_double_attr(*inertia, "izz");
      // clang-format off
      link.inertial.inertia << ixx, ixy, ixz,
                               ixy, iyy, iyz,
                               ixz, iyz, izz;
      // clang-format on
    } else {
      warnings->push_back("link '" + link.name + "': skipped <" + child.name +
                          "> element");
    }
  }
  return link;
}

UrdfJoint parse_joint(const xml::Element& e, std::vector<std::string>* warnings) {
  UrdfJoint joint;
  const std::string* name = e.find_attribute("name");
  if (name == nullptr) {
    fail_at(e, "<joint> is missing the 'name' attribute");
  }
  joint.name = *name;
  const std::string* type = e.find_attribute("type");
  if (type == nullptr) {
    fail_at(e, "joint '" + joint.name + "' is missing the 'type' attribute");
  }
  if (*type == "revolute") {
    joint.type = UrdfJointType::Revolute;
  } else if (*type == "continuous") {
    joint.type = UrdfJointType::Continuous;
  } else if (*type == "prismatic") {
    joint.type = UrdfJointType::Prismatic;
  } else if (*type == "fixed") {
    joint.type = UrdfJointType::Fixed;
  } else if (*type == "planar" || *type == "floating") {
    throw UnsupportedFeatureError("joint '" + joint.name + "' has unsupported type '" +
                                  *type + "'");
  } else {
    fail_at(e, "joint '" + joint.name + "' has unknown type '" + *type + "'");
  }

  const xml::Element* parent = e.find_child("parent");
  const xml::Element* child = e.find_child("child");
  if (parent == nullptr || parent->find_attribute("link") == nullptr) {
    fail_at(e, "joint '" + joint.name + "' is missing <parent link=...>");
  }
  if (child == nullptr || child->find_attribute("link") == nullptr) {
    fail_at(e, "joint '" + joint.name + "' is missing <child link=...>");
  }
  joint.parent_link = *parent->find_attribute("link");
  joint.child_link = *child->find_attribute("link");
  parse_origin(e, &joint.origin_xyz, &joint.origin_rpy);
  if (const xml::Element* axis = e.find_child("axis")) {
    if (const std::string* v = axis->find_attribute("xyz")) {
      joint.axis = parse_vec3(*axis, *v, "axis xyz");
    }
  }
  if (const xml::Element* limit = e.find_child("limit")) {
    JointLimits limits;
    if (const std::string* v = limit->find_attribute("lower")) {
      limits.lower = parse_double(*limit, *v, "limit lower");
    }
    if (const std::string* v = limit->find_attribute("upper")) {
      limits.upper = parse_double(*limit, *v, "limit upper");
    }
    if (const std::string* v = limit->find_attribute("effort")) {
      limits.effort = parse_double(*limit, *v, "limit effort");
    }
    if (const std::string* v = limit->find_attribute("velocity")) {
      limits.velocity = parse_double(*limit, *v, "limit velocity");
    }
    joint.limits = limits;
  }
  for (const xml::Element& sub : e.children) {
    if (sub.name != "parent" && sub.name != "child" && sub.name != "origin" &&
        sub.name != "axis" && sub.name != "limit") {
      warnings->push_back("joint '" + joint.name + "': skipped <" + sub.name +
                          "> element");
    }
  }
  return joint;
}

void validate_structure(const UrdfDocument& doc) {
  std::set<std::string> link_names;
  for (const UrdfLink& link : doc.links) {
    if (!link_names.insert(link.name).second) {
      throw ModelError("duplicate link name '" + link.name + "'");
    }
  }
  std::set<std::string> joint_names;
  std::set<std::string> child_links;
  for (const UrdfJoint& joint : doc.joints) {
    if (!joint_names.insert(joint.name).second) {
      throw ModelError("duplicate joint name '" + joint.name + "'");
    }
    if (link_names.count(joint.parent_link) == 0) {
      throw ModelError("joint '" + joint.name + "' references unknown parent link '" +
                       joint.parent_link + "'");
    }
    if (link_names.count(joint.child_link) == 0) {
      throw ModelError("joint '" + joint.name + "' references unknown child link '" +
                       joint.child_link + "'");
    }
    if (!child_links.insert(joint.child_link).second) {
      throw ModelError("link '" + joint.child_link +
                       "' is the child of more than one joint");
    }
  }
  int roots = 0;
  for (const UrdfLink& link : doc.links) {
    if (child_links.count(link.name) == 0) {
      ++roots;
    }
  }
  if (roots != 1) {
    throw ModelError("document must have exactly one root link, found " +
                     std::to_string(roots) +
                     (roots == 0 ? " (joint graph contains a cycle)" : ""));
  }
}

std::string format_number(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::string format_vec3(const Vec3d& v) {
  return format_number(v.x()) + " " + format_number(v.y()) + " " +
         format_number(v.z());
}

}  // namespace

UrdfDocument parse_urdf(std::string_view text) {
  const xml::Element root = xml::parse(text);
  if (root.name != "robot") {
    throw ParseError("root element must be <robot>, found <" + root.name + ">",
                     root.line, root.column);
  }
  UrdfDocument doc;
  if (const std::string* name = root.find_attribute("name")) {
    doc.robot_name = *name;
  }
  for (const xml::Element& child : root.children) {
    if (child.name == "link") {
      doc.links.push_back(parse_link(child, &doc.warnings));
    } else if (child.name == "joint") {
      doc.joints.push_back(parse_joint(child, &doc.warnings));
    } else {
      doc.warnings.push_back("skipped <" + child.name + "> element");
    }
  }
  validate_structure(doc);
  return doc;
}

UrdfDocument parse_urdf_file(const std::string& path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) {
    throw Error("cannot open URDF file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return parse_urdf(buffer.str());
}

std::string serialize_urdf(const UrdfDocument& doc) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\"?>\n";
  out << "<robot name=\"" << doc.robot_name << "\">\n";
  for (const UrdfLink& link : doc.links) {
    out << "  <link name=\"" << link.name << "\">";
    if (link.inertial.present) {
      const UrdfInertial& in = link.inertial;
      out << "\n    <inertial>\n";
      out << "      <origin xyz=\"" << format_vec3(in.origin_xyz) << "\" rpy=\""
          << format_vec3(in.origin_rpy) << "\"/>\n";
      out << "      <mass value=\"" << format_number(in.mass) << "\"/>\n";
      out << "      <inertia ixx=\"" << format_number(in.inertia(0, 0))
          << "\" ixy=\"" << format_number(in.inertia(0, 1)) << "\" ixz=\""
          << format_number(in.inertia(0, 2)) << "\" iyy=\""
          << format_number(in.inertia(1, 1)) << "\" iyz=\""
          << format_number(in.inertia(1, 2)) << "\" izz=\""
          << format_number(in.inertia(2, 2)) << "\"/>\n";
      out << "    </inertial>\n  ";
    }
    out << "</link>\n";
  }
  for (const UrdfJoint& joint : doc.joints) {
    const char* type = nullptr;
    switch (joint.type) {
      case UrdfJointType::Revolute: type = "revolute"; break;
      case UrdfJointType::Continuous: type = "continuous"; break;
      case UrdfJointType::Prismatic: type = "prismatic"; break;
      case UrdfJointType::Fixed: type = "fixed"; break;
    }
    out << "  <joint name=\"" << joint.name << "\" type=\"" << type << "\">\n";
    out << "    <parent link=\"" << joint.parent_link << "\"/>\n";
    out << "    <child link=\"" << joint.child_link << "\"/>\n";
    out << "    <origin xyz=\"" << format_vec3(joint.origin_xyz) << "\" rpy=\""
        << format_vec3(joint.origin_rpy) << "\"/>\n";
    if (joint.type != UrdfJointType::Fixed) {
      out << "    <axis xyz=\"" << format_vec3(joint.axis) << "\"/>\n";
    }
    if (joint.limits) {
      out << "    <limit lower=\"" << format_number(joint.limits->lower)
          << "\" upper=\"" << format_number(joint.limits->upper) << "\" effort=\""
          << format_number(joint.limits->effort) << "\" velocity=\""
          << format_number(joint.limits->velocity) << "\"/>\n";
    }
    out << "  </joint>\n";
  }
  out << "</robot>\n";
  return out.str();
}

ModelDescription to_description(const UrdfDocument& doc) {
  ModelDescription desc;
  desc.name = doc.robot_name;
  for (const UrdfLink& link : doc.links) {
    LinkSpec& spec = desc.add_link(link.name);
    if (link.inertial.present) {
      const UrdfInertial& in = link.inertial;
      const double scale = std::max(1.0, in.inertia.cwiseAbs().maxCoeff());
      if ((in.inertia - in.inertia.transpose()).cwiseAbs().maxCoeff() >
          1e-6 * scale) {
        throw ModelError("link '" + link.name +
                         "': inertia tensor is not symmetric");
      }
      const Mat3d symmetrized = 0.5 * (in.inertia + in.inertia.transpose());
      const Mat3d r = rpy_to_rotation(in.origin_rpy.x(), in.origin_rpy.y(),
                                      in.origin_rpy.z());
      spec.has_inertial = true;
      spec.mass = in.mass;
      spec.com = in.origin_xyz;
      spec.inertia = r * symmetrized * r.transpose();
    }
  }
  for (const UrdfJoint& joint : doc.joints) {
    JointType type = JointType::Fixed;
    switch (joint.type) {
      case UrdfJointType::Revolute:
      case UrdfJointType::Continuous:
        type = JointType::Revolute;
        break;
      case UrdfJointType::Prismatic:
        type = JointType::Prismatic;
        break;
      case UrdfJointType::Fixed:
        type = JointType::Fixed;
        break;
    }
    const Mat3d r = rpy_to_rotation(joint.origin_rpy.x(), joint.origin_rpy.y(),
                                    joint.origin_rpy.z());
    JointSpec& spec = desc.add_joint(joint.name, type, joint.parent_link,
                                     joint.child_link,
                                     SpatialTransform(r, joint.origin_xyz),
                                     joint.axis);
    spec.limits = joint.limits;
  }
  return desc;
}

RobotModel load_model(const std::string& path) {
  return build_model(to_description(parse_urdf_file(path)));
}

RobotModel load_model_from_string(std::string_view text) {
  return build_model(to_description(parse_urdf(text)));
}

}  // namespace vecdyn::urdf
