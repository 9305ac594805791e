#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vecdyn/errors.hpp"

namespace vecdyn::xml {

struct Attribute {
  std::string name;
  std::string value;
};

/// A parsed XML element. Text content is not retained; the formats this
/// library reads are attribute-only.
struct Element {
  std::string name;
  std::vector<Attribute> attributes;
  std::vector<Element> children;
  int line = 0;
  int column = 0;

  /// Attribute value or nullptr when absent.
  const std::string* find_attribute(std::string_view attr_name) const;

  /// First child with the given tag name, or nullptr.
  const Element* find_child(std::string_view tag) const;

  std::vector<const Element*> children_named(std::string_view tag) const;
};

/// Minimal non-validating XML reader: elements, attributes, comments,
/// processing instructions, CDATA, and the five predefined entities plus
/// numeric character references. DTDs are rejected. Throws ParseError with
/// 1-based line/column on malformed input.
Element parse(std::string_view text);

}  // namespace vecdyn::xml
