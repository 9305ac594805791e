#include "vecdyn/xml.hpp"

#include <cctype>

namespace vecdyn::xml {

const std::string* Element::find_attribute(std::string_view attr_name) const {
  for (const Attribute& a : attributes) {
    if (a.name == attr_name) {
      return &a.value;
    }
  }
  return nullptr;
}

const Element* Element::find_child(std::string_view tag) const {
  for (const Element& c : children) {
    if (c.name == tag) {
      return &c;
    }
  }
  return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view tag) const {
  std::vector<const Element*> out;
  for (const Element& c : children) {
    if (c.name == tag) {
      out.push_back(&c);
    }
  }
  return out;
}

namespace {

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool is_name_char(char c) {
  return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) ||
         c == '-' || c == '.';
}

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  bool starts_with(std::string_view s) const {
    return text_.compare(pos_, s.size(), s) == 0;
  }
  int line() const { return line_; }
  int column() const { return column_; }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  void advance(size_t count) {
    for (size_t i = 0; i < count && !eof(); ++i) {
      advance();
    }
  }

  void skip_whitespace() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) {
      advance();
    }
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, line_, column_);
  }

  void expect(char c) {
    if (eof() || peek() != c) {
      fail(std::string("expected '") + c + "'");
    }
    advance();
  }

  std::string read_name() {
    if (eof() || !is_name_start(peek())) {
      fail("expected a name");
    }
    std::string name;
    while (!eof() && is_name_char(peek())) {
      name.push_back(advance());
    }
    return name;
  }

  std::string read_attribute_value() {
    if (eof() || (peek() != '"' && peek() != '\'')) {
      fail("expected a quoted attribute value");
    }
    const char quote = advance();
    std::string value;
    while (true) {
      if (eof()) {
        fail("unterminated attribute value");
      }
      char c = peek();
      if (c == quote) {
        advance();
        return value;
      }
      if (c == '<') {
        fail("'<' is not allowed in attribute values");
      }
      if (c == '&') {
        value += read_entity();
      } else {
        value.push_back(advance());
      }
    }
  }

  std::string read_entity() {
    const int at_line = line_, at_col = column_;
    advance();  // '&'
    std::string entity;
    while (!eof() && peek() != ';') {
      entity.push_back(advance());
      if (entity.size() > 10) {
        throw ParseError("malformed entity reference", at_line, at_col);
      }
    }
    if (eof()) {
      throw ParseError("unterminated entity reference", at_line, at_col);
    }
    advance();  // ';'
    if (entity == "amp") return "&";
    if (entity == "lt") return "<";
    if (entity == "gt") return ">";
    if (entity == "quot") return "\"";
    if (entity == "apos") return "'";
    if (!entity.empty() && entity[0] == '#') {
      const bool hex = entity.size() > 1 && (entity[1] == 'x' || entity[1] == 'X');
      try {
        const unsigned long code =
            std::stoul(entity.substr(hex ? 2 : 1), nullptr, hex ? 16 : 10);
        if (code == 0 || code > 0x10FFFF) {
          throw ParseError("character reference out of range", at_line, at_col);
        }
        // Encode as UTF-8.
        std::string out;
        if (code < 0x80) {
          out.push_back(static_cast<char>(code));
        } else if (code < 0x800) {
          out.push_back(static_cast<char>(0xC0 | (code >> 6)));
          out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
        } else if (code < 0x10000) {
          out.push_back(static_cast<char>(0xE0 | (code >> 12)));
          out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
          out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
        } else {
          out.push_back(static_cast<char>(0xF0 | (code >> 18)));
          out.push_back(static_cast<char>(0x80 | ((code >> 12) & 0x3F)));
          out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
          out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
        }
        return out;
      } catch (const std::invalid_argument&) {
        throw ParseError("malformed character reference", at_line, at_col);
      } catch (const std::out_of_range&) {
        throw ParseError("character reference out of range", at_line, at_col);
      }
    }
    throw ParseError("unknown entity '&" + entity + ";'", at_line, at_col);
  }

  void skip_until(std::string_view terminator, const char* what) {
    const int at_line = line_, at_col = column_;
    while (!eof()) {
      if (starts_with(terminator)) {
        advance(terminator.size());
        return;
      }
      advance();
    }
    throw ParseError(std::string("unterminated ") + what, at_line, at_col);
  }

 private:
  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : cursor_(text) {}

  Element parse_document() {
    skip_misc(/*allow_doctype_rejection=*/true);
    if (cursor_.eof()) {
      cursor_.fail("document has no root element");
    }
    Element root = parse_element();
    skip_misc(false);
    if (!cursor_.eof()) {
      cursor_.fail("content after the root element");
    }
    return root;
  }

 private:
  // Whitespace, comments, and processing instructions between markup.
  void skip_misc(bool allow_doctype_rejection) {
    while (true) {
      cursor_.skip_whitespace();
      if (cursor_.starts_with("<!--")) {
        cursor_.advance(4);
        cursor_.skip_until("-->", "comment");
      } else if (cursor_.starts_with("<?")) {
        cursor_.advance(2);
        cursor_.skip_until("?>", "processing instruction");
      } else if (allow_doctype_rejection && cursor_.starts_with("<!DOCTYPE")) {
        cursor_.fail("DOCTYPE declarations are not supported");
      } else {
        return;
      }
    }
  }

  Element parse_element() {
    Element element;
    element.line = cursor_.line();
    element.column = cursor_.column();
    cursor_.expect('<');
    element.name = cursor_.read_name();

    while (true) {
      cursor_.skip_whitespace();
      if (cursor_.eof()) {
        cursor_.fail("unterminated start tag <" + element.name + ">");
      }
      if (cursor_.peek() == '>') {
        cursor_.advance();
        parse_content(element);
        return element;
      }
      if (cursor_.starts_with("/>")) {
        cursor_.advance(2);
        return element;
      }
      Attribute attr;
      attr.name = cursor_.read_name();
      cursor_.skip_whitespace();
      cursor_.expect('=');
      cursor_.skip_whitespace();
      attr.value = cursor_.read_attribute_value();
      for (const Attribute& existing : element.attributes) {
        if (existing.name == attr.name) {
          cursor_.fail("duplicate attribute '" + attr.name + "'");
        }
      }
      element.attributes.push_back(std::move(attr));
    }
  }

  void parse_content(Element& element) {
    while (true) {
      if (cursor_.eof()) {
        cursor_.fail("missing end tag </" + element.name + ">");
      }
      if (cursor_.starts_with("</")) {
        const int at_line = cursor_.line(), at_col = cursor_.column();
        cursor_.advance(2);
        const std::string closing = cursor_.read_name();
        if (closing != element.name) {
          throw ParseError("mismatched end tag </" + closing + ">; expected </" +
                               element.name + ">",
                           at_line, at_col);
        }
        cursor_.skip_whitespace();
        cursor_.expect('>');
        return;
      }
      if (cursor_.starts_with("<!--")) {
        cursor_.advance(4);
        cursor_.skip_until("-->", "comment");
      } else if (cursor_.starts_with("<![CDATA[")) {
        cursor_.advance(9);
        cursor_.skip_until("]]>", "CDATA section");
      } else if (cursor_.starts_with("<?")) {
        cursor_.advance(2);
        cursor_.skip_until("?>", "processing instruction");
      } else if (cursor_.peek() == '<') {
        element.children.push_back(parse_element());
      } else if (cursor_.peek() == '&') {
        cursor_.read_entity();  // validated, content discarded
      } else {
        cursor_.advance();  // text content is not retained
      }
    }
  }

  Cursor cursor_;
};

}  // namespace

Element parse(std::string_view text) { return Parser(text).parse_document(); }

}  // namespace vecdyn::xml
