#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace grasp::html {

// Best-effort HTML tokenizer. It never throws: malformed markup degrades to
// text or is skipped. Tag and attribute names are lowercased; attribute
// values have the common character references decoded.
struct Token {
  enum class Kind { kStartTag, kEndTag, kText };

  Kind kind = Kind::kText;
  std::string name;  // tag name, empty for text
  std::vector<std::pair<std::string, std::string>> attributes;
  bool self_closing = false;
  std::string text;  // raw character data for kText

  const std::string* attribute(std::string_view key) const;
};

std::vector<Token> tokenize(std::string_view source);

// Elements that never have content (<br>, <img>, ...).
bool is_void_element(std::string_view tag);

// Per-element view of the document after the usual stack repair: end tags
// close the nearest open element of the same name, stray end tags are
// ignored, and anything still open at EOF is closed.
struct Element {
  std::string tag;
  int parent = -1;  // index into the element list, -1 for roots
  int depth = 1;    // roots have depth 1
  int child_count = 0;
};

std::vector<Element> build_tree(const std::vector<Token>& tokens);

// Whitespace-split tokens of the character data outside <script>/<style>.
std::vector<std::string> text_words(const std::vector<Token>& tokens);

}  // namespace grasp::html
