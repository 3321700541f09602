#include "grasp/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>

namespace grasp::html {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':' ||
         c == '.';
}

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower);
  return out;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x110000) {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Decodes the handful of references that matter for href values.
std::string decode_references(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    if (in[i] != '&') {
      out.push_back(in[i++]);
      continue;
    }
    const auto semi = in.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back(in[i++]);
      continue;
    }
    const std::string_view ref = in.substr(i + 1, semi - i - 1);
    bool decoded = true;
    if (ref == "amp") {
      out.push_back('&');
    } else if (ref == "lt") {
      out.push_back('<');
    } else if (ref == "gt") {
      out.push_back('>');
    } else if (ref == "quot") {
      out.push_back('"');
    } else if (ref == "apos") {
      out.push_back('\'');
    } else if (!ref.empty() && ref[0] == '#') {
      std::uint32_t cp = 0;
      const bool hex = ref.size() > 1 && (ref[1] == 'x' || ref[1] == 'X');
      const std::string_view digits = ref.substr(hex ? 2 : 1);
      decoded = !digits.empty();
      for (char c : digits) {
        const int v = std::isdigit(static_cast<unsigned char>(c))           ? c - '0'
                      : hex && std::isxdigit(static_cast<unsigned char>(c)) ? lower(c) - 'a' + 10
                                                                            : -1;
        if (v < 0 || cp > 0x10FFFF) {
          decoded = false;
          break;
        }
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
      }
      if (decoded) append_utf8(out, cp);
    } else {
      decoded = false;
    }
    if (decoded) {
      i = semi + 1;
    } else {
      out.push_back(in[i++]);
    }
  }
  return out;
}

// Case-insensitive search for "</tag" starting at pos.
std::size_t find_raw_text_end(std::string_view src, std::size_t pos, std::string_view tag) {
  while (pos < src.size()) {
    const auto lt = src.find("</", pos);
    if (lt == std::string_view::npos) return src.size();
    bool match = lt + 2 + tag.size() <= src.size();
    for (std::size_t k = 0; match && k < tag.size(); ++k) {
      match = lower(src[lt + 2 + k]) == tag[k];
    }
    if (match) return lt;
    pos = lt + 2;
  }
  return src.size();
}

class Scanner {
 public:
  explicit Scanner(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    while (pos_ < src_.size()) {
      const auto lt = src_.find('<', pos_);
      if (lt == std::string_view::npos) {
        emit_text(src_.substr(pos_));
        break;
      }
      if (lt > pos_) emit_text(src_.substr(pos_, lt - pos_));
      pos_ = lt;
      scan_markup();
    }
    return std::move(tokens_);
  }

 private:
  void emit_text(std::string_view text) {
    if (text.empty()) return;
    if (!tokens_.empty() && tokens_.back().kind == Token::Kind::kText) {
      tokens_.back().text.append(text);
      return;
    }
    Token t;
    t.kind = Token::Kind::kText;
    t.text = std::string(text);
    tokens_.push_back(std::move(t));
  }

  void skip_past(std::string_view terminator) {
    const auto end = src_.find(terminator, pos_);
    pos_ = end == std::string_view::npos ? src_.size() : end + terminator.size();
  }

  void scan_markup() {
    const std::string_view rest = src_.substr(pos_);
    if (rest.starts_with("<!--")) {
      pos_ += 4;
      skip_past("-->");
      return;
    }
    if (rest.starts_with("<!") || rest.starts_with("<?")) {
      skip_past(">");
      return;
    }
    if (rest.starts_with("</")) {
      std::size_t p = pos_ + 2;
      const std::size_t start = p;
      while (p < src_.size() && is_name_char(src_[p])) ++p;
      if (p == start) {
        // "</" followed by junk: bogus comment.
        skip_past(">");
        return;
      }
      Token t;
      t.kind = Token::Kind::kEndTag;
      t.name = to_lower(src_.substr(start, p - start));
      tokens_.push_back(std::move(t));
      pos_ = p;
      skip_past(">");
      return;
    }
    std::size_t p = pos_ + 1;
    if (p >= src_.size() || !std::isalpha(static_cast<unsigned char>(src_[p]))) {
      emit_text("<");
      ++pos_;
      return;
    }
    const std::size_t start = p;
    while (p < src_.size() && is_name_char(src_[p])) ++p;
    Token t;
    t.kind = Token::Kind::kStartTag;
    t.name = to_lower(src_.substr(start, p - start));
    pos_ = p;
    scan_attributes(t);
    const std::string name = t.name;
    const bool raw = !t.self_closing && (name == "script" || name == "style");
    tokens_.push_back(std::move(t));
    if (raw) {
      const auto end = find_raw_text_end(src_, pos_, name);
      emit_raw(src_.substr(pos_, end - pos_));
      pos_ = end;
    }
  }

  // Raw text of script/style is kept as its own token so that consumers can
  // tell it apart from visible text.
  void emit_raw(std::string_view text) {
    if (text.empty()) return;
    Token t;
    t.kind = Token::Kind::kText;
    t.text = std::string(text);
    tokens_.push_back(std::move(t));
  }

  void scan_attributes(Token& t) {
    while (pos_ < src_.size()) {
      while (pos_ < src_.size() && is_space(src_[pos_])) ++pos_;
      if (pos_ >= src_.size()) return;
      const char c = src_[pos_];
      if (c == '>') {
        ++pos_;
        return;
      }
      if (c == '/') {
        ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '>') {
          t.self_closing = true;
          ++pos_;
          return;
        }
        continue;
      }
      const std::size_t name_start = pos_;
      while (pos_ < src_.size() && !is_space(src_[pos_]) && src_[pos_] != '=' &&
             src_[pos_] != '>' && !(src_[pos_] == '/' && pos_ + 1 < src_.size() &&
                                    src_[pos_ + 1] == '>')) {
        ++pos_;
      }
      std::string key = to_lower(src_.substr(name_start, pos_ - name_start));
      while (pos_ < src_.size() && is_space(src_[pos_])) ++pos_;
      std::string value;
      if (pos_ < src_.size() && src_[pos_] == '=') {
        ++pos_;
        while (pos_ < src_.size() && is_space(src_[pos_])) ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'')) {
          const char quote = src_[pos_++];
          const auto end = src_.find(quote, pos_);
          const auto stop = end == std::string_view::npos ? src_.size() : end;
          value = decode_references(src_.substr(pos_, stop - pos_));
          pos_ = stop == src_.size() ? stop : stop + 1;
        } else {
          const std::size_t vstart = pos_;
          while (pos_ < src_.size() && !is_space(src_[pos_]) && src_[pos_] != '>') ++pos_;
          value = decode_references(src_.substr(vstart, pos_ - vstart));
        }
      }
      if (!key.empty()) t.attributes.emplace_back(std::move(key), std::move(value));
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::vector<Token> tokens_;
};

}  // namespace

const std::string* Token::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::vector<Token> tokenize(std::string_view source) { return Scanner(source).run(); }

bool is_void_element(std::string_view tag) {
  static constexpr std::array<std::string_view, 14> kVoid = {
      "area", "base", "br",   "col",  "embed",  "hr",    "img",
      "input", "link", "meta", "param", "source", "track", "wbr"};
  return std::find(kVoid.begin(), kVoid.end(), tag) != kVoid.end();
}

std::vector<Element> build_tree(const std::vector<Token>& tokens) {
  std::vector<Element> elements;
  std::vector<int> open;
  for (const auto& tok : tokens) {
    if (tok.kind == Token::Kind::kStartTag) {
      Element e;
      e.tag = tok.name;
      e.parent = open.empty() ? -1 : open.back();
      e.depth = static_cast<int>(open.size()) + 1;
      if (e.parent >= 0) ++elements[static_cast<std::size_t>(e.parent)].child_count;
      elements.push_back(std::move(e));
      if (!tok.self_closing && !is_void_element(tok.name)) {
        open.push_back(static_cast<int>(elements.size()) - 1);
      }
    } else if (tok.kind == Token::Kind::kEndTag) {
      for (auto it = open.rbegin(); it != open.rend(); ++it) {
        if (elements[static_cast<std::size_t>(*it)].tag == tok.name) {
          open.erase(std::next(it).base(), open.end());
          break;
        }
      }
    }
  }
  return elements;
}

std::vector<std::string> text_words(const std::vector<Token>& tokens) {
  std::vector<std::string> words;
  bool in_raw = false;
  for (const auto& tok : tokens) {
    if (tok.kind == Token::Kind::kStartTag) {
      in_raw = !tok.self_closing && (tok.name == "script" || tok.name == "style");
      continue;
    }
    if (tok.kind == Token::Kind::kEndTag) {
      in_raw = false;
      continue;
    }
    if (in_raw) continue;
    std::size_t i = 0;
    const std::string& s = tok.text;
    while (i < s.size()) {
      while (i < s.size() && is_space(s[i])) ++i;
      const std::size_t start = i;
      while (i < s.size() && !is_space(s[i])) ++i;
      if (i > start) words.emplace_back(s.substr(start, i - start));
    }
  }
  return words;
}

}  // namespace grasp::html
