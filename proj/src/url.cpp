#include "grasp/url.hpp"

#include <algorithm>
#include <cctype>

namespace grasp {
namespace {

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool valid_scheme(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
  });
}

// Length of the scheme (excluding ':') if the reference starts with one.
std::optional<std::size_t> scheme_length(std::string_view ref) {
  const auto colon = ref.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  const auto delim = ref.find_first_of("/?#");
  if (delim != std::string_view::npos && delim < colon) return std::nullopt;
  if (!valid_scheme(ref.substr(0, colon))) return std::nullopt;
  return colon;
}

struct Parts {
  std::optional<std::string> scheme;
  std::optional<std::string> authority;
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;
};

Parts split_reference(std::string_view ref) {
  Parts p;
  if (const auto frag = ref.find('#'); frag != std::string_view::npos) {
    p.fragment = std::string(ref.substr(frag + 1));
    ref = ref.substr(0, frag);
  }
  if (const auto q = ref.find('?'); q != std::string_view::npos) {
    p.query = std::string(ref.substr(q + 1));
    ref = ref.substr(0, q);
  }
  if (const auto len = scheme_length(ref)) {
    p.scheme = to_lower(ref.substr(0, *len));
    ref = ref.substr(*len + 1);
  }
  if (ref.starts_with("//")) {
    ref = ref.substr(2);
    const auto slash = ref.find('/');
    p.authority = std::string(ref.substr(0, slash));
    ref = slash == std::string_view::npos ? std::string_view{} : ref.substr(slash);
  }
  p.path = std::string(ref);
  return p;
}

bool set_authority(Url& url, std::string_view authority) {
  if (const auto at = authority.rfind('@'); at != std::string_view::npos) {
    authority = authority.substr(at + 1);
  }
  std::string_view host = authority;
  std::string_view port;
  if (authority.starts_with("[")) {
    const auto close = authority.find(']');
    if (close == std::string_view::npos) return false;
    host = authority.substr(0, close + 1);
    const auto rest = authority.substr(close + 1);
    if (rest.starts_with(":")) port = rest.substr(1);
  } else if (const auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    host = authority.substr(0, colon);
    port = authority.substr(colon + 1);
  }
  if (host.empty()) return false;
  if (!std::all_of(port.begin(), port.end(),
                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    return false;
  }
  url.host = to_lower(host);
  url.port = std::string(port);
  return true;
}

std::string merge_paths(const Url& base, std::string_view ref_path) {
  if (base.path.empty()) return "/" + std::string(ref_path);
  const auto slash = base.path.rfind('/');
  return base.path.substr(0, slash + 1) + std::string(ref_path);
}

}  // namespace

std::optional<Url> Url::parse(std::string_view text) {
  // Surrounding whitespace is common in scraped attributes.
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  Parts p = split_reference(text);
  if (!p.scheme || !p.authority) return std::nullopt;
  Url url;
  url.scheme = *p.scheme;
  if (!set_authority(url, *p.authority)) return std::nullopt;
  url.path = remove_dot_segments(p.path);
  if (url.path.empty() && url.is_http()) url.path = "/";
  url.query = std::move(p.query);
  url.fragment = std::move(p.fragment);
  return url;
}

std::string Url::authority() const { return port.empty() ? host : host + ":" + port; }

std::string Url::origin() const { return scheme + "://" + authority(); }

std::string Url::to_string() const {
  std::string out = without_fragment();
  if (fragment) out += "#" + *fragment;
  return out;
}

std::string Url::without_fragment() const {
  std::string out = origin() + path;
  if (query) out += "?" + *query;
  return out;
}

std::string remove_dot_segments(std::string_view path) {
  std::string input(path);
  std::string output;
  while (!input.empty()) {
    if (input.starts_with("../")) {
      input.erase(0, 3);
    } else if (input.starts_with("./")) {
      input.erase(0, 2);
    } else if (input.starts_with("/./")) {
      input.replace(0, 3, "/");
    } else if (input == "/.") {
      input = "/";
    } else if (input.starts_with("/../") || input == "/..") {
      if (input == "/..") {
        input = "/";
      } else {
        input.replace(0, 4, "/");
      }
      const auto slash = output.rfind('/');
      output.erase(slash == std::string::npos ? 0 : slash);
    } else if (input == "." || input == "..") {
      input.clear();
    } else {
      const auto next = input.find('/', input[0] == '/' ? 1 : 0);
      const auto len = next == std::string::npos ? input.size() : next;
      output += input.substr(0, len);
      input.erase(0, len);
    }
  }
  return output;
}

std::optional<Url> resolve_reference(const Url& base, std::string_view reference) {
  while (!reference.empty() && std::isspace(static_cast<unsigned char>(reference.front()))) {
    reference.remove_prefix(1);
  }
  while (!reference.empty() && std::isspace(static_cast<unsigned char>(reference.back()))) {
    reference.remove_suffix(1);
  }
  Parts r = split_reference(reference);
  Url target;
  if (r.scheme) {
    if (!r.authority) {
      // Scheme-only references (mailto:, javascript:, ...) have no authority.
      // They are representable only as opaque strings; callers drop them.
      target.scheme = *r.scheme;
      target.path = r.path;
      target.query = r.query;
      target.fragment = r.fragment;
      return target;
    }
    target.scheme = *r.scheme;
    if (!set_authority(target, *r.authority)) return std::nullopt;
    target.path = remove_dot_segments(r.path);
    target.query = r.query;
  } else if (r.authority) {
    target.scheme = base.scheme;
    if (!set_authority(target, *r.authority)) return std::nullopt;
    target.path = remove_dot_segments(r.path);
    target.query = r.query;
  } else {
    target.scheme = base.scheme;
    target.host = base.host;
    target.port = base.port;
    if (r.path.empty()) {
      target.path = base.path;
      target.query = r.query ? r.query : base.query;
    } else {
      target.path = r.path.starts_with("/") ? remove_dot_segments(r.path)
                                            : remove_dot_segments(merge_paths(base, r.path));
      target.query = r.query;
    }
  }
  if (target.path.empty() && target.is_http()) target.path = "/";
  target.fragment = r.fragment;
  return target;
}

}  // namespace grasp
