#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace grasp {

// Absolute URL split into its generic components. Scheme and host are
// lowercased on parse; everything else is kept verbatim.
struct Url {
  std::string scheme;
  std::string host;
  std::string port;  // empty when absent
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;

  // Parses an absolute URL with an authority component. Returns nullopt for
  // relative references or unparseable input.
  static std::optional<Url> parse(std::string_view text);

  std::string authority() const;
  std::string origin() const;  // scheme://authority
  std::string to_string() const;
  std::string without_fragment() const;
  bool is_http() const { return scheme == "http" || scheme == "https"; }
};

// Resolves a URI reference against an absolute base (generic-syntax
// resolution with dot-segment removal). Returns nullopt if the reference is
// malformed.
std::optional<Url> resolve_reference(const Url& base, std::string_view reference);

std::string remove_dot_segments(std::string_view path);

}  // namespace grasp
