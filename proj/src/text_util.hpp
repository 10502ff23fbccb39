#pragma once

// Small helpers shared by the text readers and report writers.

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "genpoly/errors.hpp"

namespace genpoly::text {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline long long parse_int(std::string_view s) {
  s = trim(s);
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParseError("expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

inline std::uint64_t parse_u64(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParseError("expected an unsigned integer, got '" + std::string(s) + "'");
  }
  return v;
}

inline double parse_double(std::string_view s) {
  s = trim(s);
  // Accept rationals "a/b" as well as decimals.
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    double num = parse_double(s.substr(0, slash));
    double den = parse_double(s.substr(slash + 1));
    if (den == 0.0) throw ParseError("zero denominator in '" + std::string(s) + "'");
    return num / den;
  }
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParseError("expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

/// 1-based comma list "1,3" -> 0-based {0,2}. Empty string -> {}.
inline std::vector<int> parse_index_list(std::string_view s) {
  std::vector<int> out;
  s = trim(s);
  if (s.empty()) return out;
  for (auto part : split(s, ',')) {
    long long v = parse_int(part);
    if (v < 1) throw ParseError("coordinates are 1-based, got " + std::to_string(v));
    out.push_back(static_cast<int>(v - 1));
  }
  return out;
}

/// Shortest round-trip decimal representation.
inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

/// Parses "key=value" tokens; bare tokens are stored with an empty value.
inline std::map<std::string, std::string, std::less<>> key_values(
    const std::vector<std::string_view>& toks, std::size_t first = 0) {
  std::map<std::string, std::string, std::less<>> kv;
  for (std::size_t i = first; i < toks.size(); ++i) {
    auto eq = toks[i].find('=');
    if (eq == std::string_view::npos) {
      kv.emplace(std::string(toks[i]), std::string());
    } else {
      kv.emplace(std::string(toks[i].substr(0, eq)), std::string(toks[i].substr(eq + 1)));
    }
  }
  return kv;
}

template <class Map>
std::string_view require(const Map& kv, std::string_view key, std::string_view context) {
  auto it = kv.find(key);
  if (it == kv.end()) {
    throw ParseError(std::string(context) + ": missing '" + std::string(key) + "='");
  }
  return it->second;
}

}  // namespace genpoly::text
