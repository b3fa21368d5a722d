#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "hsieve/errors.hpp"

namespace hsieve {

// A permutation of {0, ..., n-1} stored as its image array.
using Permutation = std::vector<std::uint32_t>;

inline Permutation identity_permutation(std::size_t degree) {
  Permutation p(degree);
  for (std::size_t i = 0; i < degree; ++i) p[i] = static_cast<std::uint32_t>(i);
  return p;
}

// (a * b)(x) = a(b(x)): b acts first.
inline Permutation compose(const Permutation& a, const Permutation& b) {
  Permutation out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = a[b[i]];
  return out;
}

inline Permutation inverse(const Permutation& p) {
  Permutation out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[p[i]] = static_cast<std::uint32_t>(i);
  return out;
}

inline bool is_permutation(const Permutation& p) {
  std::vector<bool> seen(p.size(), false);
  for (auto x : p) {
    if (x >= p.size() || seen[x]) return false;
    seen[x] = true;
  }
  return true;
}

// Disjoint cycle notation with 1-based points, e.g. "(1 2)(3 4)"; "()" for
// the identity. Cycles are listed by smallest point.
inline std::string to_cycle_string(const Permutation& p) {
  std::string out;
  std::vector<bool> done(p.size(), false);
  for (std::size_t start = 0; start < p.size(); ++start) {
    if (done[start] || p[start] == start) continue;
    out += '(';
    std::size_t x = start;
    bool first = true;
    while (!done[x]) {
      done[x] = true;
      if (!first) out += ' ';
      out += std::to_string(x + 1);
      first = false;
      x = p[x];
    }
    out += ')';
  }
  return out.empty() ? "()" : out;
}

namespace detail {

inline void skip_spaces(const std::string& s, std::size_t& pos) {
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
}

}  // namespace detail

// Parses disjoint cycles "(1 2 3)(4 5)" (points 1-based, separated by spaces
// or commas) starting at `pos`. Returns the cycles as 0-based point lists and
// advances `pos` past the last cycle.
inline std::vector<std::vector<std::uint32_t>> parse_cycles(const std::string& s,
                                                            std::size_t& pos) {
  std::vector<std::vector<std::uint32_t>> cycles;
  detail::skip_spaces(s, pos);
  if (pos >= s.size() || s[pos] != '(') throw SpecError("expected '(' in cycle notation: " + s);
  while (pos < s.size() && s[pos] == '(') {
    ++pos;
    std::vector<std::uint32_t> cycle;
    for (;;) {
      detail::skip_spaces(s, pos);
      if (pos < s.size() && s[pos] == ')') {
        ++pos;
        break;
      }
      if (pos < s.size() && s[pos] == ',' && !cycle.empty()) {
        ++pos;
        continue;
      }
      if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) {
        throw SpecError("malformed cycle in: " + s);
      }
      std::uint64_t v = 0;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        v = v * 10 + static_cast<std::uint64_t>(s[pos] - '0');
        if (v > 1000000) throw SpecError("cycle point too large in: " + s);
        ++pos;
      }
      if (v == 0) throw SpecError("cycle points are 1-based: " + s);
      cycle.push_back(static_cast<std::uint32_t>(v - 1));
    }
    if (!cycle.empty()) cycles.push_back(std::move(cycle));
    detail::skip_spaces(s, pos);
  }
  return cycles;
}

// Builds a permutation of the given degree from disjoint cycles. Points must
// be distinct and below `degree`.
inline Permutation permutation_from_cycles(const std::vector<std::vector<std::uint32_t>>& cycles,
                                           std::size_t degree) {
  Permutation p = identity_permutation(degree);
  std::vector<bool> used(degree, false);
  for (const auto& cycle : cycles) {
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      const auto x = cycle[i];
      if (x >= degree) throw SpecError("cycle point exceeds permutation degree");
      if (used[x]) throw SpecError("cycles are not disjoint");
      used[x] = true;
      p[x] = cycle[(i + 1) % cycle.size()];
    }
  }
  return p;
}

inline std::uint32_t max_point(const std::vector<std::vector<std::uint32_t>>& cycles) {
  std::uint32_t m = 0;
  for (const auto& c : cycles)
    for (auto x : c) m = std::max(m, x + 1);
  return m;
}

}  // namespace hsieve
