#pragma once

#include <cctype>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "hsieve/errors.hpp"
#include "hsieve/permutation.hpp"

namespace hsieve {

struct GroupSpec;

struct CyclicSpec {
  std::size_t n;
};
struct DihedralSpec {
  std::size_t n;  // number of rotations; the group has order 2n
};
struct SymmetricSpec {
  std::size_t n;
};
struct ElementaryAbelian2Spec {
  std::size_t n;  // Z_2^n
};
struct DirectProductSpec {
  std::shared_ptr<const GroupSpec> left;
  std::shared_ptr<const GroupSpec> right;
};
struct PermGensSpec {
  std::vector<Permutation> gens;
  std::size_t degree = 0;
};

// Parsed description of a finite group.
struct GroupSpec {
  std::variant<CyclicSpec, DihedralSpec, SymmetricSpec, ElementaryAbelian2Spec, DirectProductSpec,
               PermGensSpec>
      kind;

  static GroupSpec cyclic(std::size_t n) { return {CyclicSpec{n}}; }
  static GroupSpec dihedral(std::size_t n) { return {DihedralSpec{n}}; }
  static GroupSpec symmetric(std::size_t n) { return {SymmetricSpec{n}}; }
  static GroupSpec elementary_abelian2(std::size_t n) { return {ElementaryAbelian2Spec{n}}; }
  static GroupSpec product(GroupSpec a, GroupSpec b) {
    return {DirectProductSpec{std::make_shared<const GroupSpec>(std::move(a)),
                              std::make_shared<const GroupSpec>(std::move(b))}};
  }
  // Generators must all act on the same domain; a mismatch is a SpecError.
  static GroupSpec perm_gens(std::vector<Permutation> gens) {
    if (gens.empty()) throw SpecError("perm: at least one generator required");
    const std::size_t degree = gens.front().size();
    for (const auto& g : gens) {
      if (g.size() != degree) throw SpecError("perm: generators act on mismatched domains");
      if (!is_permutation(g)) throw SpecError("perm: generator is not a permutation");
    }
    if (degree == 0) throw SpecError("perm: empty domain");
    return {PermGensSpec{std::move(gens), degree}};
  }

  // Canonical DSL rendering; parse_group_spec(to_string()) round-trips.
  std::string to_string() const {
    struct Visitor {
      std::string operator()(const CyclicSpec& s) const { return "Z:" + std::to_string(s.n); }
      std::string operator()(const DihedralSpec& s) const { return "D:" + std::to_string(s.n); }
      std::string operator()(const SymmetricSpec& s) const { return "S:" + std::to_string(s.n); }
      std::string operator()(const ElementaryAbelian2Spec& s) const {
        return "Z2^" + std::to_string(s.n);
      }
      std::string operator()(const DirectProductSpec& s) const {
        return "prod(" + s.left->to_string() + "," + s.right->to_string() + ")";
      }
      std::string operator()(const PermGensSpec& s) const {
        std::string out = "perm[";
        for (std::size_t i = 0; i < s.gens.size(); ++i) {
          if (i) out += ", ";
          out += to_cycle_string(s.gens[i]);
        }
        return out + "]";
      }
    };
    return std::visit(Visitor{}, kind);
  }
};

namespace detail {

class SpecParser {
 public:
  explicit SpecParser(const std::string& text) : s_(text) {}

  GroupSpec parse_all() {
    GroupSpec spec = parse_spec();
    skip_spaces(s_, pos_);
    if (pos_ != s_.size()) fail("trailing characters");
    return spec;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw SpecError("group spec '" + s_ + "': " + what + " at position " + std::to_string(pos_));
  }

  bool consume(const std::string& token) {
    skip_spaces(s_, pos_);
    if (s_.compare(pos_, token.size(), token) == 0) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(const std::string& token) {
    if (!consume(token)) fail("expected '" + token + "'");
  }

  std::size_t parse_positive() {
    skip_spaces(s_, pos_);
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
      fail("expected a positive integer");
    std::uint64_t v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + static_cast<std::uint64_t>(s_[pos_] - '0');
      if (v > 1'000'000'000ULL) fail("integer too large");
      ++pos_;
    }
    if (v == 0) fail("n must be at least 1");
    return static_cast<std::size_t>(v);
  }

  GroupSpec parse_spec() {
    if (consume("Z2^")) return GroupSpec::elementary_abelian2(parse_positive());
    if (consume("Z:")) return GroupSpec::cyclic(parse_positive());
    if (consume("D:")) return GroupSpec::dihedral(parse_positive());
    if (consume("S:")) return GroupSpec::symmetric(parse_positive());
    if (consume("prod(")) {
      GroupSpec a = parse_spec();
      expect(",");
      GroupSpec b = parse_spec();
      expect(")");
      return GroupSpec::product(std::move(a), std::move(b));
    }
    if (consume("perm[")) return parse_perm_list();
    fail("unknown group constructor");
  }

  GroupSpec parse_perm_list() {
    std::vector<std::vector<std::vector<std::uint32_t>>> raw;
    for (;;) {
      try {
        raw.push_back(parse_cycles(s_, pos_));
      } catch (const SpecError& e) {
        fail(e.what());
      }
      if (consume(",")) continue;
      expect("]");
      break;
    }
    std::uint32_t degree = 1;
    for (const auto& cycles : raw) degree = std::max(degree, max_point(cycles));
    std::vector<Permutation> gens;
    for (const auto& cycles : raw) gens.push_back(permutation_from_cycles(cycles, degree));
    return GroupSpec::perm_gens(std::move(gens));
  }

  std::string s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Parses the group DSL: `Z:n`, `D:n`, `S:n`, `Z2^n`, `prod(a,b)`,
// `perm[(1 2)(3 4), (1 3)]`. Throws SpecError on malformed input.
inline GroupSpec parse_group_spec(const std::string& text) {
  return detail::SpecParser(text).parse_all();
}

}  // namespace hsieve
