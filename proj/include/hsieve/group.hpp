#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "hsieve/errors.hpp"
#include "hsieve/group_spec.hpp"
#include "hsieve/permutation.hpp"

namespace hsieve {

using Element = std::uint32_t;

inline constexpr std::size_t kDefaultMaxOrder = 5040;  // |S_7|

class GroupTable;

// Which constructor produced a group. Explicit irreducible matrices are only
// available for these families (see representations.hpp).
enum class FamilyKind { Cyclic, ElementaryAbelian2, Dihedral, Symmetric, DirectProduct, Permutation, Abstract };

inline std::string family_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::Cyclic: return "cyclic";
    case FamilyKind::ElementaryAbelian2: return "elementary-abelian-2";
    case FamilyKind::Dihedral: return "dihedral";
    case FamilyKind::Symmetric: return "symmetric";
    case FamilyKind::DirectProduct: return "direct-product";
    case FamilyKind::Permutation: return "permutation";
    case FamilyKind::Abstract: return "abstract";
  }
  return "unknown";
}

struct Family {
  FamilyKind kind = FamilyKind::Abstract;
  std::size_t n = 0;
  // Factors of a direct product; element index = left * |right| + right.
  std::shared_ptr<const GroupTable> left;
  std::shared_ptr<const GroupTable> right;
};

// A finite group materialized as a full multiplication table. Immutable after
// construction. Conjugacy classes are ordered by their smallest element, so
// the identity class is always class 0.
class GroupTable {
 public:
  // Builds a group from a Cayley table (row-major, mul[a * n + b] = a*b).
  // Throws SpecError if the table has no identity or lacks inverses.
  // Associativity is not checked here; see is_associative().
  GroupTable(std::size_t order, std::vector<Element> mul, std::vector<std::string> labels,
             Family family = {}, std::optional<std::vector<Permutation>> action = std::nullopt,
             std::string spec = {})
      : order_(order),
        mul_(std::move(mul)),
        labels_(std::move(labels)),
        family_(std::move(family)),
        action_(std::move(action)),
        spec_(std::move(spec)) {
    if (order_ == 0) throw SpecError("group must be nonempty");
    if (mul_.size() != order_ * order_) throw SpecError("multiplication table has wrong size");
    if (labels_.size() != order_) throw SpecError("label count does not match order");
    for (auto x : mul_)
      if (x >= order_) throw SpecError("multiplication table entry out of range");
    find_identity();
    find_inverses();
    compute_classes();
    for (std::size_t i = 0; i < order_; ++i) label_index_.emplace(labels_[i], static_cast<Element>(i));
    if (label_index_.size() != order_) throw SpecError("element labels must be unique");
  }

  std::size_t order() const { return order_; }
  Element identity() const { return identity_; }
  Element mul(Element a, Element b) const { return mul_[a * order_ + b]; }
  Element inv(Element a) const { return inverse_[a]; }
  Element conj(Element c, Element x) const { return mul(mul(c, x), inverse_[c]); }  // c x c^-1

  const std::string& label(Element a) const { return labels_[a]; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<Element> find_label(const std::string& label) const {
    auto it = label_index_.find(label);
    if (it == label_index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t num_classes() const { return classes_.size(); }
  const std::vector<std::vector<Element>>& classes() const { return classes_; }
  std::size_t class_of(Element a) const { return class_of_[a]; }
  Element class_representative(std::size_t c) const { return classes_[c].front(); }

  const Family& family() const { return family_; }
  const std::string& spec() const { return spec_; }

  bool has_permutation_action() const { return action_.has_value(); }
  std::size_t action_degree() const { return action_ ? action_->front().size() : 0; }
  // Permutation image of element a; requires has_permutation_action().
  const Permutation& action(Element a) const {
    if (!action_) throw DomainError("group has no permutation action");
    return (*action_)[a];
  }

  bool is_abelian() const {
    for (std::size_t a = 0; a < order_; ++a)
      for (std::size_t b = a + 1; b < order_; ++b)
        if (mul(a, b) != mul(b, a)) return false;
    return true;
  }

  // Full O(|G|^3) associativity check.
  bool is_associative() const {
    for (std::size_t a = 0; a < order_; ++a)
      for (std::size_t b = 0; b < order_; ++b) {
        const Element ab = mul(a, b);
        for (std::size_t c = 0; c < order_; ++c)
          if (mul(ab, c) != mul(a, mul(b, c))) return false;
      }
    return true;
  }

  // Order of the element a (smallest n >= 1 with a^n = e).
  std::size_t element_order(Element a) const {
    std::size_t n = 1;
    for (Element x = a; x != identity_; x = mul(x, a)) ++n;
    return n;
  }

 private:
  void find_identity() {
    for (std::size_t e = 0; e < order_; ++e) {
      bool ok = true;
      for (std::size_t a = 0; a < order_ && ok; ++a) ok = mul(e, a) == a && mul(a, e) == a;
      if (ok) {
        identity_ = static_cast<Element>(e);
        return;
      }
    }
    throw SpecError("multiplication table has no two-sided identity");
  }

  void find_inverses() {
    inverse_.assign(order_, 0);
    for (std::size_t a = 0; a < order_; ++a) {
      bool found = false;
      for (std::size_t b = 0; b < order_ && !found; ++b) {
        if (mul(a, b) == identity_ && mul(b, a) == identity_) {
          inverse_[a] = static_cast<Element>(b);
          found = true;
        }
      }
      if (!found) throw SpecError("element without inverse: " + labels_[a]);
    }
  }

  void compute_classes() {
    constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);
    class_of_.assign(order_, kUnassigned);
    for (std::size_t a = 0; a < order_; ++a) {
      if (class_of_[a] != kUnassigned) continue;
      std::vector<Element> cls;
      for (std::size_t c = 0; c < order_; ++c) {
        const Element x = conj(static_cast<Element>(c), static_cast<Element>(a));
        if (class_of_[x] == kUnassigned) {
          class_of_[x] = classes_.size();
          cls.push_back(x);
        }
      }
      std::sort(cls.begin(), cls.end());
      classes_.push_back(std::move(cls));
    }
  }

  std::size_t order_;
  std::vector<Element> mul_;
  std::vector<std::string> labels_;
  Family family_;
  std::optional<std::vector<Permutation>> action_;
  std::string spec_;
  Element identity_ = 0;
  std::vector<Element> inverse_;
  std::vector<std::vector<Element>> classes_;
  std::vector<std::size_t> class_of_;
  std::unordered_map<std::string, Element> label_index_;
};

namespace detail {

inline void check_cap(std::size_t order, std::size_t max_order, const std::string& what) {
  if (order > max_order)
    throw ResourceError(what + ": group order exceeds the cap " + std::to_string(max_order));
}

struct PermutationHash {
  std::size_t operator()(const Permutation& p) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (auto x : p) h = (h ^ x) * 1099511628211ULL;
    return h;
  }
};

// Table for a group given by its full, lexicographically sorted element list.
inline GroupTable table_from_permutations(std::vector<Permutation> elems, Family family,
                                          std::string spec) {
  const std::size_t n = elems.size();
  std::unordered_map<Permutation, Element, PermutationHash> index;
  index.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) index.emplace(elems[i], static_cast<Element>(i));
  std::vector<Element> mul(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) mul[a * n + b] = index.at(compose(elems[a], elems[b]));
  std::vector<std::string> labels;
  labels.reserve(n);
  for (const auto& p : elems) labels.push_back(to_cycle_string(p));
  return GroupTable(n, std::move(mul), std::move(labels), std::move(family), std::move(elems),
                    std::move(spec));
}

inline std::size_t factorial_capped(std::size_t n, std::size_t cap) {
  std::size_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) {
    f *= i;
    if (f > cap) return cap + 1;
  }
  return f;
}

}  // namespace detail

// Instantiates a GroupSpec as a multiplication table. Element orderings are
// canonical per constructor:
//   Z:n    -> 0..n-1, labels "k"
//   Z2^n   -> bitmasks, labels as n-bit strings (most significant bit first)
//   D:n    -> r^j s^f at index f*n + j, labels "(j,f)" (rotations first)
//   S:n, perm[...] -> permutations in lexicographic order of image arrays,
//                     labels in 1-based cycle notation
//   prod(a,b) -> pairs at index ia*|b| + ib, labels "[la,lb]"
// Throws ResourceError when the order exceeds max_order.
inline GroupTable build_group(const GroupSpec& spec, std::size_t max_order = kDefaultMaxOrder) {
  const std::string text = spec.to_string();
  if (const auto* c = std::get_if<CyclicSpec>(&spec.kind)) {
    const std::size_t n = c->n;
    detail::check_cap(n, max_order, text);
    std::vector<Element> mul(n * n);
    std::vector<std::string> labels;
    for (std::size_t a = 0; a < n; ++a) {
      labels.push_back(std::to_string(a));
      for (std::size_t b = 0; b < n; ++b) mul[a * n + b] = static_cast<Element>((a + b) % n);
    }
    return GroupTable(n, std::move(mul), std::move(labels), Family{FamilyKind::Cyclic, n, {}, {}},
                      std::nullopt, text);
  }
  if (const auto* e = std::get_if<ElementaryAbelian2Spec>(&spec.kind)) {
    if (e->n >= 63) throw ResourceError(text + " is above the order cap");
    const std::size_t n = std::size_t{1} << e->n;
    detail::check_cap(n, max_order, text);
    std::vector<Element> mul(n * n);
    std::vector<std::string> labels;
    for (std::size_t a = 0; a < n; ++a) {
      std::string bits(e->n, '0');
      for (std::size_t i = 0; i < e->n; ++i)
        if (a >> i & 1U) bits[e->n - 1 - i] = '1';
      labels.push_back(bits);
      for (std::size_t b = 0; b < n; ++b) mul[a * n + b] = static_cast<Element>(a ^ b);
    }
    return GroupTable(n, std::move(mul), std::move(labels),
                      Family{FamilyKind::ElementaryAbelian2, e->n, {}, {}}, std::nullopt, text);
  }
  if (const auto* d = std::get_if<DihedralSpec>(&spec.kind)) {
    const std::size_t n = d->n;
    detail::check_cap(2 * n, max_order, text);
    const std::size_t order = 2 * n;
    std::vector<Element> mul(order * order);
    std::vector<std::string> labels;
    for (std::size_t f = 0; f < 2; ++f)
      for (std::size_t j = 0; j < n; ++j)
        labels.push_back("(" + std::to_string(j) + "," + std::to_string(f) + ")");
    // r^a s^f * r^b s^g = r^(a + (-1)^f b) s^(f+g)
    for (std::size_t x = 0; x < order; ++x) {
      const std::size_t a = x % n, f = x / n;
      for (std::size_t y = 0; y < order; ++y) {
        const std::size_t b = y % n, g = y / n;
        const std::size_t rot = f ? (a + n - b) % n : (a + b) % n;
        mul[x * order + y] = static_cast<Element>(((f ^ g) * n) + rot);
      }
    }
    return GroupTable(order, std::move(mul), std::move(labels),
                      Family{FamilyKind::Dihedral, n, {}, {}}, std::nullopt, text);
  }
  if (const auto* s = std::get_if<SymmetricSpec>(&spec.kind)) {
    const std::size_t n = s->n;
    detail::check_cap(detail::factorial_capped(n, max_order), max_order, text);
    std::vector<Permutation> elems;
    Permutation p = identity_permutation(n);
    do elems.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return detail::table_from_permutations(std::move(elems), Family{FamilyKind::Symmetric, n, {}, {}},
                                           text);
  }
  if (const auto* pg = std::get_if<PermGensSpec>(&spec.kind)) {
    // Closure by breadth-first right multiplication with the generators.
    std::unordered_map<Permutation, bool, detail::PermutationHash> seen;
    std::vector<Permutation> elems{identity_permutation(pg->degree)};
    seen.emplace(elems.front(), true);
    for (std::size_t i = 0; i < elems.size(); ++i) {
      for (const auto& gen : pg->gens) {
        Permutation next = compose(elems[i], gen);
        if (seen.emplace(next, true).second) {
          elems.push_back(std::move(next));
          detail::check_cap(elems.size(), max_order, text);
        }
      }
    }
    std::sort(elems.begin(), elems.end());
    return detail::table_from_permutations(
        std::move(elems), Family{FamilyKind::Permutation, pg->degree, {}, {}}, text);
  }
  const auto& dp = std::get<DirectProductSpec>(spec.kind);
  auto left = std::make_shared<const GroupTable>(build_group(*dp.left, max_order));
  auto right = std::make_shared<const GroupTable>(build_group(*dp.right, max_order));
  const std::size_t na = left->order(), nb = right->order();
  if (nb != 0 && na > max_order / nb) detail::check_cap(max_order + 1, max_order, text);
  const std::size_t order = na * nb;
  detail::check_cap(order, max_order, text);
  std::vector<Element> mul(order * order);
  std::vector<std::string> labels;
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t b = 0; b < nb; ++b) labels.push_back("[" + left->label(a) + "," + right->label(b) + "]");
  for (std::size_t x = 0; x < order; ++x)
    for (std::size_t y = 0; y < order; ++y)
      mul[x * order + y] = static_cast<Element>(left->mul(x / nb, y / nb) * nb + right->mul(x % nb, y % nb));
  const std::size_t n = order;
  return GroupTable(order, std::move(mul), std::move(labels),
                    Family{FamilyKind::DirectProduct, n, std::move(left), std::move(right)}, std::nullopt,
                    text);
}

inline GroupTable build_group(const std::string& dsl, std::size_t max_order = kDefaultMaxOrder) {
  return build_group(parse_group_spec(dsl), max_order);
}

// A subgroup as a sorted list of element indices of its parent group.
class Subgroup {
 public:
  Subgroup() = default;
  explicit Subgroup(std::vector<Element> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }

  const std::vector<Element>& members() const { return members_; }
  std::size_t order() const { return members_.size(); }
  bool contains(Element x) const { return std::binary_search(members_.begin(), members_.end(), x); }
  bool is_trivial() const { return members_.size() <= 1; }

  friend bool operator==(const Subgroup&, const Subgroup&) = default;
  friend auto operator<=>(const Subgroup& a, const Subgroup& b) {
    if (a.order() != b.order()) return a.order() <=> b.order();
    return a.members_ <=> b.members_;
  }

 private:
  std::vector<Element> members_;
};

// True if `members` is nonempty, contains the identity and is closed under
// multiplication and inversion.
inline bool is_subgroup(const GroupTable& g, const std::vector<Element>& members) {
  if (members.empty()) return false;
  std::vector<bool> in(g.order(), false);
  for (auto x : members) {
    if (x >= g.order()) return false;
    in[x] = true;
  }
  if (!in[g.identity()]) return false;
  for (auto a : members) {
    if (!in[g.inv(a)]) return false;
    for (auto b : members)
      if (!in[g.mul(a, b)]) return false;
  }
  return true;
}

// Smallest subgroup containing gens.
inline Subgroup subgroup_closure(const GroupTable& g, const std::vector<Element>& gens) {
  for (auto x : gens)
    if (x >= g.order()) throw DomainError("generator index out of range");
  std::vector<bool> in(g.order(), false);
  std::vector<Element> elems{g.identity()};
  in[g.identity()] = true;
  for (std::size_t i = 0; i < elems.size(); ++i) {
    for (auto s : gens) {
      const Element y = g.mul(elems[i], s);
      if (!in[y]) {
        in[y] = true;
        elems.push_back(y);
      }
    }
  }
  return Subgroup(std::move(elems));
}

inline Subgroup trivial_subgroup(const GroupTable& g) { return Subgroup({g.identity()}); }

inline Subgroup whole_group(const GroupTable& g) {
  std::vector<Element> all(g.order());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Element>(i);
  return Subgroup(std::move(all));
}

// Left cosets cH, ordered by smallest representative; each coset is sorted.
inline std::vector<std::vector<Element>> left_cosets(const GroupTable& g, const Subgroup& h) {
  std::vector<bool> done(g.order(), false);
  std::vector<std::vector<Element>> cosets;
  for (std::size_t c = 0; c < g.order(); ++c) {
    if (done[c]) continue;
    std::vector<Element> coset;
    for (auto x : h.members()) {
      const Element y = g.mul(static_cast<Element>(c), x);
      done[y] = true;
      coset.push_back(y);
    }
    std::sort(coset.begin(), coset.end());
    cosets.push_back(std::move(coset));
  }
  return cosets;
}

// c H c^-1
inline Subgroup conjugate_subgroup(const GroupTable& g, const Subgroup& h, Element c) {
  std::vector<Element> out;
  out.reserve(h.order());
  for (auto x : h.members()) out.push_back(g.conj(c, x));
  return Subgroup(std::move(out));
}

inline bool is_normal(const GroupTable& g, const Subgroup& h) {
  for (std::size_t c = 0; c < g.order(); ++c)
    for (auto x : h.members())
      if (!h.contains(g.conj(static_cast<Element>(c), x))) return false;
  return true;
}

// Whether H acts transitively on the points of the group's permutation
// action. Throws DomainError for groups without a permutation action.
inline bool is_transitive(const GroupTable& g, const Subgroup& h) {
  if (!g.has_permutation_action())
    throw DomainError("transitivity needs a permutation group (S:n or perm[...])");
  const std::size_t n = g.action_degree();
  std::vector<bool> reached(n, false);
  reached[0] = true;
  std::size_t count = 1;
  std::vector<std::uint32_t> frontier{0};
  while (!frontier.empty()) {
    const auto p = frontier.back();
    frontier.pop_back();
    for (auto x : h.members()) {
      const auto q = g.action(x)[p];
      if (!reached[q]) {
        reached[q] = true;
        ++count;
        frontier.push_back(q);
      }
    }
  }
  return count == n;
}

inline Subgroup subgroup_join(const GroupTable& g, const Subgroup& a, const Subgroup& b) {
  std::vector<Element> gens = a.members();
  gens.insert(gens.end(), b.members().begin(), b.members().end());
  return subgroup_closure(g, gens);
}

// Closes a seed family of subgroups under joins. Every subgroup is the join
// of the cyclic subgroups it contains, and every normal subgroup is the join
// of the normal closures of the classes it contains.
namespace detail {

inline std::vector<Subgroup> join_closure(const GroupTable& g, std::set<Subgroup> family) {
  std::vector<Subgroup> list(family.begin(), family.end());
  for (std::size_t i = 0; i < list.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      Subgroup joined = subgroup_join(g, list[i], list[j]);
      if (family.insert(joined).second) list.push_back(std::move(joined));
    }
  }
  return {family.begin(), family.end()};
}

}  // namespace detail

// All subgroups, sorted by (order, members).
inline std::vector<Subgroup> all_subgroups(const GroupTable& g) {
  std::set<Subgroup> seeds;
  for (std::size_t x = 0; x < g.order(); ++x) seeds.insert(subgroup_closure(g, {static_cast<Element>(x)}));
  return detail::join_closure(g, std::move(seeds));
}

// All normal subgroups (trivial and G included), sorted by (order, members).
inline std::vector<Subgroup> normal_subgroups(const GroupTable& g) {
  std::set<Subgroup> seeds;
  for (const auto& cls : g.classes()) seeds.insert(subgroup_closure(g, cls));
  return detail::join_closure(g, std::move(seeds));
}

}  // namespace hsieve
