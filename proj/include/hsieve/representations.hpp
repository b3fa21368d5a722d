#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <concepts>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hsieve/characters.hpp"
#include "hsieve/errors.hpp"
#include "hsieve/group.hpp"
#include "hsieve/linalg.hpp"

namespace hsieve {

// Anything that maps group elements to dense matrices of a fixed size.
template <class R>
concept Representation = requires(const R& rep, Element g) {
  { rep.dim() } -> std::convertible_to<std::size_t>;
  { rep.matrix(g) } -> std::convertible_to<Eigen::MatrixXcd>;
};

// Explicit unitary matrices of one irreducible, indexed by element.
struct IrrepMatrices {
  std::size_t irrep_index = 0;
  std::size_t degree = 0;
  std::vector<Eigen::MatrixXcd> mats;

  std::size_t dim() const { return degree; }
  const Eigen::MatrixXcd& matrix(Element g) const { return mats[g]; }

  // max over all pairs of |rho(ab) - rho(a) rho(b)|
  double homomorphism_residual(const GroupTable& g) const {
    double worst = 0.0;
    for (std::size_t a = 0; a < g.order(); ++a)
      for (std::size_t b = 0; b < g.order(); ++b) {
        const auto ab = g.mul(static_cast<Element>(a), static_cast<Element>(b));
        worst = std::max(worst, (mats[ab] - mats[a] * mats[b]).cwiseAbs().maxCoeff());
      }
    return worst;
  }

  double unitarity_residual() const {
    double worst = 0.0;
    for (const auto& m : mats) worst = std::max(worst, hsieve::unitarity_residual(m));
    return worst;
  }

  // max |tr rho(g) - chi(g)| against the given row of the character table.
  double trace_residual(const CharacterTable& ct) const {
    double worst = 0.0;
    for (std::size_t g = 0; g < mats.size(); ++g)
      worst = std::max(worst, std::abs(mats[g].trace() - ct.chi(irrep_index, static_cast<Element>(g))));
    return worst;
  }
};

// Regular representation stored as permutations. The right action is
// R(g)|x> = |x g^-1> and the left action is L(g)|x> = |g x>; both are
// homomorphisms.
class RegularRep {
 public:
  enum class Side { Left, Right };

  RegularRep(const GroupTable& g, Side side) : order_(g.order()), perms_(g.order()) {
    for (std::size_t a = 0; a < order_; ++a) {
      perms_[a].resize(order_);
      for (std::size_t x = 0; x < order_; ++x)
        perms_[a][x] = side == Side::Left ? g.mul(static_cast<Element>(a), static_cast<Element>(x))
                                          : g.mul(static_cast<Element>(x), g.inv(static_cast<Element>(a)));
    }
  }

  std::size_t dim() const { return order_; }
  // Image of basis vector x under the action of g.
  Element image(Element g, Element x) const { return perms_[g][x]; }

  Eigen::MatrixXcd matrix(Element g) const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(order_, order_);
    for (std::size_t x = 0; x < order_; ++x) m(perms_[g][x], x) = 1.0;
    return m;
  }

  Eigen::VectorXcd apply(Element g, const Eigen::VectorXcd& v) const {
    Eigen::VectorXcd out(order_);
    for (std::size_t x = 0; x < order_; ++x) out(perms_[g][x]) = v(x);
    return out;
  }

  // chi_Reg(g) = number of fixed points
  std::size_t character(Element g) const {
    std::size_t n = 0;
    for (std::size_t x = 0; x < order_; ++x) n += perms_[g][x] == x;
    return n;
  }

 private:
  std::size_t order_;
  std::vector<std::vector<Element>> perms_;
};

namespace detail {

// Extends generator images to a map on all of G by breadth-first search:
// rho(x s) = rho(x) rho(s). The result is a homomorphism iff the generator
// images satisfy the group's relations.
inline std::vector<Eigen::MatrixXcd> extend_from_generators(const GroupTable& g, const std::vector<Element>& gens,
                                                            const std::vector<Eigen::MatrixXcd>& images) {
  const auto d = images.front().rows();
  std::vector<Eigen::MatrixXcd> mats(g.order());
  std::vector<bool> done(g.order(), false);
  std::vector<Element> queue{g.identity()};
  mats[g.identity()] = Eigen::MatrixXcd::Identity(d, d);
  done[g.identity()] = true;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const Element x = queue[i];
    for (std::size_t s = 0; s < gens.size(); ++s) {
      const Element y = g.mul(x, gens[s]);
      if (done[y]) continue;
      done[y] = true;
      mats[y] = mats[x] * images[s];
      queue.push_back(y);
    }
  }
  if (queue.size() != g.order()) throw UnsupportedError("generators do not generate the group");
  return mats;
}

using IrrepList = std::vector<std::vector<Eigen::MatrixXcd>>;

inline IrrepList cyclic_irreps(std::size_t n) {
  IrrepList out;
  for (std::size_t m = 0; m < n; ++m) {
    std::vector<Eigen::MatrixXcd> mats;
    for (std::size_t x = 0; x < n; ++x) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((m * x) % n) / static_cast<double>(n);
      mats.push_back(Eigen::MatrixXcd::Constant(1, 1, std::polar(1.0, angle)));
    }
    out.push_back(std::move(mats));
  }
  return out;
}

inline IrrepList elementary_abelian2_irreps(std::size_t bits) {
  const std::size_t n = std::size_t{1} << bits;
  IrrepList out;
  for (std::size_t m = 0; m < n; ++m) {
    std::vector<Eigen::MatrixXcd> mats;
    for (std::size_t x = 0; x < n; ++x)
      mats.push_back(Eigen::MatrixXcd::Constant(1, 1, std::popcount(m & x) % 2 ? -1.0 : 1.0));
    out.push_back(std::move(mats));
  }
  return out;
}

// D_n with r^j s^f at index f*n + j: linear characters r -> +-1 (the sign
// -1 only for even n), s -> +-1, and for 0 < m < n/2 the real rotation /
// reflection matrices r -> R(2 pi m / n), s -> diag(1, -1).
inline IrrepList dihedral_irreps(std::size_t n) {
  IrrepList out;
  const std::size_t order = 2 * n;
  for (int rot_sign : {1, -1}) {
    if (rot_sign == -1 && n % 2 == 1) continue;
    for (int flip_sign : {1, -1}) {
      std::vector<Eigen::MatrixXcd> mats;
      for (std::size_t x = 0; x < order; ++x) {
        const std::size_t j = x % n, f = x / n;
        const double v = (j % 2 && rot_sign < 0 ? -1.0 : 1.0) * (f && flip_sign < 0 ? -1.0 : 1.0);
        mats.push_back(Eigen::MatrixXcd::Constant(1, 1, v));
      }
      out.push_back(std::move(mats));
    }
  }
  for (std::size_t m = 1; 2 * m < n; ++m) {
    std::vector<Eigen::MatrixXcd> mats;
    for (std::size_t x = 0; x < order; ++x) {
      const std::size_t j = x % n, f = x / n;
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((m * j) % n) / static_cast<double>(n);
      Eigen::MatrixXcd rot(2, 2);
      rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
      if (f) rot.col(1) *= -1.0;  // R(theta) * diag(1, -1)
      mats.push_back(rot);
    }
    out.push_back(std::move(mats));
  }
  return out;
}

inline std::vector<std::vector<std::size_t>> partitions(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t remaining, std::size_t max_part) -> void {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (std::size_t p = std::min(remaining, max_part); p >= 1; --p) {
      cur.push_back(p);
      self(self, remaining - p, p);
      cur.pop_back();
    }
  };
  rec(rec, n, n);
  return out;
}

// Standard Young tableaux of a shape; tableau[v] = (row, col) of entry v.
using Tableau = std::vector<std::pair<int, int>>;

inline std::vector<Tableau> standard_tableaux(const std::vector<std::size_t>& shape) {
  std::size_t n = 0;
  for (auto p : shape) n += p;
  std::vector<Tableau> out;
  Tableau cur(n);
  std::vector<std::size_t> filled(shape.size(), 0);
  auto rec = [&](auto&& self, std::size_t v) -> void {
    if (v == n) {
      out.push_back(cur);
      return;
    }
    for (std::size_t row = 0; row < shape.size(); ++row) {
      if (filled[row] >= shape[row]) continue;
      if (row > 0 && filled[row - 1] <= filled[row]) continue;
      cur[v] = {static_cast<int>(row), static_cast<int>(filled[row])};
      ++filled[row];
      self(self, v + 1);
      --filled[row];
    }
  };
  rec(rec, 0);
  return out;
}

// Young's orthogonal form of the adjacent transposition (k, k+1) for every
// standard tableau T of the shape: with axial distance
// a = content(k+1) - content(k), content = col - row,
//   s_k e_T = (1/a) e_T + sqrt(1 - 1/a^2) e_{s_k T}.
inline std::vector<Eigen::MatrixXcd> young_orthogonal_generators(const std::vector<std::size_t>& shape, std::size_t n) {
  const auto tableaux = standard_tableaux(shape);
  std::map<Tableau, std::size_t> index;
  for (std::size_t i = 0; i < tableaux.size(); ++i) index.emplace(tableaux[i], i);
  const auto d = static_cast<Eigen::Index>(tableaux.size());
  std::vector<Eigen::MatrixXcd> gens;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (std::size_t t = 0; t < tableaux.size(); ++t) {
      const auto& tab = tableaux[t];
      const int a = (tab[k + 1].second - tab[k + 1].first) - (tab[k].second - tab[k].first);
      const double inv_a = 1.0 / static_cast<double>(a);
      m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(t)) = inv_a;
      if (a != 1 && a != -1) {
        Tableau swapped = tab;
        std::swap(swapped[k], swapped[k + 1]);
        const auto u = static_cast<Eigen::Index>(index.at(swapped));
        m(u, static_cast<Eigen::Index>(t)) = std::sqrt(1.0 - inv_a * inv_a);
      }
    }
    gens.push_back(std::move(m));
  }
  return gens;
}

inline bool is_full_symmetric(const GroupTable& g) {
  if (g.family().kind == FamilyKind::Symmetric) return true;
  if (g.family().kind != FamilyKind::Permutation || !g.has_permutation_action()) return false;
  std::size_t f = 1;
  for (std::size_t i = 2; i <= g.action_degree(); ++i) {
    f *= i;
    if (f > g.order()) return false;
  }
  return f == g.order();
}

inline IrrepList symmetric_irreps(const GroupTable& g) {
  const std::size_t n = g.action_degree();
  if (n <= 1) return {{std::vector<Eigen::MatrixXcd>(g.order(), Eigen::MatrixXcd::Identity(1, 1))}};
  std::vector<Element> gens;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    Permutation p = identity_permutation(n);
    std::swap(p[k], p[k + 1]);
    auto idx = g.find_label(to_cycle_string(p));
    if (!idx) throw UnsupportedError("adjacent transposition missing from symmetric group");
    gens.push_back(*idx);
  }
  IrrepList out;
  for (const auto& shape : partitions(n))
    out.push_back(extend_from_generators(g, gens, young_orthogonal_generators(shape, n)));
  return out;
}

inline IrrepList family_irreps(const GroupTable& g) {
  const auto& fam = g.family();
  switch (fam.kind) {
    case FamilyKind::Cyclic: return cyclic_irreps(fam.n);
    case FamilyKind::ElementaryAbelian2: return elementary_abelian2_irreps(fam.n);
    case FamilyKind::Dihedral: return dihedral_irreps(fam.n);
    case FamilyKind::Symmetric: return symmetric_irreps(g);
    case FamilyKind::Permutation:
      if (is_full_symmetric(g)) return symmetric_irreps(g);
      break;
    case FamilyKind::DirectProduct: {
      const auto left = family_irreps(*fam.left);
      const auto right = family_irreps(*fam.right);
      const std::size_t nb = fam.right->order();
      IrrepList out;
      for (const auto& a : left)
        for (const auto& b : right) {
          std::vector<Eigen::MatrixXcd> mats;
          mats.reserve(g.order());
          for (std::size_t x = 0; x < g.order(); ++x) mats.push_back(kron(a[x / nb], b[x % nb]));
          out.push_back(std::move(mats));
        }
      return out;
    }
    case FamilyKind::Abstract: break;
  }
  throw UnsupportedError("explicit irreducible matrices are not available for the " + family_name(fam.kind) +
                         " family");
}

// Matches each explicit irreducible to its character-table row by traces.
inline std::vector<IrrepMatrices> match_to_table(const GroupTable& g, const CharacterTable& ct, IrrepList list) {
  std::vector<IrrepMatrices> out(ct.num_irreps());
  std::vector<bool> assigned(ct.num_irreps(), false);
  for (auto& mats : list) {
    bool found = false;
    for (std::size_t tau = 0; tau < ct.num_irreps() && !found; ++tau) {
      if (assigned[tau] || static_cast<int>(mats.front().rows()) != ct.degree(tau)) continue;
      bool match = true;
      for (std::size_t c = 0; c < g.num_classes() && match; ++c)
        match = std::abs(mats[g.class_representative(c)].trace() - ct.value(tau, c)) < 1e-8;
      if (match) {
        assigned[tau] = found = true;
        out[tau] = IrrepMatrices{tau, static_cast<std::size_t>(ct.degree(tau)), std::move(mats)};
      }
    }
    if (!found) throw NumericalError("explicit irreducible does not match any character-table row");
  }
  for (bool a : assigned)
    if (!a) throw NumericalError("character-table row without an explicit irreducible");
  return out;
}

}  // namespace detail

// Whether explicit matrices exist for every irreducible of g.
inline bool supports_explicit_irreps(const GroupTable& g) {
  switch (g.family().kind) {
    case FamilyKind::Cyclic:
    case FamilyKind::ElementaryAbelian2:
    case FamilyKind::Dihedral:
    case FamilyKind::Symmetric: return true;
    case FamilyKind::Permutation: return detail::is_full_symmetric(g);
    case FamilyKind::DirectProduct:
      return supports_explicit_irreps(*g.family().left) && supports_explicit_irreps(*g.family().right);
    case FamilyKind::Abstract: return false;
  }
  return false;
}

// Matrices for every irreducible, indexed like the character table.
// Throws UnsupportedError if the family has no explicit construction.
inline std::vector<IrrepMatrices> all_irrep_matrices(const GroupTable& g, const CharacterTable& ct) {
  return detail::match_to_table(g, ct, detail::family_irreps(g));
}

// Unitary matrices of one irreducible: family constructions (cyclic,
// elementary abelian, dihedral, symmetric via Young's orthogonal form, and
// direct products thereof), or the character itself for degree 1.
inline IrrepMatrices irrep_matrices(const GroupTable& g, const CharacterTable& ct, std::size_t sigma) {
  if (sigma >= ct.num_irreps()) throw DomainError("irreducible index out of range");
  if (supports_explicit_irreps(g)) return std::move(all_irrep_matrices(g, ct)[sigma]);
  if (ct.degree(sigma) == 1) {
    IrrepMatrices out{sigma, 1, {}};
    for (std::size_t x = 0; x < g.order(); ++x)
      out.mats.push_back(Eigen::MatrixXcd::Constant(1, 1, ct.chi(sigma, static_cast<Element>(x))));
    return out;
  }
  throw UnsupportedError("explicit matrices of degree " + std::to_string(ct.degree(sigma)) +
                         " are not available for the " + family_name(g.family().kind) + " family");
}

// (1/|H|) sum_{h in H} rep(h)
template <Representation R>
Eigen::MatrixXcd subgroup_average(const R& rep, const Subgroup& h) {
  const auto d = static_cast<Eigen::Index>(rep.dim());
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
  for (auto x : h.members()) sum += rep.matrix(x);
  return sum / static_cast<double>(h.order());
}

// Projector onto the tau-isotypic component of an action given as one
// matrix per element: (d_tau/|G|) sum_g chi_tau(g)^* U(g). Throws
// InvalidActionError if the result is not an idempotent Hermitian matrix.
inline Eigen::MatrixXcd isotypic_projector(const CharacterTable& ct, std::size_t tau,
                                           std::span<const Eigen::MatrixXcd> action) {
  if (action.size() != ct.group_order()) throw InvalidActionError("action must list one matrix per element");
  if (tau >= ct.num_irreps()) throw DomainError("irreducible index out of range");
  const auto d = action.front().rows();
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t g = 0; g < action.size(); ++g) p += std::conj(ct.chi(tau, static_cast<Element>(g))) * action[g];
  p *= static_cast<double>(ct.degree(tau)) / static_cast<double>(ct.group_order());
  const double residual = std::max(idempotence_residual(p), hermiticity_residual(p));
  if (residual > 1e-8)
    throw InvalidActionError("isotypic projector is not an orthogonal projection (residual " +
                             std::to_string(residual) + ")");
  return p;
}

template <Representation R>
Eigen::MatrixXcd isotypic_projector(const CharacterTable& ct, std::size_t tau, const R& rep) {
  std::vector<Eigen::MatrixXcd> action;
  action.reserve(ct.group_order());
  for (std::size_t g = 0; g < ct.group_order(); ++g) action.push_back(rep.matrix(static_cast<Element>(g)));
  return isotypic_projector(ct, tau, action);
}

// round(tr P) for an orthogonal projection P. Throws DomainError if P is not
// idempotent Hermitian to 1e-8 and NumericalError if the trace is not within
// 1e-6 of an integer.
inline std::size_t rank_of_projector(const Eigen::MatrixXcd& p) {
  if (p.size() == 0) return 0;
  if (idempotence_residual(p) > 1e-8 || hermiticity_residual(p) > 1e-8)
    throw DomainError("rank_of_projector: matrix is not an orthogonal projection");
  const std::complex<double> tr = p.trace();
  const double rounded = std::round(tr.real());
  if (std::abs(tr - std::complex<double>(rounded, 0.0)) >= 1e-6)
    throw NumericalError("rank_of_projector: trace " + std::to_string(tr.real()) + " is not an integer");
  return static_cast<std::size_t>(rounded);
}

}  // namespace hsieve
