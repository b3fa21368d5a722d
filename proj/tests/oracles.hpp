#pragma once

// Reference computations used only by the tests. Each one works from the
// raw multiplication table or from first principles, never through the
// library routine it is compared against.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "hsieve.hpp"

namespace oracle {

using hsieve::Element;
using hsieve::GroupTable;
using cplx = std::complex<double>;

// Class count from Burnside's lemma on the conjugation action:
// #classes = #{(a, b) : ab = ba} / |G|.
inline std::size_t class_count(const GroupTable& g) {
  std::size_t pairs = 0;
  for (Element a = 0; a < g.order(); ++a)
    for (Element b = 0; b < g.order(); ++b) pairs += g.mul(a, b) == g.mul(b, a);
  return pairs / g.order();
}

// Closure by repeated products of a set with itself until it stops growing.
inline std::set<Element> closure(const GroupTable& g, std::set<Element> s) {
  s.insert(g.identity());
  for (;;) {
    std::set<Element> next = s;
    for (auto a : s)
      for (auto b : s) next.insert(g.mul(a, b));
    if (next.size() == s.size()) return s;
    s = std::move(next);
  }
}

inline std::size_t commutator_subgroup_order(const GroupTable& g) {
  std::set<Element> comms;
  for (Element a = 0; a < g.order(); ++a)
    for (Element b = 0; b < g.order(); ++b) comms.insert(g.mul(g.mul(a, b), g.mul(g.inv(a), g.inv(b))));
  return closure(g, comms).size();
}

// All degree multisets with: #parts = #classes, #(parts equal to 1) = |G/G'|,
// every part > 1 divides |G| and squares summing to |G|. When exactly one
// multiset survives it is the degree list; otherwise returns empty.
inline std::vector<int> degree_oracle(const GroupTable& g) {
  const std::size_t n = g.order();
  const std::size_t r = class_count(g);
  const std::size_t linear = n / commutator_subgroup_order(g);
  if (linear > r) return {};
  std::vector<int> divisors;
  for (std::size_t d = 2; d * d <= n; ++d)
    if (n % d == 0) divisors.push_back(static_cast<int>(d));
  std::vector<std::vector<int>> found;
  std::vector<int> cur;
  std::function<void(std::size_t, long, std::size_t)> rec = [&](std::size_t left, long rest, std::size_t from) {
    if (found.size() > 1) return;
    if (left == 0) {
      if (rest == 0) found.push_back(cur);
      return;
    }
    for (std::size_t i = from; i < divisors.size(); ++i) {
      const long sq = static_cast<long>(divisors[i]) * divisors[i];
      if (sq * static_cast<long>(left) > rest) break;
      cur.push_back(divisors[i]);
      rec(left - 1, rest - sq, i);
      cur.pop_back();
    }
  };
  rec(r - linear, static_cast<long>(n - linear), 0);
  if (found.size() != 1) return {};
  std::vector<int> out(linear, 1);
  out.insert(out.end(), found[0].begin(), found[0].end());
  return out;
}

// Dihedral product written directly from r^j s^f: (j1, f1)(j2, f2) =
// (j1 + (-1)^f1 j2 mod n, f1 xor f2).
inline std::pair<int, int> dihedral_mul(int n, std::pair<int, int> a, std::pair<int, int> b) {
  const int j = ((a.first + (a.second ? -b.first : b.first)) % n + n) % n;
  return {j, a.second ^ b.second};
}

// Right-regular permutation matrix on one register: |x> -> |x g^-1>.
inline Eigen::MatrixXcd right_regular(const GroupTable& g, Element a) {
  const auto n = static_cast<Eigen::Index>(g.order());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (Element x = 0; x < g.order(); ++x) m(g.mul(x, g.inv(a)), x) = 1.0;
  return m;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Dense isotypic projector on the registers in mask, assembled from
// Kronecker products of single-register matrices (register 0 leftmost).
inline Eigen::MatrixXcd subset_projector(const GroupTable& g, const hsieve::CharacterTable& ct, std::size_t k,
                                         unsigned mask, std::size_t eta) {
  const auto n = static_cast<Eigen::Index>(g.order());
  Eigen::Index dim = 1;
  for (std::size_t i = 0; i < k; ++i) dim *= n;
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  for (Element a = 0; a < g.order(); ++a) {
    const Eigen::MatrixXcd r = right_regular(g, a);
    Eigen::MatrixXcd term = (mask & 1U) ? r : id;
    for (std::size_t i = 1; i < k; ++i) term = kron(term, (mask >> i & 1U) ? r : id);
    p += std::conj(ct.chi(eta, a)) * term;
  }
  return p * (static_cast<double>(ct.degree(eta)) / static_cast<double>(g.order()));
}

// Rank of the span of all subset projector images via column-pivoted QR of
// the stacked columns.
inline std::size_t span_rank_qr(const GroupTable& g, const hsieve::CharacterTable& ct, std::size_t k,
                                std::size_t eta) {
  std::vector<Eigen::MatrixXcd> blocks;
  Eigen::Index rows = 0, cols = 0;
  for (unsigned mask = 1; mask < (1U << k); ++mask) {
    blocks.push_back(subset_projector(g, ct, k, mask, eta));
    rows = blocks.back().rows();
    cols += blocks.back().cols();
  }
  Eigen::MatrixXcd stacked(rows, cols);
  Eigen::Index c = 0;
  for (const auto& b : blocks) {
    stacked.middleCols(c, b.cols()) = b;
    c += b.cols();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(stacked);
  qr.setThreshold(1e-9);
  return static_cast<std::size_t>(qr.rank());
}

// Left cosets cH found by scanning c in increasing order.
inline std::vector<std::vector<Element>> cosets(const GroupTable& g, const std::vector<Element>& h) {
  std::vector<bool> seen(g.order(), false);
  std::vector<std::vector<Element>> out;
  for (Element c = 0; c < g.order(); ++c) {
    if (seen[c]) continue;
    std::vector<Element> cos;
    for (auto x : h) {
      cos.push_back(g.mul(c, x));
      seen[g.mul(c, x)] = true;
    }
    out.push_back(cos);
  }
  return out;
}

// rho^(x)k written as the literal average of |c_1H ... c_kH><...| over all
// coset tuples.
inline Eigen::MatrixXcd coset_density(const GroupTable& g, const std::vector<Element>& h, std::size_t k) {
  const auto cs = cosets(g, h);
  const auto n = static_cast<Eigen::Index>(g.order());
  std::vector<Eigen::VectorXcd> single;
  for (const auto& cos : cs) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
    for (auto x : cos) v(x) = 1.0 / std::sqrt(static_cast<double>(h.size()));
    single.push_back(v);
  }
  Eigen::Index dim = 1;
  for (std::size_t i = 0; i < k; ++i) dim *= n;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  std::vector<std::size_t> t(k, 0);
  std::size_t tuples = 0;
  for (;;) {
    Eigen::VectorXcd v = single[t[0]];
    for (std::size_t i = 1; i < k; ++i) v = kron(v, single[t[i]]);
    rho += v * v.adjoint();
    ++tuples;
    std::size_t i = k;
    while (i-- > 0) {
      if (++t[i] < cs.size()) break;
      t[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  return rho / static_cast<double>(tuples);
}

// Sorted rows of a character table, each row rounded, for set comparison.
inline std::multiset<std::vector<std::pair<long, long>>> rounded_rows(const std::vector<std::vector<cplx>>& rows) {
  std::multiset<std::vector<std::pair<long, long>>> out;
  for (const auto& r : rows) {
    std::vector<std::pair<long, long>> v;
    for (auto z : r) v.emplace_back(std::lround(z.real() * 1e6), std::lround(z.imag() * 1e6));
    out.insert(v);
  }
  return out;
}

}  // namespace oracle
