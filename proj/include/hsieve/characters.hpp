#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hsieve/errors.hpp"
#include "hsieve/group.hpp"

namespace hsieve {

using cplx = std::complex<double>;

// Complex character table of a finite group. Row tau, column = conjugacy
// class (same order as GroupTable::classes()). Row 0 is the trivial
// character; rows are sorted by degree, then by character values in
// descending lexicographic order of (real, imag) rounded to 1e-6.
class CharacterTable {
 public:
  CharacterTable(std::size_t group_order, std::vector<std::size_t> class_sizes,
                 std::vector<std::size_t> class_of, Eigen::MatrixXcd chars, std::vector<int> degrees)
      : group_order_(group_order),
        class_sizes_(std::move(class_sizes)),
        class_of_(std::move(class_of)),
        chars_(std::move(chars)),
        degrees_(std::move(degrees)) {}

  std::size_t group_order() const { return group_order_; }
  std::size_t num_irreps() const { return degrees_.size(); }
  std::size_t num_classes() const { return class_sizes_.size(); }
  int degree(std::size_t tau) const { return degrees_[tau]; }
  const std::vector<int>& degrees() const { return degrees_; }
  const std::vector<std::size_t>& class_sizes() const { return class_sizes_; }
  std::size_t class_of(Element g) const { return class_of_[g]; }

  // chi_tau on a class
  cplx value(std::size_t tau, std::size_t cls) const { return chars_(tau, cls); }
  // chi_tau on an element
  cplx chi(std::size_t tau, Element g) const { return chars_(tau, class_of_[g]); }
  const Eigen::MatrixXcd& matrix() const { return chars_; }

  static std::string label(std::size_t tau) { return "chi" + std::to_string(tau); }

  // Accepts "chi<i>" or a bare index.
  std::size_t parse_label(const std::string& s) const {
    std::string digits = s.rfind("chi", 0) == 0 ? s.substr(3) : s;
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); }))
      throw SpecError("bad irreducible label '" + s + "' (expected chi<index>)");
    const std::size_t idx = std::stoul(digits);
    if (idx >= num_irreps()) throw SpecError("irreducible index out of range: " + s);
    return idx;
  }

  // max |<chi_a, chi_b> - delta_ab| over all pairs.
  double row_orthogonality_residual() const {
    double worst = 0.0;
    for (std::size_t a = 0; a < num_irreps(); ++a)
      for (std::size_t b = 0; b < num_irreps(); ++b) {
        cplx s = 0.0;
        for (std::size_t c = 0; c < num_classes(); ++c)
          s += static_cast<double>(class_sizes_[c]) * chars_(a, c) * std::conj(chars_(b, c));
        s /= static_cast<double>(group_order_);
        worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
      }
    return worst;
  }

  // max |sum_tau chi_tau(C) chi_tau(C')* - delta |G|/|C|| over class pairs.
  double column_orthogonality_residual() const {
    double worst = 0.0;
    for (std::size_t c = 0; c < num_classes(); ++c)
      for (std::size_t d = 0; d < num_classes(); ++d) {
        cplx s = 0.0;
        for (std::size_t t = 0; t < num_irreps(); ++t) s += chars_(t, c) * std::conj(chars_(t, d));
        const double expect = c == d ? static_cast<double>(group_order_) / static_cast<double>(class_sizes_[c]) : 0.0;
        worst = std::max(worst, std::abs(s - expect) / std::max(1.0, expect));
      }
    return worst;
  }

  // C = sum of degrees
  long degree_sum() const { return std::accumulate(degrees_.begin(), degrees_.end(), 0L); }
  long degree_square_sum() const {
    long s = 0;
    for (int d : degrees_) s += static_cast<long>(d) * d;
    return s;
  }

 private:
  std::size_t group_order_;
  std::vector<std::size_t> class_sizes_;
  std::vector<std::size_t> class_of_;
  Eigen::MatrixXcd chars_;
  std::vector<int> degrees_;
};

namespace detail {

// Class-algebra structure constants: c[i][j][k] = #{x in C_i : x^-1 z in C_j}
// for a fixed z in C_k, i.e. C_i C_j = sum_k c_ijk C_k.
inline std::vector<Eigen::MatrixXd> class_matrices(const GroupTable& g) {
  const std::size_t r = g.num_classes();
  std::vector<Eigen::MatrixXd> mats(r, Eigen::MatrixXd::Zero(r, r));
  for (std::size_t k = 0; k < r; ++k) {
    const Element z = g.class_representative(k);
    for (std::size_t i = 0; i < r; ++i)
      for (auto x : g.classes()[i]) {
        const std::size_t j = g.class_of(g.mul(g.inv(x), z));
        mats[i](j, k) += 1.0;
      }
  }
  return mats;
}

}  // namespace detail

// Burnside-Dixon character table. The class matrices A_i (A_i[j][k] = c_ijk)
// are conjugated by diag(sqrt|C|) into normal matrices B_i sharing the
// eigenvectors v_chi[k] = sqrt(|C_k|/|G|) chi(C_k). A random Hermitian
// combination of the B_i and their transposes is diagonalized; a degenerate
// spectrum is retried with a new combination.
inline CharacterTable character_table(const GroupTable& g, std::uint64_t seed = 0x5eed, int max_retries = 16) {
  const std::size_t r = g.num_classes();
  const double n = static_cast<double>(g.order());
  std::vector<std::size_t> sizes(r);
  for (std::size_t c = 0; c < r; ++c) sizes[c] = g.classes()[c].size();
  std::vector<std::size_t> class_of(g.order());
  for (std::size_t x = 0; x < g.order(); ++x) class_of[x] = g.class_of(static_cast<Element>(x));

  const auto mats = detail::class_matrices(g);
  Eigen::VectorXd sq(r), isq(r);
  for (std::size_t c = 0; c < r; ++c) {
    sq(c) = std::sqrt(static_cast<double>(sizes[c]));
    isq(c) = 1.0 / sq(c);
  }
  std::vector<Eigen::MatrixXd> normal(r);
  for (std::size_t i = 0; i < r; ++i) normal[i] = isq.asDiagonal() * mats[i] * sq.asDiagonal();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    Eigen::MatrixXcd herm = Eigen::MatrixXcd::Zero(r, r);
    for (std::size_t i = 0; i < r; ++i) {
      const double a = coef(rng), b = coef(rng);
      const Eigen::MatrixXd sym = normal[i] + normal[i].transpose();
      const Eigen::MatrixXd anti = normal[i] - normal[i].transpose();
      herm += a * sym.cast<cplx>() + cplx(0.0, b) * anti.cast<cplx>();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
    if (es.info() != Eigen::Success) continue;
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    bool separated = true;
    for (std::size_t i = 1; i < r; ++i)
      if (ev(i) - ev(i - 1) < 1e-4 * scale) separated = false;
    if (!separated) continue;

    Eigen::MatrixXcd chars(r, r);
    std::vector<int> degrees(r);
    bool ok = true;
    for (std::size_t t = 0; t < r; ++t) {
      Eigen::VectorXcd v = es.eigenvectors().col(t);
      const cplx v0 = v(0);  // identity class
      if (std::abs(v0) < 1e-12) {
        ok = false;
        break;
      }
      v *= std::conj(v0) / std::abs(v0);
      const double d = std::abs(v0) * std::sqrt(n);
      const double rounded = std::round(d);
      if (std::abs(d - rounded) > 1e-6 || rounded < 1.0) {
        ok = false;
        break;
      }
      degrees[t] = static_cast<int>(rounded);
      for (std::size_t c = 0; c < r; ++c) chars(t, c) = v(c) * std::sqrt(n / static_cast<double>(sizes[c]));
      chars(t, 0) = rounded;
    }
    if (!ok) continue;

    // Deterministic order: degree ascending, then values descending.
    std::vector<std::size_t> perm(r);
    std::iota(perm.begin(), perm.end(), 0);
    auto key = [&](std::size_t t, std::size_t c) {
      return std::pair<double, double>{std::round(chars(t, c).real() * 1e6), std::round(chars(t, c).imag() * 1e6)};
    };
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
      if (degrees[a] != degrees[b]) return degrees[a] < degrees[b];
      for (std::size_t c = 0; c < r; ++c) {
        const auto ka = key(a, c), kb = key(b, c);
        if (ka != kb) return ka > kb;
      }
      return false;
    });
    Eigen::MatrixXcd sorted(r, r);
    std::vector<int> sorted_deg(r);
    for (std::size_t i = 0; i < r; ++i) {
      sorted.row(i) = chars.row(perm[i]);
      sorted_deg[i] = degrees[perm[i]];
    }
    return CharacterTable(g.order(), std::move(sizes), std::move(class_of), std::move(sorted), std::move(sorted_deg));
  }
  throw NumericalError("character table: eigenvalues not separated after " + std::to_string(max_retries) +
                       " splitting vectors");
}

// Plancherel distribution d_tau^2 / |G|.
struct PlancherelDistribution {
  std::vector<double> probs;
};

inline PlancherelDistribution plancherel(const CharacterTable& ct) {
  PlancherelDistribution p;
  const double n = static_cast<double>(ct.group_order());
  for (int d : ct.degrees()) p.probs.push_back(static_cast<double>(d) * d / n);
  return p;
}

// Multiplicities a_tau of each irreducible in the diagonal-action tensor
// product of the listed irreducibles. Throws NumericalError if a
// multiplicity is not within 1e-6 of an integer.
inline std::vector<int> tensor_decompose(const CharacterTable& ct, const std::vector<std::size_t>& taus) {
  if (taus.empty()) throw DomainError("tensor_decompose: empty irreducible list");
  const std::size_t r = ct.num_classes();
  std::vector<cplx> prod(r, 1.0);
  for (auto t : taus) {
    if (t >= ct.num_irreps()) throw DomainError("tensor_decompose: irreducible index out of range");
    for (std::size_t c = 0; c < r; ++c) prod[c] *= ct.value(t, c);
  }
  std::vector<int> mult(ct.num_irreps());
  for (std::size_t tau = 0; tau < ct.num_irreps(); ++tau) {
    cplx s = 0.0;
    for (std::size_t c = 0; c < r; ++c)
      s += static_cast<double>(ct.class_sizes()[c]) * prod[c] * std::conj(ct.value(tau, c));
    s /= static_cast<double>(ct.group_order());
    const double rounded = std::round(s.real());
    if (std::abs(s - cplx(rounded, 0.0)) > 1e-6)
      throw NumericalError("tensor_decompose: non-integer multiplicity " + std::to_string(s.real()));
    mult[tau] = static_cast<int>(rounded);
  }
  return mult;
}

}  // namespace hsieve
