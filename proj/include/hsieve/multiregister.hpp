#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hsieve/characters.hpp"
#include "hsieve/errors.hpp"
#include "hsieve/group.hpp"
#include "hsieve/linalg.hpp"
#include "hsieve/representations.hpp"

namespace hsieve {

inline constexpr std::size_t kDefaultDenseGuard = 4096;
// Largest state vector handled at all, dense or not.
inline constexpr std::size_t kMaxVectorDim = std::size_t{1} << 26;

// Dense-dimension guard, overridable with HARMONIC_SIEVE_GUARD.
inline std::size_t dense_guard_from_env(std::size_t fallback = kDefaultDenseGuard) {
  const char* env = std::getenv("HARMONIC_SIEVE_GUARD");
  if (env == nullptr || *env == '\0') return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0' || v == 0) throw SpecError(std::string("bad HARMONIC_SIEVE_GUARD value: ") + env);
  return static_cast<std::size_t>(v);
}

// Register subset as a bitmask; bit i is register i (0-based).
using RegisterMask = std::uint32_t;

// "{1,3}" with 1-based register numbers.
inline std::string subset_label(RegisterMask mask) {
  std::string out = "{";
  bool first = true;
  for (unsigned i = 0; i < 32; ++i) {
    if (!(mask >> i & 1U)) continue;
    if (!first) out += ',';
    out += std::to_string(i + 1);
    first = false;
  }
  return out + "}";
}

// C[G]^{(x)k} with basis index sum_i x_i |G|^(k-1-i): register 0 is the most
// significant digit. Holds a non-owning pointer to the group.
class MultiRegisterSpace {
 public:
  MultiRegisterSpace(const GroupTable& g, std::size_t k, std::size_t guard = kDefaultDenseGuard)
      : group_(&g), k_(k), guard_(guard) {
    if (k == 0) throw DomainError("register count k must be at least 1");
    if (k > 30) throw ResourceError("register count k above 30");
    dim_ = 1;
    strides_.assign(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
      if (dim_ > kMaxVectorDim / g.order())
        throw ResourceError("|G|^k exceeds the maximal vector dimension " + std::to_string(kMaxVectorDim));
      dim_ *= g.order();
    }
    std::size_t s = 1;
    for (std::size_t i = k; i-- > 0;) {
      strides_[i] = s;
      s *= g.order();
    }
  }

  const GroupTable& group() const { return *group_; }
  std::size_t k() const { return k_; }
  std::size_t dim() const { return dim_; }
  std::size_t guard() const { return guard_; }
  bool dense_allowed() const { return dim_ <= guard_; }
  std::size_t stride(std::size_t reg) const { return strides_[reg]; }

  void require_dense(const std::string& what) const {
    if (!dense_allowed())
      throw ResourceError(what + ": dimension " + std::to_string(dim_) + " exceeds the dense guard " +
                          std::to_string(guard_) + " (use ensemble mode or raise HARMONIC_SIEVE_GUARD)");
  }

  Element digit(std::size_t index, std::size_t reg) const {
    return static_cast<Element>((index / strides_[reg]) % group_->order());
  }

  std::size_t encode(std::span<const Element> digits) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < k_; ++i) idx += digits[i] * strides_[i];
    return idx;
  }

  RegisterMask full_mask() const { return static_cast<RegisterMask>((std::uint64_t{1} << k_) - 1); }

  // All nonempty subsets in increasing bitmask order.
  std::vector<RegisterMask> nonempty_subsets() const {
    std::vector<RegisterMask> out;
    for (RegisterMask m = 1; m <= full_mask(); ++m) out.push_back(m);
    return out;
  }

 private:
  const GroupTable* group_;
  std::size_t k_;
  std::size_t guard_;
  std::size_t dim_ = 1;
  std::vector<std::size_t> strides_;
};

// Projector onto the eta-isotypic component of the registers in I under the
// diagonal right action R_I(g) (every register in I goes x -> x g^-1):
//   Pi = (d_eta/|G|) sum_g chi_eta(g)^* R_I(g) (x) 1.
// Applied matrix-free in O(|G| |G|^k); dense form below the guard.
class SubsetProjector {
 public:
  SubsetProjector(const MultiRegisterSpace& space, const CharacterTable& ct, RegisterMask subset, std::size_t eta)
      : space_(&space), subset_(subset), eta_(eta) {
    if (subset == 0) throw DomainError("register subset must be nonempty");
    if ((subset & ~space.full_mask()) != 0) throw DomainError("register subset exceeds k");
    if (eta >= ct.num_irreps()) throw DomainError("irreducible index out of range");
    const auto& g = space.group();
    const double scale = static_cast<double>(ct.degree(eta)) / static_cast<double>(g.order());
    for (std::size_t a = 0; a < g.order(); ++a) {
      const cplx c = scale * std::conj(ct.chi(eta, static_cast<Element>(a)));
      if (std::abs(c) < 1e-15) continue;
      terms_.push_back({static_cast<Element>(a), c});
    }
    for (std::size_t i = 0; i < space.k(); ++i)
      if (subset >> i & 1U) regs_.push_back(i);
    expected_trace_ = static_cast<double>(ct.degree(eta)) * ct.degree(eta) / static_cast<double>(g.order()) *
                      static_cast<double>(space.dim());
  }

  RegisterMask subset() const { return subset_; }
  std::size_t eta() const { return eta_; }
  const MultiRegisterSpace& space() const { return *space_; }
  // d_eta^2 / |G| * |G|^k
  double expected_trace() const { return expected_trace_; }

  template <class F>
  void for_each_image(F&& f) const {
    const auto& g = space_->group();
    const std::size_t dim = space_->dim();
    std::vector<Element> digits(regs_.size());
    for (std::size_t x = 0; x < dim; ++x) {
      for (std::size_t r = 0; r < regs_.size(); ++r) digits[r] = space_->digit(x, regs_[r]);
      for (const auto& [a, c] : terms_) {
        const Element ainv = g.inv(a);
        std::size_t y = x;
        for (std::size_t r = 0; r < regs_.size(); ++r) {
          const Element moved = g.mul(digits[r], ainv);
          y = y + moved * space_->stride(regs_[r]) - digits[r] * space_->stride(regs_[r]);
        }
        f(y, x, c);
      }
    }
  }

  // Exact trace from the diagonal entries, no dense matrix.
  double trace() const {
    cplx t = 0.0;
    for_each_image([&](std::size_t y, std::size_t x, cplx c) {
      if (y == x) t += c;
    });
    return t.real();
  }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(space_->dim());
    for_each_image([&](std::size_t y, std::size_t x, cplx c) { out(y) += c * v(x); });
    return out;
  }

  // Pi * m, column by column.
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& m) const {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
    for_each_image([&](std::size_t y, std::size_t x, cplx c) { out.row(y) += c * m.row(x); });
    return out;
  }

  Eigen::MatrixXcd dense() const {
    space_->require_dense("dense subset projector");
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(space_->dim(), space_->dim());
    for_each_image([&](std::size_t y, std::size_t x, cplx c) { p(y, x) += c; });
    return p;
  }

 private:
  struct Term {
    Element g;
    cplx coef;
  };
  const MultiRegisterSpace* space_;
  RegisterMask subset_;
  std::size_t eta_;
  std::vector<Term> terms_;
  std::vector<std::size_t> regs_;
  double expected_trace_ = 0.0;
};

inline SubsetProjector subset_projector(const MultiRegisterSpace& space, const CharacterTable& ct, RegisterMask subset,
                                        std::size_t eta) {
  return SubsetProjector(space, ct, subset, eta);
}

enum class StateMode { Dense, Ensemble };

// k-register coset state: the uniform mixture of |c H^k> over c in G^k.
// Dense mode stores the density matrix; ensemble mode enumerates the
// (|G|/|H|)^k distinct pure coset vectors, each with weight (|H|/|G|)^k.
class CosetState {
 public:
  CosetState(const MultiRegisterSpace& space, Subgroup h, StateMode mode)
      : space_(&space), subgroup_(std::move(h)), mode_(mode) {
    const auto& g = space.group();
    cosets_ = left_cosets(g, subgroup_);
    coset_of_.assign(g.order(), 0);
    for (std::size_t c = 0; c < cosets_.size(); ++c)
      for (auto x : cosets_[c]) coset_of_[x] = c;
    num_tuples_ = 1;
    for (std::size_t i = 0; i < space.k(); ++i) num_tuples_ *= cosets_.size();
    if (mode == StateMode::Dense) {
      space.require_dense("dense coset state");
      const std::size_t dim = space.dim();
      const double w = 1.0 / static_cast<double>(dim);
      density_ = Eigen::MatrixXcd::Zero(dim, dim);
      for (std::size_t x = 0; x < dim; ++x)
        for (std::size_t y = 0; y < dim; ++y) {
          bool same = true;
          for (std::size_t i = 0; i < space.k() && same; ++i)
            same = coset_of_[space.digit(x, i)] == coset_of_[space.digit(y, i)];
          if (same) density_(x, y) = w;
        }
    }
  }

  const MultiRegisterSpace& space() const { return *space_; }
  const Subgroup& subgroup() const { return subgroup_; }
  StateMode mode() const { return mode_; }
  const std::vector<std::vector<Element>>& cosets() const { return cosets_; }

  std::size_t num_coset_tuples() const { return num_tuples_; }
  double tuple_weight() const { return 1.0 / static_cast<double>(num_tuples_); }

  // Coset tuple t (mixed radix over cosets, register 0 most significant).
  Eigen::VectorXcd coset_vector(std::size_t t) const {
    std::vector<std::size_t> which(space_->k());
    for (std::size_t i = space_->k(); i-- > 0;) {
      which[i] = t % cosets_.size();
      t /= cosets_.size();
    }
    return product_vector(which);
  }

  // |c H^k> for an arbitrary element tuple c.
  Eigen::VectorXcd coset_vector_of(std::span<const Element> reps) const {
    std::vector<std::size_t> which(space_->k());
    for (std::size_t i = 0; i < which.size(); ++i) which[i] = coset_of_[reps[i]];
    return product_vector(which);
  }

  const Eigen::MatrixXcd& density() const {
    if (mode_ != StateMode::Dense) throw DomainError("density matrix requested in ensemble mode");
    return density_;
  }

 private:
  Eigen::VectorXcd product_vector(const std::vector<std::size_t>& which) const {
    const std::size_t k = space_->k();
    const std::size_t h = subgroup_.order();
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(space_->dim());
    const double amp = std::pow(static_cast<double>(h), -0.5 * static_cast<double>(k));
    std::vector<std::size_t> pos(k, 0);
    for (;;) {
      std::size_t idx = 0;
      for (std::size_t i = 0; i < k; ++i) idx += cosets_[which[i]][pos[i]] * space_->stride(i);
      v(idx) = amp;
      std::size_t i = k;
      while (i-- > 0) {
        if (++pos[i] < h) break;
        pos[i] = 0;
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
    return v;
  }

  const MultiRegisterSpace* space_;
  Subgroup subgroup_;
  StateMode mode_;
  std::vector<std::vector<Element>> cosets_;
  std::vector<std::size_t> coset_of_;
  std::size_t num_tuples_ = 1;
  Eigen::MatrixXcd density_;
};

inline CosetState build_coset_state(const MultiRegisterSpace& space, const Subgroup& h, StateMode mode) {
  return CosetState(space, h, mode);
}

// Dense mode: ||Pi rho||_F. Ensemble mode: max over coset vectors ||Pi v||.
inline double verify_annihilation(const SubsetProjector& p, const CosetState& state) {
  if (state.mode() == StateMode::Dense) return p.apply(state.density()).norm();
  double worst = 0.0;
  for (std::size_t t = 0; t < state.num_coset_tuples(); ++t)
    worst = std::max(worst, p.apply(state.coset_vector(t)).norm());
  return worst;
}

inline Eigen::VectorXcd random_unit_vector(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXcd v(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(i) = cplx(re, im);
  }
  return v / v.norm();
}

struct TraceEstimate {
  cplx value;
  bool approximate = false;
};

// tr(Pi_I Pi_J). Exact (dense) below the guard; above it, only with
// allow_approximate, as a Hutchinson estimate over Gaussian probe vectors.
inline TraceEstimate pairwise_trace(const MultiRegisterSpace& space, const CharacterTable& ct, RegisterMask i,
                                    RegisterMask j, std::size_t eta, bool allow_approximate = false,
                                    std::size_t samples = 64, std::uint64_t seed = 1) {
  const SubsetProjector pi(space, ct, i, eta);
  const SubsetProjector pj(space, ct, j, eta);
  if (space.dense_allowed()) return {trace_of_product(pi.dense(), pj.dense()), false};
  if (!allow_approximate) space.require_dense("pairwise trace");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  cplx acc = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    Eigen::VectorXcd z(space.dim());
    for (std::size_t x = 0; x < space.dim(); ++x) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(x) = cplx(re, im) / std::sqrt(2.0);
    }
    acc += z.dot(pi.apply(pj.apply(z)));
  }
  return {acc / static_cast<double>(samples), true};
}

// Spectral data of M = sum over nonempty I of Pi_eta^I.
struct SpanAnalysis {
  std::size_t dim_w = 0;
  double fraction = 0.0;        // dim_w / |G|^k
  std::size_t num_subsets = 0;  // m = 2^k - 1
  double trace_m = 0.0;
  double frobenius_sq = 0.0;  // ||M||_F^2
  double lambda_max = 0.0;
  double threshold = 0.0;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd m;
  Eigen::MatrixXcd projector;  // onto W_eta, when requested
};

inline constexpr double kRankRelativeThreshold = 1e-8;

namespace detail {

// Counts eigenvalues above threshold; throws NumericalError if any falls
// within a factor 10 of the threshold.
inline std::size_t thresholded_rank(const Eigen::VectorXd& ev, double threshold, const std::string& what) {
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double lam = ev(i);
    if (lam > threshold / 10.0 && lam < threshold * 10.0) {
      std::ostringstream msg;
      msg << what << ": ambiguous rank, eigenvalue " << lam << " near threshold " << threshold << "; spectrum:";
      for (Eigen::Index j = 0; j < ev.size(); ++j) msg << ' ' << ev(j);
      throw NumericalError(msg.str());
    }
    if (lam >= threshold * 10.0) ++rank;
  }
  return rank;
}

}  // namespace detail

// dim W_eta with W_eta the span of all W_eta^I, from the eigenvalues of
// M = sum_I Pi_eta^I thresholded at 1e-8 * lambda_max.
inline SpanAnalysis analyze_span(const MultiRegisterSpace& space, const CharacterTable& ct, std::size_t eta,
                                 bool want_projector = false) {
  space.require_dense("span dimension");
  SpanAnalysis out;
  out.m = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
  for (auto mask : space.nonempty_subsets()) {
    const SubsetProjector p(space, ct, mask, eta);
    p.for_each_image([&](std::size_t y, std::size_t x, cplx c) { out.m(y, x) += c; });
    ++out.num_subsets;
  }
  out.trace_m = out.m.trace().real();
  out.frobenius_sq = out.m.squaredNorm();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(out.m, want_projector ? Eigen::ComputeEigenvectors
                                                                           : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("span dimension: eigensolver failed");
  out.eigenvalues = es.eigenvalues();
  out.lambda_max = out.eigenvalues.size() ? out.eigenvalues.maxCoeff() : 0.0;
  out.threshold = kRankRelativeThreshold * out.lambda_max;
  out.dim_w = detail::thresholded_rank(out.eigenvalues, out.threshold, "span dimension");
  out.fraction = static_cast<double>(out.dim_w) / static_cast<double>(space.dim());
  if (want_projector) {
    // eigenvalues ascending: the top dim_w eigenvectors span W_eta
    const auto cols = static_cast<Eigen::Index>(out.dim_w);
    const Eigen::MatrixXcd basis = es.eigenvectors().rightCols(cols);
    out.projector = basis * basis.adjoint();
  }
  return out;
}

inline std::size_t span_dimension(const MultiRegisterSpace& space, const CharacterTable& ct, std::size_t eta) {
  return analyze_span(space, ct, eta).dim_w;
}

// Lower bound on dim W / D for the span of m independent subspaces of
// dimension d in a space of dimension D: 1 - 1/(1 + m d/(D - d)).
inline double span_bound(double big_d, double m, double d) {
  if (!(d > 0.0) || !(d < big_d)) throw DomainError("span_bound requires 0 < d < D");
  if (m < 1.0) throw DomainError("span_bound requires m >= 1");
  return 1.0 - 1.0 / (1.0 + m * d / (big_d - d));
}

// ||M||_F^2 predicted by pairwise independence: m d + m(m-1) d^2 / D.
inline double independent_frobenius_sq(double big_d, double m, double d) { return m * d + m * (m - 1.0) * d * d / big_d; }

struct MeasurementStats {
  std::size_t trials = 0;
  std::size_t reports_trivial = 0;
  double empirical_frequency = 0.0;
  // exact Pr[report "trivial"]: tr(P_W)/|G|^k for the trivial subgroup,
  // tr(P_W rho_H) otherwise
  double expected_probability = 0.0;
  double standard_error = 0.0;
  double max_born_probability = 0.0;
};

// Two-outcome measurement {P_W, 1 - P_W}: "trivial" when W_eta is observed.
// Each trial draws a conjugate of the hidden subgroup (uniform conjugating
// element; none for the trivial subgroup) and a uniform coset tuple, and
// samples the Born probability ||P_W v||^2.
inline MeasurementStats simulate_measurement(const MultiRegisterSpace& space, const CharacterTable& ct,
                                             std::size_t eta, const std::optional<Subgroup>& hidden,
                                             std::size_t trials, std::uint64_t seed,
                                             const SpanAnalysis* precomputed = nullptr) {
  space.require_dense("measurement simulation");
  SpanAnalysis local;
  if (precomputed == nullptr || precomputed->projector.size() == 0) {
    local = analyze_span(space, ct, eta, true);
    precomputed = &local;
  }
  const Eigen::MatrixXcd& pw = precomputed->projector;
  const auto& g = space.group();
  const Subgroup h = hidden.value_or(trivial_subgroup(g));

  MeasurementStats stats;
  stats.trials = trials;
  if (h.is_trivial()) {
    stats.expected_probability = pw.trace().real() / static_cast<double>(space.dim());
  } else {
    const CosetState rho(space, h, StateMode::Dense);
    stats.expected_probability = trace_of_product(pw, rho.density()).real();
  }

  std::vector<CosetState> conjugates;
  conjugates.reserve(g.order());
  for (std::size_t c = 0; c < g.order(); ++c)
    conjugates.emplace_back(space, conjugate_subgroup(g, h, static_cast<Element>(c)), StateMode::Ensemble);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, g.order() - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<Element> reps(space.k());
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t c = h.is_trivial() ? 0 : pick(rng);
    for (auto& r : reps) r = static_cast<Element>(pick(rng));
    const Eigen::VectorXcd v = conjugates[c].coset_vector_of(reps);
    const double p = std::clamp((pw * v).squaredNorm(), 0.0, 1.0);
    stats.max_born_probability = std::max(stats.max_born_probability, p);
    if (coin(rng) < p) ++stats.reports_trivial;
  }
  if (trials > 0) {
    stats.empirical_frequency = static_cast<double>(stats.reports_trivial) / static_cast<double>(trials);
    const double p = stats.expected_probability;
    stats.standard_error = std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
  }
  return stats;
}

struct SigmaBlock {
  std::vector<std::size_t> sigma;  // one irreducible per register
  double plancherel = 0.0;         // prod d_sigma_i^2 / |G|
  std::size_t block_dim = 0;       // d_sigma^2
  std::size_t w_dim = 0;           // dim of W_eta inside the block
  double fraction = 0.0;           // w_dim / block_dim
};

struct SigmaDecomposition {
  std::vector<SigmaBlock> blocks;
  double weighted_average = 0.0;  // sum plancherel * fraction
  std::size_t total_w_dim = 0;
};

// Splits W_eta along the isotypic blocks of C[G^k] (blocks labelled by the
// right action, so k = 1 gives fraction 1 exactly on sigma = eta). Each
// block is restricted explicitly and its rank taken separately; the
// Plancherel-weighted average must reproduce dim W_eta / |G|^k.
inline SigmaDecomposition per_sigma_decomposition(const MultiRegisterSpace& space, const CharacterTable& ct,
                                                  std::size_t eta) {
  const SpanAnalysis span = analyze_span(space, ct, eta);
  const auto& g = space.group();
  const RegularRep right(g, RegularRep::Side::Right);
  std::vector<Eigen::MatrixXcd> bases;
  for (std::size_t s = 0; s < ct.num_irreps(); ++s) {
    const Eigen::MatrixXcd q = isotypic_projector(ct, s, right);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(q);
    const auto d2 = static_cast<Eigen::Index>(ct.degree(s) * ct.degree(s));
    bases.push_back(es.eigenvectors().rightCols(d2));
  }

  SigmaDecomposition out;
  const std::size_t r = ct.num_irreps();
  std::vector<std::size_t> sigma(space.k(), 0);
  for (;;) {
    Eigen::MatrixXcd basis = bases[sigma[0]];
    double planch = static_cast<double>(ct.degree(sigma[0]) * ct.degree(sigma[0])) / static_cast<double>(g.order());
    for (std::size_t i = 1; i < space.k(); ++i) {
      basis = kron(basis, bases[sigma[i]]);
      planch *= static_cast<double>(ct.degree(sigma[i]) * ct.degree(sigma[i])) / static_cast<double>(g.order());
    }
    const Eigen::MatrixXcd restricted = basis.adjoint() * span.m * basis;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(restricted, Eigen::EigenvaluesOnly);
    SigmaBlock block;
    block.sigma = sigma;
    block.plancherel = planch;
    block.block_dim = static_cast<std::size_t>(basis.cols());
    block.w_dim = detail::thresholded_rank(es.eigenvalues(), span.threshold, "per-sigma block rank");
    block.fraction = static_cast<double>(block.w_dim) / static_cast<double>(block.block_dim);
    out.weighted_average += block.plancherel * block.fraction;
    out.total_w_dim += block.w_dim;
    out.blocks.push_back(std::move(block));

    std::size_t i = space.k();
    while (i-- > 0) {
      if (++sigma[i] < r) break;
      sigma[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

}  // namespace hsieve
