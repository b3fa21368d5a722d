#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hsieve/characters.hpp"
#include "hsieve/errors.hpp"
#include "hsieve/group.hpp"
#include "hsieve/linalg.hpp"
#include "hsieve/representations.hpp"

namespace hsieve {

struct KickbackOutcome {
  bool observed = false;  // eta seen on the control register
  double probability = 0.0;
  Eigen::VectorXcd post_state;
};

// State-vector model of C[G] (x) V with V = (x)_{i in I} sigma_i. Basis index
// of |g> (x) |v> is g * dim V + v. The controlled action is
//   M |g>|phi> = |g> sigma_I(g^-1) |phi>,
// and eta is detected on the control register with the left-regular
// isotypic projector (d_eta/|G|) sum_h chi_eta(h)^* L_h, L_h|g> = |hg>.
class KickbackCircuit {
 public:
  KickbackCircuit(const GroupTable& g, const CharacterTable& ct, const std::vector<IrrepMatrices>& factors)
      : group_(&g), ct_(&ct) {
    if (factors.empty()) throw DomainError("kickback target needs at least one irreducible");
    for (const auto& f : factors) {
      if (f.mats.size() != g.order()) throw DomainError("irreducible matrices do not match the group");
      factor_indices_.push_back(f.irrep_index);
    }
    target_.resize(g.order());
    for (std::size_t x = 0; x < g.order(); ++x) {
      Eigen::MatrixXcd m = factors.front().mats[x];
      for (std::size_t i = 1; i < factors.size(); ++i) m = kron(m, factors[i].mats[x]);
      target_[x] = std::move(m);
    }
    target_dim_ = static_cast<std::size_t>(target_.front().rows());
  }

  // Builds the target from irreducible indices; throws UnsupportedError when
  // explicit matrices are unavailable for one of them.
  static KickbackCircuit from_irreps(const GroupTable& g, const CharacterTable& ct,
                                     const std::vector<std::size_t>& irreps) {
    std::vector<IrrepMatrices> factors;
    if (supports_explicit_irreps(g)) {
      auto all = all_irrep_matrices(g, ct);
      for (auto s : irreps) {
        if (s >= all.size()) throw DomainError("irreducible index out of range");
        factors.push_back(all[s]);
      }
    } else {
      for (auto s : irreps) factors.push_back(irrep_matrices(g, ct, s));
    }
    return KickbackCircuit(g, ct, factors);
  }

  const GroupTable& group() const { return *group_; }
  const std::vector<std::size_t>& factor_indices() const { return factor_indices_; }
  std::size_t control_dim() const { return group_->order(); }
  std::size_t target_dim() const { return target_dim_; }
  std::size_t total_dim() const { return control_dim() * target_dim_; }
  // sigma_I(g) on V
  const Eigen::MatrixXcd& target_action(Element g) const { return target_[g]; }
  const std::vector<Eigen::MatrixXcd>& target_actions() const { return target_; }

  // |G> (x) input
  Eigen::VectorXcd prepare(const Eigen::VectorXcd& input) const {
    check_target(input);
    Eigen::VectorXcd state(total_dim());
    const double amp = 1.0 / std::sqrt(static_cast<double>(control_dim()));
    for (std::size_t g = 0; g < control_dim(); ++g) state.segment(block(g), target_dim_) = amp * input;
    return state;
  }

  Eigen::VectorXcd controlled_g_action(const Eigen::VectorXcd& state) const {
    check_state(state);
    Eigen::VectorXcd out(total_dim());
    for (std::size_t g = 0; g < control_dim(); ++g)
      out.segment(block(g), target_dim_) =
          target_[group_->inv(static_cast<Element>(g))] * state.segment(block(g), target_dim_);
    return out;
  }

  // (Pi_eta (x) 1) state, Pi_eta acting on the control register.
  Eigen::VectorXcd project_control(std::size_t eta, const Eigen::VectorXcd& state) const {
    check_state(state);
    const auto& g = *group_;
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(total_dim());
    const double scale = static_cast<double>(ct_->degree(eta)) / static_cast<double>(g.order());
    for (std::size_t h = 0; h < g.order(); ++h) {
      const cplx c = scale * std::conj(ct_->chi(eta, static_cast<Element>(h)));
      if (std::abs(c) < 1e-15) continue;
      for (std::size_t x = 0; x < g.order(); ++x) {
        const Element hx = g.mul(static_cast<Element>(h), static_cast<Element>(x));
        out.segment(block(hx), target_dim_) += c * state.segment(block(x), target_dim_);
      }
    }
    return out;
  }

  // Pr[eta observed] for a normalized input on V.
  double outcome_probability(std::size_t eta, const Eigen::VectorXcd& input) const {
    return project_control(eta, controlled_g_action(prepare(input))).squaredNorm();
  }

  // Same probability through the literal circuit: Fourier transform on the
  // control register, then the weight on the rows (eta, i, j).
  double outcome_probability_fourier(std::size_t eta, const Eigen::VectorXcd& input,
                                     const Eigen::MatrixXcd& fourier) const {
    const Eigen::VectorXcd state = controlled_g_action(prepare(input));
    const auto n = static_cast<Eigen::Index>(control_dim());
    const auto d = static_cast<Eigen::Index>(target_dim_);
    // reshape: column g of `grid` is the V-block of control value g
    const Eigen::MatrixXcd grid = Eigen::Map<const Eigen::MatrixXcd>(state.data(), d, n);
    const Eigen::MatrixXcd transformed = grid * fourier.transpose();
    std::size_t offset = 0;
    for (std::size_t s = 0; s < eta; ++s) offset += static_cast<std::size_t>(ct_->degree(s) * ct_->degree(s));
    const auto rows = static_cast<Eigen::Index>(ct_->degree(eta) * ct_->degree(eta));
    return transformed.middleCols(static_cast<Eigen::Index>(offset), rows).squaredNorm();
  }

  // Born-rule sample of {Pi_eta, 1 - Pi_eta} on the control register.
  KickbackOutcome measure(std::size_t eta, const Eigen::VectorXcd& input, std::mt19937_64& rng) const {
    if (std::abs(input.norm() - 1.0) > 1e-9) throw DomainError("kickback input must be normalized");
    const Eigen::VectorXcd state = controlled_g_action(prepare(input));
    const Eigen::VectorXcd inside = project_control(eta, state);
    KickbackOutcome out;
    out.probability = std::clamp(inside.squaredNorm(), 0.0, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    out.observed = coin(rng) < out.probability;
    const Eigen::VectorXcd post = out.observed ? inside : Eigen::VectorXcd(state - inside);
    const double norm = post.norm();
    out.post_state = norm > 0.0 ? Eigen::VectorXcd(post / norm) : post;
    return out;
  }

  Eigen::MatrixXcd controlled_action_matrix() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(total_dim(), total_dim());
    for (std::size_t g = 0; g < control_dim(); ++g)
      m.block(block(g), block(g), target_dim_, target_dim_) = target_[group_->inv(static_cast<Element>(g))];
    return m;
  }

  // D_h |g>|phi> = |hg> sigma_I(h)|phi>
  Eigen::MatrixXcd diagonal_action_matrix(Element h) const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(total_dim(), total_dim());
    for (std::size_t g = 0; g < control_dim(); ++g)
      m.block(block(group_->mul(h, static_cast<Element>(g))), block(g), target_dim_, target_dim_) = target_[h];
    return m;
  }

  // L_h |g>|phi> = |hg>|phi>
  Eigen::MatrixXcd control_action_matrix(Element h) const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(total_dim(), total_dim());
    const auto d = static_cast<Eigen::Index>(target_dim_);
    for (std::size_t g = 0; g < control_dim(); ++g)
      m.block(block(group_->mul(h, static_cast<Element>(g))), block(g), d, d) = Eigen::MatrixXcd::Identity(d, d);
    return m;
  }

  // max over h of ||M D_h - L_h M||_F
  double verify_intertwining() const {
    const Eigen::MatrixXcd m = controlled_action_matrix();
    double worst = 0.0;
    for (std::size_t h = 0; h < control_dim(); ++h) {
      const auto e = static_cast<Element>(h);
      worst = std::max(worst, (m * diagonal_action_matrix(e) - control_action_matrix(e) * m).norm());
    }
    return worst;
  }

 private:
  Eigen::Index block(std::size_t g) const { return static_cast<Eigen::Index>(g * target_dim_); }
  void check_state(const Eigen::VectorXcd& s) const {
    if (static_cast<std::size_t>(s.size()) != total_dim()) throw DomainError("state dimension mismatch");
  }
  void check_target(const Eigen::VectorXcd& s) const {
    if (static_cast<std::size_t>(s.size()) != target_dim_) throw DomainError("target dimension mismatch");
  }

  const GroupTable* group_;
  const CharacterTable* ct_;
  std::vector<std::size_t> factor_indices_;
  std::vector<Eigen::MatrixXcd> target_;
  std::size_t target_dim_ = 1;
};

inline KickbackOutcome kickback_measure(const KickbackCircuit& circuit, std::size_t eta, const Eigen::VectorXcd& input,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return circuit.measure(eta, input, rng);
}

// Fourier transform on C[G]: F[(sigma, i, j), g] = sqrt(d_sigma/|G|) sigma(g)_ij,
// rows ordered by irreducible index, then i, then j.
inline Eigen::MatrixXcd fourier_transform_matrix(const GroupTable& g, const CharacterTable& ct) {
  const auto irreps = all_irrep_matrices(g, ct);
  const auto n = static_cast<Eigen::Index>(g.order());
  Eigen::MatrixXcd f(n, n);
  Eigen::Index row = 0;
  for (const auto& rep : irreps) {
    const double scale = std::sqrt(static_cast<double>(rep.degree) / static_cast<double>(g.order()));
    const auto d = static_cast<Eigen::Index>(rep.degree);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j, ++row)
        for (Eigen::Index x = 0; x < n; ++x) f(row, x) = scale * rep.mats[static_cast<std::size_t>(x)](i, j);
  }
  return f;
}

}  // namespace hsieve
