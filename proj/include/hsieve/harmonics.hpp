#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hsieve/characters.hpp"
#include "hsieve/group.hpp"
#include "hsieve/representations.hpp"

namespace hsieve {

// Absolute zero-test tolerance for a character sum over H, scaled by |H|.
inline constexpr double kCharacterSumTolerance = 1e-8;

// The four sufficient conditions for H to have a missing harmonic.
enum class Condition { NormalNontrivial = 0, TransverseToNormal = 1, SymmetricTransitive = 2, SmallIndex = 3 };

inline std::string condition_name(Condition c) {
  switch (c) {
    case Condition::NormalNontrivial: return "normal_nontrivial";
    case Condition::TransverseToNormal: return "meets_every_coset_of_proper_normal";
    case Condition::SymmetricTransitive: return "symmetric_transitive";
    case Condition::SmallIndex: return "index_below_degree_sum";
  }
  return "unknown";
}

struct ConditionResult {
  bool applicable = true;
  bool holds = false;
  std::string explanation;
  std::optional<Subgroup> normal_witness;  // K for TransverseToNormal
  long degree_sum = 0;                     // C for SmallIndex
  std::size_t index = 0;                   // |G|/|H| for SmallIndex
};

struct HarmonicReport {
  Subgroup subgroup;
  std::vector<std::size_t> missing;
  // |sum_{h in H} chi_eta(h)| for every irreducible
  std::vector<double> character_sums;
  // rank eta(H) from explicit matrices when the family supports them
  std::optional<std::vector<std::size_t>> explicit_ranks;
  bool cross_check_agrees = true;
  std::array<ConditionResult, 4> conditions{};

  bool any_condition() const {
    for (const auto& c : conditions)
      if (c.holds) return true;
    return false;
  }
};

// eta is missing for H iff |sum_{h in H} chi_eta(h)| < 1e-8 |H|, since
// eta(H) is a projection with trace (1/|H|) sum chi_eta(h). When explicit
// matrices are available the result is cross-checked against rank eta(H).
inline HarmonicReport find_missing_harmonics(const GroupTable& g, const CharacterTable& ct, const Subgroup& h) {
  HarmonicReport report;
  report.subgroup = h;
  const double tol = kCharacterSumTolerance * static_cast<double>(h.order());
  for (std::size_t eta = 0; eta < ct.num_irreps(); ++eta) {
    cplx s = 0.0;
    for (auto x : h.members()) s += ct.chi(eta, x);
    report.character_sums.push_back(std::abs(s));
    if (std::abs(s) < tol) report.missing.push_back(eta);
  }
  if (supports_explicit_irreps(g)) {
    std::vector<std::size_t> ranks;
    for (const auto& rep : all_irrep_matrices(g, ct)) ranks.push_back(rank_of_projector(subgroup_average(rep, h)));
    for (std::size_t eta = 0; eta < ranks.size(); ++eta) {
      const bool missing = std::find(report.missing.begin(), report.missing.end(), eta) != report.missing.end();
      if (missing != (ranks[eta] == 0)) report.cross_check_agrees = false;
    }
    report.explicit_ranks = std::move(ranks);
  }
  return report;
}

// Evaluates the four sufficient conditions and stores them in the report.
//  1. H normal and nontrivial.
//  2. HK = G for some proper normal K (H meets every coset of K); normal
//     subgroups are enumerated exhaustively, the smallest witness is kept.
//  3. G is the full symmetric group on n >= 2 points and H is transitive;
//     not applicable for other groups.
//  4. |G|/|H| < C = sum of degrees.
inline std::array<ConditionResult, 4> sufficient_conditions(const GroupTable& g, const CharacterTable& ct,
                                                            const Subgroup& h) {
  std::array<ConditionResult, 4> out{};

  auto& c1 = out[0];
  const bool normal = is_normal(g, h);
  c1.holds = normal && !h.is_trivial();
  c1.explanation = std::string(normal ? "normal" : "not normal") + ", |H| = " + std::to_string(h.order());

  auto& c2 = out[1];
  c2.explanation = "no proper normal subgroup K with HK = G";
  for (const auto& k : normal_subgroups(g)) {
    if (k.order() == g.order()) continue;
    std::size_t meet = 0;
    for (auto x : h.members()) meet += k.contains(x);
    if (h.order() * k.order() == g.order() * meet) {
      c2.holds = true;
      c2.normal_witness = k;
      c2.explanation = "HK = G for normal K of order " + std::to_string(k.order());
      break;
    }
  }

  auto& c3 = out[2];
  if (!detail::is_full_symmetric(g) || g.action_degree() < 2) {
    c3.applicable = false;
    c3.explanation = "group is not a symmetric group S_n with n >= 2";
  } else {
    c3.holds = is_transitive(g, h);
    c3.explanation = c3.holds ? "H is transitive" : "H is intransitive";
  }

  auto& c4 = out[3];
  c4.degree_sum = ct.degree_sum();
  c4.index = g.order() / h.order();
  c4.holds = static_cast<long>(c4.index) < c4.degree_sum;
  c4.explanation = "|G|/|H| = " + std::to_string(c4.index) + ", C = " + std::to_string(c4.degree_sum);
  return out;
}

// Missing harmonics together with the sufficient-condition audit.
inline HarmonicReport harmonic_report(const GroupTable& g, const CharacterTable& ct, const Subgroup& h) {
  HarmonicReport report = find_missing_harmonics(g, ct, h);
  report.conditions = sufficient_conditions(g, ct, h);
  return report;
}

}  // namespace hsieve
