#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hsieve.hpp"

namespace hsieve::cli {

using json = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kResource = 3 };

struct ExperimentConfig {
  std::string group;
  std::string subgroup = "trivial";
  std::string eta = "auto";
  std::size_t k = 1;
  std::size_t trials = 0;
  std::uint64_t seed = 1;
  std::string mode = "dense";
  std::string out;
  std::string format = "json";
  std::size_t max_order = kDefaultMaxOrder;
  std::size_t kmin = 1;
  std::size_t kmax = 0;
  std::string irreps;
};

// Doubles rounded to 12 significant digits; non-finite values become null.
inline json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  if (v == 0.0) return 0.0;
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return std::stod(s.str());
}

inline std::string fixed12(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Splits on commas outside parentheses and brackets.
inline std::vector<std::string> split_top_level(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

inline Element parse_element(const GroupTable& g, const std::string& token) {
  if (token.empty()) throw SpecError("empty subgroup generator");
  if (token[0] == '#') {
    const std::string digits = token.substr(1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw SpecError("bad element index '" + token + "'");
    const auto idx = std::stoull(digits);
    if (idx >= g.order()) throw SpecError("element index out of range: " + token);
    return static_cast<Element>(idx);
  }
  if (auto e = g.find_label(token)) return *e;
  std::string compact;
  for (char c : token)
    if (c != ' ') compact += c;
  if (auto e = g.find_label(compact)) return *e;
  if (g.has_permutation_action() && token.front() == '(') {
    std::size_t pos = 0;
    const auto cycles = parse_cycles(token, pos);
    if (pos != token.size()) throw SpecError("trailing characters in permutation '" + token + "'");
    if (auto e = g.find_label(to_cycle_string(permutation_from_cycles(cycles, g.action_degree())))) return *e;
    throw SpecError("permutation " + token + " is not in the group");
  }
  throw SpecError("unknown element '" + token + "'");
}

// "trivial", "all", "flip" (dihedral reflection (0,1)), or a comma list of
// generators: element labels, "#index", or cycle notation for permutation
// groups.
inline Subgroup parse_subgroup(const GroupTable& g, const std::string& text) {
  const std::string t = trim(text);
  if (t.empty() || t == "trivial") return trivial_subgroup(g);
  if (t == "all") return whole_group(g);
  if (t == "flip") {
    if (g.family().kind != FamilyKind::Dihedral) throw SpecError("'flip' needs a dihedral group");
    return subgroup_closure(g, {*g.find_label("(0,1)")});
  }
  std::vector<Element> gens;
  for (const auto& tok : split_top_level(t)) gens.push_back(parse_element(g, tok));
  return subgroup_closure(g, gens);
}

inline json labels_of(const GroupTable& g, const std::vector<Element>& elems) {
  json out = json::array();
  for (auto e : elems) out.push_back(g.label(e));
  return out;
}

// eta selection: explicit label, or "auto" = first missing harmonic of H;
// for the trivial subgroup (which has none) the first nontrivial irreducible.
inline std::size_t select_eta(const GroupTable& g, const CharacterTable& ct, const Subgroup& h,
                              const std::string& text) {
  if (text != "auto") return ct.parse_label(text);
  if (h.is_trivial()) {
    if (ct.num_irreps() < 2) throw DomainError("the trivial group has no nontrivial irreducible");
    return 1;
  }
  const auto report = find_missing_harmonics(g, ct, h);
  if (report.missing.empty()) throw DomainError("subgroup has no missing harmonic; pass --eta explicitly");
  return report.missing.front();
}

inline void emit(const ExperimentConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw SpecError("cannot open output file " + cfg.out);
  f << text;
}

inline std::size_t ceil_log2(std::size_t n) {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

// ---------------------------------------------------------------- commands

inline int cmd_group(const ExperimentConfig& cfg, std::ostream& out) {
  const GroupTable g = build_group(cfg.group, cfg.max_order);
  json j;
  j["group"] = g.spec();
  j["family"] = family_name(g.family().kind);
  j["order"] = g.order();
  j["identity"] = g.label(g.identity());
  j["abelian"] = g.is_abelian();
  j["associative"] = g.is_associative();
  j["labels"] = g.labels();
  json classes = json::array();
  for (const auto& cls : g.classes())
    classes.push_back({{"representative", g.label(cls.front())}, {"size", cls.size()}, {"members", labels_of(g, cls)}});
  j["classes"] = classes;
  emit(cfg, j.dump(2) + "\n", out);
  return kOk;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline std::string complex_cell(cplx z) {
  auto clean = [](double x) { return std::abs(x) < 5e-7 ? 0.0 : x; };
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f%+.6fi", clean(z.real()), clean(z.imag()));
  return buf;
}

inline int cmd_chartable(const ExperimentConfig& cfg, std::ostream& out) {
  const GroupTable g = build_group(cfg.group, cfg.max_order);
  const CharacterTable ct = character_table(g);
  std::ostringstream s;
  s << "irrep";
  for (std::size_t c = 0; c < g.num_classes(); ++c) s << ',' << csv_field(g.label(g.class_representative(c)));
  s << '\n';
  for (std::size_t t = 0; t < ct.num_irreps(); ++t) {
    s << CharacterTable::label(t);
    for (std::size_t c = 0; c < ct.num_classes(); ++c) s << ',' << complex_cell(ct.value(t, c));
    s << '\n';
  }
  emit(cfg, s.str(), out);
  return kOk;
}

inline json condition_json(const GroupTable& g, const ConditionResult& c, Condition which) {
  json j;
  j["applicable"] = c.applicable;
  j["holds"] = c.holds;
  j["explanation"] = c.explanation;
  if (which == Condition::TransverseToNormal) {
    j["witness"] = c.normal_witness ? labels_of(g, c.normal_witness->members()) : json(nullptr);
  }
  if (which == Condition::SmallIndex) {
    j["index"] = c.index;
    j["degree_sum"] = c.degree_sum;
  }
  return j;
}

inline int cmd_harmonics(const ExperimentConfig& cfg, std::ostream& out) {
  const GroupTable g = build_group(cfg.group, cfg.max_order);
  const CharacterTable ct = character_table(g);
  const Subgroup h = parse_subgroup(g, cfg.subgroup);
  const HarmonicReport report = harmonic_report(g, ct, h);
  json j;
  j["group"] = g.spec();
  j["subgroup"] = labels_of(g, h.members());
  json missing = json::array();
  for (auto m : report.missing) missing.push_back(CharacterTable::label(m));
  j["missing"] = missing;
  json sums = json::array();
  for (double s : report.character_sums) sums.push_back(num(s));
  j["character_sums"] = sums;
  if (report.explicit_ranks) {
    j["explicit_ranks"] = *report.explicit_ranks;
    j["rank_cross_check"] = report.cross_check_agrees;
  } else {
    j["explicit_ranks"] = nullptr;
    j["rank_cross_check"] = nullptr;
  }
  json conds;
  for (int c = 0; c < 4; ++c) {
    const auto which = static_cast<Condition>(c);
    conds[condition_name(which)] = condition_json(g, report.conditions[c], which);
  }
  j["conditions"] = conds;
  emit(cfg, j.dump(2) + "\n", out);
  return report.cross_check_agrees && (!report.any_condition() || !report.missing.empty()) ? kOk : kCheckFailed;
}

inline int cmd_rank_audit(const ExperimentConfig& cfg, std::ostream& out) {
  const GroupTable g = build_group(cfg.group, cfg.max_order);
  const CharacterTable ct = character_table(g);
  std::vector<Subgroup> subgroups;
  if (cfg.subgroup == "every") subgroups = all_subgroups(g);
  else subgroups.push_back(parse_subgroup(g, cfg.subgroup));
  const bool explicit_ok = supports_explicit_irreps(g);
  std::vector<IrrepMatrices> irreps;
  if (explicit_ok) irreps = all_irrep_matrices(g, ct);
  const RegularRep reg(g, RegularRep::Side::Left);
  const bool reg_dense = g.order() <= dense_guard_from_env();

  json rows = json::array();
  bool all_agree = true;
  for (const auto& h : subgroups) {
    long weighted = 0;
    for (std::size_t t = 0; t < ct.num_irreps(); ++t) {
      std::size_t rank = 0;
      if (explicit_ok) {
        rank = rank_of_projector(subgroup_average(irreps[t], h));
      } else {
        // trace of the projection tau(H) from characters
        cplx s = 0.0;
        for (auto x : h.members()) s += ct.chi(t, x);
        rank = static_cast<std::size_t>(std::llround(s.real() / static_cast<double>(h.order())));
      }
      weighted += ct.degree(t) * static_cast<long>(rank);
    }
    const std::size_t index = g.order() / h.order();
    json row;
    row["subgroup"] = labels_of(g, h.members());
    row["order"] = h.order();
    row["index"] = index;
    row["weighted_rank_sum"] = weighted;
    if (reg_dense) {
      const std::size_t reg_rank = rank_of_projector(subgroup_average(reg, h));
      row["regular_rank"] = reg_rank;
      all_agree = all_agree && reg_rank == index;
    } else {
      row["regular_rank"] = nullptr;
    }
    row["method"] = explicit_ok ? "explicit" : "character";
    row["agrees"] = static_cast<long>(index) == weighted;
    all_agree = all_agree && static_cast<long>(index) == weighted;
    rows.push_back(row);
  }
  json j;
  j["group"] = g.spec();
  j["subgroups"] = rows;
  j["all_agree"] = all_agree;
  emit(cfg, j.dump(2) + "\n", out);
  return all_agree ? kOk : kCheckFailed;
}

inline StateMode parse_mode(const std::string& m) {
  if (m == "dense") return StateMode::Dense;
  if (m == "ensemble") return StateMode::Ensemble;
  throw SpecError("mode must be dense or ensemble");
}

// Shared core of `measure` and `sweep`.
struct MeasureResult {
  json report;
  std::optional<SpanAnalysis> span;
  double bound = std::numeric_limits<double>::quiet_NaN();
  double p_trivial_report = std::numeric_limits<double>::quiet_NaN();
};

inline MeasureResult run_measure(const GroupTable& g, const CharacterTable& ct, const Subgroup& h, std::size_t eta,
                                 const ExperimentConfig& cfg, std::size_t k) {
  const MultiRegisterSpace space(g, k, dense_guard_from_env());
  const StateMode mode = parse_mode(cfg.mode);
  if (mode == StateMode::Dense) space.require_dense("measure");
  MeasureResult res;
  json& j = res.report;
  j["group"] = g.spec();
  j["subgroup"] = labels_of(g, h.members());
  j["k"] = k;
  j["eta"] = CharacterTable::label(eta);
  j["mode"] = cfg.mode;
  j["dimension"] = space.dim();

  const double big_d = static_cast<double>(space.dim());
  const double d = static_cast<double>(ct.degree(eta) * ct.degree(eta)) / static_cast<double>(g.order()) * big_d;
  const double m = static_cast<double>(space.nonempty_subsets().size());
  res.bound = d < big_d ? span_bound(big_d, m, d) : std::numeric_limits<double>::quiet_NaN();

  if (space.dense_allowed()) {
    res.span = analyze_span(space, ct, eta, true);
    j["dim_W"] = res.span->dim_w;
    j["fraction"] = num(res.span->fraction);
  } else {
    j["dim_W"] = nullptr;
    j["fraction"] = nullptr;
  }
  j["lemma4_bound"] = num(res.bound);

  if (res.span) {
    const MeasurementStats triv = simulate_measurement(space, ct, eta, std::nullopt, cfg.trials, cfg.seed, &*res.span);
    res.p_trivial_report = cfg.trials > 0 ? triv.empirical_frequency : triv.expected_probability;
    j["p_trivial_report"] = num(res.p_trivial_report);
    j["p_trivial_expected"] = num(triv.expected_probability);
    j["trials"] = cfg.trials;
    if (!h.is_trivial()) {
      const MeasurementStats hid = simulate_measurement(space, ct, eta, h, cfg.trials, cfg.seed + 1, &*res.span);
      j["hidden_subgroup"] = {{"p_trivial_report", num(cfg.trials > 0 ? hid.empirical_frequency : hid.expected_probability)},
                              {"p_trivial_expected", num(hid.expected_probability)},
                              {"reports_trivial", hid.reports_trivial},
                              {"max_born_probability", num(hid.max_born_probability)}};
    }
  } else {
    j["p_trivial_report"] = nullptr;
  }

  std::optional<CosetState> state;
  if (mode == StateMode::Ensemble || space.dense_allowed()) state.emplace(space, h, mode);
  json per = json::array();
  for (auto mask : space.nonempty_subsets()) {
    const SubsetProjector p(space, ct, mask, eta);
    json row;
    row["I"] = subset_label(mask);
    row["trace"] = num(p.trace());
    row["annihilation_residual"] = state ? num(verify_annihilation(p, *state)) : json(nullptr);
    per.push_back(row);
  }
  j["per_subset"] = per;
  return res;
}

inline int cmd_measure(const ExperimentConfig& cfg, std::ostream& out) {
  const GroupTable g = build_group(cfg.group, cfg.max_order);
  const CharacterTable ct = character_table(g);
  const Subgroup h = parse_subgroup(g, cfg.subgroup);
  const std::size_t eta = select_eta(g, ct, h, cfg.eta);
  if (cfg.k == 0) throw DomainError("k must be at least 1");
  const MeasureResult res = run_measure(g, ct, h, eta, cfg, cfg.k);
  if (cfg.format == "csv") {
    std::ostringstream s;
    s << "I,trace,annihilation_residual\n";
    for (const auto& row : res.report["per_subset"])
      s << csv_field(row["I"].get<std::string>()) << ',' << row["trace"].dump() << ','
        << row["annihilation_residual"].dump() << '\n';
    emit(cfg, s.str(), out);
  } else {
    emit(cfg, res.report.dump(2) + "\n", out);
  }
  return kOk;
}

inline int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out) {
  const GroupTable g = build_group(cfg.group, cfg.max_order);
  const CharacterTable ct = character_table(g);
  const Subgroup h = parse_subgroup(g, cfg.subgroup);
  const std::size_t eta = select_eta(g, ct, h, cfg.eta);
  std::ostringstream csv;
  csv << "k,dim_W,fraction,lemma4_bound,p_trivial_report\n";
  json rows = json::array();
  bool monotone = true;
  double last = -1.0;
  for (std::size_t k = std::max<std::size_t>(cfg.kmin, 1); k <= cfg.kmax; ++k) {
    std::optional<MeasureResult> res;
    try {
      res = run_measure(g, ct, h, eta, cfg, k);
    } catch (const ResourceError&) {
    }
    if (!res || !res->span) {
      csv << k << ",skipped(resource),,,\n";
      rows.push_back({{"k", k}, {"status", "skipped(resource)"}});
      continue;
    }
    const auto& sp = *res->span;
    monotone = monotone && sp.fraction >= last;
    last = sp.fraction;
    csv << k << ',' << sp.dim_w << ',' << fixed12(sp.fraction) << ',' << fixed12(res->bound) << ','
        << fixed12(res->p_trivial_report) << '\n';
    rows.push_back({{"k", k},
                    {"dim_W", sp.dim_w},
                    {"fraction", num(sp.fraction)},
                    {"lemma4_bound", num(res->bound)},
                    {"p_trivial_report", num(res->p_trivial_report)}});
  }
  if (cfg.format == "json") {
    json j;
    j["group"] = g.spec();
    j["eta"] = CharacterTable::label(eta);
    j["rows"] = rows;
    j["fraction_monotone"] = monotone;
    emit(cfg, j.dump(2) + "\n", out);
  } else {
    emit(cfg, csv.str(), out);
  }
  return kOk;
}

inline std::vector<std::size_t> parse_irrep_list(const CharacterTable& ct, const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& tok : split_top_level(text)) out.push_back(ct.parse_label(tok));
  if (out.empty()) throw SpecError("--irreps needs at least one irreducible");
  return out;
}

inline int cmd_kickback(const ExperimentConfig& cfg, std::ostream& out) {
  const GroupTable g = build_group(cfg.group, cfg.max_order);
  const CharacterTable ct = character_table(g);
  const auto irreps = parse_irrep_list(ct, cfg.irreps);
  const std::size_t eta = ct.parse_label(cfg.eta == "auto" ? "chi1" : cfg.eta);
  const KickbackCircuit circuit = KickbackCircuit::from_irreps(g, ct, irreps);
  const Eigen::MatrixXcd target_projector = isotypic_projector(ct, eta, std::span(circuit.target_actions()));
  std::optional<Eigen::MatrixXcd> fourier;
  if (supports_explicit_irreps(g)) fourier = fourier_transform_matrix(g, ct);

  std::mt19937_64 rng(cfg.seed);
  std::size_t observed = 0;
  double expected = 0.0, residual = 0.0, fourier_residual = 0.0;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const Eigen::VectorXcd input = random_unit_vector(circuit.target_dim(), rng);
    const KickbackOutcome o = circuit.measure(eta, input, rng);
    observed += o.observed;
    expected += o.probability;
    residual = std::max(residual, std::abs(o.probability - (target_projector * input).squaredNorm()));
    if (fourier)
      fourier_residual = std::max(fourier_residual, std::abs(o.probability - circuit.outcome_probability_fourier(eta, input, *fourier)));
  }
  json j;
  j["group"] = g.spec();
  json names = json::array();
  for (auto s : irreps) names.push_back(CharacterTable::label(s));
  j["irreps"] = names;
  j["eta"] = CharacterTable::label(eta);
  j["target_dim"] = circuit.target_dim();
  j["multiplicity"] = tensor_decompose(ct, irreps)[eta];
  j["trials"] = cfg.trials;
  j["p_eta_observed"] = cfg.trials ? num(static_cast<double>(observed) / static_cast<double>(cfg.trials)) : json(nullptr);
  j["p_eta_expected"] = cfg.trials ? num(expected / static_cast<double>(cfg.trials)) : json(nullptr);
  j["cross_check_residual"] = num(residual);
  j["fourier_residual"] = fourier ? num(fourier_residual) : json(nullptr);
  j["intertwining_residual"] = num(circuit.verify_intertwining());
  emit(cfg, j.dump(2) + "\n", out);
  return residual < 1e-10 && fourier_residual < 1e-10 ? kOk : kCheckFailed;
}

// One audit line: the measured residual against its tolerance.
struct Check {
  std::string name;
  std::string anchor;
  double residual;
  double tolerance;
  bool pass() const { return std::isfinite(residual) && residual <= tolerance; }
};

inline int cmd_audit(const ExperimentConfig& cfg, std::ostream& out) {
  const GroupTable g = build_group(cfg.group, cfg.max_order);
  const CharacterTable ct = character_table(g);
  const Subgroup h = parse_subgroup(g, cfg.subgroup);
  const std::size_t eta = select_eta(g, ct, h, cfg.eta);
  if (cfg.k == 0) throw DomainError("k must be at least 1");
  const MultiRegisterSpace space(g, cfg.k, dense_guard_from_env());
  const StateMode mode = parse_mode(cfg.mode);
  if (mode == StateMode::Dense) space.require_dense("audit");
  std::vector<Check> checks;

  checks.push_back({"associativity", "multiplication table is associative", g.is_associative() ? 0.0 : 1.0, 0.0});
  checks.push_back({"character_row_orthogonality", "irreducible characters are orthonormal",
                    ct.row_orthogonality_residual(), 1e-10});
  checks.push_back({"character_column_orthogonality", "second orthogonality relation",
                    ct.column_orthogonality_residual(), 1e-10});
  checks.push_back({"plancherel_normalization", "sum of squared degrees equals |G|",
                    std::abs(static_cast<double>(ct.degree_square_sum()) - static_cast<double>(g.order())), 0.0});

  const HarmonicReport report = harmonic_report(g, ct, h);
  if (!h.is_trivial()) {
    checks.push_back({"sufficient_conditions", "any sufficient condition implies a missing harmonic",
                      report.any_condition() && report.missing.empty() ? 1.0 : 0.0, 0.0});
    checks.push_back({"eta_missing", "eta(H) = 0 via the character sum over H",
                      report.character_sums[eta] / static_cast<double>(h.order()), kCharacterSumTolerance});
  }

  std::optional<CosetState> state;
  if (!h.is_trivial() && (mode == StateMode::Ensemble || space.dense_allowed())) state.emplace(space, h, mode);
  const double expected_trace = static_cast<double>(ct.degree(eta) * ct.degree(eta)) /
                                static_cast<double>(g.order()) * static_cast<double>(space.dim());
  double trace_res = 0.0, proj_res = 0.0, annih = 0.0, indep = 0.0;
  std::vector<Eigen::MatrixXcd> dense;
  for (auto mask : space.nonempty_subsets()) {
    const SubsetProjector p(space, ct, mask, eta);
    trace_res = std::max(trace_res, std::abs(p.trace() - expected_trace));
    if (state) annih = std::max(annih, verify_annihilation(p, *state));
    if (space.dense_allowed()) {
      dense.push_back(p.dense());
      proj_res = std::max({proj_res, idempotence_residual(dense.back()), hermiticity_residual(dense.back())});
    }
  }
  checks.push_back({"subset_trace", "tr Pi_eta^I = (d_eta^2/|G|) |G|^k for every nonempty I", trace_res, 1e-8});
  if (state) checks.push_back({"annihilation", "Pi_eta^I rho = 0 for every nonempty I", annih, 1e-9});

  json span_json = nullptr;
  if (space.dense_allowed()) {
    checks.push_back({"subset_projector", "every Pi_eta^I is an orthogonal projection", proj_res, 1e-9});
    const double target = expected_trace * expected_trace / static_cast<double>(space.dim());
    for (std::size_t a = 0; a < dense.size(); ++a)
      for (std::size_t b = 0; b < dense.size(); ++b)
        if (a != b) indep = std::max(indep, std::abs(trace_of_product(dense[a], dense[b]) - target) / target);
    dense.clear();
    if (space.nonempty_subsets().size() > 1)
      checks.push_back({"pairwise_independence", "tr Pi^I Pi^J = (d_eta^2/|G|)^2 |G|^k for I != J", indep, 1e-8});

    const SpanAnalysis span = analyze_span(space, ct, eta, cfg.trials > 0 || !h.is_trivial());
    const double big_d = static_cast<double>(space.dim());
    const double m = static_cast<double>(span.num_subsets);
    const double d = expected_trace;
    if (d < big_d) {
      const double bound = span_bound(big_d, m, d);
      checks.push_back({"span_bound", "dim W_eta / |G|^k >= 1 - 1/(1 + m d/(D - d))",
                        std::max(0.0, bound - span.fraction), 1e-12});
      const double frob = independent_frobenius_sq(big_d, m, d);
      checks.push_back({"frobenius_identity", "||sum Pi||_F^2 = m d + m(m-1) d^2 / D",
                        std::abs(span.frobenius_sq - frob) / frob, 1e-6});
      span_json = {{"dim_W", span.dim_w}, {"fraction", num(span.fraction)}, {"lemma4_bound", num(bound)}};
    }
    if (cfg.k >= ceil_log2(g.order()))
      checks.push_back({"half_fraction", "dim W_eta / |G|^k >= 1/2 once k >= log2 |G|",
                        std::max(0.0, 0.5 - span.fraction), 0.0});
    if (cfg.trials > 0) {
      const auto triv = simulate_measurement(space, ct, eta, std::nullopt, cfg.trials, cfg.seed, &span);
      checks.push_back({"trivial_report_frequency", "empirical Pr[trivial] matches dim W_eta/|G|^k",
                        std::abs(triv.empirical_frequency - triv.expected_probability),
                        3.0 * triv.standard_error + 1e-12});
      if (!h.is_trivial()) {
        const auto hid = simulate_measurement(space, ct, eta, h, cfg.trials, cfg.seed + 1, &span);
        checks.push_back({"no_false_trivial", "conjugates of H never report trivial",
                          static_cast<double>(hid.reports_trivial), 0.0});
      }
    }
  }

  bool all = true;
  json list = json::array();
  for (const auto& c : checks) {
    all = all && c.pass();
    list.push_back({{"name", c.name},
                    {"anchor", c.anchor},
                    {"residual", num(c.residual)},
                    {"tolerance", num(c.tolerance)},
                    {"pass", c.pass()}});
  }
  json j;
  j["group"] = g.spec();
  j["subgroup"] = labels_of(g, h.members());
  j["k"] = cfg.k;
  j["eta"] = CharacterTable::label(eta);
  j["span"] = span_json;
  j["checks"] = list;
  j["pass"] = all;
  emit(cfg, j.dump(2) + "\n", out);
  return all ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- driver

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiregister Fourier sampling toolkit for small finite groups", "hsieve"};
  app.require_subcommand(1);
  ExperimentConfig cfg;

  auto add_group = [&](CLI::App* sub) {
    sub->add_option("--group,-g", cfg.group, "group spec: Z:n, D:n, S:n, Z2^n, prod(a,b), perm[...]")->required();
    sub->add_option("--max-order", cfg.max_order, "group order cap");
    sub->add_option("--out,-o", cfg.out, "output file (default stdout)");
  };
  auto add_experiment = [&](CLI::App* sub) {
    add_group(sub);
    sub->add_option("--subgroup", cfg.subgroup, "trivial | all | flip | comma-separated generators");
    sub->add_option("--eta", cfg.eta, "irreducible label chi<i>, or auto");
    sub->add_option("--trials", cfg.trials, "measurement trials");
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--mode", cfg.mode, "dense | ensemble")->check(CLI::IsMember({"dense", "ensemble"}));
  };

  auto* group = app.add_subcommand("group", "print elements and conjugacy classes");
  add_group(group);
  auto* chartable = app.add_subcommand("chartable", "print the character table as CSV");
  add_group(chartable);
  auto* harmonics = app.add_subcommand("harmonics", "missing harmonics and sufficient conditions");
  add_group(harmonics);
  harmonics->add_option("--subgroup", cfg.subgroup, "trivial | all | flip | comma-separated generators");
  auto* rank = app.add_subcommand("rank-audit", "sum_tau d_tau rk tau(H) = |G|/|H| per subgroup");
  add_group(rank);
  cfg.subgroup = "trivial";
  rank->add_option("--subgroup", cfg.subgroup, "subgroup, or 'every' for all subgroups");
  auto* measure = app.add_subcommand("measure", "span measurement for one register count");
  add_experiment(measure);
  measure->add_option("--k", cfg.k, "register count")->check(CLI::PositiveNumber);
  measure->add_option("--format", cfg.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  auto* kick = app.add_subcommand("kickback", "controlled G-action measurement on a tensor target");
  add_group(kick);
  kick->add_option("--irreps", cfg.irreps, "comma-separated irreducible labels of the target")->required();
  kick->add_option("--eta", cfg.eta, "irreducible to detect");
  kick->add_option("--trials", cfg.trials, "random inputs");
  kick->add_option("--seed", cfg.seed, "random seed");
  auto* audit = app.add_subcommand("audit", "run every identity check for one configuration");
  add_experiment(audit);
  audit->add_option("--k", cfg.k, "register count")->check(CLI::PositiveNumber);
  auto* sweep = app.add_subcommand("sweep", "fraction, bound and report rate over a range of k");
  add_experiment(sweep);
  sweep->add_option("--kmin", cfg.kmin, "first k");
  sweep->add_option("--kmax", cfg.kmax, "last k (empty range if below kmin)");
  cfg.format = "csv";
  sweep->add_option("--format", cfg.format, "csv | json")->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  if (!sweep->parsed() && !measure->parsed() && cfg.format == "csv" && !chartable->parsed()) cfg.format = "json";
  if (measure->parsed() && measure->count("--format") == 0) cfg.format = "json";

  try {
    if (group->parsed()) return cmd_group(cfg, out);
    if (chartable->parsed()) return cmd_chartable(cfg, out);
    if (harmonics->parsed()) return cmd_harmonics(cfg, out);
    if (rank->parsed()) return cmd_rank_audit(cfg, out);
    if (measure->parsed()) return cmd_measure(cfg, out);
    if (kick->parsed()) return cmd_kickback(cfg, out);
    if (audit->parsed()) return cmd_audit(cfg, out);
    if (sweep->parsed()) return cmd_sweep(cfg, out);
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << '\n';
    return kResource;
  } catch (const SpecError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "check failed: " << e.what() << '\n';
    return kCheckFailed;
  }
  return kUsage;
}

}  // namespace hsieve::cli
