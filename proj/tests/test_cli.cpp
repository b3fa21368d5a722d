#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "hsieve_cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "hsieve");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = hsieve::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json parse(const Result& r) { return nlohmann::json::parse(r.out); }

}  // namespace

TEST(Cli, AuditZ2ReportsSpanThree) {
  const auto r = run({"audit", "--group", "Z:2", "--k", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(r);
  EXPECT_EQ(j["span"]["dim_W"], 3);
  EXPECT_TRUE(j["pass"].get<bool>());
  for (const auto& c : j["checks"]) {
    EXPECT_TRUE(c.contains("residual"));
    EXPECT_TRUE(c.contains("anchor"));
  }
}

TEST(Cli, AuditDihedralFlip) {
  const auto r = run({"audit", "--group", "D:4", "--subgroup", "flip", "--k", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(r);
  EXPECT_GE(j["span"]["fraction"].get<double>(), 0.5);
  bool saw = false;
  for (const auto& c : j["checks"])
    if (c["name"] == "annihilation") {
      saw = true;
      EXPECT_LT(c["residual"].get<double>(), 1e-9);
    }
  EXPECT_TRUE(saw);
}

TEST(Cli, MalformedSpecExitsTwo) {
  EXPECT_EQ(run({"group", "--group", "Q:8!"}).code, 2);
  EXPECT_EQ(run({"audit", "--group", "D:4", "--subgroup", "(9,9)"}).code, 2);
  EXPECT_EQ(run({"measure", "--group", "D:4", "--eta", "chi9"}).code, 2);
  EXPECT_EQ(run({"nonsense"}).code, 2);
}

TEST(Cli, ResourceGuardExitsThree) {
  EXPECT_EQ(run({"group", "--group", "S:8"}).code, 3);
  ::setenv("HARMONIC_SIEVE_GUARD", "16", 1);
  const auto r = run({"measure", "--group", "D:4", "--k", "2"});
  ::unsetenv("HARMONIC_SIEVE_GUARD");
  EXPECT_EQ(r.code, 3);
}

TEST(Cli, SweepZ2Fractions) {
  const auto r = run({"sweep", "--group", "Z:2", "--kmin", "1", "--kmax", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "k,dim_W,fraction,lemma4_bound,p_trivial_report\n"
            "1,1,0.5,0.5,0.5\n"
            "2,3,0.75,0.75,0.75\n"
            "3,7,0.875,0.875,0.875\n");
}

TEST(Cli, SweepBoundNeverExceedsFraction) {
  const auto r = run({"sweep", "--group", "S:3", "--subgroup", "(1 2 3)", "--kmax", "3", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& row : parse(r)["rows"]) EXPECT_LE(row["lemma4_bound"].get<double>(), row["fraction"].get<double>());
}

TEST(Cli, SweepEmptyRangeAndSkippedRows) {
  const auto empty = run({"sweep", "--group", "Z:2", "--kmin", "3", "--kmax", "2"});
  EXPECT_EQ(empty.code, 0);
  EXPECT_EQ(empty.out, "k,dim_W,fraction,lemma4_bound,p_trivial_report\n");
  ::setenv("HARMONIC_SIEVE_GUARD", "64", 1);
  const auto r = run({"sweep", "--group", "D:4", "--subgroup", "flip", "--kmax", "3"});
  ::unsetenv("HARMONIC_SIEVE_GUARD");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("3,skipped(resource)"), std::string::npos);
}

TEST(Cli, MeasureSchema) {
  const auto r = run({"measure", "--group", "S:3", "--subgroup", "(1 2 3)", "--k", "2", "--trials", "200"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = parse(r);
  for (const char* key : {"group", "k", "eta", "dim_W", "fraction", "lemma4_bound", "p_trivial_report", "per_subset"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["per_subset"].size(), 3u);
  EXPECT_EQ(j["per_subset"][2]["I"], "{1,2}");
  EXPECT_EQ(j["eta"], "chi2");
  EXPECT_EQ(j["hidden_subgroup"]["reports_trivial"], 0);
}

TEST(Cli, DeterministicOutput) {
  const std::vector<std::string> args{"measure", "--group", "D:4", "--subgroup", "flip", "--k", "2",
                                      "--trials", "500", "--seed", "42"};
  EXPECT_EQ(run(args).out, run(args).out);
  const std::vector<std::string> kick{"kickback", "--group", "S:3", "--irreps", "chi2,chi2", "--eta", "chi2",
                                      "--trials", "50", "--seed", "7"};
  EXPECT_EQ(run(kick).out, run(kick).out);
}

TEST(Cli, ChartableCsv) {
  const auto r = run({"chartable", "--group", "S:3"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out,
            "irrep,(),(2 3),(1 2 3)\n"
            "chi0,1.000000+0.000000i,1.000000+0.000000i,1.000000+0.000000i\n"
            "chi1,1.000000+0.000000i,-1.000000+0.000000i,1.000000+0.000000i\n"
            "chi2,2.000000+0.000000i,0.000000+0.000000i,-1.000000+0.000000i\n");
}

TEST(Cli, HarmonicsAndRankAudit) {
  const auto h = run({"harmonics", "--group", "D:4", "--subgroup", "flip"});
  ASSERT_EQ(h.code, 0) << h.err;
  EXPECT_EQ(parse(h)["missing"].size(), 2u);
  const auto ra = run({"rank-audit", "--group", "S:4", "--subgroup", "every"});
  ASSERT_EQ(ra.code, 0) << ra.err;
  EXPECT_TRUE(parse(ra)["all_agree"].get<bool>());
  EXPECT_EQ(parse(ra)["subgroups"].size(), 30u);
}

TEST(Cli, AutoEtaNeedsMissingHarmonic) {
  EXPECT_EQ(run({"measure", "--group", "S:3", "--k", "1"}).code, 0);
  // every irreducible of S4 has a vector fixed by (1 2)(3 4)
  EXPECT_EQ(run({"measure", "--group", "S:4", "--subgroup", "(1 2)(3 4)", "--k", "1"}).code, 2);
  EXPECT_EQ(run({"measure", "--group", "S:4", "--subgroup", "(1 2)(3 4)", "--k", "1", "--eta", "chi1"}).code, 0);
}
