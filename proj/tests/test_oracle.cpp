#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "qwalk/bound_states.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/oracle.hpp"
#include "qwalk/walk.hpp"

using namespace qwalk;

TEST_CASE("stationary residual splits into truncation and formula error") {
  // margin 0: the truncation edge sits inside the comparison window, so the
  // residual is dominated by the documented tail bound but not negligible.
  const oracle::ResidualReport r0 =
      oracle::stationary_residual(Branch::plus, 0.5, 5, 0);
  CHECK(r0.tail_bound == doctest::Approx(2.0 * std::pow(0.2, 10)).epsilon(1e-12));
  CHECK(r0.residual * r0.residual <= r0.tail_bound);
  CHECK(r0.residual > std::sqrt(r0.tail_bound) / 100.0);

  // margin 2: the edge leaves the window and only rounding remains.
  const oracle::ResidualReport r2 =
      oracle::stationary_residual(Branch::plus, 0.5, 5, 2);
  CHECK(r2.residual < 1e-12);
  CHECK(r0.residual > 100.0 * r2.residual);
}

TEST_CASE("stationary residual at production window is rounding-level") {
  for (double phi : {1.0 / 6.0, 0.4, 0.5, 0.85}) {
    for (Branch b : {Branch::plus, Branch::minus}) {
      if (!exists(b, phi)) continue;
      const oracle::ResidualReport r = oracle::stationary_residual(b, phi, 200, 2);
      CHECK(r.residual < 1e-10);
    }
  }
}

TEST_CASE("char_poly_residual measures distance from the root") {
  const complexd l = lambda_pm(Branch::minus, 0.4);
  const complexd x{x_pm(Branch::minus, 0.4), 0.0};
  CHECK(oracle::char_poly_residual(l, x) < 1e-13);
  CHECK(oracle::char_poly_residual(l, 1.0 / x) < 1e-13);
  CHECK(oracle::char_poly_residual(l, x + 0.05) > 1e-3);
}

TEST_CASE("derivation chain holds identity by identity") {
  const oracle::ChainReport rep = oracle::recurrence_chain_check(0.4, Branch::minus);
  CHECK(rep.passed);
  CHECK(rep.first_failure.empty());
  CHECK(rep.identities.size() >= 17);
  for (const auto& id : rep.identities) {
    INFO("identity ", id.name);
    CHECK(id.passed);
    CHECK(id.error < rep.tol);
  }
  // The named key steps are all present.
  for (const char* name :
       {"lambda-unimodular", "char-poly-x", "char-poly-inv-x",
        "defect-pair-product", "normalization-series", "coefficient-magnitudes"}) {
    const bool found = std::any_of(
        rep.identities.begin(), rep.identities.end(),
        [&](const oracle::IdentityCheck& id) { return id.name == name; });
    INFO("looking for ", name);
    CHECK(found);
  }
}

TEST_CASE("derivation chain passes on both branches over a phi sweep") {
  for (int k = 1; k <= 9; ++k) {
    const double phi = k / 10.0;
    for (Branch b : {Branch::plus, Branch::minus}) {
      if (!exists(b, phi)) continue;
      const oracle::ChainReport rep = oracle::recurrence_chain_check(phi, b);
      INFO("phi ", phi, " branch ", branch_name(b));
      CHECK(rep.passed);
    }
  }
}

TEST_CASE("path sum refuses exponential blowups and negative times") {
  const PhaseDefect d = PhaseDefect::with_phi(0.3);
  CHECK_THROWS_AS(oracle::path_sum_distribution(1.0, 0.0, d, 13), CostError);
  CHECK_THROWS_AS(oracle::path_sum_distribution(1.0, 0.0, d, -1), DomainError);
}

TEST_CASE("path sum reproduces the evolution engine exactly") {
  const double inv = 1.0 / std::sqrt(2.0);
  for (double phi : {0.25, 0.5, 0.85}) {
    const PhaseDefect d = PhaseDefect::with_phi(phi);
    for (int t : {0, 1, 5, 8}) {
      const auto paths = oracle::path_sum_distribution(inv, complexd{0.0, inv}, d, t);
      const auto engine = position_distribution(
          evolve(initial_state(inv, complexd{0.0, inv}), d, t));
      CHECK(oracle::total_variation(paths, engine) < 1e-12);
    }
  }
  // t = 0 is the initial point mass.
  const auto p0 = oracle::path_sum_distribution(1.0, 0.0, PhaseDefect::none(), 0);
  REQUIRE(p0.size() == 1);
  CHECK(p0[0].first == 0);
  CHECK(p0[0].second == doctest::Approx(1.0));
}

TEST_CASE("total_variation basics") {
  using Dist = std::vector<std::pair<int, double>>;
  const Dist a{{0, 0.5}, {2, 0.5}};
  const Dist b{{0, 0.5}, {2, 0.5}};
  CHECK(oracle::total_variation(a, b) == doctest::Approx(0.0));
  const Dist c{{0, 1.0}};
  CHECK(oracle::total_variation(a, c) == doctest::Approx(0.5).epsilon(1e-14));
  const Dist d{{10, 1.0}};
  CHECK(oracle::total_variation(c, d) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(oracle::total_variation(a, d) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sign pairing is consistent at discriminating probes") {
  const oracle::SignPairing p6 = oracle::resolve_sign_pairing(1.0 / 6.0);
  CHECK(p6.consistent);
  CHECK(p6.dynamics_sign == p6.formula_sign);
  CHECK(p6.dynamics_sign == -1);
  CHECK(p6.p0_orthogonal < 0.02);
  CHECK(std::abs(p6.p0_localizing - p6.predicted_limit) < 0.02);

  const oracle::SignPairing p85 = oracle::resolve_sign_pairing(0.85);
  CHECK(p85.consistent);
  CHECK(p85.dynamics_sign == 1);
}

TEST_CASE("sign pairing refuses a probe that cannot discriminate") {
  // At phi = 1/2 the two candidate coin states have equal overlap; neither
  // dynamics nor formulas can pick a winner there.
  CHECK_THROWS_AS(oracle::resolve_sign_pairing(0.5), DomainError);
}

TEST_CASE("long-time origin occupancy matches the projection prediction") {
  const oracle::AsymptoticsReport r = oracle::asymptotic_origin_probability(
      1.0, 0.0, PhaseDefect::with_phi(0.5));
  CHECK(r.predicted == doctest::Approx(0.64).epsilon(1e-12));
  CHECK(r.overlap_total == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(std::abs(r.empirical - r.predicted) < 0.01);
  CHECK(r.empirical <= r.overlap_total + 0.01);
  CHECK(r.trapped_window >= r.overlap_total - 0.01);
}

TEST_CASE("no defect means no trapping") {
  const oracle::AsymptoticsReport r =
      oracle::asymptotic_origin_probability(1.0, 0.0, PhaseDefect::none());
  CHECK(r.predicted == 0.0);
  CHECK(r.overlap_total == 0.0);
  CHECK(r.empirical < 3e-3);
}

TEST_CASE("full suite passes clean and its JSON round-trips") {
  const oracle::VerificationReport rep = oracle::run_full_suite();
  CHECK(rep.passed);
  CHECK(rep.checks.size() >= 14);
  for (const auto& c : rep.checks) {
    INFO("check ", c.name);
    CHECK(c.passed);
  }
  CHECK(rep.pairings.size() == 2);

  const std::string json = oracle::report_to_json(rep);
  const nlohmann::json parsed = nlohmann::json::parse(json);
  CHECK(parsed.at("passed").get<bool>() == true);
  CHECK(parsed.at("perturb").get<double>() == 0.0);
  CHECK(parsed.at("checks").is_array());
  CHECK(parsed.at("checks").size() == rep.checks.size());
  CHECK(parsed.at("checks").at(0).contains("name"));
  CHECK(parsed.at("checks").at(0).contains("worst"));
  CHECK(parsed.at("sign_pairings").size() == 2);
}

TEST_CASE("an injected formula defect turns the suite red") {
  oracle::SuiteOptions opt;
  opt.perturb = 1e-2;
  opt.perturb_target = "lambda";
  const oracle::VerificationReport rep = oracle::run_full_suite(opt);
  CHECK_FALSE(rep.passed);
  const bool unimodular_red = std::any_of(
      rep.checks.begin(), rep.checks.end(), [](const oracle::CheckResult& c) {
        return c.name == "lambda-unimodular-grid" && !c.passed;
      });
  CHECK(unimodular_red);
}
