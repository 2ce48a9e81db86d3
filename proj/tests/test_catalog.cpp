#include <cmath>
#include <string>

#include "dcq/catalog.hpp"
#include "dcq/conjugate.hpp"
#include "doctest.h"

using namespace dcq;

namespace {

const double kE = std::exp(1.0);

const CheckResult& check(const std::vector<CheckResult>& cs, const std::string& id) {
  for (const auto& c : cs)
    if (c.id == id) return c;
  FAIL("missing check " << id);
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("families: names, parameters, t0") {
  CHECK(to_string(family("analytic").expr()) == "t*log(t)");
  CHECK(family("analytic").t0() == 1.0);
  CHECK(family("loglog").t0() == 20.0);
  CHECK(family("logloglog").t0() == 20.0);
  CHECK(family("shifted:logloglog:2").t0() == 10.0);

  const double t = 50.0;
  CHECK(family("shifted:logloglog:2").m(t) ==
        doctest::Approx(2 * t * std::log(2 * t) + 2 * t * std::log(std::log(std::log(2 * t)))).epsilon(1e-14));

  for (const char* n : {"analytic", "loglog", "logloglog", "shifted:loglog:3", "shifted:analytic:2"})
    CHECK(FamilySpec::parse(n).name() == n);
  CHECK(FamilySpec::parse("shifted:loglog:1").name() == "loglog");
  CHECK_THROWS_AS(FamilySpec::parse("sin"), std::invalid_argument);
  CHECK_THROWS_AS(FamilySpec::parse("shifted:loglog:0"), std::invalid_argument);
  CHECK_THROWS_AS(FamilySpec::parse("shifted:loglog"), std::invalid_argument);
}

TEST_CASE("families: every catalog entry passes validate on [t0, 1e8]") {
  CHECK(catalog_families().size() == 9);
  for (const FamilySpec& spec : catalog_families()) {
    const WeightFunction w = family(spec);
    CAPTURE(spec.name());
    CHECK(w.report().passed);
    CHECK(w.t_max() == 1e8);
    CHECK(w.t0() == doctest::Approx(spec.recommended_t0()));
  }
}

TEST_CASE("families: m <= m_p on the grid for loglog and logloglog") {
  for (Base b : {Base::loglog, Base::logloglog}) {
    const WeightFunction w = family(FamilySpec{b, 1});
    for (int p = 2; p <= 3; ++p) {
      const WeightFunction wp = family(FamilySpec{b, p});
      for (double t : log_spaced(w.t0(), 1e8, 200)) CHECK(w.m(t) <= wp.m(t));
    }
  }
}

TEST_CASE("reduced shifted loglog differs from m(pt) by p log(p) t") {
  for (int p = 2; p <= 4; ++p) {
    const WeightFunction r = reduced_shifted_loglog(p), s = family(FamilySpec{Base::loglog, p});
    CHECK(r.t0() == doctest::Approx(20.0 / p));
    for (double t : {10.0, 1e3, 1e7}) CHECK(s.m(t) - r.m(t) == doctest::Approx(p * std::log(p) * t).epsilon(1e-11));
  }
}

TEST_CASE("loglog example reproduction") {
  const LoglogReproduction r = reproduce_loglog_example();
  CHECK(r.passed);
  CHECK(r.reference == "ex4.9");
  CHECK(r.rows.size() == 32);
  for (const auto& row : r.rows) {
    // independent evaluation of the identity
    CHECK(row.omega == doctest::Approx(row.t_star + row.t_star / std::log(row.t_star)).epsilon(1e-9));
    CHECK(row.identity_error <= 1e-9);
    CHECK(row.s_form_error <= 1e-9);
  }
  for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(r.rows[i].ratio < r.rows[i - 1].ratio);
  CHECK(r.rows.back().ratio > 1.0);
  CHECK(r.ratio_near_1e12 < 1.2);
  CHECK(r.ratio_near_1e12 == doctest::Approx(1.16).epsilon(0.01));
  CHECK(r.diagnostics.verdict == Verdict::quasianalytic);
  for (const auto& c : r.checks) CHECK_MESSAGE(c.passed, c.id);

  // ratio near t* = 1e6 is larger
  const WeightFunction w = family("loglog");
  const double t = 1e6, L = std::log(t);
  const double ls = L + std::log(L) + 1.0 + 1.0 / L;
  const double ratio6 = (t + t / L) * kE * ls / std::exp(ls);
  CHECK(ratio6 == doctest::Approx(1.27).epsilon(0.01));
  CHECK(r.ratio_near_1e12 < ratio6);
  CHECK(omega_log(w, ls) == doctest::Approx(t + t / L).epsilon(1e-9));
}

TEST_CASE("shifted loglog reproduction, p = 2, 3, 4") {
  for (int p = 2; p <= 4; ++p) {
    const ShiftedReproduction r = reproduce_shifted_loglog(p);
    CAPTURE(p);
    CHECK(r.passed);
    CHECK(r.reference == "ex5.2:p=" + std::to_string(p));
    CHECK(r.K_expected == doctest::Approx(p * p / kE));
    CHECK(r.fit.alpha == doctest::Approx(1.0 / p).epsilon(0.05 * p));
    CHECK(std::abs(r.fit.K - r.K_expected) <= 0.25 * r.K_expected);
    CHECK(r.max_identity_error <= 1e-9);
    CHECK(r.tail_change < 0.01);
    CHECK(r.inclusion_slack_min >= 0.0);
    CHECK(r.diagnostics.verdict == Verdict::not_quasianalytic);
    for (const auto& c : r.checks) CHECK_MESSAGE(c.passed, c.id);
    CHECK(check(r.checks, "verdict").passed);
  }
  CHECK(reproduce_shifted_loglog(2).fit.K == doctest::Approx(4.0 / kE).epsilon(0.25));
  CHECK(reproduce_shifted_loglog(3).fit.K == doctest::Approx(9.0 / kE).epsilon(0.25));
  CHECK_THROWS_AS(reproduce_shifted_loglog(1), std::invalid_argument);
  CHECK_THROWS_AS(reproduce_shifted_loglog(5), std::invalid_argument);
}

TEST_CASE("tilde probe reports claim and findings side by side") {
  const TildeProbe probe = probe_tilde_family(2);
  CHECK(probe.reference == "tilde:p_max=2");
  CHECK(probe.p_max == 2);
  CHECK_FALSE(probe.claim.empty());
  REQUIRE(probe.entries.size() == 2);

  const TildeEntry& e1 = probe.entries[0];
  CHECK(e1.p == 1);
  CHECK(e1.computed_verdict == "quasianalytic");
  CHECK(e1.agrees_with_claim);
  CHECK(e1.inclusion_condition_holds);
  CHECK(e1.internally_consistent);

  // m~(t) <= m(t) pointwise since log log log t <= log log t
  const WeightFunction m = family("loglog"), mt = family("logloglog");
  for (double t : log_spaced(20.0, 1e8, 100)) CHECK(mt.m(t) <= m.m(t));

  const TildeEntry& e2 = probe.entries[1];
  CHECK(e2.p == 2);
  CHECK(e2.family == "shifted:logloglog:2");
  CHECK(e2.claimed_verdict == "quasianalytic");
  CHECK(e2.computed_verdict == to_string(e2.diagnostics.verdict));
  CHECK(e2.agrees_with_claim == (e2.computed_verdict == e2.claimed_verdict));
  CHECK(e2.internally_consistent);
  CHECK(e2.diagnostics.series == e2.diagnostics.integral);

  // (m~_2 - m)/t = 2 log 2 + 2 log log log 2t + log t - log log t grows
  const WeightFunction m2 = family("shifted:logloglog:2");
  CHECK((m2.m(1e8) - m.m(1e8)) / 1e8 > (m2.m(1e3) - m.m(1e3)) / 1e3 + 1.0);
  CHECK_FALSE(e2.inclusion_condition_holds);

  CHECK_THROWS_AS(probe_tilde_family(0), std::invalid_argument);
  CHECK_THROWS_AS(probe_tilde_family(5), std::invalid_argument);
}
