#include "dcq/catalog.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dcq/conjugate.hpp"

namespace dcq {

std::string to_string(Base b) {
  switch (b) {
    case Base::analytic: return "analytic";
    case Base::loglog: return "loglog";
    case Base::logloglog: return "logloglog";
  }
  return "analytic";
}

Base base_from_string(const std::string& s) {
  for (Base b : {Base::analytic, Base::loglog, Base::logloglog})
    if (to_string(b) == s) return b;
  throw std::invalid_argument("unknown family '" + s + "' (expected analytic, loglog or logloglog)");
}

std::string FamilySpec::name() const {
  if (!shifted()) return to_string(base);
  return "shifted:" + to_string(base) + ":" + std::to_string(p);
}

namespace {

double base_t0(Base b) { return b == Base::analytic ? 1.0 : 20.0; }

const char* base_expr(Base b) {
  switch (b) {
    case Base::analytic: return "t*log(t)";
    case Base::loglog: return "t*log(t) + t*log(log(t))";
    case Base::logloglog: return "t*log(t) + t*log(log(log(t)))";
  }
  return "t*log(t)";
}

}  // namespace

double FamilySpec::recommended_t0() const { return base_t0(base) / p; }

FamilySpec FamilySpec::parse(const std::string& name) {
  FamilySpec spec;
  const std::string prefix = "shifted:";
  if (name.rfind(prefix, 0) != 0) {
    spec.base = base_from_string(name);
    return spec;
  }
  const std::string rest = name.substr(prefix.size());
  const auto colon = rest.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("family '" + name + "': expected shifted:<base>:<p>");
  spec.base = base_from_string(rest.substr(0, colon));
  const std::string ps = rest.substr(colon + 1);
  std::size_t used = 0;
  int p = 0;
  try {
    p = std::stoi(ps, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != ps.size() || p < 1)
    throw std::invalid_argument("family '" + name + "': shift must be a positive integer");
  spec.p = p;
  return spec;
}

WeightFunction family(const FamilySpec& spec) {
  WeightOptions opts;
  opts.label = to_string(spec.base);
  const WeightFunction base = WeightFunction::create(parse_weight(base_expr(spec.base)), base_t0(spec.base), opts);
  if (!spec.shifted()) return base;
  WeightFunction w = shift(base, spec.p);
  return w;
}

WeightFunction family(const std::string& name) { return family(FamilySpec::parse(name)); }

std::vector<FamilySpec> catalog_families() {
  std::vector<FamilySpec> out;
  for (Base b : {Base::analytic, Base::loglog, Base::logloglog})
    for (int p : {1, 2, 3}) out.push_back({b, p});
  return out;
}

WeightFunction reduced_shifted_loglog(int p) {
  if (p < 1) throw std::invalid_argument("reduced_shifted_loglog: p must be positive");
  std::ostringstream os;
  os << p << "*t*log(t) + " << p << "*t*log(log(" << p << "*t))";
  WeightOptions opts;
  opts.label = "reduced:loglog:" + std::to_string(p);
  return WeightFunction::create(parse_weight(os.str()), 20.0 / p, opts);
}

namespace {

CheckResult check(std::string id, bool ok, double value, double limit, std::string detail = {}) {
  return {std::move(id), ok, value, limit, std::move(detail)};
}

bool all_passed(const std::vector<CheckResult>& cs) {
  for (const auto& c : cs)
    if (!c.passed) return false;
  return true;
}

}  // namespace

LoglogReproduction reproduce_loglog_example() {
  LoglogReproduction rep;
  const WeightFunction w = family(FamilySpec{Base::loglog, 1});

  double max_identity = 0.0, max_s_form = 0.0;
  bool decreasing = true;
  double best_dist = std::numeric_limits<double>::infinity();
  for (double t : log_spaced(1e2, 1e14, 32)) {
    LoglogRow row;
    row.t_star = t;
    row.s_log = w.dm(t);
    row.omega = omega_log(w, row.s_log);
    const double lt = std::log(t);
    row.identity_error = std::abs(row.omega - (t + t / lt)) / row.omega;
    // s = e t log t e^{1/log t}, compared in log form
    row.s_form_error = std::abs(std::expm1(1.0 + lt + std::log(lt) + 1.0 / lt - row.s_log));
    row.ratio = std::exp(std::log(row.omega) + 1.0 + std::log(row.s_log) - row.s_log);
    if (!rep.rows.empty() && !(row.ratio < rep.rows.back().ratio)) decreasing = false;
    const double dist = std::abs(std::log10(t) - 12.0);
    if (dist < best_dist) {
      best_dist = dist;
      rep.ratio_near_1e12 = row.ratio;
    }
    max_identity = std::max(max_identity, row.identity_error);
    max_s_form = std::max(max_s_form, row.s_form_error);
    rep.rows.push_back(row);
  }

  rep.checks.push_back(check("omega_identity", max_identity <= 1e-9, max_identity, 1e-9));
  rep.checks.push_back(check("s_form", max_s_form <= 1e-9, max_s_form, 1e-9));
  const double last = rep.rows.back().ratio;
  rep.checks.push_back(check("ratio_decreasing", decreasing && last > 1.0, last, 1.0,
                             decreasing ? "strictly decreasing, above 1" : "not strictly decreasing"));
  rep.checks.push_back(check("ratio_near_1e12", rep.ratio_near_1e12 < 1.2, rep.ratio_near_1e12, 1.2));

  rep.diagnostics = classify_quasianalytic(w);
  rep.checks.push_back(check("verdict", rep.diagnostics.verdict == Verdict::quasianalytic, 0.0, 0.0,
                             to_string(rep.diagnostics.verdict)));
  rep.passed = all_passed(rep.checks);
  return rep;
}

ShiftedReproduction reproduce_shifted_loglog(int p) {
  if (p < 2 || p > 4) throw std::invalid_argument("reproduce_shifted_loglog: p must be 2, 3 or 4");
  ShiftedReproduction rep;
  rep.p = p;
  rep.reference = "ex5.2:p=" + std::to_string(p);
  const WeightFunction w = reduced_shifted_loglog(p);
  const double pd = p;

  // (i) omega_p(s) = p t* + p t*/log(p t*) on the reduced form.
  for (double t : log_spaced(std::max(w.t0(), 1e2), 1e14, 32)) {
    const double om = omega_log(w, w.dm(t));
    const double expect = pd * t + pd * t / std::log(pd * t);
    rep.max_identity_error = std::max(rep.max_identity_error, std::abs(om - expect) / om);
  }
  rep.checks.push_back(check("omega_identity", rep.max_identity_error <= 1e-9, rep.max_identity_error, 1e-9));

  // (ii) omega_p(s) ~ K s^{1/p} / log s with K = p^2/e.
  const DiagnosticsOptions opts;
  const double off = std::max(0.0, w.dm(w.t0()) + 2.0 - opts.fit_lo_log);
  rep.fit_lo_log = opts.fit_lo_log + off;
  rep.fit_hi_log = opts.fit_hi_log + off;
  rep.fit = growth_exponent_fit_log(w, rep.fit_lo_log, rep.fit_hi_log, opts.fit_points);
  rep.K_expected = pd * pd / std::exp(1.0);
  const double a_err = std::abs(rep.fit.alpha - 1.0 / pd);
  // With alpha identified, the conditional log exponent is the better estimate.
  const double beta = rep.fit.snapped ? rep.fit.beta_given_alpha : rep.fit.beta;
  const double b_err = std::abs(beta + 1.0);
  const double k_err = std::abs(rep.fit.K - rep.K_expected) / rep.K_expected;
  rep.checks.push_back(check("alpha", a_err <= 0.05, rep.fit.alpha, 1.0 / pd));
  rep.checks.push_back(check("beta", b_err <= 0.2, beta, -1.0));
  rep.checks.push_back(check("K", k_err <= 0.25, rep.fit.K, rep.K_expected));

  // Convergent tail: extending the integral from e^25 to e^30 changes it by < 1%.
  const double i25 = omega_integral(w, std::exp(15.0 + off), std::exp(25.0 + off));
  const double i30 = i25 + omega_integral(w, std::exp(25.0 + off), std::exp(30.0 + off));
  rep.tail_change = (i30 - i25) / i25;
  rep.checks.push_back(check("tail_change", rep.tail_change < 0.01, rep.tail_change, 0.01));

  // (iii)
  rep.diagnostics = classify_quasianalytic(w);
  rep.checks.push_back(check("verdict", rep.diagnostics.verdict == Verdict::not_quasianalytic, 0.0, 0.0,
                             to_string(rep.diagnostics.verdict)));

  // (iv) m_2(t) <= m_p(t) for the plain shifts, so C_{M_2} sits inside C_{M_p}.
  const WeightFunction base = family(FamilySpec{Base::loglog, 1});
  const WeightFunction m2 = shift(base, 2), mp = shift(base, p);
  rep.inclusion_slack_min = std::numeric_limits<double>::infinity();
  for (double t : log_spaced(m2.t0(), 1e8, 256))
    rep.inclusion_slack_min = std::min(rep.inclusion_slack_min, mp.m(t) - m2.m(t));
  rep.checks.push_back(check("inclusion", rep.inclusion_slack_min >= 0.0, rep.inclusion_slack_min, 0.0));

  rep.passed = all_passed(rep.checks);
  return rep;
}

TildeProbe probe_tilde_family(int p_max) {
  if (p_max < 1 || p_max > 4) throw std::invalid_argument("probe_tilde_family: p_max must be in [1, 4]");
  TildeProbe probe;
  probe.p_max = p_max;
  probe.reference = "tilde:p_max=" + std::to_string(p_max);
  probe.claim = "quasianalytic for every p >= 1, by inclusion in the loglog class";

  const WeightFunction m = family(FamilySpec{Base::loglog, 1});
  for (int p = 1; p <= p_max; ++p) {
    TildeEntry e;
    e.p = p;
    const FamilySpec spec{Base::logloglog, p};
    e.family = spec.name();
    const WeightFunction w = family(spec);
    e.diagnostics = classify_quasianalytic(w);
    e.computed_verdict = to_string(e.diagnostics.verdict);
    e.agrees_with_claim = e.diagnostics.verdict == Verdict::quasianalytic;
    e.internally_consistent = e.diagnostics.criteria_agree;

    // m~_p <= m + a t + b needs (m~_p - m)/t bounded above. Growth of the
    // supremum from the head of the grid to its last decade is the witness.
    const double lo = std::max(w.t0(), m.t0()), hi = 1e8;
    e.quotient_head_max = -std::numeric_limits<double>::infinity();
    e.quotient_tail_max = -std::numeric_limits<double>::infinity();
    for (double t : log_spaced(lo, hi, 512)) {
      const double q = (w.m(t) - m.m(t)) / t;
      double& slot = t >= hi / 10 ? e.quotient_tail_max : e.quotient_head_max;
      slot = std::max(slot, q);
    }
    e.inclusion_condition_holds = e.quotient_tail_max <= e.quotient_head_max + 0.1;
    probe.entries.push_back(std::move(e));
  }
  return probe;
}

}  // namespace dcq
