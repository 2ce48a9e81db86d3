#include "dcq/report_json.hpp"

namespace dcq {

namespace {

template <class T>
Json array_of(const std::vector<T>& xs) {
  Json a = Json::array();
  for (const auto& x : xs) a.push_back(to_json(x));
  return a;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const WeightFunction& w) {
  Json j;
  j["expr"] = to_string(w.expr());
  j["label"] = w.label();
  j["t0"] = w.t0();
  j["t_max"] = w.t_max();
  j["delta"] = w.delta();
  j["b"] = w.b();
  j["normalized"] = w.normalized();
  return j;
}

WeightFunction weight_from_json(const Json& j) {
  WeightOptions opts;
  if (j.contains("t_max")) opts.t_max = j.at("t_max").get<double>();
  if (j.contains("delta")) opts.delta = j.at("delta").get<double>();
  if (j.contains("label")) opts.label = j.at("label").get<std::string>();
  return WeightFunction::create(parse_weight(j.at("expr").get<std::string>()), j.at("t0").get<double>(), opts);
}

Json to_json(const ConditionResult& c) {
  Json j;
  j["id"] = c.id;
  j["passed"] = c.passed;
  j["t_lo"] = c.t_lo;
  j["t_hi"] = c.t_hi;
  j["min_value"] = c.min_value;
  j["max_value"] = c.max_value;
  j["first_violation"] = optional_number(c.first_violation);
  j["detail"] = c.detail;
  return j;
}

Json to_json(const ValidityReport& r) {
  Json j;
  j["passed"] = r.passed;
  j["t0"] = r.t0;
  j["t_max"] = r.t_max;
  j["grid_points"] = r.grid_points;
  j["conditions"] = array_of(r.conditions);
  j["delta_estimate"] = r.delta_estimate;
  j["tail_slopes"] = r.tail_slopes;
  j["t_mu_convex"] = r.t_mu_convex;
  j["mu_over_t_tail"] = r.mu_over_t_tail;
  return j;
}

Json to_json(const ConjugatePoint& p) {
  Json j;
  j["s"] = p.s;
  j["t_star"] = p.t_star;
  j["omega"] = p.omega;
  j["log_Lambda"] = p.log_Lambda;
  j["n_star"] = p.n_star;
  j["log_lambda"] = p.log_lambda;
  j["margin"] = p.margin();
  j["boundary"] = p.boundary;
  return j;
}

Json to_json(const SandwichReport& r) {
  Json j;
  j["delta"] = r.delta;
  j["margin_min"] = r.margin_min;
  j["margin_max"] = r.margin_max;
  j["boundary_points"] = r.boundary_points;
  j["points"] = array_of(r.points);
  return j;
}

Json to_json(const CarlemanSweep& s) {
  Json j;
  j["N"] = s.N;
  j["S"] = s.S;
  j["truncated_at"] = s.truncated_at >= 0 ? Json(s.truncated_at) : Json(nullptr);
  j["truncation_bound"] = s.truncation_bound;
  return j;
}

Json to_json(const ScaleFit& f) {
  Json j;
  j["alpha"] = f.alpha;
  j["beta"] = f.beta;
  j["K"] = f.K;
  j["gamma"] = f.gamma;
  j["eta"] = f.eta;
  j["residual"] = f.residual;
  j["x_lo"] = f.x_lo;
  j["x_hi"] = f.x_hi;
  j["points"] = f.points;
  j["snapped"] = f.snapped;
  if (f.snapped) {
    j["alpha_snapped"] = f.alpha_snapped;
    j["beta_snapped"] = f.beta_snapped;
    j["beta_given_alpha"] = f.beta_given_alpha;
  }
  return j;
}

Json to_json(const AnalyticDetection& d) {
  Json j;
  j["is_analytic"] = d.is_analytic;
  j["log_s_lo"] = d.log_s_lo;
  j["log_s_hi"] = d.log_s_hi;
  j["ratio_min"] = d.ratio_min;
  j["ratio_max"] = d.ratio_max;
  if (d.is_analytic) {
    j["c"] = d.c;
    j["bound_holds"] = d.bound_holds;
    j["bound_lo"] = d.bound_lo;
    j["bound_hi"] = d.bound_hi;
    j["bound_violation"] = d.bound_violation ? Json(*d.bound_violation) : Json(nullptr);
  }
  return j;
}

Json to_json(const DiagnosticsReport& r) {
  Json j;
  j["verdict"] = to_string(r.verdict);
  j["weight"] = r.weight;
  j["t0"] = r.t0;
  j["delta"] = r.delta;
  j["window_offset"] = r.window_offset;
  j["integral_offset"] = r.integral_offset;
  j["criteria_agree"] = r.criteria_agree;

  Json a;
  a["classification"] = to_string(r.series);
  a["growth"] = to_string(r.carleman_growth);
  a["partial_sums"] = to_json(r.carleman);
  a["term_fit"] = to_json(r.carleman_fit);
  j["series"] = a;

  Json b;
  b["classification"] = to_string(r.integral);
  b["growth"] = to_string(r.integral_growth);
  b["s0_log"] = r.s0_log;
  b["S_log"] = r.S_log;
  b["omega_integral"] = r.integral_b;
  b["neg_log_lambda_integral"] = r.integral_c;
  b["omega_fit"] = to_json(r.omega_fit);
  j["integral"] = b;

  Json c;
  c["consistent"] = r.c_consistent;
  c["gap_max"] = r.c_gap_max;
  c["gap_bound"] = r.c_gap_bound;
  j["lambda_integral_check"] = c;

  j["analytic_detector"] = to_json(r.analytic);

  Json g = Json::array();
  for (const auto& e : r.omega_over_power) {
    Json x;
    x["q"] = e.q;
    x["increasing"] = e.increasing;
    x["growth_factor"] = e.growth_factor;
    g.push_back(x);
  }
  j["omega_over_power"] = g;
  return j;
}

Json to_json(const CheckResult& c) {
  Json j;
  j["id"] = c.id;
  j["passed"] = c.passed;
  j["value"] = c.value;
  j["limit"] = c.limit;
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

Json to_json(const LoglogReproduction& r) {
  Json j;
  j["reference"] = r.reference;
  j["passed"] = r.passed;
  j["checks"] = array_of(r.checks);
  j["ratio_near_1e12"] = r.ratio_near_1e12;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json x;
    x["t_star"] = row.t_star;
    x["s_log"] = row.s_log;
    x["omega"] = row.omega;
    x["identity_error"] = row.identity_error;
    x["s_form_error"] = row.s_form_error;
    x["ratio"] = row.ratio;
    rows.push_back(x);
  }
  j["rows"] = rows;
  j["diagnostics"] = to_json(r.diagnostics);
  return j;
}

Json to_json(const ShiftedReproduction& r) {
  Json j;
  j["reference"] = r.reference;
  j["passed"] = r.passed;
  j["p"] = r.p;
  j["checks"] = array_of(r.checks);
  j["max_identity_error"] = r.max_identity_error;
  j["fit_lo_log"] = r.fit_lo_log;
  j["fit_hi_log"] = r.fit_hi_log;
  j["fit"] = to_json(r.fit);
  j["K_expected"] = r.K_expected;
  j["tail_change"] = r.tail_change;
  j["inclusion_slack_min"] = r.inclusion_slack_min;
  j["diagnostics"] = to_json(r.diagnostics);
  return j;
}

Json to_json(const TildeProbe& p) {
  Json j;
  j["reference"] = p.reference;
  j["p_max"] = p.p_max;
  Json entries = Json::array();
  for (const auto& e : p.entries) {
    Json x;
    x["p"] = e.p;
    x["family"] = e.family;
    Json cmp;
    cmp["claim"] = p.claim;
    cmp["claimed_verdict"] = e.claimed_verdict;
    cmp["computed_verdict"] = e.computed_verdict;
    cmp["agrees_with_claim"] = e.agrees_with_claim;
    cmp["inclusion_condition_holds"] = e.inclusion_condition_holds;
    x["comparison"] = cmp;
    x["quotient_head_max"] = e.quotient_head_max;
    x["quotient_tail_max"] = e.quotient_tail_max;
    x["internally_consistent"] = e.internally_consistent;
    x["diagnostics"] = to_json(e.diagnostics);
    entries.push_back(x);
  }
  j["entries"] = entries;
  return j;
}

}  // namespace dcq
