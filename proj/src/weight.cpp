#include "dcq/weight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dcq {

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out;
  if (n <= 0) return out;
  if (n == 1) return {lo};
  out.resize(static_cast<std::size_t>(n));
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + step * i);
  out.front() = lo;
  out.back() = hi;
  return out;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

ConditionResult sign_condition(std::string id, std::span<const double> grid, std::span<const double> values,
                               bool allow_zero_at_start) {
  ConditionResult c;
  c.id = std::move(id);
  c.t_lo = grid.front();
  c.t_hi = grid.back();
  c.min_value = std::numeric_limits<double>::infinity();
  c.max_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    c.min_value = std::min(c.min_value, v);
    c.max_value = std::max(c.max_value, v);
    const bool ok = std::isfinite(v) && (v > 0.0 || (allow_zero_at_start && i == 0 && v == 0.0));
    if (!ok && !c.first_violation) c.first_violation = grid[i];
  }
  c.passed = !c.first_violation.has_value();
  if (!c.passed) c.detail = "violated at t = " + fmt(*c.first_violation);
  return c;
}

}  // namespace

ValidityReport validate(const Expr& m, double t0, double t_max, int points) {
  if (!(t0 > 0.0)) throw std::invalid_argument("validate: t0 must be positive");
  if (t_max == 0.0) t_max = std::max(1e8, 1e6 * t0);
  if (t_max < 1e6 * t0 * (1.0 - 1e-12)) throw std::invalid_argument("validate: t_max must be at least 1e6 * t0");
  points = std::max(points, kMinAuditPoints);

  const Expr m1 = differentiate(m);
  const Expr m2 = differentiate(m1);
  const std::vector<double> grid = log_spaced(t0, t_max, points);
  std::vector<double> v0(grid.size()), v1(grid.size()), v2(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    v0[i] = eval(m, grid[i]);
    v1[i] = eval(m1, grid[i]);
    v2[i] = eval(m2, grid[i]);
  }

  ValidityReport r;
  r.t0 = t0;
  r.t_max = t_max;
  r.grid_points = points;
  r.conditions.push_back(sign_condition("m_positive", grid, v0, true));
  r.conditions.push_back(sign_condition("dm_positive", grid, v1, false));
  r.conditions.push_back(sign_condition("d2m_positive", grid, v2, false));

  {
    // m' strictly increasing, and not levelling off: the last decade must gain
    // at least half of what the previous decade gained.
    ConditionResult c;
    c.id = "dm_unbounded";
    c.t_lo = t0;
    c.t_hi = t_max;
    c.min_value = v1.front();
    c.max_value = v1.back();
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (!(v1[i] > v1[i - 1])) {
        c.first_violation = grid[i];
        c.detail = "m' not increasing at t = " + fmt(grid[i]);
        break;
      }
    }
    const double last = eval(m1, t_max) - eval(m1, t_max / 10);
    const double prev = eval(m1, t_max / 10) - eval(m1, t_max / 100);
    if (!c.first_violation && !(last > 0.0 && last >= 0.5 * prev)) {
      c.first_violation = t_max / 10;
      c.detail = "m' levels off: last-decade gain " + fmt(last) + " vs previous " + fmt(prev);
    }
    c.passed = !c.first_violation;
    r.conditions.push_back(c);
  }

  double max_d2 = 0.0;
  for (double v : v2) max_d2 = std::max(max_d2, v);
  {
    ConditionResult c;
    c.id = "d2m_bounded";
    c.t_lo = t0;
    c.t_hi = t_max;
    double head = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] <= t_max / 10)
        head = std::max(head, v2[i]);
      else
        tail = std::max(tail, v2[i]);
    }
    c.min_value = head;
    c.max_value = tail;
    if (!(std::isfinite(tail) && tail <= kDeltaSafety * head)) {
      c.first_violation = t_max / 10;
      c.detail = "m'' keeps growing: tail max " + fmt(tail) + " vs earlier max " + fmt(head);
    }
    c.passed = !c.first_violation;
    r.conditions.push_back(c);
  }

  {
    // One-sided slopes of the extension: 0 on the clipped stretch, then the
    // tangent slope m'(t0), then m' itself, which increases.
    ConditionResult c;
    c.id = "extension_convex";
    c.t_lo = 0.0;
    c.t_hi = t0;
    c.min_value = v0.front() - t0 * v1.front();
    c.max_value = v1.front();
    if (!(v1.front() > 0.0)) {
      c.first_violation = t0;
      c.detail = "tangent slope at t0 is not positive";
    }
    c.passed = !c.first_violation;
    r.conditions.push_back(c);
  }

  r.delta_estimate = kDeltaSafety * max_d2;
  const std::size_t tail_n = std::min<std::size_t>(8, grid.size());
  r.tail_slopes.assign(v1.end() - static_cast<std::ptrdiff_t>(tail_n), v1.end());

  r.t_mu_convex = true;
  r.mu_over_t_tail = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    // (t mu(t))'' = m''(t) - 1/t
    if (v2[i] - 1.0 / t < -1e-12 / t) r.t_mu_convex = false;
    if (t >= t_max / 10) r.mu_over_t_tail = std::max(r.mu_over_t_tail, (v0[i] / t - std::log(t)) / t);
  }

  r.passed = std::all_of(r.conditions.begin(), r.conditions.end(), [](const auto& c) { return c.passed; });
  return r;
}

ValidationError::ValidationError(ValidityReport report)
    : std::runtime_error([&] {
        std::string msg = "weight fails validation";
        for (const auto& c : report.conditions)
          if (!c.passed) msg += "; " + c.id + ": " + c.detail;
        return msg;
      }()),
      report_(std::move(report)) {}

WeightFunction WeightFunction::create(const Expr& m, double t0, const WeightOptions& opts) {
  ValidityReport rep = validate(m, t0, opts.t_max);
  if (!rep.passed) throw ValidationError(std::move(rep));

  WeightFunction w;
  w.m_ = m;
  w.m1_ = differentiate(m);
  w.m2_ = differentiate(w.m1_);
  w.t0_ = t0;
  w.t_max_ = rep.t_max;
  const double audited = rep.delta_estimate / kDeltaSafety;
  if (opts.delta) {
    if (*opts.delta < audited)
      throw std::invalid_argument("delta " + fmt(*opts.delta) + " is below the audited max of m'' (" + fmt(audited) +
                                  ")");
    w.delta_ = *opts.delta;
  } else {
    w.delta_ = rep.delta_estimate;
  }
  w.m_t0_ = eval(m, t0);
  w.dm_t0_ = eval(w.m1_, t0);
  const double intercept = w.m_t0_ - t0 * w.dm_t0_;
  w.normalized_ = intercept <= 0.0;
  w.b_ = w.normalized_ ? std::max(0.0, t0 - w.m_t0_ / w.dm_t0_) : 0.0;
  w.label_ = opts.label.empty() ? to_string(m) : opts.label;
  w.report_ = std::move(rep);
  return w;
}

double WeightFunction::extended(double t) const {
  if (t >= t0_) return m(t);
  const double tangent = m_t0_ + dm_t0_ * (t - t0_);
  return normalized_ ? std::max(0.0, tangent) : tangent;
}

double WeightFunction::mu(double t) const { return m(t) / t - std::log(t); }

double WeightFunction::dmu(double t) const { return dm(t) / t - m(t) / (t * t) - 1.0 / t; }

WeightFunction normalize(const WeightFunction& w, double a, double c) {
  if (a == 0.0 && c == 0.0) return w;
  const Expr e = make_sum({w.expr(), make_product({Expr::constant(a), Expr::variable()}), Expr::constant(c)});
  WeightOptions opts;
  opts.t_max = w.t_max();
  opts.label = w.label() + " + " + fmt(a) + "*t + " + fmt(c);
  return WeightFunction::create(e, w.t0(), opts);
}

WeightFunction shift(const WeightFunction& w, int p) {
  if (p < 1) throw std::invalid_argument("shift: p must be a positive integer");
  if (p == 1) return w;
  const Expr scaled = Expr::product({Expr::constant(p), Expr::variable()});
  WeightOptions opts;
  opts.t_max = w.t_max();
  opts.label = "(" + w.label() + ")[t -> " + std::to_string(p) + "t]";
  return WeightFunction::create(substitute(w.expr(), scaled), w.t0() / p, opts);
}

double log_M(const WeightFunction& w, long long p) { return w.extended(static_cast<double>(p)); }

double ShiftBound::C_q() const { return std::exp(log_C_q); }
double ShiftBound::rho_q() const { return std::exp(log_rho_q); }

ShiftBound shift_bound_constants(const WeightFunction& w, int q, long long p_hi) {
  if (q < 0) throw std::invalid_argument("shift_bound_constants: q must be non-negative");
  ShiftBound sb;
  sb.q = q;
  const double delta = w.delta();
  sb.C = -std::numeric_limits<double>::infinity();
  for (double t : log_spaced(w.t0(), w.t_max(), kMinAuditPoints)) sb.C = std::max(sb.C, w.dm(t) - delta * t);
  if (q == 0) return sb;  // C_0 = rho_0 = 1

  sb.log_rho_q = q * delta;
  sb.log_C_q = q * (sb.C + delta * q);
  sb.verified_lo = static_cast<long long>(std::ceil(w.t0()));
  sb.verified_hi = p_hi;
  for (long long p = sb.verified_lo; p <= p_hi; ++p) {
    const double lhs = w.m(static_cast<double>(p + q)) - w.m(static_cast<double>(p));
    const double rhs = sb.log_C_q + static_cast<double>(p) * sb.log_rho_q;
    if (lhs > rhs + 1e-9 * (1.0 + std::abs(lhs)))
      throw ShiftBoundError("shift bound fails at p = " + std::to_string(p) + " (q = " + std::to_string(q) + ")", p);
  }
  return sb;
}

std::vector<SuperadditivityViolation> superadditivity_violations(std::span<const double> log_m) {
  std::vector<SuperadditivityViolation> out;
  const auto n = static_cast<long long>(log_m.size());
  for (long long p = 0; p < n; ++p) {
    const double mp = log_m[static_cast<std::size_t>(p)];
    for (long long q = 0; q <= p; ++q) {
      const double excess = log_m[static_cast<std::size_t>(q)] + log_m[static_cast<std::size_t>(p - q)] - mp;
      if (excess > 1e-9 * (1.0 + std::abs(mp))) out.push_back({q, p, excess});
    }
  }
  return out;
}

std::vector<SuperadditivityViolation> superadditivity_check(const WeightFunction& w, long long P) {
  if (!w.normalized()) throw std::invalid_argument("superadditivity_check: weight is not normalized (m(0) != 0)");
  std::vector<double> lm(static_cast<std::size_t>(P + 1));
  for (long long p = 0; p <= P; ++p) lm[static_cast<std::size_t>(p)] = log_M(w, p);
  return superadditivity_violations(lm);
}

}  // namespace dcq
