#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcq/expr.hpp"

namespace dcq {

/// One audited hypothesis on m over the grid [t_lo, t_hi].
struct ConditionResult {
  std::string id;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double min_value = 0.0;
  double max_value = 0.0;
  std::optional<double> first_violation;
  bool passed = true;
  std::string detail;
};

struct ValidityReport {
  bool passed = false;
  double t0 = 0.0;
  double t_max = 0.0;
  int grid_points = 0;
  std::vector<ConditionResult> conditions;
  double delta_estimate = 0.0;
  /// m'(t) at the last grid points, the evidence for m' -> infinity.
  std::vector<double> tail_slopes;
  /// Convexity of t*mu(t) = m(t) - t log t, audited but not part of `passed`.
  bool t_mu_convex = false;
  /// Sup of mu(t)/t over the tail decade (mu(t) <= a t), informational.
  double mu_over_t_tail = 0.0;
};

inline constexpr int kMinAuditPoints = 512;
inline constexpr double kDeltaSafety = 1.05;

/// Audits the weight hypotheses (m, m', m'' > 0; m' increasing without bound;
/// m'' bounded) on a log-spaced grid over [t0, t_max]. t_max = 0 selects
/// max(1e8, 1e6 * t0). Throws DomainError if the expression leaves its
/// domain inside the interval.
ValidityReport validate(const Expr& m, double t0, double t_max = 0.0, int points = kMinAuditPoints);

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(ValidityReport report);
  const ValidityReport& report() const { return report_; }

 private:
  ValidityReport report_;
};

struct WeightOptions {
  double t_max = 0.0;
  /// Certified curvature bound; must dominate the audited m''. Empty selects
  /// 1.05 * max m''.
  std::optional<double> delta;
  std::string label;
};

/// A weight m validated on [t0, t_max], with its derivatives and the convex
/// extension to [0, infinity).
///
/// Below t0 the weight continues along its tangent at t0, clipped at zero:
/// m_ext(t) = max(0, m(t0) + m'(t0)(t - t0)). The clip point is b. When the
/// tangent is still positive at 0 there is no zero stretch, b = 0 and the
/// weight is not normalized (m_ext(0) > 0).
class WeightFunction {
 public:
  static WeightFunction create(const Expr& m, double t0, const WeightOptions& opts = {});

  const Expr& expr() const { return m_; }
  const Expr& d1() const { return m1_; }
  const Expr& d2() const { return m2_; }
  double t0() const { return t0_; }
  double t_max() const { return t_max_; }
  double delta() const { return delta_; }
  double b() const { return b_; }
  const std::string& label() const { return label_; }
  const ValidityReport& report() const { return report_; }

  /// True when the extension satisfies m(0) = 0.
  bool normalized() const { return normalized_; }

  double m(double t) const { return eval(m_, t); }
  double dm(double t) const { return eval(m1_, t); }
  double d2m(double t) const { return eval(m2_, t); }
  long double m_ld(long double t) const { return eval(m_, t); }

  /// Convex extension; equals m(t) for t >= t0.
  double extended(double t) const;

  /// mu(t) = m(t)/t - log t and its derivative.
  double mu(double t) const;
  double dmu(double t) const;

 private:
  WeightFunction() = default;

  Expr m_, m1_, m2_;
  double t0_ = 1.0;
  double t_max_ = 1e8;
  double delta_ = 0.0;
  double b_ = 0.0;
  double m_t0_ = 0.0;
  double dm_t0_ = 0.0;
  bool normalized_ = false;
  std::string label_;
  ValidityReport report_;
};

/// m(t) + a t + c. Defines the same class; rejected (ValidationError) if the
/// result fails the audit.
WeightFunction normalize(const WeightFunction& w, double a, double c);

/// m_p(t) = m(p t), with t0 scaled to t0 / p and re-audited.
WeightFunction shift(const WeightFunction& w, int p);

/// log M(p) = m_ext(p).
double log_M(const WeightFunction& w, long long p);

/// Constants of the shifted-index bound M(p+q) <= C_q rho_q^p M(p):
/// C = sup (m'(t) - delta t), rho_q = e^{q delta}, C_q = e^{q (C + delta q)}.
struct ShiftBound {
  int q = 0;
  double C = 0.0;
  double log_C_q = 0.0;
  double log_rho_q = 0.0;
  long long verified_lo = 0;
  long long verified_hi = 0;

  double C_q() const;
  double rho_q() const;
};

class ShiftBoundError : public std::runtime_error {
 public:
  ShiftBoundError(const std::string& what, long long p) : std::runtime_error(what), p_(p) {}
  long long violating_p() const { return p_; }

 private:
  long long p_;
};

/// Computes the constants and checks m(p+q) - m(p) <= log C_q + p log rho_q for
/// every integer p in [ceil(t0), p_hi]; throws ShiftBoundError otherwise.
ShiftBound shift_bound_constants(const WeightFunction& w, int q, long long p_hi = 10000);

struct SuperadditivityViolation {
  long long q = 0;
  long long p = 0;
  /// m(q) + m(p-q) - m(p).
  double excess = 0.0;
};

/// Pairs 0 <= q <= p < log_m.size() with log_m[q] + log_m[p-q] > log_m[p]
/// beyond a relative slack of 1e-9.
std::vector<SuperadditivityViolation> superadditivity_violations(std::span<const double> log_m);

/// superadditivity_violations over m_ext(0..P). Requires a normalized weight.
std::vector<SuperadditivityViolation> superadditivity_check(const WeightFunction& w, long long P);

/// Log-spaced points over [lo, hi] (inclusive ends).
std::vector<double> log_spaced(double lo, double hi, int n);

}  // namespace dcq
