#pragma once

// Quasianalyticity diagnostics.
//
// Three equivalent divergence criteria are evaluated at finite scale:
//   (a) the Carleman series  sum_p M(p)/M(p+1),
//   (b) the integral         int omega(s)/s^2 ds,
//   (c) the integral         int log lambda(s)/s^2 ds.
// Divergence of an infinite sum or integral cannot be decided from finite
// data. Each criterion is therefore classified by fitting its summand or
// integrand to the scale x^e (log x)^beta and corroborating the call with the
// growth pattern of the partial values. Disagreement yields `inconclusive`.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcq/weight.hpp"

namespace dcq {

enum class Verdict { analytic, quasianalytic, not_quasianalytic, inconclusive };
enum class Divergence { divergent, convergent, undetermined };
enum class Growth { growing, plateau };

std::string to_string(Verdict v);
std::string to_string(Divergence d);
std::string to_string(Growth g);
Verdict verdict_from_string(const std::string& s);

inline constexpr double kAlphaTolerance = 0.02;
inline constexpr double kBetaTolerance = 0.15;
inline constexpr double kFitResidualLimit = 0.05;
inline constexpr double kGrowthRatio = 0.5;
inline constexpr double kTermTruncation = 1e-18;

// --- criterion (a) ---------------------------------------------------------

/// S_N = sum_{p=0}^{N} exp(m(p) - m(p+1)).
double carleman_partial_sum(const WeightFunction& w, long long N);

struct CarlemanSweep {
  std::vector<long long> N;
  std::vector<double> S;
  /// First p whose term fell below 1e-18 * S (summation stopped there), or -1.
  long long truncated_at = -1;
  /// Upper bound on the omitted terms: terms decrease, so term * (N_max - p).
  double truncation_bound = 0.0;
};

/// Partial sums at increasing checkpoints in one forward pass.
CarlemanSweep carleman_sweep(const WeightFunction& w, std::span<const long long> checkpoints);

// --- criteria (b) and (c) --------------------------------------------------

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double partial) : std::runtime_error(what), partial_(partial) {}
  double partial_value() const { return partial_; }

 private:
  double partial_;
};

inline constexpr double kQuadratureTolerance = 1e-8;

/// int_{s0}^{S} omega(s)/s^2 ds, computed as int omega(e^u) e^{-u} du.
double omega_integral(const WeightFunction& w, double s0, double S);

/// int_{s0}^{S} -log lambda(s)/s^2 ds (the negated criterion (c) integral).
double neg_log_lambda_integral(const WeightFunction& w, double s0, double S);

// --- scale fits ------------------------------------------------------------

/// log y ~ log K + alpha x + beta log x + gamma (log x)/x + eta / x.
///
/// The last two columns absorb the first-order corrections that iterated
/// logarithms leave on a finite window; without them the power and log
/// exponents trade off against each other. When alpha sits within 0.01 of a
/// fraction with denominator <= 6 and beta within kBetaTolerance of an integer,
/// K is re-estimated with the exponents pinned to those values.
struct ScaleFit {
  double alpha = 0.0;
  double beta = 0.0;
  double K = 0.0;
  double gamma = 0.0;
  double eta = 0.0;
  double residual = 0.0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  int points = 0;
  bool snapped = false;
  double alpha_snapped = 0.0;
  double beta_snapped = 0.0;
  /// Log exponent refitted with alpha fixed at alpha_snapped (when snapped).
  double beta_given_alpha = 0.0;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fits log_y against x (x = log s or log p). Throws FitError when log x spans
/// less than 0.2 or there are fewer than 16 samples.
ScaleFit fit_log_scale(std::span<const double> x, std::span<const double> log_y);

/// omega(s) ~ K s^alpha (log s)^beta on a log-spaced grid over [s_lo, s_hi].
/// Requires s_lo >= e^10, s_hi >= e^5 s_lo, points >= 16.
ScaleFit growth_exponent_fit(const WeightFunction& w, double s_lo, double s_hi, int points);
ScaleFit growth_exponent_fit_log(const WeightFunction& w, double log_s_lo, double log_s_hi, int points);

/// Carleman terms M(p)/M(p+1) ~ K p^alpha (log p)^beta over integers in [p_lo, p_hi].
ScaleFit carleman_term_fit(const WeightFunction& w, long long p_lo, long long p_hi, int points);

/// Divergence of sum/int x^exponent (log x)^beta: diverges iff exponent > -1,
/// or exponent = -1 and beta >= -1, with the tolerances above.
Divergence divergence_on_scale(double exponent, double beta, double residual);

/// Plateau when the last increment is below kGrowthRatio times the previous one.
Growth growth_pattern(std::span<const double> partial_values);

// --- analytic class --------------------------------------------------------

struct AnalyticDetection {
  bool is_analytic = false;
  double log_s_lo = 0.0;
  double log_s_hi = 0.0;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  /// 0.99 * min omega(s)/s over the tail, when detected.
  double c = 0.0;
  /// m(p) <= delta + p log(1/c) + log p! on [bound_lo, bound_hi].
  bool bound_holds = false;
  long long bound_lo = 0;
  long long bound_hi = 0;
  std::optional<long long> bound_violation;
};

/// Tests omega(s)/s for a positive limit over the decade [s_hi/10, s_hi];
/// `log_s_hi` = 0 picks the default tail e^35 (moved up if t0 requires it).
AnalyticDetection analytic_detector(const WeightFunction& w, double log_s_hi = 0.0, long long bound_hi = 1000);

// --- classification --------------------------------------------------------

struct DiagnosticsOptions {
  std::vector<long long> carleman_N{1000, 10000, 100000, 1000000};
  long long term_fit_lo = 1000;
  long long term_fit_hi = 1000000;
  int term_fit_points = 64;
  double integral_s0_log = 10.0;
  std::vector<double> integral_S_log{15.0, 20.0, 25.0, 30.0};
  double fit_lo_log = 15.0;
  double fit_hi_log = 35.0;
  int fit_points = 64;
};

/// omega(s)/s^q along the fit grid.
struct GrowthEvidence {
  double q = 0.0;
  bool increasing = false;
  double growth_factor = 0.0;
};

struct DiagnosticsReport {
  Verdict verdict = Verdict::inconclusive;
  std::string weight;
  double t0 = 0.0;
  double delta = 0.0;
  /// Amount added to the fit and tail windows (log s) so they start 2 above m'(t0).
  double window_offset = 0.0;
  /// Amount added to the integral windows so they start at m'(t0) or later.
  double integral_offset = 0.0;

  CarlemanSweep carleman;
  ScaleFit carleman_fit;
  Growth carleman_growth = Growth::growing;
  Divergence series = Divergence::undetermined;

  double s0_log = 0.0;
  std::vector<double> S_log;
  std::vector<double> integral_b;
  std::vector<double> integral_c;
  Growth integral_growth = Growth::growing;
  ScaleFit omega_fit;
  Divergence integral = Divergence::undetermined;

  /// |I_c - I_b| <= delta (1/s0 - 1/S) on every window.
  bool c_consistent = false;
  double c_gap_max = 0.0;
  double c_gap_bound = 0.0;

  bool criteria_agree = false;
  AnalyticDetection analytic;
  std::vector<GrowthEvidence> omega_over_power;
};

DiagnosticsReport classify_quasianalytic(const WeightFunction& w, const DiagnosticsOptions& opts = {});

}  // namespace dcq
