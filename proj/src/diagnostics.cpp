#include "dcq/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dcq/conjugate.hpp"

namespace dcq {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::analytic: return "analytic";
    case Verdict::quasianalytic: return "quasianalytic";
    case Verdict::not_quasianalytic: return "not_quasianalytic";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string to_string(Divergence d) {
  switch (d) {
    case Divergence::divergent: return "divergent";
    case Divergence::convergent: return "convergent";
    case Divergence::undetermined: return "undetermined";
  }
  return "undetermined";
}

std::string to_string(Growth g) { return g == Growth::growing ? "growing" : "plateau"; }

Verdict verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::analytic, Verdict::quasianalytic, Verdict::not_quasianalytic, Verdict::inconclusive})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown verdict '" + s + "'");
}

// --- criterion (a) ---------------------------------------------------------

CarlemanSweep carleman_sweep(const WeightFunction& w, std::span<const long long> checkpoints) {
  CarlemanSweep out;
  out.N.assign(checkpoints.begin(), checkpoints.end());
  if (!std::is_sorted(out.N.begin(), out.N.end()) || (!out.N.empty() && out.N.front() < 0))
    throw std::invalid_argument("carleman_sweep: checkpoints must be non-negative and increasing");
  out.S.resize(out.N.size());
  if (out.N.empty()) return out;

  const long long N_max = out.N.back();
  std::size_t next = 0;
  double sum = 0.0;
  double m_here = log_M(w, 0);
  for (long long p = 0; p <= N_max; ++p) {
    const double m_next = log_M(w, p + 1);
    const double term = std::exp(m_here - m_next);
    m_here = m_next;
    sum += term;
    if (term < kTermTruncation * sum && p < N_max) {
      // Terms decrease from here on (m' increasing), so the rest is below term * (N_max - p).
      out.truncated_at = p;
      out.truncation_bound = term * static_cast<double>(N_max - p);
      for (; next < out.N.size(); ++next)
        if (out.N[next] >= p) out.S[next] = sum;
      return out;
    }
    while (next < out.N.size() && out.N[next] == p) out.S[next++] = sum;
  }
  return out;
}

double carleman_partial_sum(const WeightFunction& w, long long N) {
  const long long cp[] = {N};
  return carleman_sweep(w, cp).S.front();
}

// --- criteria (b) and (c) --------------------------------------------------

namespace {

struct Quad {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

template <class F>
Quad integrate_u(F&& f, double u0, double u1, unsigned max_depth) {
  Quad q;
  q.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, u0, u1, max_depth, kQuadratureTolerance,
                                                                          &q.error, &q.l1);
  return q;
}

// Splits at log s = m'(t0), where omega switches from the endpoint branch.
template <class F>
Quad integrate_split(const WeightFunction& w, F&& f, double u0, double u1, unsigned max_depth) {
  const double kink = w.dm(w.t0());
  if (kink > u0 && kink < u1) {
    Quad a = integrate_u(f, u0, kink, max_depth);
    Quad b = integrate_u(f, kink, u1, max_depth);
    return {a.value + b.value, a.error + b.error, a.l1 + b.l1};
  }
  return integrate_u(f, u0, u1, max_depth);
}

void check_range(double s0, double S, const char* who) {
  if (!(s0 > 1.0) || !(S >= s0)) throw std::invalid_argument(std::string(who) + ": need 1 < s0 <= S");
}

Quad omega_integral_u(const WeightFunction& w, double u0, double u1) {
  auto f = [&](double u) { return omega_log(w, u) * std::exp(-u); };
  Quad q = integrate_split(w, f, u0, u1, 15);
  if (!(q.error <= kQuadratureTolerance * q.l1 * 10.0 || q.error <= 1e-300)) {
    std::ostringstream os;
    os.precision(17);
    os << "omega_integral: no convergence on [e^" << u0 << ", e^" << u1 << "], error estimate " << q.error;
    throw QuadratureError(os.str(), q.value);
  }
  return q;
}

// int gap(e^u) e^{-u} du with gap = log lambda + omega in [0, delta]. The gap
// has a kink at every change of the integer minimizer, so the error estimate
// saturates; the depth is capped and the estimate is reported instead.
Quad gap_integral_u(const WeightFunction& w, double u0, double u1) {
  auto f = [&](double u) { return conjugate_point_log(w, u).margin() * std::exp(-u); };
  return integrate_split(w, f, u0, u1, 6);
}

}  // namespace

double omega_integral(const WeightFunction& w, double s0, double S) {
  check_range(s0, S, "omega_integral");
  if (S == s0) return 0.0;
  return omega_integral_u(w, std::log(s0), std::log(S)).value;
}

double neg_log_lambda_integral(const WeightFunction& w, double s0, double S) {
  check_range(s0, S, "neg_log_lambda_integral");
  if (S == s0) return 0.0;
  const double u0 = std::log(s0), u1 = std::log(S);
  return omega_integral_u(w, u0, u1).value - gap_integral_u(w, u0, u1).value;
}

// --- scale fits ------------------------------------------------------------

namespace {

Eigen::VectorXd least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  // Column scaling keeps the QR well balanced; the basis functions differ by
  // orders of magnitude on long windows.
  Eigen::VectorXd scale = A.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < scale.size(); ++j)
    if (scale(j) == 0.0) scale(j) = 1.0;
  const Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();
  const Eigen::VectorXd c = As.colPivHouseholderQr().solve(y);
  return c.cwiseQuotient(scale);
}

// Closest fraction num/den with den <= 6; smaller denominators win ties.
double nearest_fraction(double a) {
  double best = std::round(a);
  for (int den = 2; den <= 6; ++den) {
    const double cand = std::round(a * den) / den;
    if (std::abs(cand - a) < std::abs(best - a) - 1e-15) best = cand;
  }
  return best;
}

constexpr double kSnapAlpha = 0.01;
constexpr double kSnapBeta = 0.25;

}  // namespace

ScaleFit fit_log_scale(std::span<const double> x, std::span<const double> log_y) {
  if (x.size() != log_y.size()) throw std::invalid_argument("fit_log_scale: size mismatch");
  if (x.size() < 16) throw FitError("fit_log_scale: need at least 16 samples");
  const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
  if (!(*xmin > 1.0)) throw FitError("fit_log_scale: x must exceed 1");
  if (std::log(*xmax) - std::log(*xmin) < 0.2)
    throw FitError("fit_log_scale: window too narrow (log x spans less than 0.2)");

  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd A(n, 5);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    const double lx = std::log(xi);
    A.row(i) << 1.0, xi, lx, lx / xi, 1.0 / xi;
    y(i) = log_y[static_cast<std::size_t>(i)];
  }
  for (Eigen::Index i = 0; i < n; ++i)
    if (!std::isfinite(y(i))) throw FitError("fit_log_scale: non-finite sample");

  const Eigen::VectorXd c = least_squares(A, y);
  ScaleFit f;
  f.alpha = c(1);
  f.beta = c(2);
  f.gamma = c(3);
  f.eta = c(4);
  f.K = std::exp(c(0));
  f.residual = (A * c - y).cwiseAbs().maxCoeff();
  f.x_lo = *xmin;
  f.x_hi = *xmax;
  f.points = static_cast<int>(n);

  const double a_snap = nearest_fraction(f.alpha);
  const double b_snap = std::round(f.beta);
  if (std::abs(a_snap - f.alpha) <= kSnapAlpha && std::abs(b_snap - f.beta) <= kSnapBeta) {
    f.snapped = true;
    f.alpha_snapped = a_snap;
    f.beta_snapped = b_snap;
    Eigen::MatrixXd B(n, 3);
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double xi = A(i, 1), lx = A(i, 2);
      B.row(i) << 1.0, lx / xi, 1.0 / xi;
      r(i) = y(i) - a_snap * xi - b_snap * lx;
    }
    const Eigen::VectorXd d = least_squares(B, r);
    f.K = std::exp(d(0));
    f.gamma = d(1);
    f.eta = d(2);

    // beta again with only alpha pinned; one column fewer to trade against.
    Eigen::MatrixXd C(n, 4);
    for (Eigen::Index i = 0; i < n; ++i) {
      C.row(i) << 1.0, A(i, 2), A(i, 3), A(i, 4);
      r(i) = y(i) - a_snap * A(i, 1);
    }
    f.beta_given_alpha = least_squares(C, r)(1);
  }
  return f;
}

ScaleFit growth_exponent_fit_log(const WeightFunction& w, double lo, double hi, int points) {
  if (!(lo >= 10.0 - 1e-12)) throw std::invalid_argument("growth_exponent_fit: s_lo must be at least e^10");
  if (!(hi >= lo + 5.0 - 1e-12)) throw std::invalid_argument("growth_exponent_fit: s_hi must be at least e^5 s_lo");
  if (points < 16) throw std::invalid_argument("growth_exponent_fit: need at least 16 points");
  std::vector<double> x(static_cast<std::size_t>(points)), ly(x.size());
  for (int i = 0; i < points; ++i) {
    const double u = lo + (hi - lo) * i / (points - 1);
    x[static_cast<std::size_t>(i)] = u;
    ly[static_cast<std::size_t>(i)] = std::log(omega_log(w, u));
  }
  return fit_log_scale(x, ly);
}

ScaleFit growth_exponent_fit(const WeightFunction& w, double s_lo, double s_hi, int points) {
  if (!(s_lo > 0.0) || !(s_hi > 0.0)) throw std::invalid_argument("growth_exponent_fit: s must be positive");
  return growth_exponent_fit_log(w, std::log(s_lo), std::log(s_hi), points);
}

ScaleFit carleman_term_fit(const WeightFunction& w, long long p_lo, long long p_hi, int points) {
  p_lo = std::max(p_lo, static_cast<long long>(std::ceil(w.t0())));
  if (p_hi <= p_lo) throw std::invalid_argument("carleman_term_fit: empty window");
  std::vector<double> x, ly;
  long long last = -1;
  for (double pd : log_spaced(static_cast<double>(p_lo), static_cast<double>(p_hi), points)) {
    const auto p = static_cast<long long>(std::llround(pd));
    if (p == last) continue;
    last = p;
    // log of M(p)/M(p+1) = -int_p^{p+1} m'(v) dv, by Simpson on three m' values
    // (accurate to m''''/2880, far below the fit residual).
    const double a = static_cast<double>(p);
    const double inc = (w.dm(a) + 4.0 * w.dm(a + 0.5) + w.dm(a + 1.0)) / 6.0;
    x.push_back(std::log(a));
    ly.push_back(-inc);
  }
  return fit_log_scale(x, ly);
}

Divergence divergence_on_scale(double exponent, double beta, double residual) {
  if (!(residual <= kFitResidualLimit) || !std::isfinite(exponent) || !std::isfinite(beta))
    return Divergence::undetermined;
  if (exponent > -1.0 + kAlphaTolerance) return Divergence::divergent;
  if (exponent < -1.0 - kAlphaTolerance) return Divergence::convergent;
  return beta >= -1.0 - kBetaTolerance ? Divergence::divergent : Divergence::convergent;
}

Growth growth_pattern(std::span<const double> v) {
  if (v.size() < 3) throw std::invalid_argument("growth_pattern: need at least three partial values");
  const std::size_t n = v.size();
  const double last = v[n - 1] - v[n - 2];
  const double prev = v[n - 2] - v[n - 3];
  if (!(prev > 0.0)) return Growth::plateau;
  return last >= kGrowthRatio * prev ? Growth::growing : Growth::plateau;
}

// --- analytic class --------------------------------------------------------

namespace {

double window_offset(const WeightFunction& w, double window_lo) {
  return std::max(0.0, w.dm(w.t0()) + 2.0 - window_lo);
}

constexpr double kDefaultTailLog = 35.0;
constexpr double kDefaultWindowLo = 15.0;
constexpr double kAnalyticSpread = 0.01;

}  // namespace

AnalyticDetection analytic_detector(const WeightFunction& w, double log_s_hi, long long bound_hi) {
  AnalyticDetection d;
  if (log_s_hi == 0.0) log_s_hi = kDefaultTailLog + window_offset(w, kDefaultWindowLo);
  d.log_s_hi = log_s_hi;
  d.log_s_lo = log_s_hi - std::log(10.0);
  d.ratio_min = std::numeric_limits<double>::infinity();
  d.ratio_max = 0.0;
  constexpr int n = 16;
  for (int i = 0; i < n; ++i) {
    const double u = d.log_s_lo + (d.log_s_hi - d.log_s_lo) * i / (n - 1);
    const double r = std::exp(std::log(omega_log(w, u)) - u);
    d.ratio_min = std::min(d.ratio_min, r);
    d.ratio_max = std::max(d.ratio_max, r);
  }
  d.is_analytic = d.ratio_min > 0.0 && (d.ratio_max - d.ratio_min) / d.ratio_min <= kAnalyticSpread;
  if (!d.is_analytic) return d;

  // omega(s) >= c s on the tail gives M(p) <= e^delta c^{-p} p!.
  d.c = 0.99 * d.ratio_min;
  d.bound_lo = std::max<long long>(1, static_cast<long long>(std::ceil(w.t0())));
  d.bound_hi = std::max(bound_hi, d.bound_lo);
  const double log_inv_c = -std::log(d.c);
  // A constant factor in M does not change the class; measure M against M(0).
  const double m0 = w.extended(0.0);
  for (long long p = d.bound_lo; p <= d.bound_hi; ++p) {
    const double pd = static_cast<double>(p);
    const double lhs = log_M(w, p) - m0;
    const double rhs = w.delta() + pd * log_inv_c + std::lgamma(pd + 1.0);
    if (lhs > rhs + 1e-9 * (1.0 + std::abs(lhs))) {
      d.bound_violation = p;
      break;
    }
  }
  d.bound_holds = !d.bound_violation;
  return d;
}

// --- classification --------------------------------------------------------

namespace {

Divergence corroborate(Divergence fit, Growth growth) {
  if (fit == Divergence::divergent && growth == Growth::growing) return fit;
  if (fit == Divergence::convergent && growth == Growth::plateau) return fit;
  return Divergence::undetermined;
}

}  // namespace

DiagnosticsReport classify_quasianalytic(const WeightFunction& w, const DiagnosticsOptions& opts) {
  if (opts.integral_S_log.size() < 3 || opts.carleman_N.size() < 3)
    throw std::invalid_argument("classify: need at least three checkpoints per criterion");

  DiagnosticsReport r;
  r.weight = w.label();
  r.t0 = w.t0();
  r.delta = w.delta();
  r.window_offset = window_offset(w, opts.fit_lo_log);
  const double off = r.window_offset;

  // (a)
  r.carleman = carleman_sweep(w, opts.carleman_N);
  r.carleman_fit = carleman_term_fit(w, opts.term_fit_lo, opts.term_fit_hi, opts.term_fit_points);
  r.carleman_growth = growth_pattern(r.carleman.S);
  r.series = corroborate(divergence_on_scale(r.carleman_fit.alpha, r.carleman_fit.beta, r.carleman_fit.residual),
                         r.carleman_growth);

  // (b) and (c), on consecutive segments so the partial values share work.
  // These windows start at the first interior s, where the gap is bounded by delta.
  r.integral_offset = std::max(0.0, w.dm(w.t0()) - opts.integral_s0_log);
  r.s0_log = opts.integral_s0_log + r.integral_offset;
  r.c_consistent = true;
  double u_prev = r.s0_log, ib = 0.0, ic = 0.0;
  for (double S : opts.integral_S_log) {
    const double u = S + r.integral_offset;
    r.S_log.push_back(u);
    const Quad qb = omega_integral_u(w, u_prev, u);
    const Quad qg = gap_integral_u(w, u_prev, u);
    ib += qb.value;
    ic += qb.value - qg.value;
    r.integral_b.push_back(ib);
    r.integral_c.push_back(ic);
    u_prev = u;

    const double gap = std::abs(ic - ib);
    const double bound = w.delta() * (std::exp(-r.s0_log) - std::exp(-u)) + qg.error + qb.error;
    r.c_gap_max = std::max(r.c_gap_max, gap);
    r.c_gap_bound = bound;
    if (gap > bound * (1.0 + 1e-9) || ic > ib + qg.error) r.c_consistent = false;
  }
  r.integral_growth = growth_pattern(r.integral_b);

  const double lo = opts.fit_lo_log + off, hi = opts.fit_hi_log + off;
  std::vector<double> x(static_cast<std::size_t>(opts.fit_points)), lw(x.size());
  for (int i = 0; i < opts.fit_points; ++i) {
    const double u = lo + (hi - lo) * i / (opts.fit_points - 1);
    x[static_cast<std::size_t>(i)] = u;
    lw[static_cast<std::size_t>(i)] = std::log(omega_log(w, u));
  }
  r.omega_fit = fit_log_scale(x, lw);
  // integrand omega/s^2 ~ s^{alpha-2}
  r.integral = corroborate(divergence_on_scale(r.omega_fit.alpha - 2.0, r.omega_fit.beta, r.omega_fit.residual),
                           r.integral_growth);

  for (double q : {0.5, 0.9}) {
    GrowthEvidence g;
    g.q = q;
    g.increasing = true;
    for (std::size_t i = 1; i < x.size(); ++i)
      if (!(lw[i] - q * x[i] > lw[i - 1] - q * x[i - 1])) g.increasing = false;
    g.growth_factor = std::exp((lw.back() - q * x.back()) - (lw.front() - q * x.front()));
    r.omega_over_power.push_back(g);
  }

  r.analytic = analytic_detector(w, hi);

  r.criteria_agree = r.series != Divergence::undetermined && r.series == r.integral;
  if (!r.criteria_agree || !r.c_consistent) {
    r.verdict = Verdict::inconclusive;
  } else if (r.series == Divergence::convergent) {
    r.verdict = r.analytic.is_analytic ? Verdict::inconclusive : Verdict::not_quasianalytic;
  } else {
    r.verdict = r.analytic.is_analytic && r.analytic.bound_holds ? Verdict::analytic : Verdict::quasianalytic;
  }
  return r;
}

}  // namespace dcq
