#include "dcq/conjugate.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace dcq {

namespace {

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> kGlNodes = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                            0.9602898564975363};
constexpr std::array<double, 4> kGlWeights = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                              0.1012285362903763};

template <class F>
double gauss_legendre(F&& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double acc = 0.0;
  for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
    const double dx = half * kGlNodes[i];
    acc += kGlWeights[i] * (f(mid - dx) + f(mid + dx));
  }
  return half * acc;
}

}  // namespace

Minimizer t_star_log(const WeightFunction& w, double ls) {
  const double t0 = w.t0();
  if (!(ls > w.dm(t0))) return {t0, true};

  const double tol = kRootTolerance * (1.0 + std::abs(ls));
  double lo = t0;
  double hi = 2.0 * t0;
  while (w.dm(hi) < ls) {
    if (hi >= kBracketCap) {
      std::ostringstream os;
      os << "t_star: no bracket below t = " << kBracketCap << " for log s = " << ls;
      throw BracketError(os.str());
    }
    lo = hi;
    hi = std::min(2.0 * hi, kBracketCap);
  }

  // Geometric bisection to a coarse relative width, then safeguarded Newton.
  while (hi / lo - 1.0 > 1e-6) {
    const double mid = std::sqrt(lo * hi);
    (w.dm(mid) < ls ? lo : hi) = mid;
  }
  double t = std::sqrt(lo * hi);
  for (int iter = 0; iter < 60; ++iter) {
    const double f = w.dm(t) - ls;
    if (f < 0)
      lo = t;
    else
      hi = t;
    double next = t - f / w.d2m(t);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - t);
    t = next;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * t) break;
  }
  if (!(std::abs(w.dm(t) - ls) <= tol)) {
    std::ostringstream os;
    os.precision(17);
    os << "t_star: root residual above tolerance at log s = " << ls;
    throw BracketError(os.str());
  }
  return {t, false};
}

Minimizer t_star(const WeightFunction& w, double s) { return t_star_log(w, std::log(s)); }

namespace {

double omega_at(const WeightFunction& w, const Minimizer& tm, double ls) {
  // At the endpoint the infimum is the objective itself, t0 log s - m(t0).
  if (tm.boundary) return tm.t * ls - w.m(tm.t);
  return tm.t * w.dm(tm.t) - w.m(tm.t);
}

// g(n+1) - g(n) for g(n) = m(n) - n log s, with the increment of m taken as
// the integral of m' so no large values cancel.
double increment(const WeightFunction& w, long long n, double ls) {
  const double a = static_cast<double>(n);
  return gauss_legendre([&](double u) { return w.dm(u); }, a, a + 1.0) - ls;
}

long long descend(const WeightFunction& w, double t_star, double ls) {
  const long long n_min = static_cast<long long>(std::ceil(w.t0()));
  long long n = std::max(n_min, static_cast<long long>(std::floor(t_star)));
  while (n > n_min && increment(w, n - 1, ls) > 0.0) --n;
  while (increment(w, n, ls) < 0.0) ++n;
  return n;
}

ConjugatePoint make_point(const WeightFunction& w, double s, double ls) {
  const Minimizer tm = t_star_log(w, ls);
  ConjugatePoint pt;
  pt.s = s;
  pt.t_star = tm.t;
  pt.boundary = tm.boundary;
  pt.omega = omega_at(w, tm, ls);
  pt.log_Lambda = -pt.omega;
  pt.n_star = descend(w, tm.t, ls);

  // log lambda = -omega + gap. Interior: Taylor remainder of m about t*,
  // int_{t*}^{n} (n - v) m''(v) dv. Endpoint: int_{t0}^{n} (m'(v) - log s) dv.
  const double n = static_cast<double>(pt.n_star);
  double gap = 0.0;
  if (n != tm.t) {
    gap = tm.boundary ? gauss_legendre([&](double v) { return w.dm(v) - ls; }, tm.t, n)
                      : gauss_legendre([&](double v) { return (n - v) * w.d2m(v); }, tm.t, n);
  }
  pt.log_lambda = pt.log_Lambda + gap;
  return pt;
}

}  // namespace

double omega_log(const WeightFunction& w, double ls) { return omega_at(w, t_star_log(w, ls), ls); }

double omega(const WeightFunction& w, double s) { return omega_log(w, std::log(s)); }

ConjugatePoint conjugate_point(const WeightFunction& w, double s) { return make_point(w, s, std::log(s)); }

ConjugatePoint conjugate_point_log(const WeightFunction& w, double ls) { return make_point(w, std::exp(ls), ls); }

DiscreteMinimum lambda_discrete(const WeightFunction& w, double s) {
  if (!(s > 1.0)) throw std::invalid_argument("lambda_discrete: s must exceed 1");
  const ConjugatePoint pt = conjugate_point(w, s);
  return {pt.n_star, pt.log_lambda};
}

SandwichReport sandwich_check(const WeightFunction& w, std::span<const double> s_grid) {
  SandwichReport rep;
  rep.delta = w.delta();
  rep.margin_min = std::numeric_limits<double>::infinity();
  rep.margin_max = -std::numeric_limits<double>::infinity();
  constexpr double slack = 1e-9;
  for (double s : s_grid) {
    ConjugatePoint pt = conjugate_point(w, s);
    const double margin = pt.margin();
    // The upper bound needs a stationary point; at the endpoint the gap grows
    // with m'(t0) - log s when t0 is not an integer.
    const bool upper_applies = !pt.boundary;
    if (pt.boundary) ++rep.boundary_points;
    if (margin < -slack || (upper_applies && margin > rep.delta + slack)) {
      std::ostringstream os;
      os.precision(17);
      os << "sandwich violated at s = " << s << ": margin " << margin << " outside [0, " << rep.delta << "]";
      throw SandwichViolation(os.str(), s);
    }
    rep.margin_min = std::min(rep.margin_min, margin);
    rep.margin_max = std::max(rep.margin_max, margin);
    rep.points.push_back(pt);
  }
  if (rep.points.empty()) rep.margin_min = rep.margin_max = 0.0;
  return rep;
}

double omega_derivative(const WeightFunction& w, double s) {
  const double up = omega(w, s * (1.0 + kOmegaStep));
  const double down = omega(w, s * (1.0 - kOmegaStep));
  return (up - down) / (2.0 * kOmegaStep * s);
}

DualResidual dual_residual(const WeightFunction& w, double s) {
  const Minimizer tm = t_star(w, s);
  const double om = omega(w, s);
  const double s_dw = s * omega_derivative(w, s);
  const double mt = w.m(tm.t);
  return {std::abs(s_dw - tm.t) / tm.t, std::abs(s_dw * std::log(s) - om - mt) / (1.0 + std::abs(mt))};
}

double mu_system_residual(const WeightFunction& w, double s) {
  const Minimizer tm = t_star(w, s);
  const double t = tm.t;
  // e t e^{mu + t mu'} = exp(1 + log t + mu + t mu'); compare in log form.
  const double log_model = 1.0 + std::log(t) + w.mu(t) + t * w.dmu(t);
  return std::abs(std::expm1(log_model - std::log(s)));
}

}  // namespace dcq
