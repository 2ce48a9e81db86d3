#include <cmath>
#include <limits>
#include <random>

#include "dcq/catalog.hpp"
#include "dcq/conjugate.hpp"
#include "doctest.h"

using namespace dcq;

namespace {

const double kE = std::exp(1.0);

WeightFunction analytic() { return family("analytic"); }
WeightFunction loglog() { return family("loglog"); }

// loglog: m'(t) = log t + log log t + 1 + 1/log t
double loglog_dm(double t) {
  const double L = std::log(t);
  return L + std::log(L) + 1.0 + 1.0 / L;
}

// Brute force over integers in long double; for t log t the minimizer is
// below s/e + 2, so scanning to twice that is exhaustive.
long double brute_log_lambda_analytic(double s, long long* arg) {
  const long double ls = std::log(static_cast<long double>(s));
  long double best = std::numeric_limits<long double>::infinity();
  const long long hi = static_cast<long long>(2.0 * s / kE) + 4;
  for (long long n = 1; n <= hi; ++n) {
    const long double nd = n;
    const long double v = nd * std::log(nd) - nd * ls;
    if (v < best) {
      best = v;
      *arg = n;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("t_star: analytic closed form s/e") {
  const WeightFunction w = analytic();
  CHECK(t_star(w, std::exp(3.0)).t == doctest::Approx(kE * kE).epsilon(1e-10));
  CHECK_FALSE(t_star(w, std::exp(3.0)).boundary);
  const Minimizer b = t_star(w, kE);
  CHECK(b.t == doctest::Approx(1.0));
  const Minimizer below = t_star(w, 2.0);
  CHECK(below.boundary);
  CHECK(below.t == 1.0);
}

TEST_CASE("t_star: loglog inverts m'") {
  const WeightFunction w = loglog();
  for (double t : {25.0, 1e3, 1e6, 1e12}) {
    const Minimizer m = t_star_log(w, loglog_dm(t));
    CHECK(m.t == doctest::Approx(t).epsilon(1e-9));
  }
  CHECK(loglog_dm(1e6) == doctest::Approx(17.5138).epsilon(1e-5));
}

TEST_CASE("omega: closed forms") {
  const WeightFunction w = analytic();
  // omega = t*(log t* + 1) - t* log t* = t* = s/e
  CHECK(omega_log(w, 3.0) == doctest::Approx(kE * kE).epsilon(1e-10));
  // boundary: omega = t0 log s - m(t0) = log s
  CHECK(omega(w, kE) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(omega(w, 2.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  const WeightFunction l = loglog();
  for (double t : {30.0, 1e4, 1e9}) {
    // t m' - m = t (1 + 1/log t)
    const double expect = t * (1.0 + 1.0 / std::log(t));
    CHECK(omega_log(l, loglog_dm(t)) == doctest::Approx(expect).epsilon(1e-9));
  }
  CHECK(omega_log(l, loglog_dm(100.0)) == doctest::Approx(121.7147).epsilon(1e-6));
}

TEST_CASE("lambda_discrete: brute-force oracle on t log t") {
  const WeightFunction w = analytic();
  long long n = 0;
  const double s3 = std::exp(3.0);
  const long double ref = brute_log_lambda_analytic(s3, &n);
  const DiscreteMinimum d = lambda_discrete(w, s3);
  CHECK(d.n_star == n);
  CHECK(d.n_star == 7);
  CHECK(d.log_lambda == doctest::Approx(static_cast<double>(ref)).epsilon(1e-12));
  CHECK(d.log_lambda == doctest::Approx(-7.37857).epsilon(1e-5));
  // sandwich at this point with delta = 1
  CHECK(-std::exp(2.0) <= d.log_lambda);
  CHECK(d.log_lambda <= -std::exp(2.0) + 1.0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ls(0.5, 9.0);
  for (int i = 0; i < 60; ++i) {
    const double s = std::exp(ls(rng));
    long long arg = 0;
    const long double r = brute_log_lambda_analytic(s, &arg);
    const DiscreteMinimum dm = lambda_discrete(w, s);
    CAPTURE(s);
    CHECK(dm.log_lambda == doctest::Approx(static_cast<double>(r)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("sandwich: loglog grid from e^10 to e^30") {
  const WeightFunction w = loglog();
  std::vector<double> grid;
  for (double u = 10.0; u <= 30.0 + 1e-9; u += 0.5) grid.push_back(std::exp(u));
  const SandwichReport r = sandwich_check(w, grid);
  CHECK(r.points.size() == grid.size());
  CHECK(r.margin_min >= -1e-9);
  CHECK(r.margin_max <= w.delta() + 1e-9);
  CHECK(r.boundary_points == 0);
  for (const auto& p : r.points) CHECK(p.log_Lambda == doctest::Approx(-p.omega).epsilon(1e-14));
}

TEST_CASE("sandwich: integer minimizer gives zero margin") {
  const WeightFunction w = analytic();
  for (int n : {3, 10, 250}) {
    const ConjugatePoint p = conjugate_point(w, kE * n);
    CHECK(p.n_star == n);
    CHECK(std::abs(p.margin()) <= 1e-9 * (1.0 + p.omega));
  }
}

TEST_CASE("sandwich: boundary points only check the lower bound") {
  const WeightFunction w = family("shifted:loglog:3");
  std::vector<double> grid = log_spaced(1.5, std::exp(8.0), 20);
  const SandwichReport r = sandwich_check(w, grid);
  CHECK(r.boundary_points > 0);
  CHECK(r.margin_min >= -1e-9);
}

TEST_CASE("dual coordinates: residuals of the inverted system") {
  for (const WeightFunction& w : {analytic(), loglog()}) {
    for (double u : {12.0, 18.0, 25.0}) {
      const DualResidual r = dual_residual(w, std::exp(u));
      CHECK(r.r1 <= 1e-6);
      CHECK(r.r2 <= 1e-5);
    }
  }
}

TEST_CASE("mu form of s = e^{m'(t)}") {
  const WeightFunction w = loglog();
  for (double u : {8.0, 15.0, 30.0}) CHECK(mu_system_residual(w, std::exp(u)) <= 1e-8);
}

TEST_CASE("omega is increasing, omega' decreasing with the closed form") {
  const WeightFunction w = loglog();
  double prev_omega = -1.0, prev_d = std::numeric_limits<double>::infinity();
  for (double u = 8.0; u <= 30.0; u += 1.0) {
    const double s = std::exp(u);
    const double o = omega(w, s);
    const double d = omega_derivative(w, s);
    CHECK(o > prev_omega);
    CHECK(d < prev_d);
    // omega'(s) = t*/s = 1 / (e log t e^{1/log t})
    const double t = t_star(w, s).t, L = std::log(t);
    CHECK(d == doctest::Approx(1.0 / (kE * L * std::exp(1.0 / L))).epsilon(1e-6));
    prev_omega = o;
    prev_d = d;
  }
}

TEST_CASE("bracketing reaches large log s") {
  CHECK(t_star_log(analytic(), 35.0).t == doctest::Approx(std::exp(34.0)).epsilon(1e-9));
}
