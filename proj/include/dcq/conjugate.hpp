#pragma once

// Associated functions of a weight:
//
//   Lambda(s) = inf_{t >= t0} M(t) s^{-t} = e^{-omega(s)}
//   lambda(s) = inf_{n integer >= t0} M(n) s^{-n}
//
// Everything is carried in log-space. The continuous minimizer t* solves
// m'(t) = log s; omega(s) = t* m'(t*) - m(t*).

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dcq/weight.hpp"

namespace dcq {

inline constexpr double kRootTolerance = 1e-10;
inline constexpr double kBracketCap = 1e15;

class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Minimizer {
  double t = 0.0;
  /// log s <= m'(t0): the infimum sits at the endpoint t0.
  bool boundary = false;
};

Minimizer t_star(const WeightFunction& w, double s);
Minimizer t_star_log(const WeightFunction& w, double log_s);

double omega(const WeightFunction& w, double s);
double omega_log(const WeightFunction& w, double log_s);

struct DiscreteMinimum {
  long long n_star = 0;
  double log_lambda = 0.0;
};

DiscreteMinimum lambda_discrete(const WeightFunction& w, double s);

struct ConjugatePoint {
  double s = 0.0;
  double t_star = 0.0;
  double omega = 0.0;
  double log_Lambda = 0.0;
  long long n_star = 0;
  double log_lambda = 0.0;
  bool boundary = false;

  /// log lambda - log Lambda; in [0, delta] for interior minimizers.
  double margin() const { return log_lambda - log_Lambda; }
};

ConjugatePoint conjugate_point(const WeightFunction& w, double s);
ConjugatePoint conjugate_point_log(const WeightFunction& w, double log_s);

struct SandwichReport {
  std::vector<ConjugatePoint> points;
  double delta = 0.0;
  double margin_min = 0.0;
  double margin_max = 0.0;
  /// Points with log s <= m'(t0); only the lower bound is checked there.
  int boundary_points = 0;
};

class SandwichViolation : public std::runtime_error {
 public:
  SandwichViolation(const std::string& what, double s) : std::runtime_error(what), s_(s) {}
  double witness() const { return s_; }

 private:
  double s_;
};

/// Checks -omega(s) <= log lambda(s) <= -omega(s) + delta at every grid point
/// (1e-9 slack); throws SandwichViolation with the first witness. The upper
/// bound is only asserted where t* is interior.
SandwichReport sandwich_check(const WeightFunction& w, std::span<const double> s_grid);

/// Residuals of the inverted coordinate system t = s omega'(s),
/// m(t) = s omega'(s) log s - omega(s), with omega' by central difference.
struct DualResidual {
  double r1 = 0.0;
  double r2 = 0.0;
};

inline constexpr double kOmegaStep = 1e-5;

double omega_derivative(const WeightFunction& w, double s);
DualResidual dual_residual(const WeightFunction& w, double s);

/// |s - e t* exp(mu(t*) + t* mu'(t*))| / s, the mu-form of s = e^{m'(t)}.
double mu_system_residual(const WeightFunction& w, double s);

}  // namespace dcq
