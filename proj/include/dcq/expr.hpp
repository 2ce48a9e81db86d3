#pragma once

// Closed-form expressions in one variable t.
//
// Wire grammar (used verbatim by the CLI, JSON reports and fixtures):
//
//   expr   := ['-'] term (('+' | '-') term)*
//   term   := factor ('*' factor)*
//   factor := atom ('^' ['-'|'+'] number)?
//   atom   := number | 't' | ('log' | 'exp') '(' expr ')' | '(' expr ')'
//
// '^' binds tighter than '*', which binds tighter than '+'/'-'; all binary
// operators associate to the left. A subtraction `a - b` is stored as
// Sum(a, -1*b), with the sign folded into a leading constant when possible.

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dcq {

enum class NodeKind { Constant, Variable, Sum, Product, Power, Log, Exp };

class Expr {
 public:
  /// The constant 0.
  Expr();

  static Expr constant(double value);
  static Expr variable();
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr power(Expr base, double exponent);
  static Expr log(Expr arg);
  static Expr exp(Expr arg);

  NodeKind kind() const;
  /// Constant value, or the exponent of a Power node. Zero otherwise.
  double value() const;
  std::span<const Expr> children() const;
  const Expr& child(std::size_t i) const { return children()[i]; }

  bool is_constant() const { return kind() == NodeKind::Constant; }
  bool is_constant(double v) const { return is_constant() && value() == v; }

  /// Structural equality (same tree shape, same constants bit-for-bit).
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Raised when evaluation leaves the natural domain (log of a non-positive
/// value, non-integer power of a negative base, division by zero).
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, std::string subexpression, double t)
      : std::domain_error(what), subexpression_(std::move(subexpression)), t_(t) {}
  const std::string& subexpression() const { return subexpression_; }
  double at() const { return t_; }

 private:
  std::string subexpression_;
  double t_;
};

Expr parse_weight(std::string_view text);

/// Serializes in the wire grammar; parse_weight(to_string(e)) == e for every
/// tree produced by the parser or by differentiate().
std::string to_string(const Expr& e);

template <class Scalar>
Scalar eval(const Expr& e, Scalar t);

extern template double eval<double>(const Expr&, double);
extern template long double eval<long double>(const Expr&, long double);

/// Exact symbolic derivative d/dt. The result is simplified conservatively:
/// constants folded, zero summands and unit factors dropped, equal bases in a
/// product merged into a single power.
Expr differentiate(const Expr& e);

/// Replaces every occurrence of t by `replacement`.
Expr substitute(const Expr& e, const Expr& replacement);

// Simplifying constructors used by differentiate(). Unlike the raw
// Expr::sum / Expr::product they flatten and fold.
Expr make_sum(std::vector<Expr> terms);
Expr make_product(std::vector<Expr> factors);
Expr make_power(Expr base, double exponent);

inline Expr operator+(Expr a, Expr b) { return make_sum({std::move(a), std::move(b)}); }
inline Expr operator*(Expr a, Expr b) { return make_product({std::move(a), std::move(b)}); }
inline Expr operator*(double c, Expr b) { return make_product({Expr::constant(c), std::move(b)}); }
inline Expr pow(Expr base, double r) { return make_power(std::move(base), r); }
inline Expr log(Expr a) { return Expr::log(std::move(a)); }
inline Expr exp(Expr a) { return Expr::exp(std::move(a)); }

}  // namespace dcq
