#include "dcq/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <system_error>
#include <utility>

namespace dcq {

struct Expr::Node {
  NodeKind kind;
  double value = 0.0;
  std::vector<Expr> children;
};

Expr::Expr() : Expr(constant(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) {
  return Expr(std::make_shared<const Node>(Node{NodeKind::Constant, value, {}}));
}

Expr Expr::variable() {
  static const Expr t(std::make_shared<const Node>(Node{NodeKind::Variable, 0.0, {}}));
  return t;
}

Expr Expr::sum(std::vector<Expr> terms) {
  if (terms.empty()) throw std::invalid_argument("Sum needs at least one term");
  return Expr(std::make_shared<const Node>(Node{NodeKind::Sum, 0.0, std::move(terms)}));
}

Expr Expr::product(std::vector<Expr> factors) {
  if (factors.empty()) throw std::invalid_argument("Product needs at least one factor");
  return Expr(std::make_shared<const Node>(Node{NodeKind::Product, 0.0, std::move(factors)}));
}

Expr Expr::power(Expr base, double exponent) {
  return Expr(std::make_shared<const Node>(Node{NodeKind::Power, exponent, {std::move(base)}}));
}

Expr Expr::log(Expr arg) {
  return Expr(std::make_shared<const Node>(Node{NodeKind::Log, 0.0, {std::move(arg)}}));
}

Expr Expr::exp(Expr arg) {
  return Expr(std::make_shared<const Node>(Node{NodeKind::Exp, 0.0, {std::move(arg)}}));
}

NodeKind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
std::span<const Expr> Expr::children() const { return node_->children; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  if (std::memcmp(&a.node_->value, &b.node_->value, sizeof(double)) != 0) return false;
  const auto ca = a.children();
  const auto cb = b.children();
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i)
    if (!(ca[i] == cb[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

// Sign flip used for subtraction and unary minus. Folds into a leading
// constant so that `a - 2*t` stores Product(-2, t).
Expr negate(const Expr& e) {
  if (e.is_constant()) return Expr::constant(-e.value());
  if (e.kind() == NodeKind::Product && e.child(0).is_constant()) {
    std::vector<Expr> f(e.children().begin(), e.children().end());
    f[0] = Expr::constant(-f[0].value());
    return Expr::product(std::move(f));
  }
  if (e.kind() == NodeKind::Product) {
    std::vector<Expr> f{Expr::constant(-1.0)};
    f.insert(f.end(), e.children().begin(), e.children().end());
    return Expr::product(std::move(f));
  }
  return Expr::product({Expr::constant(-1.0), e});
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Expr parse() {
    skip_ws();
    if (pos_ == s_.size()) throw ParseError("empty input", 0);
    Expr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("syntax error at offset " + std::to_string(pos_) + ": " + msg, pos_);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expr() {
    const bool leading_minus = accept('-');
    Expr first = term();
    if (leading_minus) first = negate(first);
    std::vector<Expr> terms{std::move(first)};
    for (;;) {
      if (accept('+')) {
        terms.push_back(term());
      } else if (accept('-')) {
        terms.push_back(negate(term()));
      } else {
        break;
      }
    }
    return terms.size() == 1 ? terms.front() : Expr::sum(std::move(terms));
  }

  Expr term() {
    std::vector<Expr> factors{factor()};
    while (accept('*')) factors.push_back(factor());
    return factors.size() == 1 ? factors.front() : Expr::product(std::move(factors));
  }

  Expr factor() {
    Expr base = atom();
    if (accept('^')) {
      skip_ws();
      double sign = 1.0;
      if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
        if (s_[pos_] == '-') sign = -1.0;
        ++pos_;
      }
      skip_ws();
      if (pos_ == s_.size() || !(std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
        fail("expected number after '^'");
      return Expr::power(std::move(base), sign * number());
    }
    return base;
  }

  Expr atom() {
    skip_ws();
    if (pos_ == s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Expr::constant(number());
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string_view id = s_.substr(start, pos_ - start);
      if (id == "t") return Expr::variable();
      if (id == "log" || id == "exp") {
        expect('(');
        Expr arg = expr();
        expect(')');
        return id == "log" ? Expr::log(std::move(arg)) : Expr::exp(std::move(arg));
      }
      pos_ = start;
      throw ParseError("unknown identifier '" + std::string(id) + "' at offset " + std::to_string(start), start);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  double number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      // Only an exponent if digits follow; "2exp(t)" is not a number.
      std::size_t q = pos_ + 1;
      if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
      if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
        pos_ = q;
        digits();
      }
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || ptr != s_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return v;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_weight(std::string_view text) { return Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

bool is_negative_term(const Expr& e) {
  if (e.is_constant()) return std::signbit(e.value());
  return e.kind() == NodeKind::Product && e.child(0).is_constant() && std::signbit(e.child(0).value());
}

void write(std::string& out, const Expr& e);
void write_factor(std::string& out, const Expr& e);

// -1*x*y prints as -x*y; the parser folds the sign back into the coefficient.
bool is_minus_one_product(const Expr& e) {
  return e.kind() == NodeKind::Product && e.children().size() >= 2 && e.child(0).is_constant(-1.0);
}

void write_factors_from(std::string& out, const Expr& e, std::size_t start) {
  for (std::size_t i = start; i < e.children().size(); ++i) {
    if (i > start) out += '*';
    write_factor(out, e.child(i));
  }
}

// A factor inside a product, or a Power base.
void write_factor(std::string& out, const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Sum:
    case NodeKind::Product:
      out += '(';
      write(out, e);
      out += ')';
      return;
    case NodeKind::Constant:
      if (std::signbit(e.value())) {
        out += '(';
        write(out, e);
        out += ')';
        return;
      }
      break;
    default:
      break;
  }
  write(out, e);
}

void write_summand(std::string& out, const Expr& e) {
  if (e.kind() == NodeKind::Sum) {
    out += '(';
    write(out, e);
    out += ')';
  } else {
    write(out, e);
  }
}

void write(std::string& out, const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Constant:
      if (std::signbit(e.value())) {
        out += '-';
        out += format_number(-e.value());
      } else {
        out += format_number(e.value());
      }
      return;
    case NodeKind::Variable:
      out += 't';
      return;
    case NodeKind::Sum: {
      bool first = true;
      for (const Expr& c : e.children()) {
        if (is_minus_one_product(c)) {
          out += first ? "-" : " - ";
          write_factors_from(out, c, 1);
        } else if (is_negative_term(c)) {
          out += first ? "-" : " - ";
          write_summand(out, negate(c));
        } else {
          if (!first) out += " + ";
          write_summand(out, c);
        }
        first = false;
      }
      return;
    }
    case NodeKind::Product: {
      const auto f = e.children();
      if (is_minus_one_product(e)) {
        out += '-';
        write_factors_from(out, e, 1);
        return;
      }
      if (f[0].is_constant() && std::signbit(f[0].value())) {
        // Leading negative coefficient prints as unary minus on the term.
        out += '-';
        write(out, negate(e));
        return;
      }
      write_factors_from(out, e, 0);
      return;
    }
    case NodeKind::Power: {
      const Expr& base = e.child(0);
      if (base.kind() == NodeKind::Power) {
        out += '(';
        write(out, base);
        out += ')';
      } else {
        write_factor(out, base);
      }
      out += '^';
      out += format_number(e.value());
      return;
    }
    case NodeKind::Log:
    case NodeKind::Exp:
      out += e.kind() == NodeKind::Log ? "log(" : "exp(";
      write(out, e.child(0));
      out += ')';
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  write(out, e);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

template <class Scalar>
Scalar eval(const Expr& e, Scalar t) {
  using std::exp;
  using std::log;
  using std::pow;
  switch (e.kind()) {
    case NodeKind::Constant:
      return static_cast<Scalar>(e.value());
    case NodeKind::Variable:
      return t;
    case NodeKind::Sum: {
      Scalar acc = 0;
      for (const Expr& c : e.children()) acc += eval(c, t);
      return acc;
    }
    case NodeKind::Product: {
      Scalar acc = 1;
      for (const Expr& c : e.children()) acc *= eval(c, t);
      return acc;
    }
    case NodeKind::Power: {
      const Scalar b = eval(e.child(0), t);
      const double r = e.value();
      if (b < 0 && r != std::floor(r))
        throw DomainError("non-integer power of a negative value", to_string(e), static_cast<double>(t));
      if (b == 0 && r < 0) throw DomainError("negative power of zero", to_string(e), static_cast<double>(t));
      if (r == 1.0) return b;
      if (r == -1.0) return Scalar(1) / b;
      if (r == 2.0) return b * b;
      return pow(b, static_cast<Scalar>(r));
    }
    case NodeKind::Log: {
      const Scalar a = eval(e.child(0), t);
      if (!(a > 0)) throw DomainError("log of non-positive value", to_string(e), static_cast<double>(t));
      return log(a);
    }
    case NodeKind::Exp:
      return exp(eval(e.child(0), t));
  }
  return Scalar(0);
}

template double eval<double>(const Expr&, double);
template long double eval<long double>(const Expr&, long double);

// ---------------------------------------------------------------------------
// Simplifying constructors

Expr make_power(Expr base, double exponent) {
  if (exponent == 0.0) return Expr::constant(1.0);
  if (exponent == 1.0) return base;
  if (base.is_constant()) return Expr::constant(std::pow(base.value(), exponent));
  return Expr::power(std::move(base), exponent);
}

Expr make_sum(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  double constant = 0.0;
  bool has_constant = false;
  auto add = [&](auto&& self, const Expr& e) -> void {
    if (e.kind() == NodeKind::Sum) {
      for (const Expr& c : e.children()) self(self, c);
    } else if (e.is_constant()) {
      constant += e.value();
      has_constant = true;
    } else {
      flat.push_back(e);
    }
  };
  for (const Expr& e : terms) add(add, e);
  if (has_constant && constant != 0.0) flat.push_back(Expr::constant(constant));
  if (flat.empty()) return Expr::constant(0.0);
  if (flat.size() == 1) return flat.front();
  return Expr::sum(std::move(flat));
}

Expr make_product(std::vector<Expr> factors) {
  double coef = 1.0;
  // Bases in first-appearance order with their accumulated exponents.
  std::vector<std::pair<Expr, double>> powers;
  auto add = [&](auto&& self, const Expr& e) -> void {
    switch (e.kind()) {
      case NodeKind::Product:
        for (const Expr& c : e.children()) self(self, c);
        return;
      case NodeKind::Constant:
        coef *= e.value();
        return;
      default:
        break;
    }
    const Expr base = e.kind() == NodeKind::Power ? e.child(0) : e;
    const double r = e.kind() == NodeKind::Power ? e.value() : 1.0;
    for (auto& [b, acc] : powers) {
      if (b == base) {
        acc += r;
        return;
      }
    }
    powers.emplace_back(base, r);
  };
  for (const Expr& e : factors) add(add, e);
  if (coef == 0.0) return Expr::constant(0.0);

  std::vector<Expr> out;
  for (auto& [b, r] : powers) {
    if (r == 0.0) continue;
    Expr p = make_power(b, r);
    // a power of a constant base folds into the coefficient
    if (p.is_constant())
      coef *= p.value();
    else
      out.push_back(std::move(p));
  }
  if (coef == 0.0) return Expr::constant(0.0);
  if (out.empty()) return Expr::constant(coef);
  if (coef != 1.0) out.insert(out.begin(), Expr::constant(coef));
  if (out.size() == 1) return out.front();
  return Expr::product(std::move(out));
}

// ---------------------------------------------------------------------------
// Differentiation

Expr differentiate(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Constant:
      return Expr::constant(0.0);
    case NodeKind::Variable:
      return Expr::constant(1.0);
    case NodeKind::Sum: {
      std::vector<Expr> d;
      for (const Expr& c : e.children()) d.push_back(differentiate(c));
      return make_sum(std::move(d));
    }
    case NodeKind::Product: {
      const auto f = e.children();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < f.size(); ++i) {
        Expr di = differentiate(f[i]);
        if (di.is_constant(0.0)) continue;
        std::vector<Expr> factors(f.begin(), f.end());
        factors[i] = std::move(di);
        terms.push_back(make_product(std::move(factors)));
      }
      return make_sum(std::move(terms));
    }
    case NodeKind::Power: {
      const Expr& b = e.child(0);
      const double r = e.value();
      return make_product({Expr::constant(r), make_power(b, r - 1.0), differentiate(b)});
    }
    case NodeKind::Log: {
      const Expr& u = e.child(0);
      return make_product({differentiate(u), make_power(u, -1.0)});
    }
    case NodeKind::Exp:
      return make_product({differentiate(e.child(0)), e});
  }
  return Expr::constant(0.0);
}

Expr substitute(const Expr& e, const Expr& replacement) {
  switch (e.kind()) {
    case NodeKind::Constant:
      return e;
    case NodeKind::Variable:
      return replacement;
    case NodeKind::Sum:
    case NodeKind::Product: {
      std::vector<Expr> c;
      for (const Expr& x : e.children()) c.push_back(substitute(x, replacement));
      return e.kind() == NodeKind::Sum ? Expr::sum(std::move(c)) : Expr::product(std::move(c));
    }
    case NodeKind::Power:
      return Expr::power(substitute(e.child(0), replacement), e.value());
    case NodeKind::Log:
      return Expr::log(substitute(e.child(0), replacement));
    case NodeKind::Exp:
      return Expr::exp(substitute(e.child(0), replacement));
  }
  return e;
}

}  // namespace dcq
