#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sacalc/interval.hpp"

namespace sacalc {

using Rational = mpq_class;
using Exponents = std::vector<unsigned>;

/// Sparse multivariate polynomial over the rationals.
///
/// Terms are kept in a map keyed by exponent tuple (lexicographic order), so
/// there are never duplicate monomials, and zero coefficients are erased on
/// every mutation. A parallel table of double coefficients is maintained for
/// fast floating-point evaluation; it is rebuilt whenever the terms change.
class Polynomial {
 public:
  explicit Polynomial(std::size_t num_vars = 0);

  static Polynomial constant(std::size_t num_vars, const Rational& c);
  static Polynomial variable(std::size_t num_vars, std::size_t index);
  static Polynomial monomial(const Rational& c, Exponents exponents);

  /// Parses `c x1^e1 x2^e2 + ...`. Variables are `x1..xN` (1-based) or the
  /// single letters `x y z w` for indices 0..3. Coefficients may be integers,
  /// fractions `p/q`, or decimals; `*`, `^`, parentheses and unary minus are
  /// accepted.
  static Polynomial parse(std::string_view text, std::size_t num_vars);

  std::size_t num_vars() const { return num_vars_; }
  const std::map<Exponents, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  unsigned total_degree() const;
  /// Highest variable index with a nonzero exponent, plus one.
  std::size_t vars_used() const;

  double eval(std::span<const double> x) const;
  Rational eval(std::span<const Rational> x) const;
  /// Exact value at a floating-point point (every double is a rational).
  Rational eval_exact(std::span<const double> x) const;
  /// Enclosure of the range over a box, sparse Horner per variable.
  Interval eval(std::span<const Interval> box) const;

  Polynomial derivative(std::size_t index) const;
  std::vector<double> gradient(std::span<const double> x) const;

  /// Substitutes `args[i]` for variable i; all args must share num_vars.
  Polynomial substitute(std::span<const Polynomial> args) const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Polynomial& other);
  Polynomial& operator*=(const Rational& c);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.num_vars_ == b.num_vars_ && a.terms_ == b.terms_;
  }

  Polynomial pow(unsigned n) const;

  std::string to_string() const;

 private:
  void add_term(const Exponents& e, const Rational& c);
  void check_same_vars(const Polynomial& other) const;
  void rebuild_cache();

  std::size_t num_vars_;
  std::map<Exponents, Rational> terms_;
  std::vector<std::pair<Exponents, double>> fast_terms_;
};

/// Value of a rational coefficient as a tight enclosing interval.
Interval to_interval(const Rational& q);

/// Exact rational for a decimal or fraction literal such as "0.25" or "3/4".
Rational parse_rational(std::string_view text);

}  // namespace sacalc
