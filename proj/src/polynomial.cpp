#include "sacalc/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "sacalc/errors.hpp"

namespace sacalc {

Polynomial::Polynomial(std::size_t num_vars) : num_vars_(num_vars) {}

Polynomial Polynomial::constant(std::size_t num_vars, const Rational& c) {
  Polynomial p(num_vars);
  p.add_term(Exponents(num_vars, 0), c);
  p.rebuild_cache();
  return p;
}

Polynomial Polynomial::variable(std::size_t num_vars, std::size_t index) {
  if (index >= num_vars) throw DimensionMismatch("variable index out of range");
  Exponents e(num_vars, 0);
  e[index] = 1;
  Polynomial p(num_vars);
  p.add_term(e, Rational(1));
  p.rebuild_cache();
  return p;
}

Polynomial Polynomial::monomial(const Rational& c, Exponents exponents) {
  Polynomial p(exponents.size());
  p.add_term(exponents, c);
  p.rebuild_cache();
  return p;
}

void Polynomial::add_term(const Exponents& e, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void Polynomial::rebuild_cache() {
  fast_terms_.clear();
  fast_terms_.reserve(terms_.size());
  for (const auto& [e, c] : terms_) fast_terms_.emplace_back(e, c.get_d());
}

void Polynomial::check_same_vars(const Polynomial& other) const {
  if (other.num_vars_ != num_vars_) {
    throw DimensionMismatch("polynomials over " + std::to_string(num_vars_) + " and " +
                            std::to_string(other.num_vars_) + " variables");
  }
}

unsigned Polynomial::total_degree() const {
  unsigned best = 0;
  for (const auto& [e, c] : terms_) {
    unsigned s = 0;
    for (unsigned k : e) s += k;
    best = std::max(best, s);
  }
  return best;
}

std::size_t Polynomial::vars_used() const {
  std::size_t used = 0;
  for (const auto& [e, c] : terms_) {
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] != 0) used = std::max(used, i + 1);
    }
  }
  return used;
}

namespace {

double ipow(double x, unsigned n) {
  double r = 1.0;
  while (n != 0) {
    if (n & 1U) r *= x;
    x *= x;
    n >>= 1U;
  }
  return r;
}

Rational ipow(const Rational& x, unsigned n) {
  Rational r = 1;
  Rational b = x;
  while (n != 0) {
    if (n & 1U) r *= b;
    b *= b;
    n >>= 1U;
  }
  return r;
}

template <typename T>
void check_point(std::size_t n, std::span<const T> x) {
  if (x.size() != n) {
    throw DimensionMismatch("point of dimension " + std::to_string(x.size()) +
                            " for polynomial in " + std::to_string(n) + " variables");
  }
}

}  // namespace

double Polynomial::eval(std::span<const double> x) const {
  check_point(num_vars_, x);
  double sum = 0.0;
  for (const auto& [e, c] : fast_terms_) {
    double t = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] != 0) t *= ipow(x[i], e[i]);
    }
    sum += t;
  }
  return sum;
}

Rational Polynomial::eval(std::span<const Rational> x) const {
  check_point(num_vars_, x);
  Rational sum = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] != 0) t *= ipow(x[i], e[i]);
    }
    sum += t;
  }
  return sum;
}

Rational Polynomial::eval_exact(std::span<const double> x) const {
  check_point(num_vars_, x);
  std::vector<Rational> q(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) q[i] = Rational(x[i]);
  return eval(std::span<const Rational>(q));
}

Interval to_interval(const Rational& q) {
  const double d = q.get_d();  // truncates toward zero
  if (Rational(d) == q) return {d, d};
  if (q > 0) return {d, std::nextafter(d, std::numeric_limits<double>::infinity())};
  return {std::nextafter(d, -std::numeric_limits<double>::infinity()), d};
}

namespace {

using TermIt = std::map<Exponents, Rational>::const_iterator;

// Horner evaluation of the terms in [first, last), which agree on the
// exponents of variables < var. Groups by the exponent of `var`.
Interval horner(TermIt first, TermIt last, std::size_t var, std::span<const Interval> box) {
  if (var == box.size()) {
    Interval acc{0.0};
    for (auto it = first; it != last; ++it) acc = acc + to_interval(it->second);
    return acc;
  }
  struct Group {
    unsigned exponent;
    Interval value;
  };
  std::vector<Group> groups;
  auto it = first;
  while (it != last) {
    const unsigned e = it->first[var];
    auto end = it;
    while (end != last && end->first[var] == e) ++end;
    groups.push_back({e, horner(it, end, var + 1, box)});
    it = end;
  }
  const Interval& x = box[var];
  Interval acc = groups.back().value;
  for (std::size_t j = groups.size() - 1; j-- > 0;) {
    acc = groups[j].value + pow(x, groups[j + 1].exponent - groups[j].exponent) * acc;
  }
  return pow(x, groups.front().exponent) * acc;
}

}  // namespace

Interval Polynomial::eval(std::span<const Interval> box) const {
  check_point(num_vars_, box);
  if (terms_.empty()) return {0.0, 0.0};
  return horner(terms_.begin(), terms_.end(), 0, box);
}

Polynomial Polynomial::derivative(std::size_t index) const {
  if (index >= num_vars_) throw DimensionMismatch("derivative index out of range");
  Polynomial d(num_vars_);
  for (const auto& [e, c] : terms_) {
    if (e[index] == 0) continue;
    Exponents f = e;
    f[index] -= 1;
    d.add_term(f, c * e[index]);
  }
  d.rebuild_cache();
  return d;
}

std::vector<double> Polynomial::gradient(std::span<const double> x) const {
  check_point(num_vars_, x);
  std::vector<double> g(num_vars_, 0.0);
  for (const auto& [e, c] : fast_terms_) {
    for (std::size_t i = 0; i < num_vars_; ++i) {
      if (e[i] == 0) continue;
      double t = c * e[i];
      for (std::size_t j = 0; j < num_vars_; ++j) {
        const unsigned k = j == i ? e[j] - 1 : e[j];
        if (k != 0) t *= ipow(x[j], k);
      }
      g[i] += t;
    }
  }
  return g;
}

Polynomial Polynomial::substitute(std::span<const Polynomial> args) const {
  if (args.size() != num_vars_) throw DimensionMismatch("substitute: wrong argument count");
  if (args.empty()) return *this;
  const std::size_t n = args.front().num_vars();
  for (const auto& a : args) {
    if (a.num_vars() != n) throw DimensionMismatch("substitute: arguments disagree");
  }
  Polynomial out(n);
  for (const auto& [e, c] : terms_) {
    Polynomial t = constant(n, c);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] != 0) t *= args[i].pow(e[i]);
    }
    out += t;
  }
  return out;
}

Polynomial Polynomial::operator-() const {
  Polynomial p = *this;
  p *= Rational(-1);
  return p;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  check_same_vars(other);
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  rebuild_cache();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  check_same_vars(other);
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  rebuild_cache();
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& other) {
  check_same_vars(other);
  Polynomial out(num_vars_);
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : other.terms_) {
      Exponents e(num_vars_);
      for (std::size_t i = 0; i < num_vars_; ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  terms_ = std::move(out.terms_);
  rebuild_cache();
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
  } else {
    for (auto& [e, v] : terms_) v *= c;
  }
  rebuild_cache();
  return *this;
}

Polynomial Polynomial::pow(unsigned n) const {
  Polynomial r = constant(num_vars_, Rational(1));
  Polynomial b = *this;
  while (n != 0) {
    if (n & 1U) r *= b;
    n >>= 1U;
    if (n != 0) b *= b;
  }
  return r;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Highest-degree terms first reads more naturally.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    Rational mag = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool is_const = std::all_of(e.begin(), e.end(), [](unsigned k) { return k == 0; });
    bool wrote = false;
    if (mag != 1 || is_const) {
      os << mag.get_str();
      wrote = true;
    }
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (wrote) os << " ";
      os << "x" << (i + 1);
      if (e[i] != 1) os << "^" << e[i];
      wrote = true;
    }
  }
  return os.str();
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw ParseError("", "zero denominator in '" + s + "'");
    Rational q = num / den;
    q.canonicalize();
    return q;
  }
  std::size_t epos = s.find_first_of("eE");
  long exp10 = 0;
  std::string mant = s;
  if (epos != std::string::npos) {
    try {
      exp10 = std::stol(s.substr(epos + 1));
    } catch (const std::exception&) {
      throw ParseError("", "bad exponent in '" + s + "'");
    }
    mant = s.substr(0, epos);
  }
  bool neg = false;
  if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
    neg = mant[0] == '-';
    mant.erase(0, 1);
  }
  std::string digits;
  long frac = 0;
  bool seen_dot = false;
  for (char ch : mant) {
    if (ch == '.' && !seen_dot) {
      seen_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits.push_back(ch);
      if (seen_dot) ++frac;
    } else {
      throw ParseError("", "bad number '" + s + "'");
    }
  }
  if (digits.empty()) throw ParseError("", "bad number '" + s + "'");
  mpz_class num(digits, 10);
  exp10 -= frac;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
  Rational q = exp10 >= 0 ? Rational(num * scale) : Rational(num, scale);
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

namespace {

class PolyParser {
 public:
  PolyParser(std::string_view text, std::size_t n) : text_(text), n_(n) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("column " + std::to_string(pos_ + 1), what + " in polynomial '" +
                                                             std::string(text_) + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool starts_factor(char c) const {
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '(' || c == 'x' ||
           c == 'y' || c == 'z' || c == 'w';
  }

  Polynomial expr() {
    Polynomial acc(n_);
    char c = peek();
    bool neg = false;
    if (c == '+' || c == '-') {
      neg = c == '-';
      ++pos_;
    }
    Polynomial t = term();
    acc = neg ? -t : t;
    while (true) {
      c = peek();
      if (c != '+' && c != '-') break;
      ++pos_;
      Polynomial rhs = term();
      if (c == '+') {
        acc += rhs;
      } else {
        acc -= rhs;
      }
    }
    return acc;
  }

  Polynomial term() {
    Polynomial acc = factor();
    while (true) {
      char c = peek();
      if (c == '*') {
        ++pos_;
        acc *= factor();
      } else if (starts_factor(c)) {
        acc *= factor();
      } else {
        break;
      }
    }
    return acc;
  }

  Polynomial factor() {
    Polynomial base = primary();
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected exponent");
      base = base.pow(static_cast<unsigned>(std::stoul(std::string(text_.substr(start, pos_ - start)))));
    }
    return base;
  }

  Polynomial primary() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (c == '-') {
      ++pos_;
      return -factor();
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == 'x' || c == 'y' || c == 'z' || c == 'w') return variable();
    if (c == '\0') fail("unexpected end");
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Polynomial number() {
    std::size_t start = pos_;
    auto digit = [&](std::size_t i) {
      return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
    };
    while (digit(pos_) || (pos_ < text_.size() && text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t k = pos_ + 1;
      if (k < text_.size() && (text_[k] == '-' || text_[k] == '+')) ++k;
      if (digit(k)) {
        pos_ = k;
        while (digit(pos_)) ++pos_;
      }
    }
    if (pos_ < text_.size() && text_[pos_] == '/' && digit(pos_ + 1)) {
      ++pos_;
      while (digit(pos_)) ++pos_;
    }
    try {
      return Polynomial::constant(n_, parse_rational(text_.substr(start, pos_ - start)));
    } catch (const ParseError& e) {
      fail(e.what());
    }
  }

  Polynomial variable() {
    char c = text_[pos_++];
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::size_t index = 0;
    if (start != pos_) {
      if (c != 'x') fail("only x takes a numeric subscript");
      index = std::stoul(std::string(text_.substr(start, pos_ - start)));
      if (index == 0) fail("variables are numbered from x1");
      index -= 1;
    } else {
      index = c == 'x' ? 0 : c == 'y' ? 1 : c == 'z' ? 2 : 3;
    }
    if (index >= n_) {
      fail("variable index " + std::to_string(index + 1) + " exceeds " + std::to_string(n_) +
           " variables");
    }
    return Polynomial::variable(n_, index);
  }

  std::string_view text_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial Polynomial::parse(std::string_view text, std::size_t num_vars) {
  return PolyParser(text, num_vars).parse();
}

}  // namespace sacalc
