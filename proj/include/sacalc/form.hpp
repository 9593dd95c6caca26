#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sacalc/polynomial.hpp"
#include "sacalc/smooth_map.hpp"

namespace sacalc {

using IndexSet = std::vector<int>;

/// All strictly increasing index sets of size k drawn from {0..n-1}, in
/// lexicographic order.
std::vector<IndexSet> combinations(std::size_t n, std::size_t k);

/// A p-covector on R^dim, stored densely against combinations(dim, degree).
struct Covector {
  std::size_t degree = 0;
  std::size_t dim = 0;
  std::vector<double> coeffs;

  Covector(std::size_t degree, std::size_t dim);
  double component(const IndexSet& indices) const;
  double max_abs_diff(const Covector& other) const;
};

/// Degree-p differential form on R^ambient with polynomial coefficients.
///
/// Terms are keyed by strictly increasing index sets. Construction through
/// add() sorts the supplied indices and applies the permutation sign, and drops
/// terms with a repeated index, so two equal forms always compare equal.
class DifferentialForm {
 public:
  DifferentialForm(std::size_t degree, std::size_t ambient);

  static DifferentialForm from_terms(std::size_t degree, std::size_t ambient,
                                     const std::vector<std::pair<Polynomial, IndexSet>>& terms);

  DifferentialForm& add(const Polynomial& coeff, IndexSet indices);

  std::size_t degree() const { return degree_; }
  std::size_t ambient() const { return ambient_; }
  const std::map<IndexSet, Polynomial>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Coefficients evaluated at y.
  Covector at(const Vec& y) const;

  DifferentialForm wedge(const DifferentialForm& other) const;

  DifferentialForm& operator+=(const DifferentialForm& other);
  DifferentialForm& operator*=(const Rational& c);
  friend DifferentialForm operator+(DifferentialForm a, const DifferentialForm& b) { return a += b; }
  friend DifferentialForm operator*(const Rational& c, DifferentialForm a) { return a *= c; }
  friend bool operator==(const DifferentialForm& a, const DifferentialForm& b) {
    return a.degree_ == b.degree_ && a.ambient_ == b.ambient_ && a.terms_ == b.terms_;
  }

  std::string to_string() const;

 private:
  std::size_t degree_;
  std::size_t ambient_;
  std::map<IndexSet, Polynomial> terms_;
};

/// dω. For a top-degree form the result is the zero form of degree ambient+1.
DifferentialForm exterior_derivative(const DifferentialForm& form);

/// Pulls a covector at F(x) back through the Jacobian J of F at x (J is
/// codomain x domain): components are sums of coefficient times p×p minors.
Covector pull_covector(const Covector& covector, const Mat& jacobian);

/// (F*ω)(x).
Covector pullback(const DifferentialForm& form, const SmoothMap& map, const Vec& x);

}  // namespace sacalc
