#include "sacalc/form.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sacalc/errors.hpp"

namespace sacalc {

std::vector<IndexSet> combinations(std::size_t n, std::size_t k) {
  std::vector<IndexSet> out;
  if (k > n) return out;
  IndexSet cur(k);
  for (std::size_t i = 0; i < k; ++i) cur[i] = static_cast<int>(i);
  while (true) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == static_cast<int>(n - k + i - 1)) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

namespace {

std::size_t combination_rank(const IndexSet& set, std::size_t n) {
  // Position of `set` in lexicographic order of combinations(n, |set|).
  auto binom = [](std::size_t a, std::size_t b) -> std::size_t {
    if (b > a) return 0;
    std::size_t r = 1;
    for (std::size_t i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
  };
  const std::size_t k = set.size();
  std::size_t rank = 0;
  int prev = -1;
  for (std::size_t i = 0; i < k; ++i) {
    for (int v = prev + 1; v < set[i]; ++v) {
      rank += binom(n - static_cast<std::size_t>(v) - 1, k - i - 1);
    }
    prev = set[i];
  }
  return rank;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Sorts in place; returns the permutation sign, or 0 on a repeated index.
int sort_with_sign(IndexSet& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    for (std::size_t j = i; j > 0 && idx[j - 1] > idx[j]; --j) {
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  }
  for (std::size_t i = 1; i < idx.size(); ++i) {
    if (idx[i] == idx[i - 1]) return 0;
  }
  return sign;
}

}  // namespace

Covector::Covector(std::size_t p, std::size_t n) : degree(p), dim(n), coeffs(binomial(n, p), 0.0) {}

double Covector::component(const IndexSet& indices) const {
  if (indices.size() != degree) throw DimensionMismatch("covector component of wrong degree");
  return coeffs[combination_rank(indices, dim)];
}

double Covector::max_abs_diff(const Covector& other) const {
  if (other.degree != degree || other.dim != dim) throw DimensionMismatch("covector shapes differ");
  double m = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) m = std::max(m, std::abs(coeffs[i] - other.coeffs[i]));
  return m;
}

DifferentialForm::DifferentialForm(std::size_t degree, std::size_t ambient)
    : degree_(degree), ambient_(ambient) {}

DifferentialForm DifferentialForm::from_terms(
    std::size_t degree, std::size_t ambient,
    const std::vector<std::pair<Polynomial, IndexSet>>& terms) {
  DifferentialForm f(degree, ambient);
  for (const auto& [c, idx] : terms) f.add(c, idx);
  return f;
}

DifferentialForm& DifferentialForm::add(const Polynomial& coeff, IndexSet indices) {
  if (coeff.num_vars() != ambient_) {
    throw DimensionMismatch("form coefficient has " + std::to_string(coeff.num_vars()) +
                            " variables, ambient is " + std::to_string(ambient_));
  }
  if (indices.size() != degree_) {
    throw DimensionMismatch("index set of size " + std::to_string(indices.size()) +
                            " in a " + std::to_string(degree_) + "-form");
  }
  for (int i : indices) {
    if (i < 0 || static_cast<std::size_t>(i) >= ambient_) {
      throw DimensionMismatch("form index " + std::to_string(i) + " out of range");
    }
  }
  const int sign = sort_with_sign(indices);
  if (sign == 0 || coeff.is_zero()) return *this;
  Polynomial c = sign > 0 ? coeff : -coeff;
  auto [it, inserted] = terms_.try_emplace(indices, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
  return *this;
}

Covector DifferentialForm::at(const Vec& y) const {
  if (static_cast<std::size_t>(y.size()) != ambient_) throw DimensionMismatch("form evaluated off its ambient");
  Covector cv(degree_, ambient_);
  if (cv.coeffs.empty()) return cv;
  std::span<const double> ys(y.data(), static_cast<std::size_t>(y.size()));
  for (const auto& [idx, c] : terms_) cv.coeffs[combination_rank(idx, ambient_)] = c.eval(ys);
  return cv;
}

DifferentialForm DifferentialForm::wedge(const DifferentialForm& other) const {
  if (other.ambient_ != ambient_) throw DimensionMismatch("wedge of forms on different spaces");
  DifferentialForm out(degree_ + other.degree_, ambient_);
  for (const auto& [ia, ca] : terms_) {
    for (const auto& [ib, cb] : other.terms_) {
      IndexSet idx = ia;
      idx.insert(idx.end(), ib.begin(), ib.end());
      out.add(ca * cb, idx);
    }
  }
  return out;
}

DifferentialForm& DifferentialForm::operator+=(const DifferentialForm& other) {
  if (other.degree_ != degree_ || other.ambient_ != ambient_) {
    throw DimensionMismatch("adding forms of different shape");
  }
  for (const auto& [idx, c] : other.terms_) add(c, idx);
  return *this;
}

DifferentialForm& DifferentialForm::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [idx, p] : terms_) p *= c;
  return *this;
}

std::string DifferentialForm::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [idx, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.to_string() << ")";
    for (std::size_t k = 0; k < idx.size(); ++k) os << (k == 0 ? " " : "^") << "dx" << (idx[k] + 1);
  }
  return os.str();
}

DifferentialForm exterior_derivative(const DifferentialForm& form) {
  DifferentialForm out(form.degree() + 1, form.ambient());
  if (form.degree() >= form.ambient()) return out;
  for (const auto& [idx, c] : form.terms()) {
    for (std::size_t j = 0; j < form.ambient(); ++j) {
      Polynomial dc = c.derivative(j);
      if (dc.is_zero()) continue;
      IndexSet with = idx;
      with.insert(with.begin(), static_cast<int>(j));  // dx_j ∧ dx_I
      out.add(dc, with);
    }
  }
  return out;
}

Covector pull_covector(const Covector& covector, const Mat& jacobian) {
  const auto cod = static_cast<std::size_t>(jacobian.rows());
  const auto dom = static_cast<std::size_t>(jacobian.cols());
  if (cod != covector.dim) throw DimensionMismatch("pullback: jacobian rows != covector dimension");
  const std::size_t p = covector.degree;
  Covector out(p, dom);
  if (p > dom) return out;
  const auto rows = combinations(cod, p);
  const auto cols = combinations(dom, p);
  if (p == 0) {
    out.coeffs[0] = covector.coeffs.empty() ? 0.0 : covector.coeffs[0];
    return out;
  }
  Mat minor(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  for (std::size_t ci = 0; ci < cols.size(); ++ci) {
    double acc = 0.0;
    for (std::size_t ri = 0; ri < rows.size(); ++ri) {
      const double c = covector.coeffs[ri];
      if (c == 0.0) continue;
      for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < p; ++b) {
          minor(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
              jacobian(rows[ri][a], cols[ci][b]);
        }
      }
      acc += c * minor.determinant();
    }
    out.coeffs[ci] = acc;
  }
  return out;
}

Covector pullback(const DifferentialForm& form, const SmoothMap& map, const Vec& x) {
  if (map.codomain_dim() != form.ambient()) {
    throw DimensionMismatch("pullback: map lands in R^" + std::to_string(map.codomain_dim()) +
                            ", form lives on R^" + std::to_string(form.ambient()));
  }
  if (form.degree() > map.domain_dim()) {
    throw DimensionMismatch("pullback: form degree exceeds map domain dimension");
  }
  const Covector at_image = form.at(map(x));
  if (form.degree() == 0) {
    Covector out(0, map.domain_dim());
    out.coeffs[0] = at_image.coeffs[0];
    return out;
  }
  return pull_covector(at_image, map.jacobian(x).value);
}

}  // namespace sacalc
