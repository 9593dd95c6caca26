#include "sacalc/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <string>

#include "sacalc/errors.hpp"

namespace sacalc {

std::vector<double> QuadratureRule::point(std::size_t i) const {
  return {nodes[i].begin() + 1, nodes[i].end()};
}

double monomial_integral(const std::vector<unsigned>& exponents) {
  // Π a_i! / (|a| + p)! accumulated as a product of ratios to avoid overflow.
  const std::size_t p = exponents.size();
  unsigned total = 0;
  for (unsigned a : exponents) total += a;
  double value = 1.0;
  unsigned k = 1;
  for (unsigned a : exponents) {
    for (unsigned i = 1; i <= a; ++i) value *= static_cast<double>(i) / static_cast<double>(k++);
  }
  for (; k <= total + p; ++k) value /= static_cast<double>(k);
  return value;
}

void gauss_jacobi(int n, double alpha, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw InvalidArgument("gauss_jacobi: need at least one node");
  const double beta = 0.0;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + alpha + beta;
    t(k, k) = k == 0 ? (beta - alpha) / (alpha + beta + 2.0) : (beta * beta - alpha * alpha) / (s * (s + 2.0));
    if (k + 1 < n) {
      const double j = k + 1.0;
      const double sj = 2.0 * j + alpha + beta;
      const double b = std::sqrt(4.0 * j * (j + alpha) * (j + beta) * (j + alpha + beta) /
                                 (sj * sj * (sj + 1.0) * (sj - 1.0)));
      t(k, k + 1) = b;
      t(k + 1, k) = b;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
  // Mass of (1-x)^alpha on [-1, 1], then mapped to [0, 1].
  const double mu0 = std::pow(2.0, alpha + beta + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
                     std::tgamma(alpha + beta + 2.0);
  nodes.resize(static_cast<std::size_t>(n));
  weights.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double v0 = eig.eigenvectors()(0, k);
    nodes[static_cast<std::size_t>(k)] = 0.5 * (1.0 + eig.eigenvalues()[k]);
    weights[static_cast<std::size_t>(k)] = mu0 * v0 * v0 / std::pow(2.0, alpha + 1.0);
  }
}

namespace {

void add_orbit(QuadratureRule& rule, std::vector<double> bary, double weight) {
  std::sort(bary.begin(), bary.end());
  do {
    rule.nodes.push_back(bary);
    rule.weights.push_back(weight);
  } while (std::next_permutation(bary.begin(), bary.end()));
}

QuadratureRule collapsed_product(std::size_t p, int degree) {
  const int n = std::max(1, (degree + 2) / 2);
  std::vector<std::vector<double>> xs(p);
  std::vector<std::vector<double>> ws(p);
  for (std::size_t k = 0; k < p; ++k) gauss_jacobi(n, static_cast<double>(p - 1 - k), xs[k], ws[k]);
  QuadratureRule rule;
  rule.dim = p;
  std::vector<int> idx(p, 0);
  while (true) {
    std::vector<double> t(p);
    double scale = 1.0;
    double w = 1.0;
    for (std::size_t k = 0; k < p; ++k) {
      const double xi = xs[k][static_cast<std::size_t>(idx[k])];
      t[k] = xi * scale;
      scale *= 1.0 - xi;
      w *= ws[k][static_cast<std::size_t>(idx[k])];
    }
    std::vector<double> bary(p + 1);
    bary[0] = 1.0 - std::accumulate(t.begin(), t.end(), 0.0);
    std::copy(t.begin(), t.end(), bary.begin() + 1);
    rule.nodes.push_back(std::move(bary));
    rule.weights.push_back(w);
    std::size_t k = 0;
    while (k < p && ++idx[k] == n) idx[k++] = 0;
    if (k == p) break;
  }
  rule.degree = 2 * n - 1;
  return rule;
}

}  // namespace

double exactness_error(const QuadratureRule& rule, int degree) {
  const std::size_t p = rule.dim;
  double worst = 0.0;
  if (p == 0) return std::abs(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0) - 1.0);
  std::vector<unsigned> a(p, 0);
  while (true) {
    const unsigned total = std::accumulate(a.begin(), a.end(), 0U);
    if (static_cast<int>(total) <= degree) {
      double q = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        double term = rule.weights[i];
        for (std::size_t k = 0; k < p; ++k) term *= std::pow(rule.nodes[i][k + 1], a[k]);
        q += term;
      }
      worst = std::max(worst, std::abs(q - monomial_integral(a)));
    }
    std::size_t k = 0;
    while (k < p && ++a[k] > static_cast<unsigned>(degree)) a[k++] = 0;
    if (k == p) break;
  }
  return worst;
}

QuadratureRule make_rule(std::size_t dim, int degree) {
  if (degree < 0) throw InvalidArgument("quadrature degree must be >= 0");
  if (degree > 30) throw InvalidArgument("quadrature degree above 30 is not supported");
  QuadratureRule rule;
  rule.dim = dim;
  if (dim == 0) {
    rule.nodes.push_back({1.0});
    rule.weights.push_back(1.0);
    rule.degree = degree;
  } else if (dim == 1) {
    std::vector<double> x;
    std::vector<double> w;
    const int n = std::max(1, (degree + 2) / 2);
    gauss_jacobi(n, 0.0, x, w);
    for (std::size_t i = 0; i < x.size(); ++i) {
      rule.nodes.push_back({1.0 - x[i], x[i]});
      rule.weights.push_back(w[i]);
    }
    rule.degree = 2 * n - 1;
  } else if (dim == 2 && degree <= 1) {
    rule.nodes.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
    rule.weights.push_back(0.5);
    rule.degree = 1;
  } else if (dim == 2 && degree == 2) {
    add_orbit(rule, {2.0 / 3, 1.0 / 6, 1.0 / 6}, 0.5 / 3.0);
    rule.degree = 2;
  } else if (dim == 2 && degree <= 4) {
    add_orbit(rule, {0.108103018168070, 0.445948490915965, 0.445948490915965}, 0.5 * 0.223381589678011);
    add_orbit(rule, {0.816847572980459, 0.091576213509771, 0.091576213509771}, 0.5 * 0.109951743655322);
    rule.degree = 4;
  } else if (dim == 3 && degree <= 1) {
    rule.nodes.push_back({0.25, 0.25, 0.25, 0.25});
    rule.weights.push_back(1.0 / 6.0);
    rule.degree = 1;
  } else if (dim == 3 && degree == 2) {
    add_orbit(rule, {0.5854101966249685, 0.1381966011250105, 0.1381966011250105, 0.1381966011250105}, 1.0 / 24.0);
    rule.degree = 2;
  } else {
    rule = collapsed_product(dim, degree);
  }
  const double err = exactness_error(rule, rule.degree);
  if (!(err <= 1e-12)) {
    throw Error("quadrature rule of dimension " + std::to_string(dim) + " fails exactness check (" +
                std::to_string(err) + ")");
  }
  return rule;
}

}  // namespace sacalc
