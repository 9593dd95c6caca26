#pragma once

#include <cstddef>
#include <vector>

namespace sacalc {

/// Quadrature on the standard p-simplex {t_i >= 0, Σ t_i <= 1}.
///
/// Nodes are barycentric (p+1 entries; entry 0 is 1 - Σ t_i), weights sum to
/// 1/p!. `degree` is the exactness actually verified at construction, which
/// may exceed the requested degree.
struct QuadratureRule {
  std::size_t dim = 0;
  std::vector<std::vector<double>> nodes;
  std::vector<double> weights;
  int degree = 0;

  /// Cartesian coordinates (t_1 .. t_p) of node i.
  std::vector<double> point(std::size_t i) const;
};

/// Symmetric rules where available (p = 2 up to degree 4, p = 3 up to
/// degree 2), Gauss–Legendre for p = 1, and a collapsed-coordinate product of
/// Gauss–Jacobi rules otherwise. Throws InvalidArgument for degree < 0 and
/// Error when the verification against exact monomial integrals fails.
QuadratureRule make_rule(std::size_t dim, int degree);

/// Exact ∫ t^a over the standard simplex: Π a_i! / (|a| + p)!.
double monomial_integral(const std::vector<unsigned>& exponents);

/// Largest |rule(t^a) - exact| over all monomials with |a| <= degree.
double exactness_error(const QuadratureRule& rule, int degree);

/// Gauss–Jacobi nodes and weights on [0, 1] for the weight (1 - x)^alpha.
void gauss_jacobi(int n, double alpha, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace sacalc
