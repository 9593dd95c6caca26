#pragma once

#include <cstddef>
#include <map>
#include <optional>

#include "sacalc/form.hpp"
#include "sacalc/mesh.hpp"
#include "sacalc/quadrature.hpp"
#include "sacalc/triangulate.hpp"

namespace sacalc {

inline constexpr int kDefaultQuadratureDegree = 4;
/// Inward shift of nodes where a chart's Jacobian comes from finite differences.
inline constexpr double kFdNodeShift = 1e-7;

/// Σ w_i (chart^* ω)(node_i) on the standard simplex. `fd_nodes`, when given,
/// is incremented for every node evaluated with a finite-difference Jacobian.
double integrate_simplex(const DifferentialForm& form, const SmoothMap& chart, const QuadratureRule& rule,
                         std::size_t* fd_nodes = nullptr);

struct IntegralReport {
  double value = 0.0;
  /// Signed contribution (chain coefficient times simplex integral) per id.
  std::map<int, double> contributions;
  int degree = 0;  // exactness of the rule used
  /// |I(rule of degree q) - I(rule of the next degree)|.
  double error_estimate = 0.0;
  std::size_t fd_nodes = 0;
};

/// Σ_σ μ(σ) ∫_σ chart_σ^* ω, summed with compensation in ascending id order.
IntegralReport integrate_chain(const DifferentialForm& form, const TriangulationBundle& bundle, const Chain& chain,
                               int degree = kDefaultQuadratureDegree);

struct StokesReport {
  IntegralReport interior;  // ∫_μ dω
  IntegralReport boundary;  // ∫_{∂μ} ω
  double residual = 0.0;
};

StokesReport stokes_residual(const DifferentialForm& form, const TriangulationBundle& bundle, const Chain& chain,
                             int degree = kDefaultQuadratureDegree);

struct ComparisonReport {
  IntegralReport first;
  IntegralReport second;
  double delta = 0.0;
  std::optional<IntegralReport> common;
  /// max - min over the values computed (two or three).
  double spread = 0.0;
};

/// Integrates a top-degree form over the fundamental chains of two bundles
/// of the same formula, optionally also over their common refinement.
ComparisonReport compare_triangulations(const DifferentialForm& form, const TriangulationBundle& b1,
                                        const TriangulationBundle& b2, bool with_common = false,
                                        int degree = kDefaultQuadratureDegree, const OverlayOptions& overlay = {});

}  // namespace sacalc
