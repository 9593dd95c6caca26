#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "sacalc/polynomial.hpp"

namespace sacalc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct JacobianSample {
  Mat value;
  // True when the matrix came from finite differences rather than a closed form.
  bool finite_difference = false;
};

/// A map R^domain -> R^codomain with an optional closed-form Jacobian.
///
/// The closed form may decline a point by returning nullopt (or a non-finite
/// matrix); the map then falls back to central differences with step
/// `fd_step * fd_scale`, one-sided where the stencil leaves the domain, and
/// the returned sample is flagged. A map built with `allow_fd = false` throws
/// JacobianUnavailable instead.
class SmoothMap {
 public:
  using Evaluator = std::function<Vec(const Vec&)>;
  using JacobianFn = std::function<std::optional<Mat>(const Vec&)>;
  using DomainFn = std::function<bool(const Vec&)>;

  static constexpr double kDefaultFdStep = 1e-6;

  SmoothMap() = default;
  SmoothMap(std::size_t domain_dim, std::size_t codomain_dim, Evaluator eval,
            JacobianFn jacobian = {}, DomainFn domain = {});

  static SmoothMap identity(std::size_t n);
  static SmoothMap affine(Vec offset, Mat linear);
  /// Components are polynomials in `domain_dim` variables; Jacobian is exact.
  static SmoothMap polynomial(std::vector<Polynomial> components);

  std::size_t domain_dim() const { return domain_dim_; }
  std::size_t codomain_dim() const { return codomain_dim_; }
  bool has_closed_form_jacobian() const { return static_cast<bool>(jacobian_); }
  bool allows_fd() const { return allow_fd_; }

  Vec operator()(const Vec& x) const;
  bool contains(const Vec& x) const;
  JacobianSample jacobian(const Vec& x, std::optional<double> fd_step = std::nullopt) const;
  /// Central-difference Jacobian regardless of any closed form.
  Mat numeric_jacobian(const Vec& x, double step) const;

  /// this ∘ inner, Jacobian by the chain rule.
  SmoothMap compose(const SmoothMap& inner) const;

  SmoothMap with_fd_scale(double scale) const;
  SmoothMap without_fd_fallback() const;

 private:
  std::size_t domain_dim_ = 0;
  std::size_t codomain_dim_ = 0;
  Evaluator eval_;
  JacobianFn jacobian_;
  DomainFn domain_;
  double fd_scale_ = 1.0;
  bool allow_fd_ = true;
};

}  // namespace sacalc
