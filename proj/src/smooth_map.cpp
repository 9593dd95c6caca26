#include "sacalc/smooth_map.hpp"

#include <memory>

#include "sacalc/errors.hpp"

namespace sacalc {

SmoothMap::SmoothMap(std::size_t domain_dim, std::size_t codomain_dim, Evaluator eval,
                     JacobianFn jacobian, DomainFn domain)
    : domain_dim_(domain_dim),
      codomain_dim_(codomain_dim),
      eval_(std::move(eval)),
      jacobian_(std::move(jacobian)),
      domain_(std::move(domain)) {}

SmoothMap SmoothMap::identity(std::size_t n) {
  return affine(Vec::Zero(static_cast<Eigen::Index>(n)),
                Mat::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
}

SmoothMap SmoothMap::affine(Vec offset, Mat linear) {
  if (offset.size() != linear.rows()) throw DimensionMismatch("affine: offset/linear mismatch");
  const auto dom = static_cast<std::size_t>(linear.cols());
  const auto cod = static_cast<std::size_t>(linear.rows());
  auto b = std::make_shared<const Vec>(std::move(offset));
  auto a = std::make_shared<const Mat>(std::move(linear));
  return SmoothMap(
      dom, cod, [a, b](const Vec& x) -> Vec { return *b + *a * x; },
      [a](const Vec&) -> std::optional<Mat> { return *a; });
}

SmoothMap SmoothMap::polynomial(std::vector<Polynomial> components) {
  if (components.empty()) throw InvalidArgument("polynomial map needs components");
  const std::size_t dom = components.front().num_vars();
  for (const auto& c : components) {
    if (c.num_vars() != dom) throw DimensionMismatch("polynomial map components disagree");
  }
  auto comps = std::make_shared<const std::vector<Polynomial>>(std::move(components));
  auto jac = std::make_shared<std::vector<std::vector<Polynomial>>>();
  for (const auto& c : *comps) {
    std::vector<Polynomial> row;
    for (std::size_t j = 0; j < dom; ++j) row.push_back(c.derivative(j));
    jac->push_back(std::move(row));
  }
  const std::size_t cod = comps->size();
  return SmoothMap(
      dom, cod,
      [comps](const Vec& x) -> Vec {
        Vec y(static_cast<Eigen::Index>(comps->size()));
        std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
        for (std::size_t i = 0; i < comps->size(); ++i) {
          y[static_cast<Eigen::Index>(i)] = (*comps)[i].eval(xs);
        }
        return y;
      },
      [jac, dom](const Vec& x) -> std::optional<Mat> {
        Mat j(static_cast<Eigen::Index>(jac->size()), static_cast<Eigen::Index>(dom));
        std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
        for (std::size_t r = 0; r < jac->size(); ++r) {
          for (std::size_t c = 0; c < dom; ++c) {
            j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = (*jac)[r][c].eval(xs);
          }
        }
        return j;
      });
}

Vec SmoothMap::operator()(const Vec& x) const {
  if (static_cast<std::size_t>(x.size()) != domain_dim_) {
    throw DimensionMismatch("map expects a point of dimension " + std::to_string(domain_dim_));
  }
  return eval_(x);
}

bool SmoothMap::contains(const Vec& x) const { return !domain_ || domain_(x); }

Mat SmoothMap::numeric_jacobian(const Vec& x, double step) const {
  const auto n = static_cast<Eigen::Index>(domain_dim_);
  Mat j(static_cast<Eigen::Index>(codomain_dim_), n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Vec fwd = x;
    Vec bwd = x;
    fwd[c] += step;
    bwd[c] -= step;
    const bool has_fwd = contains(fwd);
    const bool has_bwd = contains(bwd);
    if (has_fwd && has_bwd) {
      j.col(c) = ((*this)(fwd) - (*this)(bwd)) / (2.0 * step);
    } else if (has_fwd && contains(x)) {
      j.col(c) = ((*this)(fwd) - (*this)(x)) / step;
    } else if (has_bwd && contains(x)) {
      j.col(c) = ((*this)(x) - (*this)(bwd)) / step;
    } else {
      throw JacobianUnavailable("no finite-difference stencil inside the domain");
    }
  }
  return j;
}

JacobianSample SmoothMap::jacobian(const Vec& x, std::optional<double> fd_step) const {
  if (static_cast<std::size_t>(x.size()) != domain_dim_) {
    throw DimensionMismatch("jacobian expects a point of dimension " + std::to_string(domain_dim_));
  }
  if (jacobian_) {
    if (auto j = jacobian_(x); j && j->allFinite()) return {std::move(*j), false};
  }
  if (!allow_fd_) throw JacobianUnavailable("closed-form jacobian unavailable and fallback disabled");
  Mat j = numeric_jacobian(x, fd_step.value_or(kDefaultFdStep * fd_scale_));
  if (!j.allFinite()) throw JacobianUnavailable("finite-difference jacobian is not finite");
  return {std::move(j), true};
}

SmoothMap SmoothMap::compose(const SmoothMap& inner) const {
  if (inner.codomain_dim_ != domain_dim_) throw DimensionMismatch("compose: dimension mismatch");
  auto outer = std::make_shared<const SmoothMap>(*this);
  auto in = std::make_shared<const SmoothMap>(inner);
  JacobianFn jac;
  if (jacobian_ || inner.jacobian_) {
    jac = [outer, in](const Vec& x) -> std::optional<Mat> {
      // Only offer a closed form when both factors have one at this point.
      if (!outer->jacobian_ || !in->jacobian_) return std::nullopt;
      auto ji = in->jacobian_(x);
      if (!ji) return std::nullopt;
      auto jo = outer->jacobian_((*in)(x));
      if (!jo) return std::nullopt;
      return Mat(*jo * *ji);
    };
  }
  DomainFn dom;
  if (domain_ || inner.domain_) {
    dom = [outer, in](const Vec& x) { return in->contains(x) && outer->contains((*in)(x)); };
  }
  SmoothMap out(
      inner.domain_dim_, codomain_dim_, [outer, in](const Vec& x) { return (*outer)((*in)(x)); },
      std::move(jac), std::move(dom));
  out.fd_scale_ = inner.fd_scale_;
  out.allow_fd_ = allow_fd_ && inner.allow_fd_;
  return out;
}

SmoothMap SmoothMap::with_fd_scale(double scale) const {
  SmoothMap out = *this;
  out.fd_scale_ = scale;
  return out;
}

SmoothMap SmoothMap::without_fd_fallback() const {
  SmoothMap out = *this;
  out.allow_fd_ = false;
  return out;
}

}  // namespace sacalc
