#include "sacalc/integrate.hpp"

#include <algorithm>
#include <cmath>

#include "sacalc/errors.hpp"

namespace sacalc {

namespace {

// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double top_component(const DifferentialForm& form, const SmoothMap& chart, const Vec& t, bool& fd) {
  const Covector at_image = form.at(chart(t));
  if (form.degree() == 0) {
    fd = false;
    return at_image.coeffs[0];
  }
  const JacobianSample j = chart.jacobian(t);
  fd = j.finite_difference;
  return pull_covector(at_image, j.value).coeffs[0];
}

}  // namespace

double integrate_simplex(const DifferentialForm& form, const SmoothMap& chart, const QuadratureRule& rule,
                         std::size_t* fd_nodes) {
  const std::size_t p = chart.domain_dim();
  if (form.degree() != p) throw DimensionMismatch("integrate: form degree differs from simplex dimension");
  if (rule.dim != p) throw DimensionMismatch("integrate: rule dimension differs from simplex dimension");
  if (chart.codomain_dim() != form.ambient()) throw DimensionMismatch("integrate: chart and form ambient differ");
  const Vec centroid = Vec::Constant(static_cast<Eigen::Index>(p), 1.0 / static_cast<double>(p + 1));
  CompensatedSum sum;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const auto pt = rule.point(i);
    Vec t = Eigen::Map<const Vec>(pt.data(), static_cast<Eigen::Index>(p));
    bool fd = false;
    double v = top_component(form, chart, t, fd);
    if (fd) {
      const Vec toward = centroid - t;
      if (toward.norm() > 0.0) {
        t += kFdNodeShift * toward / toward.norm();
        v = top_component(form, chart, t, fd);
      }
      if (fd_nodes != nullptr) ++*fd_nodes;
    }
    sum.add(rule.weights[i] * v);
  }
  return sum.value();
}

namespace {

IntegralReport integrate_with(const DifferentialForm& form, const TriangulationBundle& bundle, const Chain& chain,
                              const QuadratureRule& rule) {
  IntegralReport report;
  report.degree = rule.degree;
  CompensatedSum total;
  for (const auto& [id, coeff] : chain.coeffs) {
    const SmoothMap chart = bundle.face_chart(chain.dim, id);
    const double v = static_cast<double>(coeff) * integrate_simplex(form, chart, rule, &report.fd_nodes);
    report.contributions[id] = v;
    total.add(v);
  }
  report.value = total.value();
  return report;
}

}  // namespace

IntegralReport integrate_chain(const DifferentialForm& form, const TriangulationBundle& bundle, const Chain& chain,
                               int degree) {
  if (chain.dim < 0 || chain.dim > bundle.top_dim()) throw DimensionMismatch("integrate: chain dimension out of range");
  if (form.degree() != static_cast<std::size_t>(chain.dim)) {
    throw DimensionMismatch("integrate: form degree " + std::to_string(form.degree()) + " on a " +
                            std::to_string(chain.dim) + "-chain");
  }
  if (form.ambient() != bundle.complex.ambient_dim()) throw DimensionMismatch("integrate: form and set ambient differ");
  const auto p = static_cast<std::size_t>(chain.dim);
  const QuadratureRule rule = make_rule(p, degree);
  IntegralReport report = integrate_with(form, bundle, chain, rule);
  const QuadratureRule finer = make_rule(p, rule.degree + 1);
  report.error_estimate = std::abs(integrate_with(form, bundle, chain, finer).value - report.value);
  return report;
}

StokesReport stokes_residual(const DifferentialForm& form, const TriangulationBundle& bundle, const Chain& chain,
                             int degree) {
  if (chain.dim < 1) throw DimensionMismatch("stokes: chain dimension must be at least 1");
  if (form.degree() + 1 != static_cast<std::size_t>(chain.dim)) {
    throw DimensionMismatch("stokes: form degree must be one less than the chain dimension");
  }
  StokesReport r;
  r.interior = integrate_chain(exterior_derivative(form), bundle, chain, degree);
  r.boundary = integrate_chain(form, bundle, boundary_chain(bundle.complex, chain), degree);
  r.residual = std::abs(r.interior.value - r.boundary.value);
  return r;
}

ComparisonReport compare_triangulations(const DifferentialForm& form, const TriangulationBundle& b1,
                                        const TriangulationBundle& b2, bool with_common, int degree,
                                        const OverlayOptions& overlay) {
  ComparisonReport r;
  r.first = integrate_chain(form, b1, orient_fundamental(b1.complex, b1.top_dim()), degree);
  r.second = integrate_chain(form, b2, orient_fundamental(b2.complex, b2.top_dim()), degree);
  r.delta = std::abs(r.first.value - r.second.value);
  double lo = std::min(r.first.value, r.second.value);
  double hi = std::max(r.first.value, r.second.value);
  if (with_common) {
    const CommonRefinement cr = common_refinement(b1, b2, overlay);
    r.common = integrate_chain(form, cr.bundle, orient_fundamental(cr.bundle.complex, cr.bundle.top_dim()), degree);
    lo = std::min(lo, r.common->value);
    hi = std::max(hi, r.common->value);
  }
  r.spread = hi - lo;
  return r;
}

}  // namespace sacalc
