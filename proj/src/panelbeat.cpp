#include "sacalc/panelbeat.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "sacalc/errors.hpp"

namespace sacalc {

namespace {

// Cofactor normal of an m x (m-1) tangent matrix, oriented so det[T | n] > 0.
Vec cofactor_normal(const Mat& t) {
  const Eigen::Index m = t.rows();
  Vec n(m);
  Mat a(m, m);
  a.leftCols(m - 1) = t;
  for (Eigen::Index i = 0; i < m; ++i) {
    a.col(m - 1).setZero();
    a(i, m - 1) = 1.0;
    n[i] = a.determinant();
  }
  return n / n.norm();
}

std::vector<Vec> parameter_lattice(const Box& domain, int per_axis, bool include_ends) {
  const std::size_t d = domain.size();
  std::vector<Vec> out;
  if (d == 0) {
    out.emplace_back(0);
    return out;
  }
  std::vector<int> idx(d, 0);
  while (true) {
    Vec x(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      const double w = domain[i].hi - domain[i].lo;
      const double f = include_ends ? (per_axis == 1 ? 0.5 : static_cast<double>(idx[i]) / (per_axis - 1))
                                    : (idx[i] + 0.5) / per_axis;
      x[static_cast<Eigen::Index>(i)] = domain[i].lo + f * w;
    }
    out.push_back(std::move(x));
    std::size_t k = 0;
    while (k < d && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == d) break;
  }
  return out;
}

Vec clamp_to(const Box& domain, Vec x) {
  for (std::size_t i = 0; i < domain.size(); ++i) {
    auto& xi = x[static_cast<Eigen::Index>(i)];
    xi = std::clamp(xi, domain[i].lo, domain[i].hi);
  }
  return x;
}

}  // namespace

TubeChart::TubeChart(SmoothMap patch, Box domain, double radius)
    : patch_(std::move(patch)), domain_(std::move(domain)), radius_(radius) {
  const std::size_t d = patch_.domain_dim();
  const std::size_t m = patch_.codomain_dim();
  if (domain_.size() != d) throw DimensionMismatch("tube: parameter box dimension differs from the patch");
  if (d >= m) throw InvalidArgument("tube: the stratum must have positive codimension");
  if (!(radius_ > 0.0)) throw InvalidArgument("tube: radius must be positive");
  for (const auto& iv : domain_) {
    if (!(iv.lo <= iv.hi)) throw InvalidArgument("tube: empty parameter interval");
  }
  const int per_axis = d == 0 ? 1 : std::max(3, static_cast<int>(std::ceil(std::pow(4096.0, 1.0 / static_cast<double>(d)))));
  seeds_ = parameter_lattice(domain_, per_axis, true);
  for (const auto& s : seeds_) {
    if (d == 0) break;
    const Mat t = tangent(s);
    Eigen::JacobiSVD<Mat> svd(t);
    const auto& sv = svd.singularValues();
    if (!(sv[static_cast<Eigen::Index>(d) - 1] > 1e-10 * std::max(1.0, sv[0]))) {
      throw RankDeficient("tube: patch jacobian is rank deficient at a sampled parameter");
    }
  }
  if (m - d >= 2) {
    // Reference axes chosen greedily at the domain center.
    const Vec center = parameter_lattice(domain_, 1, true).front();
    Mat basis = d == 0 ? Mat(m, 0) : Mat(tangent(center).householderQr().householderQ() * Mat::Identity(m, d));
    for (std::size_t k = 0; k < m - d; ++k) {
      int best = -1;
      double best_norm = -1.0;
      for (std::size_t a = 0; a < m; ++a) {
        if (std::find(reference_axes_.begin(), reference_axes_.end(), static_cast<int>(a)) != reference_axes_.end()) continue;
        Vec e = Vec::Zero(static_cast<Eigen::Index>(m));
        e[static_cast<Eigen::Index>(a)] = 1.0;
        const Vec r = e - basis * (basis.transpose() * e);
        if (r.norm() > best_norm + 1e-12) {
          best_norm = r.norm();
          best = static_cast<int>(a);
        }
      }
      reference_axes_.push_back(best);
      Vec e = Vec::Zero(static_cast<Eigen::Index>(m));
      e[best] = 1.0;
      Vec r = e - basis * (basis.transpose() * e);
      basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
      basis.col(basis.cols() - 1) = r / r.norm();
    }
  }
}

Mat TubeChart::tangent(const Vec& x) const {
  if (stratum_dim() == 0) return Mat(static_cast<Eigen::Index>(ambient_dim()), 0);
  return patch_.jacobian(x).value;
}

Mat TubeChart::frame(const Vec& x) const {
  const auto m = static_cast<Eigen::Index>(ambient_dim());
  const auto d = static_cast<Eigen::Index>(stratum_dim());
  const Mat t = tangent(x);
  if (m - d == 1) return cofactor_normal(t);
  Mat q(m, d + (m - d));
  Eigen::Index filled = 0;
  auto absorb = [&](Vec v) {
    for (Eigen::Index j = 0; j < filled; ++j) v -= q.col(j).dot(v) * q.col(j);
    for (Eigen::Index j = 0; j < filled; ++j) v -= q.col(j).dot(v) * q.col(j);
    q.col(filled++) = v / v.norm();
  };
  for (Eigen::Index j = 0; j < d; ++j) absorb(t.col(j));
  for (int a : reference_axes_) {
    Vec e = Vec::Zero(m);
    e[a] = 1.0;
    absorb(e);
  }
  return q.rightCols(m - d);
}

Vec TubeChart::g(const Vec& x, const Vec& u) const {
  const Vec base = stratum_dim() == 0 ? patch_(Vec(0)) : patch_(x);
  return base + frame(x) * u;
}

Mat TubeChart::g_jacobian(const Vec& x, const Vec& u) const {
  const auto m = static_cast<Eigen::Index>(ambient_dim());
  const auto d = static_cast<Eigen::Index>(stratum_dim());
  Mat j(m, m);
  j.rightCols(m - d) = frame(x);
  if (d > 0) {
    Mat dx = tangent(x);
    for (Eigen::Index c = 0; c < d; ++c) {
      const double step = 1e-6 * (1.0 + std::abs(x[c]));
      Vec xp = x;
      Vec xm = x;
      xp[c] += step;
      xm[c] -= step;
      dx.col(c) += (frame(xp) * u - frame(xm) * u) / (2.0 * step);
    }
    j.leftCols(d) = dx;
  }
  return j;
}

TubeChart::Coordinates TubeChart::coordinates(const Vec& y) const {
  if (static_cast<std::size_t>(y.size()) != ambient_dim()) throw DimensionMismatch("tube: point dimension");
  Coordinates c;
  if (stratum_dim() == 0) {
    c.x = Vec(0);
    c.u = frame(c.x).transpose() * (y - patch_(c.x));
    c.inside = c.u.norm() < radius_;
    return c;
  }
  Vec x = seeds_.front();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : seeds_) {
    const double dist = (patch_(s) - y).squaredNorm();
    if (dist < best) {
      best = dist;
      x = s;
    }
  }
  bool converged = false;
  double moved = 0.0;
  for (int it = 0; it < 100; ++it) {
    const Vec r = y - patch_(x);
    const Mat t = tangent(x);
    const Vec dx = (t.transpose() * t).ldlt().solve(t.transpose() * r);
    const Vec next = clamp_to(domain_, x + dx);
    moved = (next - x).norm();
    x = next;
    if (moved <= 1e-14 * (1.0 + x.norm())) {
      converged = true;
      break;
    }
  }
  // Rounding-level cycling counts as converged.
  if (!converged && moved > 1e-12 * (1.0 + x.norm())) throw ProjectionFailure("tube: closest-point iteration did not converge");
  const Vec r = y - patch_(x);
  c.x = x;
  c.u = frame(x).transpose() * r;
  const double tangential = (tangent(x).transpose() * r).norm();
  c.inside = c.u.norm() < radius_ && tangential <= 1e-9 * (1.0 + y.norm());
  return c;
}

EtaProfile::EtaProfile(double exponent, double cutoff) : exponent_(exponent), cutoff_(cutoff) {
  if (!(exponent > 1.0) || !std::isfinite(exponent)) throw InvalidArgument("eta: exponent must exceed 1");
  if (!(cutoff > 0.0 && cutoff < 0.5)) throw InvalidArgument("eta: cutoff must lie in (0, 1/2)");
  if (!blend_is_monotone(exponent, cutoff)) throw InvalidArgument("eta: blend is not monotone");
  y0_ = std::pow(cutoff, exponent);
  m0_ = exponent * std::pow(cutoff, exponent - 1.0);
}

bool EtaProfile::blend_is_monotone(double exponent, double cutoff) {
  const double y0 = std::pow(cutoff, exponent);
  const double m0 = exponent * std::pow(cutoff, exponent - 1.0);
  const double delta = (0.5 - y0) / (0.5 - cutoff);
  if (!(delta > 0.0)) return false;
  const double a = m0 / delta;
  const double b = 1.0 / delta;
  return a * a + b * b <= 9.0;
}

double EtaProfile::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  if (t <= cutoff_) return std::pow(t, exponent_);
  if (t >= 0.5) return t;
  const double h = 0.5 - cutoff_;
  const double s = (t - cutoff_) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0_ + (s3 - 2 * s2 + s) * h * m0_ + (-2 * s3 + 3 * s2) * 0.5 + (s3 - s2) * h;
}

double EtaProfile::derivative(double t) const {
  if (t <= 0.0) return 0.0;
  if (t <= cutoff_) return exponent_ * std::pow(t, exponent_ - 1.0);
  if (t >= 0.5) return 1.0;
  const double h = 0.5 - cutoff_;
  const double s = (t - cutoff_) / h;
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * y0_ + (3 * s2 - 4 * s + 1) * h * m0_ + (-6 * s2 + 6 * s) * 0.5 + (3 * s2 - 2 * s) * h) / h;
}

double EtaProfile::inverse(double s) const {
  if (s <= 0.0) return 0.0;
  if (s >= 0.5) return s;
  if (s <= y0_) return std::pow(s, 1.0 / exponent_);
  double lo = cutoff_;
  double hi = 0.5;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    ((*this)(mid) < s ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> geometric_schedule(double first, double last, int per_decade) {
  if (!(first > last && last > 0.0) || per_decade < 1) throw InvalidArgument("schedule: need first > last > 0");
  const auto steps = static_cast<int>(std::lround(std::log10(first / last) * per_decade));
  std::vector<double> out;
  for (int i = 0; i < steps; ++i) out.push_back(first * std::pow(10.0, -static_cast<double>(i) / per_decade));
  out.push_back(last);
  return out;
}

std::vector<double> default_offsets() { return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}; }

namespace {

std::vector<Vec> unit_directions(std::size_t codim) {
  std::vector<Vec> dirs;
  if (codim == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    dirs.push_back(Vec::Constant(1, -1.0));
  } else if (codim == 2) {
    for (int k = 0; k < 32; ++k) {
      const double a = 2.0 * std::numbers::pi * k / 32.0;
      Vec v(2);
      v << std::cos(a), std::sin(a);
      dirs.push_back(v);
    }
  } else {
    std::mt19937_64 rng(0);
    std::normal_distribution<double> normal;
    for (int k = 0; k < 64; ++k) {
      Vec v(static_cast<Eigen::Index>(codim));
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
      dirs.push_back(v / v.norm());
    }
  }
  return dirs;
}

struct Fit {
  double slope = 0.0;
  double se = 0.0;
  double rms = 0.0;
};

Fit loglog_fit(const std::vector<double>& t, const std::vector<double>& g, std::size_t begin) {
  const std::size_t n = t.size() - begin;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = begin; i < t.size(); ++i) {
    mx += std::log(t[i]);
    my += std::log(g[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = begin; i < t.size(); ++i) {
    const double dx = std::log(t[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(g[i]) - my);
  }
  Fit f;
  f.slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = begin; i < t.size(); ++i) {
    const double r = std::log(g[i]) - (my + f.slope * (std::log(t[i]) - mx));
    ssr += r * r;
  }
  f.rms = std::sqrt(ssr / static_cast<double>(n));
  f.se = n > 2 ? std::sqrt(ssr / static_cast<double>(n - 2) / sxx) : 0.0;
  return f;
}

}  // namespace

GrowthEstimate estimate_growth_exponent(const SmoothMap& f, const TubeChart& tube, const std::vector<double>& schedule) {
  if (schedule.size() < 3) throw InvalidArgument("growth: schedule needs at least three offsets");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0) || (i > 0 && !(schedule[i] < schedule[i - 1]))) {
      throw InvalidArgument("growth: schedule must be positive and strictly decreasing");
    }
  }
  if (f.domain_dim() != tube.ambient_dim()) throw DimensionMismatch("growth: map and tube dimensions differ");
  const std::size_t d = tube.stratum_dim();
  const int per_axis = d == 0 ? 1 : std::max(2, static_cast<int>(std::ceil(std::pow(32.0, 1.0 / static_cast<double>(d)) - 1e-9)));
  const auto bases = parameter_lattice(tube.domain(), per_axis, false);
  const auto dirs = unit_directions(tube.codim());

  GrowthEstimate est;
  est.t = schedule;
  for (double t : schedule) {
    double sup = 0.0;
    bool any = false;
    for (const auto& x : bases) {
      const Vec zero = Vec::Zero(static_cast<Eigen::Index>(tube.codim()));
      const Vec y0 = tube.g(x, zero);
      if (!f.contains(y0)) continue;
      const Vec f0 = f(y0);
      for (const auto& u : dirs) {
        const Vec y = tube.g(x, t * u);
        if (!f.contains(y)) continue;
        any = true;
        sup = std::max(sup, (f(y) - f0).norm());
      }
    }
    if (!any) throw InvalidArgument("growth: the map is undefined at every sample of the tube");
    est.g.push_back(sup);
  }
  if (std::all_of(est.g.begin(), est.g.end(), [](double v) { return v < 1e-14; })) {
    est.flat = true;
    est.alpha = std::numeric_limits<double>::infinity();
    est.alpha_lower = est.alpha;
    est.window_begin = schedule.size();
    return est;
  }
  const std::size_t n = schedule.size();
  std::size_t window = n - 3;
  for (std::size_t i = 0; i + 3 <= n; ++i) {
    if (schedule[i] <= 10.0 * schedule.back() * (1.0 + 1e-12)) {
      window = i;
      break;
    }
  }
  std::size_t tail = n - 1;
  if (est.g[tail] < 1e-14) {
    est.non_monotone = true;
  } else {
    while (tail > 0 && est.g[tail - 1] > est.g[tail]) --tail;
  }
  if (tail > window) {
    est.non_monotone = true;
    window = tail;
  }
  if (n - window < 2 || est.g[n - 1] < 1e-14) {
    throw InvalidArgument("growth: no decreasing tail to fit");
  }
  const Fit fit = loglog_fit(est.t, est.g, window);
  est.window_begin = window;
  est.alpha = fit.slope;
  est.standard_error = fit.se;
  est.half_width = 2.0 * fit.se;
  est.alpha_lower = est.alpha - est.half_width;
  est.residual = fit.rms;
  return est;
}

EtaProfile select_eta(const GrowthEstimate& estimate, double margin, double cutoff) {
  if (!(margin > 0.0)) throw InvalidArgument("select_eta: margin must be positive");
  double base = 1.0;
  if (!estimate.flat) {
    if (!(estimate.alpha > 0.0)) throw InvalidArgument("select_eta: growth exponent must be positive");
    if (!(estimate.alpha_lower > 0.0)) throw InvalidArgument("select_eta: growth exponent lower bound is not positive");
    base = std::max(1.0 / estimate.alpha_lower, 1.0);
  }
  const double r = base + margin;
  while (!EtaProfile::blend_is_monotone(r, cutoff)) {
    cutoff *= 0.5;
    if (cutoff < 1e-6) throw InvalidArgument("select_eta: no monotone blend for this exponent");
  }
  EtaProfile eta(r, cutoff);
  double prev = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double v = eta(i / 100.0);
    if (!(v > prev)) throw InvalidArgument("select_eta: profile is not increasing");
    prev = v;
  }
  return eta;
}

namespace {

// Scaled radial profile s(t) = R η(t / R) and its derivative.
double radial(const TubeChart& tube, const EtaProfile& eta, double t) { return tube.radius() * eta(t / tube.radius()); }

}  // namespace

Vec apply_chi(const TubeChart& tube, const EtaProfile& eta, const Vec& y) {
  const auto c = tube.coordinates(y);
  if (!c.inside) return y;
  const double t = c.u.norm();
  if (t == 0.0 || t / tube.radius() >= 0.5) return y;
  return tube.g(c.x, c.u * (radial(tube, eta, t) / t));
}

Vec apply_chi_inverse(const TubeChart& tube, const EtaProfile& eta, const Vec& y) {
  const auto c = tube.coordinates(y);
  if (!c.inside) return y;
  const double t = c.u.norm();
  if (t == 0.0 || t / tube.radius() >= 0.5) return y;
  const double s = tube.radius() * eta.inverse(t / tube.radius());
  return tube.g(c.x, c.u * (s / t));
}

Mat chi_jacobian(const TubeChart& tube, const EtaProfile& eta, const Vec& y) {
  const auto m = static_cast<Eigen::Index>(tube.ambient_dim());
  const auto d = static_cast<Eigen::Index>(tube.stratum_dim());
  const auto c = tube.coordinates(y);
  const double t = c.u.norm();
  if (!c.inside || t / tube.radius() >= 0.5) return Mat::Identity(m, m);
  Mat block = Mat::Identity(m, m);
  Vec scaled_u = c.u;
  if (t == 0.0) {
    block.bottomRightCorner(m - d, m - d).setZero();
  } else {
    const Vec dir = c.u / t;
    const double s = radial(tube, eta, t);
    const double ds = eta.derivative(t / tube.radius());
    const Mat outer = dir * dir.transpose();
    block.bottomRightCorner(m - d, m - d) = (s / t) * (Mat::Identity(m - d, m - d) - outer) + ds * outer;
    scaled_u = c.u * (s / t);
  }
  const Mat jin = tube.g_jacobian(c.x, c.u);
  return tube.g_jacobian(c.x, scaled_u) * block * jin.inverse();
}

SmoothMap panel_beat(const SmoothMap& f, const TubeChart& tube, const EtaProfile& eta) {
  if (f.domain_dim() != tube.ambient_dim()) throw DimensionMismatch("panel_beat: map and tube dimensions differ");
  auto fp = std::make_shared<const SmoothMap>(f);
  auto tp = std::make_shared<const TubeChart>(tube);
  auto ep = std::make_shared<const EtaProfile>(eta);
  auto evaluate = [fp, tp, ep](const Vec& y) { return (*fp)(apply_chi(*tp, *ep, y)); };
  auto jacobian = [fp, tp, ep](const Vec& y) -> std::optional<Mat> {
    const auto c = tp->coordinates(y);
    const auto m = static_cast<Eigen::Index>(tp->ambient_dim());
    const auto d = static_cast<Eigen::Index>(tp->stratum_dim());
    if (c.inside && c.u.norm() == 0.0) {
      // On the stratum: normal derivatives vanish, tangential ones are f's.
      Mat along = Mat::Zero(static_cast<Eigen::Index>(fp->codomain_dim()), m);
      if (d > 0) along.leftCols(d) = fp->jacobian(y).value * tp->tangent(c.x);
      Mat basis(m, m);
      basis.leftCols(d) = tp->tangent(c.x);
      basis.rightCols(m - d) = tp->frame(c.x);
      return Mat(along * basis.inverse());
    }
    const Vec moved = apply_chi(*tp, *ep, y);
    if (!fp->contains(moved)) return std::nullopt;
    const JacobianSample jf = fp->jacobian(moved);
    if (jf.finite_difference) return std::nullopt;
    return Mat(jf.value * chi_jacobian(*tp, *ep, y));
  };
  auto domain = [fp](const Vec& y) { return fp->contains(y); };
  return SmoothMap(f.domain_dim(), f.codomain_dim(), evaluate, jacobian, domain);
}

std::vector<Probe> probes_from_tube(const TubeChart& tube, const SmoothMap& f, int per_axis) {
  std::vector<Probe> probes;
  const Vec zero = Vec::Zero(static_cast<Eigen::Index>(tube.codim()));
  for (const auto& x : parameter_lattice(tube.domain(), per_axis, false)) {
    Probe p;
    p.base = tube.g(x, zero);
    if (!f.contains(p.base)) continue;
    const Mat n = tube.frame(x);
    bool both = true;
    for (Eigen::Index k = 0; k < n.cols(); ++k) {
      bool kept_any = false;
      for (double sign : {1.0, -1.0}) {
        const Vec dir = sign * n.col(k);
        if (f.contains(p.base + 1e-1 * dir) && f.contains(p.base + 1e-6 * dir)) {
          p.radial.push_back(dir);
          kept_any = true;
        } else {
          both = false;
        }
      }
      if (!kept_any) both = false;
    }
    p.two_sided = both;
    const Mat t = tube.tangent(x);
    for (Eigen::Index j = 0; j < t.cols(); ++j) p.tangential.push_back(t.col(j) / t.col(j).norm());
    probes.push_back(std::move(p));
  }
  return probes;
}

std::string to_string(MonitorKind kind) {
  switch (kind) {
    case MonitorKind::Radial:
      return "radial";
    case MonitorKind::Tangential:
      return "tangential";
    case MonitorKind::Jump:
      return "jump";
  }
  return "?";
}

namespace {

struct Extrapolation {
  double limit;
  bool extrapolated;
};

// Aitken delta-squared over the last three entries; the raw last value when
// the sequence is not contracting.
Extrapolation aitken(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 3) return {n == 0 ? 0.0 : v.back(), false};
  const double a = v[n - 3];
  const double b = v[n - 2];
  const double c = v[n - 1];
  const double d1 = b - a;
  const double d2 = c - b;
  if (d2 == 0.0 || d1 == 0.0) return {c, false};
  const double ratio = d2 / d1;
  if (!(ratio >= 0.0 && ratio < 1.0)) return {c, false};
  return {c + d2 * ratio / (1.0 - ratio), true};
}

double tail_rate(const std::vector<double>& offsets, const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 3) return 0.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = n - 3; i < n; ++i) {
    if (!(v[i] > 0.0)) return 0.0;
    const double x = std::log(offsets[i]);
    const double y = std::log(v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
}

bool tail_non_increasing(const std::vector<double>& v) {
  const std::size_t n = v.size();
  for (std::size_t i = n >= 3 ? n - 2 : 1; i < n; ++i) {
    if (v[i] > v[i - 1] * (1.0 + 1e-9) + 1e-13) return false;
  }
  return true;
}

MonitorSeries make_series(MonitorKind kind, int probe, int direction) {
  MonitorSeries s;
  s.kind = kind;
  s.probe = probe;
  s.direction = direction;
  return s;
}

}  // namespace

void evaluate_series(MonitorSeries& s, const std::vector<double>& offsets, double tol) {
  const auto e = aitken(s.values);
  s.limit = std::max(0.0, e.limit);
  s.extrapolated = e.extrapolated;
  s.rate = tail_rate(offsets, s.values);
  s.decreasing = tail_non_increasing(s.values);
  s.pass = std::isfinite(s.limit) && s.limit < tol && s.decreasing &&
           std::all_of(s.values.begin(), s.values.end(), [](double v) { return std::isfinite(v); });
}

C1Report certify_c1(const SmoothMap& f, const std::vector<Probe>& probes, const std::vector<double>& offsets,
                    double tolerance) {
  if (offsets.empty()) throw InvalidArgument("certify: empty offset schedule");
  for (std::size_t i = 1; i < offsets.size(); ++i) {
    if (!(offsets[i] < offsets[i - 1])) throw InvalidArgument("certify: offsets must decrease");
  }
  C1Report report;
  report.offsets = offsets;
  report.tolerance = tolerance;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto jac = [&](const Vec& y, double h) -> std::optional<Mat> {
    try {
      auto s = f.jacobian(y, std::min(SmoothMap::kDefaultFdStep, 1e-2 * h));
      report.finite_difference_used = report.finite_difference_used || s.finite_difference;
      return s.value;
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  for (std::size_t pi = 0; pi < probes.size(); ++pi) {
    const Probe& p = probes[pi];
    const Vec fb = f(p.base);
    const std::optional<Mat> j0 = jac(p.base, offsets.back());
    // Closed-form derivative at the base, when there is one.
    std::optional<Mat> exact0;
    try {
      const auto s = f.jacobian(p.base);
      if (!s.finite_difference) exact0 = s.value;
    } catch (const Error&) {
      exact0.reset();
    }
    for (std::size_t k = 0; k < p.radial.size(); ++k) {
      const Vec& n = p.radial[k];
      MonitorSeries rad = make_series(MonitorKind::Radial, static_cast<int>(pi), static_cast<int>(k));
      std::vector<Vec> slopes;
      std::vector<Vec> quotients;
      std::vector<std::optional<Mat>> jh;
      for (double h : offsets) {
        const Vec y = p.base + h * n;
        jh.push_back(jac(y, h));
        quotients.push_back((f(y) - fb) / h);
        rad.quotients.push_back(quotients.back().norm());
        if (jh.back()) {
          slopes.push_back(*jh.back() * n);
          rad.linear_bound_ratio.push_back(slopes.back().norm() / (2.0 * h));
        } else {
          slopes.push_back(Vec::Constant(fb.size(), nan));
          rad.linear_bound_ratio.push_back(nan);
        }
      }
      // Limit of the one-sided quotient: the closed-form base derivative when
      // every quotient agrees with it to rounding, else Aitken per component.
      Vec limit(fb.size());
      bool consistent = exact0.has_value();
      if (consistent) {
        const Vec d0 = *exact0 * n;
        for (std::size_t i = 0; i < offsets.size() && consistent; ++i) {
          const double scale = fb.cwiseAbs().maxCoeff() + f(p.base + offsets[i] * n).cwiseAbs().maxCoeff();
          const double floor = 64.0 * std::numeric_limits<double>::epsilon() * scale / offsets[i];
          consistent = (quotients[i] - d0).cwiseAbs().maxCoeff() <= floor;
        }
        if (consistent) limit = d0;
      }
      for (Eigen::Index c = 0; c < fb.size() && !consistent; ++c) {
        std::vector<double> comp;
        for (const auto& q : quotients) comp.push_back(q[c]);
        limit[c] = aitken(comp).limit;
      }
      for (const auto& s : slopes) rad.values.push_back((s - limit).norm());
      evaluate_series(rad, offsets, tolerance);
      report.series.push_back(std::move(rad));

      for (std::size_t j = 0; j < p.tangential.size(); ++j) {
        MonitorSeries tan = make_series(MonitorKind::Tangential, static_cast<int>(pi), static_cast<int>(j));
        for (const auto& m : jh) {
          tan.values.push_back(m && j0 ? (*m * p.tangential[j] - *j0 * p.tangential[j]).norm() : nan);
        }
        evaluate_series(tan, offsets, tolerance);
        if (!tan.pass) {
          const bool seen = std::any_of(report.bad_set.begin(), report.bad_set.end(),
                                        [&](const Vec& b) { return (b - p.base).norm() == 0.0; });
          if (!seen) report.bad_set.push_back(p.base);
        }
        report.series.push_back(std::move(tan));
      }

      if (p.two_sided) {
        const bool mirrored_earlier = std::any_of(p.radial.begin(), p.radial.begin() + static_cast<long>(k),
                                                  [&](const Vec& o) { return (o + n).norm() == 0.0; });
        const bool has_mirror = std::any_of(p.radial.begin(), p.radial.end(), [&](const Vec& o) { return (o + n).norm() == 0.0; });
        if (has_mirror && !mirrored_earlier) {
          MonitorSeries jump = make_series(MonitorKind::Jump, static_cast<int>(pi), static_cast<int>(k));
          for (std::size_t i = 0; i < offsets.size(); ++i) {
            const auto back = jac(p.base - offsets[i] * n, offsets[i]);
            jump.values.push_back(jh[i] && back ? (*jh[i] - *back).norm() : nan);
          }
          evaluate_series(jump, offsets, tolerance);
          report.series.push_back(std::move(jump));
        }
      }
    }
  }
  report.pass = std::all_of(report.series.begin(), report.series.end(), [](const MonitorSeries& s) { return s.pass; });
  return report;
}

MultiBeat panel_beat_multi(const std::vector<SmoothMap>& maps, const TubeChart& tube,
                           const std::vector<double>& schedule, double margin, double tolerance) {
  if (maps.empty()) throw InvalidArgument("panel_beat_multi: no maps");
  std::size_t total = 0;
  for (const auto& m : maps) {
    if (m.domain_dim() != tube.ambient_dim()) throw DimensionMismatch("panel_beat_multi: map dimension");
    total += m.codomain_dim();
  }
  auto shared = std::make_shared<const std::vector<SmoothMap>>(maps);
  SmoothMap product(
      tube.ambient_dim(), total,
      [shared, total](const Vec& y) {
        Vec out(static_cast<Eigen::Index>(total));
        Eigen::Index at = 0;
        for (const auto& m : *shared) {
          const Vec v = m(y);
          out.segment(at, v.size()) = v;
          at += v.size();
        }
        return out;
      },
      {},
      [shared](const Vec& y) {
        return std::all_of(shared->begin(), shared->end(), [&](const SmoothMap& m) { return m.contains(y); });
      });
  GrowthEstimate est = estimate_growth_exponent(product, tube, schedule);
  EtaProfile eta = select_eta(est, margin);
  MultiBeat out{std::move(est), eta, {}, {}};
  for (const auto& m : maps) {
    SmoothMap beaten = panel_beat(m, tube, eta);
    out.reports.push_back(certify_c1(beaten, probes_from_tube(tube, beaten), default_offsets(), tolerance));
    out.beaten.push_back(std::move(beaten));
  }
  return out;
}

BeatResult beat_until_certified(const SmoothMap& f, const TubeChart& tube, const std::vector<double>& schedule,
                                double margin, double tolerance, int max_iterations) {
  if (max_iterations < 1) throw InvalidArgument("beat: need at least one iteration");
  BeatResult result{estimate_growth_exponent(f, tube, schedule), std::nullopt, f, {}, 0};
  const auto probes = probes_from_tube(tube, f);
  for (int it = 1; it <= max_iterations; ++it) {
    result.iterations = it;
    EtaProfile eta = select_eta(result.estimate, margin);
    result.beaten = panel_beat(f, tube, eta);
    result.eta = eta;
    result.report = certify_c1(result.beaten, probes, default_offsets(), tolerance);
    if (result.report.pass) break;
    margin *= 2.0;
  }
  return result;
}

}  // namespace sacalc
