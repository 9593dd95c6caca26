#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sacalc/saset.hpp"
#include "sacalc/smooth_map.hpp"

namespace sacalc {

/// Normal tube around a stratum patch V = patch(domain) in R^m.
///
/// g(x, u) = patch(x) + Σ u_k n_k(x) with an orthonormal normal frame n_k
/// built at construction from a fixed choice of reference vectors, so the
/// frame depends smoothly on x. π(y) is the closest-point parameter found by
/// Gauss–Newton from the best point of a coarse parameter lattice; ρ(y) = |u|.
class TubeChart {
 public:
  /// Throws RankDeficient when the patch Jacobian loses rank at a sampled
  /// parameter, InvalidArgument for a non-positive radius.
  TubeChart(SmoothMap patch, Box domain, double radius);

  std::size_t stratum_dim() const { return patch_.domain_dim(); }
  std::size_t ambient_dim() const { return patch_.codomain_dim(); }
  std::size_t codim() const { return ambient_dim() - stratum_dim(); }
  double radius() const { return radius_; }
  const SmoothMap& patch() const { return patch_; }
  const Box& domain() const { return domain_; }

  /// m x codim matrix whose columns are the orthonormal normals at x.
  Mat frame(const Vec& x) const;
  /// m x stratum_dim tangent matrix (patch Jacobian) at x.
  Mat tangent(const Vec& x) const;
  Vec g(const Vec& x, const Vec& u) const;
  /// Jacobian of g with respect to (x, u); square of size m.
  Mat g_jacobian(const Vec& x, const Vec& u) const;

  struct Coordinates {
    Vec x;
    Vec u;
    /// False when the closest point sits on the edge of the parameter domain
    /// with a tangential residual, or |u| >= radius.
    bool inside = false;
  };
  /// Throws ProjectionFailure when Gauss–Newton does not converge.
  Coordinates coordinates(const Vec& y) const;
  Vec project(const Vec& y) const { return coordinates(y).x; }
  double rho(const Vec& y) const { return coordinates(y).u.norm(); }

 private:
  SmoothMap patch_;
  Box domain_;
  double radius_;
  std::vector<int> reference_axes_;  // standard vectors seeding Gram–Schmidt
  std::vector<Vec> seeds_;           // coarse lattice for the projection start
};

/// Radial flattening profile on normalized radius t = |u| / radius:
/// t^r on (0, cutoff], a monotone cubic Hermite blend on [cutoff, 1/2]
/// matching value and slope at both ends, and the identity for t >= 1/2.
class EtaProfile {
 public:
  /// Requires r > 1 and cutoff in (0, 1/2). Throws InvalidArgument when the
  /// blend would not be monotone.
  explicit EtaProfile(double exponent, double cutoff = 0.25);

  double exponent() const { return exponent_; }
  double cutoff() const { return cutoff_; }
  double operator()(double t) const;
  double derivative(double t) const;
  /// Inverse by bisection to 1e-12 (η is strictly increasing).
  double inverse(double s) const;

  static bool blend_is_monotone(double exponent, double cutoff);

 private:
  double exponent_;
  double cutoff_;
  double y0_ = 0.0;
  double m0_ = 0.0;
};

struct GrowthEstimate {
  std::vector<double> t;
  std::vector<double> g;
  double alpha = 0.0;  // +inf when every g is below 1e-14
  double standard_error = 0.0;
  double half_width = 0.0;  // 2 * standard error
  double alpha_lower = 0.0;
  double residual = 0.0;  // RMS of the log-log fit
  std::size_t window_begin = 0;  // fit uses t[window_begin..]
  bool non_monotone = false;
  bool flat = false;
};

/// Geometric offsets from `first` down to `last` with `per_decade` steps per decade.
std::vector<double> geometric_schedule(double first, double last, int per_decade);

/// sup over a lattice of base points and unit normal directions of
/// |f(g(x, t u)) - f(g(x, 0))|, then a least-squares slope of log g against
/// log t over the last decade of the schedule (at least three points),
/// restricted to the longest monotone tail.
GrowthEstimate estimate_growth_exponent(const SmoothMap& f, const TubeChart& tube,
                                        const std::vector<double>& schedule);

/// r = max(1 / alpha_lower, 1) + margin with the default cutoff, halved until
/// the blend is monotone; also checks monotonicity on 100 samples.
EtaProfile select_eta(const GrowthEstimate& estimate, double margin, double cutoff = 0.25);

/// χ(g(x, u)) = g(x, R η(|u|/R) u/|u|); identity on V, for |u| >= R/2, and
/// outside the tube.
Vec apply_chi(const TubeChart& tube, const EtaProfile& eta, const Vec& y);
Vec apply_chi_inverse(const TubeChart& tube, const EtaProfile& eta, const Vec& y);
/// Jacobian of χ at y (identity outside the tube).
Mat chi_jacobian(const TubeChart& tube, const EtaProfile& eta, const Vec& y);

/// f ∘ χ. Off V the Jacobian is J_f(χ(y)) J_χ(y); on V the normal columns
/// are zero and the tangential ones are the derivatives of f along V.
SmoothMap panel_beat(const SmoothMap& f, const TubeChart& tube, const EtaProfile& eta);

/// Certification probe: a point on a stratum or face with the directions
/// leaving it (radial) and running along it (tangential).
struct Probe {
  Vec base;
  std::vector<Vec> radial;
  std::vector<Vec> tangential;
  /// Also monitor the Jacobian jump between base + h n and base - h n.
  bool two_sided = false;
};

/// Probes on a lattice of stratum points (per_axis along each parameter
/// axis) with the unit normals of the tube as radial directions. A normal
/// is kept when f is defined a little way along it; a probe is two-sided
/// when both signs are kept.
std::vector<Probe> probes_from_tube(const TubeChart& tube, const SmoothMap& f, int per_axis = 5);

enum class MonitorKind { Radial, Tangential, Jump };
std::string to_string(MonitorKind kind);

struct MonitorSeries {
  MonitorKind kind = MonitorKind::Radial;
  int probe = 0;
  int direction = 0;
  std::vector<double> values;  // one per offset
  /// Radial only: norms of the one-sided difference quotients
  /// |f(base + h n) - f(base)| / h.
  std::vector<double> quotients;
  /// Radial only: |J(base + h n) n| / (2h), informational.
  std::vector<double> linear_bound_ratio;
  double limit = 0.0;  // Aitken extrapolation over the last three offsets
  bool extrapolated = false;
  double rate = 0.0;  // log-log slope over the last three offsets
  bool decreasing = false;
  bool pass = false;
};

struct C1Report {
  std::vector<double> offsets;
  double tolerance = 0.0;
  std::vector<MonitorSeries> series;
  /// Probe bases where a tangential series failed (estimate of the bad set).
  std::vector<Vec> bad_set;
  bool finite_difference_used = false;
  bool pass = false;
};

/// Derivatives are taken from the map's Jacobian (closed form when present,
/// otherwise central differences with a step at most 1e-2 of the offset).
/// Monitors, per probe and direction:
///   radial     |J(base + h n) n - L|, L the extrapolated one-sided quotient
///   tangential |J(base + h n) τ - J(base) τ|
///   jump       ‖J(base + h n) - J(base - h n)‖ (two-sided probes)
/// A series passes when its extrapolated limit is below tolerance and it is
/// non-increasing over the last three offsets.
C1Report certify_c1(const SmoothMap& f, const std::vector<Probe>& probes, const std::vector<double>& offsets,
                    double tolerance);

/// Fills limit, rate, decreasing and pass of a series from its values.
void evaluate_series(MonitorSeries& series, const std::vector<double>& offsets, double tolerance);

std::vector<double> default_offsets();  // 1e-1 .. 1e-6

struct MultiBeat {
  GrowthEstimate estimate;
  EtaProfile eta;
  std::vector<SmoothMap> beaten;
  std::vector<C1Report> reports;
};

/// One profile for several maps: growth is estimated on the product map, so
/// the fastest-growing component sets the exponent.
MultiBeat panel_beat_multi(const std::vector<SmoothMap>& maps, const TubeChart& tube,
                           const std::vector<double>& schedule, double margin, double tolerance);

struct BeatResult {
  GrowthEstimate estimate;
  std::optional<EtaProfile> eta;
  SmoothMap beaten;
  C1Report report;
  int iterations = 0;
};

/// Estimates, beats and certifies; on failure doubles the margin and retries,
/// at most `max_iterations` times.
BeatResult beat_until_certified(const SmoothMap& f, const TubeChart& tube, const std::vector<double>& schedule,
                                double margin, double tolerance, int max_iterations = 8);

}  // namespace sacalc
