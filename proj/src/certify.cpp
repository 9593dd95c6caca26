#include "sacalc/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sacalc/errors.hpp"

namespace sacalc {

namespace {

Vec reference_vertex(int k, int p) {
  Vec e = Vec::Zero(p);
  if (k > 0) e[k - 1] = 1.0;
  return e;
}

struct MeshFrame {
  Vec origin;
  Mat inverse;  // mesh -> reference, linear part
};

MeshFrame mesh_frame(const std::vector<Vec>& pts) {
  const auto p = static_cast<Eigen::Index>(pts.size()) - 1;
  Mat edges(pts[0].size(), p);
  for (Eigen::Index i = 0; i < p; ++i) edges.col(i) = pts[static_cast<std::size_t>(i) + 1] - pts[0];
  return {pts[0], edges.inverse()};
}

}  // namespace

C1Report certify_charts(const SimplicialComplex& complex, const std::vector<SmoothMap>& charts,
                        const std::vector<double>& offsets, double tolerance) {
  const int top = complex.dimension();
  if (top < 1) throw InvalidArgument("certify: complex has no simplices of positive dimension");
  if (charts.size() != complex.count(top)) throw InvalidArgument("certify: one chart per top simplex required");
  C1Report report;
  report.offsets = offsets;
  report.tolerance = tolerance;
  int probe_base = 0;
  for (std::size_t i = 0; i < charts.size(); ++i) {
    const SmoothMap& chart = charts[i];
    if (chart.domain_dim() != static_cast<std::size_t>(top)) {
      throw DimensionMismatch("certify: chart " + std::to_string(i) + " has the wrong domain dimension");
    }
    std::vector<Probe> probes;
    for (int omit = 0; omit <= top; ++omit) {
      Probe probe;
      std::vector<Vec> facet;
      for (int k = 0; k <= top; ++k) {
        if (k != omit) facet.push_back(reference_vertex(k, top));
      }
      probe.base = Vec::Zero(top);
      for (const auto& v : facet) probe.base += v;
      probe.base /= static_cast<double>(facet.size());
      const Vec inward = reference_vertex(omit, top) - probe.base;
      probe.radial.push_back(inward / inward.norm());
      for (std::size_t k = 1; k < facet.size(); ++k) {
        const Vec e = facet[k] - facet[0];
        probe.tangential.push_back(e / e.norm());
      }
      probes.push_back(std::move(probe));
    }
    C1Report part = certify_c1(chart, probes, offsets, tolerance);
    for (auto& s : part.series) {
      s.probe += probe_base;
      report.series.push_back(std::move(s));
    }
    for (const auto& b : part.bad_set) report.bad_set.push_back(chart(b));
    report.finite_difference_used = report.finite_difference_used || part.finite_difference_used;
    probe_base += static_cast<int>(probes.size());
  }

  if (static_cast<std::size_t>(top) == complex.ambient_dim()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t f = 0; f < complex.count(top - 1); ++f) {
      const auto& cof = complex.cofaces(top - 1, static_cast<int>(f));
      if (cof.size() != 2) continue;
      const auto face_pts = complex.points(top - 1, static_cast<int>(f));
      Vec bary = Vec::Zero(face_pts[0].size());
      for (const auto& v : face_pts) bary += v;
      bary /= static_cast<double>(face_pts.size());
      MonitorSeries jump;
      jump.kind = MonitorKind::Jump;
      jump.probe = probe_base++;
      jump.direction = 0;
      for (double h : offsets) {
        Mat sides[2];
        bool ok = true;
        for (int side = 0; side < 2; ++side) {
          const int s = cof[static_cast<std::size_t>(side)];
          const auto pts = complex.points(top, s);
          const Simplex& simplex = complex.simplex(top, s);
          const Simplex& face = complex.simplex(top - 1, static_cast<int>(f));
          Vec opposite;
          for (std::size_t k = 0; k < simplex.size(); ++k) {
            if (std::find(face.begin(), face.end(), simplex[k]) == face.end()) opposite = pts[k];
          }
          const Vec dir = (opposite - bary).normalized();
          const MeshFrame frame = mesh_frame(pts);
          const Vec ref = frame.inverse * (bary + h * dir - frame.origin);
          try {
            const auto js = charts[static_cast<std::size_t>(s)].jacobian(ref, std::min(SmoothMap::kDefaultFdStep, 1e-2 * h));
            report.finite_difference_used = report.finite_difference_used || js.finite_difference;
            sides[side] = js.value * frame.inverse;
          } catch (const Error&) {
            ok = false;
          }
        }
        jump.values.push_back(ok ? (sides[0] - sides[1]).norm() : nan);
      }
      evaluate_series(jump, offsets, tolerance);
      report.series.push_back(std::move(jump));
    }
  }
  report.pass = std::all_of(report.series.begin(), report.series.end(), [](const MonitorSeries& s) { return s.pass; });
  return report;
}

}  // namespace sacalc
