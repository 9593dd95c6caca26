// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sacalc/cli.hpp"
#include "sacalc/demos.hpp"
#include "sacalc/form.hpp"
#include "sacalc/integrate.hpp"
#include "sacalc/io.hpp"
#include "sacalc/measure.hpp"
#include "sacalc/mesh.hpp"
#include "sacalc/panelbeat.hpp"
#include "sacalc/quadrature.hpp"
#include "sacalc/triangulate.hpp"

using namespace sacalc;

namespace {

const std::string kData = SACALC_DATA_DIR;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

SAFormula load_set(const std::string& name) { return parse_set(read_file(kData + "/" + name)).formula; }
DifferentialForm load_form(const std::string& name, std::size_t m) { return parse_form(read_file(kData + "/" + name), m); }

double disk_area(int depth) {
  const TriangulationBundle b = triangulate(load_set("disk.json"), depth);
  return integrate_chain(load_form("area2form.json", 2), b, orient_fundamental(b.complex, 2)).value;
}

double residual(const std::string& set, const std::string& form, std::size_t m, int depth) {
  const TriangulationBundle b = triangulate(load_set(set), depth);
  return stokes_residual(load_form(form, m), b, orient_fundamental(b.complex, b.top_dim())).residual;
}

Verdict disk_area_criterion() {
  const double e4 = std::abs(disk_area(4) - M_PI);
  const double e5 = std::abs(disk_area(5) - M_PI);
  const double e6 = std::abs(disk_area(6) - M_PI);
  return {e6 < 5e-3 && e5 < e4 && e6 < e5,
          "errors depth 4/5/6 = " + fmt("%.3e", e4) + " " + fmt("%.3e", e5) + " " + fmt("%.3e", e6)};
}

Verdict stokes_criterion() {
  const double disk = residual("disk.json", "x_dy.json", 2, 6);
  const double line = residual("interval.json", "identity_function.json", 1, 3);
  const double ring = residual("annulus.json", "rotation.json", 2, 5);
  return {disk < 5e-3 && line < 1e-12 && ring < 1e-2,
          "residuals disk " + fmt("%.2e", disk) + ", interval " + fmt("%.2e", line) + ", annulus " + fmt("%.2e", ring)};
}

Verdict well_defined_criterion() {
  const SAFormula disk = load_set("disk.json");
  TriangulateOptions a;
  a.grid_offset = {0.13, 0.29};
  TriangulateOptions b;
  b.grid_offset = {0.61, 0.47};
  const ComparisonReport r =
      compare_triangulations(load_form("area2form.json", 2), triangulate(disk, 5, a), triangulate(disk, 5, b), true);
  const double lo = std::min(r.first.value, r.second.value);
  const double hi = std::max(r.first.value, r.second.value);
  const bool between = r.common && r.common->value >= lo - 1e-2 && r.common->value <= hi + 1e-2;
  return {r.delta < 1e-2 && between, "I1 = " + fmt("%.6f", r.first.value) + ", I2 = " + fmt("%.6f", r.second.value) +
                                         ", common = " + fmt("%.6f", r.common ? r.common->value : NAN)};
}

Verdict radial_criterion() {
  const DemoProblem p = demo_problem("sqrt");
  const GrowthEstimate est = estimate_growth_exponent(p.map, p.tube, demo_schedule());
  const SmoothMap beaten = panel_beat(p.map, p.tube, EtaProfile(2.5));
  const std::vector<double> offsets = geometric_schedule(1e-2, 1e-6, 1);
  const C1Report good = certify_c1(beaten, probes_from_tube(p.tube, beaten), offsets, 1e-3);
  bool quotients_fall = true;
  for (const auto& s : good.series) {
    if (s.kind != MonitorKind::Radial) continue;
    for (std::size_t i = 1; i < s.quotients.size(); ++i) quotients_fall = quotients_fall && s.quotients[i] < s.quotients[i - 1];
  }
  const C1Report bad = certify_c1(p.map, probes_from_tube(p.tube, p.map), offsets, 1e-3);
  const bool alpha_ok = est.alpha >= 0.45 && est.alpha <= 0.55;
  return {alpha_ok && good.pass && quotients_fall && !bad.pass,
          "alpha = " + fmt("%.4f", est.alpha) + ", beaten " + (good.pass ? "passes" : "fails") + ", unbeaten " +
              (bad.pass ? "passes" : "fails")};
}

Verdict tangential_criterion() {
  const DemoProblem p = demo_problem("abs");
  const SmoothMap beaten = panel_beat(p.map, p.tube, EtaProfile(2.5));
  const std::vector<Probe> probes = probes_from_tube(p.tube, beaten);
  const C1Report r = certify_c1(beaten, probes, default_offsets(), 1e-3);
  double worst = 0.0;
  std::size_t checked = 0;
  for (const auto& s : r.series) {
    if (s.kind != MonitorKind::Tangential) continue;
    bool flagged = false;
    for (const Vec& b : r.bad_set) flagged = flagged || (b - probes[static_cast<std::size_t>(s.probe)].base).norm() < 1e-12;
    if (flagged) continue;
    worst = std::max(worst, s.values.back());
    ++checked;
  }
  return {checked > 0 && worst < 1e-6, fmt("%.0f", static_cast<double>(checked)) + " tangential series, worst deviation " +
                                           fmt("%.2e", worst) + ", bad-set samples " +
                                           fmt("%.0f", static_cast<double>(r.bad_set.size()))};
}

Verdict simplex_criterion() {
  // Cone fan of 8 triangles around the origin, tubes of the origin of two radii.
  std::vector<Vec> pts{Vec::Zero(2)};
  for (int k = 0; k < 8; ++k) {
    Vec v(2);
    v << std::cos(k * M_PI / 4 + 0.1), std::sin(k * M_PI / 4 + 0.1);
    pts.push_back(v);
  }
  std::mt19937_64 rng(6);
  std::exponential_distribution<double> e(1.0);
  double worst = 0.0;
  std::size_t moved = 0;
  for (double radius : {0.6, 2.0}) {
    const TubeChart tube(SmoothMap(0, 2, [](const Vec&) { return Vec::Zero(2).eval(); }), Box{}, radius);
    for (double r : {1.5, 2.5}) {
      const EtaProfile eta(r);
      for (int k = 0; k < 8; ++k) {
        const Vec& a = pts[0];
        const Vec& b = pts[1 + static_cast<std::size_t>(k)];
        const Vec& c = pts[1 + static_cast<std::size_t>((k + 1) % 8)];
        Mat edges(2, 2);
        edges << b - a, c - a;
        const auto solver = edges.fullPivLu();
        for (int s = 0; s < 1000; ++s) {
          const double w0 = e(rng), w1 = e(rng), w2 = e(rng);
          const Vec y = (w0 * a + w1 * b + w2 * c) / (w0 + w1 + w2);
          const Vec z = apply_chi(tube, eta, y);
          if ((z - y).norm() > 1e-12) ++moved;
          const Vec t = solver.solve(z - a);
          worst = std::max({worst, -t[0], -t[1], t[0] + t[1] - 1.0});
        }
      }
    }
  }
  return {worst <= 1e-9 && moved > 0,
          "worst barycentric excursion " + fmt("%.2e", std::max(worst, 0.0)) + " over 32000 samples"};
}

Verdict exponent_criterion() {
  bool ok = true;
  std::string detail;
  for (const DemoProblem& p : growth_examples()) {
    const GrowthEstimate est = estimate_growth_exponent(p.map, p.tube, demo_schedule());
    const double r = select_eta(est, p.margin).exponent();
    ok = ok && r > 1.0 / est.alpha_lower && r > 1.0;
    detail += (detail.empty() ? "" : "; ") + p.name + " alpha_lower " + fmt("%.3f", est.alpha_lower) + " r " + fmt("%.3f", r);
  }
  return {ok, detail};
}

Verdict measure_criterion() {
  const SAFormula square = load_set("square.json");
  bool square_ok = true;
  for (int n = 1; n <= 64; ++n) square_ok = square_ok && grid_measure(square, grid_frame(square), 2, n).v_pessimistic == 2.0;

  const SAFormula segment = load_set("segment.json");
  bool segment_ok = true;
  for (int n : {1, 2, 5, 16, 64}) {
    const GridEntry s = grid_measure(segment, grid_frame(segment), 1, n);
    segment_ok = segment_ok && s.v_pessimistic == std::sqrt(2.0) * 3.0;
  }

  const SAFormula disk = load_set("disk_unit_box.json");
  const GridReport d = grid_measure_sequence(disk, grid_frame(disk), 2, {8, 16, 32, 64});
  const double rel = std::abs(d.entries.back().v_pessimistic - 2 * M_PI) / (2 * M_PI);
  const GridReport sq = grid_measure_sequence(square, grid_frame(square), 2, {1, 2, 4, 8, 16, 32, 64});
  const GridReport seg = grid_measure_sequence(segment, grid_frame(segment), 1, {1, 2, 4, 8, 16, 32, 64});
  const SAFormula ring = load_set("annulus.json");
  const GridReport an = grid_measure_sequence(ring, grid_frame(ring), 2, {4, 8, 16, 32});
  const bool bounded = d.bounded && sq.bounded && seg.bounded && an.bounded;
  return {square_ok && segment_ok && rel < 0.1 && bounded,
          std::string("square exact ") + (square_ok ? "yes" : "no") + ", segment exact " + (segment_ok ? "yes" : "no") +
              ", disk n=64 relative error " + fmt("%.4f", rel) + ", bounded " + (bounded ? "yes" : "no")};
}

std::string run_cli_json(std::vector<std::string> args, const std::filesystem::path& path) {
  args.insert(args.begin(), "sacalc");
  args.push_back("--json");
  args.push_back(path.string());
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  if (run(static_cast<int>(argv.size()), argv.data(), out, err) != kExitOk) return "exit failure";
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Verdict structure_criterion() {
  std::mt19937_64 rng(9);
  // ∂∂ = 0 on random chains of a disk mesh.
  const TriangulationBundle b = triangulate(load_set("disk.json"), 4);
  std::uniform_int_distribution<long> coeff(-7, 7);
  bool dd = true;
  for (int trial = 0; trial < 20; ++trial) {
    Chain c{2, {}};
    for (std::size_t i = 0; i < b.complex.count(2); ++i) c.add(static_cast<int>(i), coeff(rng));
    dd = dd && boundary_chain(b.complex, boundary_chain(b.complex, c)).is_zero();
  }

  // d∘d = 0 on random polynomial forms in R^4.
  std::uniform_int_distribution<int> small(-3, 3);
  auto random_poly = [&](std::size_t m) {
    Polynomial p = Polynomial::constant(m, Rational(small(rng)));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i; j < m; ++j) p += Polynomial::variable(m, i) * Polynomial::variable(m, j) * Rational(small(rng));
    }
    return p;
  };
  bool ddf = true;
  for (std::size_t p = 0; p <= 2; ++p) {
    DifferentialForm w(p, 4);
    for (const auto& idx : combinations(4, p)) w.add(random_poly(4).pow(2), idx);
    ddf = ddf && exterior_derivative(exterior_derivative(w)).is_zero();
  }

  // (g∘h)^* ω = h^* g^* ω at random points.
  auto random_map = [&](std::size_t n, std::size_t m) {
    std::vector<Polynomial> comps;
    for (std::size_t k = 0; k < m; ++k) comps.push_back(random_poly(n));
    return SmoothMap::polynomial(comps);
  };
  std::uniform_real_distribution<double> unit(-1, 1);
  double functorial = 0.0;
  for (std::size_t p = 0; p <= 3; ++p) {
    const SmoothMap h = random_map(3, 3);
    const SmoothMap g = random_map(3, 4);
    DifferentialForm w(p, 4);
    for (const auto& idx : combinations(4, p)) w.add(random_poly(4), idx);
    for (int k = 0; k < 100; ++k) {
      Vec x(3);
      x << unit(rng), unit(rng), unit(rng);
      const Covector direct = pullback(w, g.compose(h), x);
      const Covector staged = pull_covector(pullback(w, g, h(x)), h.jacobian(x).value);
      double scale = 1.0;
      for (double v : direct.coeffs) scale = std::max(scale, std::abs(v));
      functorial = std::max(functorial, direct.max_abs_diff(staged) / scale);
    }
  }

  // Quadrature exactness to the declared degree.
  double quad = 0.0;
  for (std::size_t dim = 1; dim <= 4; ++dim) {
    for (int q = 0; q <= 8; ++q) {
      const QuadratureRule rule = make_rule(dim, q);
      quad = std::max(quad, exactness_error(rule, rule.degree));
    }
  }

  // Reports are byte identical across reruns.
  const auto dir = std::filesystem::temp_directory_path() / "sacalc_acceptance";
  std::filesystem::create_directories(dir);
  bool identical = true;
  for (const std::vector<std::string>& cmd :
       {std::vector<std::string>{"compare", kData + "/disk.json", kData + "/area2form.json", "--depth", "4", "--common"},
        std::vector<std::string>{"panelbeat", "demo", "--example", "cusp"},
        std::vector<std::string>{"volume", kData + "/annulus.json", "--d", "2", "--n", "4,8,16"}}) {
    const std::string first = run_cli_json(cmd, dir / "first.json");
    const std::string second = run_cli_json(cmd, dir / "second.json");
    identical = identical && first != "exit failure" && first == second;
  }

  const bool ok = dd && ddf && functorial < 1e-9 && quad < 1e-12 && identical;
  return {ok, std::string("boundary^2 ") + (dd ? "0" : "nonzero") + ", d^2 " + (ddf ? "0" : "nonzero") +
                  ", functoriality " + fmt("%.2e", functorial) + ", quadrature " + fmt("%.2e", quad) +
                  ", reports " + (identical ? "identical" : "differ")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"disk area converges to pi", disk_area_criterion},
      {"Stokes residuals", stokes_criterion},
      {"integral independent of the triangulation", well_defined_criterion},
      {"panel beating flattens the radial derivative", radial_criterion},
      {"tangential derivatives preserved", tangential_criterion},
      {"simplices preserved by the flattening", simplex_criterion},
      {"flattening exponent rule", exponent_criterion},
      {"grid measure", measure_criterion},
      {"structural identities and reproducibility", structure_criterion},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << "): " << v.detail
              << "\n";
  }
  return failures;
}
