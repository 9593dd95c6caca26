#include "sacalc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sacalc/certify.hpp"
#include "sacalc/demos.hpp"
#include "sacalc/errors.hpp"
#include "sacalc/integrate.hpp"
#include "sacalc/io.hpp"
#include "sacalc/measure.hpp"
#include "sacalc/mesh.hpp"
#include "sacalc/panelbeat.hpp"
#include "sacalc/triangulate.hpp"

namespace sacalc {

namespace {

using Json = nlohmann::ordered_json;

struct Config {
  std::string json_path;
  std::uint64_t seed = 0;
  std::string set_path;
  std::string form_path;
  std::string mesh_path;
  std::string charts_path;
  std::string out_path;
  int depth = 4;
  std::optional<int> depth2;
  int quad_degree = kDefaultQuadratureDegree;
  std::vector<double> offset;
  std::vector<double> offset2;
  bool common = false;
  std::optional<double> expect;
  std::optional<double> tol;
  std::string example = "sqrt";
  std::optional<double> margin;
  int d = 0;
  std::vector<int> ns{8, 16, 32, 64};
  std::vector<double> offsets;
};

struct Outcome {
  int status = kExitOk;
  Json report;
};

// Input files are tagged with their path so diagnostics say which file.
template <class Parse>
auto load(const std::string& path, Parse parse) {
  const std::string text = read_file(path);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw ParseError(path, e.what());
  }
}

SetInput load_set(const std::string& path) {
  return load(path, [](const std::string& t) { return parse_set(t); });
}

DifferentialForm load_form(const std::string& path, std::size_t ambient) {
  return load(path, [ambient](const std::string& t) { return parse_form(t, ambient); });
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json integral_json(const IntegralReport& r) {
  return Json{{"value", r.value},
              {"error_estimate", r.error_estimate},
              {"quadrature_degree", r.degree},
              {"simplices", r.contributions.size()},
              {"fd_nodes", r.fd_nodes}};
}

Json triangulation_json(const TriangulationBundle& b) {
  const TriangulationReport& r = b.report;
  Json counts = Json::array();
  for (int p = 0; p <= b.top_dim(); ++p) counts.push_back(b.complex.count(p));
  return Json{{"depth", r.depth},
              {"simplices_by_dimension", counts},
              {"grid_simplices", r.grid_simplices},
              {"kept", r.kept},
              {"snapped_vertices", r.snapped_vertices},
              {"max_snap_iterations", r.max_snap_iterations},
              {"total_snap_iterations", r.total_snap_iterations},
              {"snap_failures", r.snap_failures},
              {"dropped_degenerate", r.dropped_degenerate},
              {"family_straddling", r.family_straddling},
              {"mesh_size", r.mesh_size},
              {"volume", b.total_volume()}};
}

Json c1_json(const C1Report& r) {
  Json series = Json::array();
  for (const auto& s : r.series) {
    Json j{{"kind", to_string(s.kind)},
           {"probe", s.probe},
           {"direction", s.direction},
           {"values", s.values},
           {"limit", s.limit},
           {"extrapolated", s.extrapolated},
           {"rate", s.rate},
           {"decreasing", s.decreasing},
           {"pass", s.pass}};
    if (s.kind == MonitorKind::Radial) {
      j["quotients"] = s.quotients;
      j["linear_bound_ratio"] = s.linear_bound_ratio;
    }
    series.push_back(std::move(j));
  }
  Json bad = Json::array();
  for (const auto& b : r.bad_set) bad.push_back(vec_json(b));
  return Json{{"pass", r.pass},
              {"tolerance", r.tolerance},
              {"offsets", r.offsets},
              {"finite_difference_used", r.finite_difference_used},
              {"bad_set", bad},
              {"series", series}};
}

Json growth_json(const GrowthEstimate& e) {
  return Json{{"alpha", e.alpha},
              {"standard_error", e.standard_error},
              {"half_width", e.half_width},
              {"alpha_lower", e.alpha_lower},
              {"residual", e.residual},
              {"window_begin", e.window_begin},
              {"non_monotone", e.non_monotone},
              {"flat", e.flat},
              {"t", e.t},
              {"g", e.g}};
}

void print_c1(std::ostream& out, const C1Report& r) {
  out << "series      probe dir  finest        limit         rate     result\n";
  for (const auto& s : r.series) {
    out << std::left << std::setw(11) << to_string(s.kind) << std::right << std::setw(6) << s.probe << std::setw(4)
        << s.direction << "  " << std::scientific << std::setprecision(5) << std::setw(12)
        << (s.values.empty() ? 0.0 : s.values.back()) << "  " << std::setw(12) << s.limit << "  " << std::fixed
        << std::setprecision(3) << std::setw(7) << s.rate << "  " << (s.pass ? "pass" : "FAIL") << "\n";
  }
  out << std::defaultfloat << std::setprecision(6);
  for (const auto& b : r.bad_set) out << "bad-set sample: " << b.transpose() << "\n";
  out << "C1 certification: " << (r.pass ? "PASS" : "FAIL") << " at tolerance " << r.tolerance
      << (r.finite_difference_used ? " (finite differences used)" : "") << "\n";
}

std::vector<double> grid_offset(const std::vector<double>& given, std::size_t m) {
  if (given.empty()) return {};
  if (given.size() == 1) return std::vector<double>(m, given[0]);
  if (given.size() != m) throw InvalidArgument("offset needs 1 or " + std::to_string(m) + " values");
  return given;
}

Outcome cmd_triangulate(const Config& c, std::ostream& out) {
  const SetInput in = load_set(c.set_path);
  TriangulateOptions opt;
  opt.grid_offset = grid_offset(c.offset, in.formula.dim());
  opt.family = in.family;
  const TriangulationBundle b = triangulate(in.formula, c.depth, opt);
  Json report = triangulation_json(b);
  std::optional<Chain> orientation;
  if (b.top_dim() >= 1) {
    try {
      orientation = orient_fundamental(b.complex, b.top_dim());
    } catch (const Error&) {
      orientation.reset();
    }
  }
  report["oriented"] = orientation.has_value();
  if (!c.out_path.empty()) {
    std::ofstream f(c.out_path, std::ios::binary);
    if (!f) throw ParseError(c.out_path, "cannot write mesh");
    f << write_mesh(b.complex, orientation ? &*orientation : nullptr);
    report["mesh"] = c.out_path;
  }
  out << "triangulated at depth " << c.depth << ": ";
  for (int p = 0; p <= b.top_dim(); ++p) out << (p ? ", " : "") << b.complex.count(p) << " " << p << "-simplices";
  out << "\nsnapped vertices " << b.report.snapped_vertices << " (max " << b.report.max_snap_iterations
      << " iterations), snap failures " << b.report.snap_failures.size() << ", dropped "
      << b.report.dropped_degenerate.size() << "\nmesh size " << b.report.mesh_size << ", volume "
      << std::setprecision(12) << b.total_volume() << "\n";
  if (!orientation) out << "warning: mesh is not orientable as a manifold, written without orientation\n";
  return {kExitOk, report};
}

Outcome cmd_integrate(const Config& c, std::ostream& out) {
  const SetInput in = load_set(c.set_path);
  const DifferentialForm form = load_form(c.form_path, in.formula.dim());
  const TriangulationBundle b = triangulate(in.formula, c.depth, {grid_offset(c.offset, in.formula.dim()), in.family});
  const IntegralReport r = integrate_chain(form, b, orient_fundamental(b.complex, b.top_dim()), c.quad_degree);
  Json report{{"depth", c.depth}, {"integral", integral_json(r)}};
  out << std::setprecision(12) << "integral " << r.value << "\nerror estimate " << std::setprecision(3)
      << r.error_estimate << " (degree " << r.degree << " rule, " << r.contributions.size() << " simplices)\n";
  int status = kExitOk;
  if (c.expect) {
    const double tol = c.tol.value_or(1e-6);
    const double dev = std::abs(r.value - *c.expect);
    status = dev <= tol ? kExitOk : kExitFailed;
    report["expected"] = *c.expect;
    report["tolerance"] = tol;
    report["deviation"] = dev;
    out << "deviation from expected " << dev << ": " << (status == kExitOk ? "within" : "OUTSIDE") << " tolerance "
        << tol << "\n";
  }
  return {status, report};
}

Outcome cmd_stokes(const Config& c, std::ostream& out) {
  const SetInput in = load_set(c.set_path);
  const DifferentialForm form = load_form(c.form_path, in.formula.dim());
  const TriangulationBundle b = triangulate(in.formula, c.depth, {grid_offset(c.offset, in.formula.dim()), in.family});
  const StokesReport r = stokes_residual(form, b, orient_fundamental(b.complex, b.top_dim()), c.quad_degree);
  Json report{{"depth", c.depth},
              {"interior", integral_json(r.interior)},
              {"boundary", integral_json(r.boundary)},
              {"residual", r.residual}};
  out << std::setprecision(12) << "integral of d(form) over the set  " << r.interior.value
      << "\nintegral of form over the boundary " << r.boundary.value << "\nresidual " << std::setprecision(3)
      << r.residual << "\n";
  int status = kExitOk;
  if (c.tol) {
    status = r.residual <= *c.tol ? kExitOk : kExitFailed;
    report["tolerance"] = *c.tol;
    out << "residual " << (status == kExitOk ? "within" : "OUTSIDE") << " tolerance " << *c.tol << "\n";
  }
  return {status, report};
}

Outcome cmd_compare(const Config& c, std::ostream& out) {
  const SetInput in = load_set(c.set_path);
  const std::size_t m = in.formula.dim();
  const DifferentialForm form = load_form(c.form_path, m);
  const TriangulationBundle b1 = triangulate(in.formula, c.depth, {grid_offset(c.offset, m), in.family});
  const std::vector<double> second = c.offset2.empty() ? std::vector<double>(m, 0.5) : grid_offset(c.offset2, m);
  const int depth2 = c.depth2.value_or(c.depth);
  const TriangulationBundle b2 = triangulate(in.formula, depth2, {second, in.family});
  const ComparisonReport r =
      compare_triangulations(form, b1, b2, c.common, c.quad_degree, OverlayOptions{1e-8, c.seed});
  Json report{{"depth", c.depth},
              {"depth2", depth2},
              {"offset2", second},
              {"first", integral_json(r.first)},
              {"second", integral_json(r.second)},
              {"delta", r.delta}};
  out << std::setprecision(12) << "first  " << r.first.value << "\nsecond " << r.second.value << "\n";
  if (r.common) {
    report["common"] = integral_json(*r.common);
    out << "common refinement " << r.common->value << " (" << r.common->contributions.size() << " simplices)\n";
  }
  report["spread"] = r.spread;
  out << std::setprecision(3) << "spread " << r.spread << "\n";
  int status = kExitOk;
  if (c.tol) {
    status = r.spread <= *c.tol ? kExitOk : kExitFailed;
    report["tolerance"] = *c.tol;
    out << "spread " << (status == kExitOk ? "within" : "OUTSIDE") << " tolerance " << *c.tol << "\n";
  }
  return {status, report};
}

Outcome cmd_demo(const Config& c, std::ostream& out) {
  const DemoProblem p = demo_problem(c.example);
  const double tol = c.tol.value_or(1e-3);
  const double margin = c.margin.value_or(p.margin);
  const BeatResult r = beat_until_certified(p.map, p.tube, demo_schedule(), margin, tol);
  const C1Report raw = certify_c1(p.map, probes_from_tube(p.tube, p.map), default_offsets(), tol);
  Json report{{"example", p.name},
              {"margin", margin},
              {"growth", growth_json(r.estimate)},
              {"exponent", r.eta ? Json(r.eta->exponent()) : Json()},
              {"cutoff", r.eta ? Json(r.eta->cutoff()) : Json()},
              {"iterations", r.iterations},
              {"unbeaten_pass", raw.pass},
              {"certificate", c1_json(r.report)}};
  out << "example " << p.name << ": growth exponent " << std::setprecision(6) << r.estimate.alpha << " (lower bound "
      << r.estimate.alpha_lower << ")\n";
  if (r.eta) out << "profile exponent " << r.eta->exponent() << ", cutoff " << r.eta->cutoff() << "\n";
  out << "unbeaten map: " << (raw.pass ? "pass" : "fail") << "\n";
  print_c1(out, r.report);
  return {r.report.pass ? kExitOk : kExitFailed, report};
}

Outcome cmd_certify(const Config& c, std::ostream& out) {
  const MeshFile mesh = load(c.mesh_path, [](const std::string& t) { return read_mesh(t); });
  const std::vector<SmoothMap> charts =
      load(c.charts_path, [&](const std::string& t) { return parse_charts(t, mesh.complex); });
  const double tol = c.tol.value_or(1e-3);
  const std::vector<double> offsets = c.offsets.empty() ? default_offsets() : c.offsets;
  const C1Report r = certify_charts(mesh.complex, charts, offsets, tol);
  print_c1(out, r);
  return {r.pass ? kExitOk : kExitFailed, Json{{"certificate", c1_json(r)}}};
}

Outcome cmd_volume(const Config& c, std::ostream& out) {
  const SetInput in = load_set(c.set_path);
  const GridReport r = grid_measure_sequence(in.formula, grid_frame(in.formula), c.d, c.ns);
  Json entries = Json::array();
  out << "grid measure, m = " << r.m << ", d = " << r.d << ", side " << std::setprecision(12) << r.side << "\n";
  out << "     n  optimistic pessimistic  v_optimistic        v_pessimistic       normalized_pessimistic\n";
  for (const auto& e : r.entries) {
    entries.push_back(Json{{"n", e.n},
                           {"delta", e.delta},
                           {"optimistic", e.optimistic},
                           {"pessimistic", e.pessimistic},
                           {"v_optimistic", e.v_optimistic},
                           {"v_pessimistic", e.v_pessimistic},
                           {"normalized_optimistic", e.normalized_optimistic},
                           {"normalized_pessimistic", e.normalized_pessimistic}});
    out << std::setw(6) << e.n << std::setw(12) << e.optimistic << std::setw(12) << e.pessimistic << "  "
        << std::setprecision(15) << std::left << std::setw(20) << e.v_optimistic << std::setw(20) << e.v_pessimistic
        << e.normalized_pessimistic << std::right << "\n";
  }
  out << "sup v_pessimistic " << r.sup_pessimistic << ", bounded: " << (r.bounded ? "yes" : "NO") << "\n";
  return {r.bounded ? kExitOk : kExitFailed, Json{{"m", r.m},
                                                 {"d", r.d},
                                                 {"side", r.side},
                                                 {"entries", entries},
                                                 {"sup_optimistic", r.sup_optimistic},
                                                 {"sup_pessimistic", r.sup_pessimistic},
                                                 {"violations", r.violations},
                                                 {"bounded", r.bounded}}};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Triangulation, integration, panel beating and grid measure of semialgebraic sets", "sacalc"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.add_option("--json", c.json_path, "Also write the report as JSON to this path");
  app.add_option("--seed", c.seed, "Seed for every random choice (overlay jitter)");

  const auto depth_range = CLI::Range(0, 12);
  const auto quad_range = CLI::Range(0, 30);

  auto* tri = app.add_subcommand("triangulate", "Triangulate a set and write the mesh");
  tri->add_option("set", c.set_path, "Set description (JSON)")->required()->check(CLI::ExistingFile);
  tri->add_option("--depth", c.depth, "Grid resolution 2^depth per axis")->check(depth_range);
  tri->add_option("--out", c.out_path, "Mesh output path");
  tri->add_option("--offset", c.offset, "Grid shift in cells, one value or one per axis")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 0.999999));

  auto* integ = app.add_subcommand("integrate", "Integrate a top-degree form over a set");
  integ->add_option("set", c.set_path)->required()->check(CLI::ExistingFile);
  integ->add_option("form", c.form_path)->required()->check(CLI::ExistingFile);
  integ->add_option("--depth", c.depth)->check(depth_range);
  integ->add_option("--quad-degree", c.quad_degree, "Quadrature exactness degree")->check(quad_range);
  integ->add_option("--offset", c.offset)->delimiter(',')->check(CLI::Range(0.0, 0.999999));
  integ->add_option("--expect", c.expect, "Expected value; exit 1 when further than --tol");
  integ->add_option("--tol", c.tol)->check(CLI::PositiveNumber);

  auto* stokes = app.add_subcommand("stokes", "Compare the integral of d(form) with the boundary integral");
  stokes->add_option("set", c.set_path)->required()->check(CLI::ExistingFile);
  stokes->add_option("form", c.form_path)->required()->check(CLI::ExistingFile);
  stokes->add_option("--depth", c.depth)->check(depth_range);
  stokes->add_option("--quad-degree", c.quad_degree)->check(quad_range);
  stokes->add_option("--offset", c.offset)->delimiter(',')->check(CLI::Range(0.0, 0.999999));
  stokes->add_option("--tol", c.tol, "Exit 1 when the residual exceeds this")->check(CLI::PositiveNumber);

  auto* compare = app.add_subcommand("compare", "Integrate over two triangulations of the same set");
  compare->add_option("set", c.set_path)->required()->check(CLI::ExistingFile);
  compare->add_option("form", c.form_path)->required()->check(CLI::ExistingFile);
  compare->add_option("--depth", c.depth)->check(depth_range);
  compare->add_option("--depth2", c.depth2, "Depth of the second triangulation (default: --depth)")->check(depth_range);
  compare->add_option("--offset", c.offset)->delimiter(',')->check(CLI::Range(0.0, 0.999999));
  compare->add_option("--offset2", c.offset2, "Grid shift of the second triangulation (default 0.5)")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 0.999999));
  compare->add_flag("--common", c.common, "Also integrate over the common refinement");
  compare->add_option("--quad-degree", c.quad_degree)->check(quad_range);
  compare->add_option("--tol", c.tol, "Exit 1 when the spread exceeds this")->check(CLI::PositiveNumber);

  auto* beat = app.add_subcommand("panelbeat", "Panel beating and C1 certification");
  beat->require_subcommand(1);
  auto* demo = beat->add_subcommand("demo", "Beat and certify a built-in example");
  demo->add_option("--example", c.example)->check(CLI::IsMember(demo_names()));
  demo->add_option("--tol", c.tol, "Certification tolerance (default 1e-3)")->check(CLI::PositiveNumber);
  demo->add_option("--margin", c.margin, "Exponent margin over max(1/alpha, 1)")->check(CLI::PositiveNumber);
  auto* cert = beat->add_subcommand("certify", "Certify the charts of a mesh");
  cert->add_option("mesh", c.mesh_path)->required()->check(CLI::ExistingFile);
  cert->add_option("charts", c.charts_path)->required()->check(CLI::ExistingFile);
  cert->add_option("--tol", c.tol, "Certification tolerance (default 1e-3)")->check(CLI::PositiveNumber);
  cert->add_option("--offsets", c.offsets, "Decreasing offsets (default 1e-1..1e-6)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);

  auto* volume = app.add_subcommand("volume", "Grid measure sequence of a set");
  volume->add_option("set", c.set_path)->required()->check(CLI::ExistingFile);
  volume->add_option("--d", c.d, "Measure dimension")->required()->check(CLI::NonNegativeNumber);
  volume->add_option("--n", c.ns, "Increasing grid resolutions")->delimiter(',')->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  Outcome result;
  std::string command;
  try {
    if (tri->parsed()) {
      command = "triangulate";
      result = cmd_triangulate(c, out);
    } else if (integ->parsed()) {
      command = "integrate";
      result = cmd_integrate(c, out);
    } else if (stokes->parsed()) {
      command = "stokes";
      result = cmd_stokes(c, out);
    } else if (compare->parsed()) {
      command = "compare";
      result = cmd_compare(c, out);
    } else if (demo->parsed()) {
      command = "panelbeat demo";
      result = cmd_demo(c, out);
    } else if (cert->parsed()) {
      command = "panelbeat certify";
      result = cmd_certify(c, out);
    } else {
      command = "volume";
      result = cmd_volume(c, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  }

  if (!c.json_path.empty()) {
    Json doc{{"schema", 1}, {"command", command}, {"seed", c.seed}, {"status", result.status}};
    for (auto& [key, value] : result.report.items()) doc[key] = value;
    std::ofstream f(c.json_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << c.json_path << "\n";
      return kExitBadInput;
    }
    f << doc.dump(2) << "\n";
  }
  return result.status;
}

}  // namespace sacalc
