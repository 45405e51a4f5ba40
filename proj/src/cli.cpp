#include "tensionweb/cli.hpp"

#include "tensionweb/admissibility.hpp"
#include "tensionweb/hull.hpp"
#include "tensionweb/io.hpp"
#include "tensionweb/junctions.hpp"
#include "tensionweb/planar.hpp"
#include "tensionweb/render.hpp"
#include "tensionweb/uniloadable.hpp"
#include "tensionweb/webbuild.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <thread>

namespace tensionweb {

namespace {

using nlohmann::json;

struct Options {
  std::vector<std::string> files;
  std::string web_path;
  std::string problem_path;
  std::string mode;
  std::string out_path;
  std::string project = "none";
  std::uint64_t seed = 0;
  int jobs = 1;
  std::optional<double> tol;
  bool stuck = false;
};

struct Outcome {
  int code = kExitOk;
  json report;
  std::string message;  // diagnostic for stderr
};

json vec_json(const Eigen::Ref<const Vec>& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
  return a;
}

// One array per column.
json mat_json(const Mat& m) {
  json a = json::array();
  for (Eigen::Index k = 0; k < m.cols(); ++k) a.push_back(vec_json(m.col(k)));
  return a;
}

double positive_number(const std::string& text, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
    throw InvalidInput(what + " must be a positive number, got \"" + text + "\"");
  }
  return v;
}

// defaults < document < TENSIONWEB_TOL < --tol
Tolerances resolve_tolerances(const ToleranceOverrides& doc, const std::optional<double>& flag) {
  Tolerances t = doc.apply({});
  if (flag) {
    t.feas = t.eq = *flag;
  } else if (const char* env = std::getenv("TENSIONWEB_TOL"); env != nullptr && *env != '\0') {
    t.feas = t.eq = positive_number(env, "TENSIONWEB_TOL");
  }
  t.validate();
  return t;
}

struct LoadedProblem {
  ProblemDocument doc;
  Tolerances tol;
  TerminalConfig config() const { return doc.config(tol); }
};

LoadedProblem load_problem(const std::string& path, const Options& opt) {
  LoadedProblem p;
  try {
    p.doc = parse_problem(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
  p.tol = resolve_tolerances(p.doc.tolerances, opt.tol);
  return p;
}

WebDocument load_web(const std::string& path) {
  try {
    return parse_web(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

Outcome guarded(const std::function<Outcome()>& fn, const std::string& label) {
  try {
    return fn();
  } catch (const InvalidInput& e) {
    return {kExitInput, {{"file", label}, {"error", e.what()}}, e.what()};
  } catch (const std::exception& e) {
    return {kExitNegative, {{"file", label}, {"error", e.what()}}, e.what()};
  }
}

int emit(const std::vector<Outcome>& results, bool as_array, std::ostream& out, std::ostream& err) {
  int code = kExitOk;
  json all = json::array();
  for (const Outcome& r : results) {
    code = std::max(code, r.code);
    if (!r.message.empty()) err << "error: " << r.message << "\n";
    all.push_back(r.report);
  }
  if (as_array) {
    out << all.dump(2) << "\n";
  } else if (!results.empty() && !results.front().report.is_null()) {
    out << results.front().report.dump(2) << "\n";
  }
  return code;
}

int run_batch(const Options& opt, const std::function<Outcome(const std::string&)>& fn, std::ostream& out,
              std::ostream& err) {
  const auto& files = opt.files;
  std::vector<Outcome> results(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < files.size(); k = next++) {
      results[k] = guarded([&] { return fn(files[k]); }, files[k]);
    }
  };
  const int workers = std::clamp(opt.jobs, 1, static_cast<int>(std::max<std::size_t>(files.size(), 1)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < workers; ++k) pool.emplace_back(worker);
  }
  return emit(results, files.size() > 1, out, err);
}

json stuck_json(const StuckReport& s) {
  json r = {{"classification", to_string(s.classification)}, {"margin", s.margin}, {"grid", s.grid}};
  if (s.terminal >= 0) r["terminal"] = s.terminal;
  json shifts = json::array();
  for (const ShiftTest& t : s.shifts) {
    shifts.push_back({{"t", t.t},
                      {"terminal", t.terminal},
                      {"admissible", t.admissible},
                      {"minimum", t.minimum},
                      {"exact", t.exact}});
  }
  r["shifts"] = std::move(shifts);
  return r;
}

Outcome check_one(const std::string& path, const Options& opt) {
  const LoadedProblem p = load_problem(path, opt);
  const TerminalConfig cfg = p.config();
  json r = {{"file", path}, {"tolerances", {{"feas", p.tol.feas}, {"eq", p.tol.eq}, {"geom", p.tol.geom}}}};
  if (!is_balanced(cfg, p.tol)) {
    r["balanced"] = false;
    r["admissible"] = false;
    return {kExitNegative, r, {}};
  }
  r["balanced"] = true;
  const AdmissibilityReport a = check_admissibility(cfg, p.tol);
  r["admissible"] = a.admissible;
  r["reduced_dimension"] = a.reduced_dimension;
  if (a.dual_margin) r["dual_margin"] = *a.dual_margin;
  if (a.farkas_coefficients) {
    json lam = json::array();
    const PairCoefficients& c = *a.farkas_coefficients;
    for (std::size_t k = 0; k < c.pairs.size(); ++k) {
      const double v = c.lambda[static_cast<Eigen::Index>(k)];
      if (v > 0.0) lam.push_back({{"i", c.pairs[k].i}, {"j", c.pairs[k].j}, {"lambda", v}});
    }
    r["lambda"] = std::move(lam);
  }
  if (a.violating_displacement) r["witness"] = mat_json(*a.violating_displacement);
  if (opt.stuck && a.admissible) r["stuck"] = stuck_json(stuck_classify(cfg, default_stuck_grid(), p.tol));
  return {a.admissible ? kExitOk : kExitNegative, r, {}};
}

Outcome stuck_one(const std::string& path, const Options& opt) {
  const LoadedProblem p = load_problem(path, opt);
  const TerminalConfig cfg = p.config();
  json r = {{"file", path}};
  if (!is_balanced(cfg, p.tol) || !check_admissibility(cfg, p.tol).admissible) {
    r["admissible"] = false;
    return {kExitNegative, r, {}};
  }
  r["admissible"] = true;
  r.update(stuck_json(stuck_classify(cfg, default_stuck_grid(), p.tol)));
  return {kExitOk, r, {}};
}

// Tensions from the document, or the fixed-geometry LP when any are missing.
std::optional<StressState> resolve_stress(const WebDocument& wd, const TerminalConfig& cfg, const Tolerances& tol) {
  if (wd.has_stress()) return wd.stress();
  return find_stress(wd.web, cfg, tol);
}

struct Verification {
  bool pass = true;
  json report;
};

Verification verify_web(const WebDocument& wd, const TerminalConfig& cfg, const Tolerances& tol, bool uniloadable) {
  if (wd.dimension != cfg.dimension()) throw InvalidInput("web and problem dimensions differ");
  validate(wd.web, &cfg, tol);

  Verification v;
  json checks = json::object();
  auto record = [&](const std::string& name, bool pass, double value, double threshold) {
    checks[name] = {{"pass", pass}, {"value", value}, {"threshold", threshold}};
    v.pass = v.pass && pass;
  };

  const auto stress = resolve_stress(wd, cfg, tol);
  v.report["tensions_given"] = wd.has_stress();
  if (!stress) {
    record("tensions_found", false, 0.0, 0.0);
    v.report["checks"] = std::move(checks);
    return v;
  }
  const StressState& s = *stress;
  const double smin = s.size() > 0 ? s.minCoeff() : 0.0;
  record("tensions_nonnegative", smin >= -tol.feas, smin, -tol.feas);

  const double residual = equilibrium_residual(wd.web, s, cfg);
  record("equilibrium", residual <= support_threshold(cfg, tol), residual, support_threshold(cfg, tol));

  const ConvexHull hull(cfg.positions(), tol.geom);
  double outside = 0.0;
  for (int k = 0; k < wd.web.node_count(); ++k) outside = std::max(outside, hull.signed_distance(wd.web.node(k)));
  const double hull_tol = tol.geom * std::max(1.0, coordinate_scale(cfg.positions()));
  record("hull_containment", outside <= hull_tol, outside, hull_tol);

  double cost = 0.0;
  for (int e = 0; e < wd.web.edge_count(); ++e) cost += s[e] * wd.web.length(e);
  const double work = (cfg.forces().array() * cfg.positions().array()).sum();
  const double gap = std::abs(cost - work);
  record("michell_identity", gap <= 1e-8 * (1.0 + std::abs(cost)), gap, 1e-8 * (1.0 + std::abs(cost)));

  if (uniloadable) {
    const bool u = verify_uniloadable(wd.web, tol);
    record("uniloadable", u, u ? 1.0 : 0.0, 1.0);
  }
  v.report["checks"] = std::move(checks);
  v.report["michell"] = {{"cost", cost}, {"work", work}, {"gap", gap}};
  return v;
}

Outcome emit_web(const WebDocument& doc, json report, const Options& opt, std::ostream& out) {
  if (opt.out_path.empty()) {
    out << serialize(doc);
    return {kExitOk, nullptr, {}};
  }
  write_text_file(opt.out_path, serialize(doc));
  report["out"] = opt.out_path;
  return {kExitOk, std::move(report), {}};
}

Outcome cmd_build(const Options& opt, std::ostream& out) {
  const LoadedProblem p = load_problem(opt.problem_path, opt);
  const TerminalConfig cfg = p.config();
  json r = {{"mode", opt.mode}};
  if (!is_balanced(cfg, p.tol)) {
    r["error"] = "loading is not balanced";
    return {kExitNegative, r, "loading is not balanced"};
  }
  StressedWeb sw;
  if (opt.mode == "pairwise") {
    const auto lam = central_decompose(cfg, p.tol);
    if (!lam) return {kExitNegative, {{"mode", opt.mode}, {"admissible", false}}, "loading is not admissible"};
    sw = pairwise_web(cfg, *lam, p.tol);
  } else {
    const double margin = interior_margin(cfg, p.tol);
    r["margin"] = margin;
    if (!(margin > kInteriorThreshold)) {
      r["interior"] = false;
      return {kExitNegative, r, "loading is not interior to the admissible cone"};
    }
    sw = make_uniloadable(cfg, opt.seed, p.tol);
  }
  const WebDocument doc = WebDocument::from(sw);
  const Verification v = verify_web(doc, cfg, p.tol, opt.mode == "uniloadable");
  r["nodes"] = sw.web.node_count();
  r["edges"] = sw.web.edge_count();
  r["verified"] = v.pass;
  r["verify"] = v.report;
  if (!v.pass) return {kExitNegative, r, "constructed web failed verification"};
  return emit_web(doc, r, opt, out);
}

Outcome cmd_verify(const Options& opt) {
  const WebDocument wd = load_web(opt.web_path);
  const LoadedProblem p = load_problem(opt.problem_path, opt);
  const Verification v = verify_web(wd, p.config(), p.tol, opt.mode == "uniloadable");
  json r = v.report;
  r["pass"] = v.pass;
  return {v.pass ? kExitOk : kExitNegative, r, {}};
}

Outcome cmd_michell(const Options& opt) {
  const WebDocument wd = load_web(opt.web_path);
  const LoadedProblem p = load_problem(opt.problem_path, opt);
  const TerminalConfig cfg = p.config();
  validate(wd.web, &cfg, p.tol);
  const auto s = resolve_stress(wd, cfg, p.tol);
  if (!s || !supports(wd.web, *s, cfg, p.tol)) {
    return {kExitNegative, {{"supports", false}}, "web does not support the problem"};
  }
  const MichellCost m = michell_cost(wd.web, *s, cfg, p.tol);
  const double bound = 1e-8 * (1.0 + std::abs(m.cost));
  return {m.gap <= bound ? kExitOk : kExitNegative,
          {{"supports", true}, {"cost", m.cost}, {"work", m.work}, {"gap", m.gap}, {"bound", bound}},
          {}};
}

Outcome cmd_simplify(const Options& opt, std::ostream& out) {
  const WebDocument wd = load_web(opt.web_path);
  const LoadedProblem p = load_problem(opt.problem_path, opt);
  const TerminalConfig cfg = p.config();
  validate(wd.web, &cfg, p.tol);
  const auto s = resolve_stress(wd, cfg, p.tol);
  if (!s || !supports(wd.web, *s, cfg, p.tol)) {
    return {kExitNegative, {{"supports", false}}, "web does not support the problem"};
  }
  json r = {{"mode", opt.mode}};
  StressedWeb result;
  bool post = true;
  if (opt.mode == "loops") {
    if (cfg.dimension() != 2) throw InvalidInput("loop simplification needs a 2D web");
    const SimplifyResult sr = simplify_loops(wd.web, *s, cfg, p.tol);
    const int bound = loop_bound(cfg, p.tol);
    r["initial_loops"] = sr.initial_loops;
    r["final_loops"] = sr.final_loops;
    r["loop_bound"] = bound;
    r["replacements"] = sr.replacements;
    post = sr.final_loops <= bound;
    result = sr.result;
  } else {
    const ReduceResult rr = reduce_all(wd.web, *s, cfg, p.tol);
    const int degree = max_internal_degree(rr.result.web);
    r["reductions"] = rr.reductions;
    r["max_internal_degree"] = degree;
    post = degree <= (cfg.dimension() == 2 ? 3 : 4);
    result = rr.result;
  }
  post = post && supports(result.web, result.stress, cfg, p.tol);
  r["postconditions"] = post;
  if (!post) return {kExitNegative, r, "simplified web failed its postconditions"};
  return emit_web(WebDocument::from(result), r, opt, out);
}

Outcome cmd_cone(const Options& opt, std::ostream& out) {
  std::vector<LoadedProblem> probs;
  for (const auto& f : opt.files) probs.push_back(load_problem(f, opt));
  const Mat& x = probs.front().doc.positions;
  std::vector<Mat> rays;
  for (const auto& p : probs) {
    if (p.doc.positions.rows() != x.rows() || p.doc.positions.cols() != x.cols() || p.doc.positions != x) {
      throw InvalidInput("cone synthesis needs every problem to share the same terminal positions");
    }
    rays.push_back(p.doc.forces);
  }
  const Tolerances& tol = probs.front().tol;
  const ConeWeb cw = cone_synthesis(x, rays, opt.seed, tol);
  StressState total = StressState::Zero(cw.web.edge_count());
  Mat load = Mat::Zero(x.rows(), x.cols());
  json per_ray = json::array();
  for (std::size_t k = 0; k < cw.ray_stress.size(); ++k) {
    total += cw.ray_stress[k];
    load += cw.rays[k];
    per_ray.push_back(vec_json(cw.ray_stress[k]));
  }
  const TerminalConfig cfg(x, load, tol);
  const bool ok = supports(cw.web, total, cfg, tol);
  json r = {{"rays", rays.size()},
            {"nodes", cw.web.node_count()},
            {"edges", cw.web.edge_count()},
            {"ray_stress", per_ray},
            {"supports_sum", ok}};
  if (!ok) return {kExitNegative, r, "synthesized web does not support the summed loading"};
  return emit_web(WebDocument::from(StressedWeb{cw.web, total}), r, opt, out);
}

Outcome cmd_render(const Options& opt, std::ostream& out) {
  const WebDocument wd = load_web(opt.web_path);
  Mat forces;
  if (!opt.problem_path.empty()) {
    const LoadedProblem p = load_problem(opt.problem_path, opt);
    if (p.doc.dimension != wd.dimension) throw InvalidInput("web and problem dimensions differ");
    forces = p.doc.forces;
  }
  const StressState s = wd.has_stress() ? wd.stress() : StressState();
  const std::string svg = render_svg(wd.web, s, forces, parse_projection(opt.project));
  if (opt.out_path.empty()) {
    out << svg;
    return {kExitOk, nullptr, {}};
  }
  write_text_file(opt.out_path, svg);
  return {kExitOk, {{"out", opt.out_path}}, {}};
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wire webs under tension: admissibility, construction, simplification, verification.",
               "tensionweb"};
  app.require_subcommand(1);
  Options opt;

  auto tol_flag = [&](CLI::App* s) {
    s->add_option("--tol", opt.tol, "Overrides the feasibility and equilibrium tolerances")
        ->check(CLI::PositiveNumber);
  };
  auto jobs_flag = [&](CLI::App* s) {
    s->add_option("--jobs", opt.jobs, "Problem files processed concurrently")->check(CLI::PositiveNumber);
  };
  auto seed_flag = [&](CLI::App* s) { s->add_option("--seed", opt.seed, "Seed for randomized steps"); };
  auto out_flag = [&](CLI::App* s) { s->add_option("--out", opt.out_path, "Output file"); };

  auto* check = app.add_subcommand("check", "Decide whether loadings can be supported");
  check->add_option("problems", opt.files, "Problem documents")->required();
  check->add_flag("--stuck", opt.stuck, "Also classify stuckness");
  tol_flag(check);
  jobs_flag(check);

  auto* build = app.add_subcommand("build", "Construct a supporting web");
  build->add_option("problem", opt.problem_path, "Problem document")->required();
  build->add_option("--mode", opt.mode)->required()->check(CLI::IsMember({"pairwise", "uniloadable"}));
  out_flag(build);
  seed_flag(build);
  tol_flag(build);

  auto* verify = app.add_subcommand("verify", "Check a web against a problem");
  verify->add_option("web", opt.web_path, "Web document")->required();
  verify->add_option("problem", opt.problem_path, "Problem document")->required();
  verify->add_option("--mode", opt.mode, "plain or uniloadable")
      ->default_val("plain")
      ->check(CLI::IsMember({"plain", "uniloadable"}));
  tol_flag(verify);

  auto* simplify = app.add_subcommand("simplify", "Remove loops or reduce junction degrees");
  simplify->add_option("web", opt.web_path, "Web document")->required();
  simplify->add_option("problem", opt.problem_path, "Problem document")->required();
  simplify->add_option("--mode", opt.mode)->required()->check(CLI::IsMember({"loops", "junctions"}));
  out_flag(simplify);
  tol_flag(simplify);

  auto* michell = app.add_subcommand("michell", "Wire cost against load work");
  michell->add_option("web", opt.web_path, "Web document")->required();
  michell->add_option("problem", opt.problem_path, "Problem document")->required();
  tol_flag(michell);

  auto* stuck = app.add_subcommand("stuck", "Classify loadings as stuck or unstuck");
  stuck->add_option("problems", opt.files, "Problem documents")->required();
  tol_flag(stuck);
  jobs_flag(stuck);

  auto* cone = app.add_subcommand("cone-synth", "Superpose uniloadable webs, one per problem loading");
  cone->add_option("problems", opt.files, "Problem documents sharing terminal positions")->required();
  out_flag(cone);
  seed_flag(cone);
  tol_flag(cone);

  auto* render = app.add_subcommand("render", "Draw a web as SVG");
  render->add_option("web", opt.web_path, "Web document")->required();
  render->add_option("problem", opt.problem_path, "Adds force arrows at terminals");
  render->add_option("--project", opt.project, "xy, xz, yz (3D webs)")
      ->check(CLI::IsMember({"none", "xy", "xz", "yz"}));
  out_flag(render);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  if (check->parsed()) return run_batch(opt, [&](const std::string& f) { return check_one(f, opt); }, out, err);
  if (stuck->parsed()) return run_batch(opt, [&](const std::string& f) { return stuck_one(f, opt); }, out, err);

  std::function<Outcome()> fn;
  if (build->parsed()) fn = [&] { return cmd_build(opt, out); };
  if (verify->parsed()) fn = [&] { return cmd_verify(opt); };
  if (simplify->parsed()) fn = [&] { return cmd_simplify(opt, out); };
  if (michell->parsed()) fn = [&] { return cmd_michell(opt); };
  if (cone->parsed()) fn = [&] { return cmd_cone(opt, out); };
  if (render->parsed()) fn = [&] { return cmd_render(opt, out); };
  std::string label = opt.web_path.empty() ? opt.problem_path : opt.web_path;
  if (!opt.files.empty()) label = opt.files.front();
  return emit({guarded(fn, label)}, false, out, err);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace tensionweb
