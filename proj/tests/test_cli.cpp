#include <doctest.h>

#include "support/checks.hpp"
#include "support/fixtures.hpp"

#include <tensionweb/cli.hpp>
#include <tensionweb/io.hpp>
#include <tensionweb/junctions.hpp>
#include <tensionweb/planar.hpp>
#include <tensionweb/render.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace tensionweb;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
  json report() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "tensionweb");
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class Scratch {
 public:
  Scratch() {
    static int counter = 0;
    dir_ = fs::temp_directory_path() / ("tensionweb_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    write_text_file(path(name), text);
    return path(name);
  }
  std::string problem(const std::string& name, const TerminalConfig& cfg) const {
    return write(name, serialize(problem_from_config(cfg)));
  }

 private:
  fs::path dir_;
};

Web terminal_web(const TerminalConfig& cfg) {
  Web w(cfg.dimension());
  for (int k = 0; k < cfg.size(); ++k) w.add_node(cfg.position(k), k);
  return w;
}

// Six terminals on a hexagon pulled outward through one hub.
StressedWeb hex_star(TerminalConfig* cfg) {
  Mat x(2, 6);
  for (int k = 0; k < 6; ++k) {
    const double a = k * std::acos(-1.0) / 3.0 + 0.1;
    x.col(k) << std::cos(a), std::sin(a);
  }
  *cfg = TerminalConfig(x, x);
  StressedWeb sw{terminal_web(*cfg), StressState::Ones(6)};
  const int hub = sw.web.add_node(Vec::Zero(2));
  for (int k = 0; k < 6; ++k) sw.web.add_edge(k, hub);
  return sw;
}

ProblemDocument random_problem(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(2, 3), count(2, 8);
  std::normal_distribution<double> g(0.0, 10.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ProblemDocument doc;
  doc.dimension = dim(rng);
  const int n = count(rng);
  doc.positions = Mat(doc.dimension, n);
  doc.forces = Mat(doc.dimension, n);
  for (int k = 0; k < doc.positions.size(); ++k) {
    doc.positions.data()[k] = g(rng) * std::pow(10.0, g(rng) / 10.0);
    doc.forces.data()[k] = u(rng) < 0.1 ? 0.0 : g(rng) / 3.0;
  }
  if (u(rng) < 0.5) doc.tolerances.feas = u(rng) * 1e-6 + 1e-12;
  if (u(rng) < 0.3) doc.tolerances.geom = 1e-10;
  return doc;
}

WebDocument random_web_doc(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(2, 3), count(0, 9);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  WebDocument doc;
  doc.dimension = dim(rng);
  doc.web = Web(doc.dimension);
  const int m = count(rng);
  int terminal = 0;
  for (int k = 0; k < m; ++k) {
    Vec p(doc.dimension);
    for (int r = 0; r < doc.dimension; ++r) p[r] = g(rng) / 3.0;
    doc.web.add_node(p, u(rng) < 0.6 ? terminal++ : kInternal);
  }
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (u(rng) < 0.3) {
        doc.web.edges.push_back({i, j});
        doc.tensions.push_back(u(rng) < 0.8 ? std::optional<double>(std::exp(g(rng) * 5.0)) : std::nullopt);
      }
  return doc;
}

int exit_status(const std::string& cmd) {
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace

TEST_CASE("check a stretched wire") {
  Scratch s;
  const Run r = run({"check", s.problem("p.json", fixtures::stretch_pair())});
  CHECK(r.code == 0);
  const json rep = r.report();
  CHECK(rep["admissible"] == true);
  REQUIRE(rep["lambda"].size() == 1);
  CHECK(rep["lambda"][0]["lambda"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("check a compressed wire reports a witness") {
  Scratch s;
  const TerminalConfig cfg = fixtures::compress_pair();
  const Run r = run({"check", s.problem("p.json", cfg)});
  CHECK(r.code == 1);
  const json rep = r.report();
  CHECK(rep["admissible"] == false);
  REQUIRE(rep["witness"].size() == 2);
  double work = 0.0;
  for (int k = 0; k < 2; ++k)
    for (int r2 = 0; r2 < 2; ++r2) work += cfg.forces()(r2, k) * rep["witness"][k][r2].get<double>();
  CHECK(work < 0.0);
}

TEST_CASE("check with stuck classification of the shifted cube") {
  Scratch s;
  const Run r = run({"check", "--stuck", s.problem("cube.json", fixtures::cube_at_xprime())});
  CHECK(r.code == 0);
  const json rep = r.report();
  CHECK(rep["admissible"] == true);
  CHECK(rep["stuck"]["classification"] == "completely_stuck");
  CHECK(rep["stuck"].contains("terminal"));

  const Run plain = run({"stuck", s.problem("cube_x.json", fixtures::cube_at_x())});
  CHECK(plain.code == 0);
  CHECK(plain.report()["classification"] == "interior_unstuck");
  const Run bad = run({"stuck", s.problem("c.json", fixtures::compress_pair())});
  CHECK(bad.code == 1);
}

TEST_CASE("build and verify pairwise webs") {
  Scratch s;
  const TerminalConfig cfg = fixtures::square_radial();
  const std::string prob = s.problem("sq.json", cfg);
  const Run b = run({"build", prob, "--mode", "pairwise", "--out", s.path("web.json")});
  REQUIRE(b.code == 0);
  CHECK(b.report()["edges"] == 6);
  CHECK(b.report()["verified"] == true);

  const WebDocument wd = parse_web(read_text_file(s.path("web.json")));
  CHECK(wd.web.edge_count() == 6);
  for (int e = 0; e < 6; ++e) CHECK(*wd.tensions[e] == doctest::Approx(wd.web.length(e) / 4.0));
  CHECK_WEB(wd.web, wd.stress(), cfg);

  const Run v = run({"verify", s.path("web.json"), prob});
  CHECK(v.code == 0);
  CHECK(v.report()["pass"] == true);

  // Without --out the document goes to stdout.
  const Run inline_build = run({"build", prob, "--mode", "pairwise"});
  CHECK(inline_build.code == 0);
  CHECK(parse_web(inline_build.out) == wd);

  WebDocument tampered = wd;
  *tampered.tensions[0] *= 1.1;
  const Run t = run({"verify", s.write("t.json", serialize(tampered)), prob});
  CHECK(t.code == 1);
  const json rep = t.report();
  CHECK(rep["pass"] == false);
  CHECK(rep["checks"]["equilibrium"]["pass"] == false);
  CHECK(rep["checks"]["tensions_nonnegative"]["pass"] == true);

  // Tensions left out are recovered on the fixed geometry.
  WebDocument bare = wd;
  for (auto& tn : bare.tensions) tn.reset();
  const Run vb = run({"verify", s.write("bare.json", serialize(bare)), prob});
  CHECK(vb.code == 0);
  CHECK(vb.report()["tensions_given"] == false);
}

TEST_CASE("verify rejects a web missing a terminal") {
  Scratch s;
  const TerminalConfig cfg = fixtures::square_radial();
  const std::string prob = s.problem("sq.json", cfg);
  REQUIRE(run({"build", prob, "--mode", "pairwise", "--out", s.path("web.json")}).code == 0);
  WebDocument wd = parse_web(read_text_file(s.path("web.json")));
  wd.web.role[0] = kInternal;
  const Run r = run({"verify", s.write("m.json", serialize(wd)), prob});
  CHECK(r.code == 2);
  CHECK(r.err.find("missing") != std::string::npos);
}

TEST_CASE("build uniloadable webs") {
  Scratch s;
  const std::string prob = s.problem("sq.json", fixtures::square_radial());
  const Run b = run({"build", prob, "--mode", "uniloadable", "--seed", "3", "--out", s.path("u.json")});
  REQUIRE(b.code == 0);
  CHECK(b.report()["verify"]["checks"]["uniloadable"]["pass"] == true);
  const Run v = run({"verify", s.path("u.json"), prob, "--mode", "uniloadable"});
  CHECK(v.code == 0);

  const WebDocument wd = parse_web(read_text_file(s.path("u.json")));
  CHECK_WEB(wd.web, wd.stress(), fixtures::square_radial());

  // The same seed reproduces the same web.
  REQUIRE(run({"build", prob, "--mode", "uniloadable", "--seed", "3", "--out", s.path("u2.json")}).code == 0);
  CHECK(read_text_file(s.path("u.json")) == read_text_file(s.path("u2.json")));

  // Boundary loading: admissible but not interior.
  const Run edge = run({"build", s.problem("e3.json", fixtures::example3()), "--mode", "uniloadable"});
  CHECK(edge.code == 1);
  const Run inadmissible = run({"build", s.problem("c.json", fixtures::compress_pair()), "--mode", "pairwise"});
  CHECK(inadmissible.code == 1);
}

TEST_CASE("input errors exit with code two") {
  Scratch s;
  const Run malformed = run({"check", s.write("bad.json", "{\"schema_version\": 1,\n \"dimension\": 2,,}")});
  CHECK(malformed.code == 2);
  CHECK(malformed.err.find("line 2") != std::string::npos);

  const std::string good = serialize(problem_from_config(fixtures::stretch_pair()));
  json j = json::parse(good);
  j["schema_version"] = 2;
  CHECK(run({"check", s.write("v2.json", j.dump())}).code == 2);
  j = json::parse(good);
  j["extra"] = 1;
  CHECK(run({"check", s.write("extra.json", j.dump())}).code == 2);
  j = json::parse(good);
  j["terminals"][0]["mass"] = 1;
  CHECK(run({"check", s.write("extra2.json", j.dump())}).code == 2);
  j = json::parse(good);
  j["terminals"][1]["position"] = {0, 0};
  CHECK(run({"check", s.write("dup.json", j.dump())}).code == 2);

  CHECK(run({"check", s.path("absent.json")}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"build", s.write("ok.json", good), "--mode", "bogus"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("tolerance precedence") {
  Scratch s;
  ProblemDocument doc = problem_from_config(fixtures::stretch_pair());
  doc.tolerances.feas = 1e-7;
  const std::string prob = s.write("p.json", serialize(doc));

  CHECK(run({"check", prob}).report()["tolerances"]["feas"].get<double>() == 1e-7);
  ::setenv("TENSIONWEB_TOL", "1e-5", 1);
  json rep = run({"check", prob}).report();
  CHECK(rep["tolerances"]["feas"].get<double>() == 1e-5);
  CHECK(rep["tolerances"]["eq"].get<double>() == 1e-5);
  CHECK(rep["tolerances"]["geom"].get<double>() == 1e-9);
  rep = run({"check", prob, "--tol", "1e-3"}).report();
  CHECK(rep["tolerances"]["feas"].get<double>() == 1e-3);
  ::setenv("TENSIONWEB_TOL", "not-a-number", 1);
  CHECK(run({"check", prob}).code == 2);
  CHECK(run({"check", prob, "--tol", "1e-3"}).code == 0);
  ::unsetenv("TENSIONWEB_TOL");
  CHECK(run({"check", prob, "--tol", "-1"}).code == 2);
}

TEST_CASE("batch check keeps file order") {
  Scratch s;
  const std::string a = s.problem("a.json", fixtures::stretch_pair());
  const std::string b = s.problem("b.json", fixtures::compress_pair());
  const std::string c = s.problem("c.json", fixtures::square_radial());
  const Run r = run({"check", "--jobs", "3", a, b, c, a});
  CHECK(r.code == 1);
  const json rep = r.report();
  REQUIRE(rep.size() == 4);
  CHECK(rep[0]["file"] == a);
  CHECK(rep[1]["admissible"] == false);
  CHECK(rep[2]["admissible"] == true);
  CHECK(rep[3]["file"] == a);
  const Run serial = run({"check", a, b, c, a});
  CHECK(serial.out == r.out);
  const Run broken = run({"check", "--jobs", "2", a, s.write("bad.json", "[")});
  CHECK(broken.code == 2);
}

TEST_CASE("simplify loops and junctions") {
  Scratch s;
  const TerminalConfig arrow = fixtures::arrowhead();
  const std::string prob = s.problem("arrow.json", arrow);
  REQUIRE(run({"build", prob, "--mode", "pairwise", "--out", s.path("pw.json")}).code == 0);
  const Run r = run({"simplify", s.path("pw.json"), prob, "--mode", "loops", "--out", s.path("simple.json")});
  REQUIRE(r.code == 0);
  CHECK(r.report()["final_loops"].get<int>() <= 1);
  const WebDocument simple = parse_web(read_text_file(s.path("simple.json")));
  CHECK(minimal_loops(simple.web).size() <= 1);
  CHECK_WEB(simple.web, simple.stress(), arrow);
  CHECK(run({"verify", s.path("simple.json"), prob}).code == 0);

  TerminalConfig hex = fixtures::stretch_pair();
  const StressedWeb star = hex_star(&hex);
  const std::string hp = s.problem("hex.json", hex);
  const std::string hw = s.write("star.json", serialize(WebDocument::from(star)));
  const Run j = run({"simplify", hw, hp, "--mode", "junctions", "--out", s.path("reduced.json")});
  REQUIRE(j.code == 0);
  CHECK(j.report()["max_internal_degree"].get<int>() <= 3);
  const WebDocument reduced = parse_web(read_text_file(s.path("reduced.json")));
  CHECK(max_internal_degree(reduced.web) <= 3);
  CHECK_WEB(reduced.web, reduced.stress(), hex);

  // A tree has no loops to remove.
  const RadialForms rf = fixtures::figure1();
  const std::string fp = s.problem("fig.json", rf.config);
  const std::string fw = s.write("radial.json", serialize(WebDocument::from(rf.radial)));
  const Run tree = run({"simplify", fw, fp, "--mode", "loops"});
  REQUIRE(tree.code == 0);
  CHECK(parse_web(tree.out) == WebDocument::from(rf.radial));

  // The web must support the problem first.
  WebDocument wrong = WebDocument::from(star);
  *wrong.tensions[0] = 2.0;
  CHECK(run({"simplify", s.write("wrong.json", serialize(wrong)), hp, "--mode", "junctions"}).code == 1);
}

TEST_CASE("michell command") {
  Scratch s;
  const std::string prob = s.problem("sq.json", fixtures::square_radial());
  REQUIRE(run({"build", prob, "--mode", "pairwise", "--out", s.path("w.json")}).code == 0);
  const Run r = run({"michell", s.path("w.json"), prob});
  CHECK(r.code == 0);
  CHECK(r.report()["cost"].get<double>() == doctest::Approx(8.0));
  CHECK(r.report()["work"].get<double>() == doctest::Approx(8.0));
}

TEST_CASE("cone synthesis from problem files") {
  Scratch s;
  const TerminalConfig sq = fixtures::square_radial();
  Mat second(2, 4);
  const Vec c = (Vec(4) << 0.6, 0.4, 0.4, 0.6).finished();
  const Vec hub = (sq.positions() * c) / c.sum();
  for (int k = 0; k < 4; ++k) second.col(k) = c[k] * (sq.position(k) - hub);
  const std::string a = s.problem("a.json", sq);
  const std::string b = s.problem("b.json", sq.with_forces(second));
  const Run r = run({"cone-synth", a, b, "--out", s.path("cone.json")});
  REQUIRE(r.code == 0);
  CHECK(r.report()["rays"] == 2);
  CHECK(r.report()["supports_sum"] == true);
  const WebDocument wd = parse_web(read_text_file(s.path("cone.json")));
  CHECK(wd.has_stress());

  Mat moved = sq.positions();
  moved(0, 0) = 2.0;
  const std::string other = s.problem("o.json", TerminalConfig(moved, sq.forces()));
  CHECK(run({"cone-synth", a, other}).code == 2);
}

TEST_CASE("render is deterministic") {
  Scratch s;
  const RadialForms rf = fixtures::figure1();
  const std::string prob = s.problem("fig.json", rf.config);
  const std::string web = s.write("pw.json", serialize(WebDocument::from(rf.pairwise)));
  REQUIRE(run({"render", web, prob, "--out", s.path("a.svg")}).code == 0);
  REQUIRE(run({"render", web, prob, "--out", s.path("b.svg")}).code == 0);
  const std::string svg = read_text_file(s.path("a.svg"));
  CHECK(svg == read_text_file(s.path("b.svg")));
  CHECK(svg.find("version=\"1.1\"") != std::string::npos);
  CHECK(svg.find("marker-end") != std::string::npos);
  CHECK(run({"render", web}).out == render_svg(rf.pairwise.web, rf.pairwise.stress));

  // The command and the library call agree byte for byte.
  const std::string direct = render_svg(rf.pairwise.web, rf.pairwise.stress, rf.config.forces());
  CHECK(direct == svg);
}

TEST_CASE("render an empty web") {
  Scratch s;
  WebDocument empty;
  empty.dimension = 2;
  empty.web = Web(2);
  const Run r = run({"render", s.write("e.json", serialize(empty))});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("<svg") != std::string::npos);
  CHECK(r.out.find("</svg>") != std::string::npos);
  CHECK(r.out.find("<line") == std::string::npos);
  CHECK(r.out.find("nan") == std::string::npos);
}

TEST_CASE("render a projected cube web") {
  Scratch s;
  const TerminalConfig cube = fixtures::cube_at_x();
  const std::string prob = s.problem("cube.json", cube);
  REQUIRE(run({"build", prob, "--mode", "pairwise", "--out", s.path("w.json")}).code == 0);
  const Run xy = run({"render", s.path("w.json"), prob, "--project", "xy"});
  CHECK(xy.code == 0);
  CHECK(xy.out.find("<line") != std::string::npos);
  CHECK(run({"render", s.path("w.json"), prob, "--project", "xy"}).out == xy.out);
  CHECK(run({"render", s.path("w.json"), prob, "--project", "yz"}).out != xy.out);
  CHECK(run({"render", s.path("w.json")}).code == 2);
  CHECK(run({"render", s.path("w.json"), "--project", "zz"}).code == 2);
}

TEST_CASE("random documents round trip") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 100; ++t) {
    ProblemDocument p = random_problem(rng);
    const std::string text = serialize(p);
    const ProblemDocument back = parse_problem(text);
    CHECK(back == p);
    CHECK(serialize(back) == text);

    const WebDocument w = random_web_doc(rng);
    const std::string wt = serialize(w);
    const WebDocument wb = parse_web(wt);
    CHECK(wb == w);
    CHECK(serialize(wb) == wt);
  }
}

TEST_CASE("problem documents map to configurations") {
  const TerminalConfig cfg = fixtures::figure1().config;
  const ProblemDocument doc = parse_problem(serialize(problem_from_config(cfg)));
  CHECK(doc.config().positions() == cfg.positions());
  CHECK(doc.config().forces() == cfg.forces());
  CHECK_THROWS_AS(parse_problem("{\"schema_version\":1,\"dimension\":4,\"terminals\":[]}"), ParseError);
  CHECK_THROWS_AS(parse_web("{\"schema_version\":1,\"dimension\":2,\"nodes\":[{\"position\":[0,0],"
                            "\"role\":\"terminal:x\"}],\"edges\":[]}"),
                  ParseError);
  CHECK_THROWS_AS(parse_web("{\"schema_version\":1,\"dimension\":2,\"nodes\":[],\"edges\":[{\"i\":1,\"j\":0}]}"),
                  ParseError);
}

TEST_CASE("installed binary honours the exit code contract") {
  Scratch s;
  const std::string bin = TENSIONWEB_CLI_PATH;
  const std::string quiet = " >/dev/null 2>&1";
  CHECK(exit_status(bin + " check " + s.problem("a.json", fixtures::stretch_pair()) + quiet) == 0);
  CHECK(exit_status(bin + " check " + s.problem("b.json", fixtures::compress_pair()) + quiet) == 1);
  CHECK(exit_status(bin + " check " + s.write("c.json", "{") + quiet) == 2);
  CHECK(exit_status(bin + " nonsense" + quiet) == 2);
}
