#include <doctest.h>

#include "support/checks.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <tensionweb/admissibility.hpp>
#include <tensionweb/junctions.hpp>
#include <tensionweb/lp.hpp>
#include <tensionweb/planar.hpp>
#include <tensionweb/uniloadable.hpp>

#include <algorithm>
#include <cmath>
#include <random>

using namespace tensionweb;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

// Terminal loads carried by a stress on the web: applied = -(A sigma) at terminals.
Mat carried_loading(const Web& w, const StressState& s, int n) {
  const int d = w.dimension();
  const Vec pulls = equilibrium_matrix(w) * s;
  Mat f(d, n);
  for (int k = 0; k < n; ++k) f.col(k) = -pulls.segment(w.terminal_node(k) * d, d);
  return f;
}

// Random vertex of {sigma >= 0, internal balance, sum sigma = 1}.
std::optional<StressState> random_internal_stress(const Web& w, std::mt19937_64& rng) {
  const int d = w.dimension();
  const Mat a = equilibrium_matrix(w);
  std::vector<int> rows;
  for (int n = 0; n < w.node_count(); ++n)
    if (w.is_internal(n))
      for (int c = 0; c < d; ++c) rows.push_back(n * d + c);
  LpProblem p;
  std::normal_distribution<double> g;
  p.c = Vec(w.edge_count());
  for (int e = 0; e < w.edge_count(); ++e) p.c[e] = g(rng);
  p.A = Mat::Zero(static_cast<int>(rows.size()) + 1, w.edge_count());
  for (std::size_t r = 0; r < rows.size(); ++r) p.A.row(static_cast<int>(r)) = a.row(rows[r]);
  p.A.row(p.A.rows() - 1).setOnes();
  p.b = Vec::Zero(p.A.rows());
  p.b[p.b.size() - 1] = 1.0;
  p.G = Mat(0, w.edge_count());
  p.h = Vec(0);
  const LpResult r = solve(p);
  if (r.status != LpStatus::optimal) return std::nullopt;
  return r.x;
}

double angle_between(const Mat& a, const Mat& b) {
  const double c = flatten(a).normalized().dot(flatten(b).normalized());
  return std::acos(std::clamp(c, -1.0, 1.0));
}

// Admissible interior loading from strictly positive random pair coefficients.
TerminalConfig random_interior(int d, int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  const Mat x = fixtures::random_points(d, n, rng, 0.15);
  PairCoefficients gen{all_pairs(n), Vec(n * (n - 1) / 2)};
  for (int k = 0; k < gen.lambda.size(); ++k) gen.lambda[k] = u(rng);
  return {x, reconstruct_loading(x, gen)};
}

void check_uniloadable_web(const StressedWeb& sw, const TerminalConfig& cfg, std::mt19937_64& rng) {
  const Web& w = sw.web;
  CHECK(verify_uniloadable(w));
  CHECK(supports(w, sw.stress, cfg));
  CHECK(find_stress(w, cfg).has_value());
  CHECK(max_internal_degree(w) <= (cfg.dimension() == 2 ? 3 : 4));
  const auto deg = w.degrees();
  const auto inc = w.incident_edges();
  for (int k = 0; k < cfg.size(); ++k) {
    const int n = w.terminal_node(k);
    if (cfg.force(k).norm() == 0.0) continue;
    REQUIRE(deg[n] == 1);
    const int e = inc[n][0];
    CHECK(std::abs(sw.stress[e] - cfg.force(k).norm()) <= 1e-9);
    // The stub pulls against the applied force.
    CHECK((w.direction_from(e, n) + cfg.force(k).normalized()).norm() <= 1e-9);
  }
  CHECK_WEB(w, sw.stress, cfg);

  std::normal_distribution<double> g;
  int rejected = 0, tried = 0;
  while (tried < 100) {
    Mat noise(cfg.dimension(), cfg.size());
    for (int k = 0; k < noise.size(); ++k) noise.data()[k] = g(rng);
    const Mat other = cfg.forces() + 0.3 * cfg.forces().norm() * project_balanced(noise, cfg.positions()).normalized();
    if (angle_between(other, cfg.forces()) <= 1e-3) continue;
    ++tried;
    rejected += !find_stress(w, cfg.with_forces(other)).has_value();
  }
  CHECK(rejected == 100);
  CHECK(find_stress(w, cfg.with_forces(2.5 * cfg.forces())).has_value());
}

}  // namespace

TEST_CASE("degenerate set membership") {
  CHECK(in_degenerate_set(fixtures::square_radial()));
  CHECK_FALSE(in_degenerate_set(fixtures::figure1().config));
  Mat x(2, 4), f(2, 4);
  x << 0, 1, 0, 1, 0, 0, 1, 1;
  f << -1, 1, -1, 1, 0, 0, 0, 0;
  CHECK(in_degenerate_set(TerminalConfig(x, f)));
}

TEST_CASE("unstuck shift") {
  const TerminalConfig sq = fixtures::square_radial();
  const double eps = unstuck_shift(sq);
  CHECK(eps > 0.0);
  CHECK(eps <= 0.1 * sq.min_distance() / sq.max_force() + 1e-15);
  const TerminalConfig shifted(sq.positions() - eps * sq.forces(), sq.forces());
  CHECK(interior_margin(shifted) > 0.5 * interior_margin(sq));
  CHECK_THROWS_AS(unstuck_shift(fixtures::example3()), InvalidInput);
  CHECK_THROWS_AS(unstuck_shift(fixtures::compress_pair()), InvalidInput);
}

TEST_CASE("connected support") {
  std::mt19937_64 rng(73);
  const TerminalConfig sq = fixtures::square_radial();
  const StressedWeb sw = connected_support(sq, 0);
  CHECK(oracles::components(sw.web) == 1);
  CHECK((sw.stress.array() > 1e-9).all());
  CHECK(supports(sw.web, sw.stress, sq));
  CHECK_WEB(sw.web, sw.stress, sq);

  // Two strong parallel pairs with weak cross links.
  Mat x(2, 4);
  x << 0, 1, 0, 1, 0, 0, 1, 1;
  const Mat f = reconstruct_loading(x, PairCoefficients{all_pairs(4), (Vec(6) << 1, 0.1, 0.1, 0.1, 0.1, 1).finished()});
  const TerminalConfig grouped(x, f);
  const StressedWeb gw = connected_support(grouped, 3);
  CHECK(oracles::components(gw.web) == 1);
  CHECK((gw.stress.array() > 1e-9).all());
  CHECK(supports(gw.web, gw.stress, grouped));

  for (int t = 0; t < 10; ++t) {
    const TerminalConfig cfg = random_interior(2 + t % 2, 3 + t % 4, rng);
    const StressedWeb cw = connected_support(cfg, t);
    CHECK(oracles::components(cw.web) == 1);
    CHECK((cw.stress.array() > 1e-9).all());
    CHECK(supports(cw.web, cw.stress, cfg));
  }
  CHECK_THROWS_AS(connected_support(fixtures::example3()), InvalidInput);
}

TEST_CASE("verify uniloadable") {
  const TerminalConfig stretch = fixtures::stretch_pair();
  Web wire(2);
  wire.add_node(stretch.position(0), 0);
  wire.add_node(stretch.position(1), 1);
  wire.add_edge(0, 1);
  CHECK(verify_uniloadable(wire));

  // Diagonals through a crossing node support a two parameter family.
  Web cross(2);
  const Mat x = fixtures::square_radial().positions();
  for (int k = 0; k < 4; ++k) cross.add_node(x.col(k), k);
  cross.add_edge(0, 2);
  cross.add_edge(1, 3);
  const PlanarWeb pw = insert_crossing_nodes(cross);
  const UniloadableReport rep = uniloadable_report(pw.web, true);
  CHECK_FALSE(rep.uniloadable);
  CHECK(rep.nullity == 2);
  CHECK(rep.lp_agrees);
  const auto ranges = stress_ranges(pw.web);
  REQUIRE(ranges.size() == 4);
  for (const auto& [lo, hi] : ranges) CHECK(hi - lo > 0.1);

  // A Y junction is pinned by balance.
  Web y(2);
  for (int k = 0; k < 3; ++k) {
    const double a = 2.0 * std::acos(-1.0) * k / 3.0;
    y.add_node(v2(std::cos(a), std::sin(a)), k);
  }
  const int hub = y.add_node(Vec::Zero(2));
  for (int k = 0; k < 3; ++k) y.add_edge(k, hub);
  const UniloadableReport yr = uniloadable_report(y, true);
  CHECK(yr.uniloadable);
  CHECK(yr.cross_checked);
  CHECK(yr.lp_agrees);
  for (int e = 0; e < 3; ++e) CHECK(yr.sigma[e] == doctest::Approx(1.0 / 3.0));

  Web split(2);
  for (int k = 0; k < 4; ++k) split.add_node(x.col(k), k);
  split.add_edge(0, 1);
  split.add_edge(2, 3);
  CHECK_THROWS_AS(verify_uniloadable(split), InvalidInput);
}

TEST_CASE("uniloadable square") {
  std::mt19937_64 rng(79);
  const TerminalConfig sq = fixtures::square_radial();
  const StressedWeb sw = make_uniloadable(sq);
  check_uniloadable_web(sw, sq, rng);
  const UniloadableReport rep = uniloadable_report(sw.web, true);
  CHECK(rep.uniloadable);
  CHECK(rep.lp_agrees);
}

TEST_CASE("uniloadable symmetric triple") {
  std::mt19937_64 rng(83);
  const Mat tri = (Mat(2, 3) << 1, -0.5, -0.5, 0, std::sqrt(3.0) / 2.0, -std::sqrt(3.0) / 2.0).finished();
  const TerminalConfig cfg(tri, tri);
  const StressedWeb sw = make_uniloadable(cfg);
  check_uniloadable_web(sw, cfg, rng);
}

TEST_CASE("boundary loadings are rejected") {
  CHECK_THROWS_AS(make_uniloadable(fixtures::example3()), InvalidInput);
  CHECK_THROWS_AS(make_uniloadable(fixtures::compress_pair()), InvalidInput);
}

TEST_CASE("random uniloadable webs") {
  std::mt19937_64 rng(89);
  for (int t = 0; t < 8; ++t) {
    const TerminalConfig cfg = random_interior(2 + t % 2, 3 + t % 4, rng);
    const StressedWeb sw = make_uniloadable(cfg, t);
    check_uniloadable_web(sw, cfg, rng);
  }
}

TEST_CASE("cone synthesis with one ray") {
  const TerminalConfig sq = fixtures::square_radial();
  const ConeWeb cw = cone_synthesis(sq.positions(), {sq.forces()});
  REQUIRE(cw.ray_stress.size() == 1);
  CHECK(verify_uniloadable(cw.web));
  CHECK(supports(cw.web, cw.ray_stress[0], sq.with_forces(cw.rays[0])));
}

TEST_CASE("cone synthesis with two rays") {
  std::mt19937_64 rng(97);
  const Mat x = fixtures::square_radial().positions();
  // Second ray: radial about an off-centre hub with weights balancing it.
  Vec c(4);
  c << 0.6, 0.4, 0.4, 0.6;
  const Vec hub = x * c / c.sum();
  const RadialForms second = radial_closed_form(hub, x, c);
  const std::vector<Mat> rays{x, second.config.forces()};
  const ConeWeb cw = cone_synthesis(x, rays, 5);
  REQUIRE(cw.rays.size() == 2);
  for (int m = 0; m < 2; ++m) {
    CHECK(angle_between(cw.rays[m], rays[m]) <= 0.1);
    const TerminalConfig cfg(x, cw.rays[m]);
    CHECK(supports(cw.web, cw.ray_stress[m], cfg));
    CHECK(find_stress(cw.web, cfg).has_value());
    CHECK_WEB(cw.web, cw.ray_stress[m], cfg);
  }
  int sampled = 0;
  for (int t = 0; t < 30; ++t) {
    const auto s = random_internal_stress(cw.web, rng);
    REQUIRE(s.has_value());
    const Mat f = carried_loading(cw.web, *s, 4);
    CHECK(oracles::nonneg_decomposition(cw.rays, f, 1e-7));
    ++sampled;
  }
  CHECK(sampled == 30);
}
