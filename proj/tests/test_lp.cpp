#include <doctest.h>

#include "tensionweb/lp.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace tensionweb;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LpProblem make(Vec c, Mat A, Vec b, Mat G, Vec h, Vec lower = {}) {
  LpProblem p;
  p.c = std::move(c);
  p.A = std::move(A);
  p.b = std::move(b);
  p.G = std::move(G);
  p.h = std::move(h);
  p.lower = std::move(lower);
  return p;
}

Vec v1(double a) { return Vec::Constant(1, a); }
Mat m1(double a) { return Mat::Constant(1, 1, a); }

Mat gaussian(std::mt19937& rng, int r, int c) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

Vec uniform(std::mt19937& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace

TEST_CASE("single bound: min x with x >= 3") {
  const auto p = make(v1(1.0), Mat(0, 1), Vec(0), m1(1.0), v1(3.0));
  const auto r = solve(p);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.x[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.objective == doctest::Approx(3.0));
  CHECK(r.z[0] == doctest::Approx(1.0));
  CHECK(r.dual_objective == doctest::Approx(3.0));
}

TEST_CASE("contradictory bounds are infeasible with a certificate") {
  Mat G(2, 1);
  G << 1.0, -1.0;
  Vec h(2);
  h << 1.0, 0.0;
  const auto p = make(v1(0.0), Mat(0, 1), Vec(0), G, h, v1(-kInf));
  const auto r = solve(p);
  REQUIRE(r.status == LpStatus::infeasible);
  const auto chk = check_certificate(p, r);
  CHECK(chk.gap > 1e-9);
  CHECK(chk.violation <= 1e-9);
}

TEST_CASE("min -x over x >= 0 is unbounded") {
  const auto p = make(v1(-1.0), Mat(0, 1), Vec(0), Mat(0, 1), Vec(0));
  const auto r = solve(p);
  REQUIRE(r.status == LpStatus::unbounded);
  REQUIRE(r.ray.size() == 1);
  CHECK(r.ray[0] > 0.0);
}

TEST_CASE("free variables and shifted lower bounds") {
  // min x0 + x1, x0 free, x1 >= -2, x0 - x1 = 1, x0 >= -5
  Mat A(1, 2);
  A << 1.0, -1.0;
  Mat G(1, 2);
  G << 1.0, 0.0;
  Vec lower(2);
  lower << -kInf, -2.0;
  const auto p = make(Vec::Ones(2), A, v1(1.0), G, v1(-5.0), lower);
  const auto r = solve(p);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.x[0] == doctest::Approx(-1.0));
  CHECK(r.x[1] == doctest::Approx(-2.0));
  CHECK(r.objective == doctest::Approx(r.dual_objective));
}

TEST_CASE("dimension mismatch is an input error") {
  auto p = make(Vec::Ones(2), Mat::Ones(1, 3), v1(1.0), Mat(0, 2), Vec(0));
  CHECK_THROWS_AS(solve(p), InvalidInput);
}

TEST_CASE("feasible_nonneg on one-dimensional systems") {
  const auto ok = feasible_nonneg(m1(1.0), v1(2.0));
  REQUIRE(ok.lambda.has_value());
  CHECK((*ok.lambda)[0] == doctest::Approx(2.0));

  const auto bad = feasible_nonneg(m1(1.0), v1(-1.0));
  CHECK_FALSE(bad.lambda.has_value());
  REQUIRE(bad.certificate.size() == 1);
  CHECK(bad.certificate[0] < 0.0);  // A'y <= 0 and b'y > 0
}

TEST_CASE("feasible_nonneg recovers planted nonnegative solutions") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat A = gaussian(rng, 5, 8);
    Vec planted = uniform(rng, 8, 0.0, 1.0);
    planted[trial % 8] = 0.0;
    const Vec b = A * planted;
    const auto s = feasible_nonneg(A, b);
    REQUIRE(s.lambda.has_value());
    CHECK(s.lambda->minCoeff() >= 0.0);
    CHECK((A * *s.lambda - b).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + b.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("strong duality on random feasible bounded instances") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> dim(1, 8);
  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = dim(rng) + 2;
    const int ma = std::min(n - 1, dim(rng) / 2);
    const int mg = dim(rng);
    const Mat A = gaussian(rng, ma, n);
    const Mat G = gaussian(rng, mg, n);
    const Vec x0 = uniform(rng, n, 0.0, 2.0);
    const Vec b = A * x0;
    const Vec h = G * x0 - uniform(rng, mg, 0.0, 1.0);
    // Dual-feasible objective keeps the problem bounded.
    const Vec y0 = gaussian(rng, ma, 1);
    const Vec z0 = uniform(rng, mg, 0.0, 1.0);
    const Vec c = A.transpose() * y0 + G.transpose() * z0 + uniform(rng, n, 0.0, 1.0);
    const auto p = make(c, A, b, G, h);
    const auto r = solve(p);
    REQUIRE(r.status == LpStatus::optimal);
    const double scale = 1.0 + std::abs(r.objective);
    CHECK(std::abs(r.objective - r.dual_objective) <= 1e-7 * scale);
    // Primal feasibility and complementary slackness.
    if (ma > 0) CHECK((A * r.x - b).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + b.cwiseAbs().maxCoeff()));
    if (mg > 0) {
      CHECK((G * r.x - h).minCoeff() >= -1e-9 * (1.0 + h.cwiseAbs().maxCoeff()));
      CHECK(r.z.minCoeff() >= -1e-12);
      CHECK(std::abs(r.z.dot(G * r.x - h)) <= 1e-7 * scale);
    }
    CHECK(r.x.minCoeff() >= -1e-12);
    CHECK(r.reduced_costs.minCoeff() >= -1e-8);
    CHECK(std::abs(r.x.dot(r.reduced_costs)) <= 1e-7 * scale);
    ++checked;
  }
  CHECK(checked == 500);
}

TEST_CASE("feasible_nonneg and the bounded Farkas dual agree") {
  std::mt19937 rng(99);
  int infeasible = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Mat A = gaussian(rng, 4, 6);
    const Vec b = gaussian(rng, 4, 1);
    const auto s = feasible_nonneg(A, b);
    const double dual = farkas_dual_value(A, b);
    CHECK(s.lambda.has_value() == (dual >= -1e-9));
    if (!s.lambda) {
      ++infeasible;
      const Vec aty = A.transpose() * s.certificate;
      CHECK(aty.maxCoeff() <= 1e-9);
      CHECK(b.dot(s.certificate) > 1e-9);
    }
  }
  CHECK(infeasible > 0);
  CHECK(infeasible < 200);
}

TEST_CASE("exact arithmetic decides a zero optimum without tolerance") {
  // min x0 - x1 s.t. x0 - x1 >= 0, x0 + x1 = 1/3 (rounded)
  Mat A(1, 2);
  A << 1.0, 1.0;
  Mat G(1, 2);
  G << 1.0, -1.0;
  auto p = make(Vec((Vec(2) << 1.0, -1.0).finished()), A, v1(1.0 / 3.0), G, v1(0.0));
  LpOptions exact;
  exact.arithmetic = Arithmetic::exact;
  const auto re = solve(p, exact);
  REQUIRE(re.status == LpStatus::optimal);
  CHECK(re.exact);
  CHECK(re.objective_sign == 0);
  CHECK(re.objective == 0.0);

  p.h[0] = 1e-300;
  const auto tiny = solve(p, exact);
  CHECK(tiny.objective_sign == 1);
}

TEST_CASE("exact and floating solves agree on random instances") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat A = gaussian(rng, 2, 5);
    const Mat G = gaussian(rng, 3, 5);
    const Vec x0 = uniform(rng, 5, 0.0, 1.0);
    const Vec c = A.transpose() * gaussian(rng, 2, 1) + G.transpose() * uniform(rng, 3, 0.0, 1.0) +
                  uniform(rng, 5, 0.0, 1.0);
    const auto p = make(c, A, A * x0, G, G * x0 - uniform(rng, 3, 0.0, 1.0));
    LpOptions exact;
    exact.arithmetic = Arithmetic::exact;
    const auto rf = solve(p);
    const auto re = solve(p, exact);
    REQUIRE(rf.status == LpStatus::optimal);
    REQUIRE(re.status == LpStatus::optimal);
    CHECK(re.objective == doctest::Approx(rf.objective).epsilon(1e-9));
  }
}
