#include "support/fixtures.hpp"

#include <tensionweb/admissibility.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fixtures {

using namespace tensionweb;

namespace {

Mat cols2(std::initializer_list<std::pair<double, double>> pts) {
  Mat m(2, static_cast<int>(pts.size()));
  int k = 0;
  for (auto [x, y] : pts) m.col(k++) << x, y;
  return m;
}

}  // namespace

TerminalConfig stretch_pair() { return {cols2({{0, 0}, {1, 0}}), cols2({{-1, 0}, {1, 0}})}; }

TerminalConfig compress_pair() { return {cols2({{0, 0}, {1, 0}}), cols2({{1, 0}, {-1, 0}})}; }

TerminalConfig square_radial() {
  const Mat x = cols2({{1, 1}, {1, -1}, {-1, -1}, {-1, 1}});
  return {x, x};
}

TerminalConfig example3() {
  return {cols2({{0, 0}, {1, 1}, {1, -1}, {0.5, 0}}), cols2({{-1, 0}, {0.75, 1}, {0.75, -1}, {-0.5, 0}})};
}

TerminalConfig example4() {
  return {cols2({{0, 0}, {-0.5, 1}, {-0.5, -1}, {1, 1}}), cols2({{2, 0}, {-2, 2}, {-4, -6}, {4, 4}})};
}

Mat cube_positions() {
  Mat x(3, 8);
  x << -1, -1, -1, -1, 1, 1, 1, 1,
       -1, 1, -1, 1, -1, 1, -1, 1,
       -1, -1, 1, 1, -1, -1, 1, 1;
  return x;
}

Mat cube_shifted_positions() {
  Mat x(3, 8);
  x << -0.27473, -0.94086, -0.12837, -0.76226, 0.28777, 0.27806, -0.01231, 0.51981,
       -0.31827, 0.91949, -0.23757, 0.74617, -0.16187, -0.12953, -0.28017, 0.62495,
       -0.46693, -0.93330, 0.15689, 0.78972, -0.35258, -0.35765, 0.08708, 0.51177;
  return x;
}

Mat cube_table_forces() {
  Mat f(3, 8);
  f << -0.98151, -0.46129, -0.74581, -0.72140, 0.80474, 0.75592, 0.74581, 0.60355,
       -0.92259, 0.62796, -0.65237, 0.77022, -0.94700, 1.1827, -0.53033, 0.47140,
       -0.72140, -0.52022, 0.72140, 0.63807, -0.73151, -0.67259, 0.67259, 0.61366;
  return f;
}

TerminalConfig cube_at_x() {
  const Mat x = cube_positions();
  return {x, project_balanced(cube_table_forces(), x)};
}

TerminalConfig cube_at_xprime() {
  const Mat x = cube_shifted_positions();
  const Mat f = project_balanced(cube_table_forces(), x);
  const DualResult r = dual_check(TerminalConfig(x, f));
  // Every feasible U has sum u.(x - c) = 1, so adding mu (x - c) shifts the
  // dual minimum by exactly mu.
  const Mat centered = x.colwise() - x.rowwise().mean();
  return {x, f - r.minimum * centered};
}

TerminalConfig arrowhead() {
  const Mat x = cols2({{0, 0}, {1, 1}, {0.5, 0}, {1, -1}});
  const Vec x0 = x.rowwise().mean();
  return {x, x.colwise() - x0};
}

RadialForms figure1() {
  const Mat x = cols2({{-4, 0}, {-3, 4}, {2, 4}, {4, 3}, {4, -3}});
  Vec c(5);
  c << 53.0 / 12.0, 1, 1, 1, 11.0 / 3.0;
  return radial_closed_form(Vec::Zero(2), x, c);
}

Mat random_points(int d, int n, std::mt19937_64& rng, double min_sep) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    Mat x(d, n);
    for (int k = 0; k < x.size(); ++k) x.data()[k] = u(rng);
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = i + 1; j < n && ok; ++j) ok = (x.col(i) - x.col(j)).norm() >= min_sep;
    if (ok) return x;
  }
}

RadialForms random_radial(int d, int n, std::mt19937_64& rng) {
  const Mat x = random_points(d, n, rng, 0.1);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Vec c(n);
  for (int k = 0; k < n; ++k) c[k] = u(rng);
  const Vec x0 = x * c / c.sum();
  return radial_closed_form(x0, x, c);
}

TerminalConfig random_balanced(int d, int n, std::mt19937_64& rng) {
  const Mat x = random_points(d, n, rng);
  std::normal_distribution<double> g;
  Mat f(d, n);
  for (int k = 0; k < f.size(); ++k) f.data()[k] = g(rng);
  return {x, project_balanced(f, x)};
}

TerminalConfig random_convex_polygon(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> r(0.7, 1.3);
  for (;;) {
    std::vector<double> ang(n);
    for (auto& a : ang) a = u(rng);
    std::sort(ang.begin(), ang.end(), std::greater<>());
    Mat x(2, n);
    for (int k = 0; k < n; ++k) {
      const double rad = r(rng);
      x.col(k) << rad * std::cos(ang[k]), rad * std::sin(ang[k]);
    }
    bool convex = true;
    for (int k = 0; k < n && convex; ++k) {
      const Eigen::Vector2d a = x.col((k + n - 1) % n), b = x.col(k), c = x.col((k + 1) % n);
      const Eigen::Vector2d p = b - a, q = c - b;
      convex = p.norm() > 0.05 && p.x() * q.y() - p.y() * q.x() < -1e-3;
    }
    if (!convex) continue;
    std::normal_distribution<double> g;
    Mat f(2, n);
    for (int k = 0; k < f.size(); ++k) f.data()[k] = g(rng);
    return {x, project_balanced(f, x)};
  }
}

}  // namespace fixtures
