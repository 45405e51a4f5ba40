#pragma once

#include <tensionweb/core.hpp>
#include <tensionweb/webbuild.hpp>

#include <random>

namespace fixtures {

using tensionweb::Mat;
using tensionweb::TerminalConfig;
using tensionweb::Vec;

TerminalConfig stretch_pair();
TerminalConfig compress_pair();

/// Corners (1,1),(1,-1),(-1,-1),(-1,1) (clockwise) loaded by f = x.
TerminalConfig square_radial();

TerminalConfig example3();
TerminalConfig example4();

/// Cube vertices in table order.
Mat cube_positions();
/// Perturbed cube positions X' as printed.
Mat cube_shifted_positions();
/// Printed forces (5 significant digits, slightly unbalanced).
Mat cube_table_forces();
/// Table loading projected onto the balanced subspace at X.
TerminalConfig cube_at_x();
/// Same loading made balanced at X' and moved onto the cone boundary.
TerminalConfig cube_at_xprime();

/// Arrowhead with interior point (0.5,0), radial loading about its weighted centroid.
TerminalConfig arrowhead();

/// Five terminals around the origin with c = (53/12, 1, 1, 1, 11/3).
tensionweb::RadialForms figure1();

/// Hub at the c-weighted centroid; always interior to the admissible cone.
tensionweb::RadialForms random_radial(int d, int n, std::mt19937_64& rng);

Mat random_points(int d, int n, std::mt19937_64& rng, double min_sep = 0.05);
/// Gaussian forces projected onto the balanced subspace.
TerminalConfig random_balanced(int d, int n, std::mt19937_64& rng);
/// Convex polygon, vertices in clockwise order, with a random balanced loading.
TerminalConfig random_convex_polygon(int n, std::mt19937_64& rng);

}  // namespace fixtures
