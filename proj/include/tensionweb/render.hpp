#pragma once

#include "tensionweb/core.hpp"

#include <string>

namespace tensionweb {

enum class Projection { none, xy, xz, yz };

/// Parses "xy", "xz", "yz" or "none".
Projection parse_projection(const std::string& name);

/// SVG 1.1 drawing of a web. Line width grows with tension (uniform when
/// `stress` is empty); `forces` (d x N, optional) adds arrows at terminals.
/// 3D webs need a projection. Output depends only on the inputs.
std::string render_svg(const Web& web, const StressState& stress = {}, const Mat& forces = {},
                       Projection projection = Projection::none);

}  // namespace tensionweb
