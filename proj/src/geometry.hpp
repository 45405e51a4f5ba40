#pragma once

#include "tensionweb/core.hpp"

#include <algorithm>
#include <cmath>

namespace tensionweb::geom {

inline double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

inline double orient(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return cross(b - a, c - a);
}

/// Parameter of the projection of p on segment [a,b] and its distance.
struct Projection {
  double t = 0.0;
  double dist = 0.0;
};

inline Projection project_on_segment(const Vec& p, const Vec& a, const Vec& b) {
  const Vec ab = b - a;
  const double len2 = ab.squaredNorm();
  Projection pr;
  pr.t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  const double tc = std::clamp(pr.t, 0.0, 1.0);
  pr.dist = (a + tc * ab - p).norm();
  return pr;
}

/// Distance between segments [a,b] and [c,d] in any dimension.
inline double segment_distance(const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
  const Vec u = b - a;
  const Vec v = d - c;
  const Vec w = a - c;
  const double uu = u.dot(u), uv = u.dot(v), vv = v.dot(v), uw = u.dot(w), vw = v.dot(w);
  const double den = uu * vv - uv * uv;
  double s = 0.0;
  double t = 0.0;
  if (den > 1e-14 * uu * vv) {
    s = std::clamp((uv * vw - vv * uw) / den, 0.0, 1.0);
  }
  t = vv > 0.0 ? std::clamp((uv * s + vw) / vv, 0.0, 1.0) : 0.0;
  s = uu > 0.0 ? std::clamp((uv * t - uw) / uu, 0.0, 1.0) : 0.0;
  double best = (a + s * u - (c + t * v)).norm();
  // Endpoint checks guard the clamped solution.
  best = std::min(best, project_on_segment(a, c, d).dist);
  best = std::min(best, project_on_segment(b, c, d).dist);
  best = std::min(best, project_on_segment(c, a, b).dist);
  best = std::min(best, project_on_segment(d, a, b).dist);
  return best;
}

}  // namespace tensionweb::geom
