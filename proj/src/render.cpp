#include "tensionweb/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace tensionweb {

namespace {

constexpr double kCanvas = 600.0;
constexpr double kMargin = 40.0;
constexpr double kMinWidth = 0.75;
constexpr double kMaxWidth = 6.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

std::pair<int, int> axes(int d, Projection p) {
  if (d == 2) {
    if (p != Projection::none && p != Projection::xy) throw InvalidInput("2D webs only support the xy projection");
    return {0, 1};
  }
  switch (p) {
    case Projection::xy: return {0, 1};
    case Projection::xz: return {0, 2};
    case Projection::yz: return {1, 2};
    case Projection::none: break;
  }
  throw InvalidInput("3D webs need a projection (xy, xz or yz)");
}

}  // namespace

Projection parse_projection(const std::string& name) {
  if (name == "none") return Projection::none;
  if (name == "xy") return Projection::xy;
  if (name == "xz") return Projection::xz;
  if (name == "yz") return Projection::yz;
  throw InvalidInput("unknown projection \"" + name + "\"");
}

std::string render_svg(const Web& web, const StressState& stress, const Mat& forces, Projection projection) {
  const int d = web.dimension();
  if (d != 2 && d != 3) throw InvalidInput("web dimension must be 2 or 3");
  const auto [ax, ay] = axes(d, projection);
  if (stress.size() != 0 && stress.size() != web.edge_count()) {
    throw InvalidInput("stress size does not match the edge count");
  }
  if (forces.size() != 0 && forces.rows() != d) throw InvalidInput("force dimension does not match the web");

  const int m = web.node_count();
  Mat p(2, m);
  for (int k = 0; k < m; ++k) p.col(k) << web.nodes(ax, k), web.nodes(ay, k);

  // Arrows are drawn at 20% of the layout extent for the largest force.
  double extent = 1.0;
  double fmax = 0.0;
  if (m > 0) {
    extent = std::max((p.rowwise().maxCoeff() - p.rowwise().minCoeff()).maxCoeff(), 1e-12);
  }
  std::vector<int> loaded;
  if (forces.size() != 0) {
    for (int k = 0; k < m; ++k) {
      const int r = web.role[k];
      if (r == kInternal || r >= forces.cols()) continue;
      Vec f(2);
      f << forces(ax, r), forces(ay, r);
      fmax = std::max(fmax, f.norm());
      loaded.push_back(k);
    }
  }
  const double arrow_scale = fmax > 0.0 ? 0.2 * extent / fmax : 0.0;
  Mat heads(2, m);
  heads.setZero();
  for (int k : loaded) {
    const int r = web.role[k];
    Vec f(2);
    f << forces(ax, r), forces(ay, r);
    heads.col(k) = p.col(k) + arrow_scale * f;
  }

  Vec lo = Vec::Zero(2), hi = Vec::Ones(2);
  if (m > 0) {
    lo = p.rowwise().minCoeff();
    hi = p.rowwise().maxCoeff();
    for (int k : loaded) {
      lo = lo.cwiseMin(heads.col(k));
      hi = hi.cwiseMax(heads.col(k));
    }
  }
  const double span = std::max((hi - lo).maxCoeff(), 1e-12);
  const double scale = (kCanvas - 2.0 * kMargin) / span;
  auto sx = [&](double x) { return kMargin + (x - lo[0]) * scale; };
  auto sy = [&](double y) { return kCanvas - kMargin - (y - lo[1]) * scale; };

  const double smax = stress.size() > 0 ? std::max(stress.cwiseAbs().maxCoeff(), 0.0) : 0.0;

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(kCanvas) << "\" height=\""
      << fmt(kCanvas) << "\" viewBox=\"0 0 " << fmt(kCanvas) << " " << fmt(kCanvas) << "\">\n"
      << "<defs>\n"
      << "<marker id=\"arrow\" markerWidth=\"8\" markerHeight=\"8\" refX=\"7\" refY=\"4\" orient=\"auto\">"
      << "<path d=\"M0,0 L8,4 L0,8 z\" fill=\"#c0392b\"/></marker>\n"
      << "</defs>\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << fmt(kCanvas) << "\" height=\"" << fmt(kCanvas) << "\" fill=\"white\"/>\n";

  out << "<g id=\"wires\" stroke=\"#222222\" stroke-linecap=\"round\">\n";
  for (int e = 0; e < web.edge_count(); ++e) {
    const Edge& ed = web.edges[e];
    double w = 1.5;
    if (smax > 0.0) w = kMinWidth + (kMaxWidth - kMinWidth) * std::max(stress[e], 0.0) / smax;
    out << "<line x1=\"" << fmt(sx(p(0, ed.i))) << "\" y1=\"" << fmt(sy(p(1, ed.i))) << "\" x2=\""
        << fmt(sx(p(0, ed.j))) << "\" y2=\"" << fmt(sy(p(1, ed.j))) << "\" stroke-width=\"" << fmt(w) << "\"/>\n";
  }
  out << "</g>\n";

  out << "<g id=\"forces\" stroke=\"#c0392b\" stroke-width=\"1.5\">\n";
  for (int k : loaded) {
    if ((heads.col(k) - p.col(k)).norm() <= 1e-12 * span) continue;
    out << "<line x1=\"" << fmt(sx(p(0, k))) << "\" y1=\"" << fmt(sy(p(1, k))) << "\" x2=\"" << fmt(sx(heads(0, k)))
        << "\" y2=\"" << fmt(sy(heads(1, k))) << "\" marker-end=\"url(#arrow)\"/>\n";
  }
  out << "</g>\n";

  out << "<g id=\"nodes\">\n";
  for (int k = 0; k < m; ++k) {
    const bool terminal = !web.is_internal(k);
    out << "<circle cx=\"" << fmt(sx(p(0, k))) << "\" cy=\"" << fmt(sy(p(1, k))) << "\" r=\""
        << (terminal ? "4.000" : "2.500") << "\" fill=\"" << (terminal ? "#1f4e79" : "#888888") << "\"/>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace tensionweb
