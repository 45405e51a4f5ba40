#include "tensionweb/planar.hpp"

#include "geometry.hpp"
#include "tensionweb/hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace tensionweb {

namespace {

using V2 = Eigen::Vector2d;

void require_2d(const Web& web) {
  if (web.dimension() != 2) throw InvalidInput("planar operations require a 2D web");
}

double linear_tol(const Mat& nodes, const Tolerances& tol) {
  return tol.geom * std::max(1.0, coordinate_scale(nodes));
}

}  // namespace

PlanarWeb insert_crossing_nodes(const Web& web, const StressState& stress, const Tolerances& tol) {
  require_2d(web);
  const bool stressed = stress.size() > 0;
  if (stressed && stress.size() != web.edge_count()) throw InvalidInput("stress state size does not match edge count");
  const double lt = linear_tol(web.nodes, tol);

  // Coincident input nodes collapse onto the first; terminals never merge.
  Web w(2);
  std::vector<int> node_map(web.node_count());
  for (int n = 0; n < web.node_count(); ++n) {
    int found = -1;
    for (int k = 0; k < w.node_count() && found < 0; ++k) {
      if ((w.node(k) - web.node(n)).norm() <= lt) found = k;
    }
    if (found >= 0) {
      if (!web.is_internal(n) && !w.is_internal(found)) throw InvalidInput("two terminals coincide");
      if (!web.is_internal(n)) w.role[found] = web.role[n];
      node_map[n] = found;
    } else {
      node_map[n] = w.add_node(web.node(n), web.role[n]);
    }
  }
  struct Seg {
    int a, b;
    double sigma;
    int origin;
  };
  std::vector<Seg> segs;
  for (int e = 0; e < web.edge_count(); ++e) {
    const int a = node_map[web.edges[e].i];
    const int b = node_map[web.edges[e].j];
    if (a == b) continue;
    segs.push_back({a, b, stressed ? stress[e] : 0.0, e});
  }

  auto find_or_add = [&](const Vec& p) {
    for (int k = 0; k < w.node_count(); ++k) {
      if ((w.node(k) - p).norm() <= lt) return k;
    }
    return w.add_node(p);
  };

  // Proper crossings become internal nodes.
  for (std::size_t s = 0; s < segs.size(); ++s) {
    for (std::size_t r = s + 1; r < segs.size(); ++r) {
      const auto& e = segs[s];
      const auto& f = segs[r];
      if (e.a == f.a || e.a == f.b || e.b == f.a || e.b == f.b) continue;
      const V2 a = w.node(e.a), b = w.node(e.b), c = w.node(f.a), d = w.node(f.b);
      const double le = (b - a).norm(), lf = (d - c).norm();
      const double o1 = geom::orient(a, b, c) / le, o2 = geom::orient(a, b, d) / le;
      const double o3 = geom::orient(c, d, a) / lf, o4 = geom::orient(c, d, b) / lf;
      const bool split_ef = (o1 > lt && o2 < -lt) || (o1 < -lt && o2 > lt);
      const bool split_fe = (o3 > lt && o4 < -lt) || (o3 < -lt && o4 > lt);
      if (!split_ef || !split_fe) continue;
      if (std::abs(geom::cross(b - a, d - c)) <= 1e-12 * le * lf) {
        throw InvalidInput("nearly parallel overlapping wires");
      }
      const V2 p = c + (o1 / (o1 - o2)) * (d - c);
      find_or_add(p);
    }
  }

  // Split every segment at the nodes lying on its interior.
  PlanarWeb out;
  out.web = Web(2);
  for (int k = 0; k < w.node_count(); ++k) out.web.add_node(w.node(k), w.role[k]);
  std::map<std::pair<int, int>, int> index;
  std::vector<double> sig;
  auto emit = [&](int a, int b, double sigma, int origin) {
    const auto key = std::minmax(a, b);
    auto it = index.find(key);
    if (it == index.end()) {
      const int id = out.web.add_edge(a, b);
      index.emplace(key, id);
      sig.push_back(sigma);
      out.origin.push_back({origin});
    } else {
      sig[it->second] += sigma;
      auto& o = out.origin[it->second];
      if (std::find(o.begin(), o.end(), origin) == o.end()) o.push_back(origin);
    }
  };
  for (const auto& s : segs) {
    const Vec a = w.node(s.a), b = w.node(s.b);
    const double len = (b - a).norm();
    std::vector<std::pair<double, int>> cuts{{0.0, s.a}, {1.0, s.b}};
    for (int k = 0; k < w.node_count(); ++k) {
      if (k == s.a || k == s.b) continue;
      const auto pr = geom::project_on_segment(w.node(k), a, b);
      if (pr.dist <= lt && pr.t * len > lt && (1.0 - pr.t) * len > lt) cuts.emplace_back(pr.t, k);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      if (cuts[c].second != cuts[c + 1].second) emit(cuts[c].second, cuts[c + 1].second, s.sigma, s.origin);
    }
  }
  // Sort origins for reproducible output.
  for (auto& o : out.origin) std::sort(o.begin(), o.end());
  if (stressed) out.stress = Eigen::Map<Vec>(sig.data(), static_cast<int>(sig.size()));
  return out;
}

bool is_plane_embedding(const Web& web, const Tolerances& tol) {
  require_2d(web);
  const double lt = linear_tol(web.nodes, tol);
  for (int e = 0; e < web.edge_count(); ++e) {
    const auto [a, b] = web.edges[e];
    for (int k = 0; k < web.node_count(); ++k) {
      if (k == a || k == b) continue;
      if (geom::project_on_segment(web.node(k), web.node(a), web.node(b)).dist <= lt) return false;
    }
    for (int f = e + 1; f < web.edge_count(); ++f) {
      const auto [c, d] = web.edges[f];
      if (a == c || a == d || b == c || b == d) continue;
      if (geom::segment_distance(web.node(a), web.node(b), web.node(c), web.node(d)) <= lt) return false;
    }
  }
  return true;
}

std::vector<Loop> minimal_loops(const Web& web, const Tolerances& tol) {
  require_2d(web);
  if (!is_plane_embedding(web, tol)) throw InvalidInput("web is not a plane embedding; insert crossing nodes first");
  const int m = web.node_count();
  const int ne = web.edge_count();
  const double lt = linear_tol(web.nodes, tol);

  auto head = [&](int h) { return h % 2 == 0 ? web.edges[h / 2].j : web.edges[h / 2].i; };
  auto tail = [&](int h) { return h % 2 == 0 ? web.edges[h / 2].i : web.edges[h / 2].j; };

  std::vector<std::vector<int>> out(m);
  for (int h = 0; h < 2 * ne; ++h) out[tail(h)].push_back(h);
  std::vector<int> pos(2 * ne);
  for (int v = 0; v < m; ++v) {
    auto& l = out[v];
    std::sort(l.begin(), l.end(), [&](int x, int y) {
      const Vec dx = web.node(head(x)) - web.node(v);
      const Vec dy = web.node(head(y)) - web.node(v);
      return std::atan2(dx[1], dx[0]) < std::atan2(dy[1], dy[0]);
    });
    for (std::size_t k = 0; k < l.size(); ++k) pos[l[k]] = static_cast<int>(k);
  }
  auto next = [&](int h) {
    const int v = head(h);
    const int twin = h ^ 1;
    const auto& l = out[v];
    const int k = pos[twin];
    return l[(k + static_cast<int>(l.size()) - 1) % l.size()];
  };

  std::vector<char> seen(2 * ne, 0);
  std::vector<Loop> loops;
  for (int h0 = 0; h0 < 2 * ne; ++h0) {
    if (seen[h0]) continue;
    Loop loop;
    int h = h0;
    do {
      seen[h] = 1;
      loop.nodes.push_back(tail(h));
      loop.edges.push_back(h / 2);
      h = next(h);
    } while (h != h0);
    Mat poly(2, static_cast<int>(loop.nodes.size()));
    for (std::size_t k = 0; k < loop.nodes.size(); ++k) poly.col(static_cast<int>(k)) = web.node(loop.nodes[k]);
    // Wires walked on both sides (trees, dangling edges) enclose nothing.
    std::vector<int> walked = loop.edges;
    std::sort(walked.begin(), walked.end());
    double twice = 0.0;
    const int steps = static_cast<int>(loop.nodes.size());
    for (int k = 0; k < steps; ++k) {
      const int e = loop.edges[k];
      if (std::upper_bound(walked.begin(), walked.end(), e) - std::lower_bound(walked.begin(), walked.end(), e) > 1) {
        continue;
      }
      const Vec a = poly.col(k), b = poly.col((k + 1) % steps);
      twice += a[0] * b[1] - a[1] * b[0];
    }
    loop.area = 0.5 * twice;
    if (loop.area <= lt * lt) continue;

    std::vector<int> sorted = loop.nodes;
    std::sort(sorted.begin(), sorted.end());
    loop.simple = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    const int len = static_cast<int>(loop.nodes.size());
    for (int v = 0; v < m && loop.empty; ++v) {
      if (std::binary_search(sorted.begin(), sorted.end(), v)) continue;
      // Crossing-number test; plane embedding keeps v off the boundary.
      bool inside = false;
      const Vec p = web.node(v);
      for (int k = 0; k < len; ++k) {
        const Vec a = poly.col(k), b = poly.col((k + 1) % len);
        if ((a[1] > p[1]) != (b[1] > p[1])) {
          const double x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
          if (x > p[0]) inside = !inside;
        }
      }
      if (inside) loop.empty = false;
    }
    if (!loop.simple) loop.empty = false;
    loop.convex = loop.simple;
    for (int k = 0; k < len && loop.convex; ++k) {
      const V2 a = poly.col((k + len - 1) % len), b = poly.col(k), c = poly.col((k + 1) % len);
      if (geom::orient(a, b, c) < -lt * std::max((b - a).norm(), (c - b).norm())) loop.convex = false;
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

int loop_bound(const TerminalConfig& cfg, const Tolerances& tol) {
  const ConvexHull hull(cfg.positions(), tol.geom);
  int p = 0;
  for (int k = 0; k < cfg.size(); ++k) {
    if (hull.classify(cfg.position(k)) == HullSide::inside) ++p;
  }
  return p;
}

}  // namespace tensionweb
