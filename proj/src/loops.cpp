#include "tensionweb/planar.hpp"

#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>

namespace tensionweb {

namespace {

using V2 = Eigen::Vector2d;

// Boundary edge labels are -(m+1) for polygon edge m; clip lines carry j >= 0.
struct Corner {
  V2 p;
  int label;  // label of the edge leaving p
  double quality = 0.0;  // sine of the angle between the lines meeting at p
};

std::vector<Corner> clip(const std::vector<Corner>& poly, const V2& a, double b, int label, double eps) {
  std::vector<Corner> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Corner& p = poly[i];
    const Corner& q = poly[(i + 1) % n];
    const double hp = a.dot(p.p) - b;
    const double hq = a.dot(q.p) - b;
    const bool pin = hp >= -eps;
    const bool qin = hq >= -eps;
    if (pin) {
      if (qin) {
        out.push_back(p);
      } else {
        const V2 x = p.p + (hp / (hp - hq)) * (q.p - p.p);
        out.push_back(p);
        out.push_back({x, label});
      }
    } else if (qin) {
      const V2 x = p.p + (hp / (hp - hq)) * (q.p - p.p);
      out.push_back({x, p.label});
    }
  }
  // Drop zero-length edges.
  std::vector<Corner> clean;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!clean.empty() && (clean.back().p - out[i].p).norm() <= eps) {
      clean.back().label = out[i].label;
      continue;
    }
    clean.push_back(out[i]);
  }
  while (clean.size() > 1 && (clean.back().p - clean.front().p).norm() <= eps) {
    clean.pop_back();
  }
  if (clean.size() < 3) clean.clear();
  return clean;
}

// Crease vertices of near-degenerate loops are ill-conditioned, leaving a
// small imbalance. Gauss-Newton on interior positions and tensions, with
// the loop corners fixed, removes it; kept only if tensions stay positive.
void polish(StressedWeb& w, const Mat& polygon, const Vec& tau) {
  const int m = static_cast<int>(polygon.cols());
  const int nn = w.web.node_count();
  const int ne = w.web.edge_count();
  if (ne == 0) return;
  Mat loads = Mat::Zero(2, nn);
  for (int k = 0; k < m; ++k) {
    const V2 next = polygon.col((k + 1) % m) - polygon.col(k);
    const V2 prev = polygon.col((k + m - 1) % m) - polygon.col(k);
    loads.col(k) = -(tau[k] * next.normalized() + tau[(k + m - 1) % m] * prev.normalized());
  }
  auto worst = [&](const StressedWeb& s) { return node_residuals(s.web, s.stress, loads).colwise().norm().maxCoeff(); };
  const int free = 2 * (nn - m);
  StressedWeb cur = w;
  double best = worst(cur);
  for (int it = 0; it < 8 && best > 0.0; ++it) {
    Mat jac = Mat::Zero(2 * nn, free + ne);
    for (int e = 0; e < ne; ++e) {
      const auto [i, j] = cur.web.edges[e];
      const V2 d = cur.web.node(j) - cur.web.node(i);
      const double len = d.norm();
      const V2 u = d / len;
      jac.block<2, 1>(2 * i, free + e) = u;
      jac.block<2, 1>(2 * j, free + e) = -u;
      const Eigen::Matrix2d du = cur.stress[e] * (Eigen::Matrix2d::Identity() - u * u.transpose()) / len;
      if (j >= m) {
        jac.block<2, 2>(2 * i, 2 * (j - m)) += du;
        jac.block<2, 2>(2 * j, 2 * (j - m)) -= du;
      }
      if (i >= m) {
        jac.block<2, 2>(2 * i, 2 * (i - m)) -= du;
        jac.block<2, 2>(2 * j, 2 * (i - m)) += du;
      }
    }
    const Vec r = flatten(node_residuals(cur.web, cur.stress, loads));
    const Vec step = jac.completeOrthogonalDecomposition().solve(-r);
    StressedWeb trial = cur;
    for (int k = m; k < nn; ++k) trial.web.nodes.col(k) += step.segment<2>(2 * (k - m));
    trial.stress += step.tail(ne);
    if (trial.stress.minCoeff() <= 0.0) break;
    const double res = worst(trial);
    if (!(res < best)) break;
    best = res;
    cur = std::move(trial);
  }
  w = std::move(cur);
}

// Creases of the convex Airy function max_k (g_k . x - c_k), each plane
// vanishing on its polygon side with slope tau_k across it.
StressedWeb airy_web(const Mat& polygon, const Vec& tau, double tol) {
  const int m = static_cast<int>(polygon.cols());
  const double scale = std::max(1.0, coordinate_scale(polygon));
  std::vector<V2> g(m);
  std::vector<double> c(m);
  double gmax = 0.0;
  for (int k = 0; k < m; ++k) {
    const V2 a = polygon.col(k), b = polygon.col((k + 1) % m);
    const V2 t = (b - a).normalized();
    const V2 n(t.y(), -t.x());  // outward for counter-clockwise order
    g[k] = tau[k] * n;
    c[k] = g[k].dot(a);
    gmax = std::max(gmax, g[k].norm());
  }
  const double eps = tol * scale;
  const double geps = tol * std::max(1.0, gmax);

  StressedWeb out{Web(2), StressState()};
  // Each crease vertex is found once per incident cell, from different line
  // pairs; keep the copy whose lines meet at the widest angle.
  std::vector<double> quality(m, std::numeric_limits<double>::infinity());
  for (int k = 0; k < m; ++k) out.web.add_node(polygon.col(k));
  auto node_at = [&](const V2& p, double q) {
    for (int k = 0; k < out.web.node_count(); ++k) {
      if ((V2(out.web.node(k)) - p).norm() <= 10.0 * eps) {
        if (q > quality[k]) {
          out.web.nodes.col(k) = p;
          quality[k] = q;
        }
        return k;
      }
    }
    quality.push_back(q);
    return out.web.add_node(p);
  };
  std::map<std::pair<int, int>, int> index;
  std::vector<double> sig;
  auto add_crease = [&](const Corner& p, const Corner& q, double t) {
    if (t <= geps || (p.p - q.p).norm() <= 10.0 * eps) return;
    const int a = node_at(p.p, p.quality), b = node_at(q.p, q.quality);
    if (a == b) return;
    const auto key = std::minmax(a, b);
    if (index.count(key)) return;
    index.emplace(key, out.web.add_edge(a, b));
    sig.push_back(t);
  };

  for (int k = 0; k < m; ++k) {
    std::vector<Corner> cell;
    for (int v = 0; v < m; ++v) cell.push_back({polygon.col(v), -(v + 1)});
    for (int j = 0; j < m && !cell.empty(); ++j) {
      if (j == k) continue;
      const V2 a = g[k] - g[j];
      const double b = c[k] - c[j];
      if (a.norm() <= geps) {
        // Identical planes: the lower index owns the region.
        if (std::abs(b) <= geps * scale && j < k) cell.clear();
        if (b > geps * scale) cell.clear();
        continue;
      }
      cell = clip(cell, a, b, j, eps);
    }
    const std::size_t n = cell.size();
    // Clipping accumulates rounding; recompute each corner from the two
    // lines that meet there unless they are nearly parallel.
    auto line = [&](int lab, V2& a, double& b) {
      if (lab >= 0) {
        a = g[k] - g[lab];
        b = c[k] - c[lab];
      } else {
        const int v = -lab - 1;
        const V2 t = polygon.col((v + 1) % m) - polygon.col(v);
        a = V2(t.y(), -t.x());
        b = a.dot(polygon.col(v));
      }
    };
    for (std::size_t i = 0; i < n; ++i) {
      V2 a1, a2;
      double b1, b2;
      line(cell[(i + n - 1) % n].label, a1, b1);
      line(cell[i].label, a2, b2);
      const double det = a1.x() * a2.y() - a1.y() * a2.x();
      const double q = std::abs(det) / (a1.norm() * a2.norm());
      if (!(q > 1e-12)) continue;
      const V2 x((b1 * a2.y() - b2 * a1.y()) / det, (a1.x() * b2 - a2.x() * b1) / det);
      if ((x - cell[i].p).norm() <= 10.0 * eps) {
        cell[i].p = x;
        cell[i].quality = q;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int lab = cell[i].label;
      const int other = lab >= 0 ? lab : -lab - 1;
      if (other == k) continue;
      add_crease(cell[i], cell[(i + 1) % n], (g[k] - g[other]).norm());
    }
  }
  out.stress = Eigen::Map<Vec>(sig.data(), static_cast<int>(sig.size()));
  return out;
}

}  // namespace

StressedWeb open_replacement(const Mat& polygon, const Vec& tau, double tol) {
  const int m = static_cast<int>(polygon.cols());
  if (polygon.rows() != 2 || m < 3 || tau.size() != m) throw InvalidInput("loop replacement needs a 2D polygon");

  // A straight corner carries a pull along its line, which no plane
  // envelope reproduces. Each straight chain becomes one side with the
  // least chain tension; the surplus stays on the chain segments.
  std::vector<int> kept;
  for (int k = 0; k < m; ++k) {
    const V2 in = (polygon.col(k) - polygon.col((k + m - 1) % m)).normalized();
    const V2 out = (polygon.col((k + 1) % m) - polygon.col(k)).normalized();
    if (std::abs(in.x() * out.y() - in.y() * out.x()) > 1e-12 || in.dot(out) < 0.0) kept.push_back(k);
  }
  if (kept.size() < 3) {
    kept.resize(m);
    for (int k = 0; k < m; ++k) kept[k] = k;
  }
  const int r = static_cast<int>(kept.size());
  Mat reduced(2, r);
  Vec side(r);
  std::vector<std::pair<int, double>> surplus;  // segment k, tension
  const double noise = 1e-12 * std::max(1.0, tau.maxCoeff());  // rounding between equal tensions
  for (int i = 0; i < r; ++i) {
    reduced.col(i) = polygon.col(kept[i]);
    const int end = kept[(i + 1) % r];
    double least = std::numeric_limits<double>::infinity();
    for (int k = kept[i]; k != end; k = (k + 1) % m) least = std::min(least, tau[k]);
    side[i] = least;
    for (int k = kept[i]; k != end; k = (k + 1) % m) {
      if (tau[k] - least > noise) surplus.emplace_back(k, tau[k] - least);
    }
  }

  const StressedWeb inner = airy_web(reduced, side, tol);
  StressedWeb res{Web(2), StressState()};
  for (int k = 0; k < m; ++k) res.web.add_node(polygon.col(k));
  std::vector<int> map(inner.web.node_count());
  for (int k = 0; k < inner.web.node_count(); ++k) {
    map[k] = k < r ? kept[k] : res.web.add_node(inner.web.node(k));
  }
  std::vector<double> sig;
  for (int e = 0; e < inner.web.edge_count(); ++e) {
    res.web.add_edge(map[inner.web.edges[e].i], map[inner.web.edges[e].j]);
    sig.push_back(inner.stress[e]);
  }
  for (const auto& [k, t] : surplus) {
    res.web.add_edge(k, (k + 1) % m);
    sig.push_back(t);
  }
  res.stress = Eigen::Map<Vec>(sig.data(), static_cast<int>(sig.size()));
  polish(res, polygon, tau);
  return res;
}

namespace {

int loop_count(const Web& w, const Tolerances& tol) { return static_cast<int>(minimal_loops(w, tol).size()); }

// A wire ending at a free node of degree one balances only at zero
// tension; rounding leftovers of this kind are peeled off.
StressedWeb drop_dangling(StressedWeb w) {
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<int> degree(w.web.node_count(), 0);
    for (const Edge& e : w.web.edges) {
      ++degree[e.i];
      ++degree[e.j];
    }
    for (int e = 0; e < w.web.edge_count(); ++e) {
      const auto [i, j] = w.web.edges[e];
      if ((w.web.is_internal(i) && degree[i] == 1) || (w.web.is_internal(j) && degree[j] == 1)) {
        w.stress[e] = 0.0;
        changed = true;
      }
    }
    if (changed) w = prune_slack(w, 0.0);
  }
  return w;
}

}  // namespace

SimplifyResult simplify_loops(const Web& web, const StressState& stress, const TerminalConfig& cfg,
                              const Tolerances& tol) {
  if (web.dimension() != 2) throw InvalidInput("loop simplification requires a 2D web");
  validate(web, &cfg, tol);
  if (!supports(web, stress, cfg, tol)) throw InvalidInput("stress does not support the loading");

  const double fscale = std::max(1.0, cfg.max_force());
  const StressedWeb pruned = prune_slack({web, stress}, 1e-3 * tol.eq * fscale);
  PlanarWeb pw = insert_crossing_nodes(pruned.web, pruned.stress, tol);
  StressedWeb cur{std::move(pw.web), std::move(pw.stress)};

  SimplifyResult res;
  res.initial_loops = loop_count(cur.web, tol);
  const int cap = 10 * res.initial_loops;
  int count = res.initial_loops;
  // Replaces one loop; nullopt if the splice fails its post-conditions.
  auto splice = [&](const Loop& pick, std::string& why) -> std::optional<StressedWeb> {
    const int len = static_cast<int>(pick.nodes.size());
    Mat poly(2, len);
    Vec tau(len);
    for (int k = 0; k < len; ++k) {
      poly.col(k) = cur.web.node(pick.nodes[k]);
      tau[k] = cur.stress[pick.edges[k]];
    }
    const StressedWeb rep = open_replacement(poly, tau, tol.geom);

    StressedWeb next{Web(2), StressState()};
    for (int n = 0; n < cur.web.node_count(); ++n) next.web.add_node(cur.web.node(n), cur.web.role[n]);
    std::vector<char> drop(cur.web.edge_count(), 0);
    for (int e : pick.edges) drop[e] = 1;
    std::vector<double> sig;
    for (int e = 0; e < cur.web.edge_count(); ++e) {
      if (drop[e]) continue;
      next.web.add_edge(cur.web.edges[e].i, cur.web.edges[e].j);
      sig.push_back(cur.stress[e]);
    }
    std::vector<int> map(rep.web.node_count());
    for (int k = 0; k < rep.web.node_count(); ++k) {
      map[k] = k < len ? pick.nodes[k] : next.web.add_node(rep.web.node(k));
    }
    for (int e = 0; e < rep.web.edge_count(); ++e) {
      next.web.add_edge(map[rep.web.edges[e].i], map[rep.web.edges[e].j]);
      sig.push_back(rep.stress[e]);
    }
    next.stress = Eigen::Map<Vec>(sig.data(), static_cast<int>(sig.size()));
    // Rounding-level wires and nodes left without wires are removed.
    next = prune_slack(next, 1e-3 * tol.eq * fscale);
    next = drop_dangling(std::move(next));
    // Adjacent cells may disagree on a crease vertex at rounding level.
    if (!is_plane_embedding(next.web, tol)) {
      PlanarWeb fixed = insert_crossing_nodes(next.web, next.stress, tol);
      next = {std::move(fixed.web), std::move(fixed.stress)};
    }
    if (loop_count(next.web, tol) >= count) {
      why = "loop replacement did not reduce the loop count";
      return std::nullopt;
    }
    if (!supports(next.web, next.stress, cfg, tol)) {
      why = "loop replacement broke equilibrium";
      return std::nullopt;
    }
    return next;
  };

  while (res.replacements < cap) {
    const auto loops = minimal_loops(cur.web, tol);
    std::vector<const Loop*> order;
    for (const auto& l : loops) {
      if (l.convex && l.empty) order.push_back(&l);
    }
    if (order.empty()) break;
    std::stable_sort(order.begin(), order.end(), [](const Loop* a, const Loop* b) { return a->area < b->area; });

    // Smallest area first; a sliver whose replacement is numerically
    // unusable yields to the next candidate.
    std::string first_error;
    std::optional<StressedWeb> next;
    for (const Loop* l : order) {
      std::string why;
      next = splice(*l, why);
      if (next) break;
      if (first_error.empty()) first_error = why;
    }
    if (!next) throw Error(first_error);
    count = loop_count(next->web, tol);
    cur = std::move(*next);
    ++res.replacements;
  }
  res.final_loops = count;
  res.result = std::move(cur);
  return res;
}

}  // namespace tensionweb
