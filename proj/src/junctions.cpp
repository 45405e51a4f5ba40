#include "tensionweb/junctions.hpp"

#include "geometry.hpp"
#include "tensionweb/lp.hpp"
#include "tensionweb/planar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>

namespace tensionweb {

namespace {

using V2 = Eigen::Vector2d;
using V3 = Eigen::Vector3d;

constexpr double kDirTol = 1e-9;

double total_tension(const JunctionLocal& j) {
  double s = 0.0;
  for (const auto& w : j.wires) s += w.tension;
  return s;
}

// Mutable web with removable wires.
struct Net {
  struct Wire {
    int a, b;
    double t;
    bool alive;
  };
  int d = 0;
  std::vector<Vec> pos;
  std::vector<int> role;
  std::vector<Wire> wires;

  Net(const Web& web, const StressState& stress) : d(web.dimension()) {
    for (int n = 0; n < web.node_count(); ++n) add_node(web.node(n), web.role[n]);
    for (int e = 0; e < web.edge_count(); ++e) add_wire(web.edges[e].i, web.edges[e].j, stress[e]);
  }

  int add_node(const Vec& p, int r = kInternal) {
    pos.push_back(p);
    role.push_back(r);
    return static_cast<int>(pos.size()) - 1;
  }
  void add_wire(int a, int b, double t) {
    if (a == b) throw Error("wire with coincident endpoints");
    for (auto& w : wires) {
      if (w.alive && ((w.a == a && w.b == b) || (w.a == b && w.b == a))) {
        w.t += t;
        return;
      }
    }
    wires.push_back({a, b, t, true});
  }
  std::vector<int> incident(int n) const {
    std::vector<int> out;
    for (std::size_t e = 0; e < wires.size(); ++e) {
      if (wires[e].alive && (wires[e].a == n || wires[e].b == n)) out.push_back(static_cast<int>(e));
    }
    return out;
  }
  int other(int e, int n) const { return wires[e].a == n ? wires[e].b : wires[e].a; }
  bool used(int n) const {
    if (role[n] != kInternal) return true;
    return std::any_of(wires.begin(), wires.end(), [&](const Wire& w) { return w.alive && (w.a == n || w.b == n); });
  }

  double clearance(int n) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < pos.size(); ++k) {
      if (static_cast<int>(k) == n || !used(static_cast<int>(k))) continue;
      best = std::min(best, (pos[k] - pos[n]).norm());
    }
    for (const auto& w : wires) {
      if (!w.alive || w.a == n || w.b == n) continue;
      best = std::min(best, geom::project_on_segment(pos[n], pos[w.a], pos[w.b]).dist);
    }
    return best;
  }

  JunctionLocal junction(int n, std::vector<int>* far_nodes) const {
    JunctionLocal j;
    j.center = pos[n];
    for (int e : incident(n)) {
      const int o = other(e, n);
      const Vec dv = pos[o] - pos[n];
      j.wires.push_back({pos[o], dv / dv.norm(), wires[e].t});
      if (far_nodes) far_nodes->push_back(o);
    }
    j.clearance = clearance(n);
    return j;
  }

  // Replaces the star at n by a local web whose first far.size() nodes are the far ends.
  void splice(int n, const StressedWeb& local, const std::vector<int>& far) {
    for (int e : incident(n)) wires[e].alive = false;
    const int m = static_cast<int>(far.size());
    std::vector<int> map(local.web.node_count());
    for (int k = 0; k < local.web.node_count(); ++k) {
      if (k < m) {
        map[k] = far[k];
      } else if ((Vec(local.web.node(k)) - pos[n]).norm() == 0.0) {
        map[k] = n;
      } else {
        map[k] = add_node(local.web.node(k));
      }
    }
    for (int e = 0; e < local.web.edge_count(); ++e) {
      add_wire(map[local.web.edges[e].i], map[local.web.edges[e].j], local.stress[e]);
    }
  }

  StressedWeb to_web() const {
    StressedWeb out{Web(d), StressState()};
    std::vector<int> map(pos.size(), -1);
    for (std::size_t k = 0; k < pos.size(); ++k) {
      if (used(static_cast<int>(k))) map[k] = out.web.add_node(pos[k], role[k]);
    }
    std::vector<double> sig;
    for (const auto& w : wires) {
      if (!w.alive) continue;
      out.web.add_edge(map[w.a], map[w.b]);
      sig.push_back(w.t);
    }
    out.stress = Eigen::Map<Vec>(sig.data(), static_cast<int>(sig.size()));
    return out;
  }
};

Net star_net(const JunctionLocal& j) {
  const StressedWeb s = j.star();
  return Net(s.web, s.stress);
}

std::vector<int> iota(int m) {
  std::vector<int> v(m);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// Polygonal face replacing a planar star: vertex k lies on wire k at radius[k].
struct Ring {
  std::vector<int> order;          // wires by angle
  std::vector<double> radius;      // per wire
  std::vector<double> tension;     // edge between order[q] and order[q+1]
};

Ring cleave_ring(const std::vector<V2>& dirs, const std::vector<double>& t, double circumradius) {
  const int m = static_cast<int>(dirs.size());
  Ring ring;
  ring.order = iota(m);
  std::sort(ring.order.begin(), ring.order.end(), [&](int a, int b) {
    return std::atan2(dirs[a].y(), dirs[a].x()) < std::atan2(dirs[b].y(), dirs[b].x());
  });
  for (int q = 0; q < m; ++q) {
    const V2 a = dirs[ring.order[q]], b = dirs[ring.order[(q + 1) % m]];
    if (a.dot(b) > 1.0 - kDirTol && std::abs(geom::cross(a, b)) < kDirTol) {
      throw InvalidInput("two junction wires leave in the same direction");
    }
  }
  // Sector gradients of the Airy cone; crossing wire k adds T_k R v_k.
  std::vector<V2> g(m);
  g[0] = V2::Zero();
  for (int q = 1; q < m; ++q) {
    const V2 v = dirs[ring.order[q]];
    g[q] = g[q - 1] + t[ring.order[q]] * V2(-v.y(), v.x());
  }
  V2 mean = V2::Zero();
  for (const auto& x : g) mean += x;
  mean /= m;
  for (auto& x : g) x -= mean;

  // Vertex on wire order[q] is where sectors q-1 and q reach height delta.
  std::vector<double> slope(m);
  double worst = 0.0;
  for (int q = 0; q < m; ++q) {
    slope[q] = g[q].dot(dirs[ring.order[q]]);
    if (!(slope[q] > 0.0)) throw Error("junction cone has no interior minimum");
    worst = std::max(worst, 1.0 / slope[q]);
  }
  const double delta = circumradius / worst;
  ring.radius.assign(m, 0.0);
  ring.tension.assign(m, 0.0);
  for (int q = 0; q < m; ++q) {
    ring.radius[ring.order[q]] = delta / slope[q];
    ring.tension[q] = g[q].norm();
  }
  return ring;
}

StressedWeb star_with_ring(const JunctionLocal& j, const Ring& ring) {
  const int m = j.degree();
  StressedWeb out{Web(j.dimension()), StressState()};
  for (int k = 0; k < m; ++k) out.web.add_node(j.wires[k].far_end, k);
  std::vector<int> p(m);
  for (int k = 0; k < m; ++k) p[k] = out.web.add_node(j.center + ring.radius[k] * j.wires[k].direction);
  std::vector<double> sig;
  for (int k = 0; k < m; ++k) {
    out.web.add_edge(k, p[k]);
    sig.push_back(j.wires[k].tension);
  }
  for (int q = 0; q < m; ++q) {
    if (ring.tension[q] <= 0.0) continue;
    out.web.add_edge(p[ring.order[q]], p[ring.order[(q + 1) % m]]);
    sig.push_back(ring.tension[q]);
  }
  out.stress = Eigen::Map<Vec>(sig.data(), static_cast<int>(sig.size()));
  return out;
}

// Most nearly opposite pair with v_a . v_b = -1.
std::pair<int, int> straight_pair(const JunctionLocal& j) {
  std::pair<int, int> best{-1, -1};
  double bd = -1.0 + kDirTol;
  for (int a = 0; a < j.degree(); ++a) {
    for (int b = a + 1; b < j.degree(); ++b) {
      const double c = j.wires[a].direction.dot(j.wires[b].direction);
      if (c <= bd) {
        bd = c;
        best = {a, b};
      }
    }
  }
  return best;
}

struct FiveWireFrame {
  int w4 = -1, w5 = -1;
  std::vector<int> rest;
  double alpha = 0.0;
};

FiveWireFrame five_wire_frame(const JunctionLocal& j, const Tolerances& tol) {
  if (j.dimension() != 3 || j.degree() != 5) throw InvalidInput("five-wire replacement needs a 3D junction of degree 5");
  j.validate(tol);
  auto [a, b] = straight_pair(j);
  if (a < 0) throw InvalidInput("junction has no straight-through pair");
  FiveWireFrame f;
  f.w4 = j.wires[a].tension >= j.wires[b].tension ? a : b;
  f.w5 = f.w4 == a ? b : a;
  for (int k = 0; k < 5; ++k) {
    if (k != a && k != b) f.rest.push_back(k);
  }
  Eigen::Matrix3d v;
  for (int c = 0; c < 3; ++c) v.col(c) = j.wires[f.rest[c]].direction;
  if (std::abs(v.determinant()) <= kDirTol) throw InvalidInput("remaining three wires are not independent");
  f.alpha = j.wires[f.w5].tension / j.wires[f.w4].tension;
  return f;
}

StressedWeb five_wires_build(const JunctionLocal& j, const FiveWireFrame& f, double s, double t) {
  const double t4 = j.wires[f.w4].tension;
  const double r = s / (3.0 * s - f.alpha);
  const Vec v4 = j.wires[f.w4].direction;
  StressedWeb out{Web(3), StressState()};
  for (int k = 0; k < 5; ++k) out.web.add_node(j.wires[k].far_end, k);
  std::vector<int> xi;
  for (int i : f.rest) xi.push_back(out.web.add_node(j.center + t * j.wires[i].tension * j.wires[i].direction));
  const int x4 = out.web.add_node(j.center + t * s * t4 * v4);
  const int x5 = out.web.add_node(j.center - t * r * t4 * v4);
  std::vector<double> sig;
  auto wire = [&](int a, int b, double tension) {
    out.web.add_edge(a, b);
    sig.push_back(tension);
  };
  for (int c = 0; c < 3; ++c) wire(f.rest[c], xi[c], j.wires[f.rest[c]].tension);
  wire(f.w4, x4, t4);
  wire(f.w5, x5, j.wires[f.w5].tension);
  for (int c = 0; c < 3; ++c) {
    const Vec p = out.web.node(xi[c]);
    wire(xi[c], x4, r / (t * (r + s)) * (p - Vec(out.web.node(x4))).norm());
    wire(xi[c], x5, s / (t * (r + s)) * (p - Vec(out.web.node(x5))).norm());
  }
  out.stress = Eigen::Map<Vec>(sig.data(), static_cast<int>(sig.size()));
  return out;
}

// True when nodes are separated and wires meet only at shared endpoints.
bool clean_embedding(const Web& w, double lt) {
  for (int a = 0; a < w.node_count(); ++a) {
    for (int b = a + 1; b < w.node_count(); ++b) {
      if ((w.node(a) - w.node(b)).norm() <= lt) return false;
    }
  }
  for (int e = 0; e < w.edge_count(); ++e) {
    const auto [a, b] = w.edges[e];
    for (int k = 0; k < w.node_count(); ++k) {
      if (k != a && k != b && geom::project_on_segment(w.node(k), w.node(a), w.node(b)).dist <= lt) return false;
    }
    for (int f = e + 1; f < w.edge_count(); ++f) {
      const auto [c, d] = w.edges[f];
      if (a == c || a == d || b == c || b == d) continue;
      if (geom::segment_distance(w.node(a), w.node(b), w.node(c), w.node(d)) <= lt) return false;
    }
  }
  return true;
}

double local_tol(const JunctionLocal& j, const Tolerances& tol) {
  return tol.geom * std::max(1.0, j.center.norm() + j.clearance);
}

// Strictly positive mu over 4 wires with sum mu_i v_i = 0, normalized.
std::optional<Vec> positive_kernel(const std::vector<Vec>& v) {
  Eigen::Matrix<double, 3, 4> a;
  for (int c = 0; c < 4; ++c) a.col(c) = v[c];
  Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> svd(a, Eigen::ComputeFullV);
  if (svd.singularValues()[2] <= kDirTol) return std::nullopt;
  Vec mu = svd.matrixV().col(3);
  if (mu.sum() < 0.0) mu = -mu;
  mu /= mu.norm();
  if (mu.minCoeff() <= kDirTol) return std::nullopt;
  return mu;
}

// Coplanar subset of wires with a strictly positive balancing combination.
struct PlanarSubset {
  std::vector<int> wires;
  Vec mu;
  Vec e1, e2;
};

std::optional<PlanarSubset> planar_subset(const JunctionLocal& j) {
  const int m = j.degree();
  std::optional<PlanarSubset> best;
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      const V3 va = j.wires[a].direction, vb = j.wires[b].direction;
      V3 n = va.cross(vb);
      if (n.norm() <= kDirTol) continue;
      n.normalize();
      PlanarSubset ps;
      for (int k = 0; k < m; ++k) {
        if (std::abs(n.dot(V3(j.wires[k].direction))) <= kDirTol) ps.wires.push_back(k);
      }
      const int q = static_cast<int>(ps.wires.size());
      if (q < 3 || (best && static_cast<int>(best->wires.size()) >= q)) continue;
      ps.e1 = va;
      ps.e2 = n.cross(va);
      // max eps s.t. sum mu v = 0, sum mu = 1, mu >= eps
      LpProblem lp;
      lp.c = Vec::Zero(q + 1);
      lp.c[q] = -1.0;
      lp.A = Mat::Zero(4, q + 1);
      lp.b = Vec::Zero(4);
      lp.G = Mat::Zero(q, q + 1);
      lp.h = Vec::Zero(q);
      for (int k = 0; k < q; ++k) {
        lp.A.block(0, k, 3, 1) = j.wires[ps.wires[k]].direction;
        lp.A(3, k) = 1.0;
        lp.G(k, k) = 1.0;
        lp.G(k, q) = -1.0;
      }
      lp.b[3] = 1.0;
      const LpResult r = solve(lp);
      if (r.status != LpStatus::optimal || r.x[q] <= kDirTol) continue;
      ps.mu = r.x.head(q);
      best = std::move(ps);
    }
  }
  return best;
}

bool near_other_wires(const Net& net, int center, const std::vector<int>& skip_far, const Vec& p, const Vec& q,
                      double lt) {
  for (int e : net.incident(center)) {
    const int o = net.other(e, center);
    if (std::find(skip_far.begin(), skip_far.end(), o) != skip_far.end()) continue;
    if (geom::segment_distance(net.pos[center], net.pos[o], p, q) <= lt) return true;
  }
  return false;
}

void reduce_center_3d(Net& net, int center, const Tolerances& tol, int& count) {
  for (int guard = 0; guard < 256; ++guard) {
    std::vector<int> far;
    const JunctionLocal j = net.junction(center, &far);
    const int m = j.degree();
    if (m <= 4) return;
    j.validate(tol);
    const double lt = local_tol(j, tol);
    if (m == 5 && straight_pair(j).first >= 0) {
      net.splice(center, five_wires_replace(j, tol), far);
      ++count;
      return;
    }
    const double h = j.clearance / 4.0;

    // Tetrahedral tensegrity on the best-conditioned admissible 4-subset.
    std::vector<int> pick;
    Vec mu;
    double score = 0.0;
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        for (int c = b + 1; c < m; ++c)
          for (int d = c + 1; d < m; ++d) {
            const std::vector<int> s{a, b, c, d};
            std::vector<Vec> v;
            for (int k : s) v.push_back(j.wires[k].direction);
            const auto kernel = positive_kernel(v);
            if (!kernel || kernel->minCoeff() <= score) continue;
            std::vector<int> fs;
            for (int k : s) fs.push_back(far[k]);
            bool blocked = false;
            for (int x = 0; x < 4 && !blocked; ++x)
              for (int y = x + 1; y < 4 && !blocked; ++y) {
                blocked = near_other_wires(net, center, fs, j.center + h * v[x], j.center + h * v[y], lt);
              }
            if (blocked) continue;
            pick = s;
            mu = *kernel;
            score = kernel->minCoeff();
          }

    if (!pick.empty()) {
      const int q = 4;
      double kappa = std::numeric_limits<double>::infinity();
      int arg = -1;
      for (int k = 0; k < q; ++k) {
        const double r = j.wires[pick[k]].tension / mu[k];
        if (r < kappa) {
          kappa = r;
          arg = k;
        }
      }
      Vec c = mu / h;
      const double csum = c.sum();
      std::vector<int> p(q);
      for (int k = 0; k < q; ++k) {
        for (int e : net.incident(center)) {
          if (net.other(e, center) == far[pick[k]]) net.wires[e].alive = false;
        }
        p[k] = net.add_node(j.center + h * j.wires[pick[k]].direction);
        net.add_wire(far[pick[k]], p[k], j.wires[pick[k]].tension);
        const double rest = j.wires[pick[k]].tension - kappa * mu[k];
        if (k != arg && rest > 1e-12 * j.wires[pick[k]].tension) net.add_wire(p[k], center, rest);
      }
      for (int x = 0; x < q; ++x)
        for (int y = x + 1; y < q; ++y) {
          net.add_wire(p[x], p[y], kappa * (net.pos[p[x]] - net.pos[p[y]]).norm() * c[x] * c[y] / csum);
        }
      ++count;
      for (int k = 0; k < q; ++k) {
        if (net.incident(p[k]).size() == 5) {
          std::vector<int> f2;
          const JunctionLocal j2 = net.junction(p[k], &f2);
          net.splice(p[k], five_wires_replace(j2, tol), f2);
          ++count;
        }
      }
      continue;
    }

    // Coplanar sub-star: superpose its polygonal face.
    const auto ps = planar_subset(j);
    if (!ps) throw Error("no reducible wire subset at 3D junction");
    const int q = static_cast<int>(ps->wires.size());
    double kappa = std::numeric_limits<double>::infinity();
    int arg = -1;
    for (int k = 0; k < q; ++k) {
      const double r = j.wires[ps->wires[k]].tension / ps->mu[k];
      if (r < kappa) {
        kappa = r;
        arg = k;
      }
    }
    std::vector<V2> d2;
    std::vector<double> t2;
    for (int k = 0; k < q; ++k) {
      const Vec v = j.wires[ps->wires[k]].direction;
      d2.emplace_back(v.dot(ps->e1), v.dot(ps->e2));
      d2.back().normalize();
      t2.push_back(kappa * ps->mu[k]);
    }
    const Ring ring = cleave_ring(d2, t2, h);
    std::vector<int> p(q);
    for (int k = 0; k < q; ++k) {
      const int w = ps->wires[k];
      for (int e : net.incident(center)) {
        if (net.other(e, center) == far[w]) net.wires[e].alive = false;
      }
      p[k] = net.add_node(j.center + ring.radius[k] * j.wires[w].direction);
      net.add_wire(far[w], p[k], j.wires[w].tension);
      const double rest = j.wires[w].tension - kappa * ps->mu[k];
      if (k != arg && rest > 1e-12 * j.wires[w].tension) net.add_wire(p[k], center, rest);
    }
    for (int x = 0; x < q; ++x) {
      if (ring.tension[x] > 0.0) net.add_wire(p[ring.order[x]], p[ring.order[(x + 1) % q]], ring.tension[x]);
    }
    ++count;
  }
  throw Error("3D junction reduction did not terminate");
}

}  // namespace

void JunctionLocal::validate(const Tolerances& tol) const {
  const int d = dimension();
  if (d != 2 && d != 3) throw InvalidInput("junction dimension must be 2 or 3");
  if (!(clearance > 0.0) || !std::isfinite(clearance)) throw InvalidInput("junction clearance must be positive");
  Vec sum = Vec::Zero(d);
  for (const auto& w : wires) {
    if (w.far_end.size() != d || w.direction.size() != d) throw InvalidInput("junction wire dimension mismatch");
    if (!(w.tension > 0.0)) throw InvalidInput("junction tensions must be positive");
    if (std::abs(w.direction.norm() - 1.0) > 1e-9) throw InvalidInput("junction directions must be unit vectors");
    sum += w.tension * w.direction;
  }
  if (sum.norm() > 10.0 * tol.eq * std::max(1.0, total_tension(*this))) throw InvalidInput("junction is not balanced");
}

TerminalConfig JunctionLocal::local_config(const Tolerances& tol) const {
  Mat x(dimension(), degree()), f(dimension(), degree());
  for (int k = 0; k < degree(); ++k) {
    x.col(k) = wires[k].far_end;
    f.col(k) = wires[k].tension * wires[k].direction;
  }
  return TerminalConfig(x, f, tol);
}

StressedWeb JunctionLocal::star() const {
  StressedWeb out{Web(dimension()), Vec(degree())};
  for (int k = 0; k < degree(); ++k) out.web.add_node(wires[k].far_end, k);
  const int c = out.web.add_node(center);
  for (int k = 0; k < degree(); ++k) {
    out.web.add_edge(k, c);
    out.stress[k] = wires[k].tension;
  }
  return out;
}

double clearance(const Web& web, int node) {
  return Net(web, Vec::Zero(web.edge_count())).clearance(node);
}

JunctionLocal junction_at(const Web& web, const StressState& stress, int node) {
  if (stress.size() != web.edge_count()) throw InvalidInput("stress state size does not match edge count");
  if (node < 0 || node >= web.node_count()) throw InvalidInput("node index out of range");
  return Net(web, stress).junction(node, nullptr);
}

StressedWeb reduce_junction_2d(const JunctionLocal& j, const Tolerances& tol) {
  if (j.dimension() != 2) throw InvalidInput("2D junction reduction needs a 2D junction");
  j.validate(tol);
  if (j.degree() <= 3) return j.star();
  std::vector<V2> dirs;
  std::vector<double> t;
  for (const auto& w : j.wires) {
    dirs.emplace_back(w.direction);
    t.push_back(w.tension);
  }
  return star_with_ring(j, cleave_ring(dirs, t, j.clearance / 4.0));
}

StressedWeb five_wires_replace(const JunctionLocal& j, double s, double t, const Tolerances& tol) {
  const FiveWireFrame f = five_wire_frame(j, tol);
  if (!(s > f.alpha / 3.0)) throw InvalidInput("five-wire parameter s must exceed alpha / 3");
  if (!(t > 0.0)) throw InvalidInput("five-wire parameter t must be positive");
  return five_wires_build(j, f, s, t);
}

StressedWeb five_wires_replace(const JunctionLocal& j, const Tolerances& tol) {
  const FiveWireFrame f = five_wire_frame(j, tol);
  const double s = std::max(1.0, f.alpha);
  const double r = s / (3.0 * s - f.alpha);
  const double t4 = j.wires[f.w4].tension;
  double tmax = std::max(s * t4, r * t4);
  for (int i : f.rest) tmax = std::max(tmax, j.wires[i].tension);
  double t = j.clearance / (4.0 * tmax);
  const double lt = local_tol(j, tol);
  for (int attempt = 0; attempt <= 20; ++attempt, t *= 0.5) {
    StressedWeb out = five_wires_build(j, f, s, t);
    if (clean_embedding(out.web, lt)) return out;
  }
  throw Error("five-wire replacement collides with the junction wires");
}

StressedWeb reduce_junction_3d(const JunctionLocal& j, const Tolerances& tol) {
  if (j.dimension() != 3) throw InvalidInput("3D junction reduction needs a 3D junction");
  j.validate(tol);
  if (j.degree() <= 4) return j.star();
  Net net = star_net(j);
  int count = 0;
  reduce_center_3d(net, j.degree(), tol, count);
  // Keep far ends first: they are nodes 0..M-1 of the star and stay in place.
  return net.to_web();
}

StressedWeb split_at_nodes(const StressedWeb& sw, const Tolerances& tol) {
  const Web& web = sw.web;
  if (sw.stress.size() != web.edge_count()) throw InvalidInput("stress state size does not match edge count");
  const double lt = tol.geom * std::max(1.0, coordinate_scale(web.nodes));
  Web w(web.dimension());
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
  StressedWeb out{w, StressState()};
  out.web.edges.clear();
  std::map<std::pair<int, int>, int> index;
  std::vector<double> sig;
  for (int e = 0; e < web.edge_count(); ++e) {
    const int a = node_map[web.edges[e].i], b = node_map[web.edges[e].j];
    if (a == b) continue;
    const Vec pa = w.node(a), pb = w.node(b);
    const double len = (pb - pa).norm();
    std::vector<std::pair<double, int>> cuts{{0.0, a}, {1.0, b}};
    for (int k = 0; k < w.node_count(); ++k) {
      if (k == a || k == b) continue;
      const auto pr = geom::project_on_segment(w.node(k), pa, pb);
      if (pr.dist <= lt && pr.t * len > lt && (1.0 - pr.t) * len > lt) cuts.emplace_back(pr.t, k);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const int u = cuts[c].second, v = cuts[c + 1].second;
      if (u == v) continue;
      const auto key = std::minmax(u, v);
      auto it = index.find(key);
      if (it == index.end()) {
        index.emplace(key, out.web.add_edge(u, v));
        sig.push_back(sw.stress[e]);
      } else {
        sig[it->second] += sw.stress[e];
      }
    }
  }
  out.stress = Eigen::Map<Vec>(sig.data(), static_cast<int>(sig.size()));
  return out;
}

int max_internal_degree(const Web& web) {
  const auto deg = web.degrees();
  int best = 0;
  for (int n = 0; n < web.node_count(); ++n) {
    if (web.is_internal(n)) best = std::max(best, deg[n]);
  }
  return best;
}

ReduceResult reduce_all(const Web& web, const StressState& stress, const TerminalConfig& cfg, const Tolerances& tol) {
  validate(web, &cfg, tol);
  if (stress.size() != web.edge_count()) throw InvalidInput("stress state size does not match edge count");
  if (!supports(web, stress, cfg, tol)) throw InvalidInput("stress does not support the loading");
  const int d = web.dimension();
  const double fscale = std::max(1.0, cfg.max_force());
  StressedWeb cur = prune_slack({web, stress}, 1e-3 * tol.eq * fscale);
  if (d == 2) {
    PlanarWeb pw = insert_crossing_nodes(cur.web, cur.stress, tol);
    cur = {std::move(pw.web), std::move(pw.stress)};
  } else {
    cur = split_at_nodes(cur, tol);
  }
  const int limit = d == 2 ? 3 : 4;
  Net net(cur.web, cur.stress);
  ReduceResult res;
  const int cap = 1000 + 100 * static_cast<int>(net.pos.size());
  for (int guard = 0;; ++guard) {
    if (guard > cap) throw Error("junction reduction did not terminate");
    int node = -1;
    for (std::size_t n = 0; n < net.pos.size() && node < 0; ++n) {
      if (net.role[n] == kInternal && static_cast<int>(net.incident(static_cast<int>(n)).size()) > limit) {
        node = static_cast<int>(n);
      }
    }
    if (node < 0) break;
    if (d == 2) {
      std::vector<int> far;
      const JunctionLocal j = net.junction(node, &far);
      net.splice(node, reduce_junction_2d(j, tol), far);
      ++res.reductions;
    } else {
      reduce_center_3d(net, node, tol, res.reductions);
    }
  }
  res.result = net.to_web();
  if (!supports(res.result.web, res.result.stress, cfg, tol)) throw Error("junction reduction broke equilibrium");
  return res;
}

}  // namespace tensionweb
