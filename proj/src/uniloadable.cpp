#include "tensionweb/uniloadable.hpp"

#include "tensionweb/admissibility.hpp"
#include "tensionweb/junctions.hpp"
#include "tensionweb/lp.hpp"
#include "tensionweb/planar.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

namespace tensionweb {

namespace {

double force_tol(const TerminalConfig& cfg, const Tolerances& tol) { return tol.feas * std::max(1.0, cfg.max_force()); }

std::vector<int> loaded_terminals(const TerminalConfig& cfg, const Tolerances& tol) {
  std::vector<int> out;
  for (int i = 0; i < cfg.size(); ++i) {
    if (cfg.force(i).norm() > force_tol(cfg, tol)) out.push_back(i);
  }
  return out;
}

bool positions_distinct(const Mat& x, double tol) {
  for (int i = 0; i < x.cols(); ++i)
    for (int j = i + 1; j < x.cols(); ++j)
      if ((x.col(i) - x.col(j)).norm() <= tol) return false;
  return true;
}

double dual_margin(const TerminalConfig& cfg, const Tolerances& tol) {
  const DualResult r = dual_check(cfg, tol);
  return r.admissible ? r.minimum : -1.0;
}

Mat random_balanced(const Mat& positions, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Mat g(positions.rows(), positions.cols());
  for (int k = 0; k < g.size(); ++k) g.data()[k] = n01(rng);
  return project_balanced(g, positions);
}

// Components of the graph on nodes that carry at least one edge.
int component_count(const Web& web) {
  std::vector<int> parent(web.node_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : web.edges) parent[find(e.i)] = find(e.j);
  const auto deg = web.degrees();
  int count = 0;
  for (int n = 0; n < web.node_count(); ++n) {
    if (deg[n] > 0 && find(n) == n) ++count;
  }
  return count;
}

// Rows of internal nodes in the equilibrium matrix.
Mat internal_balance(const Web& web) {
  const Mat a = equilibrium_matrix(web);
  const int d = web.dimension();
  std::vector<int> rows;
  for (int n = 0; n < web.node_count(); ++n) {
    if (!web.is_internal(n)) continue;
    for (int k = 0; k < d; ++k) rows.push_back(n * d + k);
  }
  Mat out(static_cast<int>(rows.size()), a.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<int>(r)) = a.row(rows[r]);
  return out;
}

LpProblem balance_polytope(const Web& web) {
  const Mat a = internal_balance(web);
  const int e = web.edge_count();
  LpProblem lp;
  lp.A = Mat::Zero(a.rows() + 1, e);
  lp.A.topRows(a.rows()) = a;
  lp.A.row(a.rows()).setOnes();
  lp.b = Vec::Zero(a.rows() + 1);
  lp.b[a.rows()] = 1.0;
  lp.G = Mat(0, e);
  lp.h = Vec(0);
  lp.c = Vec::Zero(e);
  return lp;
}

}  // namespace

bool in_degenerate_set(const TerminalConfig& cfg, const Tolerances& tol) {
  const std::vector<int> idx = loaded_terminals(cfg, tol);
  const int n = static_cast<int>(idx.size());
  if (n > 20) throw InvalidInput("degenerate-set test is limited to 20 loaded terminals");
  const double ft = force_tol(cfg, tol);
  // Complements of zero-sum subsets also sum to zero, so |S| <= n/2 suffices.
  for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
    if (2 * std::popcount(mask) > n) continue;
    Vec s = Vec::Zero(cfg.dimension());
    for (int k = 0; k < n; ++k) {
      if (mask & (1u << k)) s += cfg.force(idx[k]);
    }
    if (s.norm() <= ft) return true;
  }
  return false;
}

double unstuck_shift(const TerminalConfig& cfg, const Tolerances& tol) {
  const double alpha = interior_margin(cfg, tol);
  if (alpha <= kInteriorThreshold) throw InvalidInput("loading is on the boundary of the admissible cone");
  const double fmax = cfg.max_force();
  double eps = 0.1 * cfg.min_distance() / fmax;
  const double target = std::isfinite(alpha) ? 0.5 * alpha : 0.0;
  for (int step = 0; step < 30; ++step, eps *= 0.5) {
    const Mat shifted = cfg.positions() - eps * cfg.forces();
    if (!positions_distinct(shifted, tol.geom)) continue;
    if (dual_margin(TerminalConfig(shifted, cfg.forces(), tol), tol) > target) return eps;
  }
  throw Error("no admissible shift found");
}

StressedWeb connected_support(const TerminalConfig& cfg, std::uint64_t seed, const Tolerances& tol) {
  const double alpha = interior_margin(cfg, tol);
  if (alpha <= kInteriorThreshold) throw InvalidInput("loading is on the boundary of the admissible cone");

  auto pairwise = [&](const TerminalConfig& c) {
    const auto lambda = farkas_decompose(c, tol);
    if (!lambda) throw Error("interior loading has no pair decomposition");
    return *lambda;
  };

  PairCoefficients lambda;
  if (!in_degenerate_set(cfg, tol)) {
    lambda = pairwise(cfg);
  } else {
    std::mt19937_64 rng(seed);
    double size = 0.25 * (std::isfinite(alpha) ? alpha : cfg.max_force());
    bool found = false;
    for (int attempt = 0; attempt < 50 && !found; ++attempt) {
      if (attempt > 0 && attempt % 10 == 0) size *= 0.5;
      Mat g = random_balanced(cfg.positions(), rng);
      if (g.norm() == 0.0) continue;
      g *= size / g.norm();
      const TerminalConfig plus = cfg.with_forces(cfg.forces() + g);
      const TerminalConfig minus = cfg.with_forces(cfg.forces() - g);
      if (dual_margin(plus, tol) <= kInteriorThreshold || dual_margin(minus, tol) <= kInteriorThreshold) continue;
      if (in_degenerate_set(plus, tol) || in_degenerate_set(minus, tol)) continue;
      const PairCoefficients lp = pairwise(plus), lm = pairwise(minus);
      lambda.pairs = lp.pairs;
      lambda.lambda = 0.5 * (lp.lambda + lm.lambda);
      found = true;
    }
    if (!found) throw Error("no admissible perturbation found");
  }

  StressedWeb sw = pairwise_web(cfg, lambda, tol);
  if (component_count(sw.web) != 1) throw Error("support web is not connected");
  if (!supports(sw.web, sw.stress, cfg, tol)) throw Error("support web does not balance the loading");
  return sw;
}

StressedWeb make_uniloadable(const TerminalConfig& cfg, std::uint64_t seed, const Tolerances& tol) {
  const double eps = unstuck_shift(cfg, tol);
  const TerminalConfig shifted(cfg.positions() - eps * cfg.forces(), cfg.forces(), tol);
  const StressedWeb inner = connected_support(shifted, seed, tol);

  // Terminals at X; each loaded terminal is joined by a stub to its shifted copy.
  StressedWeb w{Web(cfg.dimension()), StressState()};
  for (int i = 0; i < cfg.size(); ++i) w.web.add_node(cfg.position(i), i);
  std::vector<int> inner_node(inner.web.node_count(), -1);
  std::vector<double> sig;
  for (int n = 0; n < inner.web.node_count(); ++n) {
    if (inner.web.is_internal(n)) {
      inner_node[n] = w.web.add_node(inner.web.node(n));
      continue;
    }
    const int i = inner.web.role[n];
    if (cfg.force(i).norm() <= force_tol(cfg, tol)) {
      inner_node[n] = i;
      continue;
    }
    inner_node[n] = w.web.add_node(inner.web.node(n));
    w.web.add_edge(i, inner_node[n]);
    sig.push_back(cfg.force(i).norm());
  }
  for (int e = 0; e < inner.web.edge_count(); ++e) {
    w.web.add_edge(inner_node[inner.web.edges[e].i], inner_node[inner.web.edges[e].j]);
    sig.push_back(inner.stress[e]);
  }
  w.stress = Eigen::Map<Vec>(sig.data(), static_cast<int>(sig.size()));
  if (!supports(w.web, w.stress, cfg, tol)) throw Error("stubbed web does not balance the loading");

  ReduceResult red = reduce_all(w.web, w.stress, cfg, tol);
  const auto deg = red.result.web.degrees();
  for (int i = 0; i < cfg.size(); ++i) {
    const int n = red.result.web.terminal_node(i);
    if (n >= 0 && deg[n] > 1) throw Error("terminal has more than one wire after reduction");
  }
  if (!verify_uniloadable(red.result.web, tol)) throw Error("pipeline output is not uniloadable");
  return std::move(red.result);
}

std::vector<std::pair<double, double>> stress_ranges(const Web& web, const Tolerances& tol) {
  const LpProblem base = balance_polytope(web);
  const int e = web.edge_count();
  LpOptions opt;
  opt.tol = 0.1 * tol.feas;
  auto bound = [&](int k, double sign) {
    LpProblem p = base;
    p.c[k] = sign;
    const LpResult r = solve(p, opt);
    if (r.status != LpStatus::optimal) return std::numeric_limits<double>::quiet_NaN();
    return sign * r.objective;
  };
  std::vector<std::pair<double, double>> out(e);
  const int workers = static_cast<int>(std::max(1u, std::min(8u, std::thread::hardware_concurrency())));
  std::vector<std::future<void>> jobs;
  for (int w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (int k = w; k < e; k += workers) out[k] = {bound(k, 1.0), bound(k, -1.0)};
    }));
  }
  for (auto& j : jobs) j.get();
  if (std::any_of(out.begin(), out.end(), [](const auto& r) { return std::isnan(r.first) || std::isnan(r.second); })) {
    return {};
  }
  return out;
}

UniloadableReport uniloadable_report(const Web& web, bool cross_check, const Tolerances& tol) {
  validate(web, nullptr, tol);
  if (web.edge_count() == 0) throw InvalidInput("web has no wires");
  if (component_count(web) != 1) throw InvalidInput("web is disconnected");
  UniloadableReport rep;
  const Mat a = internal_balance(web);
  const int e = web.edge_count();
  Vec kernel;
  if (a.rows() == 0) {
    rep.nullity = e;
    if (e == 1) kernel = Vec::Ones(1);
  } else {
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    const Vec s = svd.singularValues();
    const double cut = 1e-9 * std::max(1.0, s.size() ? s[0] : 0.0);
    int rank = 0;
    for (int k = 0; k < s.size(); ++k) rank += s[k] > cut;
    rep.nullity = e - rank;
    if (rep.nullity == 1) kernel = svd.matrixV().col(e - 1);
  }

  if (rep.nullity == 1) {
    if (kernel.sum() < 0.0) kernel = -kernel;
    if (std::abs(kernel.sum()) > 0.0) {
      rep.sigma = kernel / kernel.sum();
      rep.uniloadable = rep.sigma.minCoeff() > tol.feas;
    }
  }
  if (rep.nullity != 1 || cross_check) {
    const auto ranges = stress_ranges(web, tol);
    bool unique = !ranges.empty();
    Vec mid(e);
    for (int k = 0; k < e && unique; ++k) {
      unique = ranges[k].second - ranges[k].first <= tol.feas;
      mid[k] = 0.5 * (ranges[k].first + ranges[k].second);
    }
    const bool lp_result = unique && mid.minCoeff() > tol.feas;
    if (rep.nullity == 1) {
      rep.cross_checked = true;
      rep.lp_agrees = lp_result == rep.uniloadable;
    } else {
      rep.uniloadable = lp_result;
      if (unique) rep.sigma = mid;
    }
  }
  return rep;
}

bool verify_uniloadable(const Web& web, const Tolerances& tol) { return uniloadable_report(web, false, tol).uniloadable; }

ConeWeb cone_synthesis(const Mat& positions, const std::vector<Mat>& rays, std::uint64_t seed, const Tolerances& tol) {
  if (rays.empty()) throw InvalidInput("at least one ray is required");
  const int d = static_cast<int>(positions.rows());
  const int n = static_cast<int>(positions.cols());
  std::vector<TerminalConfig> cfgs;
  for (const auto& r : rays) {
    cfgs.emplace_back(positions, r, tol);
    const double m = interior_margin(cfgs.back(), tol);
    if (m <= kInteriorThreshold) throw InvalidInput("ray is not interior to the admissible cone");
  }

  // Terminal forces of distinct rays must not be collinear.
  std::mt19937_64 rng(seed);
  auto collinear = [&](const Vec& a, const Vec& b) {
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) return false;
    return std::abs(a.dot(b)) / (na * nb) >= 1.0 - 1e-9;
  };
  auto clash = [&] {
    for (std::size_t p = 0; p < cfgs.size(); ++p)
      for (std::size_t q = p + 1; q < cfgs.size(); ++q)
        for (int i = 0; i < n; ++i)
          if (collinear(cfgs[p].force(i), cfgs[q].force(i))) return std::make_pair(static_cast<int>(q), i);
    return std::make_pair(-1, -1);
  };
  for (int attempt = 0;; ++attempt) {
    const auto [q, i] = clash();
    if (q < 0) break;
    if (attempt >= 100) throw Error("could not separate collinear ray forces");
    const double m = interior_margin(cfgs[q], tol);
    Mat g = random_balanced(positions, rng);
    g *= 0.25 * std::min(m, cfgs[q].max_force()) / std::max(g.norm(), 1e-300);
    const TerminalConfig trial = cfgs[q].with_forces(cfgs[q].forces() + g);
    if (dual_margin(trial, tol) > kInteriorThreshold) cfgs[q] = trial;
  }

  ConeWeb out;
  Web all(d);
  for (int i = 0; i < n; ++i) all.add_node(positions.col(i), i);
  std::vector<std::pair<int, double>> edge_src;
  for (std::size_t m = 0; m < cfgs.size(); ++m) {
    const StressedWeb w = make_uniloadable(cfgs[m], seed + m, tol);
    out.rays.push_back(cfgs[m].forces());
    std::vector<int> map(w.web.node_count());
    for (int k = 0; k < w.web.node_count(); ++k) {
      map[k] = w.web.is_internal(k) ? all.add_node(w.web.node(k)) : w.web.role[k];
    }
    for (int e = 0; e < w.web.edge_count(); ++e) {
      all.add_edge(map[w.web.edges[e].i], map[w.web.edges[e].j]);
      edge_src.emplace_back(static_cast<int>(m), w.stress[e]);
    }
  }

  const int rays_n = static_cast<int>(cfgs.size());
  if (d == 2) {
    const PlanarWeb pw = insert_crossing_nodes(all, Vec::Zero(all.edge_count()), tol);
    out.web = pw.web;
    for (int m = 0; m < rays_n; ++m) {
      StressState s = StressState::Zero(out.web.edge_count());
      for (int e = 0; e < out.web.edge_count(); ++e) {
        for (int src : pw.origin[e]) {
          if (edge_src[src].first == m) s[e] += edge_src[src].second;
        }
      }
      out.ray_stress.push_back(std::move(s));
    }
  } else {
    // Generic 3D superposition: wires of different component webs do not meet.
    out.web = all;
    for (int m = 0; m < rays_n; ++m) {
      StressState s = StressState::Zero(all.edge_count());
      for (int e = 0; e < all.edge_count(); ++e) {
        if (edge_src[e].first == m) s[e] = edge_src[e].second;
      }
      out.ray_stress.push_back(std::move(s));
    }
  }
  for (int m = 0; m < rays_n; ++m) {
    if (!supports(out.web, out.ray_stress[m], cfgs[m], tol)) throw Error("superposed web does not support a ray");
  }
  return out;
}

}  // namespace tensionweb
