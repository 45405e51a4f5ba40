#include "tensionweb/webbuild.hpp"

#include "tensionweb/lp.hpp"

#include <algorithm>
#include <cmath>

namespace tensionweb {

StressedWeb pairwise_web(const TerminalConfig& cfg, const PairCoefficients& lambda, const Tolerances& tol) {
  const int n = cfg.size();
  if (static_cast<int>(lambda.pairs.size()) != n * (n - 1) / 2 ||
      lambda.lambda.size() != static_cast<Eigen::Index>(lambda.pairs.size())) {
    throw InvalidInput("pair coefficients do not match the configuration");
  }
  if (lambda.lambda.size() > 0 && lambda.lambda.minCoeff() < -tol.feas) {
    throw InvalidInput("pair coefficients must be nonnegative");
  }
  const double err = (reconstruct_loading(cfg.positions(), lambda) - cfg.forces()).cwiseAbs().maxCoeff();
  if (err > tol.eq * std::max(1.0, cfg.max_force()) * 10.0) {
    throw InvalidInput("pair coefficients do not reproduce the loading");
  }
  StressedWeb out{Web(cfg.dimension()), StressState()};
  for (int k = 0; k < n; ++k) out.web.add_node(cfg.position(k), k);
  std::vector<double> t;
  for (std::size_t p = 0; p < lambda.pairs.size(); ++p) {
    const double l = lambda.lambda[static_cast<int>(p)];
    if (l <= tol.feas) continue;
    const auto [i, j] = lambda.pairs[p];
    out.web.add_edge(i, j);
    t.push_back(l * (cfg.position(i) - cfg.position(j)).norm());
  }
  out.stress = Eigen::Map<Vec>(t.data(), static_cast<int>(t.size()));
  return out;
}

RadialForms radial_closed_form(const Vec& x0, const Mat& terminals, const Vec& c, const Tolerances& tol) {
  const int n = static_cast<int>(terminals.cols());
  if (c.size() != n) throw InvalidInput("one coefficient per terminal is required");
  if (x0.size() != terminals.rows()) throw InvalidInput("hub dimension mismatch");
  if (c.minCoeff() <= 0.0) throw InvalidInput("radial coefficients must be positive");
  const Mat rel = terminals.colwise() - x0;
  const Mat f = rel * c.asDiagonal();
  const double fmax = std::max(1.0, f.colwise().norm().maxCoeff());
  if ((f.rowwise().sum()).norm() > tol.eq * fmax * n) {
    throw InvalidInput("radial coefficients are not balanced about the hub");
  }
  TerminalConfig cfg(terminals, f, tol);

  // Radial web; the hub is a terminal when x0 coincides with one.
  StressedWeb radial{Web(cfg.dimension()), StressState()};
  for (int k = 0; k < n; ++k) radial.web.add_node(terminals.col(k), k);
  int hub = -1;
  for (int k = 0; k < n; ++k) {
    if (rel.col(k).norm() <= tol.geom) hub = k;
  }
  std::vector<double> t;
  if (n == 2 && hub < 0) {
    // Collinear hub of degree two merges into one wire.
    radial.web.add_edge(0, 1);
    t.push_back(f.col(0).norm());
  } else {
    if (hub < 0) hub = radial.web.add_node(x0);
    for (int k = 0; k < n; ++k) {
      if (k == hub) continue;
      radial.web.add_edge(k, hub);
      t.push_back(f.col(k).norm());
    }
  }
  radial.stress = Eigen::Map<Vec>(t.data(), static_cast<int>(t.size()));

  StressedWeb pairwise{Web(cfg.dimension()), StressState()};
  for (int k = 0; k < n; ++k) pairwise.web.add_node(terminals.col(k), k);
  const double sum = c.sum();
  t.clear();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      pairwise.web.add_edge(i, j);
      t.push_back((terminals.col(i) - terminals.col(j)).norm() * c[i] * c[j] / sum);
    }
  }
  pairwise.stress = Eigen::Map<Vec>(t.data(), static_cast<int>(t.size()));
  return {std::move(cfg), std::move(radial), std::move(pairwise)};
}

Mat equilibrium_matrix(const Web& web) {
  const int d = web.dimension();
  Mat m = Mat::Zero(d * web.node_count(), web.edge_count());
  for (int e = 0; e < web.edge_count(); ++e) {
    const auto [i, j] = web.edges[e];
    const Vec u = (web.node(j) - web.node(i)).normalized();
    m.block(i * d, e, d, 1) = u;
    m.block(j * d, e, d, 1) = -u;
  }
  return m;
}

std::optional<StressState> find_stress(const Web& web, const TerminalConfig& cfg, const Tolerances& tol) {
  validate(web, &cfg, tol);
  const Vec rhs = -flatten(node_loads(web, cfg));
  if (web.edge_count() == 0) {
    if (rhs.size() == 0 || rhs.cwiseAbs().maxCoeff() <= support_threshold(cfg, tol)) return StressState();
    return std::nullopt;
  }
  LpOptions opt;
  opt.tol = 0.1 * std::min(tol.feas, tol.eq);
  const auto s = feasible_nonneg(equilibrium_matrix(web), rhs, opt);
  if (!s.lambda) return std::nullopt;
  StressState sigma = *s.lambda;
  if (!supports(web, sigma, cfg, tol)) {
    throw LpError("stress search returned a state outside the equilibrium tolerance");
  }
  return sigma;
}

MichellCost michell_cost(const Web& web, const StressState& stress, const TerminalConfig& cfg,
                         const Tolerances& tol) {
  validate(web, &cfg, tol);
  if (!supports(web, stress, cfg, tol)) throw InvalidInput("stress does not support the loading");
  MichellCost m;
  for (int e = 0; e < web.edge_count(); ++e) m.cost += stress[e] * web.length(e);
  for (int k = 0; k < cfg.size(); ++k) m.work += cfg.force(k).dot(cfg.position(k));
  m.gap = std::abs(m.cost - m.work);
  return m;
}

StressedWeb prune_slack(const StressedWeb& sw, double threshold) {
  const Web& w = sw.web;
  std::vector<int> keep_edges;
  std::vector<int> deg(w.node_count(), 0);
  for (int e = 0; e < w.edge_count(); ++e) {
    if (sw.stress[e] > threshold) {
      keep_edges.push_back(e);
      ++deg[w.edges[e].i];
      ++deg[w.edges[e].j];
    }
  }
  StressedWeb out{Web(w.dimension()), StressState()};
  std::vector<int> remap(w.node_count(), -1);
  for (int n = 0; n < w.node_count(); ++n) {
    if (!w.is_internal(n) || deg[n] > 0) remap[n] = out.web.add_node(w.node(n), w.role[n]);
  }
  out.stress.resize(static_cast<int>(keep_edges.size()));
  for (std::size_t k = 0; k < keep_edges.size(); ++k) {
    const auto& e = w.edges[keep_edges[k]];
    out.web.add_edge(remap[e.i], remap[e.j]);
    out.stress[static_cast<int>(k)] = sw.stress[keep_edges[k]];
  }
  return out;
}

}  // namespace tensionweb
