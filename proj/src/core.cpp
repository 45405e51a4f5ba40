#include "tensionweb/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tensionweb {

void Tolerances::validate() const {
  if (!(feas > 0.0) || !(eq > 0.0) || !(geom > 0.0)) {
    throw InvalidInput("tolerances must be strictly positive");
  }
}

namespace {

void check_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) {
    throw InvalidInput(std::string(what) + " contain non-finite entries");
  }
}

}  // namespace

TerminalConfig::TerminalConfig(Mat positions, Mat forces, const Tolerances& tol)
    : positions_(std::move(positions)), forces_(std::move(forces)), tol_(tol) {
  tol_.validate();
  const auto d = positions_.rows();
  if (d != 2 && d != 3) {
    throw InvalidInput("dimension must be 2 or 3");
  }
  if (forces_.rows() != d || forces_.cols() != positions_.cols()) {
    throw InvalidInput("positions and forces must both be d x N");
  }
  if (positions_.cols() < 2) {
    throw InvalidInput("at least two terminals are required");
  }
  check_finite(positions_, "positions");
  check_finite(forces_, "forces");
  if (min_distance() <= tol_.geom) {
    throw InvalidInput("terminal positions must be pairwise distinct");
  }
}

double TerminalConfig::max_force() const {
  return forces_.colwise().norm().maxCoeff();
}

double TerminalConfig::min_distance() const {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i) {
    for (int j = i + 1; j < size(); ++j) {
      best = std::min(best, (positions_.col(i) - positions_.col(j)).norm());
    }
  }
  return best;
}

TerminalConfig TerminalConfig::with_forces(Mat forces) const {
  return TerminalConfig(positions_, std::move(forces), tol_);
}

TerminalConfig TerminalConfig::with_positions(Mat positions) const {
  return TerminalConfig(std::move(positions), forces_, tol_);
}

int Web::add_node(const Eigen::Ref<const Vec>& p, int terminal) {
  if (nodes.rows() == 0 && nodes.cols() == 0) {
    nodes.resize(p.size(), 0);
  }
  const auto m = nodes.cols();
  nodes.conservativeResize(Eigen::NoChange, m + 1);
  nodes.col(m) = p;
  role.push_back(terminal);
  return static_cast<int>(m);
}

int Web::add_edge(int a, int b) {
  edges.push_back({std::min(a, b), std::max(a, b)});
  return static_cast<int>(edges.size()) - 1;
}

double Web::length(int e) const {
  return (nodes.col(edges[e].i) - nodes.col(edges[e].j)).norm();
}

Vec Web::direction_from(int e, int from) const {
  const int to = edges[e].i == from ? edges[e].j : edges[e].i;
  Vec v = nodes.col(to) - nodes.col(from);
  return v / v.norm();
}

int Web::terminal_node(int k) const {
  for (int n = 0; n < node_count(); ++n) {
    if (role[n] == k) return n;
  }
  throw InvalidInput("web has no node for terminal " + std::to_string(k));
}

std::vector<int> Web::degrees() const {
  std::vector<int> deg(node_count(), 0);
  for (const auto& e : edges) {
    ++deg[e.i];
    ++deg[e.j];
  }
  return deg;
}

std::vector<std::vector<int>> Web::incident_edges() const {
  std::vector<std::vector<int>> inc(node_count());
  for (int e = 0; e < edge_count(); ++e) {
    inc[edges[e].i].push_back(e);
    inc[edges[e].j].push_back(e);
  }
  return inc;
}

void validate(const Web& web, const TerminalConfig* cfg, const Tolerances& tol) {
  const int m = web.node_count();
  if (static_cast<int>(web.role.size()) != m) {
    throw InvalidInput("web role list does not match node count");
  }
  if (!web.nodes.allFinite()) {
    throw InvalidInput("web nodes contain non-finite coordinates");
  }
  std::vector<Edge> seen;
  seen.reserve(web.edges.size());
  for (const auto& e : web.edges) {
    if (e.i < 0 || e.j < 0 || e.i >= m || e.j >= m) {
      throw InvalidInput("edge endpoint out of range");
    }
    if (e.i >= e.j) {
      throw InvalidInput("edges must satisfy i < j");
    }
    if ((web.nodes.col(e.i) - web.nodes.col(e.j)).norm() <= tol.geom) {
      throw InvalidInput("zero-length edge");
    }
    seen.push_back(e);
  }
  std::sort(seen.begin(), seen.end(), [](const Edge& a, const Edge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
    throw InvalidInput("duplicate edge");
  }
  if (cfg != nullptr) {
    if (cfg->dimension() != web.dimension()) {
      throw InvalidInput("web and problem dimensions differ");
    }
    std::vector<int> count(cfg->size(), 0);
    for (int n = 0; n < m; ++n) {
      const int r = web.role[n];
      if (r == kInternal) continue;
      if (r < 0 || r >= cfg->size()) {
        throw InvalidInput("terminal role out of range");
      }
      if (++count[r] > 1) {
        throw InvalidInput("terminal " + std::to_string(r) + " appears more than once");
      }
      if ((web.nodes.col(n) - cfg->position(r)).norm() > tol.geom * std::max(1.0, coordinate_scale(cfg->positions()))) {
        throw InvalidInput("terminal " + std::to_string(r) + " is not at its configured position");
      }
    }
    for (int k = 0; k < cfg->size(); ++k) {
      if (count[k] == 0) {
        throw InvalidInput("terminal " + std::to_string(k) + " missing from web");
      }
    }
  }
}

Mat node_loads(const Web& web, const TerminalConfig& cfg) {
  Mat loads = Mat::Zero(web.dimension(), web.node_count());
  for (int n = 0; n < web.node_count(); ++n) {
    if (web.role[n] != kInternal) loads.col(n) = cfg.force(web.role[n]);
  }
  return loads;
}

Mat node_residuals(const Web& web, const StressState& stress, const Mat& loads) {
  if (stress.size() != web.edge_count()) {
    throw InvalidInput("stress state size does not match edge count");
  }
  Mat r = loads;
  for (int e = 0; e < web.edge_count(); ++e) {
    const auto [i, j] = web.edges[e];
    const Vec u = (web.nodes.col(j) - web.nodes.col(i)).normalized();
    r.col(i) += stress[e] * u;
    r.col(j) -= stress[e] * u;
  }
  return r;
}

double equilibrium_residual(const Web& web, const StressState& stress, const TerminalConfig& cfg) {
  const Mat r = node_residuals(web, stress, node_loads(web, cfg));
  return r.cols() == 0 ? 0.0 : r.colwise().norm().maxCoeff();
}

double support_threshold(const TerminalConfig& cfg, const Tolerances& tol) {
  return tol.eq * std::max(1.0, cfg.max_force());
}

bool supports(const Web& web, const StressState& stress, const TerminalConfig& cfg,
              const Tolerances& tol) {
  if (stress.size() != web.edge_count()) return false;
  const double scale = std::max(1.0, cfg.max_force());
  if (stress.size() > 0 && stress.minCoeff() < -tol.feas * scale) return false;
  return equilibrium_residual(web, stress, cfg) <= support_threshold(cfg, tol);
}

bool is_balanced(const TerminalConfig& cfg, const Tolerances& tol) {
  const Mat& x = cfg.positions();
  const Mat& f = cfg.forces();
  const double fmax = cfg.max_force();
  if (fmax == 0.0) return true;
  const Vec centroid = x.rowwise().mean();
  const Mat xc = x.colwise() - centroid;
  const Vec total = f.rowwise().sum();
  const Mat moment = f * xc.transpose() - xc * f.transpose();
  const double extent = std::max(1.0, xc.colwise().norm().maxCoeff());
  return total.cwiseAbs().maxCoeff() <= tol.eq * fmax &&
         moment.cwiseAbs().maxCoeff() <= tol.eq * fmax * extent;
}

Mat rigid_motion_matrix(const Mat& positions) {
  const int d = static_cast<int>(positions.rows());
  const int n = static_cast<int>(positions.cols());
  const int r = d + d * (d - 1) / 2;
  Mat raw = Mat::Zero(d * n, r);
  int c = 0;
  for (int a = 0; a < d; ++a, ++c) {
    for (int i = 0; i < n; ++i) raw(i * d + a, c) = 1.0;
  }
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b, ++c) {
      for (int i = 0; i < n; ++i) {
        raw(i * d + a, c) = positions(b, i);
        raw(i * d + b, c) = -positions(a, i);
      }
    }
  }
  // Rank-revealing orthonormalization; degenerate sets lose rotations.
  Eigen::ColPivHouseholderQR<Mat> qr(raw);
  qr.setThreshold(1e-12);
  const auto rank = qr.rank();
  Mat q = qr.householderQ() * Mat::Identity(d * n, rank);
  return q;
}

std::vector<Displacement> rigid_motion_basis(const TerminalConfig& cfg) {
  const Mat q = rigid_motion_matrix(cfg.positions());
  std::vector<Displacement> out;
  for (int c = 0; c < q.cols(); ++c) out.push_back(unflatten(q.col(c), cfg.dimension()));
  return out;
}

Displacement project_balanced(const Displacement& v, const Mat& positions) {
  const Mat q = rigid_motion_matrix(positions);
  const Vec flat = flatten(v);
  const Vec p = flat - q * (q.transpose() * flat);
  return unflatten(p, static_cast<int>(v.rows()));
}

AffineFrame affine_frame(const Mat& points, double tol) {
  AffineFrame frame;
  frame.origin = points.rowwise().mean();
  const Mat centered = points.colwise() - frame.origin;
  Eigen::JacobiSVD<Mat> svd(centered, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  const double scale = std::max(1.0, coordinate_scale(points));
  int k = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s[i] > tol * scale) ++k;
  }
  frame.basis = svd.matrixU().leftCols(k);
  return frame;
}

double coordinate_scale(const Mat& points) {
  if (points.cols() == 0) return 0.0;
  const Vec c = points.rowwise().mean();
  return (points.colwise() - c).colwise().norm().maxCoeff();
}

}  // namespace tensionweb
