#include "tensionweb/admissibility.hpp"

#include "tensionweb/hull.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace tensionweb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dual LP in k dimensions: min F.U over U in B_X with pairwise expansion
// and U.X = 1.
DualResult solve_dual(const Mat& x_in, const Mat& f, double threshold, Arithmetic arithmetic,
                      const Tolerances& tol) {
  const int k = static_cast<int>(x_in.rows());
  const int n = static_cast<int>(x_in.cols());
  const bool exact = arithmetic == Arithmetic::exact;
  // Centering is exact-invariant but rounds; only done in floating mode.
  const Mat x = exact ? x_in : Mat(x_in.colwise() - x_in.rowwise().mean());
  const int nv = k * n;
  const int rot = k * (k - 1) / 2;
  const int npairs = n * (n - 1) / 2;

  LpProblem p;
  p.c = flatten(f);
  p.lower = Vec::Constant(nv, -kInf);
  p.G = Mat::Zero(npairs, nv);
  p.h = Vec::Zero(npairs);
  int row = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++row) {
      for (int a = 0; a < k; ++a) {
        const double d = x(a, i) - x(a, j);
        p.G(row, i * k + a) = d;
        p.G(row, j * k + a) = -d;
      }
    }
  }
  p.A = Mat::Zero(k + rot + 1, nv);
  p.b = Vec::Zero(k + rot + 1);
  row = 0;
  for (int a = 0; a < k; ++a, ++row) {
    for (int i = 0; i < n; ++i) p.A(row, i * k + a) = 1.0;
  }
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b, ++row) {
      for (int i = 0; i < n; ++i) {
        p.A(row, i * k + a) = x(b, i);
        p.A(row, i * k + b) = -x(a, i);
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < k; ++a) p.A(row, i * k + a) = x(a, i);
  }
  p.b[row] = 1.0;

  LpOptions opt;
  opt.tol = tol.feas;
  opt.arithmetic = arithmetic;
  const LpResult r = solve(p, opt);

  DualResult out;
  out.exact = exact;
  switch (r.status) {
    case LpStatus::infeasible:
      out.admissible = true;
      out.minimum = kInf;
      break;
    case LpStatus::unbounded:
      out.admissible = false;
      out.minimum = -kInf;
      out.witness = unflatten(r.ray, k);
      break;
    case LpStatus::optimal:
      out.minimum = r.objective;
      out.witness = unflatten(r.x, k);
      out.admissible = exact ? r.objective_sign >= 0 : r.objective >= -threshold;
      break;
  }
  return out;
}

double dual_threshold(const TerminalConfig& cfg, const Tolerances& tol) {
  return tol.feas * std::max(1.0, cfg.max_force());
}

}  // namespace

double PairCoefficients::at(int i, int j) const {
  if (i > j) std::swap(i, j);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (pairs[p].i == i && pairs[p].j == j) return lambda[static_cast<int>(p)];
  }
  throw InvalidInput("pair not present");
}

std::vector<Edge> all_pairs(int n) {
  std::vector<Edge> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
  }
  return pairs;
}

Mat pair_loading_matrix(const Mat& positions) {
  const int d = static_cast<int>(positions.rows());
  const int n = static_cast<int>(positions.cols());
  const auto pairs = all_pairs(n);
  Mat m = Mat::Zero(d * n, static_cast<int>(pairs.size()));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    const Vec diff = positions.col(i) - positions.col(j);
    m.block(i * d, static_cast<int>(p), d, 1) = diff;
    m.block(j * d, static_cast<int>(p), d, 1) = -diff;
  }
  return m;
}

Mat reconstruct_loading(const Mat& positions, const PairCoefficients& c) {
  Mat f = Mat::Zero(positions.rows(), positions.cols());
  for (std::size_t p = 0; p < c.pairs.size(); ++p) {
    const auto [i, j] = c.pairs[p];
    const Vec diff = positions.col(i) - positions.col(j);
    f.col(i) += c.lambda[static_cast<int>(p)] * diff;
    f.col(j) -= c.lambda[static_cast<int>(p)] * diff;
  }
  return f;
}

void require_balanced(const TerminalConfig& cfg, const Tolerances& tol) {
  if (!is_balanced(cfg, tol)) throw InvalidInput("loading is not balanced");
}

std::optional<PairCoefficients> farkas_decompose(const TerminalConfig& cfg, const Tolerances& tol) {
  require_balanced(cfg, tol);
  const Mat a = pair_loading_matrix(cfg.positions());
  const Vec b = flatten(cfg.forces());
  LpOptions opt;
  opt.tol = tol.feas;
  const auto s = feasible_nonneg(a, b, opt);
  if (!s.lambda) return std::nullopt;
  PairCoefficients c{all_pairs(cfg.size()), *s.lambda};
  const double err = (reconstruct_loading(cfg.positions(), c) - cfg.forces()).cwiseAbs().maxCoeff();
  if (err > tol.feas * (1.0 + b.cwiseAbs().maxCoeff())) {
    throw LpError("Farkas reconstruction error exceeds tolerance");
  }
  return c;
}

std::optional<PairCoefficients> central_decompose(const TerminalConfig& cfg, const Tolerances& tol) {
  auto vertex = farkas_decompose(cfg, tol);
  if (!vertex) return vertex;
  const Mat a = pair_loading_matrix(cfg.positions());
  const Vec b = flatten(cfg.forces());
  const int np = static_cast<int>(a.cols());
  LpOptions opt;
  opt.tol = tol.feas;

  // Support: every pair positive in some decomposition.
  std::vector<bool> support(np, false);
  double scale = vertex->lambda.maxCoeff();
  auto absorb = [&](const Vec& lam) {
    scale = std::max(scale, lam.maxCoeff());
    for (int k = 0; k < np; ++k) support[k] = support[k] || lam[k] > tol.feas * (1.0 + scale);
  };
  absorb(vertex->lambda);
  for (int k = 0; k < np; ++k) {
    if (support[k]) continue;
    LpProblem p;
    p.c = Vec::Zero(np);
    p.c[k] = -1.0;
    p.A = a;
    p.b = b;
    const LpResult r = solve(p, opt);
    if (r.status == LpStatus::optimal) absorb(r.x);
  }

  // max t with lambda_k >= t on the support, zero elsewhere.
  std::vector<int> cols;
  for (int k = 0; k < np; ++k)
    if (support[k]) cols.push_back(k);
  const int m = static_cast<int>(cols.size());
  LpProblem p;
  p.c = Vec::Zero(m + 1);
  p.c[m] = -1.0;
  p.A = Mat::Zero(a.rows(), m + 1);
  for (int k = 0; k < m; ++k) p.A.col(k) = a.col(cols[k]);
  p.b = b;
  p.G = Mat::Zero(m, m + 1);
  for (int k = 0; k < m; ++k) {
    p.G(k, k) = 1.0;
    p.G(k, m) = -1.0;
  }
  p.h = Vec::Zero(m);
  const LpResult r = solve(p, opt);
  if (r.status != LpStatus::optimal) return vertex;
  PairCoefficients c{vertex->pairs, Vec::Zero(np)};
  for (int k = 0; k < m; ++k) c.lambda[cols[k]] = std::max(r.x[k], 0.0);
  const double err = (reconstruct_loading(cfg.positions(), c) - cfg.forces()).cwiseAbs().maxCoeff();
  if (err > tol.feas * (1.0 + b.cwiseAbs().maxCoeff())) return vertex;
  return c;
}

DualResult dual_check(const TerminalConfig& cfg, const Tolerances& tol, Arithmetic arithmetic) {
  require_balanced(cfg, tol);
  const double threshold = dual_threshold(cfg, tol);
  const AffineFrame frame = affine_frame(cfg.positions(), tol.geom);
  if (frame.rank() == cfg.dimension()) {
    return solve_dual(cfg.positions(), cfg.forces(), threshold, arithmetic, tol);
  }
  // Degenerate: forces leaving the affine hull cannot be carried by wires in it.
  const Mat& f = cfg.forces();
  const Mat f_in = frame.basis * (frame.basis.transpose() * f);
  const Mat f_perp = f - f_in;
  DualResult out;
  out.reduced_dimension = true;
  if (f_perp.colwise().norm().maxCoeff() > tol.eq * std::max(1.0, cfg.max_force())) {
    out.admissible = false;
    out.witness = -f_perp;
    out.minimum = -f_perp.squaredNorm();
    out.exact = arithmetic == Arithmetic::exact;
    return out;
  }
  DualResult local = solve_dual(frame.to_local(cfg.positions()), frame.basis.transpose() * f, threshold,
                                arithmetic, tol);
  out.admissible = local.admissible;
  out.minimum = local.minimum;
  out.exact = local.exact;
  if (local.witness.size() > 0) out.witness = frame.basis * local.witness;
  return out;
}

double interior_margin(const TerminalConfig& cfg, const Tolerances& tol) {
  const DualResult r = dual_check(cfg, tol);
  if (!r.admissible) throw InvalidInput("loading is not admissible");
  return std::max(0.0, r.minimum);
}

AdmissibilityReport check_admissibility(const TerminalConfig& cfg, const Tolerances& tol) {
  AdmissibilityReport rep;
  const DualResult dual = dual_check(cfg, tol);
  rep.reduced_dimension = dual.reduced_dimension;
  rep.farkas_coefficients = farkas_decompose(cfg, tol);
  rep.admissible = rep.farkas_coefficients.has_value();
  if (rep.admissible != dual.admissible) {
    throw LpError("primal and dual admissibility tests disagree");
  }
  if (rep.admissible) {
    rep.dual_margin = std::max(0.0, dual.minimum);
  } else {
    rep.dual_margin = dual.minimum;
    rep.violating_displacement = dual.witness;
  }
  return rep;
}

void require_convex_clockwise(const TerminalConfig& cfg, const Tolerances& tol) {
  if (cfg.dimension() != 2) throw InvalidInput("convex polygon input must be 2D");
  const int n = cfg.size();
  if (n < 3) throw InvalidInput("convex polygon needs at least three vertices");
  const auto hull = hull_2d_clockwise(cfg.positions(), tol.geom);
  if (static_cast<int>(hull.size()) != n) throw InvalidInput("terminals are not in convex position");
  const auto start = std::find(hull.begin(), hull.end(), 0) - hull.begin();
  for (int k = 0; k < n; ++k) {
    if (hull[(start + k) % n] != k) throw InvalidInput("terminals are not numbered clockwise");
  }
}

Displacement clamshell(const TerminalConfig& cfg, int j, int i, const Tolerances& tol) {
  require_convex_clockwise(cfg, tol);
  const int n = cfg.size();
  if (j < 0 || j >= n || i < 0 || i > j + n || i >= 2 * n) throw InvalidInput("clamshell index out of range");
  if (i == j) throw InvalidInput("clamshell needs j != i");
  if (i < j) i += n;
  Displacement u = Displacement::Zero(2, n);
  for (int step = j; step < i; ++step) {
    const int k = step % n;
    const Vec v = cfg.position(k) - cfg.position(j);
    // -Rperp with Rperp = [[0,1],[-1,0]].
    u(0, k) = -v[1];
    u(1, k) = v[0];
  }
  return u;
}

double arc_torque(const TerminalConfig& cfg, int i, int j) {
  const int n = cfg.size();
  if (j < i) j += n;
  double s = 0.0;
  for (int step = i; step <= j; ++step) {
    const int k = step % n;
    const Vec v = cfg.position(k) - cfg.position(i);
    const auto f = cfg.force(k);
    s += v[0] * f[1] - v[1] * f[0];
  }
  return s;
}

bool torque_criterion(const TerminalConfig& cfg, const Tolerances& tol) {
  require_convex_clockwise(cfg, tol);
  const int n = cfg.size();
  const double scale = std::max(1.0, cfg.max_force() * coordinate_scale(cfg.positions()));
  for (int i = 0; i < n; ++i) {
    for (int len = 0; len < n; ++len) {
      if (arc_torque(cfg, i, (i + len) % n) < -tol.feas * scale) return false;
    }
  }
  return true;
}

const char* to_string(StuckClass c) {
  switch (c) {
    case StuckClass::interior_unstuck: return "interior_unstuck";
    case StuckClass::boundary_unstuck: return "boundary_unstuck";
    case StuckClass::stuck: return "stuck";
    case StuckClass::completely_stuck: return "completely_stuck";
  }
  return "unknown";
}

std::vector<double> default_stuck_grid() { return {1e-2, 1e-3, 1e-4}; }

namespace {

ShiftTest shifted_test(const TerminalConfig& cfg, double t, int terminal, const Tolerances& tol, bool force_exact) {
  ShiftTest st;
  st.t = t;
  st.terminal = terminal;
  Mat x = cfg.positions();
  if (terminal < 0) {
    x -= t * cfg.forces();
  } else {
    x.col(terminal) -= t * cfg.force(terminal);
  }
  std::optional<TerminalConfig> shifted;
  try {
    shifted.emplace(x, cfg.forces(), tol);
  } catch (const InvalidInput&) {
    st.admissible = false;
    st.minimum = -kInf;
    return st;
  }
  DualResult r = dual_check(*shifted, tol, force_exact ? Arithmetic::exact : Arithmetic::floating);
  const double ambiguous = 100.0 * dual_threshold(cfg, tol);
  if (!r.exact && std::abs(r.minimum) <= ambiguous) {
    r = dual_check(*shifted, tol, Arithmetic::exact);
  }
  st.admissible = r.admissible;
  st.minimum = r.minimum;
  st.exact = r.exact;
  return st;
}

std::vector<ShiftTest> shift_family(const TerminalConfig& cfg, const std::vector<double>& grid, int terminal,
                                    const Tolerances& tol) {
  std::vector<ShiftTest> fam;
  for (double t : grid) fam.push_back(shifted_test(cfg, t, terminal, tol, false));
  const bool consistent = std::all_of(fam.begin(), fam.end(),
                                      [&](const ShiftTest& s) { return s.admissible == fam.front().admissible; });
  if (!consistent) {
    for (auto& s : fam) {
      if (!s.exact) s = shifted_test(cfg, s.t, terminal, tol, true);
    }
  }
  return fam;
}

}  // namespace

StuckReport stuck_classify(const TerminalConfig& cfg, const std::vector<double>& grid, const Tolerances& tol) {
  if (grid.empty()) throw InvalidInput("stuck grid is empty");
  for (double t : grid) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidInput("stuck grid values must be positive");
  }
  StuckReport rep;
  rep.grid = grid;
  rep.margin = interior_margin(cfg, tol);

  const auto all = shift_family(cfg, grid, -1, tol);
  rep.shifts.insert(rep.shifts.end(), all.begin(), all.end());
  const bool unstuck = std::all_of(all.begin(), all.end(), [](const ShiftTest& s) { return s.admissible; });

  std::vector<std::future<std::vector<ShiftTest>>> jobs;
  for (int k = 0; k < cfg.size(); ++k) {
    jobs.push_back(std::async(std::launch::async, [&, k] {
      if (cfg.force(k).norm() == 0.0) return std::vector<ShiftTest>{};
      return shift_family(cfg, grid, k, tol);
    }));
  }
  int stuck_terminal = -1;
  for (int k = 0; k < cfg.size(); ++k) {
    const auto fam = jobs[k].get();
    rep.shifts.insert(rep.shifts.end(), fam.begin(), fam.end());
    const bool never = !fam.empty() &&
                       std::none_of(fam.begin(), fam.end(), [](const ShiftTest& s) { return s.admissible; });
    if (never && stuck_terminal < 0) stuck_terminal = k;
  }

  if (unstuck) {
    rep.classification = rep.margin > kInteriorThreshold ? StuckClass::interior_unstuck : StuckClass::boundary_unstuck;
  } else if (stuck_terminal >= 0) {
    rep.classification = StuckClass::completely_stuck;
    rep.terminal = stuck_terminal;
  } else {
    rep.classification = StuckClass::stuck;
  }
  return rep;
}

}  // namespace tensionweb
