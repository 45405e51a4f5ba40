#include "tensionweb/lp.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace tensionweb {

namespace {

namespace mp = boost::multiprecision;
using Rational = mp::number<mp::cpp_rational_backend, mp::et_off>;

double to_double(double v) { return v; }
double to_double(const Rational& v) { return v.convert_to<double>(); }

template <class S>
S from_double(double v) {
  return S(v);
}

// Row-major dense storage; Eigen cannot host Rational here.
template <class S>
struct Dense {
  int rows = 0;
  int cols = 0;
  std::vector<S> v;
  Dense() = default;
  Dense(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, S(0)) {}
  S& operator()(int i, int j) { return v[static_cast<std::size_t>(i) * cols + j]; }
  const S& operator()(int i, int j) const { return v[static_cast<std::size_t>(i) * cols + j]; }
};

// Ā w = b̄, w >= 0 with each row sign-flipped so that b̄ >= 0.
struct StandardForm {
  Mat A;
  Vec b;
  Vec c;
  Vec row_sign;
  double constant = 0.0;
  // Column bookkeeping back to the original variables.
  std::vector<int> pos_col;  // column of x_j (or its positive part)
  std::vector<int> neg_col;  // negative part of a free x_j, else -1
  int slack_begin = 0;
};

StandardForm standardize(const LpProblem& p) {
  const int n = p.num_vars();
  const int ma = static_cast<int>(p.A.rows());
  const int mg = static_cast<int>(p.G.rows());
  const Vec lower = p.lower.size() == 0 ? Vec::Zero(n) : p.lower;

  StandardForm s;
  s.pos_col.assign(n, -1);
  s.neg_col.assign(n, -1);
  int cols = 0;
  for (int j = 0; j < n; ++j) {
    s.pos_col[j] = cols++;
    if (!std::isfinite(lower[j])) s.neg_col[j] = cols++;
  }
  s.slack_begin = cols;
  cols += mg;

  const int m = ma + mg;
  s.A = Mat::Zero(m, cols);
  s.b = Vec::Zero(m);
  s.c = Vec::Zero(cols);
  Vec lfin = Vec::Zero(n);
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(lower[j])) lfin[j] = lower[j];
  }
  if (ma > 0) s.b.head(ma) = p.b - p.A * lfin;
  if (mg > 0) s.b.tail(mg) = p.h - p.G * lfin;
  s.constant = p.c.dot(lfin);

  for (int j = 0; j < n; ++j) {
    const int pc = s.pos_col[j];
    const int nc = s.neg_col[j];
    s.c[pc] = p.c[j];
    if (ma > 0) s.A.block(0, pc, ma, 1) = p.A.col(j);
    if (mg > 0) s.A.block(ma, pc, mg, 1) = p.G.col(j);
    if (nc >= 0) {
      s.c[nc] = -p.c[j];
      s.A.col(nc) = -s.A.col(pc);
    }
  }
  for (int k = 0; k < mg; ++k) s.A(ma + k, s.slack_begin + k) = -1.0;

  s.row_sign = Vec::Ones(m);
  for (int i = 0; i < m; ++i) {
    if (s.b[i] < 0.0) {
      s.row_sign[i] = -1.0;
      s.b[i] = -s.b[i];
      s.A.row(i) = -s.A.row(i);
    }
  }
  return s;
}

struct SimplexOutcome {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> w;
  std::vector<double> pi;      // duals of the flipped rows
  std::vector<double> ray;
  std::vector<double> farkas;  // phase-one duals of the flipped rows
  int objective_sign = 0;
  int iterations = 0;
};

// Revised simplex with an explicit basis inverse, Bland's rule throughout.
template <class S>
class Simplex {
 public:
  Simplex(const StandardForm& sf, const LpOptions& opt, bool exact)
      : m_(static_cast<int>(sf.A.rows())),
        n_(static_cast<int>(sf.A.cols())),
        opt_(opt),
        exact_(exact),
        A_(m_, n_),
        b_(m_),
        c_(n_) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) A_(i, j) = from_double<S>(sf.A(i, j));
      b_[i] = from_double<S>(sf.b[i]);
    }
    for (int j = 0; j < n_; ++j) c_[j] = from_double<S>(sf.c[j]);
    twin_.assign(n_ + m_, -1);
    for (std::size_t k = 0; k < sf.pos_col.size(); ++k) {
      if (sf.neg_col[k] < 0) continue;
      twin_[sf.pos_col[k]] = sf.neg_col[k];
      twin_[sf.neg_col[k]] = sf.pos_col[k];
    }
    const double bscale = 1.0 + (m_ > 0 ? sf.b.cwiseAbs().maxCoeff() : 0.0);
    const double cscale = 1.0 + (n_ > 0 ? sf.c.cwiseAbs().maxCoeff() : 0.0);
    eps_feas_ = exact ? S(0) : from_double<S>(opt.tol * bscale);
    eps_opt_ = exact ? S(0) : from_double<S>(opt.tol * cscale);
    eps_piv_ = exact ? S(0) : from_double<S>(std::max(opt.tol, 1e-7));
    eps_tie_ = exact ? S(0) : from_double<S>(1e-13 * bscale);
  }

  SimplexOutcome run() {
    SimplexOutcome out;
    // Start from the all-artificial basis.
    basis_.resize(m_);
    binv_ = Dense<S>(m_, m_);
    xb_ = b_;
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      binv_(i, i) = S(1);
    }
    allowed_.assign(n_ + m_, 1);

    std::vector<S> cost1(n_ + m_, S(0));
    for (int i = 0; i < m_; ++i) cost1[n_ + i] = S(1);
    const LpStatus p1 = iterate(cost1);
    if (p1 != LpStatus::optimal) {
      throw LpError("phase one terminated without an optimum");
    }
    S infeas(0);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] >= n_) infeas += xb_[i];
    }
    if (infeas > eps_feas_) {
      out.status = LpStatus::infeasible;
      out.farkas = to_doubles(duals(cost1));
      out.iterations = iterations_;
      return out;
    }

    drive_out_artificials();
    for (int i = 0; i < m_; ++i) allowed_[n_ + i] = 0;

    std::vector<S> cost2(n_ + m_, S(0));
    for (int j = 0; j < n_; ++j) cost2[j] = c_[j];
    const LpStatus p2 = iterate(cost2);
    out.iterations = iterations_;
    if (p2 == LpStatus::unbounded) {
      out.status = LpStatus::unbounded;
      std::vector<double> ray(n_, 0.0);
      ray[entering_] = 1.0;
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] < n_) ray[basis_[i]] = -to_double(direction_[i]);
      }
      out.ray = std::move(ray);
      return out;
    }
    if (!exact_) finalize_floating();

    out.status = LpStatus::optimal;
    std::vector<S> w(n_, S(0));
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) w[basis_[i]] = xb_[i];
    }
    S obj(0);
    for (int j = 0; j < n_; ++j) obj += c_[j] * w[j];
    out.w = to_doubles(w);
    out.pi = to_doubles(duals(cost2));
    objective_ = obj;
    return out;
  }

  // Sign of the standard-form objective (caller adds the constant shift).
  int sign_with_constant(double constant) const {
    const S total = objective_ + from_double<S>(constant);
    const S eps = exact_ ? S(0) : eps_opt_;
    if (total > eps) return 1;
    if (total < -eps) return -1;
    return 0;
  }

 private:
  S column_entry(int i, int j) const {
    if (j < n_) return A_(i, j);
    return (j - n_ == i) ? S(1) : S(0);
  }

  std::vector<S> duals(const std::vector<S>& cost) const {
    std::vector<S> pi(m_, S(0));
    for (int k = 0; k < m_; ++k) {
      const S& ck = cost[basis_[k]];
      if (ck == S(0)) continue;
      for (int i = 0; i < m_; ++i) pi[i] += ck * binv_(k, i);
    }
    return pi;
  }

  static std::vector<double> to_doubles(const std::vector<S>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
    return out;
  }

  void compute_direction(int j) {
    direction_.assign(m_, S(0));
    for (int i = 0; i < m_; ++i) {
      S acc(0);
      if (j < n_) {
        for (int k = 0; k < m_; ++k) {
          const S& a = A_(k, j);
          if (a != S(0)) acc += binv_(i, k) * a;
        }
      } else {
        acc = binv_(i, j - n_);
      }
      direction_[i] = acc;
    }
  }

  void pivot(int r, int j) {
    const S piv = direction_[r];
    const S theta = xb_[r] / piv;
    for (int i = 0; i < m_; ++i) {
      if (i != r && direction_[i] != S(0)) xb_[i] -= theta * direction_[i];
    }
    xb_[r] = theta;
    for (int k = 0; k < m_; ++k) binv_(r, k) /= piv;
    for (int i = 0; i < m_; ++i) {
      if (i == r || direction_[i] == S(0)) continue;
      const S f = direction_[i];
      for (int k = 0; k < m_; ++k) {
        if (binv_(r, k) != S(0)) binv_(i, k) -= f * binv_(r, k);
      }
    }
    basis_[r] = j;
    ++iterations_;
    if (!exact_ && ++since_refactor_ >= opt_.refactor_interval) refactor();
  }

  LpStatus iterate(const std::vector<S>& cost) {
    std::vector<char> is_basic(n_ + m_, 0);
    std::vector<char> skip(n_ + m_, 0);
    bool fresh = false;
    for (;;) {
      if (iterations_ >= opt_.max_iterations) {
        throw LpError("simplex iteration limit reached");
      }
      std::fill(is_basic.begin(), is_basic.end(), 0);
      for (int b : basis_) is_basic[b] = 1;
      const std::vector<S> pi = duals(cost);

      int enter = -1;
      for (int j = 0; j < n_ + m_ && enter < 0; ++j) {
        if (is_basic[j] || !allowed_[j] || skip[j]) continue;
        // Split parts of a free variable are never basic together.
        if (twin_[j] >= 0 && is_basic[twin_[j]]) continue;
        S r = cost[j];
        if (j < n_) {
          for (int i = 0; i < m_; ++i) {
            const S& a = A_(i, j);
            if (a != S(0)) r -= pi[i] * a;
          }
        } else {
          r -= pi[j - n_];
        }
        if (r < -eps_opt_) enter = j;
      }
      if (enter < 0) return LpStatus::optimal;

      compute_direction(enter);
      const int leave = exact_ || degenerate_run_ > kDegenerateLimit ? bland_row() : harris_row();
      if (leave < 0) {
        if (!exact_ && !fresh && since_refactor_ > 0) {
          refactor();
          fresh = true;
          continue;
        }
        // Only pivots below the threshold block this column.
        if (!exact_ && std::any_of(direction_.begin(), direction_.end(), [](const S& v) { return v > S(0); })) {
          skip[enter] = 1;
          continue;
        }
        entering_ = enter;
        return LpStatus::unbounded;
      }
      if (xb_[leave] < S(0)) xb_[leave] = S(0);
      if (xb_[leave] / direction_[leave] > eps_tie_) {
        degenerate_run_ = 0;
      } else {
        ++degenerate_run_;
      }
      pivot(leave, enter);
      fresh = false;
      std::fill(skip.begin(), skip.end(), 0);
    }
  }

  // Smallest ratio, ties to the lowest basic index (Bland).
  int bland_row() const {
    int leave = -1;
    S best(0);
    for (int i = 0; i < m_; ++i) {
      if (!(direction_[i] > eps_piv_)) continue;
      S xi = xb_[i];
      if (xi < S(0)) xi = S(0);
      const S ratio = xi / direction_[i];
      if (leave < 0 || ratio < best - eps_tie_ || (ratio <= best + eps_tie_ && basis_[i] < basis_[leave])) {
        if (leave < 0 || ratio < best) best = ratio;
        leave = i;
      }
    }
    return leave;
  }

  // Two-pass Harris test: largest pivot among rows within the relaxed step.
  int harris_row() const {
    S dmax(0);
    for (const S& d : direction_) dmax = std::max(dmax, d);
    const S tol = std::max(eps_piv_, S(1e-9) * dmax);
    S bound(0);
    bool any = false;
    for (int i = 0; i < m_; ++i) {
      if (!(direction_[i] > tol)) continue;
      const S r = (std::max(xb_[i], S(0)) + eps_feas_) / direction_[i];
      if (!any || r < bound) bound = r;
      any = true;
    }
    if (!any) return -1;
    int leave = -1;
    for (int i = 0; i < m_; ++i) {
      if (!(direction_[i] > tol)) continue;
      if (std::max(xb_[i], S(0)) / direction_[i] > bound) continue;
      if (leave < 0 || direction_[i] > direction_[leave] ||
          (direction_[i] == direction_[leave] && basis_[i] < basis_[leave])) {
        leave = i;
      }
    }
    return leave;
  }

  void drive_out_artificials() {
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] < n_) continue;
      std::vector<char> is_basic(n_, 0);
      for (int b : basis_) {
        if (b < n_) is_basic[b] = 1;
      }
      int pick = -1;
      S best(0);
      for (int j = 0; j < n_; ++j) {
        if (is_basic[j] || (twin_[j] >= 0 && is_basic[twin_[j]])) continue;
        S a(0);
        for (int k = 0; k < m_; ++k) {
          if (A_(k, j) != S(0)) a += binv_(r, k) * A_(k, j);
        }
        const S mag = a < S(0) ? -a : a;
        if (mag > eps_piv_ && (pick < 0 || mag > best)) {
          pick = j;
          best = mag;
        }
      }
      if (pick < 0) continue;  // redundant row; artificial stays basic at zero
      compute_direction(pick);
      pivot(r, pick);
    }
  }

  // Gauss-Jordan inverse of the current basis with partial pivoting.
  void refactor() {
    since_refactor_ = 0;
    Dense<S> work(m_, 2 * m_);
    for (int i = 0; i < m_; ++i) {
      for (int k = 0; k < m_; ++k) work(i, k) = column_entry(i, basis_[k]);
      work(i, m_ + i) = S(1);
    }
    for (int col = 0; col < m_; ++col) {
      int p = col;
      double pmax = std::abs(to_double(work(col, col)));
      for (int i = col + 1; i < m_; ++i) {
        const double v = std::abs(to_double(work(i, col)));
        if (v > pmax) {
          pmax = v;
          p = i;
        }
      }
      if (pmax < 1e-14) throw LpError("singular basis during refactorization");
      if (p != col) {
        for (int k = 0; k < 2 * m_; ++k) std::swap(work(p, k), work(col, k));
      }
      const S piv = work(col, col);
      for (int k = 0; k < 2 * m_; ++k) work(col, k) /= piv;
      for (int i = 0; i < m_; ++i) {
        if (i == col) continue;
        const S f = work(i, col);
        if (f == S(0)) continue;
        for (int k = 0; k < 2 * m_; ++k) work(i, k) -= f * work(col, k);
      }
    }
    for (int i = 0; i < m_; ++i) {
      for (int k = 0; k < m_; ++k) binv_(i, k) = work(i, m_ + k);
    }
    for (int i = 0; i < m_; ++i) {
      S acc(0);
      for (int k = 0; k < m_; ++k) acc += binv_(i, k) * b_[k];
      xb_[i] = acc;
    }
  }

  void finalize_floating() {
    refactor();
    for (int i = 0; i < m_; ++i) {
      if (xb_[i] < -eps_feas_ * S(10)) {
        throw LpError("loss of primal feasibility after refactorization");
      }
      if (xb_[i] < S(0)) xb_[i] = S(0);
    }
  }

  int m_;
  int n_;
  LpOptions opt_;
  bool exact_;
  Dense<S> A_;
  std::vector<S> b_;
  std::vector<S> c_;
  std::vector<int> basis_;
  Dense<S> binv_;
  std::vector<S> xb_;
  std::vector<char> allowed_;
  std::vector<int> twin_;
  static constexpr int kDegenerateLimit = 50;
  int degenerate_run_ = 0;
  std::vector<S> direction_;
  int entering_ = -1;
  int iterations_ = 0;
  int since_refactor_ = 0;
  S objective_ = S(0);
  S eps_feas_;
  S eps_opt_;
  S eps_piv_;
  S eps_tie_;
};

template <class S>
std::pair<SimplexOutcome, int> run_simplex(const StandardForm& sf, const LpOptions& opt, bool exact) {
  Simplex<S> sx(sf, opt, exact);
  SimplexOutcome out = sx.run();
  int sign = 0;
  if (out.status == LpStatus::optimal) sign = sx.sign_with_constant(sf.constant);
  return {std::move(out), sign};
}

}  // namespace

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

void LpProblem::validate() const {
  const auto n = c.size();
  if (A.rows() > 0 && A.cols() != n) throw InvalidInput("LP: A column count mismatch");
  if (A.rows() != b.size()) throw InvalidInput("LP: A/b row count mismatch");
  if (G.rows() > 0 && G.cols() != n) throw InvalidInput("LP: G column count mismatch");
  if (G.rows() != h.size()) throw InvalidInput("LP: G/h row count mismatch");
  if (lower.size() != 0 && lower.size() != n) throw InvalidInput("LP: bound size mismatch");
  if (!c.allFinite() || !A.allFinite() || !b.allFinite() || !G.allFinite() || !h.allFinite()) {
    throw InvalidInput("LP: non-finite data");
  }
  for (Eigen::Index j = 0; j < lower.size(); ++j) {
    if (std::isnan(lower[j]) || lower[j] == std::numeric_limits<double>::infinity()) {
      throw InvalidInput("LP: invalid lower bound");
    }
  }
}

namespace {

constexpr Eigen::Index kExactRetryLimit = 600;

// Equality rows that are numerically independent. An inconsistent system
// is reported through `residual` (b - A x for the least-squares x).
struct RowReduction {
  std::vector<int> keep;
  Vec residual;
  bool inconsistent = false;
};

RowReduction reduce_equalities(const LpProblem& p, double tol) {
  RowReduction out;
  const auto ma = p.A.rows();
  Eigen::ColPivHouseholderQR<Mat> qr(p.A.transpose());
  qr.setThreshold(1e-10);
  const auto rank = qr.rank();
  if (rank == ma) {
    for (int i = 0; i < ma; ++i) out.keep.push_back(i);
    return out;
  }
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(p.A);
  cod.setThreshold(1e-10);
  out.residual = p.b - p.A * cod.solve(p.b);
  const double bscale = 1.0 + p.b.cwiseAbs().maxCoeff();
  if (out.residual.cwiseAbs().maxCoeff() > 10.0 * tol * bscale) {
    out.inconsistent = true;
    return out;
  }
  for (Eigen::Index k = 0; k < rank; ++k) out.keep.push_back(static_cast<int>(qr.colsPermutation().indices()[k]));
  std::sort(out.keep.begin(), out.keep.end());
  return out;
}

LpResult solve_reduced(const LpProblem& p, const LpOptions& opt);

}  // namespace

LpResult solve(const LpProblem& p, const LpOptions& opt) {
  p.validate();
  if (opt.arithmetic == Arithmetic::exact || p.A.rows() == 0) return solve_reduced(p, opt);
  // Dependent equality rows stall the floating simplex; drop them first.
  const RowReduction red = reduce_equalities(p, opt.tol);
  if (red.inconsistent) {
    LpResult r;
    r.status = LpStatus::infeasible;
    r.cert_y = red.residual;
    r.cert_z = Vec::Zero(p.G.rows());
    return r;
  }
  if (static_cast<Eigen::Index>(red.keep.size()) == p.A.rows()) return solve_reduced(p, opt);
  LpProblem q = p;
  q.A.resize(static_cast<Eigen::Index>(red.keep.size()), p.A.cols());
  q.b.resize(q.A.rows());
  for (std::size_t k = 0; k < red.keep.size(); ++k) {
    q.A.row(static_cast<Eigen::Index>(k)) = p.A.row(red.keep[k]);
    q.b[static_cast<Eigen::Index>(k)] = p.b[red.keep[k]];
  }
  LpResult r = solve_reduced(q, opt);
  auto expand = [&](Vec& v) {
    if (v.size() != q.A.rows()) return;
    Vec full = Vec::Zero(p.A.rows());
    for (std::size_t k = 0; k < red.keep.size(); ++k) full[red.keep[k]] = v[static_cast<Eigen::Index>(k)];
    v = std::move(full);
  };
  expand(r.y);
  expand(r.cert_y);
  return r;
}

namespace {

LpResult solve_reduced(const LpProblem& p, const LpOptions& opt) {
  const StandardForm sf = standardize(p);
  bool exact = opt.arithmetic == Arithmetic::exact;
  std::pair<SimplexOutcome, int> run;
  if (exact) {
    run = run_simplex<Rational>(sf, opt, true);
  } else {
    try {
      run = run_simplex<double>(sf, opt, false);
    } catch (const LpError&) {
      // Double-precision breakdown; small problems are re-solved exactly.
      if (sf.A.rows() * sf.A.cols() > kExactRetryLimit) throw;
      run = run_simplex<Rational>(sf, opt, true);
      exact = true;
    }
  }
  auto& [out, sign] = run;

  const int n = p.num_vars();
  const int ma = static_cast<int>(p.A.rows());
  const int mg = static_cast<int>(p.G.rows());
  const Vec lower = p.lower.size() == 0 ? Vec::Zero(n) : p.lower;

  LpResult r;
  r.status = out.status;
  r.iterations = out.iterations;
  r.exact = exact;

  auto split_rows = [&](const std::vector<double>& pi, Vec& y, Vec& z) {
    y = Vec::Zero(ma);
    z = Vec::Zero(mg);
    for (int i = 0; i < ma; ++i) y[i] = sf.row_sign[i] * pi[i];
    for (int k = 0; k < mg; ++k) z[k] = sf.row_sign[ma + k] * pi[ma + k];
  };

  if (out.status == LpStatus::infeasible) {
    split_rows(out.farkas, r.cert_y, r.cert_z);
    return r;
  }
  if (out.status == LpStatus::unbounded) {
    r.ray = Vec::Zero(n);
    for (int j = 0; j < n; ++j) {
      r.ray[j] = out.ray[sf.pos_col[j]] - (sf.neg_col[j] >= 0 ? out.ray[sf.neg_col[j]] : 0.0);
    }
    return r;
  }

  r.x = Vec::Zero(n);
  for (int j = 0; j < n; ++j) {
    const double base = std::isfinite(lower[j]) ? lower[j] : 0.0;
    r.x[j] = base + out.w[sf.pos_col[j]] - (sf.neg_col[j] >= 0 ? out.w[sf.neg_col[j]] : 0.0);
  }
  split_rows(out.pi, r.y, r.z);
  Vec aty = Vec::Zero(n);
  if (ma > 0) aty += p.A.transpose() * r.y;
  if (mg > 0) aty += p.G.transpose() * r.z;
  r.reduced_costs = p.c - aty;
  r.objective = p.c.dot(r.x);
  r.dual_objective = (ma > 0 ? p.b.dot(r.y) : 0.0) + (mg > 0 ? p.h.dot(r.z) : 0.0);
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(lower[j])) r.dual_objective += lower[j] * r.reduced_costs[j];
  }
  r.objective_sign = sign;
  return r;
}

}  // namespace

CertificateCheck check_certificate(const LpProblem& p, const LpResult& r) {
  const int n = p.num_vars();
  const Vec lower = p.lower.size() == 0 ? Vec::Zero(n) : p.lower;
  Vec aty = Vec::Zero(n);
  if (p.A.rows() > 0) aty += p.A.transpose() * r.cert_y;
  if (p.G.rows() > 0) aty += p.G.transpose() * r.cert_z;
  CertificateCheck chk;
  chk.gap = (p.A.rows() > 0 ? p.b.dot(r.cert_y) : 0.0) + (p.G.rows() > 0 ? p.h.dot(r.cert_z) : 0.0);
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(lower[j])) {
      chk.gap -= lower[j] * aty[j];
      chk.violation = std::max(chk.violation, aty[j]);
    } else {
      chk.violation = std::max(chk.violation, std::abs(aty[j]));
    }
  }
  if (r.cert_z.size() > 0) chk.violation = std::max(chk.violation, -r.cert_z.minCoeff());
  return chk;
}

NonnegSolution feasible_nonneg(const Mat& A, const Vec& b, const LpOptions& opt) {
  LpProblem p;
  p.c = Vec::Zero(A.cols());
  p.A = A;
  p.b = b;
  p.G = Mat::Zero(0, A.cols());
  p.h = Vec::Zero(0);
  const LpResult r = solve(p, opt);
  NonnegSolution out;
  if (r.status == LpStatus::optimal) {
    out.lambda = r.x.cwiseMax(0.0);
  } else {
    out.certificate = r.cert_y;
  }
  return out;
}

double farkas_dual_value(const Mat& A, const Vec& b, const LpOptions& opt) {
  const auto m = A.rows();
  LpProblem p;
  p.c = b;
  p.A = Mat::Zero(0, m);
  p.b = Vec::Zero(0);
  p.G.resize(A.cols() + m, m);
  p.G << A.transpose(), -Mat::Identity(m, m);
  p.h = Vec::Zero(A.cols() + m);
  p.h.tail(m).setConstant(-1.0);
  p.lower = Vec::Constant(m, -1.0);
  const LpResult r = solve(p, opt);
  if (r.status != LpStatus::optimal) throw LpError("bounded Farkas dual did not reach an optimum");
  return r.objective;
}

}  // namespace tensionweb
