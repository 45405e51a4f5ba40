#pragma once

#include "tensionweb/core.hpp"

#include <optional>

namespace tensionweb {

class LpError : public Error {
 public:
  using Error::Error;
};

/// minimize c'x  subject to  A x = b,  G x >= h,  x >= lower.
///
/// `lower` may hold -inf for free variables; an empty `lower` means x >= 0.
/// Either constraint block may have zero rows.
struct LpProblem {
  Vec c;
  Mat A;
  Vec b;
  Mat G;
  Vec h;
  Vec lower;

  int num_vars() const { return static_cast<int>(c.size()); }
  void validate() const;
};

enum class LpStatus { optimal, infeasible, unbounded };

const char* to_string(LpStatus s);

enum class Arithmetic { floating, exact };

struct LpOptions {
  double tol = 1e-9;
  int max_iterations = 200000;
  int refactor_interval = 50;
  Arithmetic arithmetic = Arithmetic::floating;
};

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Vec x;               // primal solution (optimal)
  Vec y;               // equality multipliers
  Vec z;               // inequality multipliers, z >= 0
  Vec reduced_costs;   // c - A'y - G'z
  double objective = 0.0;
  double dual_objective = 0.0;
  /// Sign of the objective decided in the solver's arithmetic (exact mode:
  /// no tolerance; floating: |obj| <= tol counts as zero).
  int objective_sign = 0;

  Vec ray;             // unbounded: feasible direction with c'ray < 0

  // Infeasible: y, z >= 0 with A'y + G'z <= 0 (= 0 on free columns) and
  // b'y + h'z - sum_{finite l} l_j (A'y + G'z)_j > 0.
  Vec cert_y;
  Vec cert_z;

  int iterations = 0;
  bool exact = false;
};

LpResult solve(const LpProblem& p, const LpOptions& opt = {});

/// Residual of the infeasibility certificate: returns the certified gap
/// (positive when valid) and the worst sign violation of A'y + G'z.
struct CertificateCheck {
  double gap = 0.0;
  double violation = 0.0;
};
CertificateCheck check_certificate(const LpProblem& p, const LpResult& r);

struct NonnegSolution {
  std::optional<Vec> lambda;
  Vec certificate;  // y with A'y <= 0, b'y > 0 when infeasible
};

/// Finds lambda >= 0 with A lambda = b, or a Farkas certificate.
NonnegSolution feasible_nonneg(const Mat& A, const Vec& b, const LpOptions& opt = {});

/// min b'y  s.t.  A'y >= 0,  -1 <= y <= 1.  Negative iff A lambda = b has no
/// nonnegative solution.
double farkas_dual_value(const Mat& A, const Vec& b, const LpOptions& opt = {});

}  // namespace tensionweb
