#pragma once

#include "tensionweb/core.hpp"
#include "tensionweb/lp.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tensionweb {

/// Coefficients lambda_ij >= 0 of F = sum lambda_ij F^(ij), one per pair i<j.
/// F^(ij) applies x_i - x_j at i and x_j - x_i at j.
struct PairCoefficients {
  std::vector<Edge> pairs;
  Vec lambda;

  double at(int i, int j) const;
};

std::vector<Edge> all_pairs(int n);

/// Columns are flattened F^(ij) loadings (dN x N(N-1)/2).
Mat pair_loading_matrix(const Mat& positions);

/// Loading reconstructed from pair coefficients (d x N).
Mat reconstruct_loading(const Mat& positions, const PairCoefficients& c);

struct DualResult {
  bool admissible = false;
  /// min F.U over the normalized cone (+inf when the cone is trivial).
  double minimum = 0.0;
  /// Minimizer (always set unless the cone is trivial); violating when !admissible.
  Displacement witness;
  bool reduced_dimension = false;
  bool exact = false;
};

struct AdmissibilityReport {
  bool admissible = false;
  std::optional<PairCoefficients> farkas_coefficients;
  std::optional<double> dual_margin;
  std::optional<Displacement> violating_displacement;
  bool reduced_dimension = false;
};

/// Throws InvalidInput when the loading is unbalanced.
void require_balanced(const TerminalConfig& cfg, const Tolerances& tol);

std::optional<PairCoefficients> farkas_decompose(const TerminalConfig& cfg, const Tolerances& tol = {});

/// A decomposition in the relative interior of the solution set: every pair
/// that can carry load does, and the smallest positive coefficient is maximal.
std::optional<PairCoefficients> central_decompose(const TerminalConfig& cfg, const Tolerances& tol = {});

DualResult dual_check(const TerminalConfig& cfg, const Tolerances& tol = {},
                      Arithmetic arithmetic = Arithmetic::floating);

/// Threshold above which a margin certifies an interior loading.
inline constexpr double kInteriorThreshold = 1e-6;

/// alpha = min F.U over the normalized admissible displacement cone.
double interior_margin(const TerminalConfig& cfg, const Tolerances& tol = {});

AdmissibilityReport check_admissibility(const TerminalConfig& cfg, const Tolerances& tol = {});

/// Throws unless the terminals are the vertices of a strictly convex polygon
/// listed clockwise (2D).
void require_convex_clockwise(const TerminalConfig& cfg, const Tolerances& tol);

/// u_k = -Rperp (x_k - x_j) for k = j..i-1 (cyclic), zero elsewhere.
/// Indices are 0-based; i may equal j + N for the full cycle.
Displacement clamshell(const TerminalConfig& cfg, int j, int i, const Tolerances& tol = {});

/// Sum over k = i..j (cyclic) of det(x_k - x_i, f_k).
double arc_torque(const TerminalConfig& cfg, int i, int j);
bool torque_criterion(const TerminalConfig& cfg, const Tolerances& tol = {});

enum class StuckClass { interior_unstuck, boundary_unstuck, stuck, completely_stuck };

const char* to_string(StuckClass c);

struct ShiftTest {
  double t = 0.0;
  int terminal = -1;  // -1: every terminal shifted
  bool admissible = false;
  double minimum = 0.0;
  bool exact = false;
};

struct StuckReport {
  StuckClass classification = StuckClass::stuck;
  int terminal = -1;  // witness for completely_stuck
  double margin = 0.0;
  std::vector<double> grid;
  std::vector<ShiftTest> shifts;
};

std::vector<double> default_stuck_grid();

StuckReport stuck_classify(const TerminalConfig& cfg, const std::vector<double>& grid = default_stuck_grid(),
                           const Tolerances& tol = {});

}  // namespace tensionweb
