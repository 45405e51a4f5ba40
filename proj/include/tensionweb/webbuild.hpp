#pragma once

#include "tensionweb/admissibility.hpp"
#include "tensionweb/core.hpp"

#include <optional>

namespace tensionweb {

/// A web together with one tension per edge.
struct StressedWeb {
  Web web;
  StressState stress;
};

/// Edges (i,j) with lambda_ij > tol.feas, tension lambda_ij * |x_i - x_j|.
StressedWeb pairwise_web(const TerminalConfig& cfg, const PairCoefficients& lambda, const Tolerances& tol = {});

struct RadialForms {
  TerminalConfig config;  // f_i = c_i (x_i - x0)
  StressedWeb radial;     // hub at x0
  StressedWeb pairwise;   // sigma_ij = |x_i - x_j| c_i c_j / sum c
};

RadialForms radial_closed_form(const Vec& x0, const Mat& terminals, const Vec& c, const Tolerances& tol = {});

/// Nonnegative tensions balancing cfg on the fixed geometry, if any.
std::optional<StressState> find_stress(const Web& web, const TerminalConfig& cfg, const Tolerances& tol = {});

/// Equilibrium matrix (dM x E): column e holds the unit pulls of edge e on
/// its endpoints. Internal rows are those of internal nodes.
Mat equilibrium_matrix(const Web& web);

struct MichellCost {
  double cost = 0.0;  // sum sigma_e * length_e
  double work = 0.0;  // sum f_i . x_i
  double gap = 0.0;
};

MichellCost michell_cost(const Web& web, const StressState& stress, const TerminalConfig& cfg,
                         const Tolerances& tol = {});

/// Removes edges with tension <= threshold and nodes left isolated (terminals are kept).
StressedWeb prune_slack(const StressedWeb& sw, double threshold);

}  // namespace tensionweb
