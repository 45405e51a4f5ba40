#pragma once

#include "tensionweb/core.hpp"
#include "tensionweb/webbuild.hpp"

#include <cstdint>
#include <vector>

namespace tensionweb {

/// Some proper subset of the nonzero forces sums to zero.
bool in_degenerate_set(const TerminalConfig& cfg, const Tolerances& tol = {});

/// epsilon > 0 such that F stays interior at X - epsilon F.
double unstuck_shift(const TerminalConfig& cfg, const Tolerances& tol = {});

/// Connected pairwise web with strictly positive tensions supporting an interior loading.
StressedWeb connected_support(const TerminalConfig& cfg, std::uint64_t seed = 0, const Tolerances& tol = {});

/// Web supporting only the ray {lambda F}: unit-degree terminals, reduced junctions.
StressedWeb make_uniloadable(const TerminalConfig& cfg, std::uint64_t seed = 0, const Tolerances& tol = {});

struct UniloadableReport {
  bool uniloadable = false;
  int nullity = 0;           // of the internal equilibrium matrix
  StressState sigma;         // the normalized stress when unique
  bool cross_checked = false;
  bool lp_agrees = true;     // per-edge LP bounds agree with the fast path
};

/// Internal-node balance with sum sigma = 1 and sigma >= 0 has exactly one
/// solution, and it is strictly positive. Throws on a disconnected web.
UniloadableReport uniloadable_report(const Web& web, bool cross_check = false, const Tolerances& tol = {});
bool verify_uniloadable(const Web& web, const Tolerances& tol = {});

/// Per-edge [min, max] of sigma_e over the normalized internal-balance polytope.
/// Empty when the polytope is empty.
std::vector<std::pair<double, double>> stress_ranges(const Web& web, const Tolerances& tol = {});

struct ConeWeb {
  Web web;
  std::vector<StressState> ray_stress;  // one stress per ray
  std::vector<Mat> rays;                // rays actually used (possibly perturbed)
};

/// Superposition of uniloadable webs, one per ray.
ConeWeb cone_synthesis(const Mat& positions, const std::vector<Mat>& rays, std::uint64_t seed = 0,
                       const Tolerances& tol = {});

}  // namespace tensionweb
