#pragma once

#include "tensionweb/core.hpp"
#include "tensionweb/webbuild.hpp"

#include <vector>

namespace tensionweb {

struct PlanarWeb {
  Web web;
  StressState stress;                    // empty when no stress was given
  std::vector<std::vector<int>> origin;  // input edges covering each output edge
};

/// Splits wires at crossings and at nodes lying on them, merges coincident
/// nodes and duplicate edges (tensions add). 2D only.
PlanarWeb insert_crossing_nodes(const Web& web, const StressState& stress = {}, const Tolerances& tol = {});

/// True when no two edges meet except at shared endpoints.
bool is_plane_embedding(const Web& web, const Tolerances& tol = {});

/// Bounded face of a plane web, traced counter-clockwise.
struct Loop {
  std::vector<int> nodes;
  std::vector<int> edges;  // edges[k] joins nodes[k] and nodes[k+1]
  double area = 0.0;
  bool simple = true;      // no repeated node on the boundary walk
  bool empty = true;       // no web node strictly inside
  bool convex = false;     // simple with no reflex corner
};

std::vector<Loop> minimal_loops(const Web& web, const Tolerances& tol = {});

/// Number of terminals strictly inside the terminal convex hull.
int loop_bound(const TerminalConfig& cfg, const Tolerances& tol = {});

struct SimplifyResult {
  StressedWeb result;
  int initial_loops = 0;
  int final_loops = 0;
  int replacements = 0;
};

/// Replaces empty convex loops by open webs until none remain.
SimplifyResult simplify_loops(const Web& web, const StressState& stress, const TerminalConfig& cfg,
                              const Tolerances& tol = {});

/// Open web inside a convex polygon reproducing the vertex pulls of a loop
/// with edge tensions tau (edge k joins vertex k and k+1, CCW order).
/// Returned node indices 0..m-1 are the polygon vertices.
StressedWeb open_replacement(const Mat& polygon, const Vec& tau, double tol);

}  // namespace tensionweb
