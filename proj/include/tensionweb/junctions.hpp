#pragma once

#include "tensionweb/core.hpp"
#include "tensionweb/webbuild.hpp"

#include <vector>

namespace tensionweb {

struct JunctionWire {
  Vec far_end;
  Vec direction;  // unit, from the center toward far_end
  double tension = 0.0;
};

/// Star of wires meeting at one internal node.
struct JunctionLocal {
  Vec center;
  std::vector<JunctionWire> wires;
  double clearance = 0.0;

  int dimension() const { return static_cast<int>(center.size()); }
  int degree() const { return static_cast<int>(wires.size()); }
  /// Throws unless tensions are positive, clearance positive and
  /// sum T_k v_k vanishes within tol.eq.
  void validate(const Tolerances& tol) const;
  /// Far ends as terminals loaded by T_k v_k.
  TerminalConfig local_config(const Tolerances& tol = {}) const;
  /// The unreduced star: far ends (roles 0..M-1) and the center.
  StressedWeb star() const;
};

/// Distance from a node to every other node and to every wire not incident to it.
double clearance(const Web& web, int node);

JunctionLocal junction_at(const Web& web, const StressState& stress, int node);

// Local webs returned below list the far ends first (node k has role k);
// the remaining nodes are internal.

/// 2D: replaces the junction by a polygonal face; new nodes have degree 3.
StressedWeb reduce_junction_2d(const JunctionLocal& j, const Tolerances& tol = {});

/// 3D five-wire junction with a straight-through pair.
StressedWeb five_wires_replace(const JunctionLocal& j, const Tolerances& tol = {});
/// Explicit parameters s (> alpha/3) and t (> 0); no collision retry.
StressedWeb five_wires_replace(const JunctionLocal& j, double s, double t, const Tolerances& tol = {});

/// 3D: tensegrity superposition until the center degree is at most 4.
StressedWeb reduce_junction_3d(const JunctionLocal& j, const Tolerances& tol = {});

struct ReduceResult {
  StressedWeb result;
  int reductions = 0;
};

/// Reduces every internal node to degree <= 3 (2D) or <= 4 (3D).
ReduceResult reduce_all(const Web& web, const StressState& stress, const TerminalConfig& cfg,
                        const Tolerances& tol = {});

/// Splits wires at nodes lying on them and merges duplicate wires (tensions add).
StressedWeb split_at_nodes(const StressedWeb& sw, const Tolerances& tol = {});

int max_internal_degree(const Web& web);

}  // namespace tensionweb
