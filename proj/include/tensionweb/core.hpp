#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tensionweb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// One d-vector per terminal, stored column-wise (d x N).
using Displacement = Eigen::MatrixXd;
// One tension per web edge.
using StressState = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

struct Tolerances {
  double feas = 1e-9;  // LP feasibility slack
  double eq = 1e-9;    // equilibrium residual
  double geom = 1e-9;  // geometric coincidence

  void validate() const;
};

/// Points X and forces F of a problem instance, both stored d x N.
///
/// Construction enforces N >= 2, d in {2,3}, finite entries and pairwise
/// distinct positions (distance > tol.geom).
class TerminalConfig {
 public:
  TerminalConfig(Mat positions, Mat forces, const Tolerances& tol = {});

  int dimension() const { return static_cast<int>(positions_.rows()); }
  int size() const { return static_cast<int>(positions_.cols()); }

  const Mat& positions() const { return positions_; }
  const Mat& forces() const { return forces_; }
  auto position(int i) const { return positions_.col(i); }
  auto force(int i) const { return forces_.col(i); }

  double max_force() const;
  double min_distance() const;

  /// Same points, different loading (validated against this config).
  TerminalConfig with_forces(Mat forces) const;
  TerminalConfig with_positions(Mat positions) const;

 private:
  Mat positions_;
  Mat forces_;
  Tolerances tol_;
};

struct Edge {
  int i = 0;
  int j = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

inline constexpr int kInternal = -1;

/// A finite web: nodes (d x M) with terminal roles, and straight wires.
struct Web {
  Mat nodes;               // d x M
  std::vector<int> role;   // terminal index, or kInternal
  std::vector<Edge> edges; // i < j

  Web() = default;
  explicit Web(int dimension) : nodes(dimension, 0) {}

  int dimension() const { return static_cast<int>(nodes.rows()); }
  int node_count() const { return static_cast<int>(nodes.cols()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  auto node(int k) const { return nodes.col(k); }

  int add_node(const Eigen::Ref<const Vec>& p, int terminal = kInternal);
  /// Adds edge {min(a,b), max(a,b)} and returns its index.
  int add_edge(int a, int b);

  double length(int e) const;
  /// Unit vector from edge endpoint `from` toward the other endpoint.
  Vec direction_from(int e, int from) const;
  int terminal_node(int k) const;
  std::vector<int> degrees() const;
  std::vector<std::vector<int>> incident_edges() const;
  bool is_internal(int node_index) const { return role[node_index] == kInternal; }
};

/// Checks the Web invariants; when `cfg` is given also checks that every
/// terminal appears exactly once and sits at the configured position.
void validate(const Web& web, const TerminalConfig* cfg = nullptr, const Tolerances& tol = {});

/// Applied force per web node (terminal forces, zero at internal nodes).
Mat node_loads(const Web& web, const TerminalConfig& cfg);

/// Per-node force imbalance, d x M.
Mat node_residuals(const Web& web, const StressState& stress, const Mat& loads);

/// max over nodes of |applied + sum sigma_e * unit(toward other end)|.
double equilibrium_residual(const Web& web, const StressState& stress, const TerminalConfig& cfg);

/// Residual threshold for "supports": tol.eq scaled by max(1, max |f|).
double support_threshold(const TerminalConfig& cfg, const Tolerances& tol);
bool supports(const Web& web, const StressState& stress, const TerminalConfig& cfg,
              const Tolerances& tol = {});

bool is_balanced(const TerminalConfig& cfg, const Tolerances& tol = {});

/// Orthonormal basis of the infinitesimal rigid motions u_i = a + A x_i,
/// as columns of a dN x r matrix (column-major flattening of d x N).
/// r = d + d(d-1)/2 unless the points are degenerate (e.g. collinear in 3D).
Mat rigid_motion_matrix(const Mat& positions);
std::vector<Displacement> rigid_motion_basis(const TerminalConfig& cfg);

/// Orthogonal projection of a d x N field onto the balanced subspace B_X.
Displacement project_balanced(const Displacement& v, const Mat& positions);

inline Vec flatten(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }
inline Mat unflatten(const Vec& v, int d) {
  return Eigen::Map<const Mat>(v.data(), d, v.size() / d);
}

/// Affine hull of a point set: origin plus an orthonormal d x k basis.
struct AffineFrame {
  Vec origin;
  Mat basis;
  int rank() const { return static_cast<int>(basis.cols()); }
  Mat to_local(const Mat& points) const { return basis.transpose() * (points.colwise() - origin); }
  Mat to_global(const Mat& local) const { return (basis * local).colwise() + origin; }
};
AffineFrame affine_frame(const Mat& points, double tol);

/// Self-consistent scale used for relative tolerances.
double coordinate_scale(const Mat& points);

}  // namespace tensionweb
