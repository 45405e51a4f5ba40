#pragma once

#include "tensionweb/core.hpp"

#include <vector>

namespace tensionweb {

enum class HullSide { inside, boundary, outside };

const char* to_string(HullSide s);

/// Convex hull of a 2D or 3D point set.
///
/// Degenerate sets (collinear / coplanar) are handled in their affine hull;
/// `degenerate()` reports it. "inside" means relatively interior.
class ConvexHull {
 public:
  ConvexHull(const Mat& points, double tol = 1e-9);

  int ambient_dimension() const { return static_cast<int>(points_.rows()); }
  int intrinsic_dimension() const { return frame_.rank(); }
  bool degenerate() const { return frame_.rank() < ambient_dimension(); }

  /// 2D full-rank hulls: vertex indices in clockwise order.
  /// Otherwise: indices of the points on the hull boundary (unordered).
  const std::vector<int>& vertices() const { return vertices_; }

  /// Facets as unit outward normals n_k and offsets b_k (n_k . y <= b_k),
  /// expressed in the frame's local coordinates.
  const Mat& normals() const { return normals_; }
  const Vec& offsets() const { return offsets_; }

  HullSide classify(const Eigen::Ref<const Vec>& q) const;
  /// Positive outside, <= 0 inside (max facet violation, plus off-plane distance).
  double signed_distance(const Eigen::Ref<const Vec>& q) const;

 private:
  Mat points_;
  AffineFrame frame_;
  bool full_rank_ = false;
  std::vector<int> vertices_;
  Mat normals_;
  Vec offsets_;
  double tol_;
};

/// Vertices of the 2D convex hull in clockwise order (indices into `pts`).
std::vector<int> hull_2d_clockwise(const Mat& pts, double tol);

/// Polygon area (positive for counter-clockwise order).
double signed_area(const Mat& polygon);

}  // namespace tensionweb
