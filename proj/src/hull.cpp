#include "tensionweb/hull.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tensionweb {

const char* to_string(HullSide s) {
  switch (s) {
    case HullSide::inside: return "inside";
    case HullSide::boundary: return "boundary";
    case HullSide::outside: return "outside";
  }
  return "unknown";
}

namespace {

double cross2(const Vec& o, const Vec& a, const Vec& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

}  // namespace

std::vector<int> hull_2d_clockwise(const Mat& pts, double tol) {
  const int n = static_cast<int>(pts.cols());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return pts(0, a) != pts(0, b) ? pts(0, a) < pts(0, b) : pts(1, a) < pts(1, b);
  });
  if (n < 3) return idx;
  const double scale = std::max(1.0, coordinate_scale(pts));
  // Andrew's monotone chain; collinear points dropped.
  std::vector<int> h(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross2(pts.col(h[k - 2]), pts.col(h[k - 1]), pts.col(idx[i])) <= tol * scale) --k;
    h[k++] = idx[i];
  }
  for (int i = n - 2, t = k + 1; i >= 0; --i) {
    while (k >= t && cross2(pts.col(h[k - 2]), pts.col(h[k - 1]), pts.col(idx[i])) <= tol * scale) --k;
    h[k++] = idx[i];
  }
  h.resize(k - 1);
  std::reverse(h.begin(), h.end());
  return h;
}

double signed_area(const Mat& polygon) {
  double a = 0.0;
  const auto n = polygon.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto j = (i + 1) % n;
    a += polygon(0, i) * polygon(1, j) - polygon(0, j) * polygon(1, i);
  }
  return 0.5 * a;
}

ConvexHull::ConvexHull(const Mat& points, double tol) : points_(points), tol_(tol) {
  if (points.rows() != 2 && points.rows() != 3) throw InvalidInput("hull: dimension must be 2 or 3");
  if (points.cols() == 0) throw InvalidInput("hull: empty point set");
  frame_ = affine_frame(points, tol);
  full_rank_ = frame_.rank() == ambient_dimension();
  const Mat local = full_rank_ ? Mat(points.colwise() - frame_.origin) : frame_.to_local(points);
  if (full_rank_) frame_.basis = Mat::Identity(ambient_dimension(), ambient_dimension());
  const int k = frame_.rank();
  const int n = static_cast<int>(points.cols());
  const double scale = std::max(1.0, coordinate_scale(points));

  if (k == 0) {
    vertices_ = {0};
    normals_ = Mat::Zero(0, 0);
    offsets_ = Vec::Zero(0);
    return;
  }
  if (k == 1) {
    int lo = 0, hi = 0;
    for (int i = 1; i < n; ++i) {
      if (local(0, i) < local(0, lo)) lo = i;
      if (local(0, i) > local(0, hi)) hi = i;
    }
    vertices_ = {lo, hi};
    normals_ = Mat(1, 2);
    normals_ << -1.0, 1.0;
    offsets_ = Vec(2);
    offsets_ << -local(0, lo), local(0, hi);
    return;
  }
  if (k == 2) {
    vertices_ = hull_2d_clockwise(local, tol);
    const int h = static_cast<int>(vertices_.size());
    normals_ = Mat(2, h);
    offsets_ = Vec(h);
    for (int e = 0; e < h; ++e) {
      const Vec a = local.col(vertices_[e]);
      const Vec b = local.col(vertices_[(e + 1) % h]);
      const Vec t = (b - a).normalized();
      // Clockwise order: outward normal is the left-hand perpendicular.
      Vec nrm(2);
      nrm << -t[1], t[0];
      normals_.col(e) = nrm;
      offsets_[e] = nrm.dot(a);
    }
    return;
  }
  // k == 3: facets by exhaustive plane search (terminal counts are small).
  std::vector<Vec> ns;
  std::vector<double> bs;
  std::vector<char> extreme(n, 0);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int c = b + 1; c < n; ++c) {
        Eigen::Vector3d nrm = Eigen::Vector3d(local.col(b) - local.col(a))
                                  .cross(Eigen::Vector3d(local.col(c) - local.col(a)));
        const double len = nrm.norm();
        if (len <= tol * scale * scale) continue;
        nrm /= len;
        const double off = nrm.dot(local.col(a));
        const Vec dists = (nrm.transpose() * local).transpose().array() - off;
        const bool below = dists.maxCoeff() <= tol * scale;
        const bool above = dists.minCoeff() >= -tol * scale;
        if (!below && !above) continue;
        Vec outward = below ? Vec(nrm) : Vec(-nrm);
        const double o = below ? off : -off;
        bool dup = false;
        for (std::size_t f = 0; f < ns.size() && !dup; ++f) {
          dup = (ns[f] - outward).norm() <= 1e-9 && std::abs(bs[f] - o) <= tol * scale;
        }
        for (int i = 0; i < n; ++i) {
          if (std::abs(dists[i]) <= tol * scale) extreme[i] = 1;
        }
        if (!dup) {
          ns.push_back(outward);
          bs.push_back(o);
        }
      }
    }
  }
  normals_ = Mat(3, static_cast<int>(ns.size()));
  offsets_ = Vec(static_cast<int>(ns.size()));
  for (std::size_t f = 0; f < ns.size(); ++f) {
    normals_.col(static_cast<int>(f)) = ns[f];
    offsets_[static_cast<int>(f)] = bs[f];
  }
  // Points on some facet (includes non-vertex boundary points).
  for (int i = 0; i < n; ++i) {
    if (extreme[i]) vertices_.push_back(i);
  }
}

double ConvexHull::signed_distance(const Eigen::Ref<const Vec>& q) const {
  if (q.size() != ambient_dimension()) throw InvalidInput("hull: query dimension mismatch");
  const Vec rel = q - frame_.origin;
  const Vec local = frame_.basis.transpose() * rel;
  const double off = (rel - frame_.basis * local).norm();
  if (frame_.rank() == 0) return off;
  const double facet = (normals_.transpose() * local - offsets_).maxCoeff();
  if (off > 0.0) return std::max(off, facet);
  return facet;
}

HullSide ConvexHull::classify(const Eigen::Ref<const Vec>& q) const {
  const double scale = std::max(1.0, coordinate_scale(points_));
  const Vec rel = q - frame_.origin;
  const Vec local = frame_.basis.transpose() * rel;
  const double off = (rel - frame_.basis * local).norm();
  if (off > tol_ * scale) return HullSide::outside;
  if (frame_.rank() == 0) return HullSide::boundary;
  const double facet = (normals_.transpose() * local - offsets_).maxCoeff();
  if (facet > tol_ * scale) return HullSide::outside;
  if (facet >= -tol_ * scale) return HullSide::boundary;
  return HullSide::inside;
}

}  // namespace tensionweb
