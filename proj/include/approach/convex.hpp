#pragma once

// Closed convex target sets. Four shapes cover everything the library
// needs: half-spaces, boxes, Euclidean balls and bounded H-polytopes (with
// a vertex cache for projections). All geometry goes through distance() and
// project(); contains() is distance-based so the two can never disagree.

#include <limits>
#include <utility>
#include <vector>

#include "approach/common.hpp"
#include "approach/polytope.hpp"
#include "approach/qp.hpp"

namespace approach {

class ConvexTarget {
 public:
  enum class Kind { kHalfSpace, kBox, kBall, kPolytope };

  static ConvexTarget half_space(Vec a, double b) {
    require(norm2(a) > 0.0, "half_space: zero normal");
    require(all_finite(a) && std::isfinite(b), "half_space: non-finite data");
    ConvexTarget t;
    t.kind_ = Kind::kHalfSpace;
    t.dim_ = a.size();
    t.a_ = std::move(a);
    t.b_ = b;
    t.a_norm_ = norm2(t.a_);
    return t;
  }

  static ConvexTarget box(Vec lo, Vec hi) {
    require(lo.size() == hi.size() && !lo.empty(), "box: bound size mismatch");
    require(all_finite(lo) && all_finite(hi), "box: non-finite bounds");
    for (std::size_t i = 0; i < lo.size(); ++i)
      require(lo[i] <= hi[i], "box: lo must not exceed hi");
    ConvexTarget t;
    t.kind_ = Kind::kBox;
    t.dim_ = lo.size();
    t.lo_ = std::move(lo);
    t.hi_ = std::move(hi);
    return t;
  }

  static ConvexTarget ball(Vec center, double radius) {
    require(!center.empty() && all_finite(center), "ball: bad center");
    require(std::isfinite(radius) && radius >= 0.0, "ball: bad radius");
    ConvexTarget t;
    t.kind_ = Kind::kBall;
    t.dim_ = center.size();
    t.center_ = std::move(center);
    t.radius_ = radius;
    return t;
  }

  // Bounded, nonempty H-polytope; the vertex cache is built here once.
  static ConvexTarget polytope(HPolytope h) {
    ConvexTarget t;
    t.kind_ = Kind::kPolytope;
    t.dim_ = h.dim;
    t.vertices_ = enumerate_vertices(h);  // throws if unbounded
    require(!t.vertices_.empty(), "polytope target: empty polytope");
    t.hrep_ = std::move(h);
    return t;
  }

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  const std::vector<Vec>& vertices() const {
    require(kind_ == Kind::kPolytope, "vertices: polytope targets only");
    return vertices_;
  }

  // Defining data, guarded by kind; used by serialization and reporting.
  const Vec& halfspace_normal() const {
    require(kind_ == Kind::kHalfSpace, "halfspace_normal: wrong kind");
    return a_;
  }
  double halfspace_offset() const {
    require(kind_ == Kind::kHalfSpace, "halfspace_offset: wrong kind");
    return b_;
  }
  const Vec& box_lo() const {
    require(kind_ == Kind::kBox, "box_lo: wrong kind");
    return lo_;
  }
  const Vec& box_hi() const {
    require(kind_ == Kind::kBox, "box_hi: wrong kind");
    return hi_;
  }
  const Vec& ball_center() const {
    require(kind_ == Kind::kBall, "ball_center: wrong kind");
    return center_;
  }
  double ball_radius() const {
    require(kind_ == Kind::kBall, "ball_radius: wrong kind");
    return radius_;
  }
  const HPolytope& hrep() const {
    require(kind_ == Kind::kPolytope, "hrep: polytope targets only");
    return hrep_;
  }

  Vec project(const Vec& z) const {
    require(z.size() == dim_, "project: dimension mismatch");
    switch (kind_) {
      case Kind::kHalfSpace: {
        double viol = dot(a_, z) - b_;
        if (viol <= 0.0) return z;
        Vec p = z;
        axpy(p, -viol / (a_norm_ * a_norm_), a_);
        return p;
      }
      case Kind::kBox: {
        Vec p = z;
        for (std::size_t i = 0; i < dim_; ++i)
          p[i] = std::min(std::max(p[i], lo_[i]), hi_[i]);
        return p;
      }
      case Kind::kBall: {
        Vec r = sub(z, center_);
        double n = norm2(r);
        if (n <= radius_) return z;
        Vec p = center_;
        axpy(p, radius_ / n, r);
        return p;
      }
      case Kind::kPolytope:
        return project_onto_hull(vertices_, z).point;
    }
    return z;  // unreachable
  }

  double distance(const Vec& z) const {
    require(z.size() == dim_, "distance: dimension mismatch");
    switch (kind_) {
      case Kind::kHalfSpace:
        return std::max(0.0, (dot(a_, z) - b_) / a_norm_);
      case Kind::kBox: {
        double acc = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
          double e = std::max({lo_[i] - z[i], z[i] - hi_[i], 0.0});
          acc += e * e;
        }
        return std::sqrt(acc);
      }
      case Kind::kBall:
        return std::max(0.0, norm2(sub(z, center_)) - radius_);
      case Kind::kPolytope:
        return project_onto_hull(vertices_, z).distance;
    }
    return 0.0;  // unreachable
  }

  bool contains(const Vec& z, double eps = tol::geometry) const {
    return distance(z) <= eps;
  }

  // How far z sits inside the set (0 outside or on the boundary). Used by
  // the complement region below.
  double depth(const Vec& z) const {
    require(z.size() == dim_, "depth: dimension mismatch");
    switch (kind_) {
      case Kind::kHalfSpace:
        return std::max(0.0, (b_ - dot(a_, z)) / a_norm_);
      case Kind::kBox: {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < dim_; ++i)
          m = std::min({m, z[i] - lo_[i], hi_[i] - z[i]});
        return std::max(0.0, m);
      }
      case Kind::kBall:
        return std::max(0.0, radius_ - norm2(sub(z, center_)));
      case Kind::kPolytope: {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& [a, b] : facets())
          m = std::min(m, (b - dot(a, z)) / norm2(a));
        return std::max(0.0, m);
      }
    }
    return 0.0;  // unreachable
  }

  // Outer-normal half-space list (a, b) with the set inside {a.z <= b}.
  // Equality rows of a polytope H-rep expand into two facets.
  std::vector<std::pair<Vec, double>> facets() const {
    require(kind_ != Kind::kBall, "facets: not defined for ball targets");
    std::vector<std::pair<Vec, double>> out;
    switch (kind_) {
      case Kind::kHalfSpace:
        out.emplace_back(a_, b_);
        break;
      case Kind::kBox:
        for (std::size_t i = 0; i < dim_; ++i) {
          Vec up(dim_, 0.0), dn(dim_, 0.0);
          up[i] = 1.0;
          dn[i] = -1.0;
          out.emplace_back(std::move(up), hi_[i]);
          out.emplace_back(std::move(dn), -lo_[i]);
        }
        break;
      case Kind::kPolytope:
        for (std::size_t r = 0; r < hrep_.a_ineq.rows; ++r)
          out.emplace_back(hrep_.a_ineq.row(r), hrep_.b_ineq[r]);
        for (std::size_t r = 0; r < hrep_.a_eq.rows; ++r) {
          Vec a = hrep_.a_eq.row(r);
          out.emplace_back(a, hrep_.b_eq[r]);
          for (double& v : a) v = -v;
          out.emplace_back(std::move(a), -hrep_.b_eq[r]);
        }
        break;
      case Kind::kBall:
        break;  // unreachable
    }
    return out;
  }

 private:
  Kind kind_ = Kind::kBox;
  std::size_t dim_ = 0;
  Vec a_;  // half-space
  double b_ = 0.0;
  double a_norm_ = 1.0;
  Vec lo_, hi_;  // box
  Vec center_;   // ball
  double radius_ = 0.0;
  HPolytope hrep_;  // polytope
  std::vector<Vec> vertices_;
};

// The closed complement of the delta-neighborhood of a target:
// { z : d_C(z) >= delta }. Supplies the membership/distance pair that
// exclusion arguments need.
class ComplementRegion {
 public:
  ComplementRegion(ConvexTarget base, double delta)
      : base_(std::move(base)), delta_(delta) {
    require(delta_ >= 0.0 && std::isfinite(delta_),
            "delta_complement: bad delta");
  }

  bool contains(const Vec& z, double eps = tol::geometry) const {
    return base_.distance(z) >= delta_ - eps;
  }

  // Exact for every convex base: leaving the delta-neighborhood costs the
  // missing radial distance plus however deep inside the base z sits.
  double distance(const Vec& z) const {
    double d = base_.distance(z);
    if (d >= delta_) return 0.0;
    if (d > 0.0) return delta_ - d;
    return delta_ + base_.depth(z);
  }

  double delta() const { return delta_; }
  const ConvexTarget& base() const { return base_; }

 private:
  ConvexTarget base_;
  double delta_;
};

inline ComplementRegion delta_complement(const ConvexTarget& c, double delta) {
  return ComplementRegion(c, delta);
}

}  // namespace approach
