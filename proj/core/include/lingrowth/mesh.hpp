#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace lingrowth {

enum class BoundaryTag { Interior, Inner, Outer };

using Point = Eigen::Vector2d;
using Triangle = std::array<int, 3>;

/// Structured triangulation of the annulus r_in <= |x| <= r_out (or the disk
/// when r_in == 0): n_r + 1 rings of n_theta nodes, each polar quad split into
/// two triangles along the same diagonal. A disk has a single center node and a
/// triangle fan in place of ring 0. Boundary nodes are placed at exactly
/// r (cos theta, sin theta) on the bounding circles.
class PolarMesh {
public:
  /// Uniform rings. Throws ConfigError unless 0 <= r_in < r_out and
  /// n_r, n_theta >= 3.
  PolarMesh(double r_in, double r_out, int n_r, int n_theta);

  /// Explicit ring radii, strictly increasing, starting at r_in (0 for a
  /// disk); at least 4 of them.
  PolarMesh(std::vector<double> radii, int n_theta);

  /// Uniform rings of spacing (r_out - r_in) / n_r, except that the first
  /// spacing at the inner circle is `first_spacing` and the following ones grow
  /// by `growth` until they reach the uniform spacing.
  static PolarMesh with_inner_layer(double r_in, double r_out, int n_r, int n_theta, double first_spacing,
                                    double growth = 1.5);

  double r_in() const noexcept { return r_in_; }
  double r_out() const noexcept { return r_out_; }
  int n_r() const noexcept { return n_r_; }
  int n_theta() const noexcept { return n_theta_; }
  bool is_disk() const noexcept { return r_in_ == 0.0; }

  /// Largest radial spacing.
  double h() const noexcept { return h_; }

  const std::vector<Point>& nodes() const noexcept { return nodes_; }
  const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
  const std::vector<BoundaryTag>& boundary_tags() const noexcept { return tags_; }

  int num_nodes() const noexcept { return static_cast<int>(nodes_.size()); }
  int num_triangles() const noexcept { return static_cast<int>(triangles_.size()); }
  bool is_boundary(int node) const { return tags_[node] != BoundaryTag::Interior; }

  /// Node on ring i (0 = inner circle or center) at angle index j (mod n_theta).
  int node_index(int ring, int sector) const;
  double ring_radius(int ring) const;
  /// Ring of a node (0 for the center of a disk).
  int ring_of(int node) const;

  /// Signed area of a triangle (positive for counterclockwise orientation).
  double triangle_area(int t) const;
  /// Sum of triangle areas.
  double area() const;

  /// Continuous piecewise-linear interpolation of nodal values at p. Points
  /// slightly outside the polygonal domain are extrapolated from the nearest
  /// triangle.
  double interpolate(const std::vector<double>& values, const Point& p) const;

  /// Same rings and angular resolution (and hence identical nodes and triangles).
  bool same_as(const PolarMesh& other) const noexcept;

private:
  void build();

  double r_in_;
  double r_out_;
  int n_r_;
  int n_theta_;
  double h_ = 0.0;
  std::vector<double> radii_;
  std::vector<Point> nodes_;
  std::vector<Triangle> triangles_;
  std::vector<BoundaryTag> tags_;
};

} // namespace lingrowth
