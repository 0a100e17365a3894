#include "lingrowth/mesh.hpp"

#include "lingrowth/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace lingrowth {

namespace {

std::vector<double> uniform_radii(double r_in, double r_out, int n_r) {
  std::vector<double> radii;
  for (int i = 0; i < n_r; ++i) {
    radii.push_back(r_in + (r_out - r_in) * i / n_r);
  }
  radii.push_back(r_out);
  return radii;
}

} // namespace

PolarMesh::PolarMesh(double r_in, double r_out, int n_r, int n_theta)
    : r_in_(r_in), r_out_(r_out), n_r_(n_r), n_theta_(n_theta) {
  if (!(r_in >= 0.0) || !(r_out > r_in) || !std::isfinite(r_out) || n_r < 3 || n_theta < 3) {
    std::ostringstream msg;
    msg << "PolarMesh: invalid parameters r_in = " << r_in << ", r_out = " << r_out
        << ", n_r = " << n_r << ", n_theta = " << n_theta;
    throw ConfigError(msg.str());
  }
  radii_ = uniform_radii(r_in, r_out, n_r);
  build();
}

PolarMesh::PolarMesh(std::vector<double> radii, int n_theta)
    : r_in_(radii.empty() ? 0.0 : radii.front()), r_out_(radii.empty() ? 0.0 : radii.back()),
      n_r_(static_cast<int>(radii.size()) - 1), n_theta_(n_theta), radii_(std::move(radii)) {
  bool ok = n_r_ >= 3 && n_theta >= 3 && r_in_ >= 0.0 && std::isfinite(r_out_);
  for (int i = 0; ok && i < n_r_; ++i) {
    ok = radii_[i + 1] > radii_[i];
  }
  if (!ok) {
    throw ConfigError("PolarMesh: ring radii must be at least 4 strictly increasing values from r_in >= 0, "
                      "and n_theta >= 3");
  }
  build();
}

PolarMesh PolarMesh::with_inner_layer(double r_in, double r_out, int n_r, int n_theta, double first_spacing,
                                      double growth) {
  if (!(r_in >= 0.0) || !(r_out > r_in) || n_r < 3 || !(first_spacing > 0.0) || !(growth > 1.0)) {
    throw ConfigError("PolarMesh: invalid inner layer parameters");
  }
  const double h = (r_out - r_in) / n_r;
  std::vector<double> layer{r_in};
  for (double step = first_spacing; step < h; step *= growth) {
    layer.push_back(layer.back() + step);
  }
  // The rest of the annulus gets equal spacings no larger than h.
  const double start = layer.back();
  const double rest = r_out - start;
  const int count = std::max(1, static_cast<int>(std::ceil(rest / h - 1e-9)));
  for (int i = 1; i < count; ++i) {
    layer.push_back(start + rest * i / count);
  }
  layer.push_back(r_out);
  return PolarMesh(std::move(layer), n_theta);
}

void PolarMesh::build() {
  for (int i = 0; i < n_r_; ++i) {
    h_ = std::max(h_, radii_[i + 1] - radii_[i]);
  }

  const int first_ring = is_disk() ? 1 : 0;
  if (is_disk()) {
    nodes_.emplace_back(0.0, 0.0);
    tags_.push_back(BoundaryTag::Interior);
  }
  for (int i = first_ring; i <= n_r_; ++i) {
    const double r = ring_radius(i);
    BoundaryTag tag = BoundaryTag::Interior;
    if (i == n_r_) {
      tag = BoundaryTag::Outer;
    } else if (i == 0) {
      tag = BoundaryTag::Inner;
    }
    for (int j = 0; j < n_theta_; ++j) {
      const double theta = 2.0 * std::numbers::pi * j / n_theta_;
      nodes_.emplace_back(r * std::cos(theta), r * std::sin(theta));
      tags_.push_back(tag);
    }
  }

  if (is_disk()) {
    for (int j = 0; j < n_theta_; ++j) {
      triangles_.push_back({0, node_index(1, j), node_index(1, j + 1)});
    }
  }
  for (int i = first_ring; i < n_r_; ++i) {
    for (int j = 0; j < n_theta_; ++j) {
      const int a = node_index(i, j);
      const int b = node_index(i + 1, j);
      const int c = node_index(i + 1, j + 1);
      const int d = node_index(i, j + 1);
      triangles_.push_back({a, b, c});
      triangles_.push_back({a, c, d});
    }
  }
}

int PolarMesh::node_index(int ring, int sector) const {
  sector = ((sector % n_theta_) + n_theta_) % n_theta_;
  if (is_disk()) {
    return ring == 0 ? 0 : 1 + (ring - 1) * n_theta_ + sector;
  }
  return ring * n_theta_ + sector;
}

double PolarMesh::ring_radius(int ring) const { return radii_.at(static_cast<std::size_t>(ring)); }

int PolarMesh::ring_of(int node) const {
  if (is_disk()) {
    return node == 0 ? 0 : 1 + (node - 1) / n_theta_;
  }
  return node / n_theta_;
}

double PolarMesh::triangle_area(int t) const {
  const Triangle& tri = triangles_[t];
  const Point e1 = nodes_[tri[1]] - nodes_[tri[0]];
  const Point e2 = nodes_[tri[2]] - nodes_[tri[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

double PolarMesh::area() const {
  double sum = 0.0;
  for (int t = 0; t < num_triangles(); ++t) {
    sum += triangle_area(t);
  }
  return sum;
}

namespace {

// Barycentric coordinates of p in triangle (a, b, c).
Eigen::Vector3d barycentric(const Point& a, const Point& b, const Point& c, const Point& p) {
  const double det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
  const double l1 = ((b.x() - p.x()) * (c.y() - p.y()) - (c.x() - p.x()) * (b.y() - p.y())) / det;
  const double l2 = ((c.x() - p.x()) * (a.y() - p.y()) - (a.x() - p.x()) * (c.y() - p.y())) / det;
  return {l1, l2, 1.0 - l1 - l2};
}

} // namespace

double PolarMesh::interpolate(const std::vector<double>& values, const Point& p) const {
  const double rho = p.norm();
  double theta = std::atan2(p.y(), p.x());
  if (theta < 0.0) {
    theta += 2.0 * std::numbers::pi;
  }
  const int sector = static_cast<int>(std::floor(theta / (2.0 * std::numbers::pi) * n_theta_));
  int band = static_cast<int>(std::upper_bound(radii_.begin(), radii_.end(), rho) - radii_.begin()) - 1;
  band = std::max(0, std::min(band, n_r_ - 1));

  // Triangles of the quads around (band, sector); chords make the polar index
  // approximate, so neighbouring bands and sectors are searched too.
  double best_min = -std::numeric_limits<double>::infinity();
  double best_value = 0.0;
  for (int db = -1; db <= 1; ++db) {
    const int b = band + db;
    if (b < 0 || b >= n_r_) {
      continue;
    }
    for (int ds = -1; ds <= 1; ++ds) {
      const int s = sector + ds;
      std::array<Triangle, 2> candidates;
      int count = 0;
      if (is_disk() && b == 0) {
        candidates[count++] = {0, node_index(1, s), node_index(1, s + 1)};
      } else {
        const int a = node_index(b, s);
        const int bb = node_index(b + 1, s);
        const int c = node_index(b + 1, s + 1);
        const int d = node_index(b, s + 1);
        candidates[count++] = {a, bb, c};
        candidates[count++] = {a, c, d};
      }
      for (int k = 0; k < count; ++k) {
        const Triangle& tri = candidates[k];
        const Eigen::Vector3d lambda = barycentric(nodes_[tri[0]], nodes_[tri[1]], nodes_[tri[2]], p);
        const double lo = lambda.minCoeff();
        if (lo > best_min) {
          best_min = lo;
          best_value = lambda[0] * values[tri[0]] + lambda[1] * values[tri[1]] + lambda[2] * values[tri[2]];
        }
      }
    }
  }
  return best_value;
}

bool PolarMesh::same_as(const PolarMesh& other) const noexcept {
  return r_in_ == other.r_in_ && r_out_ == other.r_out_ && n_r_ == other.n_r_ &&
         n_theta_ == other.n_theta_ && radii_ == other.radii_;
}

} // namespace lingrowth
