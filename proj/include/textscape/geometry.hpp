#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "textscape/error.hpp"

namespace textscape {

struct EmbeddingStore;

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using Polygon = std::vector<Point2<Scalar>>;

template <typename Scalar>
Scalar cross(const Point2<Scalar>& o, const Point2<Scalar>& a, const Point2<Scalar>& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

/// Counter-clockwise hull by monotone chain. Collinear boundary points and
/// duplicates are dropped; one or two distinct points give a degenerate hull.
template <typename Scalar>
Polygon<Scalar> convex_hull(Polygon<Scalar> points) {
  auto less = [](const Point2<Scalar>& a, const Point2<Scalar>& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  };
  std::sort(points.begin(), points.end(), less);
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() <= 2) return points;

  Polygon<Scalar> hull(2 * points.size());
  std::size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= Scalar(0)) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= Scalar(0)) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

/// Rows of `points` are the inputs (N x 2).
template <typename Derived>
Polygon<typename Derived::Scalar> convex_hull(const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  Polygon<Scalar> pts;
  pts.reserve(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) pts.emplace_back(points(i, 0), points(i, 1));
  return convex_hull(std::move(pts));
}

struct MedianOptions {
  int max_iterations = 100;
  double tolerance = 1e-6;
  double epsilon = 1e-9;
};

/// Sum of Euclidean distances from `center` to every row of `points`.
template <typename Derived, typename CenterDerived>
typename Derived::Scalar distance_sum(const Eigen::MatrixBase<Derived>& points,
                                      const Eigen::MatrixBase<CenterDerived>& center) {
  return (points.rowwise() - center.transpose()).rowwise().norm().sum();
}

/// Weiszfeld iteration started from the centroid. Distances are floored at
/// `epsilon` so iterates landing on a data point stay defined. Returns the
/// best iterate seen, so the result never does worse than the centroid.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> geometric_median(
    const Eigen::MatrixBase<Derived>& points, const MedianOptions& options = {}) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (points.rows() == 0) throw Error(Errc::invalid_argument, "geometric median of an empty set");

  Vector current = points.colwise().mean().transpose();
  if (points.rows() <= 2) return current;

  Vector best = current;
  Scalar best_cost = distance_sum(points, current);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    Vector numerator = Vector::Zero(points.cols());
    Scalar denominator(0);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      const Scalar dist = std::max<Scalar>((points.row(i).transpose() - current).norm(),
                                           static_cast<Scalar>(options.epsilon));
      numerator += points.row(i).transpose() / dist;
      denominator += Scalar(1) / dist;
    }
    Vector next = numerator / denominator;
    const Scalar step = (next - current).norm();
    current = std::move(next);
    const Scalar cost = distance_sum(points, current);
    if (cost < best_cost) {
      best_cost = cost;
      best = current;
    }
    if (step < static_cast<Scalar>(options.tolerance)) break;
  }
  return best;
}

/// Boundary-inclusive even-odd test.
template <typename Scalar>
bool point_in_polygon(const Polygon<Scalar>& polygon, const Point2<Scalar>& p) {
  const std::size_t n = polygon.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = polygon[i];
    const auto& b = polygon[j];
    const Scalar c = cross(a, b, p);
    const bool within_box = p.x() >= std::min(a.x(), b.x()) && p.x() <= std::max(a.x(), b.x()) &&
                            p.y() >= std::min(a.y(), b.y()) && p.y() <= std::max(a.y(), b.y());
    const Scalar scale = std::max<Scalar>((b - a).norm(), Scalar(1));
    if (within_box && std::abs(c) <= Scalar(1e-12) * scale) return true;
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const Scalar x_cross = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x_cross) inside = !inside;
    }
  }
  return inside;
}

// ---------------------------------------------------------------------------
// Projection

enum class ProjectionMethod { pca, tsne };

std::string to_string(ProjectionMethod method);
ProjectionMethod parse_projection_method(const std::string& name);

struct ProjectionParams {
  double perplexity = 30.0;
  int iterations = 1000;
  double early_exaggeration = 12.0;
  int exaggeration_iterations = 250;
  double learning_rate = 200.0;
  // 0 selects min(50, d).
  int pca_dims = 0;
  ProjectionMethod method = ProjectionMethod::tsne;

  bool operator==(const ProjectionParams&) const = default;
};

/// 2-D coordinates for every sample. `params` holds the effective values
/// (perplexity after clamping, resolved pca_dims).
struct ProjectedLayout {
  Eigen::MatrixXd positions;
  ProjectionMethod method = ProjectionMethod::tsne;
  std::uint64_t seed = 42;
  ProjectionParams params;
  std::vector<std::string> warnings;
};

/// PCA to params.pca_dims, then exact t-SNE (or the first two principal
/// components for ProjectionMethod::pca). Output is centered at the origin and
/// rounded to float32 precision so it survives the layout cache unchanged.
ProjectedLayout project(const Eigen::MatrixXd& embeddings, ProjectionParams params,
                        std::uint64_t seed = 42);
ProjectedLayout project(const EmbeddingStore& store, ProjectionParams params,
                        std::uint64_t seed = 42);

/// Principal component scores (M x dims), deterministic sign convention.
Eigen::MatrixXd pca_reduce(const Eigen::MatrixXd& data, Eigen::Index dims);

/// Symmetrized t-SNE affinities: entries sum to 1, zero diagonal.
Eigen::MatrixXd joint_probabilities(const Eigen::MatrixXd& data, double perplexity);

/// Analytic gradient of KL(P || Q) for a Student-t kernel on Y (M x 2).
Eigen::MatrixXd tsne_gradient(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Y);

/// KL(P || Q(Y)).
double kl_divergence(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Y);

/// The random start used by project() for a given sample count and seed.
Eigen::MatrixXd tsne_initial_positions(Eigen::Index count, std::uint64_t seed);

void write_layout(const std::filesystem::path& path, const ProjectedLayout& layout);
ProjectedLayout read_layout(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Region selection

struct RegionSelector {
  enum class Kind { all, viewport_rect, lasso_polygon };
  Kind kind = Kind::all;
  Polygon<double> vertices;

  static RegionSelector all() { return {}; }
  static RegionSelector rect(Point2<double> a, Point2<double> b) {
    return {Kind::viewport_rect, {a, b}};
  }
  static RegionSelector lasso(Polygon<double> polygon) {
    return {Kind::lasso_polygon, std::move(polygon)};
  }
};

/// Throws Errc::invalid_region.
void validate(const RegionSelector& selector);

/// Sorted indices of rows of `positions` inside the region (boundary inclusive).
std::vector<std::size_t> select_region(const Eigen::MatrixXd& positions,
                                       const RegionSelector& selector);
inline std::vector<std::size_t> select_region(const ProjectedLayout& layout,
                                              const RegionSelector& selector) {
  return select_region(layout.positions, selector);
}

}  // namespace textscape
