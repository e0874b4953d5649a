#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "textscape/geometry.hpp"
#include "textscape/ingest.hpp"

namespace textscape {
namespace {

constexpr double kEntropyTolerance = 1e-5;
constexpr int kMaxBisection = 200;
constexpr double kMomentum = 0.5;
constexpr double kFinalMomentum = 0.8;
constexpr int kMomentumSwitch = 250;
constexpr double kMinGain = 0.01;

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x) {
  const Eigen::VectorXd norms = x.rowwise().squaredNorm();
  Eigen::MatrixXd d = (-2.0 * x * x.transpose()).colwise() + norms;
  d.rowwise() += norms.transpose();
  d = d.cwiseMax(0.0);
  d.diagonal().setZero();
  return d;
}

// Conditional affinities for row i whose entropy matches log(perplexity).
void fit_row(const Eigen::MatrixXd& dist, Eigen::Index i, double log_perplexity,
             Eigen::MatrixXd& conditional) {
  const Eigen::Index m = dist.rows();
  double beta = 1.0;
  double lo = -std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::max();
  // Distances relative to the nearest neighbor.
  double nearest = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < m; ++j) {
    if (j != i) nearest = std::min(nearest, dist(i, j));
  }
  Eigen::VectorXd row(m);
  for (int iter = 0; iter < kMaxBisection; ++iter) {
    for (Eigen::Index j = 0; j < m; ++j) row(j) = j == i ? 0.0 : std::exp(-beta * (dist(i, j) - nearest));
    const double sum = row.sum();
    double weighted = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) weighted += beta * (dist(i, j) - nearest) * row(j);
    const double entropy = std::log(sum) + weighted / sum;
    const double diff = entropy - log_perplexity;
    row /= sum;
    if (std::abs(diff) < kEntropyTolerance) break;
    if (diff > 0) {
      lo = beta;
      beta = hi == std::numeric_limits<double>::max() ? beta * 2.0 : (beta + hi) / 2.0;
    } else {
      hi = beta;
      beta = lo == -std::numeric_limits<double>::max() ? beta / 2.0 : (beta + lo) / 2.0;
    }
  }
  conditional.row(i) = row.transpose();
}

void check_symmetric(const Eigen::MatrixXd& P) {
  if (P.rows() != P.cols()) throw Error(Errc::invalid_argument, "affinity matrix must be square");
  const double scale = std::max(P.cwiseAbs().maxCoeff(), 1e-300);
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(Errc::invalid_argument, "affinity matrix must be symmetric");
  }
}

// Unnormalized Student-t kernel (zero diagonal) and its total.
Eigen::MatrixXd student_kernel(const Eigen::MatrixXd& Y, double* total) {
  Eigen::MatrixXd w = (1.0 + squared_distances(Y).array()).inverse().matrix();
  w.diagonal().setZero();
  *total = w.sum();
  return w;
}

void round_to_float(Eigen::MatrixXd& m) {
  m = m.cast<float>().cast<double>();
}

}  // namespace

std::string to_string(ProjectionMethod method) {
  return method == ProjectionMethod::pca ? "pca" : "tsne";
}

ProjectionMethod parse_projection_method(const std::string& name) {
  if (name == "pca") return ProjectionMethod::pca;
  if (name == "tsne") return ProjectionMethod::tsne;
  throw Error(Errc::invalid_argument, "unknown projection method \"" + name + "\"");
}

Eigen::MatrixXd pca_reduce(const Eigen::MatrixXd& data, Eigen::Index dims) {
  const Eigen::Index m = data.rows();
  const Eigen::Index d = data.cols();
  dims = std::min(dims, d);
  const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();

  Eigen::MatrixXd scores(m, dims);
  if (d <= m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(centered.transpose() * centered);
    // Eigenvalues come out ascending.
    const Eigen::MatrixXd basis = solver.eigenvectors().rightCols(dims).rowwise().reverse();
    scores = centered * basis;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(centered * centered.transpose());
    const Eigen::Index k = std::min(dims, m);
    const Eigen::VectorXd values = solver.eigenvalues().tail(k).reverse().cwiseMax(0.0);
    const Eigen::MatrixXd vectors = solver.eigenvectors().rightCols(k).rowwise().reverse();
    scores.setZero();
    scores.leftCols(k) = vectors * values.cwiseSqrt().asDiagonal();
  }
  for (Eigen::Index c = 0; c < scores.cols(); ++c) {
    Eigen::Index arg;
    scores.col(c).cwiseAbs().maxCoeff(&arg);
    if (scores(arg, c) < 0.0) scores.col(c) *= -1.0;
  }
  return scores;
}

Eigen::MatrixXd joint_probabilities(const Eigen::MatrixXd& data, double perplexity) {
  const Eigen::Index m = data.rows();
  if (m < 2) throw Error(Errc::invalid_argument, "need at least two points");
  if (!(perplexity > 0.0)) throw Error(Errc::invalid_argument, "perplexity must be positive");
  Eigen::MatrixXd x = data.rowwise() - data.colwise().mean();
  const double max_abs = x.cwiseAbs().maxCoeff();
  if (max_abs > 0.0) x /= max_abs;

  const Eigen::MatrixXd dist = squared_distances(x);
  Eigen::MatrixXd conditional = Eigen::MatrixXd::Zero(m, m);
  const double log_perplexity = std::log(perplexity);
  for (Eigen::Index i = 0; i < m; ++i) fit_row(dist, i, log_perplexity, conditional);

  Eigen::MatrixXd P = conditional + conditional.transpose();
  P /= P.sum();
  return P;
}

Eigen::MatrixXd tsne_gradient(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Y) {
  check_symmetric(P);
  if (Y.rows() != P.rows()) throw Error(Errc::invalid_argument, "positions and affinities disagree in size");
  double total = 0.0;
  const Eigen::MatrixXd w = student_kernel(Y, &total);
  // dC/dy_i = 4 * sum_j (p_ij - q_ij) w_ij (y_i - y_j)
  const Eigen::MatrixXd stiffness = ((P.array() - w.array() / total) * w.array()).matrix();
  const Eigen::VectorXd row_sums = stiffness.rowwise().sum();
  return 4.0 * (row_sums.asDiagonal() * Y - stiffness * Y);
}

double kl_divergence(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Y) {
  double total = 0.0;
  const Eigen::MatrixXd w = student_kernel(Y, &total);
  double kl = 0.0;
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
      if (i == j || P(i, j) <= 0.0) continue;
      const double q = std::max(w(i, j) / total, std::numeric_limits<double>::min());
      kl += P(i, j) * std::log(P(i, j) / q);
    }
  }
  return kl;
}

Eigen::MatrixXd tsne_initial_positions(Eigen::Index count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1e-4);
  Eigen::MatrixXd y(count, 2);
  for (Eigen::Index i = 0; i < count; ++i) {
    y(i, 0) = normal(rng);
    y(i, 1) = normal(rng);
  }
  return y;
}

ProjectedLayout project(const Eigen::MatrixXd& embeddings, ProjectionParams params,
                        std::uint64_t seed) {
  const Eigen::Index m = embeddings.rows();
  if (m < 2) throw Error(Errc::invalid_argument, "projection needs at least two samples");
  if (!embeddings.allFinite()) throw Error(Errc::non_finite_value, "embeddings contain a non-finite value");
  if (!(params.perplexity > 0.0) || params.iterations <= 0 || !(params.learning_rate > 0.0) ||
      !(params.early_exaggeration > 0.0) || params.exaggeration_iterations < 0 || params.pca_dims < 0) {
    throw Error(Errc::invalid_argument, "projection parameters must be positive");
  }

  ProjectedLayout layout;
  layout.method = params.method;
  layout.seed = seed;
  if (params.pca_dims == 0) params.pca_dims = static_cast<int>(std::min<Eigen::Index>(50, embeddings.cols()));
  params.perplexity = std::min(params.perplexity, static_cast<double>(m - 1) / 3.0);
  layout.params = params;

  const Eigen::MatrixXd reduced =
      pca_reduce(embeddings, std::max<Eigen::Index>(params.pca_dims, 2));
  const bool degenerate =
      (embeddings.rowwise() - embeddings.row(0)).cwiseAbs().maxCoeff() == 0.0;

  if (params.method == ProjectionMethod::pca || degenerate) {
    if (degenerate && params.method == ProjectionMethod::tsne) {
      layout.warnings.push_back("all embeddings are identical; returning the PCA layout");
    }
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(m, 2);
    y.leftCols(std::min<Eigen::Index>(2, reduced.cols())) =
        reduced.leftCols(std::min<Eigen::Index>(2, reduced.cols()));
    y.rowwise() -= y.colwise().mean();
    round_to_float(y);
    layout.positions = std::move(y);
    return layout;
  }

  Eigen::MatrixXd P = joint_probabilities(reduced.leftCols(params.pca_dims), params.perplexity);
  Eigen::MatrixXd y = tsne_initial_positions(m, seed);
  Eigen::MatrixXd velocity = Eigen::MatrixXd::Zero(m, 2);
  Eigen::MatrixXd gains = Eigen::MatrixXd::Ones(m, 2);

  P *= params.early_exaggeration;
  for (int iter = 0; iter < params.iterations; ++iter) {
    if (iter == params.exaggeration_iterations) P /= params.early_exaggeration;
    const double momentum = iter < kMomentumSwitch ? kMomentum : kFinalMomentum;

    // The exaggerated P does not sum to one, so the gradient is formed here
    // rather than through tsne_gradient().
    double total = 0.0;
    const Eigen::MatrixXd w = student_kernel(y, &total);
    const Eigen::MatrixXd stiffness = ((P.array() - w.array() / total) * w.array()).matrix();
    const Eigen::MatrixXd grad =
        4.0 * (stiffness.rowwise().sum().asDiagonal() * y - stiffness * y);

    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index c = 0; c < 2; ++c) {
        const bool same_sign = (grad(i, c) > 0.0) == (velocity(i, c) > 0.0);
        gains(i, c) = same_sign ? gains(i, c) * 0.8 : gains(i, c) + 0.2;
        gains(i, c) = std::max(gains(i, c), kMinGain);
      }
    }
    velocity = momentum * velocity - params.learning_rate * gains.cwiseProduct(grad);
    y += velocity;
    y.rowwise() -= y.colwise().mean();
  }
  round_to_float(y);
  if (!y.allFinite()) throw Error(Errc::degenerate_input, "t-SNE diverged");
  layout.positions = std::move(y);
  return layout;
}

ProjectedLayout project(const EmbeddingStore& store, ProjectionParams params, std::uint64_t seed) {
  return project(store.samples(), params, seed);
}

}  // namespace textscape
