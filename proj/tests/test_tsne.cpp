#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "support.hpp"

using namespace textscape;

namespace {

Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-12);
}

}  // namespace

TEST_CASE("joint probabilities") {
  std::mt19937_64 rng(4);
  const auto x = gaussian(rng, 20, 5);
  const auto P = joint_probabilities(x, 5.0);
  CHECK(P.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((P - P.transpose()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(P.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK(P.minCoeff() >= 0.0);
  CHECK_THROWS_AS(joint_probabilities(x.topRows(1), 5.0), Error);
  const auto tiny = joint_probabilities(x.topRows(3), 2.0 / 3.0);
  CHECK(tiny.allFinite());
  CHECK(tiny.sum() == doctest::Approx(1.0));
  CHECK_THROWS_AS(joint_probabilities(x, 0.0), Error);
}

TEST_CASE("KL divergence matches the explicit formula") {
  std::mt19937_64 rng(8);
  const auto P = joint_probabilities(gaussian(rng, 12, 4), 3.0);
  const auto Y = gaussian(rng, 12, 2);
  CHECK(kl_divergence(P, Y) == doctest::Approx(oracle::naive_kl(P, Y)).epsilon(1e-12));
}

TEST_CASE("gradient against central finite differences") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto P = joint_probabilities(gaussian(rng, 10, 5), 3.0);
    const auto Y = gaussian(rng, 10, 2);
    const auto fd = oracle::finite_difference([&](const Eigen::MatrixXd& y) { return oracle::naive_kl(P, y); }, Y, 1e-5);
    CHECK(relative_error(tsne_gradient(P, Y), fd) <= 1e-4);
  }
}

TEST_CASE("stationary points and descent") {
  SUBCASE("uniform P on an equilateral triangle") {
    Eigen::MatrixXd P = Eigen::MatrixXd::Constant(3, 3, 1.0 / 6.0);
    P.diagonal().setZero();
    Eigen::MatrixXd Y(3, 2);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < 3; ++i) Y.row(i) << std::cos(2 * pi * i / 3), std::sin(2 * pi * i / 3);
    CHECK(tsne_gradient(P, Y).norm() < 1e-12);
  }
  SUBCASE("small-step descent lowers KL and shrinks the gradient") {
    std::mt19937_64 rng(2);
    const auto P = joint_probabilities(gaussian(rng, 6, 4), 1.5);
    Eigen::MatrixXd Y = gaussian(rng, 6, 2);
    const double initial_norm = tsne_gradient(P, Y).norm();
    double previous = kl_divergence(P, Y);
    bool monotone = true;
    for (int it = 0; it < 2000; ++it) {
      Y -= 0.1 * tsne_gradient(P, Y);
      const double kl = kl_divergence(P, Y);
      monotone = monotone && kl <= previous + 1e-15;
      previous = kl;
    }
    CHECK(monotone);
    CHECK(tsne_gradient(P, Y).norm() < 0.1 * initial_norm);
  }
}

TEST_CASE("project") {
  std::mt19937_64 rng(13);
  ProjectionParams params;
  params.iterations = 300;

  SUBCASE("two samples are symmetric about the origin") {
    const auto x = gaussian(rng, 2, 6);
    const auto layout = project(x, params, 42);
    CHECK((layout.positions.row(0) + layout.positions.row(1)).norm() < 1e-6);
    CHECK(layout.params.perplexity == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("12 points in 5-D, seed 7: KL does not increase") {
    const auto x = gaussian(rng, 12, 5);
    const auto layout = project(x, params, 7);
    const auto P = joint_probabilities(pca_reduce(x, 5), layout.params.perplexity);
    const double initial = oracle::naive_kl(P, tsne_initial_positions(12, 7));
    CHECK(oracle::naive_kl(P, layout.positions) <= initial);
  }
  SUBCASE("deterministic per seed, different across seeds") {
    const auto x = gaussian(rng, 30, 8);
    const auto a = project(x, params, 42);
    const auto b = project(x, params, 42);
    const auto c = project(x, params, 43);
    CHECK(a.positions == b.positions);
    CHECK(a.positions != c.positions);
  }
  SUBCASE("output is centered and float32-exact") {
    const auto layout = project(gaussian(rng, 25, 4), params, 42);
    CHECK(layout.positions.colwise().mean().norm() < 1e-5);
    CHECK(layout.positions == layout.positions.cast<float>().cast<double>());
  }
  SUBCASE("PCA method") {
    params.method = ProjectionMethod::pca;
    const auto x = gaussian(rng, 25, 4);
    const auto layout = project(x, params, 42);
    CHECK(layout.positions.rows() == 25);
    CHECK(layout.positions.cols() == 2);
    CHECK(layout.method == ProjectionMethod::pca);
  }
  SUBCASE("identical embeddings fall back with a warning") {
    const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(6, 3);
    const auto layout = project(x, params, 42);
    CHECK_FALSE(layout.warnings.empty());
    CHECK(layout.positions.allFinite());
  }
  SUBCASE("bad inputs") {
    CHECK_THROWS_AS(project(gaussian(rng, 1, 3), params, 42), Error);
    Eigen::MatrixXd x = gaussian(rng, 5, 3);
    x(2, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(project(x, params, 42), Error);
    params.iterations = 0;
    CHECK_THROWS_AS(project(gaussian(rng, 5, 3), params, 42), Error);
  }
}

TEST_CASE("pca_reduce") {
  std::mt19937_64 rng(31);
  Eigen::MatrixXd x = gaussian(rng, 40, 3);
  x.col(0) *= 10.0;
  const auto r = pca_reduce(x, 2);
  CHECK(r.rows() == 40);
  CHECK(r.cols() == 2);
  CHECK(r.colwise().mean().norm() < 1e-9);
  const Eigen::VectorXd var = r.colwise().squaredNorm();
  CHECK(var(0) >= var(1));
}

TEST_CASE("layout file round trip") {
  textscape::testing::TempDir dir;
  std::mt19937_64 rng(1);
  auto layout = textscape::testing::random_layout(17, rng);
  layout.positions = layout.positions.cast<float>().cast<double>();
  layout.seed = 99;
  layout.method = ProjectionMethod::pca;
  write_layout(dir / "l.seml", layout);
  const auto back = read_layout(dir / "l.seml");
  CHECK(back.positions == layout.positions);
  CHECK(back.seed == 99);
  CHECK(back.method == ProjectionMethod::pca);
  CHECK(parse_projection_method(to_string(ProjectionMethod::tsne)) == ProjectionMethod::tsne);
  CHECK_THROWS_AS(parse_projection_method("umap"), Error);
}
