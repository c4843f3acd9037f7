#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "hiht/error.hpp"
#include "hiht/objective.hpp"

using namespace hiht;

namespace {

CenteredData raw(Matrix x, Matrix y) {
  CenteredData d;
  d.x_centered = std::move(x);
  d.y_centered = std::move(y);
  d.x_mean = Vector::Zero(d.x_centered.rows());
  d.y_mean = Vector::Zero(d.y_centered.rows());
  return d;
}

CenteredData random_centered(Eigen::Index d, Eigen::Index n, Eigen::Index c, std::mt19937_64& rng) {
  return center(oracle::random_matrix(d, n, rng), oracle::random_matrix(c, n, rng));
}

}  // namespace

TEST_CASE("loss special cases") {
  std::mt19937_64 rng(1);
  const CenteredData data = random_centered(3, 6, 2, rng);
  CHECK(loss(Matrix::Zero(3, 2), data) == doctest::Approx(0.5 * data.y_centered.squaredNorm()));

  const Matrix w = oracle::random_matrix(2, 3, rng);
  CHECK(loss(w, raw(Matrix::Identity(2, 2), w.transpose())) == 0.0);
}

TEST_CASE("loss matches the triple loop") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const CenteredData data = random_centered(3, 4, 2, rng);
    const Matrix w = oracle::random_matrix(3, 2, rng);
    CHECK(loss(w, data) == doctest::Approx(oracle::loop_loss(w, data.x_centered, data.y_centered)).epsilon(1e-12));
  }
}

TEST_CASE("loss reports both shapes on mismatch") {
  std::mt19937_64 rng(3);
  const CenteredData data = random_centered(3, 4, 2, rng);
  try {
    loss(Matrix::Zero(2, 2), data);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Shape);
    CHECK(std::string(e.what()).find("2x2") != std::string::npos);
    CHECK(std::string(e.what()).find("3x2") != std::string::npos);
  }
  CHECK_THROWS_AS(gradient(Matrix::Zero(3, 3), data), Error);
}

TEST_CASE("gradient special cases") {
  std::mt19937_64 rng(4);
  const Matrix w = oracle::random_matrix(3, 2, rng);
  const Matrix g = gradient(w, raw(Matrix::Identity(3, 3), Matrix::Zero(2, 3)));
  CHECK((g - w).cwiseAbs().maxCoeff() < 1e-15);

  const CenteredData data = random_centered(4, 7, 3, rng);
  const Matrix g0 = gradient(Matrix::Zero(4, 3), data);
  CHECK((g0 + data.x_centered * data.y_centered.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const CenteredData data = random_centered(5, 8, 3, rng);
    const Matrix w = oracle::random_matrix(5, 3, rng);
    const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
    auto f = [&](const Matrix& m) { return oracle::loop_loss(m, data.x_centered, data.y_centered); };
    const Matrix fd = oracle::finite_difference(f, w, 1e-6 * scale);
    const Matrix g = gradient(w, data);
    const double rel = (g - fd).cwiseAbs().maxCoeff() / std::max(1.0, g.cwiseAbs().maxCoeff());
    CHECK(rel < 1e-5);
  }
}

TEST_CASE("objective_value counts nonzero rows") {
  std::mt19937_64 rng(6);
  const CenteredData data = random_centered(4, 6, 2, rng);
  CHECK(objective_value(Matrix::Zero(4, 2), 3.0, data) == loss(Matrix::Zero(4, 2), data));

  Matrix w = Matrix::Zero(4, 2);
  w.row(1) << 0.3, -0.2;
  w.row(3) << 0.0, 1e-300;
  CHECK(support_size(w) == 2);
  CHECK(support(w) == std::vector<std::size_t>{1, 3});
  CHECK(objective_value(w, 0.5, data) == doctest::Approx(loss(w, data) + 1.0));
  CHECK_THROWS_AS(objective_value(w, -1.0, data), Error);
}

TEST_CASE("objective_value gap across lambdas is exact") {
  std::mt19937_64 rng(7);
  const CenteredData data = random_centered(6, 9, 3, rng);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix w = oracle::random_matrix(6, 3, rng);
    for (Eigen::Index i = 0; i < 6; ++i)
      if ((rng() & 1U) != 0) w.row(i).setZero();
    const double hi = 0.9, lo = 0.4;
    const double gap = objective_value(w, hi, data) - objective_value(w, lo, data);
    CHECK(gap >= 0.0);
    CHECK(gap == doctest::Approx((hi - lo) * static_cast<double>(support_size(w))).epsilon(1e-12));
  }
}

TEST_CASE("loss is convex along random chords") {
  std::mt19937_64 rng(8);
  const CenteredData data = random_centered(5, 8, 3, rng);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = oracle::random_matrix(5, 3, rng, 2.0);
    const Matrix b = oracle::random_matrix(5, 3, rng, 2.0);
    CHECK(loss(0.5 * (a + b), data) <= 0.5 * loss(a, data) + 0.5 * loss(b, data) + 1e-12);
  }
}

TEST_CASE("recover_bias special cases") {
  Dataset d;
  d.features = Matrix::Ones(3, 2);
  d.labels = {0, 1};
  d.class_count = 2;
  const BiasVector b = recover_bias(Matrix::Zero(3, 2), d, one_hot_encode(d.labels, 2));
  CHECK(b[0] == 0.5);
  CHECK(b[1] == 0.5);

  std::mt19937_64 rng(9);
  const Matrix x = oracle::random_matrix(3, 10, rng);
  const Matrix w = oracle::random_matrix(3, 2, rng);
  const Vector b_true = (Vector(2) << 0.25, -1.5).finished();
  const Matrix y = (w.transpose() * x).colwise() + b_true;
  CHECK((recover_bias(w, x, y) - b_true).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(recover_bias(Matrix::Zero(2, 2), x, y), Error);
}

TEST_CASE("recovered bias is stationary for the uncentered objective") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = oracle::random_matrix(4, 12, rng, 2.0);
    const Matrix y = oracle::random_matrix(3, 12, rng);
    const Matrix w = oracle::random_matrix(4, 3, rng);
    const BiasVector b = recover_bias(w, x, y);
    auto f = [&](const Vector& bias) { return uncentered_objective(w, bias, 0.0, x, y); };
    const Vector g = oracle::finite_difference_vector(f, b, 1e-5);
    const double scale = std::max(1.0, y.cwiseAbs().maxCoeff() * 12.0);
    CHECK(g.norm() < 1e-6 * scale);

    // With the optimal bias the uncentered objective equals the centered one.
    const CenteredData c = center(x, y);
    const double lambda = 0.3;
    const double centered = objective_value(w, lambda, c);
    CHECK(uncentered_objective(w, b, lambda, x, y) == doctest::Approx(centered).epsilon(1e-9));
  }
}

TEST_CASE("spectral_bound brackets the top eigenvalue") {
  const CenteredData diag = raw((Matrix(2, 2) << 3, 0, 0, 1).finished(), Matrix::Zero(1, 2));
  const double b = spectral_bound(diag);
  CHECK(b >= 9.0);
  CHECK(b <= 9.09);

  CHECK(spectral_bound(raw(Matrix::Zero(3, 4), Matrix::Zero(1, 4))) == 1e-12);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const CenteredData data = random_centered(6, 10, 2, rng);
    const double truth = oracle::largest_gram_eigenvalue(data.x_centered);
    const double bound = spectral_bound(data);
    CHECK(bound >= truth);
    CHECK(bound <= 1.02 * truth);
  }
  CHECK_THROWS_AS(spectral_bound(diag, {0.0, 10, 0}), Error);
}

TEST_CASE("row_norms") {
  CHECK(row_norms((Matrix(1, 2) << 3, 4).finished())[0] == 5.0);
  CHECK(row_norms(Matrix::Zero(3, 2)).isZero(0.0));
  std::mt19937_64 rng(12);
  const Matrix m = oracle::random_matrix(7, 4, rng);
  const Vector n = row_norms(m);
  for (Eigen::Index i = 0; i < 7; ++i) CHECK(n[i] == doctest::Approx(oracle::loop_row_norm(m, i)).epsilon(1e-14));
}
