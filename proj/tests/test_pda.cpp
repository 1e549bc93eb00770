#include <doctest.h>

#include "muselet/classify.hpp"
#include "muselet/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace muselet;

namespace {

double abs_cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::abs(a.dot(b)) / (a.norm() * b.norm());
}

}  // namespace

TEST_CASE("without penalty equals classical discriminant directions") {
  Rng rng(6);
  Eigen::MatrixXd centers(3, 4);
  centers << 0, 0, 0, 0, 2, 1, 0, -1, -1, 2, 1, 0;
  const auto data = testing::blobs(rng, 40, centers, 1.0);
  PdaParams params;
  params.omega_scale = 0.0;
  const PdaModel model = pda_fit(data.X, data.y, 3, params);
  REQUIRE(model.directions.cols() == 2);
  const Eigen::MatrixXd Sw = within_class_scatter(data.X, data.y, 3);
  const Eigen::MatrixXd Sb = between_class_scatter(data.X, data.y, 3);
  const Eigen::MatrixXd oracle = oracle::discriminant_directions(Sw, Sb, 2);
  for (Eigen::Index c = 0; c < 2; ++c) CHECK(abs_cosine(model.directions.col(c), oracle.col(c)) > 0.999);
  CHECK(model.eigenvalues[0] >= model.eigenvalues[1]);
  // Directions are orthonormal in the within-class metric.
  CHECK((model.directions.transpose() * Sw * model.directions - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-8);
}

TEST_CASE("scatter matrices") {
  Eigen::MatrixXd X(4, 1);
  X << -2, 0, 2, 4;
  const Labels y{0, 0, 1, 1};
  CHECK(within_class_scatter(X, y, 2)(0, 0) == doctest::Approx(4.0));
  CHECK(between_class_scatter(X, y, 2)(0, 0) == doctest::Approx(2 * 4.0 + 2 * 4.0));
}

TEST_CASE("symmetric one-dimensional classes") {
  Rng rng(9);
  Eigen::MatrixXd centers(2, 1);
  centers << -1, 1;
  auto data = testing::blobs(rng, 50, centers, 0.3);
  // Mirror class 0 onto class 1 so the fixture is exactly symmetric.
  for (int i = 0; i < 50; ++i) data.X(50 + i, 0) = -data.X(i, 0);
  const PdaModel model = pda_fit(data.X, data.y, 2);
  REQUIRE(model.directions.rows() == 1);
  REQUIRE(model.directions.cols() == 1);
  const double midpoint = 0.5 * (model.centroids(0, 0) + model.centroids(1, 0));
  CHECK(std::abs(midpoint) < 1e-12);
  Eigen::MatrixXd probe(2, 1);
  probe << -0.01, 0.01;
  CHECK(pda_predict(model, probe) == Labels{0, 1});
}

TEST_CASE("huge penalty follows the between-class scatter") {
  Rng rng(10);
  Eigen::MatrixXd centers(2, 3);
  centers << 0, 0, 0, 1, 2, 0;
  const auto data = testing::blobs(rng, 30, centers, 1.5);
  PdaParams params;
  params.omega_scale = 1e6;
  const PdaModel model = pda_fit(data.X, data.y, 2, params);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(between_class_scatter(data.X, data.y, 2));
  CHECK(abs_cosine(model.directions.col(0), eig.eigenvectors().col(2)) > 0.99);
}

TEST_CASE("rotation of the features") {
  Rng rng(13);
  Eigen::MatrixXd centers(3, 3);
  centers << 0, 0, 0, 2, 0, 1, 0, 2, -1;
  const auto data = testing::blobs(rng, 30, centers, 1.0);
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(testing::random_matrix(rng, 3, 3)).householderQ();
  const PdaModel a = pda_fit(data.X, data.y, 3);
  const PdaModel b = pda_fit(data.X * Q, data.y, 3);
  for (Eigen::Index c = 0; c < 2; ++c) CHECK(abs_cosine(Q * b.directions.col(c), a.directions.col(c)) > 1 - 1e-9);
  CHECK(pda_predict(a, data.X) == pda_predict(b, data.X * Q));
}

TEST_CASE("singular within-class scatter") {
  Rng rng(14);
  Eigen::MatrixXd centers(2, 2);
  centers << 0, 0, 2, 0;
  auto data = testing::blobs(rng, 10, centers, 1.0);
  data.X.col(1) = 2.0 * data.X.col(0);  // rank one
  PdaParams params;
  params.omega_scale = 0.0;
  try {
    pda_fit(data.X, data.y, 2, params);
    FAIL("expected SingularWithinScatter");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularWithinScatter);
  }
  CHECK_NOTHROW(pda_fit(data.X, data.y, 2));
  params.omega_scale = -1.0;
  CHECK_THROWS_AS(pda_fit(data.X, data.y, 2, params), Error);
}
