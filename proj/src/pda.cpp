#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "muselet/classify.hpp"
#include "muselet/error.hpp"

namespace muselet {

namespace {

Eigen::MatrixXd class_means(const Eigen::MatrixXd& X, const Labels& y, int num_classes, Eigen::VectorXd& sizes) {
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(num_classes, X.cols());
  sizes = Eigen::VectorXd::Zero(num_classes);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const int c = y[static_cast<std::size_t>(i)];
    means.row(c) += X.row(i);
    sizes[c] += 1.0;
  }
  for (int c = 0; c < num_classes; ++c) {
    if (sizes[c] > 0) means.row(c) /= sizes[c];
  }
  return means;
}

}  // namespace

Eigen::MatrixXd within_class_scatter(const Eigen::MatrixXd& X, const Labels& y, int num_classes) {
  Eigen::VectorXd sizes;
  const Eigen::MatrixXd means = class_means(X, y, num_classes, sizes);
  Eigen::MatrixXd centered = X;
  for (Eigen::Index i = 0; i < X.rows(); ++i) centered.row(i) -= means.row(y[static_cast<std::size_t>(i)]);
  return centered.transpose() * centered;
}

Eigen::MatrixXd between_class_scatter(const Eigen::MatrixXd& X, const Labels& y, int num_classes) {
  Eigen::VectorXd sizes;
  const Eigen::MatrixXd means = class_means(X, y, num_classes, sizes);
  const Eigen::RowVectorXd mu = X.colwise().mean();
  Eigen::MatrixXd Sb = Eigen::MatrixXd::Zero(X.cols(), X.cols());
  for (int c = 0; c < num_classes; ++c) {
    const Eigen::VectorXd d = (means.row(c) - mu).transpose();
    Sb += sizes[c] * d * d.transpose();
  }
  return Sb;
}

PdaModel pda_fit(const Eigen::MatrixXd& X, const Labels& y, int num_classes, const PdaParams& params) {
  if (num_classes < 2) throw Error(ErrorCode::TooFewClasses, "discriminant analysis needs two classes");
  if (!(params.omega_scale >= 0.0)) throw Error(ErrorCode::InvalidArgument, "omega_scale must be >= 0");
  const Eigen::Index p = X.cols();

  Eigen::MatrixXd Sw = within_class_scatter(X, y, num_classes);
  Sw.diagonal().array() += params.omega_scale;
  const Eigen::MatrixXd Sb = between_class_scatter(X, y, num_classes);

  // Sb w = l Sw w  becomes symmetric through Sw = L L^T:  (L^-1 Sb L^-T) u = l u,  w = L^-T u.
  Eigen::LLT<Eigen::MatrixXd> llt(Sw);
  const Eigen::VectorXd diag = llt.matrixL().toDenseMatrix().diagonal();
  if (llt.info() != Eigen::Success || diag.minCoeff() <= 1e-8 * std::max(1.0, diag.maxCoeff())) {
    throw Error(ErrorCode::SingularWithinScatter, "within-class scatter is singular; use omega_scale > 0");
  }
  const auto L = llt.matrixL();
  Eigen::MatrixXd A = L.solve(Sb);
  A = L.solve(A.transpose()).transpose();
  A = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
  const Eigen::VectorXd values = eig.eigenvalues().reverse();
  const Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();

  Eigen::Index r = std::min<Eigen::Index>(num_classes - 1, p);
  while (r > 1 && values[r - 1] <= 1e-12 * std::max(values[0], 1e-300)) --r;

  PdaModel model;
  model.eigenvalues = values.head(r);
  model.directions = L.transpose().solve(vectors.leftCols(r));
  for (Eigen::Index c = 0; c < r; ++c) {
    Eigen::Index at = 0;
    model.directions.col(c).cwiseAbs().maxCoeff(&at);
    if (model.directions(at, c) < 0) model.directions.col(c) *= -1.0;
  }
  Eigen::VectorXd sizes;
  model.centroids = class_means(X, y, num_classes, sizes) * model.directions;
  return model;
}

Labels pda_predict(const PdaModel& model, const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd Z = X * model.directions;
  Labels out(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    Eigen::Index best = 0;
    (model.centroids.rowwise() - Z.row(i)).rowwise().squaredNorm().minCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

}  // namespace muselet
