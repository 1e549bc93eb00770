#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "muselet/classify.hpp"
#include "muselet/error.hpp"
#include "muselet/rng.hpp"

namespace muselet {

Eigen::MatrixXd PcaMap::transform(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd Z(X.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    Z.col(col) = (X.col(kept[j]).array() - mean[col]) / scale[col];
  }
  return Z * components;
}

Eigen::MatrixXd PcaMap::loadings(Eigen::Index input_dim) const {
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(input_dim, components.cols());
  for (std::size_t j = 0; j < kept.size(); ++j) full.row(kept[j]) = components.row(static_cast<Eigen::Index>(j));
  return full;
}

PcaMap fit_pca(const Eigen::MatrixXd& X, double var_keep) {
  const Eigen::Index n = X.rows();
  if (n < 2) throw Error(ErrorCode::TooFewSamples, "PCA needs at least two rows");
  if (!(var_keep > 0.0 && var_keep <= 1.0)) throw Error(ErrorCode::InvalidArgument, "var_keep must be in (0, 1]");

  PcaMap pca;
  std::vector<double> means, scales;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double mu = X.col(j).mean();
    const double var = (X.col(j).array() - mu).square().sum() / static_cast<double>(n - 1);
    // Features taking a single value carry no information.
    if (var <= 1e-24 * std::max(1.0, mu * mu)) continue;
    pca.kept.push_back(j);
    means.push_back(mu);
    scales.push_back(std::sqrt(var));
  }
  if (pca.kept.empty()) throw Error(ErrorCode::DegenerateCovariance, "every feature has zero variance");
  const auto p = static_cast<Eigen::Index>(pca.kept.size());
  pca.mean = Eigen::Map<Eigen::VectorXd>(means.data(), p);
  pca.scale = Eigen::Map<Eigen::VectorXd>(scales.data(), p);

  Eigen::MatrixXd Z(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    Z.col(j) = (X.col(pca.kept[static_cast<std::size_t>(j)]).array() - pca.mean[j]) / pca.scale[j];
  }
  const Eigen::MatrixXd cov = Z.transpose() * Z / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd values = eig.eigenvalues().reverse().cwiseMax(0.0);
  const Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();

  const double total = values.sum();
  Eigen::Index m = 0;
  double acc = 0.0;
  while (m < p) {
    acc += values[m++];
    if (acc >= var_keep * total * (1.0 - 1e-12)) break;
  }
  pca.components = vectors.leftCols(m);
  pca.variances = values.head(m);
  // Sign convention: the largest-magnitude loading of each component is positive.
  for (Eigen::Index c = 0; c < m; ++c) {
    Eigen::Index at = 0;
    pca.components.col(c).cwiseAbs().maxCoeff(&at);
    if (pca.components(at, c) < 0) pca.components.col(c) *= -1.0;
  }
  return pca;
}

Eigen::VectorXd MlpWeights::pack() const {
  Eigen::VectorXd flat(W1.size() + b1.size() + W2.size() + b2.size());
  flat << Eigen::Map<const Eigen::VectorXd>(W1.data(), W1.size()), b1,
      Eigen::Map<const Eigen::VectorXd>(W2.data(), W2.size()), b2;
  return flat;
}

MlpWeights MlpWeights::unpack(const Eigen::VectorXd& flat, Eigen::Index inputs, Eigen::Index hidden,
                              Eigen::Index classes) {
  MlpWeights w;
  Eigen::Index at = 0;
  w.W1 = Eigen::Map<const Eigen::MatrixXd>(flat.data() + at, hidden, inputs);
  at += hidden * inputs;
  w.b1 = flat.segment(at, hidden);
  at += hidden;
  w.W2 = Eigen::Map<const Eigen::MatrixXd>(flat.data() + at, classes, hidden);
  at += classes * hidden;
  w.b2 = flat.segment(at, classes);
  return w;
}

namespace {

Eigen::MatrixXd hidden_layer(const MlpWeights& net, const Eigen::MatrixXd& Y) {
  const Eigen::MatrixXd a = (Y * net.W1.transpose()).rowwise() + net.b1.transpose();
  return (1.0 / (1.0 + (-a.array()).exp())).matrix();
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& scores) {
  Eigen::MatrixXd p = scores.colwise() - scores.rowwise().maxCoeff();
  p = p.array().exp().matrix();
  return p.array().colwise() / p.rowwise().sum().array();
}

}  // namespace

Eigen::MatrixXd mlp_probabilities(const MlpWeights& net, const Eigen::MatrixXd& Y) {
  const Eigen::MatrixXd H = hidden_layer(net, Y);
  return softmax_rows((H * net.W2.transpose()).rowwise() + net.b2.transpose());
}

LossAndGradient mlp_loss_and_gradient(const MlpWeights& net, const Eigen::MatrixXd& Y, const Labels& y) {
  const Eigen::Index n = Y.rows();
  const Eigen::MatrixXd H = hidden_layer(net, Y);
  const Eigen::MatrixXd P = softmax_rows((H * net.W2.transpose()).rowwise() + net.b2.transpose());

  LossAndGradient out;
  Eigen::MatrixXd dS = P;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto label = static_cast<Eigen::Index>(y[static_cast<std::size_t>(i)]);
    out.loss -= std::log(std::max(P(i, label), 1e-300));
    dS(i, label) -= 1.0;
  }
  out.loss /= static_cast<double>(n);
  dS /= static_cast<double>(n);

  out.gradient.W2 = dS.transpose() * H;
  out.gradient.b2 = dS.colwise().sum().transpose();
  const Eigen::MatrixXd dA = ((dS * net.W2).array() * H.array() * (1.0 - H.array())).matrix();
  out.gradient.W1 = dA.transpose() * Y;
  out.gradient.b1 = dA.colwise().sum().transpose();
  return out;
}

PcaNnModel pca_nn_fit(const Eigen::MatrixXd& X, const Labels& y, int num_classes, const PcaNnParams& params) {
  if (params.hidden < 1 || params.epochs < 0 || !(params.learning_rate > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "bad network parameters");
  }
  PcaNnModel model;
  model.pca = fit_pca(X, params.var_keep);
  const Eigen::MatrixXd Y = model.pca.transform(X);
  const Eigen::Index inputs = Y.cols();

  Rng rng(params.seed);
  auto init = [&rng](Eigen::Index rows, Eigen::Index cols, double fan_in) {
    const double r = 1.0 / std::sqrt(fan_in);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = r * (2.0 * rng.uniform() - 1.0);
    return m;
  };
  MlpWeights& net = model.net;
  net.W1 = init(params.hidden, inputs, static_cast<double>(inputs));
  net.b1 = Eigen::VectorXd::Zero(params.hidden);
  net.W2 = init(num_classes, params.hidden, static_cast<double>(params.hidden));
  net.b2 = Eigen::VectorXd::Zero(num_classes);

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    const LossAndGradient lg = mlp_loss_and_gradient(net, Y, y);
    model.loss_trace.push_back(lg.loss);
    net.W1 -= params.learning_rate * lg.gradient.W1;
    net.b1 -= params.learning_rate * lg.gradient.b1;
    net.W2 -= params.learning_rate * lg.gradient.W2;
    net.b2 -= params.learning_rate * lg.gradient.b2;
  }
  return model;
}

Labels pca_nn_predict(const PcaNnModel& model, const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd P = mlp_probabilities(model.net, model.pca.transform(X));
  Labels out(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    Eigen::Index best = 0;
    P.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

}  // namespace muselet
