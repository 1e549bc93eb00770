#include <algorithm>
#include <cmath>
#include <limits>

#include "muselet/classify.hpp"
#include "muselet/error.hpp"

namespace muselet {

namespace {
constexpr double kTau = 1e-12;
}

BinarySvm train_binary_svm(const Eigen::MatrixXd& X, const Eigen::VectorXd& targets, const SvmParams& params) {
  const Eigen::Index n = X.rows();
  if (n == 0) throw Error(ErrorCode::EmptyTrainingSet, "SVM needs training points");
  if (!(params.C > 0.0) || !(params.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "C and tol must be positive");
  const double C = params.C;
  const long max_iter = params.max_iter > 0 ? params.max_iter : std::max<long>(10'000'000L, 100L * n);

  const Eigen::MatrixXd K = X * X.transpose();
  const Eigen::VectorXd& y = targets;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd G = Eigen::VectorXd::Constant(n, -1.0);  // gradient of 1/2 a'Qa - e'a

  auto in_up = [&](Eigen::Index t) { return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0); };
  auto in_low = [&](Eigen::Index t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C); };

  BinarySvm out;
  long iter = 0;
  for (;; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (in_up(t) && -y[t] * G[t] >= gmax) {
        gmax = -y[t] * G[t];
        i = t;
      }
    }
    Eigen::Index j = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = -y[t] * G[t];
      gmin = std::min(gmin, v);
      const double b = gmax - v;
      if (i >= 0 && b > 0) {
        double a = K(i, i) + K(t, t) - 2.0 * K(i, t);
        if (a <= 0) a = kTau;
        if (-(b * b) / a <= best) {
          best = -(b * b) / a;
          j = t;
        }
      }
    }
    out.kkt_violation = gmax - gmin;
    if (i < 0 || j < 0 || gmax - gmin <= params.tol) break;
    if (iter >= max_iter) {
      throw Error(ErrorCode::SolverDidNotConverge,
                  "SMO stopped after " + std::to_string(iter) + " iterations, violation " + std::to_string(gmax - gmin));
    }

    const double old_ai = alpha[i], old_aj = alpha[j];
    double quad = K(i, i) + K(j, j) - 2.0 * K(i, j);
    if (quad <= 0) quad = kTau;
    if (y[i] != y[j]) {
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
      }
      if (diff > 0) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
      } else {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = C + diff; }
      }
    } else {
      const double delta = (G[i] - G[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
      } else {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
      }
      if (sum > C) {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
      }
    }
    const double di = alpha[i] - old_ai, dj = alpha[j] - old_aj;
    // G_t += Q_ti * di + Q_tj * dj with Q_ts = y_t y_s K_ts.
    G.array() += (y.array() * K.col(i).array()) * (y[i] * di) + (y.array() * K.col(j).array()) * (y[j] * dj);
  }
  out.iterations = iter;

  // b = -rho, rho averaged over free vectors (midpoint of the feasible range otherwise).
  double sum_free = 0.0, ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
  long free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yG = y[t] * G[t];
    if (alpha[t] >= C) {
      if (y[t] < 0) ub = std::min(ub, yG); else lb = std::max(lb, yG);
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yG); else lb = std::max(lb, yG);
    } else {
      ++free;
      sum_free += yG;
    }
  }
  const double rho = free > 0 ? sum_free / static_cast<double>(free) : 0.5 * (ub + lb);
  out.b = -rho;
  out.w = X.transpose() * (alpha.array() * y.array()).matrix();
  out.dual = std::move(alpha);
  return out;
}

LinearSvm svm_fit(const Eigen::MatrixXd& X, const Labels& y, int num_classes, const SvmParams& params) {
  if (num_classes < 2) throw Error(ErrorCode::TooFewClasses, "SVM needs at least two classes");
  LinearSvm model;
  model.W.resize(num_classes, X.cols());
  model.b.resize(num_classes);
  for (int k = 0; k < num_classes; ++k) {
    Eigen::VectorXd targets(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) targets[i] = y[static_cast<std::size_t>(i)] == k ? 1.0 : -1.0;
    const BinarySvm one = train_binary_svm(X, targets, params);
    model.W.row(k) = one.w.transpose();
    model.b[k] = one.b;
  }
  return model;
}

Labels svm_predict(const LinearSvm& model, const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd scores = (X * model.W.transpose()).rowwise() + model.b.transpose();
  Labels out(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Eigen::Index best = 0;
    scores.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

}  // namespace muselet
