#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace muselet {

using Labels = std::vector<int>;  // class indices 0..g-1

enum class FeatureKind { TopicProportions, RawCounts };

/// Rows are songs; class names are sorted so index order equals name order.
struct LabeledDataset {
  Eigen::MatrixXd X;
  Labels y;
  std::vector<std::string> classes;
  FeatureKind feature_kind = FeatureKind::TopicProportions;

  /// Throws Error(InvalidArgument) on size mismatch or non-finite features.
  static LabeledDataset from_names(Eigen::MatrixXd X, const std::vector<std::string>& names, FeatureKind kind);

  Eigen::Index size() const noexcept { return X.rows(); }
  int num_classes() const noexcept { return static_cast<int>(classes.size()); }
};

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& rows);
Labels select_labels(const Labels& y, const std::vector<Eigen::Index>& rows);

// ---- k nearest neighbours ------------------------------------------------

/// Euclidean kNN. Equal distances are ordered by training index; a tied vote
/// goes to the class of the nearest neighbour among the tied classes.
Labels knn_fit_predict(const Eigen::MatrixXd& train_X, const Labels& train_y, const Eigen::MatrixXd& test_X, int k = 5);

// ---- linear SVM, one-vs-rest ---------------------------------------------

struct SvmParams {
  double C = 1.0;
  double tol = 1e-3;     // maximal KKT violation at convergence
  long max_iter = 0;     // 0: max(10^7, 100 n)
};

/// Binary soft-margin SVM with the linear kernel <x_i, x_j>.
struct BinarySvm {
  Eigen::VectorXd w;
  double b = 0.0;
  Eigen::VectorXd dual;  // alpha_i
  long iterations = 0;
  double kkt_violation = 0.0;

  double decision(const Eigen::VectorXd& x) const { return w.dot(x) + b; }
};

/// SMO with second-order working-set selection; targets must be +1 / -1.
/// Throws Error(SolverDidNotConverge) when the iteration cap is reached.
BinarySvm train_binary_svm(const Eigen::MatrixXd& X, const Eigen::VectorXd& targets, const SvmParams& params);

struct LinearSvm {
  Eigen::MatrixXd W;  // g x p
  Eigen::VectorXd b;  // g
};

LinearSvm svm_fit(const Eigen::MatrixXd& X, const Labels& y, int num_classes, const SvmParams& params = {});
/// argmax_k w_k.x + b_k
Labels svm_predict(const LinearSvm& model, const Eigen::MatrixXd& X);

// ---- random forest -------------------------------------------------------

struct ForestParams {
  int trees = 500;
  int features_per_split = 0;  // 0: floor(sqrt(p))
  bool bootstrap = true;
  std::uint64_t seed = 1;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = 0;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  int predict(const Eigen::VectorXd& x) const;
};

struct RandomForest {
  std::vector<DecisionTree> trees;
  int num_classes = 0;
};

RandomForest rf_fit(const Eigen::MatrixXd& X, const Labels& y, int num_classes, const ForestParams& params = {});
/// Mode of the tree votes; ties go to the smallest class index.
Labels rf_predict(const RandomForest& forest, const Eigen::MatrixXd& X);

// ---- PCA + one-hidden-layer network --------------------------------------

struct PcaNnParams {
  double var_keep = 0.95;
  int hidden = 5;
  int epochs = 500;
  double learning_rate = 0.5;
  std::uint64_t seed = 1;
};

struct PcaMap {
  std::vector<Eigen::Index> kept;  // input features with non-zero variance
  Eigen::VectorXd mean;            // over kept features
  Eigen::VectorXd scale;           // sample standard deviation of kept features
  Eigen::MatrixXd components;      // kept x m, orthonormal columns
  Eigen::VectorXd variances;       // eigenvalues of the retained components

  Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const;
  /// Components expressed over all `input_dim` input features (zero rows for dropped ones).
  Eigen::MatrixXd loadings(Eigen::Index input_dim) const;
};

/// Drops zero-variance features, standardizes, and keeps the fewest leading
/// components whose variance share reaches var_keep. Throws Error(DegenerateCovariance).
PcaMap fit_pca(const Eigen::MatrixXd& X, double var_keep);

/// Logistic hidden layer, softmax output.
struct MlpWeights {
  Eigen::MatrixXd W1;  // hidden x inputs
  Eigen::VectorXd b1;
  Eigen::MatrixXd W2;  // classes x hidden
  Eigen::VectorXd b2;

  Eigen::VectorXd pack() const;
  static MlpWeights unpack(const Eigen::VectorXd& flat, Eigen::Index inputs, Eigen::Index hidden, Eigen::Index classes);
};

struct LossAndGradient {
  double loss = 0.0;
  MlpWeights gradient;
};

/// Mean cross-entropy over the rows of Y and its exact gradient.
LossAndGradient mlp_loss_and_gradient(const MlpWeights& net, const Eigen::MatrixXd& Y, const Labels& y);
Eigen::MatrixXd mlp_probabilities(const MlpWeights& net, const Eigen::MatrixXd& Y);

struct PcaNnModel {
  PcaMap pca;
  MlpWeights net;
  std::vector<double> loss_trace;
};

PcaNnModel pca_nn_fit(const Eigen::MatrixXd& X, const Labels& y, int num_classes, const PcaNnParams& params = {});
Labels pca_nn_predict(const PcaNnModel& model, const Eigen::MatrixXd& X);

// ---- penalized discriminant analysis -------------------------------------

struct PdaParams {
  double omega_scale = 1.0;  // penalty Omega = omega_scale * I
};

struct PdaModel {
  Eigen::MatrixXd directions;  // p x r, within-scatter orthonormal
  Eigen::VectorXd eigenvalues;  // descending
  Eigen::MatrixXd centroids;    // g x r, class means in discriminant space
};

/// sum_i (x_i - mu_{y_i})(x_i - mu_{y_i})^T
Eigen::MatrixXd within_class_scatter(const Eigen::MatrixXd& X, const Labels& y, int num_classes);
/// sum_j n_j (xbar_j - mu)(xbar_j - mu)^T
Eigen::MatrixXd between_class_scatter(const Eigen::MatrixXd& X, const Labels& y, int num_classes);

/// Throws Error(SingularWithinScatter) when the penalized within-class scatter is not positive definite.
PdaModel pda_fit(const Eigen::MatrixXd& X, const Labels& y, int num_classes, const PdaParams& params = {});
/// Nearest class centroid in discriminant space.
Labels pda_predict(const PdaModel& model, const Eigen::MatrixXd& X);

}  // namespace muselet
