#include <algorithm>
#include <numeric>

#include "muselet/classify.hpp"
#include "muselet/error.hpp"

namespace muselet {

Labels knn_fit_predict(const Eigen::MatrixXd& train_X, const Labels& train_y, const Eigen::MatrixXd& test_X, int k) {
  const Eigen::Index n = train_X.rows();
  if (n == 0) throw Error(ErrorCode::EmptyTrainingSet, "kNN needs at least one training point");
  if (k < 1 || k > n) throw Error(ErrorCode::InvalidArgument, "k must be in [1, n_train]");
  if (test_X.cols() != train_X.cols()) throw Error(ErrorCode::InvalidArgument, "feature dimensions differ");
  const int num_classes = *std::max_element(train_y.begin(), train_y.end()) + 1;

  Labels out;
  out.reserve(static_cast<std::size_t>(test_X.rows()));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  Eigen::VectorXd dist(n);
  std::vector<int> votes(static_cast<std::size_t>(num_classes));
  for (Eigen::Index t = 0; t < test_X.rows(); ++t) {
    dist = (train_X.rowwise() - test_X.row(t)).rowwise().squaredNorm();
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
    });
    std::fill(votes.begin(), votes.end(), 0);
    for (int i = 0; i < k; ++i) ++votes[static_cast<std::size_t>(train_y[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])])];
    const int top = *std::max_element(votes.begin(), votes.end());
    // Walk neighbours nearest-first; the first one in a top-voted class decides.
    for (int i = 0; i < k; ++i) {
      const int label = train_y[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
      if (votes[static_cast<std::size_t>(label)] == top) {
        out.push_back(label);
        break;
      }
    }
  }
  return out;
}

}  // namespace muselet
