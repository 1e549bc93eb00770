#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "muselet/classify.hpp"
#include "muselet/error.hpp"
#include "muselet/rng.hpp"

namespace muselet {

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;  // weighted Gini of the children
};

double gini_sum(const std::vector<int>& counts, double total) {
  if (total <= 0) return 0.0;
  double s = 0.0;
  for (int c : counts) s += static_cast<double>(c) * c;
  return total - s / total;  // total * gini
}

int majority(const std::vector<int>& counts) {
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& X, const Labels& y, int num_classes, int mtry, Rng& rng)
      : X_(X), y_(y), g_(num_classes), mtry_(mtry), rng_(rng) {}

  DecisionTree build(std::vector<Eigen::Index> samples) {
    DecisionTree tree;
    grow(tree, samples);
    return tree;
  }

 private:
  int grow(DecisionTree& tree, std::vector<Eigen::Index>& samples) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    std::vector<int> counts(static_cast<std::size_t>(g_), 0);
    for (Eigen::Index s : samples) ++counts[static_cast<std::size_t>(y_[static_cast<std::size_t>(s)])];
    tree.nodes[static_cast<std::size_t>(id)].label = majority(counts);
    const bool pure = std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }) <= 1;
    if (pure) return id;

    const Split split = best_split(samples, counts);
    if (split.feature < 0) return id;

    std::vector<Eigen::Index> left, right;
    for (Eigen::Index s : samples) (X_(s, split.feature) <= split.threshold ? left : right).push_back(s);
    samples.clear();
    samples.shrink_to_fit();
    tree.nodes[static_cast<std::size_t>(id)].feature = split.feature;
    tree.nodes[static_cast<std::size_t>(id)].threshold = split.threshold;
    const int l = grow(tree, left);
    const int r = grow(tree, right);
    tree.nodes[static_cast<std::size_t>(id)].left = l;
    tree.nodes[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  // Candidate features are visited in a random order. The first mtry are
  // always scored; further ones only while no valid split has been found.
  Split best_split(const std::vector<Eigen::Index>& samples, const std::vector<int>& counts) {
    const auto p = static_cast<int>(X_.cols());
    std::vector<int> features(static_cast<std::size_t>(p));
    std::iota(features.begin(), features.end(), 0);
    Split best;
    best.impurity = std::numeric_limits<double>::infinity();
    std::vector<Eigen::Index> order(samples);
    for (int f = 0; f < p; ++f) {
      if (f >= mtry_ && best.feature >= 0) break;
      std::swap(features[static_cast<std::size_t>(f)], features[static_cast<std::size_t>(f) + rng_.below(static_cast<std::size_t>(p - f))]);
      const int feature = features[static_cast<std::size_t>(f)];
      std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return X_(a, feature) != X_(b, feature) ? X_(a, feature) < X_(b, feature) : a < b;
      });
      std::vector<int> left(static_cast<std::size_t>(g_), 0);
      std::vector<int> right = counts;
      const double total = static_cast<double>(order.size());
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const int label = y_[static_cast<std::size_t>(order[i])];
        ++left[static_cast<std::size_t>(label)];
        --right[static_cast<std::size_t>(label)];
        const double here = X_(order[i], feature), next = X_(order[i + 1], feature);
        if (here == next) continue;
        const double nl = static_cast<double>(i + 1);
        const double impurity = gini_sum(left, nl) + gini_sum(right, total - nl);
        if (impurity < best.impurity) {
          best.impurity = impurity;
          best.feature = feature;
          best.threshold = here + 0.5 * (next - here);
          if (best.threshold >= next) best.threshold = here;
        }
      }
    }
    return best;
  }

  const Eigen::MatrixXd& X_;
  const Labels& y_;
  int g_;
  int mtry_;
  Rng& rng_;
};

}  // namespace

int DecisionTree::predict(const Eigen::VectorXd& x) const {
  int at = 0;
  while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
    const TreeNode& node = nodes[static_cast<std::size_t>(at)];
    at = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<std::size_t>(at)].label;
}

RandomForest rf_fit(const Eigen::MatrixXd& X, const Labels& y, int num_classes, const ForestParams& params) {
  const Eigen::Index n = X.rows();
  const auto p = static_cast<int>(X.cols());
  if (n == 0) throw Error(ErrorCode::EmptyTrainingSet, "random forest needs training points");
  if (params.trees < 1) throw Error(ErrorCode::InvalidArgument, "trees must be >= 1");
  const int mtry = params.features_per_split > 0 ? params.features_per_split
                                                  : std::max(1, static_cast<int>(std::floor(std::sqrt(p))));
  if (mtry < 1 || mtry > p) throw Error(ErrorCode::InvalidArgument, "features_per_split must be in [1, p]");

  RandomForest forest;
  forest.num_classes = num_classes;
  forest.trees.reserve(static_cast<std::size_t>(params.trees));
  for (int b = 0; b < params.trees; ++b) {
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(b)));
    std::vector<Eigen::Index> samples(static_cast<std::size_t>(n));
    if (params.bootstrap) {
      for (auto& s : samples) s = static_cast<Eigen::Index>(rng.below(static_cast<std::size_t>(n)));
    } else {
      std::iota(samples.begin(), samples.end(), Eigen::Index{0});
    }
    forest.trees.push_back(TreeBuilder(X, y, num_classes, mtry, rng).build(std::move(samples)));
  }
  return forest;
}

Labels rf_predict(const RandomForest& forest, const Eigen::MatrixXd& X) {
  Labels out;
  out.reserve(static_cast<std::size_t>(X.rows()));
  std::vector<int> votes(static_cast<std::size_t>(forest.num_classes));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    std::fill(votes.begin(), votes.end(), 0);
    const Eigen::VectorXd x = X.row(i).transpose();
    for (const DecisionTree& tree : forest.trees) ++votes[static_cast<std::size_t>(tree.predict(x))];
    out.push_back(majority(votes));
  }
  return out;
}

}  // namespace muselet
