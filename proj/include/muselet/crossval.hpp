#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "muselet/classify.hpp"

namespace muselet {

enum class ClassifierKind { Knn, Svm, RandomForest, PcaNn, Pda };

std::string_view to_string(ClassifierKind k) noexcept;
/// "knn", "svm", "rf", "nn", "pda".
ClassifierKind parse_classifier(std::string_view text);
std::vector<ClassifierKind> all_classifiers();

struct ClassifierSettings {
  int knn_k = 5;
  SvmParams svm;
  ForestParams forest;
  PcaNnParams nn;
  PdaParams pda;
};

/// Trains `kind` on (train_X, train_y) and labels test_X. `seed` feeds the
/// randomized learners (forest, network).
Labels fit_predict(ClassifierKind kind, const ClassifierSettings& settings, const Eigen::MatrixXd& train_X,
                   const Labels& train_y, int num_classes, const Eigen::MatrixXd& test_X, std::uint64_t seed);

struct CvOptions {
  int folds = 10;
  int repeats = 3;
  std::uint64_t seed = 1;
  bool stratified = true;  // false: contiguous index blocks
  ClassifierSettings settings;
};

/// Disjoint folds covering 0..n-1. Stratified folds deal each class's shuffled
/// members round-robin, continuing where the previous class stopped.
std::vector<std::vector<Eigen::Index>> make_folds(const Labels& y, int num_classes, int folds, bool stratified,
                                                  std::uint64_t seed);

struct CvCell {
  int repeat = 0;
  int fold = 0;
  ClassifierKind classifier = ClassifierKind::Knn;
  std::vector<Eigen::Index> test_indices;
  Labels predictions;
  Eigen::MatrixXi confusion;  // rows: true class, columns: predicted
  double error = 0.0;
};

struct SkippedFold {
  int repeat = 0;
  int fold = 0;
  std::string reason;
};

struct CvSummary {
  ClassifierKind classifier = ClassifierKind::Knn;
  int cells = 0;
  double mean = 0.0;
  double variance = 0.0;  // sample variance of fold errors
  double sd = 0.0;
};

struct CvReport {
  std::vector<std::string> classes;
  std::vector<CvCell> cells;
  std::vector<SkippedFold> skipped;
  std::vector<CvSummary> summary;  // in the order classifiers were requested

  /// Classifier with the lowest mean error.
  ClassifierKind best() const;
};

/// Repeated k-fold cross-validation with 0-1 loss. Throws Error(TooFewSamples)
/// when n < folds and Error(TooFewClasses) when fewer than two classes exist.
/// Folds whose training part lacks a class are skipped and listed in the report.
CvReport cross_validate(const LabeledDataset& ds, const std::vector<ClassifierKind>& classifiers,
                        const CvOptions& options);

/// Long format: repeat,fold,classifier,error.
std::string cv_to_csv(const CvReport& report);
/// classifier,cells,mean,sd
std::string cv_summary_csv(const CvReport& report);
std::string cv_to_json(const CvReport& report);

}  // namespace muselet
