#include <doctest.h>

#include <json.hpp>
#include <set>

#include "muselet/crossval.hpp"
#include "muselet/error.hpp"
#include "support.hpp"

using namespace muselet;

namespace {

// Proportion-like rows: class 0 lives on features 0-1, class 1 on features 2-3.
LabeledDataset disjoint_supports(int per_class, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(2 * per_class, 4);
  std::vector<std::string> names;
  for (int i = 0; i < 2 * per_class; ++i) {
    const int c = i < per_class ? 0 : 1;
    const Eigen::VectorXd share = rng.dirichlet(1.0, 2);
    X(i, 2 * c) = share[0];
    X(i, 2 * c + 1) = share[1];
    names.push_back(c == 0 ? "blues" : "reel");
  }
  return LabeledDataset::from_names(X, names, FeatureKind::TopicProportions);
}

}  // namespace

TEST_CASE("folds partition the indices") {
  Labels y;
  for (int i = 0; i < 23; ++i) y.push_back(i % 3 == 0 ? 1 : 0);
  for (bool stratified : {true, false}) {
    const auto folds = make_folds(y, 2, 5, stratified, 4);
    std::multiset<Eigen::Index> seen;
    for (const auto& f : folds) {
      CHECK(f.size() >= 4);
      CHECK(f.size() <= 5);
      seen.insert(f.begin(), f.end());
    }
    CHECK(seen.size() == 23);
    CHECK(std::set<Eigen::Index>(seen.begin(), seen.end()).size() == 23);
  }
  // Stratified folds hold 1 or 2 of the 8 minority members each.
  for (const auto& f : make_folds(y, 2, 5, true, 4)) {
    int minority = 0;
    for (Eigen::Index i : f) minority += y[static_cast<std::size_t>(i)];
    CHECK(minority >= 1);
    CHECK(minority <= 2);
  }
  CHECK(make_folds(y, 2, 5, true, 4) == make_folds(y, 2, 5, true, 4));
  CHECK_THROWS_AS(make_folds(y, 2, 24, true, 1), Error);
  CHECK_THROWS_AS(make_folds(y, 2, 1, true, 1), Error);
}

TEST_CASE("separable classes") {
  const LabeledDataset ds = disjoint_supports(30, 1);
  CHECK(ds.classes == std::vector<std::string>{"blues", "reel"});
  CvOptions options;
  options.settings.forest.trees = 100;
  const CvReport report = cross_validate(ds, all_classifiers(), options);
  REQUIRE(report.summary.size() == 5);
  for (const CvSummary& s : report.summary) {
    CHECK(s.cells == 30);
    CHECK(s.mean < 0.05);
  }
  CHECK(report.cells.size() == 150);
  for (const CvCell& cell : report.cells) {
    CHECK(cell.confusion.sum() == static_cast<int>(cell.test_indices.size()));
    CHECK(cell.error == doctest::Approx(1.0 - cell.confusion.trace() / static_cast<double>(cell.confusion.sum())));
  }
}

TEST_CASE("random labels sit at chance") {
  Rng rng(2);
  const Eigen::MatrixXd X = testing::random_matrix(rng, 120, 3);
  std::vector<std::string> names;
  for (int i = 0; i < 120; ++i) names.push_back(rng.below(2) ? "a" : "b");
  const auto ds = LabeledDataset::from_names(X, names, FeatureKind::RawCounts);
  CvOptions options;
  options.settings.forest.trees = 50;
  for (const CvSummary& s : cross_validate(ds, all_classifiers(), options).summary) {
    CHECK(s.mean > 0.4);
    CHECK(s.mean < 0.6);
  }
}

TEST_CASE("leave one out tests every point once per repeat") {
  const LabeledDataset ds = disjoint_supports(6, 3);
  CvOptions options;
  options.folds = 12;
  options.repeats = 2;
  const CvReport report = cross_validate(ds, {ClassifierKind::Knn}, options);
  for (int rep = 1; rep <= 2; ++rep) {
    std::multiset<Eigen::Index> tested;
    for (const CvCell& c : report.cells)
      if (c.repeat == rep) tested.insert(c.test_indices.begin(), c.test_indices.end());
    CHECK(tested.size() == 12);
    CHECK(std::set<Eigen::Index>(tested.begin(), tested.end()).size() == 12);
  }
}

TEST_CASE("folds lacking a class are skipped") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(9, 1);
  for (int i = 0; i < 9; ++i) X(i, 0) = i;
  const auto ds = LabeledDataset::from_names(X, {"x", "x", "x", "x", "x", "x", "x", "x", "y"}, FeatureKind::RawCounts);
  CvOptions options;
  options.folds = 3;
  options.repeats = 1;
  const CvReport report = cross_validate(ds, {ClassifierKind::Knn, ClassifierKind::Pda}, options);
  REQUIRE(report.skipped.size() == 1);
  CHECK(report.skipped[0].reason == "ClassAbsentFromTrainingFold");
  CHECK(report.cells.size() == 4);
  CHECK(report.summary[0].cells == 2);
}

TEST_CASE("errors") {
  const LabeledDataset ds = disjoint_supports(3, 4);
  CvOptions options;
  try {
    cross_validate(ds, {ClassifierKind::Knn}, options);
    FAIL("expected TooFewSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewSamples);
  }
  const auto single = LabeledDataset::from_names(Eigen::MatrixXd::Ones(12, 2), std::vector<std::string>(12, "only"),
                                                 FeatureKind::TopicProportions);
  try {
    cross_validate(single, {ClassifierKind::Knn}, options);
    FAIL("expected TooFewClasses");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewClasses);
  }
  Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(2, 2);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(LabeledDataset::from_names(bad, {"a", "b"}, FeatureKind::RawCounts), Error);
  CHECK_THROWS_AS(LabeledDataset::from_names(bad, {"a"}, FeatureKind::RawCounts), Error);
  CHECK_THROWS_AS(parse_classifier("lasso"), Error);
  CHECK(parse_classifier("rf") == ClassifierKind::RandomForest);
}

TEST_CASE("reports") {
  const LabeledDataset ds = disjoint_supports(10, 5);
  CvOptions options;
  options.folds = 4;
  options.repeats = 2;
  options.settings.forest.trees = 20;
  const std::vector<ClassifierKind> chosen{ClassifierKind::Svm, ClassifierKind::RandomForest};
  const CvReport report = cross_validate(ds, chosen, options);
  const CvReport again = cross_validate(ds, chosen, options);
  CHECK(cv_to_json(report) == cv_to_json(again));

  const std::string csv = cv_to_csv(report);
  CHECK(csv.rfind("repeat,fold,classifier,error\n1,1,svm,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);
  const std::string summary = cv_summary_csv(report);
  CHECK(summary.rfind("classifier,cells,mean,sd\nsvm,8,", 0) == 0);
  CHECK(summary.find("\nrf,8,") != std::string::npos);

  const auto j = nlohmann::json::parse(cv_to_json(report));
  CHECK(j["cells"].size() == 16);
  CHECK(j["cells"][0]["confusion"].size() == 2);
  CHECK(j["cells"][0]["predictions"][0].get<std::string>().size() >= 4);
  CHECK(j["summary"][1]["classifier"] == "rf");
  CHECK(report.best() == (report.summary[0].mean <= report.summary[1].mean ? ClassifierKind::Svm : ClassifierKind::RandomForest));
}
