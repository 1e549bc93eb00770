#include "muselet/crossval.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <json.hpp>
#include <map>

#include "muselet/csv.hpp"
#include "muselet/error.hpp"
#include "muselet/rng.hpp"

namespace muselet {

LabeledDataset LabeledDataset::from_names(Eigen::MatrixXd X, const std::vector<std::string>& names, FeatureKind kind) {
  if (static_cast<Eigen::Index>(names.size()) != X.rows()) {
    throw Error(ErrorCode::InvalidArgument, "label count differs from row count");
  }
  if (!X.allFinite()) throw Error(ErrorCode::InvalidArgument, "features contain missing or non-finite values");
  LabeledDataset ds;
  ds.classes = names;
  std::sort(ds.classes.begin(), ds.classes.end());
  ds.classes.erase(std::unique(ds.classes.begin(), ds.classes.end()), ds.classes.end());
  for (const std::string& name : names) {
    ds.y.push_back(static_cast<int>(std::lower_bound(ds.classes.begin(), ds.classes.end(), name) - ds.classes.begin()));
  }
  ds.X = std::move(X);
  ds.feature_kind = kind;
  return ds;
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
  return out;
}

Labels select_labels(const Labels& y, const std::vector<Eigen::Index>& rows) {
  Labels out;
  out.reserve(rows.size());
  for (Eigen::Index r : rows) out.push_back(y[static_cast<std::size_t>(r)]);
  return out;
}

std::string_view to_string(ClassifierKind k) noexcept {
  switch (k) {
    case ClassifierKind::Knn: return "knn";
    case ClassifierKind::Svm: return "svm";
    case ClassifierKind::RandomForest: return "rf";
    case ClassifierKind::PcaNn: return "nn";
    case ClassifierKind::Pda: return "pda";
  }
  return "";
}

std::vector<ClassifierKind> all_classifiers() {
  return {ClassifierKind::Knn, ClassifierKind::Svm, ClassifierKind::RandomForest, ClassifierKind::PcaNn,
          ClassifierKind::Pda};
}

ClassifierKind parse_classifier(std::string_view text) {
  for (ClassifierKind k : all_classifiers()) {
    if (text == to_string(k)) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown classifier '" + std::string(text) + "'");
}

Labels fit_predict(ClassifierKind kind, const ClassifierSettings& settings, const Eigen::MatrixXd& train_X,
                   const Labels& train_y, int num_classes, const Eigen::MatrixXd& test_X, std::uint64_t seed) {
  switch (kind) {
    case ClassifierKind::Knn:
      return knn_fit_predict(train_X, train_y, test_X,
                             std::min<int>(settings.knn_k, static_cast<int>(train_X.rows())));
    case ClassifierKind::Svm:
      return svm_predict(svm_fit(train_X, train_y, num_classes, settings.svm), test_X);
    case ClassifierKind::RandomForest: {
      ForestParams p = settings.forest;
      p.seed = seed;
      return rf_predict(rf_fit(train_X, train_y, num_classes, p), test_X);
    }
    case ClassifierKind::PcaNn: {
      PcaNnParams p = settings.nn;
      p.seed = seed;
      return pca_nn_predict(pca_nn_fit(train_X, train_y, num_classes, p), test_X);
    }
    case ClassifierKind::Pda:
      return pda_predict(pda_fit(train_X, train_y, num_classes, settings.pda), test_X);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown classifier");
}

std::vector<std::vector<Eigen::Index>> make_folds(const Labels& y, int num_classes, int folds, bool stratified,
                                                  std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(y.size());
  if (folds < 2 || folds > n) throw Error(ErrorCode::TooFewSamples, "need 2 <= folds <= n");
  std::vector<std::vector<Eigen::Index>> out(static_cast<std::size_t>(folds));
  if (!stratified) {
    for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i * folds / n)].push_back(i);
    return out;
  }
  Rng rng(seed);
  std::size_t next = 0;
  for (int c = 0; c < num_classes; ++c) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (y[static_cast<std::size_t>(i)] == c) members.push_back(i);
    }
    rng.shuffle(members);
    for (Eigen::Index i : members) {
      out[next].push_back(i);
      next = (next + 1) % out.size();
    }
  }
  for (auto& fold : out) std::sort(fold.begin(), fold.end());
  return out;
}

CvReport cross_validate(const LabeledDataset& ds, const std::vector<ClassifierKind>& classifiers,
                        const CvOptions& options) {
  const int g = ds.num_classes();
  if (g < 2) throw Error(ErrorCode::TooFewClasses, "cross-validation needs at least two classes");
  if (ds.size() < options.folds) {
    throw Error(ErrorCode::TooFewSamples, std::to_string(ds.size()) + " samples for " + std::to_string(options.folds) + " folds");
  }
  if (options.repeats < 1) throw Error(ErrorCode::InvalidArgument, "repeats must be >= 1");

  CvReport report;
  report.classes = ds.classes;
  for (int rep = 0; rep < options.repeats; ++rep) {
    const auto folds = make_folds(ds.y, g, options.folds, options.stratified, derive_seed(options.seed, static_cast<std::uint64_t>(rep)));
    for (int f = 0; f < options.folds; ++f) {
      const auto& test = folds[static_cast<std::size_t>(f)];
      std::vector<Eigen::Index> train;
      for (int o = 0; o < options.folds; ++o) {
        if (o != f) train.insert(train.end(), folds[static_cast<std::size_t>(o)].begin(), folds[static_cast<std::size_t>(o)].end());
      }
      std::sort(train.begin(), train.end());
      const Labels train_y = select_labels(ds.y, train);
      std::vector<int> present(static_cast<std::size_t>(g), 0);
      for (int label : train_y) present[static_cast<std::size_t>(label)] = 1;
      if (std::find(present.begin(), present.end(), 0) != present.end()) {
        const std::string reason = "ClassAbsentFromTrainingFold";
        std::cerr << "warning: repeat " << rep + 1 << " fold " << f + 1 << " skipped: " << reason << '\n';
        report.skipped.push_back({rep + 1, f + 1, reason});
        continue;
      }
      const Eigen::MatrixXd train_X = select_rows(ds.X, train);
      const Eigen::MatrixXd test_X = select_rows(ds.X, test);
      const Labels test_y = select_labels(ds.y, test);
      const std::uint64_t cell_seed =
          derive_seed(options.seed, 1'000'000ULL + static_cast<std::uint64_t>(rep * options.folds + f));
      for (ClassifierKind kind : classifiers) {
        CvCell cell;
        cell.repeat = rep + 1;
        cell.fold = f + 1;
        cell.classifier = kind;
        cell.test_indices = test;
        cell.predictions = fit_predict(kind, options.settings, train_X, train_y, g, test_X, cell_seed);
        cell.confusion = Eigen::MatrixXi::Zero(g, g);
        for (std::size_t i = 0; i < test_y.size(); ++i) ++cell.confusion(test_y[i], cell.predictions[i]);
        cell.error = 1.0 - static_cast<double>(cell.confusion.trace()) / static_cast<double>(test_y.size());
        report.cells.push_back(std::move(cell));
      }
    }
  }

  for (ClassifierKind kind : classifiers) {
    CvSummary s;
    s.classifier = kind;
    std::vector<double> errors;
    for (const CvCell& c : report.cells) {
      if (c.classifier == kind) errors.push_back(c.error);
    }
    s.cells = static_cast<int>(errors.size());
    for (double e : errors) s.mean += e;
    if (!errors.empty()) s.mean /= static_cast<double>(errors.size());
    for (double e : errors) s.variance += (e - s.mean) * (e - s.mean);
    if (errors.size() > 1) s.variance /= static_cast<double>(errors.size() - 1);
    s.sd = std::sqrt(s.variance);
    report.summary.push_back(s);
  }
  return report;
}

ClassifierKind CvReport::best() const {
  if (summary.empty()) throw Error(ErrorCode::InvalidArgument, "empty report");
  return std::min_element(summary.begin(), summary.end(),
                          [](const CvSummary& a, const CvSummary& b) { return a.mean < b.mean; })
      ->classifier;
}

std::string cv_to_csv(const CvReport& report) {
  std::string out = "repeat,fold,classifier,error\n";
  for (const CvCell& c : report.cells) {
    out += io::csv_line({std::to_string(c.repeat), std::to_string(c.fold), std::string(to_string(c.classifier)),
                         io::format_double(c.error)});
  }
  return out;
}

std::string cv_summary_csv(const CvReport& report) {
  std::string out = "classifier,cells,mean,sd\n";
  for (const CvSummary& s : report.summary) {
    out += io::csv_line({std::string(to_string(s.classifier)), std::to_string(s.cells), io::format_double(s.mean),
                         io::format_double(s.sd)});
  }
  return out;
}

std::string cv_to_json(const CvReport& report) {
  using nlohmann::json;
  json j;
  j["classes"] = report.classes;
  json cells = json::array();
  for (const CvCell& c : report.cells) {
    json confusion = json::array();
    for (Eigen::Index r = 0; r < c.confusion.rows(); ++r) {
      std::vector<int> row(c.confusion.cols());
      for (Eigen::Index k = 0; k < c.confusion.cols(); ++k) row[static_cast<std::size_t>(k)] = c.confusion(r, k);
      confusion.push_back(row);
    }
    std::vector<std::string> predicted;
    for (int p : c.predictions) predicted.push_back(report.classes[static_cast<std::size_t>(p)]);
    cells.push_back({{"repeat", c.repeat},
                     {"fold", c.fold},
                     {"classifier", std::string(to_string(c.classifier))},
                     {"test_indices", c.test_indices},
                     {"predictions", predicted},
                     {"confusion", confusion},
                     {"error", c.error}});
  }
  j["cells"] = cells;
  json skipped = json::array();
  for (const SkippedFold& s : report.skipped) skipped.push_back({{"repeat", s.repeat}, {"fold", s.fold}, {"reason", s.reason}});
  j["skipped"] = skipped;
  json summary = json::array();
  for (const CvSummary& s : report.summary) {
    summary.push_back({{"classifier", std::string(to_string(s.classifier))},
                       {"cells", s.cells},
                       {"mean", s.mean},
                       {"variance", s.variance},
                       {"sd", s.sd}});
  }
  j["summary"] = summary;
  return j.dump(1) + "\n";
}

}  // namespace muselet
