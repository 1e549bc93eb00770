#pragma once

#include <Eigen/Core>
#include <string>
#include <string_view>
#include <vector>

#include "muselet/lda.hpp"

namespace muselet {

/// Topic-count selection metrics. Griffiths2004 here is the variational bound
/// of the fitted model (a VEM proxy, not the Gibbs harmonic-mean estimator).
enum class SelectionMetric { Griffiths2004, CaoJuan2009, Arun2010, Deveaud2014 };

std::string_view to_string(SelectionMetric m) noexcept;
SelectionMetric parse_metric(std::string_view text);
/// Arun2010 and CaoJuan2009 are minimized; the other two are maximized.
bool is_minimized(SelectionMetric m) noexcept;

/// Mean pairwise cosine similarity of beta_hat rows (0 when K = 1).
double caojuan2009(const Eigen::MatrixXd& beta);
/// Mean pairwise Jensen-Shannon divergence of beta_hat rows, natural log (0 when K = 1).
double deveaud2014(const Eigen::MatrixXd& beta);
/// Symmetric KL between the normalized singular values of beta and the
/// normalized, descending column sums of gamma; both floored at 1e-12.
double arun2010(const Eigen::MatrixXd& beta, const Eigen::MatrixXd& gamma);
/// Variational lower bound of a fitted model on its training corpus.
double griffiths2004(const LdaModel& model, const DocumentTermMatrix& dtm);

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
double jensen_shannon(const Eigen::VectorXd& p, const Eigen::VectorXd& q);
double symmetric_kl(const Eigen::VectorXd& p, const Eigen::VectorXd& q, double floor = 1e-12);

struct SelectionRow {
  int topics = 0;
  double griffiths2004 = 0.0;
  double caojuan2009 = 0.0;
  double arun2010 = 0.0;
  double deveaud2014 = 0.0;
  std::string error;  // non-empty when the fit for this K failed

  bool ok() const noexcept { return error.empty(); }
  double value(SelectionMetric m) const noexcept;
};

/// Fits one model per K (same seed for every K) and scores it. A failing K is
/// recorded in its row and does not stop the sweep.
std::vector<SelectionRow> selection_metrics(const DocumentTermMatrix& dtm, const std::vector<int>& k_grid,
                                            const LdaConfig& config);

/// K at the extremum of `metric` among successful rows; ties go to the smaller K.
int choose_topics(const std::vector<SelectionRow>& rows, SelectionMetric metric);

/// Columns: topics,griffiths2004,caojuan2009,arun2010,deveaud2014.
std::string selection_to_csv(const std::vector<SelectionRow>& rows);

}  // namespace muselet
