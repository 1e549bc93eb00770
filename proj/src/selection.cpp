#include "muselet/selection.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>

#include "muselet/csv.hpp"
#include "muselet/error.hpp"

namespace muselet {

std::string_view to_string(SelectionMetric m) noexcept {
  switch (m) {
    case SelectionMetric::Griffiths2004: return "griffiths2004";
    case SelectionMetric::CaoJuan2009: return "caojuan2009";
    case SelectionMetric::Arun2010: return "arun2010";
    case SelectionMetric::Deveaud2014: return "deveaud2014";
  }
  return "";
}

SelectionMetric parse_metric(std::string_view text) {
  for (auto m : {SelectionMetric::Griffiths2004, SelectionMetric::CaoJuan2009, SelectionMetric::Arun2010,
                 SelectionMetric::Deveaud2014}) {
    if (text == to_string(m)) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown metric '" + std::string(text) + "'");
}

bool is_minimized(SelectionMetric m) noexcept {
  return m == SelectionMetric::CaoJuan2009 || m == SelectionMetric::Arun2010;
}

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.dot(b) / (a.norm() * b.norm());
}

double jensen_shannon(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  double js = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) js += 0.5 * p[i] * std::log(p[i] / m);
    if (q[i] > 0.0) js += 0.5 * q[i] * std::log(q[i] / m);
  }
  return js;
}

double symmetric_kl(const Eigen::VectorXd& p, const Eigen::VectorXd& q, double floor) {
  double kl = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double a = std::max(p[i], floor);
    const double b = std::max(q[i], floor);
    kl += a * std::log(a / b) + b * std::log(b / a);
  }
  return kl;
}

namespace {

double mean_pairwise(const Eigen::MatrixXd& beta,
                     const std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>& score) {
  double total = 0.0;
  long pairs = 0;
  for (Eigen::Index i = 0; i < beta.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < beta.rows(); ++j) {
      total += score(beta.row(i).transpose(), beta.row(j).transpose());
      ++pairs;
    }
  }
  return pairs ? total / static_cast<double>(pairs) : 0.0;
}

}  // namespace

double caojuan2009(const Eigen::MatrixXd& beta) { return mean_pairwise(beta, cosine_similarity); }

double deveaud2014(const Eigen::MatrixXd& beta) { return mean_pairwise(beta, jensen_shannon); }

double arun2010(const Eigen::MatrixXd& beta, const Eigen::MatrixXd& gamma) {
  const Eigen::Index K = beta.rows();
  Eigen::VectorXd singular = Eigen::VectorXd::Zero(K);
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(beta).singularValues();
  singular.head(sv.size()) = sv;
  singular /= singular.sum();

  Eigen::VectorXd marginal = gamma.colwise().sum().transpose();
  std::sort(marginal.data(), marginal.data() + marginal.size(), std::greater<>());
  marginal /= marginal.sum();
  return symmetric_kl(singular, marginal);
}

double griffiths2004(const LdaModel& model, const DocumentTermMatrix& dtm) { return elbo(model, dtm); }

double SelectionRow::value(SelectionMetric m) const noexcept {
  switch (m) {
    case SelectionMetric::Griffiths2004: return griffiths2004;
    case SelectionMetric::CaoJuan2009: return caojuan2009;
    case SelectionMetric::Arun2010: return arun2010;
    case SelectionMetric::Deveaud2014: return deveaud2014;
  }
  return 0.0;
}

std::vector<SelectionRow> selection_metrics(const DocumentTermMatrix& dtm, const std::vector<int>& k_grid,
                                            const LdaConfig& config) {
  std::vector<SelectionRow> rows;
  for (int k : k_grid) {
    SelectionRow row;
    row.topics = k;
    try {
      if (k < 2) throw Error(ErrorCode::InvalidArgument, "topic counts in a selection grid must be >= 2");
      LdaConfig c = config;
      c.topics = k;
      const LdaModel model = fit(dtm, c);
      row.griffiths2004 = model.elbo_trace.back();
      row.caojuan2009 = caojuan2009(model.beta_hat);
      row.arun2010 = arun2010(model.beta_hat, model.gamma);
      row.deveaud2014 = deveaud2014(model.beta_hat);
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int choose_topics(const std::vector<SelectionRow>& rows, SelectionMetric metric) {
  const SelectionRow* best = nullptr;
  for (const SelectionRow& row : rows) {
    if (!row.ok()) continue;
    if (!best) {
      best = &row;
      continue;
    }
    const double a = row.value(metric), b = best->value(metric);
    const bool better = is_minimized(metric) ? a < b : a > b;
    if (better || (a == b && row.topics < best->topics)) best = &row;
  }
  if (!best) throw Error(ErrorCode::InvalidArgument, "no topic count fitted successfully");
  return best->topics;
}

std::string selection_to_csv(const std::vector<SelectionRow>& rows) {
  std::string out = "topics,griffiths2004,caojuan2009,arun2010,deveaud2014\n";
  for (const SelectionRow& r : rows) {
    if (!r.ok()) {
      out += std::to_string(r.topics) + ",NA,NA,NA,NA\n";
      continue;
    }
    out += io::csv_line({std::to_string(r.topics), io::format_double(r.griffiths2004), io::format_double(r.caojuan2009),
                         io::format_double(r.arun2010), io::format_double(r.deveaud2014)});
  }
  return out;
}

}  // namespace muselet
