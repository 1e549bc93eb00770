#include <doctest.h>

#include <cmath>

#include "muselet/error.hpp"
#include "muselet/generate.hpp"
#include "muselet/selection.hpp"
#include "support.hpp"

using namespace muselet;

TEST_CASE("pairwise scores") {
  Eigen::MatrixXd same(2, 4);
  same << 0.1, 0.2, 0.3, 0.4, 0.1, 0.2, 0.3, 0.4;
  CHECK(caojuan2009(same) == doctest::Approx(1.0));
  CHECK(deveaud2014(same) == doctest::Approx(0.0));

  const Eigen::MatrixXd apart = disjoint_topics(2, 6);
  CHECK(caojuan2009(apart) == doctest::Approx(0.0));
  CHECK(deveaud2014(apart) == doctest::Approx(std::log(2.0)));

  // Three topics: mean over the three pairs.
  Eigen::MatrixXd three(3, 2);
  three << 1, 0, 0, 1, std::sqrt(0.5), std::sqrt(0.5);
  CHECK(caojuan2009(three) == doctest::Approx((0.0 + 2.0 * std::sqrt(0.5)) / 3.0));

  CHECK(caojuan2009(Eigen::MatrixXd::Constant(1, 5, 0.2)) == 0.0);
}

TEST_CASE("symmetric KL and JS") {
  Eigen::VectorXd p(3), q(3);
  p << 0.5, 0.3, 0.2;
  q << 0.2, 0.3, 0.5;
  const double kl = 0.5 * std::log(0.5 / 0.2) + 0.2 * std::log(0.2 / 0.5);
  CHECK(symmetric_kl(p, q) == doctest::Approx(2.0 * kl));
  CHECK(symmetric_kl(p, p) == 0.0);
  CHECK(jensen_shannon(p, q) == doctest::Approx(jensen_shannon(q, p)));
  CHECK(jensen_shannon(p, q) > 0.0);
  CHECK(jensen_shannon(p, q) < std::log(2.0));
}

TEST_CASE("arun2010") {
  // Orthogonal equal-norm rows give equal singular values; a balanced gamma matches them exactly.
  const Eigen::MatrixXd beta = disjoint_topics(3, 9);
  CHECK(arun2010(beta, Eigen::MatrixXd::Constant(5, 3, 2.0)) == doctest::Approx(0.0).epsilon(1e-12));
  Eigen::MatrixXd skewed = Eigen::MatrixXd::Constant(5, 3, 1.0);
  skewed.col(1).setConstant(10.0);
  CHECK(arun2010(beta, skewed) > 0.1);
  // Column order of gamma does not matter.
  Eigen::MatrixXd swapped = skewed;
  swapped.col(0).swap(swapped.col(1));
  CHECK(arun2010(beta, swapped) == doctest::Approx(arun2010(beta, skewed)));
}

TEST_CASE("selection sweep") {
  GenerativeSpec spec;
  spec.topics = 3;
  spec.terms = 30;
  spec.docs = 40;
  spec.doc_lengths = {40};
  spec.seed = 5;
  spec.planted_beta = disjoint_topics(3, 30);
  const auto corpus = sample_corpus(spec);

  LdaConfig config;
  config.seed = 2;
  const auto rows = selection_metrics(corpus.dtm, {1, 2, 3, 6}, config);
  REQUIRE(rows.size() == 4);
  CHECK_FALSE(rows[0].ok());
  CHECK(rows[0].error.find("InvalidArgument") != std::string::npos);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].ok());
  CHECK(rows[2].griffiths2004 > rows[1].griffiths2004);

  LdaConfig same = config;
  same.topics = 3;
  CHECK(rows[2].griffiths2004 == fit(corpus.dtm, same).elbo_trace.back());

  const std::string csv = selection_to_csv(rows);
  CHECK(csv.rfind("topics,griffiths2004,caojuan2009,arun2010,deveaud2014\n", 0) == 0);
  CHECK(csv.find("\n1,NA,NA,NA,NA\n") != std::string::npos);
  int lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 5);
}

TEST_CASE("choosing K") {
  std::vector<SelectionRow> rows(4);
  const int ks[] = {2, 4, 6, 8};
  const double grif[] = {-10, -5, -5, -7};
  const double cao[] = {0.4, 0.2, 0.3, 0.2};
  for (int i = 0; i < 4; ++i) {
    rows[static_cast<std::size_t>(i)].topics = ks[i];
    rows[static_cast<std::size_t>(i)].griffiths2004 = grif[i];
    rows[static_cast<std::size_t>(i)].caojuan2009 = cao[i];
  }
  CHECK(choose_topics(rows, SelectionMetric::Griffiths2004) == 4);
  CHECK(choose_topics(rows, SelectionMetric::CaoJuan2009) == 4);
  rows[1].error = "failed";
  CHECK(choose_topics(rows, SelectionMetric::Griffiths2004) == 6);
  CHECK(choose_topics(rows, SelectionMetric::CaoJuan2009) == 8);
  for (auto& r : rows) r.error = "failed";
  CHECK_THROWS_AS(choose_topics(rows, SelectionMetric::CaoJuan2009), Error);

  CHECK(is_minimized(SelectionMetric::Arun2010));
  CHECK_FALSE(is_minimized(SelectionMetric::Deveaud2014));
  CHECK(parse_metric("deveaud2014") == SelectionMetric::Deveaud2014);
  CHECK_THROWS_AS(parse_metric("perplexity"), Error);
}
