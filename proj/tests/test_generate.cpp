#include <doctest.h>

#include <set>

#include "muselet/error.hpp"
#include "muselet/generate.hpp"
#include "muselet/rng.hpp"

using namespace muselet;

TEST_CASE("single topic frequencies converge to the topic") {
  GenerativeSpec spec;
  spec.topics = 1;
  spec.terms = 20;
  spec.docs = 500;
  spec.doc_lengths = {200};
  spec.eta = 1.0;
  spec.seed = 9;
  const auto c = sample_corpus(spec);
  CHECK(c.dtm.total_tokens() == 100000);
  bool all_first = true;
  for (const auto& z : c.truth.z)
    for (int t : z) all_first = all_first && t == 0;
  CHECK(all_first);
  const Eigen::RowVectorXd freq = c.dtm.counts.cast<double>().colwise().sum() / 1e5;
  CHECK((freq - c.truth.beta.row(0)).cwiseAbs().sum() < 0.02);
}

TEST_CASE("huge alpha gives uniform mixtures") {
  GenerativeSpec spec;
  spec.topics = 4;
  spec.terms = 12;
  spec.docs = 20;
  spec.doc_lengths = {4000};
  spec.alpha = 1e6;
  spec.seed = 3;
  const auto c = sample_corpus(spec);
  CHECK((c.truth.theta.array() - 0.25).abs().maxCoeff() < 0.01);
  for (const auto& z : c.truth.z) {
    Eigen::Vector4d share = Eigen::Vector4d::Zero();
    for (int t : z) share[t] += 1.0 / static_cast<double>(z.size());
    CHECK((share.array() - 0.25).abs().maxCoeff() < 0.05);
  }
}

TEST_CASE("shape, determinism and row sums") {
  GenerativeSpec spec;
  spec.topics = 3;
  spec.terms = 15;
  spec.docs = 6;
  spec.doc_lengths = {5, 1, 7, 9, 2, 30};
  spec.seed = 11;
  const auto a = sample_corpus(spec);
  const auto b = sample_corpus(spec);
  CHECK(a.dtm.counts == b.dtm.counts);
  CHECK(a.truth.theta == b.truth.theta);
  CHECK(a.truth.z == b.truth.z);
  for (int d = 0; d < 6; ++d) {
    CHECK(a.dtm.counts.row(d).sum() == spec.doc_lengths[static_cast<std::size_t>(d)]);
    CHECK(a.truth.words[static_cast<std::size_t>(d)].size() == a.truth.z[static_cast<std::size_t>(d)].size());
    CHECK(a.truth.theta.row(d).sum() == doctest::Approx(1.0));
  }
  for (int k = 0; k < 3; ++k) CHECK(a.truth.beta.row(k).sum() == doctest::Approx(1.0));
  CHECK(a.dtm.vocab.term(0) == "w00");
  CHECK(a.dtm.vocab.term(14) == "w14");
  spec.seed = 12;
  CHECK(sample_corpus(spec).dtm.counts != a.dtm.counts);
}

TEST_CASE("planted z matches the mixtures") {
  // Pearson statistic of pooled z counts against sum_d N theta_d; df = 4, 0.999 quantile 18.47.
  GenerativeSpec spec;
  spec.topics = 5;
  spec.terms = 25;
  spec.docs = 300;
  spec.doc_lengths = {100};
  spec.alpha = 0.7;
  spec.seed = 21;
  const auto c = sample_corpus(spec);
  Eigen::VectorXd observed = Eigen::VectorXd::Zero(5);
  for (const auto& z : c.truth.z)
    for (int t : z) observed[t] += 1.0;
  const Eigen::VectorXd expected = 100.0 * c.truth.theta.colwise().sum().transpose();
  const double chi2 = ((observed - expected).array().square() / expected.array()).sum();
  CHECK(chi2 < 18.47);
}

TEST_CASE("planted topics and invalid specs") {
  GenerativeSpec spec;
  spec.topics = 2;
  spec.terms = 10;
  spec.planted_beta = disjoint_topics(2, 10);
  const auto c = sample_corpus(spec);
  CHECK(c.truth.beta == *spec.planted_beta);
  for (std::size_t d = 0; d < c.truth.z.size(); ++d)
    for (std::size_t i = 0; i < c.truth.z[d].size(); ++i) CHECK(c.truth.words[d][i] / 5 == c.truth.z[d][i]);

  GenerativeSpec bad = spec;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(sample_corpus(bad), Error);
  bad = spec;
  bad.planted_beta = Eigen::MatrixXd::Constant(2, 10, 0.2);
  CHECK_THROWS_AS(sample_corpus(bad), Error);
  bad = spec;
  bad.doc_lengths = {3, 4};
  CHECK_THROWS_AS(sample_corpus(bad), Error);
  CHECK_THROWS_AS(disjoint_topics(5, 3), Error);
}

TEST_CASE("planted genres") {
  GenreProfile triad{"triad", {}};
  triad.weights[0] = triad.weights[4] = triad.weights[7] = 1.0;
  GenreProfile tritone{"tritone", {}};
  tritone.weights[1] = tritone.weights[6] = tritone.weights[10] = 2.0;
  const auto docs = planted_genre_corpus({triad, tritone}, 5, 12, 8);
  REQUIRE(docs.size() == 10);
  std::set<std::string> first, second;
  for (const Document& d : docs) {
    CHECK(d.tokens.size() == 12);
    CHECK(d.scheme == Scheme::NoteBased);
    for (const std::string& t : d.tokens) {
      CHECK(t.size() == 12);
      CHECK(t.find('1') != std::string::npos);
      (d.label == "triad" ? first : second).insert(t);
    }
  }
  for (const std::string& t : first) {
    CHECK(second.count(t) == 0);
    for (int pc : {1, 2, 3, 5, 6, 8, 9, 10, 11}) CHECK(t[static_cast<std::size_t>(pc)] == '0');
  }
  const auto again = planted_genre_corpus({triad, tritone}, 5, 12, 8);
  for (std::size_t i = 0; i < docs.size(); ++i) CHECK(again[i].tokens == docs[i].tokens);

  const auto one = planted_genre_corpus({triad}, 4, 3, 1);
  for (const Document& d : one) CHECK(d.label == "triad");

  GenreProfile empty{"none", {}};
  CHECK_THROWS_AS(planted_genre_corpus({empty}, 1, 1, 1), Error);
  GenreProfile negative = triad;
  negative.weights[2] = -1.0;
  try {
    planted_genre_corpus({negative}, 1, 1, 1);
    FAIL("expected InvalidWeights");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidWeights);
  }
}
