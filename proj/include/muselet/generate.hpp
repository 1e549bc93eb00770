#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "muselet/corpus.hpp"
#include "muselet/represent.hpp"

namespace muselet {

struct GenerativeSpec {
  int topics = 3;
  int terms = 30;
  int docs = 50;
  double alpha = 0.5;
  double eta = 0.1;
  std::optional<Eigen::MatrixXd> planted_beta;  // topics x terms, rows stochastic
  std::vector<int> doc_lengths{100};            // one entry (all documents) or one per document
  std::uint64_t seed = 1;

  void validate() const;
  int doc_length(int d) const { return doc_lengths.size() == 1 ? doc_lengths.front() : doc_lengths.at(static_cast<std::size_t>(d)); }
};

struct PlantedTruth {
  Eigen::MatrixXd theta;              // docs x topics
  Eigen::MatrixXd beta;               // topics x terms
  std::vector<std::vector<int>> z;    // per document, per token topic (0-based)
  std::vector<std::vector<int>> words;  // per document, per token term id
};

struct SyntheticCorpus {
  DocumentTermMatrix dtm;
  PlantedTruth truth;
};

/// Term name for id v; zero padded so that name order equals id order.
std::string synthetic_term(int v, int terms);

/// Draws from the LDA generative process. Documents are labelled
/// "topic<k>" after their largest planted proportion.
SyntheticCorpus sample_corpus(const GenerativeSpec& spec);

/// K x V matrix whose rows are uniform on disjoint contiguous blocks of V / K terms.
Eigen::MatrixXd disjoint_topics(int topics, int terms);

struct GenreProfile {
  std::string label;
  std::array<double, 12> weights{};  // pitch classes C..B
};

/// Note-based songs: every measure switches on 1 to 4 distinct pitch classes
/// drawn by weight without replacement. Throws Error(InvalidWeights).
std::vector<Document> planted_genre_corpus(const std::vector<GenreProfile>& classes, int songs_per_class,
                                           int measures_per_song, std::uint64_t seed);

}  // namespace muselet
