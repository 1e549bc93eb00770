#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "muselet/represent.hpp"

namespace muselet {

/// Sorted set of unique terms; column id = position in lexicographic order.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Sorts and deduplicates.
  explicit Vocabulary(std::vector<std::string> terms);

  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(terms_.size()); }
  const std::string& term(Eigen::Index id) const { return terms_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  std::optional<Eigen::Index> find(std::string_view term) const;
  /// FNV-1a 64 over the newline-joined terms, as 16 hex digits.
  std::string hash() const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.terms_ == b.terms_; }

 private:
  std::vector<std::string> terms_;
  std::map<std::string, Eigen::Index, std::less<>> index_;
};

using CountMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct DocumentTermMatrix {
  CountMatrix counts;  // documents x terms
  std::vector<std::string> doc_names;
  std::vector<std::string> doc_classes;
  Vocabulary vocab;

  Eigen::Index docs() const noexcept { return counts.rows(); }
  Eigen::Index terms() const noexcept { return counts.cols(); }
  long total_tokens() const { return counts.cast<long>().sum(); }
  long doc_length(Eigen::Index d) const { return counts.row(d).cast<long>().sum(); }

  /// Distinct terms of document d with their counts, ascending term id.
  std::vector<std::pair<Eigen::Index, int>> row_entries(Eigen::Index d) const;
};

/// Throws Error(EmptyCorpus) on no documents, Error(MixedSchemes) when schemes differ.
DocumentTermMatrix build_dtm(std::span<const Document> docs);

/// Terms whose corpus total is at least `min_count`, by count desc then term asc.
std::vector<std::pair<std::string, long>> top_terms(const DocumentTermMatrix& dtm, long min_count);

/// Header "document,label,<terms...>", then one row per document.
std::string dtm_to_csv(const DocumentTermMatrix& dtm);
DocumentTermMatrix dtm_from_csv(std::string_view text);

}  // namespace muselet
