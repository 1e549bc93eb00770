#include "muselet/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "muselet/csv.hpp"
#include "muselet/error.hpp"

namespace muselet {

Vocabulary::Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
  std::sort(terms_.begin(), terms_.end());
  terms_.erase(std::unique(terms_.begin(), terms_.end()), terms_.end());
  for (std::size_t i = 0; i < terms_.size(); ++i) index_.emplace(terms_[i], static_cast<Eigen::Index>(i));
}

std::optional<Eigen::Index> Vocabulary::find(std::string_view term) const {
  if (auto it = index_.find(term); it != index_.end()) return it->second;
  return std::nullopt;
}

std::string Vocabulary::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const std::string& t : terms_) {
    for (unsigned char c : t) mix(c);
    mix('\n');
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::pair<Eigen::Index, int>> DocumentTermMatrix::row_entries(Eigen::Index d) const {
  std::vector<std::pair<Eigen::Index, int>> out;
  for (Eigen::Index v = 0; v < counts.cols(); ++v) {
    if (counts(d, v) > 0) out.emplace_back(v, counts(d, v));
  }
  return out;
}

DocumentTermMatrix build_dtm(std::span<const Document> docs) {
  if (docs.empty()) throw Error(ErrorCode::EmptyCorpus, "no documents");
  std::vector<std::string> all;
  for (const Document& doc : docs) {
    if (doc.scheme != docs.front().scheme) {
      throw Error(ErrorCode::MixedSchemes, "document '" + doc.name + "' uses " + std::string(to_string(doc.scheme)));
    }
    all.insert(all.end(), doc.tokens.begin(), doc.tokens.end());
  }
  DocumentTermMatrix dtm;
  dtm.vocab = Vocabulary(std::move(all));
  dtm.counts = CountMatrix::Zero(static_cast<Eigen::Index>(docs.size()), dtm.vocab.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const std::string& tok : docs[d].tokens) ++dtm.counts(static_cast<Eigen::Index>(d), *dtm.vocab.find(tok));
    dtm.doc_names.push_back(docs[d].name);
    dtm.doc_classes.push_back(docs[d].label);
  }
  return dtm;
}

std::vector<std::pair<std::string, long>> top_terms(const DocumentTermMatrix& dtm, long min_count) {
  if (min_count < 1) throw Error(ErrorCode::InvalidArgument, "min_count must be >= 1");
  const Eigen::Matrix<long, 1, Eigen::Dynamic> totals = dtm.counts.cast<long>().colwise().sum();
  std::vector<std::pair<std::string, long>> out;
  for (Eigen::Index v = 0; v < totals.size(); ++v) {
    if (totals[v] >= min_count) out.emplace_back(dtm.vocab.term(v), totals[v]);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return out;
}

std::string dtm_to_csv(const DocumentTermMatrix& dtm) {
  io::CsvRow header{"document", "label"};
  header.insert(header.end(), dtm.vocab.terms().begin(), dtm.vocab.terms().end());
  std::string out = io::csv_line(header);
  for (Eigen::Index d = 0; d < dtm.docs(); ++d) {
    io::CsvRow row{dtm.doc_names[static_cast<std::size_t>(d)], dtm.doc_classes[static_cast<std::size_t>(d)]};
    for (Eigen::Index v = 0; v < dtm.terms(); ++v) row.push_back(std::to_string(dtm.counts(d, v)));
    out += io::csv_line(row);
  }
  return out;
}

DocumentTermMatrix dtm_from_csv(std::string_view text) {
  const auto rows = io::parse_csv(text);
  if (rows.empty() || rows.front().size() < 3) throw Error(ErrorCode::MalformedCsv, "missing header with terms");
  const io::CsvRow& header = rows.front();
  std::vector<std::string> terms(header.begin() + 2, header.end());
  DocumentTermMatrix dtm;
  dtm.vocab = Vocabulary(terms);
  if (dtm.vocab.size() != static_cast<Eigen::Index>(terms.size())) {
    throw Error(ErrorCode::MalformedCsv, "duplicate term in header");
  }
  // Columns may arrive in any order; map them onto the sorted vocabulary.
  std::vector<Eigen::Index> column(terms.size());
  for (std::size_t j = 0; j < terms.size(); ++j) column[j] = *dtm.vocab.find(terms[j]);

  if (rows.size() < 2) throw Error(ErrorCode::EmptyCorpus, "csv has no document rows");
  dtm.counts = CountMatrix::Zero(static_cast<Eigen::Index>(rows.size() - 1), dtm.vocab.size());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const io::CsvRow& row = rows[r];
    if (row.size() != header.size()) {
      throw Error(ErrorCode::MalformedCsv, "row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                                               " fields, expected " + std::to_string(header.size()));
    }
    dtm.doc_names.push_back(row[0]);
    dtm.doc_classes.push_back(row[1]);
    for (std::size_t j = 2; j < row.size(); ++j) {
      int value = 0;
      const std::string& cell = row[j];
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || value < 0) {
        throw Error(ErrorCode::MalformedCsv, "bad count '" + cell + "' in row " + std::to_string(r + 1));
      }
      dtm.counts(static_cast<Eigen::Index>(r - 1), column[j - 2]) = value;
    }
  }
  return dtm;
}

}  // namespace muselet
