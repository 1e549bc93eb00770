#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "muselet/classify.hpp"
#include "muselet/corpus.hpp"
#include "muselet/represent.hpp"
#include "muselet/rng.hpp"

namespace testing {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(MUSELET_FIXTURES) / name; }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("muselet_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline muselet::Document doc(std::string name, std::string label, std::vector<std::string> tokens,
                             muselet::Scheme scheme = muselet::Scheme::NoteBased) {
  return muselet::Document{std::move(name), std::move(label), scheme, std::move(tokens)};
}

inline Eigen::MatrixXd random_matrix(muselet::Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

/// Score-partwise document with one part; each measure is a list of
/// (step, alter, octave, eighths) notes, step 'R' for a rest. Divisions = 2 per quarter.
struct XmlNote {
  char step;
  int alter;
  int octave;
  int eighths;
};

inline std::string musicxml(const std::string& title, const std::vector<std::vector<XmlNote>>& measures) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<score-partwise version=\"3.1\">\n"
      "<work><work-title>" + title + "</work-title></work>\n"
      "<part-list><score-part id=\"P1\"><part-name>Melody</part-name></score-part></part-list>\n<part id=\"P1\">\n";
  for (std::size_t m = 0; m < measures.size(); ++m) {
    out += "<measure number=\"" + std::to_string(m + 1) + "\">\n";
    if (m == 0) out += "<attributes><divisions>2</divisions><time><beats>4</beats><beat-type>4</beat-type></time></attributes>\n";
    for (const XmlNote& n : measures[m]) {
      if (n.step == 'R') {
        out += "<note><rest/><duration>" + std::to_string(n.eighths) + "</duration></note>\n";
      } else {
        out += "<note><pitch><step>" + std::string(1, n.step) + "</step>";
        if (n.alter != 0) out += "<alter>" + std::to_string(n.alter) + "</alter>";
        out += "<octave>" + std::to_string(n.octave) + "</octave></pitch><duration>" + std::to_string(n.eighths) +
               "</duration></note>\n";
      }
    }
    out += "</measure>\n";
  }
  return out + "</part>\n</score-partwise>\n";
}

}  // namespace testing

namespace testing {

/// DTM over terms t0..t{V-1} from per-document lists of term ids.
inline muselet::DocumentTermMatrix dtm_from_ids(const std::vector<std::vector<int>>& docs, int V) {
  muselet::DocumentTermMatrix dtm;
  std::vector<std::string> terms;
  for (int v = 0; v < V; ++v) terms.push_back("t" + std::string(v < 10 ? "0" : "") + std::to_string(v));
  dtm.vocab = muselet::Vocabulary(terms);
  dtm.counts = muselet::CountMatrix::Zero(static_cast<Eigen::Index>(docs.size()), V);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (int w : docs[d]) ++dtm.counts(static_cast<Eigen::Index>(d), w);
    dtm.doc_names.push_back("d" + std::to_string(d));
    dtm.doc_classes.push_back("c");
  }
  return dtm;
}

/// per_class Gaussian points around each row of `centers`, class c = row c.
struct Blobs {
  Eigen::MatrixXd X;
  muselet::Labels y;
};

inline Blobs blobs(muselet::Rng& rng, int per_class, const Eigen::MatrixXd& centers, double spread) {
  Blobs b;
  b.X.resize(per_class * centers.rows(), centers.cols());
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    for (int i = 0; i < per_class; ++i) {
      const Eigen::Index row = c * per_class + i;
      for (Eigen::Index j = 0; j < centers.cols(); ++j) b.X(row, j) = centers(c, j) + spread * rng.normal();
      b.y.push_back(static_cast<int>(c));
    }
  }
  return b;
}

inline double error_rate(const muselet::Labels& truth, const muselet::Labels& predicted) {
  int wrong = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) wrong += truth[i] != predicted[i];
  return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

}  // namespace testing
