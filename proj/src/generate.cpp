#include "muselet/generate.hpp"

#include <cmath>
#include <cstdio>

#include "muselet/error.hpp"
#include "muselet/rng.hpp"

namespace muselet {

void GenerativeSpec::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, what);
  };
  require(topics >= 1 && terms >= 1 && docs >= 1, "sizes must be >= 1");
  require(alpha > 0.0 && eta > 0.0, "Dirichlet parameters must be positive");
  require(doc_lengths.size() == 1 || doc_lengths.size() == static_cast<std::size_t>(docs),
          "doc_lengths needs one entry or one per document");
  for (int n : doc_lengths) require(n >= 1, "document lengths must be >= 1");
  if (planted_beta) {
    require(planted_beta->rows() == topics && planted_beta->cols() == terms, "planted beta has the wrong shape");
    require((planted_beta->array() >= 0.0).all(), "planted beta has negative entries");
    for (Eigen::Index k = 0; k < topics; ++k) {
      require(std::abs(planted_beta->row(k).sum() - 1.0) < 1e-9, "planted beta rows must sum to 1");
    }
  }
}

std::string synthetic_term(int v, int terms) {
  int width = 1;
  for (int t = terms - 1; t >= 10; t /= 10) ++width;
  char buf[32];
  std::snprintf(buf, sizeof buf, "w%0*d", width, v);
  return buf;
}

Eigen::MatrixXd disjoint_topics(int topics, int terms) {
  if (topics < 1 || terms < topics) throw Error(ErrorCode::InvalidArgument, "need terms >= topics >= 1");
  const int block = terms / topics;
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(topics, terms);
  for (int k = 0; k < topics; ++k) beta.block(k, k * block, 1, block).setConstant(1.0 / block);
  return beta;
}

SyntheticCorpus sample_corpus(const GenerativeSpec& spec) {
  spec.validate();
  SyntheticCorpus out;
  PlantedTruth& truth = out.truth;

  if (spec.planted_beta) {
    truth.beta = *spec.planted_beta;
  } else {
    Rng rng(derive_seed(spec.seed, 0));
    truth.beta.resize(spec.topics, spec.terms);
    for (int k = 0; k < spec.topics; ++k) truth.beta.row(k) = rng.dirichlet(spec.eta, spec.terms).transpose();
  }

  std::vector<std::string> terms;
  for (int v = 0; v < spec.terms; ++v) terms.push_back(synthetic_term(v, spec.terms));
  DocumentTermMatrix& dtm = out.dtm;
  dtm.vocab = Vocabulary(terms);
  dtm.counts = CountMatrix::Zero(spec.docs, spec.terms);

  truth.theta.resize(spec.docs, spec.topics);
  truth.z.resize(static_cast<std::size_t>(spec.docs));
  truth.words.resize(static_cast<std::size_t>(spec.docs));
  for (int d = 0; d < spec.docs; ++d) {
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(d) + 1));
    const Eigen::VectorXd theta = rng.dirichlet(spec.alpha, spec.topics);
    truth.theta.row(d) = theta.transpose();
    const int n = spec.doc_length(d);
    auto& z = truth.z[static_cast<std::size_t>(d)];
    auto& words = truth.words[static_cast<std::size_t>(d)];
    for (int i = 0; i < n; ++i) {
      const auto topic = static_cast<int>(rng.categorical(theta));
      const Eigen::VectorXd row = truth.beta.row(topic).transpose();
      const auto term = static_cast<int>(rng.categorical(row));
      z.push_back(topic);
      words.push_back(term);
      ++dtm.counts(d, term);
    }
    Eigen::Index dominant = 0;
    theta.maxCoeff(&dominant);
    char name[32];
    std::snprintf(name, sizeof name, "doc%05d", d + 1);
    dtm.doc_names.emplace_back(name);
    dtm.doc_classes.push_back("topic" + std::to_string(dominant));
  }
  return out;
}

std::vector<Document> planted_genre_corpus(const std::vector<GenreProfile>& classes, int songs_per_class,
                                           int measures_per_song, std::uint64_t seed) {
  if (songs_per_class < 1 || measures_per_song < 1) {
    throw Error(ErrorCode::InvalidArgument, "songs_per_class and measures_per_song must be >= 1");
  }
  for (const GenreProfile& g : classes) {
    double total = 0.0;
    for (double w : g.weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidWeights, g.label + ": negative or non-finite weight");
      total += w;
    }
    if (total <= 0.0) throw Error(ErrorCode::InvalidWeights, g.label + ": all weights are zero");
  }

  std::vector<Document> docs;
  std::uint64_t song_index = 0;
  for (const GenreProfile& g : classes) {
    int support = 0;
    for (double w : g.weights) support += w > 0.0;
    for (int s = 0; s < songs_per_class; ++s) {
      Rng rng(derive_seed(seed, song_index++));
      Document doc;
      doc.name = g.label + " " + std::to_string(s + 1);
      doc.label = g.label;
      doc.scheme = Scheme::NoteBased;
      for (int m = 0; m < measures_per_song; ++m) {
        std::array<double, 12> remaining = g.weights;
        const int active = std::min(support, 1 + static_cast<int>(rng.below(4)));
        PitchClassVector token;
        for (int i = 0; i < active; ++i) {
          const std::size_t pc = rng.categorical(std::span<const double>(remaining));
          token.set(static_cast<int>(pc) + 1);
          remaining[pc] = 0.0;
        }
        doc.tokens.push_back(token.str());
      }
      docs.push_back(std::move(doc));
    }
  }
  return docs;
}

}  // namespace muselet
