#include "muselet/lda.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <numeric>
#include <thread>

#include "muselet/error.hpp"
#include "muselet/rng.hpp"
#include "muselet/special.hpp"

namespace muselet {

namespace {

struct SparseDoc {
  std::vector<Eigen::Index> terms;
  Eigen::VectorXd counts;
  double length = 0.0;
};

std::vector<SparseDoc> sparse_rows(const DocumentTermMatrix& dtm) {
  std::vector<SparseDoc> docs(static_cast<std::size_t>(dtm.docs()));
  for (Eigen::Index d = 0; d < dtm.docs(); ++d) {
    const auto entries = dtm.row_entries(d);
    SparseDoc& doc = docs[static_cast<std::size_t>(d)];
    doc.counts.resize(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t r = 0; r < entries.size(); ++r) {
      doc.terms.push_back(entries[r].first);
      doc.counts[static_cast<Eigen::Index>(r)] = entries[r].second;
    }
    doc.length = doc.counts.sum();
  }
  return docs;
}

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w * n / workers, end = (w + 1) * n / workers; i < end; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

// E_q[ln beta_kv] = Psi(lambda_kv) - Psi(sum_v lambda_kv).
Eigen::MatrixXd expected_log_beta(const Eigen::MatrixXd& lambda) {
  Eigen::MatrixXd out = digamma_each(lambda.array()).matrix();
  for (Eigen::Index k = 0; k < lambda.rows(); ++k) out.row(k).array() -= digamma(lambda.row(k).sum());
  return out;
}

Eigen::VectorXd expected_log_theta(const Eigen::VectorXd& gamma) {
  return (digamma_each(gamma.array()) - digamma(gamma.sum())).matrix();
}

// phi_rk ∝ exp(elog_theta_k + log_weights_{k, term_r}); normalized in log space.
void update_phi(const SparseDoc& doc, const Eigen::VectorXd& elog_theta, const Eigen::MatrixXd& log_weights,
                Eigen::MatrixXd& phi) {
  const Eigen::Index K = elog_theta.size();
  phi.resize(static_cast<Eigen::Index>(doc.terms.size()), K);
  Eigen::VectorXd logp(K);
  for (std::size_t r = 0; r < doc.terms.size(); ++r) {
    logp = elog_theta + log_weights.col(doc.terms[r]);
    const double m = logp.maxCoeff();
    logp = (logp.array() - m).exp().matrix();
    phi.row(static_cast<Eigen::Index>(r)) = (logp / logp.sum()).transpose();
  }
}

// Alternates phi and gamma updates until gamma settles. Returns iterations used.
int infer_document(const SparseDoc& doc, const Eigen::MatrixXd& log_weights, double alpha, int max_inner,
                   double tol_gamma, Eigen::VectorXd& gamma, Eigen::MatrixXd& phi) {
  int it = 0;
  while (it < max_inner) {
    ++it;
    update_phi(doc, expected_log_theta(gamma), log_weights, phi);
    Eigen::VectorXd next = (phi.transpose() * doc.counts).array() + alpha;
    const double change = (next - gamma).cwiseAbs().mean();
    gamma = std::move(next);
    if (change < tol_gamma) break;
  }
  return it;
}

// Document terms of the bound: E[ln p(theta|alpha)] + E[ln p(z|theta)] + E[ln p(x|z,beta)]
// - E[ln q(theta)] - E[ln q(z)], with log_weights standing for E[ln beta] (or ln beta).
double document_bound(const SparseDoc& doc, const Eigen::VectorXd& gamma, const Eigen::MatrixXd& phi, double alpha,
                      const Eigen::MatrixXd& log_weights) {
  const auto K = static_cast<double>(gamma.size());
  const Eigen::VectorXd elog_theta = expected_log_theta(gamma);
  double bound = log_gamma(K * alpha) - K * log_gamma(alpha) + (alpha - 1.0) * elog_theta.sum();
  bound += -log_gamma(gamma.sum()) + log_gamma_each(gamma.array()).sum() -
           ((gamma.array() - 1.0) * elog_theta.array()).sum();
  for (std::size_t r = 0; r < doc.terms.size(); ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    double term = 0.0;
    for (Eigen::Index k = 0; k < gamma.size(); ++k) {
      const double p = phi(row, k);
      if (p <= 0.0) continue;
      term += p * (elog_theta[k] + log_weights(k, doc.terms[r]) - std::log(p));
    }
    bound += doc.counts[row] * term;
  }
  return bound;
}

// E[ln p(beta|eta)] - E[ln q(beta|lambda)] summed over topics.
double topic_bound(const Eigen::MatrixXd& lambda, const Eigen::MatrixXd& elog_beta, double eta) {
  const auto V = static_cast<double>(lambda.cols());
  double bound = 0.0;
  for (Eigen::Index k = 0; k < lambda.rows(); ++k) {
    bound += log_gamma(V * eta) - V * log_gamma(eta) + (eta - 1.0) * elog_beta.row(k).sum();
    bound += -log_gamma(lambda.row(k).sum()) + log_gamma_each(lambda.row(k).array()).sum() -
             ((lambda.row(k).array() - 1.0) * elog_beta.row(k).array()).sum();
  }
  return bound;
}

void check_vocab(const LdaModel& model, const DocumentTermMatrix& dtm) {
  if (dtm.terms() != model.terms()) {
    throw Error(ErrorCode::VocabularyMismatch, "model has " + std::to_string(model.terms()) + " terms, corpus has " +
                                                   std::to_string(dtm.terms()));
  }
  if (!model.vocab_hash.empty() && dtm.vocab.size() == dtm.terms() && dtm.vocab.hash() != model.vocab_hash) {
    throw Error(ErrorCode::VocabularyMismatch, "vocabulary hash differs from the model's");
  }
}

// Bound at phi = argmax given (gamma, lambda). Optionally hands back that phi.
double full_bound(const LdaModel& model, const std::vector<SparseDoc>& docs, int threads,
                  std::vector<Eigen::MatrixXd>* phi_out = nullptr) {
  const Eigen::MatrixXd elog_beta = expected_log_beta(model.lambda);
  std::vector<double> per_doc(docs.size());
  std::vector<Eigen::MatrixXd> local(phi_out ? 0 : docs.size());
  std::vector<Eigen::MatrixXd>& phis = phi_out ? *phi_out : local;
  phis.resize(docs.size());
  parallel_for(docs.size(), threads, [&](std::size_t d) {
    const Eigen::VectorXd gamma = model.gamma.row(static_cast<Eigen::Index>(d)).transpose();
    update_phi(docs[d], expected_log_theta(gamma), elog_beta, phis[d]);
    per_doc[d] = document_bound(docs[d], gamma, phis[d], model.alpha, elog_beta);
  });
  double total = topic_bound(model.lambda, elog_beta, model.eta);
  for (double b : per_doc) total += b;
  return total;
}

}  // namespace

void LdaConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, what);
  };
  require(topics >= 1, "topics must be >= 1");
  require(alpha0 > 0.0, "alpha0 must be positive");
  require(eta0 > 0.0, "eta0 must be positive");
  require(max_outer >= 1, "max_outer must be >= 1");
  require(max_inner >= 1, "max_inner must be >= 1");
  require(restarts >= 1, "restarts must be >= 1");
  require(tol_elbo > 0.0, "tol_elbo must be positive");
  require(tol_gamma > 0.0, "tol_gamma must be positive");
  require(threads >= 0, "threads must be >= 0");
}

void LdaModel::refresh_beta() {
  beta_hat = lambda;
  for (Eigen::Index k = 0; k < beta_hat.rows(); ++k) beta_hat.row(k) /= beta_hat.row(k).sum();
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MUSELET_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) return std::min<int>(cap, static_cast<int>(hw));
  }
  return static_cast<int>(hw);
}

double maximize_symmetric_dirichlet(double count, double dim, double suff_stat, double start) {
  constexpr double kLo = 1e-4;
  constexpr double kHi = 1e3;
  auto grad = [&](double a) { return count * dim * (digamma(dim * a) - digamma(a)) + suff_stat; };
  auto hess = [&](double a) { return count * (dim * dim * trigamma(dim * a) - dim * trigamma(a)); };
  // The objective is concave, so the sign of the gradient brackets the maximizer.
  if (grad(kLo) <= 0.0) return kLo;
  if (grad(kHi) >= 0.0) return kHi;
  double lo = kLo, hi = kHi;
  double a = std::clamp(start, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double g = grad(a);
    if (g > 0.0) lo = a; else hi = a;
    if (std::abs(g) < 1e-10 * std::max(1.0, std::abs(suff_stat)) || hi - lo < 1e-14 * hi) break;
    double next = a - g / hess(a);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    a = next;
  }
  return a;
}

Eigen::MatrixXd initial_lambda(const DocumentTermMatrix& dtm, const LdaConfig& config) {
  config.validate();
  const Eigen::Index K = config.topics;
  const Eigen::Index V = dtm.terms();
  // lambda = eta + eps * U breaks the symmetry of the all-eta starting point.
  Rng rng(config.seed);
  const double eps = 0.01 * static_cast<double>(dtm.total_tokens()) / static_cast<double>(std::max<Eigen::Index>(K * V, 1));
  Eigen::MatrixXd lambda(K, V);
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index v = 0; v < V; ++v) lambda(k, v) = config.eta0 + eps * rng.uniform();
  }
  if (config.init == LdaInit::Noise || dtm.docs() == 0) return lambda;

  // Noise alone hands each term to a near-random topic once digamma stretches the
  // small lambdas apart, and EM rarely undoes that with many topics.
  Eigen::MatrixXd freq = dtm.counts.cast<double>();
  for (Eigen::Index d = 0; d < freq.rows(); ++d) freq.row(d) /= std::max(1.0, freq.row(d).sum());
  // Documents are visited in content order, never index order, so permuting the
  // corpus leaves the start unchanged.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(freq.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::lexicographical_compare(freq.row(a).begin(), freq.row(a).end(), freq.row(b).begin(), freq.row(b).end());
  });
  auto farthest = [&](const Eigen::VectorXd& distance) {
    Eigen::Index best = order.front();
    for (Eigen::Index d : order) {
      if (distance[d] > distance[best]) best = d;
    }
    return best;
  };

  // A random anchor is often a mixture; seeding from the document farthest from it
  // starts at an extreme, nearly single-topic document instead.
  const Eigen::Index anchor = order[rng.below(order.size())];
  Eigen::VectorXd distance = (freq.rowwise() - freq.row(anchor)).rowwise().squaredNorm();
  Eigen::Index chosen = farthest(distance);
  distance.setConstant(std::numeric_limits<double>::infinity());
  const double share = 0.5 * static_cast<double>(dtm.total_tokens()) / static_cast<double>(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    lambda.row(k) += share * freq.row(chosen);
    for (Eigen::Index d = 0; d < freq.rows(); ++d) {
      distance[d] = std::min(distance[d], (freq.row(d) - freq.row(chosen)).squaredNorm());
    }
    chosen = farthest(distance);
  }
  return lambda;
}

LdaModel fit(const DocumentTermMatrix& dtm, const LdaConfig& config, const FitObserver& observer) {
  LdaModel best = fit_from(dtm, config, initial_lambda(dtm, config), observer);
  for (int r = 1; r < config.restarts; ++r) {
    LdaConfig start = config;
    start.seed = derive_seed(config.seed, static_cast<std::uint64_t>(r));
    LdaModel next = fit_from(dtm, config, initial_lambda(dtm, start), observer);
    if (next.elbo_trace.back() > best.elbo_trace.back()) best = std::move(next);
  }
  return best;
}

LdaModel fit_from(const DocumentTermMatrix& dtm, const LdaConfig& config, Eigen::MatrixXd lambda,
                  const FitObserver& observer) {
  config.validate();
  if (dtm.docs() == 0 || dtm.terms() == 0 || dtm.total_tokens() == 0) {
    throw Error(ErrorCode::EmptyCorpus, "cannot fit a topic model to an empty corpus");
  }
  const Eigen::Index K = config.topics;
  const Eigen::Index V = dtm.terms();
  const Eigen::Index M = dtm.docs();
  if (lambda.rows() != K || lambda.cols() != V || !(lambda.array() > 0.0).all()) {
    throw Error(ErrorCode::InvalidArgument, "initial lambda must be a positive topics x terms matrix");
  }
  if (K > V) std::cerr << "warning: " << K << " topics exceed the " << V << "-term vocabulary\n";

  const std::vector<SparseDoc> docs = sparse_rows(dtm);
  const int threads = resolve_threads(config.threads);

  LdaModel model;
  model.config = config;
  model.alpha = config.alpha0;
  model.eta = config.eta0;
  model.vocab_hash = dtm.vocab.size() == V ? dtm.vocab.hash() : std::string();
  model.lambda = std::move(lambda);
  model.gamma.resize(M, K);
  for (Eigen::Index d = 0; d < M; ++d) {
    model.gamma.row(d).setConstant(model.alpha + docs[static_cast<std::size_t>(d)].length / static_cast<double>(K));
  }

  std::vector<Eigen::MatrixXd> phi(docs.size());
  double previous = 0.0;
  for (int t = 1; t <= config.max_outer; ++t) {
    // E-step: per-document coordinate ascent against a frozen lambda. Gamma is
    // warm-started from the previous outer iteration.
    const Eigen::MatrixXd elog_beta = expected_log_beta(model.lambda);
    parallel_for(docs.size(), threads, [&](std::size_t d) {
      Eigen::VectorXd gamma = model.gamma.row(static_cast<Eigen::Index>(d)).transpose();
      infer_document(docs[d], elog_beta, model.alpha, config.max_inner, config.tol_gamma, gamma, phi[d]);
      model.gamma.row(static_cast<Eigen::Index>(d)) = gamma.transpose();
    });

    // lambda_kv = eta + sum_d count_dv phi_dvk, reduced in document order.
    model.lambda.setConstant(model.eta);
    for (std::size_t d = 0; d < docs.size(); ++d) {
      for (std::size_t r = 0; r < docs[d].terms.size(); ++r) {
        const auto row = static_cast<Eigen::Index>(r);
        model.lambda.col(docs[d].terms[r]) += docs[d].counts[row] * phi[d].row(row).transpose();
      }
    }

    // M-step.
    if (config.estimate_alpha && K > 1) {
      double stat = 0.0;
      for (Eigen::Index d = 0; d < M; ++d) stat += expected_log_theta(model.gamma.row(d).transpose()).sum();
      model.alpha = maximize_symmetric_dirichlet(static_cast<double>(M), static_cast<double>(K), stat, model.alpha);
    }
    if (config.estimate_eta) {
      const double stat = expected_log_beta(model.lambda).sum();
      model.eta = maximize_symmetric_dirichlet(static_cast<double>(K), static_cast<double>(V), stat, model.eta);
    }

    model.refresh_beta();
    const double bound = full_bound(model, docs, threads);
    if (!std::isfinite(bound)) {
      throw Error(ErrorCode::NonFiniteElbo, "bound is not finite at outer iteration " + std::to_string(t));
    }
    model.elbo_trace.push_back(bound);
    if (observer) observer(t, model);
    if (t > 1 && std::abs(bound - previous) < config.tol_elbo * std::abs(previous)) break;
    previous = bound;
  }
  return model;
}

TopicAssignmentState topic_assignments(const LdaModel& model, const DocumentTermMatrix& dtm) {
  check_vocab(model, dtm);
  if (dtm.docs() != model.docs()) throw Error(ErrorCode::InvalidArgument, "document count differs from the model's");
  TopicAssignmentState state;
  full_bound(model, sparse_rows(dtm), resolve_threads(model.config.threads), &state.phi);
  return state;
}

double elbo(const LdaModel& model, const DocumentTermMatrix& dtm) {
  check_vocab(model, dtm);
  if (dtm.docs() != model.docs()) throw Error(ErrorCode::InvalidArgument, "document count differs from the model's");
  const double bound = full_bound(model, sparse_rows(dtm), resolve_threads(model.config.threads));
  if (!std::isfinite(bound)) throw Error(ErrorCode::NonFiniteElbo, "bound is not finite");
  return bound;
}

Eigen::VectorXd document_log_likelihoods(const LdaModel& model, const DocumentTermMatrix& dtm) {
  check_vocab(model, dtm);
  const std::vector<SparseDoc> docs = sparse_rows(dtm);
  const Eigen::MatrixXd log_beta = model.beta_hat.array().log().matrix();
  const auto K = static_cast<double>(model.topics());
  Eigen::VectorXd out(static_cast<Eigen::Index>(docs.size()));
  parallel_for(docs.size(), resolve_threads(model.config.threads), [&](std::size_t d) {
    Eigen::VectorXd gamma = Eigen::VectorXd::Constant(model.topics(), model.alpha + docs[d].length / K);
    Eigen::MatrixXd phi;
    infer_document(docs[d], log_beta, model.alpha, model.config.max_inner, model.config.tol_gamma, gamma, phi);
    update_phi(docs[d], expected_log_theta(gamma), log_beta, phi);
    out[static_cast<Eigen::Index>(d)] = document_bound(docs[d], gamma, phi, model.alpha, log_beta);
  });
  if (!out.allFinite()) throw Error(ErrorCode::NonFiniteElbo, "document bound is not finite");
  return out;
}

double perplexity(const LdaModel& model, const DocumentTermMatrix& dtm) {
  const double tokens = static_cast<double>(dtm.total_tokens());
  if (tokens <= 0.0) throw Error(ErrorCode::EmptyCorpus, "perplexity of an empty corpus");
  return std::exp(-document_log_likelihoods(model, dtm).sum() / tokens);
}

Eigen::MatrixXd topic_proportions(const LdaModel& model) {
  Eigen::MatrixXd theta = model.gamma;
  for (Eigen::Index d = 0; d < theta.rows(); ++d) theta.row(d) /= theta.row(d).sum();
  return theta;
}

std::vector<std::pair<std::string, double>> top_tokens(const LdaModel& model, const Vocabulary& vocab,
                                                       Eigen::Index topic, Eigen::Index n) {
  if (topic < 0 || topic >= model.topics()) {
    throw Error(ErrorCode::TopicOutOfRange, "topic " + std::to_string(topic) + " of " + std::to_string(model.topics()));
  }
  if (vocab.size() != model.terms()) throw Error(ErrorCode::VocabularyMismatch, "vocabulary size differs from the model's");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(model.terms()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto row = model.beta_hat.row(topic);
  // Vocabulary ids are in term order, so an id tie-break is the lexicographic one.
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return row[a] > row[b]; });
  order.resize(static_cast<std::size_t>(std::clamp<Eigen::Index>(n, 0, model.terms())));
  std::vector<std::pair<std::string, double>> out;
  for (Eigen::Index v : order) out.emplace_back(vocab.term(v), row[v]);
  return out;
}

std::string model_to_json(const LdaModel& model) {
  using nlohmann::json;
  const LdaConfig& c = model.config;
  json j;
  j["config"] = {{"topics", c.topics},         {"alpha0", c.alpha0},       {"eta0", c.eta0},
                 {"estimate_alpha", c.estimate_alpha}, {"estimate_eta", c.estimate_eta}, {"max_outer", c.max_outer},
                 {"max_inner", c.max_inner},   {"tol_elbo", c.tol_elbo},   {"tol_gamma", c.tol_gamma},
                 {"seed", c.seed},         {"restarts", c.restarts},
                 {"init", c.init == LdaInit::Noise ? "noise" : "spread_documents"}};
  j["alpha"] = model.alpha;
  j["eta"] = model.eta;
  j["topics"] = model.topics();
  j["terms"] = model.terms();
  j["docs"] = model.docs();
  std::vector<double> lambda, gamma;
  for (Eigen::Index k = 0; k < model.topics(); ++k)
    for (Eigen::Index v = 0; v < model.terms(); ++v) lambda.push_back(model.lambda(k, v));
  for (Eigen::Index d = 0; d < model.docs(); ++d)
    for (Eigen::Index k = 0; k < model.topics(); ++k) gamma.push_back(model.gamma(d, k));
  j["lambda"] = lambda;
  j["gamma"] = gamma;
  j["elbo_trace"] = model.elbo_trace;
  j["vocab_hash"] = model.vocab_hash;
  return j.dump(1) + "\n";
}

LdaModel model_from_json(std::string_view text) {
  using nlohmann::json;
  LdaModel model;
  try {
    const json j = json::parse(text);
    const json& c = j.at("config");
    model.config.topics = c.at("topics").get<int>();
    model.config.alpha0 = c.at("alpha0").get<double>();
    model.config.eta0 = c.at("eta0").get<double>();
    model.config.estimate_alpha = c.at("estimate_alpha").get<bool>();
    model.config.estimate_eta = c.at("estimate_eta").get<bool>();
    model.config.max_outer = c.at("max_outer").get<int>();
    model.config.max_inner = c.at("max_inner").get<int>();
    model.config.tol_elbo = c.at("tol_elbo").get<double>();
    model.config.tol_gamma = c.at("tol_gamma").get<double>();
    model.config.seed = c.at("seed").get<std::uint64_t>();
    model.config.restarts = c.value("restarts", 1);
    model.config.init = c.value("init", std::string("spread_documents")) == "noise" ? LdaInit::Noise : LdaInit::SpreadDocuments;
    model.alpha = j.at("alpha").get<double>();
    model.eta = j.at("eta").get<double>();
    const auto K = j.at("topics").get<Eigen::Index>();
    const auto V = j.at("terms").get<Eigen::Index>();
    const auto M = j.at("docs").get<Eigen::Index>();
    const auto lambda = j.at("lambda").get<std::vector<double>>();
    const auto gamma = j.at("gamma").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(lambda.size()) != K * V || static_cast<Eigen::Index>(gamma.size()) != M * K) {
      throw Error(ErrorCode::InvalidArgument, "model arrays do not match their declared shapes");
    }
    model.lambda = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        lambda.data(), K, V);
    model.gamma =
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(gamma.data(), M, K);
    model.elbo_trace = j.at("elbo_trace").get<std::vector<double>>();
    model.vocab_hash = j.at("vocab_hash").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("model json: ") + e.what());
  }
  model.refresh_beta();
  return model;
}

}  // namespace muselet
