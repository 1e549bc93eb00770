#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "muselet/corpus.hpp"

namespace muselet {

enum class LdaInit {
  Noise,            // eta plus small seeded uniform noise
  SpreadDocuments,  // Noise, plus mass from K mutually distant documents
};

struct LdaConfig {
  int topics = 10;            // K
  double alpha0 = 0.1;        // initial symmetric Dirichlet on topic proportions
  double eta0 = 0.1;          // symmetric Dirichlet on topic-term distributions
  bool estimate_alpha = true;
  bool estimate_eta = false;
  int max_outer = 100;
  int max_inner = 50;
  double tol_elbo = 1e-6;     // relative change between outer iterations
  double tol_gamma = 1e-4;    // mean absolute change of a document's gamma
  std::uint64_t seed = 1;
  int restarts = 1;           // independent starts; the fit with the highest final bound wins
  LdaInit init = LdaInit::SpreadDocuments;
  int threads = 0;            // 0: MUSELET_THREADS or hardware concurrency

  /// Throws Error(InvalidArgument) on a non-positive field.
  void validate() const;
};

struct LdaModel {
  LdaConfig config;
  double alpha = 0.1;
  double eta = 0.1;
  Eigen::MatrixXd lambda;    // K x V variational Dirichlet over topic-term distributions
  Eigen::MatrixXd beta_hat;  // K x V, rows are E_q[beta_k]
  Eigen::MatrixXd gamma;     // M x K variational Dirichlet over topic proportions
  std::vector<double> elbo_trace;
  std::string vocab_hash;

  Eigen::Index topics() const noexcept { return lambda.rows(); }
  Eigen::Index terms() const noexcept { return lambda.cols(); }
  Eigen::Index docs() const noexcept { return gamma.rows(); }

  /// Recomputes beta_hat from lambda.
  void refresh_beta();
};

/// Token-level responsibilities. phi[d] has one row per distinct term of
/// document d (ascending term id); every occurrence of a term shares its row.
struct TopicAssignmentState {
  std::vector<Eigen::MatrixXd> phi;
};

/// Called after each outer iteration with the 1-based iteration number.
using FitObserver = std::function<void(int iteration, const LdaModel& model)>;

/// Variational EM for smoothed LDA. Throws Error(EmptyCorpus) or Error(NonFiniteElbo).
/// Start r of config.restarts uses initial_lambda() seeded with derive_seed(seed, r)
/// (start 0 uses seed itself); the observer sees every start's iterations in turn.
LdaModel fit(const DocumentTermMatrix& dtm, const LdaConfig& config, const FitObserver& observer = {});

/// The first starting lambda used by fit(): eta0 + eps * U(0,1) noise drawn from config.seed,
/// eps = 0.01 * tokens / (topics * terms).
/// SpreadDocuments then adds half a topic's share of tokens to row k, spread as document k's
/// term frequencies; documents are picked farthest-first, starting from the one farthest from a seeded random anchor.
Eigen::MatrixXd initial_lambda(const DocumentTermMatrix& dtm, const LdaConfig& config);

/// fit() from a caller-supplied topics x terms starting lambda.
LdaModel fit_from(const DocumentTermMatrix& dtm, const LdaConfig& config, Eigen::MatrixXd lambda,
                  const FitObserver& observer = {});

/// Responsibilities that maximize the bound for the model's gamma and lambda.
TopicAssignmentState topic_assignments(const LdaModel& model, const DocumentTermMatrix& dtm);

/// Variational lower bound at the model's (gamma, lambda, alpha, eta) with phi at its optimum.
double elbo(const LdaModel& model, const DocumentTermMatrix& dtm);

/// Per-document bound on log p(w_d) using the point estimate beta_hat; gamma and
/// phi are inferred afresh for each row of `dtm`, so held-out documents work.
Eigen::VectorXd document_log_likelihoods(const LdaModel& model, const DocumentTermMatrix& dtm);

/// exp(-sum_d log p(w_d) / sum_d N_d) with the per-document bound above.
double perplexity(const LdaModel& model, const DocumentTermMatrix& dtm);

/// gamma rows normalized to sum to one.
Eigen::MatrixXd topic_proportions(const LdaModel& model);

/// The n most probable terms of one topic, descending, ties by term.
std::vector<std::pair<std::string, double>> top_tokens(const LdaModel& model, const Vocabulary& vocab, Eigen::Index topic,
                                                       Eigen::Index n);

/// Maximizer over a in [1e-4, 1e3] of
///   count * (lnGamma(dim * a) - dim * lnGamma(a)) + (a - 1) * suff_stat,
/// by Newton steps safeguarded with bisection. This is the bound's dependence on a
/// symmetric Dirichlet parameter shared by `count` distributions of dimension `dim`.
double maximize_symmetric_dirichlet(double count, double dim, double suff_stat, double start);

std::string model_to_json(const LdaModel& model);
LdaModel model_from_json(std::string_view text);

/// Worker count: explicit request, else MUSELET_THREADS, else hardware concurrency.
int resolve_threads(int requested);

}  // namespace muselet
