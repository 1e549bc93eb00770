#include "muselet/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <iostream>
#include <map>
#include <sstream>

#include "muselet/corpus.hpp"
#include "muselet/csv.hpp"
#include "muselet/error.hpp"
#include "muselet/generate.hpp"
#include "muselet/ingest.hpp"

namespace muselet::cli {

namespace fs = std::filesystem;

namespace {

bool is_score_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".mxl" || ext == ".xml" || ext == ".musicxml";
}

std::map<std::string, std::string> read_manifest(const fs::path& path) {
  std::map<std::string, std::string> labels;
  const auto rows = io::parse_csv(io::read_text(path));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() < 2) throw Error(ErrorCode::MalformedCsv, path.string() + ": row " + std::to_string(i + 1));
    if (i == 0 && rows[i][0] == "file") continue;
    labels[rows[i][0]] = rows[i][1];
  }
  return labels;
}

std::string label_for(const fs::path& relative, const RunConfig& config,
                      const std::map<std::string, std::string>& manifest) {
  switch (config.label_source) {
    case LabelSource::Subdirectory: {
      auto it = relative.begin();
      return std::distance(relative.begin(), relative.end()) >= 2 ? it->string() : std::string("unlabeled");
    }
    case LabelSource::FilenamePrefix: {
      const std::string stem = relative.stem().string();
      const auto cut = stem.find_first_of("_- ");
      return cut == std::string::npos ? stem : stem.substr(0, cut);
    }
    case LabelSource::Manifest: {
      auto it = manifest.find(relative.generic_string());
      return it != manifest.end() ? it->second : std::string();
    }
  }
  return {};
}

DocumentTermMatrix load_corpus(const RunConfig& config) {
  if (!config.corpus_csv) throw Error(ErrorCode::InvalidArgument, "--corpus is required");
  return dtm_from_csv(io::read_text(*config.corpus_csv));
}

LdaConfig lda_config(const RunConfig& config) {
  LdaConfig c = config.lda;
  c.seed = config.seed;
  return c;
}

// The supplied model, or a fresh fit with K = config.k (default 10).
LdaModel model_for(const RunConfig& config, const DocumentTermMatrix& dtm, std::ostream& log) {
  if (config.model_json) {
    LdaModel model = model_from_json(io::read_text(*config.model_json));
    if (model.terms() != dtm.terms() || model.vocab_hash != dtm.vocab.hash()) {
      throw Error(ErrorCode::VocabularyMismatch, config.model_json->string() + " was fitted to another vocabulary");
    }
    if (model.docs() != dtm.docs()) {
      throw Error(ErrorCode::VocabularyMismatch, config.model_json->string() + " was fitted to another corpus");
    }
    return model;
  }
  LdaConfig c = lda_config(config);
  c.topics = config.k.value_or(10);
  log << "fitting " << c.topics << "-topic model\n";
  return fit(dtm, c);
}

void prepare_output(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec || !fs::is_directory(config.output_dir)) {
    throw Error(ErrorCode::Io, "cannot create output directory " + config.output_dir.string());
  }
}

}  // namespace

void cmd_ingest(const RunConfig& config, std::ostream& log) {
  if (!config.input_dir) throw Error(ErrorCode::InvalidArgument, "--input is required");
  if (!fs::is_directory(*config.input_dir)) throw Error(ErrorCode::FileNotFound, config.input_dir->string());
  prepare_output(config);
  std::map<std::string, std::string> manifest;
  if (config.label_source == LabelSource::Manifest) {
    if (!config.manifest) throw Error(ErrorCode::InvalidArgument, "manifest labels need a manifest file");
    manifest = read_manifest(*config.manifest);
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(*config.input_dir)) {
    if (entry.is_regular_file() && is_score_file(entry.path())) files.push_back(fs::relative(entry.path(), *config.input_dir));
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });

  std::vector<Document> docs;
  std::string skipped = "file\terror\tmessage\n";
  std::string tokens = io::csv_line({"document", "label", "file", "measure", "token"});
  for (const fs::path& rel : files) {
    try {
      const std::string label = label_for(rel, config, manifest);
      if (label.empty()) throw Error(ErrorCode::InvalidArgument, "no label in manifest");
      Document doc = tokenize_song(load_score(*config.input_dir / rel), config.scheme, label);
      for (std::size_t m = 0; m < doc.tokens.size(); ++m) {
        tokens += io::csv_line({doc.name, doc.label, rel.generic_string(), std::to_string(m + 1), doc.tokens[m]});
      }
      docs.push_back(std::move(doc));
    } catch (const Error& e) {
      std::string message = e.what();
      std::replace(message.begin(), message.end(), '\n', ' ');
      std::replace(message.begin(), message.end(), '\t', ' ');
      skipped += rel.generic_string() + "\t" + std::string(to_string(e.code())) + "\t" + message + "\n";
      log << "skipped " << rel.generic_string() << ": " << to_string(e.code()) << '\n';
    }
  }
  io::write_text_atomic(config.output_dir / "ingest_log.tsv", skipped);
  if (docs.empty()) {
    throw Error(ErrorCode::NoIngestibleFiles, "no score in " + config.input_dir->string() + " could be ingested");
  }
  const DocumentTermMatrix dtm = build_dtm(docs);
  io::write_text_atomic(config.output_dir / "corpus.csv", dtm_to_csv(dtm));
  io::write_text_atomic(config.output_dir / "tokens.csv", tokens);
  log << "ingested " << docs.size() << " of " << files.size() << " files; " << dtm.terms() << " terms\n";
}

void cmd_topics(const RunConfig& config, std::ostream& log) {
  const DocumentTermMatrix dtm = load_corpus(config);
  prepare_output(config);
  const LdaConfig base = lda_config(config);

  std::vector<int> grid = config.k_grid;
  const auto rows = selection_metrics(dtm, grid, base);
  io::write_text_atomic(config.output_dir / "metrics.csv", selection_to_csv(rows));
  for (const SelectionRow& r : rows) {
    if (!r.ok()) log << "K=" << r.topics << " failed: " << r.error << '\n';
  }

  const int chosen = config.k ? *config.k : choose_topics(rows, config.metric);
  LdaConfig c = base;
  c.topics = chosen;
  const LdaModel model = fit(dtm, c);
  io::write_text_atomic(config.output_dir / "model.json", model_to_json(model));

  std::string top = "topic,rank,term,probability\n";
  for (Eigen::Index k = 0; k < model.topics(); ++k) {
    const auto tokens = top_tokens(model, dtm.vocab, k, 10);
    for (std::size_t r = 0; r < tokens.size(); ++r) {
      top += io::csv_line({std::to_string(k), std::to_string(r + 1), tokens[r].first, io::format_double(tokens[r].second)});
    }
  }
  io::write_text_atomic(config.output_dir / "top_tokens.csv", top);

  std::ostringstream report;
  report << "documents: " << dtm.docs() << "\nterms: " << dtm.terms() << "\ntokens: " << dtm.total_tokens() << '\n';
  report << "selection metric: " << to_string(config.metric) << (is_minimized(config.metric) ? " (minimum)" : " (maximum)")
         << '\n';
  report << "griffiths2004 column: griffiths2004 (VEM proxy), the variational lower bound\n";
  report << "chosen topics: " << chosen << (config.k ? " (fixed by --k)" : "") << '\n';
  report << "alpha: " << io::format_double(model.alpha) << "\neta: " << io::format_double(model.eta) << '\n';
  report << "outer iterations: " << model.elbo_trace.size() << '\n';
  report << "lower bound: " << io::format_double(model.elbo_trace.back()) << '\n';
  report << "perplexity: " << io::format_double(perplexity(model, dtm)) << '\n';
  io::write_text_atomic(config.output_dir / "topics_report.txt", report.str());
  log << "chosen K = " << chosen << '\n';
}

void cmd_classify(const RunConfig& config, std::ostream& log) {
  const DocumentTermMatrix dtm = load_corpus(config);
  prepare_output(config);
  Eigen::MatrixXd X;
  if (config.features == FeatureKind::RawCounts) {
    X = dtm.counts.cast<double>();
  } else {
    X = topic_proportions(model_for(config, dtm, log));
  }
  const LabeledDataset ds = LabeledDataset::from_names(std::move(X), dtm.doc_classes, config.features);
  if (ds.num_classes() < 2) throw Error(ErrorCode::TooFewClasses, "corpus has a single class");

  CvOptions options;
  options.folds = config.folds;
  options.repeats = config.repeats;
  options.seed = config.seed;
  const CvReport report = cross_validate(ds, config.classifiers, options);
  io::write_text_atomic(config.output_dir / "cv_long.csv", cv_to_csv(report));
  io::write_text_atomic(config.output_dir / "cv_summary.csv", cv_summary_csv(report));
  io::write_text_atomic(config.output_dir / "cv_report.json", cv_to_json(report));
  for (const CvSummary& s : report.summary) {
    log << to_string(s.classifier) << ": mean error " << s.mean << " (sd " << s.sd << ")\n";
  }
}

void cmd_chords(const RunConfig& config, std::ostream& log) {
  const DocumentTermMatrix dtm = load_corpus(config);
  prepare_output(config);
  const Eigen::MatrixXd theta = topic_proportions(model_for(config, dtm, log));
  std::map<std::string, Eigen::VectorXd> weights;
  for (Eigen::Index d = 0; d < theta.rows(); ++d) {
    auto [it, fresh] = weights.try_emplace(dtm.doc_classes[static_cast<std::size_t>(d)], Eigen::VectorXd::Zero(theta.cols()));
    it->second += theta.row(d).transpose();
  }
  std::string out = "class,topic,weight\n";
  for (const auto& [label, w] : weights) {
    for (Eigen::Index k = 0; k < w.size(); ++k) out += io::csv_line({label, std::to_string(k), io::format_double(w[k])});
  }
  io::write_text_atomic(config.output_dir / "chords.csv", out);
  log << "wrote " << weights.size() << " classes x " << theta.cols() << " topics\n";
}

namespace {

void cmd_generate(const RunConfig& config, const GenerativeSpec& spec, std::ostream& log) {
  prepare_output(config);
  const SyntheticCorpus corpus = sample_corpus(spec);
  io::write_text_atomic(config.output_dir / "corpus.csv", dtm_to_csv(corpus.dtm));
  log << "sampled " << spec.docs << " documents over " << spec.terms << " terms from " << spec.topics << " topics\n";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return kUsage;
    case ErrorCode::NonFiniteElbo:
    case ErrorCode::SolverDidNotConverge:
    case ErrorCode::DegenerateCovariance:
    case ErrorCode::SingularWithinScatter: return kNumericalFailure;
    default: return kDataError;
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"muselet: topic modelling and genre classification for symbolic music"};
  app.require_subcommand(1);

  RunConfig config;
  std::string input, corpus, model, scheme = "note_based", labels = "subdirectory", k_grid, metric = "caojuan2009",
                                    classifiers = "knn,svm,rf,nn,pda", features = "topic_proportions", out = "out";
  int k = 0;
  GenerativeSpec spec;
  spec.topics = 8;
  spec.terms = 100;
  spec.docs = 200;
  int length = 100;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", config.seed, "Random seed");
    sub->add_option("--out", out, "Output directory");
  };
  std::string init = "spread";
  auto add_fit = [&](CLI::App* sub) {
    sub->add_option("--restarts", config.lda.restarts, "Independent LDA starts; the best bound wins")
        ->check(CLI::PositiveNumber);
    sub->add_option("--init", init, "LDA start: spread (seeded from mutually distant documents) or noise")
        ->check(CLI::IsMember({"noise", "spread"}));
  };
  auto add_corpus = [&](CLI::App* sub) { sub->add_option("--corpus", corpus, "Corpus CSV from ingest")->required(); };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", model, "Fitted model JSON (otherwise a model is fitted)");
    sub->add_option("--k", k, "Topic count")->check(CLI::PositiveNumber);
  };

  CLI::App* ingest = app.add_subcommand("ingest", "Tokenize a directory of MusicXML scores into a corpus");
  ingest->add_option("--input", input, "Directory of .mxl/.xml/.musicxml files")->required();
  ingest->add_option("--scheme", scheme, "note_based or measure_based");
  ingest->add_option("--labels", labels, "subdirectory, filename_prefix, or a manifest CSV (file,label)");
  add_common(ingest);

  CLI::App* topics = app.add_subcommand("topics", "Fit topic models over a grid of K and score them");
  add_corpus(topics);
  topics->add_option("--k", k, "Fit this K instead of the metric's extremum")->check(CLI::PositiveNumber);
  topics->add_option("--k-grid", k_grid, "Comma-separated topic counts (default 2,4,...,20)");
  topics->add_option("--metric", metric, "griffiths2004, caojuan2009, arun2010 or deveaud2014");
  add_fit(topics);
  add_common(topics);

  CLI::App* classify = app.add_subcommand("classify", "Cross-validate the classifiers");
  add_corpus(classify);
  add_model(classify);
  classify->add_option("--classifiers", classifiers, "Comma-separated subset of knn,svm,rf,nn,pda");
  classify->add_option("--features", features, "topic_proportions or raw_counts");
  add_fit(classify);
  classify->add_option("--folds", config.folds, "Folds per repeat");
  classify->add_option("--repeats", config.repeats, "Repeats");
  add_common(classify);

  CLI::App* chords = app.add_subcommand("chords", "Class-to-topic weights for chord diagrams");
  add_corpus(chords);
  add_model(chords);
  add_fit(chords);
  add_common(chords);

  CLI::App* generate = app.add_subcommand("generate", "Sample a synthetic corpus CSV from the LDA generative process");
  generate->add_option("--k", spec.topics, "Topics");
  generate->add_option("--terms", spec.terms, "Vocabulary size");
  generate->add_option("--docs", spec.docs, "Documents");
  generate->add_option("--length", length, "Tokens per document");
  generate->add_option("--alpha", spec.alpha, "Dirichlet parameter of topic proportions");
  generate->add_option("--eta", spec.eta, "Dirichlet parameter of topics");
  add_common(generate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kSuccess : kUsage;
  }

  try {
    config.output_dir = out;
    config.lda.init = init == "spread" ? LdaInit::SpreadDocuments : LdaInit::Noise;
    if (!input.empty()) config.input_dir = fs::path(input);
    if (!corpus.empty()) config.corpus_csv = fs::path(corpus);
    if (!model.empty()) config.model_json = fs::path(model);
    if (k > 0) config.k = k;
    config.scheme = parse_scheme(scheme);
    if (labels == "subdirectory") {
      config.label_source = LabelSource::Subdirectory;
    } else if (labels == "filename_prefix") {
      config.label_source = LabelSource::FilenamePrefix;
    } else {
      config.label_source = LabelSource::Manifest;
      config.manifest = fs::path(labels);
    }
    if (!k_grid.empty()) {
      config.k_grid.clear();
      for (const std::string& item : split_list(k_grid)) config.k_grid.push_back(std::stoi(item));
    }
    config.metric = parse_metric(metric);
    config.classifiers.clear();
    for (const std::string& item : split_list(classifiers)) config.classifiers.push_back(parse_classifier(item));
    if (features == "topic_proportions") {
      config.features = FeatureKind::TopicProportions;
    } else if (features == "raw_counts") {
      config.features = FeatureKind::RawCounts;
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown feature kind '" + features + "'");
    }

    if (*ingest) cmd_ingest(config, std::cout);
    if (*topics) cmd_topics(config, std::cout);
    if (*classify) cmd_classify(config, std::cout);
    if (*chords) cmd_chords(config, std::cout);
    if (*generate) {
      spec.doc_lengths = {length};
      spec.seed = config.seed;
      cmd_generate(config, spec, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kSuccess;
}

}  // namespace muselet::cli
