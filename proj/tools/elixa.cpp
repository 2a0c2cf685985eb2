#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "elixa/clusters.hpp"
#include "elixa/corpus_io.hpp"
#include "elixa/eval.hpp"
#include "elixa/lexicon.hpp"
#include "elixa/ote.hpp"
#include "elixa/polarity.hpp"
#include "elixa/text.hpp"
#include "elixa/util.hpp"
#include "json.hpp"

namespace {

using elixa::DataError;

nlohmann::json parse_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

// Paths inside config files resolve relative to the config file itself.
std::string resolve_path(const std::string& config_path, const std::string& ref) {
  std::filesystem::path p(ref);
  if (p.is_absolute()) return ref;
  return (std::filesystem::path(config_path).parent_path() / p).string();
}

elixa::ClusterLexicon load_cluster_file(const std::string& kind, const std::string& path) {
  switch (elixa::cluster_kind_from_string(kind)) {
    case elixa::ClusterKind::Brown:
      return elixa::load_brown(path);
    case elixa::ClusterKind::Clark:
      return elixa::load_clark(path);
    case elixa::ClusterKind::Kmeans:
      return elixa::load_kmeans_lexicon(path);
  }
  throw std::invalid_argument("unknown cluster kind: " + kind);
}

elixa::OteFeatureConfig load_ote_config(const std::string& path, int& beam) {
  elixa::OteFeatureConfig cfg;
  if (path.empty()) return cfg;
  nlohmann::json j = parse_json_file(path);
  try {
    cfg.window = j.value("window", cfg.window);
    cfg.prefix_len = j.value("prefix_len", cfg.prefix_len);
    cfg.suffix_len = j.value("suffix_len", cfg.suffix_len);
    cfg.bigrams = j.value("bigrams", cfg.bigrams);
    cfg.trigrams = j.value("trigrams", cfg.trigrams);
    cfg.constrained = j.value("constrained", cfg.constrained);
    cfg.cutoff = j.value("cutoff", cfg.cutoff);
    beam = j.value("beam", beam);
    for (const auto& jc : j.value("clusters", nlohmann::json::array())) {
      elixa::NamedClusterLexicon named;
      named.name = jc.at("name").get<std::string>();
      named.lexicon = load_cluster_file(jc.at("kind").get<std::string>(),
                                        resolve_path(path, jc.at("path").get<std::string>()));
      cfg.clusters.push_back(std::move(named));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  return cfg;
}

elixa::PolarityFeatureConfig load_pol_config(const std::string& path) {
  elixa::PolarityFeatureConfig cfg;
  if (path.empty()) return cfg;
  nlohmann::json j = parse_json_file(path);
  try {
    cfg.ngram_max = j.value("ngram_max", cfg.ngram_max);
    cfg.use_pos = j.value("use_pos", cfg.use_pos);
    cfg.use_category = j.value("use_category", cfg.use_category);
    cfg.scale = j.value("scale", cfg.scale);
    if (j.contains("window") && !j["window"].is_null()) {
      cfg.window = j["window"].get<int>();
    }
    for (const auto& jl : j.value("lexicons", nlohmann::json::array())) {
      elixa::NamedPolarityLexicon named;
      named.name = jl.at("name").get<std::string>();
      named.lexicon = elixa::load_lexicon(resolve_path(path, jl.at("path").get<std::string>()),
                                          named.name);
      cfg.lexicons.push_back(std::move(named));
    }
    for (const auto& jc : j.value("clusters", nlohmann::json::array())) {
      elixa::NamedClusterLexicon named;
      named.name = jc.at("name").get<std::string>();
      named.lexicon = load_cluster_file(jc.at("kind").get<std::string>(),
                                        resolve_path(path, jc.at("path").get<std::string>()));
      cfg.clusters.push_back(std::move(named));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  if (cfg.ngram_max < 1 || cfg.ngram_max > 4) {
    throw std::invalid_argument(path + ": ngram_max must be in [1,4]");
  }
  if (cfg.window && *cfg.window <= 0) {
    throw std::invalid_argument(path + ": window must be positive");
  }
  return cfg;
}

elixa::SourceLexicon load_source_or_empty(elixa::SourceKind kind, const std::string& path) {
  if (path.empty()) {
    elixa::SourceLexicon lex;
    lex.kind = kind;
    return lex;
  }
  return elixa::load_source_lexicon(kind, path);
}

void print_prf_report(const elixa::OteCvReport& report) {
  elixa::Table table;
  table.header = {"fold", "precision", "recall", "f1"};
  for (size_t i = 0; i < report.per_fold.size(); ++i) {
    const auto& s = report.per_fold[i];
    table.rows.push_back({std::to_string(i + 1), elixa::percent(s.precision),
                          elixa::percent(s.recall), elixa::percent(s.f1)});
  }
  table.rows.push_back({"mean", elixa::percent(report.mean.precision),
                        elixa::percent(report.mean.recall), elixa::percent(report.mean.f1)});
  std::cout << elixa::to_aligned_text(table);
}

void print_accuracy_report(const elixa::PolarityCvReport& report) {
  elixa::Table table;
  table.header = {"fold", "accuracy"};
  for (size_t i = 0; i < report.per_fold.size(); ++i) {
    table.rows.push_back({std::to_string(i + 1), elixa::percent(report.per_fold[i])});
  }
  table.rows.push_back({"mean", elixa::percent(report.mean)});
  table.rows.push_back({"majority", elixa::percent(report.majority)});
  std::cout << elixa::to_aligned_text(table);
}

int run(int argc, char** argv) {
  CLI::App app{"elixa: aspect-based sentiment analysis toolkit"};
  app.require_subcommand(1);

  uint64_t seed = 7;
  int jobs = 1;

  // convert
  auto* convert = app.add_subcommand("convert", "Convert corpora between formats");
  std::string conv_from = "semeval-xml", conv_to = "jsonl", conv_in, conv_out;
  convert->add_option("--from", conv_from, "Input format")->default_str("semeval-xml");
  convert->add_option("--to", conv_to, "Output format")->default_str("jsonl");
  convert->add_option("input", conv_in, "Input file")->required();
  convert->add_option("output", conv_out, "Output file")->required();
  convert->callback([&] {
    if (conv_from != "semeval-xml" || conv_to != "jsonl") {
      throw CLI::ValidationError("convert", "supported conversion: --from semeval-xml --to jsonl");
    }
    elixa::IngestStats stats;
    auto sentences = elixa::load_semeval_xml(conv_in, &stats);
    elixa::save_absa_jsonl(sentences, conv_out);
    std::cerr << "converted " << sentences.size() << " sentences";
    if (stats.snapped_spans > 0) std::cerr << " (" << stats.snapped_spans << " spans snapped)";
    std::cerr << "\n";
  });

  // lexicon
  auto* lexicon = app.add_subcommand("lexicon", "Build polarity lexicons");
  lexicon->require_subcommand(1);

  auto* merge = lexicon->add_subcommand("merge", "Merge source lexicons by priority");
  std::string liu_path, of_path, gi_path, swn_path, merge_out, merge_name = "gen";
  merge->add_option("--liu", liu_path, "Liu lexicon (word<TAB>category)");
  merge->add_option("--of", of_path, "OpinionFinder lexicon (word<TAB>category)");
  merge->add_option("--gi", gi_path, "General Inquirer lexicon (word<TAB>category)");
  merge->add_option("--swn", swn_path, "SentiWordNet lexicon (word<TAB>pos<TAB>neg)");
  merge->add_option("--name", merge_name, "Lexicon name");
  merge->add_option("output", merge_out, "Output lexicon file")->required();
  merge->callback([&] {
    auto liu = load_source_or_empty(elixa::SourceKind::Liu, liu_path);
    auto of = load_source_or_empty(elixa::SourceKind::OF, of_path);
    auto gi = load_source_or_empty(elixa::SourceKind::GI, gi_path);
    auto swn = load_source_or_empty(elixa::SourceKind::SWN, swn_path);
    auto merged = elixa::merge_with_priority(liu, of, gi, swn, merge_name);
    elixa::save_lexicon(merged, merge_out);
    std::cerr << merged.size() << " entries\n";
  });

  auto* restrict_cmd = lexicon->add_subcommand("restrict", "Keep entries at or above a threshold");
  double threshold = 0.6;
  std::string restrict_in, restrict_out;
  restrict_cmd->add_option("--threshold", threshold, "Absolute weight threshold")
      ->default_str("0.6");
  restrict_cmd->add_option("input", restrict_in, "Input lexicon")->required();
  restrict_cmd->add_option("output", restrict_out, "Output lexicon")->required();
  restrict_cmd->callback([&] {
    auto lex = elixa::load_lexicon(restrict_in);
    auto restricted = elixa::restrict_by_threshold(lex, threshold);
    elixa::save_lexicon(restricted, restrict_out);
    std::cerr << restricted.size() << " of " << lex.size() << " entries kept\n";
  });

  auto* induce = lexicon->add_subcommand("induce", "Induce a domain lexicon from rated reviews");
  elixa::DomainLexiconOptions induce_opts;
  std::string induce_in, induce_out;
  induce->add_option("--min-freq", induce_opts.min_freq, "Minimum token frequency")
      ->default_str("5");
  induce->add_option("--top-k", induce_opts.top_k, "Entries kept per polarity")
      ->default_str("2500");
  induce->add_option("--name", induce_opts.name, "Lexicon name");
  induce->add_option("input", induce_in, "Rated-review JSONL")->required();
  induce->add_option("output", induce_out, "Output lexicon")->required();
  induce->callback([&] {
    elixa::RatedReviewReader reader(induce_in);
    auto lex = elixa::build_domain_lexicon([&reader] { return reader.next(); }, induce_opts);
    elixa::save_lexicon(lex, induce_out);
    std::cerr << lex.size() << " entries";
    if (reader.skipped() > 0) std::cerr << " (" << reader.skipped() << " reviews skipped)";
    std::cerr << "\n";
  });

  // clusters
  auto* clusters = app.add_subcommand("clusters", "Word-representation clusters");
  clusters->require_subcommand(1);
  auto* km = clusters->add_subcommand("kmeans", "Cluster word vectors with k-means");
  size_t km_k = 400;
  size_t km_iters = 100;
  std::string km_in, km_out;
  km->add_option("--k", km_k, "Cluster count")->default_str("400");
  km->add_option("--max-iters", km_iters, "Iteration cap")->default_str("100");
  km->add_option("--seed", seed, "Random seed")->default_str("7");
  km->add_option("input", km_in, "Word-vector file (header: vocab dim)")->required();
  km->add_option("output", km_out, "Output cluster lexicon")->required();
  km->callback([&] {
    auto vectors = elixa::load_word_vectors(km_in);
    auto result = elixa::kmeans(vectors, km_k, seed, km_iters);
    elixa::save_cluster_lexicon(result.lexicon, km_out);
    std::cerr << result.iterations << " iterations, inertia "
              << elixa::format_double(result.inertia_history.back()) << "\n";
  });

  // ote
  auto* ote = app.add_subcommand("ote", "Opinion target extraction");
  ote->require_subcommand(1);
  std::string ote_config;
  int ote_epochs = 10;
  int ote_beam = 3;

  auto* ote_train = ote->add_subcommand("train", "Train a BIO sequence model");
  std::string ote_train_in, ote_train_model;
  ote_train->add_option("--config", ote_config, "Feature config JSON");
  ote_train->add_option("--epochs", ote_epochs, "Training epochs")->default_str("10");
  ote_train->add_option("--seed", seed, "Random seed")->default_str("7");
  ote_train->add_option("input", ote_train_in, "Training JSONL")->required();
  ote_train->add_option("model", ote_train_model, "Output model file")->required();
  ote_train->callback([&] {
    auto cfg = load_ote_config(ote_config, ote_beam);
    auto sentences = elixa::load_absa_jsonl(ote_train_in);
    auto model = elixa::train_perceptron(sentences, cfg, ote_epochs, seed, ote_beam);
    elixa::save_ote_model(model, ote_train_model);
    std::cerr << model.weights.size() << " features\n";
  });

  auto* ote_tag = ote->add_subcommand("tag", "Tag opinion targets");
  std::string ote_tag_model, ote_tag_in, ote_tag_out;
  ote_tag->add_option("model", ote_tag_model, "Model file")->required();
  ote_tag->add_option("input", ote_tag_in, "Input JSONL")->required();
  ote_tag->add_option("output", ote_tag_out, "Output JSONL")->required();
  ote_tag->callback([&] {
    auto model = elixa::load_ote_model(ote_tag_model);
    auto sentences = elixa::load_absa_jsonl(ote_tag_in);
    for (auto& s : sentences) {
      auto spans = elixa::bio_decode(elixa::decode(model, s.tokens), s.tokens);
      s.opinions.clear();
      for (const auto& span : spans) s.opinions.push_back({span, "", ""});
    }
    elixa::save_absa_jsonl(sentences, ote_tag_out);
  });

  auto* ote_cv = ote->add_subcommand("cv", "Cross-validate target extraction");
  size_t ote_folds = 5;
  std::string ote_cv_in;
  ote_cv->add_option("--config", ote_config, "Feature config JSON");
  ote_cv->add_option("--folds", ote_folds, "Fold count")->default_str("5");
  ote_cv->add_option("--epochs", ote_epochs, "Training epochs")->default_str("10");
  ote_cv->add_option("--seed", seed, "Random seed")->default_str("7");
  ote_cv->add_option("input", ote_cv_in, "Labeled JSONL")->required();
  ote_cv->callback([&] {
    auto cfg = load_ote_config(ote_config, ote_beam);
    auto sentences = elixa::load_absa_jsonl(ote_cv_in);
    auto report = elixa::cross_validate_ote(sentences, cfg, ote_folds, seed, ote_epochs, ote_beam);
    print_prf_report(report);
  });

  // pol
  auto* pol = app.add_subcommand("pol", "Sentiment polarity classification");
  pol->require_subcommand(1);
  std::string pol_config;
  double pol_c = 1.0;

  auto* pol_train = pol->add_subcommand("train", "Train a polarity classifier");
  std::string pol_train_in, pol_train_model;
  pol_train->add_option("--config", pol_config, "Feature config JSON");
  pol_train->add_option("--c", pol_c, "SVM complexity parameter")->default_str("1.0");
  pol_train->add_option("--seed", seed, "Random seed")->default_str("7");
  pol_train->add_option("--jobs", jobs, "Worker threads")->default_str("1");
  pol_train->add_option("input", pol_train_in, "Training JSONL")->required();
  pol_train->add_option("model", pol_train_model, "Output model file")->required();
  pol_train->callback([&] {
    auto cfg = load_pol_config(pol_config);
    auto sentences = elixa::load_absa_jsonl(pol_train_in);
    auto model = elixa::train_polarity(sentences, cfg, pol_c, seed, jobs);
    elixa::save_polarity_model(model, pol_train_model);
    std::cerr << model.classes.size() << " classes, " << model.features.size() << " features\n";
  });

  auto* pol_predict = pol->add_subcommand("predict", "Predict opinion polarities");
  std::string pol_pred_model, pol_pred_in, pol_pred_out;
  pol_predict->add_option("model", pol_pred_model, "Model file")->required();
  pol_predict->add_option("input", pol_pred_in, "Input JSONL")->required();
  pol_predict->add_option("output", pol_pred_out, "Output JSONL")->required();
  pol_predict->callback([&] {
    auto model = elixa::load_polarity_model(pol_pred_model);
    auto sentences = elixa::load_absa_jsonl(pol_pred_in);
    for (auto& s : sentences) {
      for (auto& op : s.opinions) op.polarity = elixa::predict_polarity(model, s, op);
    }
    elixa::save_absa_jsonl(sentences, pol_pred_out);
  });

  auto* pol_cv = pol->add_subcommand("cv", "Cross-validate polarity classification");
  size_t pol_folds = 10;
  std::string pol_cv_in;
  pol_cv->add_option("--config", pol_config, "Feature config JSON");
  pol_cv->add_option("--folds", pol_folds, "Fold count")->default_str("10");
  pol_cv->add_option("--c", pol_c, "SVM complexity parameter")->default_str("1.0");
  pol_cv->add_option("--seed", seed, "Random seed")->default_str("7");
  pol_cv->add_option("--jobs", jobs, "Worker threads")->default_str("1");
  pol_cv->add_option("input", pol_cv_in, "Labeled JSONL")->required();
  pol_cv->callback([&] {
    auto cfg = load_pol_config(pol_config);
    auto sentences = elixa::load_absa_jsonl(pol_cv_in);
    auto report = elixa::cross_validate_polarity(sentences, cfg, pol_folds, seed, pol_c, jobs);
    print_accuracy_report(report);
  });

  auto* pol_ablate = pol->add_subcommand("ablate", "Cross-validate a directory of configs");
  std::string ablate_dir, ablate_in, ablate_csv;
  pol_ablate->add_option("--configs", ablate_dir, "Directory of *.json configs")->required();
  pol_ablate->add_option("--folds", pol_folds, "Fold count")->default_str("10");
  pol_ablate->add_option("--c", pol_c, "SVM complexity parameter")->default_str("1.0");
  pol_ablate->add_option("--seed", seed, "Random seed")->default_str("7");
  pol_ablate->add_option("--jobs", jobs, "Worker threads")->default_str("1");
  pol_ablate->add_option("--csv", ablate_csv, "Also write the table as CSV");
  pol_ablate->add_option("input", ablate_in, "Labeled JSONL")->required();
  pol_ablate->callback([&] {
    std::error_code ec;
    std::filesystem::directory_iterator dir(ablate_dir, ec);
    if (ec) throw DataError("cannot open directory " + ablate_dir);
    std::map<std::string, std::string> config_files;  // stem -> path, sorted by stem
    for (const auto& entry : dir) {
      if (entry.path().extension() == ".json") {
        config_files[entry.path().stem().string()] = entry.path().string();
      }
    }
    if (config_files.empty()) throw DataError("no *.json configs in " + ablate_dir);
    std::vector<elixa::AblationSpec> specs;
    for (const auto& [stem, file] : config_files) {
      specs.push_back({stem, load_pol_config(file)});
    }
    auto sentences = elixa::load_absa_jsonl(ablate_in);
    auto table = elixa::ablation_table(sentences, specs, pol_folds, seed, pol_c, jobs);
    std::cout << elixa::to_aligned_text(table);
    if (!ablate_csv.empty()) {
      std::ofstream csv(ablate_csv, std::ios::binary);
      if (!csv) throw DataError("cannot write " + ablate_csv);
      csv << elixa::to_csv(table);
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << "run 'elixa --help' for usage\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
