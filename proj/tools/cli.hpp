#ifndef PREFSCALE_TOOLS_CLI_HPP
#define PREFSCALE_TOOLS_CLI_HPP

// Command-line frontend. run() returns 0 on success, 1 on usage errors and 2
// on data errors; all output goes to the supplied streams.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "prefscale/prefscale.hpp"

namespace prefscale::cli {

class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kOutputDirEnv = "PREFSCALE_OUTPUT_DIR";

/// Relative output paths are placed under $PREFSCALE_OUTPUT_DIR when it is set.
inline std::filesystem::path output_path(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return p;
  if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) return std::filesystem::path(dir) / p;
  return p;
}

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

inline std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct CommonOptions {
  ScoreWeights weights;
  bool machine = false;
  bool verbose = false;
};

struct TrainingOptions {
  std::string method = "lsq+hillclimb";
  std::string tie_mode = "strict";
  std::size_t max_iters = 0;
  std::vector<std::string> colloc;
  bool rule_cost = false;
  std::string functions;
  std::string ties = "fractional";
  std::optional<double> smoothing;
};

inline void add_weight_flags(CLI::App& app, CommonOptions& common) {
  app.add_option("--a1", common.weights.a1, "training score reward per shared constituent")->capture_default_str();
  app.add_option("--a2", common.weights.a2, "training score penalty per spurious constituent")->capture_default_str();
  app.add_option("--a3", common.weights.a3, "training score penalty per missing constituent")->capture_default_str();
}

inline void add_training_flags(CLI::App& app, TrainingOptions& t, bool multiple_methods) {
  if (!multiple_methods)
    app.add_option("--method", t.method, "unit|normalized|lsq|lsq+hillclimb")->capture_default_str();
  app.add_option("--tie-mode", t.tie_mode, "strict|lenient")->capture_default_str();
  app.add_option("--max-iters", t.max_iters, "hill-climbing iteration cap (0 = 50 x factors)");
  app.add_option("--colloc", t.colloc, "derived collocation function(s): mutual_info, chi_squared, chi, mean_distance, likelihood_ratio");
  app.add_flag("--rule-cost", t.rule_cost, "add the syntactic rule-cost function");
  app.add_option("--functions", t.functions, "comma-separated declared functions to use ('none' for none; default all)");
  app.add_option("--colloc-ties", t.ties, "tied best analyses in triple counts: fractional|count_all")->capture_default_str();
  app.add_option("--smoothing", t.smoothing, "override add-k smoothing of joint triple counts");
}

inline TieMode parse_tie_mode(const std::string& s) {
  if (s == "strict") return TieMode::strict;
  if (s == "lenient") return TieMode::lenient;
  throw usage_error("--tie-mode must be strict or lenient");
}

inline PipelineConfig pipeline_config(const CommonOptions& common, const TrainingOptions& t, Method method) {
  PipelineConfig cfg;
  cfg.weights = common.weights;
  if (!cfg.weights.valid()) throw usage_error("--a1/--a2/--a3 must be finite and non-negative");
  cfg.method = method;
  cfg.tie_mode = parse_tie_mode(t.tie_mode);
  cfg.max_iterations = t.max_iters;
  cfg.rule_cost = t.rule_cost;
  for (const auto& name : t.colloc) {
    const auto s = parse_statistic(name);
    if (!s) throw usage_error("unknown collocation statistic '" + name + "'");
    cfg.colloc.push_back(*s);
  }
  if (!t.functions.empty()) {
    std::vector<std::string> names;
    if (t.functions != "none") {
      std::istringstream in(t.functions);
      std::string item;
      while (std::getline(in, item, ','))
        if (!item.empty()) names.push_back(item);
    }
    cfg.base_functions = names;
  }
  if (t.ties == "fractional")
    cfg.colloc_options.ties = TieWeighting::fractional;
  else if (t.ties == "count_all")
    cfg.colloc_options.ties = TieWeighting::count_all;
  else
    throw usage_error("--colloc-ties must be fractional or count_all");
  cfg.colloc_options.smoothing = t.smoothing;
  return cfg;
}

inline Method parse_method_flag(const std::string& name) {
  const auto m = parse_method(name);
  if (!m) throw usage_error("unknown method '" + name + "'");
  return *m;
}

inline void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

/// Factors for evaluation must cover every declared function and every derived one.
inline ScalingFactors factors_for(const Corpus& prepared, const ScalingFactors& f) {
  for (const auto& name : f.names) {
    bool known = false;
    for (const auto& g : prepared.function_names) known = known || g == name;
    if (!known) throw data_error("factor '" + name + "' names a function that is neither declared nor derived");
  }
  return align_factors(f, prepared.function_names);
}

inline nlohmann::json report_json(const std::string& label, const EvalReport& r) {
  nlohmann::json j;
  j["set"] = label;
  j["n_sentences"] = r.n_sentences;
  j["correct_strict"] = r.correct_strict;
  j["correct_fractional"] = r.correct_fractional;
  j["percentage"] = r.percentage;
  return j;
}

inline void print_table(std::ostream& out, const std::vector<std::pair<std::string, EvalReport>>& rows,
                        const std::string& first_column) {
  std::size_t width = first_column.size();
  for (const auto& [label, r] : rows) width = std::max(width, label.size());
  const auto pad = [width](const std::string& s) { return s + std::string(width - s.size(), ' '); };
  out << pad(first_column) << "  Number correct  Fractional  Percentage correct\n";
  for (const auto& [label, r] : rows) {
    auto number = std::to_string(r.correct_strict);
    auto frac = fixed(r.correct_fractional, 1);
    out << pad(label) << "  " << std::string(14 - std::min<std::size_t>(14, number.size()), ' ') << number << "  "
        << std::string(10 - std::min<std::size_t>(10, frac.size()), ' ') << frac << "  "
        << std::string(18 - std::min<std::size_t>(18, fixed(r.percentage, 1).size()), ' ') << fixed(r.percentage, 1)
        << '\n';
  }
}

inline std::string sign_line(const SignTestResult& r) {
  return "+" + std::to_string(r.plus) + " −" + std::to_string(r.minus) + " #SDs " + fixed(r.sds, 1);
}

// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Train and evaluate scaling factors for preference functions that rank competing analyses"};
  app.name("prefscale");
  app.require_subcommand(1);
  app.fallthrough();
  CommonOptions common;
  app.add_flag("--machine", common.machine, "emit machine-readable JSON records");
  app.add_flag("-v,--verbose", common.verbose, "more detail");

  // train
  auto* train = app.add_subcommand("train", "fit scaling factors on a corpus");
  std::string corpus_path;
  std::string factors_out;
  std::string models_out;
  TrainingOptions topt;
  train->add_option("--corpus", corpus_path, "corpus file")->required();
  train->add_option("--out", factors_out, "factors file to write")->required();
  train->add_option("--models-out", models_out, "trained collocation/rule models file");
  add_training_flags(*train, topt, false);
  add_weight_flags(*train, common);

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "evaluate factors on a corpus");
  std::string factors_path;
  std::string models_path;
  std::string results_out;
  evaluate_cmd->add_option("--corpus", corpus_path, "corpus file")->required();
  evaluate_cmd->add_option("--factors", factors_path, "factors file")->required();
  evaluate_cmd->add_option("--models", models_path, "models file from train --models-out");
  evaluate_cmd->add_option("--results-out", results_out, "per-sentence results file");
  std::optional<std::uint64_t> sample_seed;
  evaluate_cmd->add_option("--sample", sample_seed, "also report one seeded random pick per sentence");
  add_weight_flags(*evaluate_cmd, common);

  // crossval
  auto* crossval = app.add_subcommand("crossval", "k-fold held-out comparison of factor sets");
  std::size_t folds = 5;
  std::uint64_t seed = 1;
  std::vector<std::string> methods{"normalized", "lsq", "lsq+hillclimb"};
  std::string results_dir;
  TrainingOptions copt;
  crossval->add_option("--corpus", corpus_path, "corpus file")->required();
  crossval->add_option("--k", folds, "number of folds")->capture_default_str();
  crossval->add_option("--seed", seed, "fold assignment seed")->capture_default_str();
  crossval->add_option("--method", methods, "comma-separated factor methods")->delimiter(',');
  crossval->add_option("--factors", factors_path, "fixed (e.g. hand tuned) factors evaluated as an extra set");
  crossval->add_option("--results-dir", results_dir, "directory for per-method result files");
  add_training_flags(*crossval, copt, true);
  add_weight_flags(*crossval, common);

  // compare
  auto* compare = app.add_subcommand("compare", "sign test between two per-sentence result files");
  std::string results_a;
  std::string results_b;
  compare->add_option("a", results_a, "results of system A")->required();
  compare->add_option("b", results_b, "results of system B")->required();

  // colloc-stats
  auto* colloc_stats = app.add_subcommand("colloc-stats", "tabulate collocation statistics for every triple");
  std::string sort_by = "mean_distance";
  std::string table_out;
  TrainingOptions sopt;
  colloc_stats->add_option("--corpus", corpus_path, "corpus file")->required();
  colloc_stats->add_option("--sort-by", sort_by, "statistic to sort by (descending)")->capture_default_str();
  colloc_stats->add_option("--out", table_out, "output file (default stdout)");
  colloc_stats->add_option("--colloc-ties", sopt.ties, "fractional|count_all")->capture_default_str();
  colloc_stats->add_option("--smoothing", sopt.smoothing, "override add-k smoothing");
  add_weight_flags(*colloc_stats, common);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  std::string config_path;
  std::string corpus_out;
  std::string planted_out;
  std::optional<std::uint64_t> synth_seed;
  std::optional<std::size_t> sentences, functions, min_an, max_an, heads, relations, rules;
  std::optional<double> noise, signal;
  synth->add_option("--config", config_path, "key=value configuration file");
  synth->add_option("--out", corpus_out, "corpus file to write")->required();
  synth->add_option("--planted-out", planted_out, "write the planted weights as a factors file");
  synth->add_option("--seed", synth_seed, "random seed");
  synth->add_option("--sentences", sentences, "number of sentences");
  synth->add_option("--functions", functions, "number of preference functions");
  synth->add_option("--min-analyses", min_an, "minimum analyses per sentence");
  synth->add_option("--max-analyses", max_an, "maximum analyses per sentence");
  synth->add_option("--noise", noise, "feature noise scale");
  synth->add_option("--triple-signal", signal, "how predictive triples and rules are of correctness, in [0,1]");
  synth->add_option("--heads", heads, "head vocabulary size");
  synth->add_option("--relations", relations, "relation vocabulary size");
  synth->add_option("--rules", rules, "rule vocabulary size");

  // score
  auto* score = app.add_subcommand("score", "rank every sentence's analyses");
  score->add_option("--corpus", corpus_path, "corpus file")->required();
  score->add_option("--factors", factors_path, "factors file")->required();
  score->add_option("--models", models_path, "models file from train --models-out");

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "check corpus invariants");
  validate_cmd->add_option("--corpus", corpus_path, "corpus file")->required();

  // convert-tree
  auto* convert = app.add_subcommand("convert-tree", "convert a bracketed skeletal tree to corpus fields");
  std::string bracketed;
  std::string sentence_id = "s1";
  convert->add_option("--tree", bracketed, "e.g. \"(P do (A I) get (A dinner))\"")->required();
  convert->add_option("--id", sentence_id, "sentence id")->capture_default_str();

  std::vector<const char*> argv;
  argv.push_back("prefscale");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostream& stream = e.get_exit_code() == 0 ? out : err;
    if (e.get_exit_code() == 0) {
      stream << app.help();
      for (auto* sub : app.get_subcommands()) stream << sub->help();
      return 0;
    }
    stream << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return 1;
  }

  try {
    if (train->parsed()) {
      const auto corpus = load_corpus(corpus_path);
      const auto cfg = pipeline_config(common, topt, parse_method_flag(topt.method));
      if (cfg.method == Method::fixed) throw usage_error("train: method 'fixed' needs no training");
      if ((!cfg.colloc.empty() || cfg.rule_cost) && models_out.empty())
        throw usage_error("train: derived functions need --models-out");
      auto trained = train_pipeline(corpus, cfg);
      print_warnings(trained.warnings, err);
      // Declared functions left out of training are written with factor 0 so
      // the file covers every function evaluation will see.
      const auto prepared = prepare(corpus, trained.models);
      for (const auto& name : prepared.function_names) {
        if (trained.factors.find(name)) continue;
        trained.factors.names.push_back(name);
        trained.factors.values.push_back(0.0);
      }
      trained.factors = align_factors(trained.factors, prepared.function_names);
      save_factors(output_path(factors_out), trained.factors);
      if (!models_out.empty()) save_models(output_path(models_out), trained.models);
      const auto count = correct_count(prepared, trained.factors, cfg.tie_mode);
      if (common.machine) {
        nlohmann::json j;
        j["method"] = std::string(to_string(cfg.method));
        j["factors"] = nlohmann::json::object();
        for (std::size_t i = 0; i < trained.factors.size(); ++i) j["factors"][trained.factors.names[i]] = trained.factors.values[i];
        j["training_correct"] = count;
        j["n_sentences"] = corpus.sentences.size();
        j["hill_climb_counts"] = trained.hill_climb_counts;
        out << j.dump() << '\n';
      } else {
        out << "method: " << to_string(cfg.method) << '\n';
        for (std::size_t i = 0; i < trained.factors.size(); ++i)
          out << "  " << trained.factors.names[i] << '\t' << general(trained.factors.values[i]) << '\n';
        out << "training sentences correct: " << count << " / " << corpus.sentences.size() << '\n';
        if (!trained.hill_climb_counts.empty() && common.verbose) {
          out << "hill-climbing counts:";
          for (auto c : trained.hill_climb_counts) out << ' ' << c;
          out << '\n';
        }
      }
      return 0;
    }

    if (evaluate_cmd->parsed() || score->parsed()) {
      const auto corpus = load_corpus(corpus_path);
      TrainedModels models;
      if (!models_path.empty()) models = load_models(models_path);
      const auto prepared = prepare(corpus, models);
      const auto factors = factors_for(prepared, load_factors(factors_path));
      if (score->parsed()) {
        for (const auto& s : prepared.sentences) {
          const auto ranked = rank(s, factors);
          std::map<std::string, bool> ok;
          for (const auto& a : s.analyses) ok[a.id] = exact_match(a, s.gold);
          if (common.machine) {
            nlohmann::json j;
            j["sentence"] = s.id;
            j["ranking"] = nlohmann::json::array();
            for (const auto& r : ranked) j["ranking"].push_back({{"id", r.id}, {"score", r.score}, {"correct", ok[r.id]}});
            out << j.dump() << '\n';
          } else {
            out << s.id << '\n';
            for (const auto& r : ranked)
              out << "  " << r.id << '\t' << general(r.score) << (ok[r.id] ? "\tcorrect" : "") << '\n';
          }
        }
        return 0;
      }
      const auto report = evaluate(prepared, factors);
      const auto baseline = random_baseline(prepared);
      if (!results_out.empty()) save_results(output_path(results_out), report);
      std::vector<std::pair<std::string, EvalReport>> rows = {{"(Random baseline)", baseline}};
      if (sample_seed)
        rows.emplace_back("(Random pick, seed " + std::to_string(*sample_seed) + ")",
                          random_baseline_sampled(prepared, *sample_seed));
      rows.emplace_back("Factors", report);
      if (common.machine) {
        for (const auto& [label, r] : rows) out << report_json(label == "Factors" ? factors_path : label, r).dump() << '\n';
      } else {
        print_table(out, rows, "Scaling factor set");
      }
      return 0;
    }

    if (crossval->parsed()) {
      const auto corpus = load_corpus(corpus_path);
      std::vector<std::pair<std::string, PipelineConfig>> sets;
      for (const auto& name : methods) {
        const auto m = parse_method_flag(name);
        if (m == Method::fixed) throw usage_error("crossval: pass fixed factors with --factors");
        sets.emplace_back(name, pipeline_config(common, copt, m));
      }
      if (!factors_path.empty()) {
        auto cfg = pipeline_config(common, copt, Method::fixed);
        cfg.fixed = load_factors(factors_path);
        sets.emplace_back("fixed", cfg);
      }
      if (sets.empty()) throw usage_error("crossval: no factor sets to evaluate");

      const auto folds_idx = make_folds(corpus.sentences.size(), folds, seed);
      std::vector<std::pair<std::string, EvalReport>> rows;
      EvalReport baseline;
      {
        std::vector<EvalReport> parts;
        for (const auto& f : folds_idx) parts.push_back(random_baseline(subset(corpus, f)));
        baseline = merge(parts);
      }
      rows.emplace_back("(Random baseline)", baseline);
      for (const auto& [label, cfg] : sets) {
        const auto result = cross_validate(corpus, folds, cfg, seed);
        for (const auto& t : result.trained) print_warnings(t.warnings, err);
        if (common.verbose && !common.machine) {
          for (std::size_t f = 0; f < result.fold_reports.size(); ++f)
            out << label << " fold " << f + 1 << ": " << result.fold_reports[f].correct_strict << " / "
                << result.fold_reports[f].n_sentences << '\n';
        }
        if (!results_dir.empty()) {
          const auto dir = output_path(results_dir);
          std::filesystem::create_directories(dir);
          auto file = label;
          for (auto& ch : file)
            if (ch == '+') ch = '_';
          save_results(dir / (file + ".results"), result.aggregate);
        }
        rows.emplace_back(label, result.aggregate);
      }
      if (common.machine) {
        for (const auto& [label, r] : rows) out << report_json(label, r).dump() << '\n';
      } else {
        print_table(out, rows, "Scaling factor set");
      }
      if (rows.size() > 2) {
        if (!common.machine) out << '\n' << "S1 vs S2: + − #SDs\n";
        for (std::size_t a = 1; a < rows.size(); ++a) {
          for (std::size_t b = a + 1; b < rows.size(); ++b) {
            const auto r = sign_test(strict_outcomes(rows[a].second), strict_outcomes(rows[b].second));
            if (common.machine) {
              out << nlohmann::json{{"s1", rows[a].first}, {"s2", rows[b].first}, {"plus", r.plus},
                                    {"minus", r.minus}, {"sds", r.sds}}.dump()
                  << '\n';
            } else {
              out << rows[a].first << " vs " << rows[b].first << ": " << sign_line(r) << '\n';
            }
          }
        }
      }
      return 0;
    }

    if (compare->parsed()) {
      const auto a = load_results(results_a);
      const auto b = load_results(results_b);
      const auto r = sign_test(strict_outcomes(a), strict_outcomes(b));
      if (common.machine) {
        out << nlohmann::json{{"plus", r.plus}, {"minus", r.minus}, {"sds", r.sds},
                              {"no_disagreements", r.no_disagreements()}}.dump()
            << '\n';
      } else {
        out << sign_line(r) << (r.no_disagreements() ? " (no disagreements)" : "") << '\n';
        if (common.verbose)
          out << "reference: #SDs 1.95 is significant at the 5% level (two-tail), 3.3 at the 0.1% level\n";
      }
      return 0;
    }

    if (colloc_stats->parsed()) {
      const auto stat = parse_statistic(sort_by);
      if (!stat) throw usage_error("unknown statistic '" + sort_by + "'");
      const auto corpus = apply_class_map(load_corpus(corpus_path));
      const auto cfg = pipeline_config(common, sopt, Method::unit);
      std::vector<CollocModel> models;
      for (auto s : all_statistics) models.push_back(train_colloc_model(corpus, s, cfg.weights, cfg.colloc_options));
      const auto stats = extract_triple_counts(corpus, cfg.weights, cfg.colloc_options.ties);
      std::vector<Triple> triples;
      for (const auto& [t, v] : models.front().table) triples.push_back(t);
      const auto sort_index = static_cast<std::size_t>(*stat);
      std::stable_sort(triples.begin(), triples.end(), [&](const Triple& x, const Triple& y) {
        return models[sort_index].lookup(x) > models[sort_index].lookup(y);
      });
      std::ofstream file;
      std::ostream* sink = &out;
      if (!table_out.empty()) {
        file.open(output_path(table_out), std::ios::binary);
        if (!file) throw data_error("cannot write " + table_out);
        sink = &file;
      }
      *sink << "h1\tr\th2\tjoint";
      for (auto s : all_statistics) *sink << '\t' << to_string(s);
      *sink << '\n';
      for (const auto& t : triples) {
        *sink << t.h1 << '\t' << t.r << '\t' << t.h2 << '\t' << format_double(stats.joint_count(t));
        for (const auto& m : models) *sink << '\t' << format_double(m.lookup(t));
        *sink << '\n';
      }
      return 0;
    }

    if (synth->parsed()) {
      SynthConfig cfg;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw data_error("cannot open synth config " + config_path);
        cfg = read_synth_config(in);
      }
      if (synth_seed) cfg.seed = *synth_seed;
      if (sentences) cfg.n_sentences = *sentences;
      if (functions) cfg.n_functions = *functions;
      if (min_an) cfg.min_analyses = *min_an;
      if (max_an) cfg.max_analyses = *max_an;
      if (noise) cfg.noise_scale = *noise;
      if (signal) cfg.triple_signal = *signal;
      if (heads) cfg.n_heads = *heads;
      if (relations) cfg.n_relations = *relations;
      if (rules) cfg.n_rules = *rules;
      const auto corpus = generate(cfg);
      save_corpus(output_path(corpus_out), corpus);
      if (!planted_out.empty()) save_factors(output_path(planted_out), planted_factors(cfg));
      if (common.verbose) out << "wrote " << corpus.sentences.size() << " sentences to " << corpus_out << '\n';
      return 0;
    }

    if (validate_cmd->parsed()) {
      const auto corpus = load_corpus(corpus_path, false);
      const auto violations = validate(corpus);
      for (const auto& v : violations) out << v << '\n';
      if (!violations.empty()) return 2;
      out << "ok: " << corpus.sentences.size() << " sentences, " << corpus.function_names.size() << " functions\n";
      return 0;
    }

    if (convert->parsed()) {
      const auto parsed = parse_bracketed_tree(bracketed);
      Sentence s;
      s.id = sentence_id;
      s.tokens = parsed.tokens;
      s.gold = parsed.tree;
      auto j = detail::sentence_to_json(s);
      out << j.dump() << '\n';
      return 0;
    }
  } catch (const usage_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace prefscale::cli

#endif  // PREFSCALE_TOOLS_CLI_HPP
