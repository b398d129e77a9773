#ifndef PREFSCALE_PIPELINE_HPP
#define PREFSCALE_PIPELINE_HPP

// Training configuration shared by the CLI and cross-validation: which
// preference functions are active, which derived (collocation / rule-cost)
// functions to train, and how scaling factors are chosen.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "prefscale/colloc.hpp"
#include "prefscale/corpus.hpp"
#include "prefscale/error.hpp"
#include "prefscale/goldscore.hpp"
#include "prefscale/train.hpp"

namespace prefscale {

enum class Method {
  unit,           // every active function weighted 1
  fixed,          // user-supplied factors (e.g. hand tuned)
  normalized,     // 1/stddev with correlation sign
  least_squares,  // normal equations
  hill_climb,     // least squares refined by hill climbing
};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::unit: return "unit";
    case Method::fixed: return "fixed";
    case Method::normalized: return "normalized";
    case Method::least_squares: return "lsq";
    case Method::hill_climb: return "lsq+hillclimb";
  }
  return "";
}

inline std::optional<Method> parse_method(std::string_view name) {
  for (auto m : {Method::unit, Method::fixed, Method::normalized, Method::least_squares, Method::hill_climb})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

inline constexpr std::string_view kRuleCostFunction = "syntactic_rule_cost";

struct PipelineConfig {
  ScoreWeights weights;
  /// Declared corpus functions to use; nullopt means all of them.
  std::optional<std::vector<std::string>> base_functions;
  std::vector<Statistic> colloc;
  bool rule_cost = false;
  Method method = Method::hill_climb;
  ScalingFactors fixed;
  TieMode tie_mode = TieMode::strict;
  CollocOptions colloc_options;
  std::size_t max_iterations = 0;
};

struct TrainedModels {
  std::vector<CollocModel> colloc;
  std::optional<RuleModel> rules;

  bool operator==(const TrainedModels&) const = default;
};

struct TrainedPipeline {
  TrainedModels models;
  ScalingFactors factors;
  std::vector<std::size_t> hill_climb_counts;
  std::vector<std::string> warnings;
};

/// Names of the active functions: selected declared functions, then derived ones.
inline std::vector<std::string> active_functions(const Corpus& corpus, const PipelineConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.base_functions) {
    const std::set<std::string> declared(corpus.function_names.begin(), corpus.function_names.end());
    for (const auto& f : *cfg.base_functions) {
      if (!declared.contains(f)) throw data_error("function '" + f + "' is not declared by the corpus");
      out.push_back(f);
    }
  } else {
    out = corpus.function_names;
  }
  for (auto s : cfg.colloc) out.emplace_back(to_string(s));
  if (cfg.rule_cost) out.emplace_back(kRuleCostFunction);
  return out;
}

/// Trains collocation tables and rule probabilities on a class-mapped corpus.
inline TrainedModels train_models(const Corpus& mapped, const PipelineConfig& cfg) {
  TrainedModels models;
  for (auto s : cfg.colloc) models.colloc.push_back(train_colloc_model(mapped, s, cfg.weights, cfg.colloc_options));
  if (cfg.rule_cost) models.rules = estimate_rule_probs(mapped);
  return models;
}

/// Adds the derived functions' scores to every analysis of a class-mapped corpus.
inline Corpus augment(Corpus mapped, const TrainedModels& models) {
  std::vector<std::string> added;
  for (const auto& m : models.colloc) added.emplace_back(to_string(m.statistic));
  if (models.rules) added.emplace_back(kRuleCostFunction);
  for (const auto& name : added) {
    for (const auto& f : mapped.function_names)
      if (f == name) throw data_error("derived function '" + name + "' clashes with a declared function");
    mapped.function_names.push_back(name);
  }
  for (auto& s : mapped.sentences) {
    for (auto& a : s.analyses) {
      for (const auto& m : models.colloc)
        a.features[std::string(to_string(m.statistic))] = score_analysis(m, a, s.word_count());
      if (models.rules) a.features[std::string(kRuleCostFunction)] = syntactic_rule_cost(*models.rules, a);
    }
  }
  return mapped;
}

/// Class mapping plus derived features: what factors are applied to.
inline Corpus prepare(const Corpus& corpus, const TrainedModels& models) {
  return augment(apply_class_map(corpus), models);
}

inline TrainedPipeline train_pipeline(const Corpus& train, const PipelineConfig& cfg) {
  TrainedPipeline out;
  const auto mapped = apply_class_map(train);
  out.models = train_models(mapped, cfg);
  const auto ready = augment(mapped, out.models);
  const auto functions = active_functions(train, cfg);

  switch (cfg.method) {
    case Method::unit:
      out.factors = ScalingFactors::zeros(functions);
      std::fill(out.factors.values.begin(), out.factors.values.end(), 1.0);
      break;
    case Method::fixed:
      out.factors = align_factors(cfg.fixed, functions);
      break;
    case Method::normalized:
      out.factors = normalized_factors(assemble_training_matrix(ready, functions, cfg.weights), &out.warnings);
      break;
    case Method::least_squares:
      out.factors = least_squares(assemble_training_matrix(ready, functions, cfg.weights), &out.warnings);
      break;
    case Method::hill_climb: {
      auto start = least_squares(assemble_training_matrix(ready, functions, cfg.weights), &out.warnings);
      auto climbed = hill_climb(densify(ready, functions), std::move(start),
                                {cfg.tie_mode, cfg.max_iterations});
      out.factors = std::move(climbed.factors);
      out.hill_climb_counts = std::move(climbed.counts);
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Models file: {"colloc": [...], "rule_model": {...} | null}

inline nlohmann::json to_json(const TrainedModels& models) {
  nlohmann::json j;
  j["colloc"] = nlohmann::json::array();
  for (const auto& m : models.colloc) j["colloc"].push_back(to_json(m));
  j["rule_model"] = models.rules ? to_json(*models.rules) : nlohmann::json(nullptr);
  return j;
}

inline TrainedModels models_from_json(const nlohmann::json& j) {
  TrainedModels models;
  for (const auto& m : j.at("colloc")) models.colloc.push_back(colloc_model_from_json(m));
  if (const auto it = j.find("rule_model"); it != j.end() && !it->is_null())
    models.rules = rule_model_from_json(*it);
  return models;
}

inline void save_models(const std::filesystem::path& path, const TrainedModels& models) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write models file " + path.string());
  out << to_json(models).dump() << '\n';
}

inline TrainedModels load_models(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open models file " + path.string());
  try {
    return models_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw data_error("malformed models file " + path.string() + ": " + e.what());
  }
}

}  // namespace prefscale

#endif  // PREFSCALE_PIPELINE_HPP
