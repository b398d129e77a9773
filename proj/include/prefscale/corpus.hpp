#ifndef PREFSCALE_CORPUS_HPP
#define PREFSCALE_CORPUS_HPP

// Data model for sentences with competing candidate analyses, plus the
// line-delimited corpus format:
//
//   {"class_map": {...}, "function_names": [...]}          <- header, first line
//   {"id": ..., "tokens": [...], "gold": [[s,e,"A"],...], "analyses": [...]}
//
// Each analysis is {"id", "spans", "triples", "rules", "features"}. Spans are
// half-open token ranges; the label slot is "A", "P", or omitted/null.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <compare>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "prefscale/error.hpp"

namespace prefscale {

enum class Category { none, A, P };

inline std::string_view to_string(Category c) {
  switch (c) {
    case Category::A: return "A";
    case Category::P: return "P";
    case Category::none: break;
  }
  return "";
}

/// Unlabeled (start, end) token range.
using Span = std::pair<int, int>;

struct Constituent {
  int start = 0;
  int end = 0;
  Category label = Category::none;

  Span span() const { return {start, end}; }
  bool operator==(const Constituent&) const = default;
};

struct SkeletalTree {
  std::vector<Constituent> constituents;
  bool operator==(const SkeletalTree&) const = default;
};

/// (head, relation, head) semantic collocation. The relation is a preposition
/// name or an argument position rendered as a string.
struct Triple {
  std::string h1;
  std::string r;
  std::string h2;

  auto operator<=>(const Triple&) const = default;
  bool operator==(const Triple&) const = default;
};

struct Analysis {
  std::string id;
  std::vector<Constituent> spans;
  std::vector<Triple> triples;
  std::vector<std::string> rules;
  std::map<std::string, double, std::less<>> features;

  /// Raw score of a preference function; absent keys read as 0.
  double feature(std::string_view name) const {
    const auto it = features.find(name);
    return it == features.end() ? 0.0 : it->second;
  }

  bool operator==(const Analysis&) const = default;
};

struct Sentence {
  std::string id;
  std::vector<std::string> tokens;
  SkeletalTree gold;
  std::vector<Analysis> analyses;

  std::size_t word_count() const { return tokens.size(); }
  bool operator==(const Sentence&) const = default;
};

struct Corpus {
  std::vector<std::string> function_names;
  std::vector<Sentence> sentences;
  std::map<std::string, std::string> class_map;

  bool operator==(const Corpus&) const = default;
};

/// Sorted, duplicate-free unlabeled span set.
inline std::vector<Span> span_set(const std::vector<Constituent>& cs) {
  std::vector<Span> out;
  out.reserve(cs.size());
  for (const auto& c : cs) out.push_back(c.span());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline void check_spans(const std::vector<Constituent>& spans, std::size_t n_tokens,
                        const std::string& where, bool require_nesting,
                        std::vector<std::string>& out) {
  const int n = static_cast<int>(n_tokens);
  for (const auto& c : spans) {
    if (c.start < 0 || c.start >= c.end || c.end > n) {
      out.push_back(where + ": span (" + std::to_string(c.start) + "," + std::to_string(c.end) +
                    ") out of range for " + std::to_string(n) + " tokens");
    }
  }
  std::vector<Span> sorted;
  for (const auto& c : spans) sorted.push_back(c.span());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] == sorted[i - 1]) {
      out.push_back(where + ": duplicate span (" + std::to_string(sorted[i].first) + "," +
                    std::to_string(sorted[i].second) + ")");
    }
  }
  if (!require_nesting) return;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      const auto [a0, a1] = sorted[i];
      const auto [b0, b1] = sorted[j];
      const bool disjoint = a1 <= b0 || b1 <= a0;
      const bool nested = (a0 <= b0 && b1 <= a1) || (b0 <= a0 && a1 <= b1);
      if (!disjoint && !nested) {
        out.push_back(where + ": constituents (" + std::to_string(a0) + "," + std::to_string(a1) +
                      ") and (" + std::to_string(b0) + "," + std::to_string(b1) +
                      ") partially overlap");
      }
    }
  }
}

}  // namespace detail

/// Returns one description per invariant violation; empty iff the corpus is well formed.
inline std::vector<std::string> validate(const Corpus& corpus) {
  std::vector<std::string> out;
  std::set<std::string, std::less<>> declared;
  for (const auto& f : corpus.function_names) {
    if (f.empty()) out.push_back("corpus: empty function name");
    if (!declared.insert(f).second) out.push_back("corpus: duplicate function name '" + f + "'");
  }
  std::set<std::string> sentence_ids;
  for (const auto& s : corpus.sentences) {
    const std::string where = "sentence '" + s.id + "'";
    if (!sentence_ids.insert(s.id).second) out.push_back(where + ": duplicate sentence id");
    if (s.tokens.empty()) out.push_back(where + ": no tokens");
    if (s.analyses.empty()) out.push_back(where + ": no analyses");
    detail::check_spans(s.gold.constituents, s.tokens.size(), where + " gold", true, out);
    std::set<std::string> analysis_ids;
    for (const auto& a : s.analyses) {
      const std::string awhere = where + " analysis '" + a.id + "'";
      if (!analysis_ids.insert(a.id).second) out.push_back(awhere + ": duplicate analysis id");
      detail::check_spans(a.spans, s.tokens.size(), awhere, false, out);
      for (const auto& t : a.triples) {
        if (t.h1.empty() || t.r.empty() || t.h2.empty())
          out.push_back(awhere + ": triple with empty field");
      }
      for (const auto& [name, value] : a.features) {
        if (!declared.contains(name)) out.push_back(awhere + ": undeclared feature '" + name + "'");
        if (!std::isfinite(value)) out.push_back(awhere + ": non-finite feature '" + name + "'");
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Class mapping

/// Replaces head symbols that appear in the class map by their class symbol.
inline Corpus apply_class_map(Corpus corpus) {
  if (corpus.class_map.empty()) return corpus;
  const auto& map = corpus.class_map;
  auto lift = [&](std::string& head) {
    if (const auto it = map.find(head); it != map.end()) head = it->second;
  };
  for (auto& s : corpus.sentences) {
    for (auto& a : s.analyses) {
      for (auto& t : a.triples) {
        lift(t.h1);
        lift(t.h2);
      }
    }
  }
  return corpus;
}

/// Corpus restricted to the given sentence indices, in the given order.
inline Corpus subset(const Corpus& corpus, const std::vector<std::size_t>& indices) {
  Corpus out;
  out.function_names = corpus.function_names;
  out.class_map = corpus.class_map;
  out.sentences.reserve(indices.size());
  for (auto i : indices) out.sentences.push_back(corpus.sentences.at(i));
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

using nlohmann::json;

inline json constituent_to_json(const Constituent& c) {
  json j = json::array({c.start, c.end});
  if (c.label != Category::none) j.push_back(std::string(to_string(c.label)));
  return j;
}

inline Constituent constituent_from_json(const json& j) {
  if (!j.is_array() || j.size() < 2 || j.size() > 3 || !j[0].is_number_integer() ||
      !j[1].is_number_integer())
    throw data_error("span must be [start, end] or [start, end, label]");
  Constituent c{j[0].get<int>(), j[1].get<int>(), Category::none};
  if (j.size() == 3 && !j[2].is_null()) {
    if (!j[2].is_string()) throw data_error("span label must be a string");
    const auto label = j[2].get<std::string>();
    if (label == "A")
      c.label = Category::A;
    else if (label == "P")
      c.label = Category::P;
    else
      throw data_error("span label must be \"A\" or \"P\", got \"" + label + "\"");
  }
  return c;
}

inline std::string symbol_from_json(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw data_error("triple fields must be strings or integers");
}

inline const json& field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw data_error(std::string("missing field '") + key + "'");
  return *it;
}

inline Analysis analysis_from_json(const json& j) {
  if (!j.is_object()) throw data_error("analysis must be an object");
  Analysis a;
  a.id = field(j, "id").get<std::string>();
  if (const auto it = j.find("spans"); it != j.end())
    for (const auto& c : *it) a.spans.push_back(constituent_from_json(c));
  if (const auto it = j.find("triples"); it != j.end()) {
    for (const auto& t : *it) {
      if (!t.is_array() || t.size() != 3) throw data_error("triple must have three fields");
      a.triples.push_back({symbol_from_json(t[0]), symbol_from_json(t[1]), symbol_from_json(t[2])});
    }
  }
  if (const auto it = j.find("rules"); it != j.end())
    for (const auto& r : *it) a.rules.push_back(r.get<std::string>());
  if (const auto it = j.find("features"); it != j.end()) {
    if (!it->is_object()) throw data_error("features must be an object");
    for (const auto& [name, value] : it->items()) {
      if (!value.is_number()) throw data_error("feature '" + name + "' is not a number");
      a.features.emplace(name, value.get<double>());
    }
  }
  return a;
}

inline json analysis_to_json(const Analysis& a) {
  json j;
  j["id"] = a.id;
  j["spans"] = json::array();
  for (const auto& c : a.spans) j["spans"].push_back(constituent_to_json(c));
  j["triples"] = json::array();
  for (const auto& t : a.triples) j["triples"].push_back(json::array({t.h1, t.r, t.h2}));
  j["rules"] = a.rules;
  j["features"] = json::object();
  for (const auto& [name, value] : a.features) j["features"][name] = value;
  return j;
}

inline Sentence sentence_from_json(const json& j) {
  if (!j.is_object()) throw data_error("sentence record must be an object");
  Sentence s;
  s.id = field(j, "id").get<std::string>();
  s.tokens = field(j, "tokens").get<std::vector<std::string>>();
  for (const auto& c : field(j, "gold")) s.gold.constituents.push_back(constituent_from_json(c));
  for (const auto& a : field(j, "analyses")) s.analyses.push_back(analysis_from_json(a));
  return s;
}

inline json sentence_to_json(const Sentence& s) {
  json j;
  j["id"] = s.id;
  j["tokens"] = s.tokens;
  j["gold"] = json::array();
  for (const auto& c : s.gold.constituents) j["gold"].push_back(constituent_to_json(c));
  j["analyses"] = json::array();
  for (const auto& a : s.analyses) j["analyses"].push_back(analysis_to_json(a));
  return j;
}

}  // namespace detail

/// Parses a corpus stream. Errors carry the source name and line number;
/// invariant violations are reported together after parsing.
inline Corpus read_corpus(std::istream& in, std::string_view source = "<stream>",
                          bool enforce_invariants = true) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  const auto fail = [&](const std::string& what) {
    throw data_error(std::string(source) + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("malformed record: ") + e.what());
    }
    try {
      if (!have_header) {
        if (!j.is_object() || !j.contains("function_names"))
          fail("first record must be a header declaring function_names");
        corpus.function_names = j["function_names"].get<std::vector<std::string>>();
        if (const auto it = j.find("class_map"); it != j.end() && !it->is_null())
          corpus.class_map = it->get<std::map<std::string, std::string>>();
        have_header = true;
        continue;
      }
      corpus.sentences.push_back(detail::sentence_from_json(j));
    } catch (const data_error& e) {
      if (std::string_view(e.what()).starts_with(source)) throw;
      fail(e.what());
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("malformed record: ") + e.what());
    }
  }
  if (!have_header) throw data_error(std::string(source) + ": missing corpus header");
  if (!enforce_invariants) return corpus;
  if (auto violations = validate(corpus); !violations.empty()) {
    std::string msg = std::string(source) + ": invalid corpus";
    for (const auto& v : violations) msg += "\n  " + v;
    throw data_error(msg);
  }
  return corpus;
}

inline Corpus load_corpus(const std::filesystem::path& path, bool enforce_invariants = true) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open corpus file " + path.string());
  return read_corpus(in, path.string(), enforce_invariants);
}

inline void write_corpus(std::ostream& out, const Corpus& corpus) {
  nlohmann::json header;
  header["function_names"] = corpus.function_names;
  header["class_map"] = corpus.class_map;
  out << header.dump() << '\n';
  for (const auto& s : corpus.sentences) out << detail::sentence_to_json(s).dump() << '\n';
}

inline std::string to_jsonl(const Corpus& corpus) {
  std::ostringstream out;
  write_corpus(out, corpus);
  return out.str();
}

inline void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write corpus file " + path.string());
  write_corpus(out, corpus);
}

// ---------------------------------------------------------------------------
// Bracketed tree notation, e.g. "(P do (A I) get (A dinner) (P on (A this flight)))"

struct BracketedTree {
  std::vector<std::string> tokens;
  SkeletalTree tree;
};

inline BracketedTree parse_bracketed_tree(std::string_view text) {
  BracketedTree out;
  std::size_t pos = 0;
  const auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  const auto read_symbol = [&] {
    const auto begin = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
           text[pos] != '(' && text[pos] != ')')
      ++pos;
    return std::string(text.substr(begin, pos - begin));
  };
  // Stack of (start token, label) for open brackets.
  std::vector<std::pair<int, Category>> open;
  while (true) {
    skip_ws();
    if (pos >= text.size()) break;
    if (text[pos] == '(') {
      ++pos;
      skip_ws();
      const auto label = read_symbol();
      Category cat;
      if (label == "A")
        cat = Category::A;
      else if (label == "P")
        cat = Category::P;
      else
        throw data_error("bracketed tree: expected category A or P, got '" + label + "'");
      open.emplace_back(static_cast<int>(out.tokens.size()), cat);
    } else if (text[pos] == ')') {
      ++pos;
      if (open.empty()) throw data_error("bracketed tree: unbalanced ')'");
      const auto [start, cat] = open.back();
      open.pop_back();
      const int end = static_cast<int>(out.tokens.size());
      if (end == start) throw data_error("bracketed tree: empty constituent");
      out.tree.constituents.push_back({start, end, cat});
    } else {
      out.tokens.push_back(read_symbol());
    }
  }
  if (!open.empty()) throw data_error("bracketed tree: unbalanced '('");
  if (out.tokens.empty()) throw data_error("bracketed tree: no tokens");
  std::sort(out.tree.constituents.begin(), out.tree.constituents.end(),
            [](const Constituent& a, const Constituent& b) {
              return a.start != b.start ? a.start < b.start : a.end > b.end;
            });
  return out;
}

}  // namespace prefscale

#endif  // PREFSCALE_CORPUS_HPP
