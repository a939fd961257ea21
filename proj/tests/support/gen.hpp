#pragma once

// Random generators for property tests. Everything is driven by an explicit
// std::mt19937_64 so failures reproduce from the seed.

#include <random>
#include <string>
#include <vector>

#include "methlib/condition.hpp"
#include "methlib/dectree.hpp"
#include "methlib/error.hpp"
#include "methlib/heuristics.hpp"
#include "methlib/ingest.hpp"
#include "methlib/model.hpp"
#include "methlib/navigate.hpp"
#include "methlib/query.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline std::size_t below(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[below(rng, v.size())];
}

/// Text that exercises escaping and multi-byte characters.
inline std::string odd_text(Rng& rng) {
  static const std::vector<std::string> pieces = {"a", "b", "Model", " ", "\"", "\\", "é", "ß", "日本", "x-y", "_", "7",
                                                  "{", "}", "(", ")", ",", "=", "~", "and", "or", "not"};
  std::string out;
  auto n = below(rng, 5);
  for (std::size_t i = 0; i < n; ++i) out += pick(rng, pieces);
  return out;
}

inline std::string word(Rng& rng) {
  static const std::vector<std::string> syl = {"ka", "lo", "mi", "ne", "ru", "ta", "zo", "vi", "pe", "su"};
  std::string out;
  auto n = 1 + below(rng, 3);
  for (std::size_t i = 0; i < n; ++i) out += pick(rng, syl);
  return out;
}

inline std::string component_name(Rng& rng) {
  std::string out = word(rng);
  auto n = below(rng, 3);
  for (std::size_t i = 0; i < n; ++i) out += " " + word(rng);
  if (coin(rng, 0.2)) out += " é";
  return out;
}

struct Schema {
  std::vector<std::string> factors;                    // ids
  std::vector<std::vector<std::string>> factor_domains;
  std::vector<std::string> properties;                 // ids
  std::vector<std::vector<std::string>> property_domains;
  std::vector<std::string> targets;                    // selected() targets
};

/// Random condition AST over the schema. Depth-bounded.
inline methlib::Condition condition(Rng& rng, const Schema& s, int depth) {
  using namespace methlib;
  std::size_t choice = depth <= 0 ? below(rng, 4) : below(rng, 7);
  switch (choice) {
    case 0: return make_true();
    case 1: {
      if (s.factors.empty()) return make_true();
      auto i = below(rng, s.factors.size());
      const auto& dom = s.factor_domains[i];
      if (coin(rng)) return make_factor_eq(s.factors[i], pick(rng, dom));
      std::vector<std::string> vals;
      for (const auto& v : dom) {
        if (coin(rng)) vals.push_back(v);
      }
      if (vals.empty()) vals.push_back(dom.front());
      return make_factor_in(s.factors[i], vals);
    }
    case 2:
      if (s.targets.empty()) return make_true();
      return make_selected(pick(rng, s.targets));
    case 3: {
      if (s.properties.empty()) return make_true();
      auto i = below(rng, s.properties.size());
      return make_property_eq(s.properties[i], pick(rng, s.property_domains[i]));
    }
    case 4: return make_and(condition(rng, s, depth - 1), condition(rng, s, depth - 1));
    case 5: return make_or(condition(rng, s, depth - 1), condition(rng, s, depth - 1));
    default: return make_not(condition(rng, s, depth - 1));
  }
}

/// Random condition with arbitrary literal text (syntax-level round trips).
inline methlib::Condition wild_condition(Rng& rng, int depth) {
  Schema s;
  s.factors = {"f", "speed", "_x9"};
  s.factor_domains = {{odd_text(rng), "v"}, {"high", odd_text(rng)}, {odd_text(rng)}};
  s.properties = {"p", "aspect"};
  s.property_domains = {{odd_text(rng)}, {"what", odd_text(rng)}};
  s.targets = {odd_text(rng), "c1", "job model"};
  return condition(rng, s, depth);
}

inline methlib::Query query(Rng& rng, const Schema& s, int depth) {
  using namespace methlib;
  std::size_t choice = depth <= 0 ? below(rng, 6) : below(rng, 9);
  static const std::vector<std::string> fragments = {"ka", "lo", "MI", "e", "é", "", "zz", "ne ru", "src"};
  switch (choice) {
    case 0: return {MatchAll{}};
    case 1: return {KindIs{pick(rng, std::vector<ComponentKind>(kAllKinds.begin(), kAllKinds.end()))}};
    case 2: return {NameContains{pick(rng, fragments)}};
    case 3: return {SourceContains{pick(rng, fragments)}};
    case 4:
      if (s.properties.empty()) return {MatchAll{}};
      return {HasProperty{pick(rng, s.properties)}};
    case 5: {
      if (s.properties.empty()) return {MatchAll{}};
      auto i = below(rng, s.properties.size());
      return {PropertyEquals{s.properties[i], pick(rng, s.property_domains[i])}};
    }
    case 6: return query_and(query(rng, s, depth - 1), query(rng, s, depth - 1));
    case 7: return query_or(query(rng, s, depth - 1), query(rng, s, depth - 1));
    default: return query_not(query(rng, s, depth - 1));
  }
}

inline methlib::Query wild_query(Rng& rng, int depth) {
  Schema s;
  s.properties = {"p", "aspect"};
  s.property_domains = {{odd_text(rng)}, {"what", odd_text(rng)}};
  auto q = query(rng, s, depth);
  return q;
}

struct LibraryOptions {
  std::size_t max_components = 60;
  std::size_t factors = 3;
  bool extras = true;  // trees, feedback, sessions, unknown fields
};

inline Schema schema_of(const methlib::Library& lib) {
  Schema s;
  for (const auto& [id, f] : lib.factors) {
    s.factors.push_back(id);
    s.factor_domains.push_back(f.domain);
  }
  for (const auto& [id, p] : lib.properties) {
    s.properties.push_back(id);
    s.property_domains.push_back(p.domain ? *p.domain : std::vector<std::string>{"free", "text"});
  }
  for (const auto& [id, c] : lib.components) {
    s.targets.push_back(id);
    s.targets.push_back(c.name);
  }
  s.targets.push_back("nobody at all");
  return s;
}

/// A valid random library built through the public API.
inline methlib::Library library(Rng& rng, const LibraryOptions& opts = {}) {
  using namespace methlib;
  Library lib;
  static const std::vector<std::string> values = {"low", "medium", "high", "yes", "no", "Public company"};

  for (std::size_t i = 0; i < opts.factors; ++i) {
    SituationalFactorDef f;
    f.id = "f" + std::to_string(i);
    f.name = "factor " + word(rng);
    f.description = odd_text(rng);
    auto n = 2 + below(rng, 2);
    for (std::size_t k = 0; k < n; ++k) f.domain.push_back(values[(i + k) % values.size()]);
    f.source.citation = odd_text(rng);
    if (coin(rng, 0.3)) f.source.pages = std::to_string(below(rng, 400));
    add_factor(lib, f);
  }
  auto nprops = below(rng, 4);
  for (std::size_t i = 0; i < nprops; ++i) {
    PropertyDefinition p;
    p.id = "p" + std::to_string(i);
    p.name = "property " + word(rng);
    if (coin(rng, 0.7)) p.domain = std::vector<std::string>{"what", "how", "why"};
    add_property(lib, p);
  }

  SourceDocument doc;
  doc.id = "doc" + word(rng);
  doc.title = "Book " + odd_text(rng) + "t";
  doc.kind = DocumentKind::Book;
  doc.citation = "cite " + odd_text(rng);
  add_document(lib, doc);
  CriterionAnswer yes{true, odd_text(rng)};
  screen_document(lib, doc.id, {yes, yes, yes, yes}, ScreeningPolicy::Strict, word(rng));
  if (coin(rng, 0.3)) {
    SourceDocument bad = doc;
    bad.id = "rejected" + word(rng);
    add_document(lib, bad);
    CriterionAnswer no{false, {}};
    screen_document(lib, bad.id, {yes, no, yes, yes}, ScreeningPolicy::Strict, {});
  }

  auto ncomp = below(rng, opts.max_components + 1);
  for (std::size_t i = 0; i < ncomp; ++i) {
    ComponentDraft d;
    d.kind = pick(rng, std::vector<ComponentKind>(kAllKinds.begin(), kAllKinds.end()));
    d.name = component_name(rng);
    d.description = odd_text(rng);
    d.source.citation = coin(rng) ? "src " + word(rng) : odd_text(rng);
    if (coin(rng, 0.2)) d.source.extra["isbn"] = std::to_string(below(rng, 100000));
    d.document = coin(rng, 0.8) ? doc.id : "";
    for (const auto& [pid, p] : lib.properties) {
      if (!coin(rng, 0.4)) continue;
      auto& vals = d.properties[pid];
      if (p.domain) {
        for (const auto& v : *p.domain) {
          if (coin(rng)) vals.push_back(v);
        }
      } else {
        vals.push_back(odd_text(rng));
      }
      if (vals.empty()) d.properties.erase(pid);
    }
    if (d.document.empty()) ensure_librarian_document(lib);
    add_component(lib, d);
  }

  std::vector<std::string> ids;
  for (const auto& [id, c] : lib.components) ids.push_back(id);
  if (ids.size() >= 2) {
    auto nrel = below(rng, 2 * ids.size());
    static const std::vector<std::string> labels = {"uses", "contains", "guides", "precedes"};
    for (std::size_t i = 0; i < nrel; ++i) {
      try {
        add_relation(lib, pick(rng, ids), pick(rng, ids), pick(rng, labels));
      } catch (const methlib::Error&) {
      }
    }
  }

  auto schema = schema_of(lib);
  if (!ids.empty()) {
    auto nh = below(rng, 6);
    for (std::size_t i = 0; i < nh; ++i) {
      Heuristic h;
      h.condition = condition(rng, schema, 3);
      // unresolved selected() targets would be violations
      bool dangling = false;
      for (const auto& t : referenced_selections(h.condition)) {
        if (resolve_selection_target(lib, t).empty()) dangling = true;
      }
      if (dangling) h.condition = make_true();
      h.consequent = pick(rng, ids);
      h.strength = coin(rng, 0.7) ? Strength::Recommend : Strength::Discourage;
      h.rationale = odd_text(rng);
      add_heuristic(lib, h);
    }
  }

  if (!opts.extras) return lib;

  if (!lib.factors.empty() && coin(rng, 0.6)) {
    const auto& f = lib.factors.begin()->second;
    DecisionTree t;
    t.id = "tree_" + word(rng);
    t.name = odd_text(rng);
    t.root = "q";
    QuestionNode q;
    q.factor = f.id;
    q.branches[f.domain.front()] = "leaf_a";
    if (coin(rng)) q.fallback = "leaf_b";
    t.nodes["q"] = q;
    LeafNode a;
    if (!ids.empty()) a.premarked.push_back(pick(rng, ids));
    a.note = odd_text(rng);
    t.nodes["leaf_a"] = a;
    if (q.fallback) t.nodes["leaf_b"] = LeafNode{};
    if (coin(rng, 0.3)) t.unknown["layout"] = {{"x", 1}};
    load_tree(lib, t);
  }

  if (!ids.empty()) {
    auto nf = below(rng, 4);
    static const std::vector<FeedbackVerdict> verdicts = {FeedbackVerdict::Useful, FeedbackVerdict::NotUseful,
                                                          FeedbackVerdict::Incorrect, FeedbackVerdict::NeedsRefinement};
    for (std::size_t i = 0; i < nf; ++i) {
      submit_feedback(lib, {pick(rng, ids), pick(rng, verdicts), odd_text(rng), word(rng)},
                      "2024-01-0" + std::to_string(1 + below(rng, 9)) + "T00:00:00Z");
    }
  }

  auto ns = below(rng, 3);
  for (std::size_t i = 0; i < ns; ++i) {
    Situation sit;
    for (const auto& [fid, f] : lib.factors) {
      if (coin(rng)) sit[fid] = pick(rng, f.domain);
    }
    auto& s = start_session(lib, sit, "2024-02-01T10:00:00Z");
    auto sid = s.id;
    for (std::size_t k = 0; k < 3 && !ids.empty(); ++k) mark(lib, sid, pick(rng, ids), "2024-02-01T10:05:00Z");
    if (coin(rng, 0.3)) lib.sessions.at(sid).unknown["client"] = word(rng);
    for (const auto& [tid, t] : lib.trees) {
      if (!coin(rng)) continue;
      const auto& q = std::get<QuestionNode>(t.nodes.at(t.root));
      const auto& dom = lib.factors.at(q.factor).domain;
      const auto& value = q.fallback ? pick(rng, dom) : dom.front();
      answer(lib, sid, tid, value, "2024-02-01T10:06:00Z");
    }
  }

  if (coin(rng, 0.3)) lib.unknown["x_note"] = odd_text(rng);
  if (!lib.components.empty() && coin(rng, 0.5)) {
    lib.components.begin()->second.unknown["x_rank"] = static_cast<int>(below(rng, 10));
  }
  return lib;
}

}  // namespace gen
