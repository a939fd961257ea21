#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "methlib/model.hpp"

namespace methlib {

/// Stores `h`; an empty id gets a fresh one. The consequent must exist and
/// the condition must be valid against the library schema.
std::string add_heuristic(Library& lib, Heuristic h);

struct Recommendation {
  std::string component;
  std::string name;
  std::vector<std::string> firing;  // every heuristic that fired, by id
  std::size_t recommend_count = 0;
  Strength strength = Strength::Recommend;  // Discourage when nothing recommended it

  bool operator==(const Recommendation&) const = default;
};

/// Fires every heuristic whose condition is definitely true (unknown does
/// not fire) and groups the firings per consequent. Ordered by number of
/// recommending firings, descending, then name, then id.
std::vector<Recommendation> recommend(const Library& lib, const TruthContext& ctx);

/// Heuristics whose condition is true in `ctx`, by id.
std::vector<std::string> firing_heuristics(const Library& lib, const TruthContext& ctx);

struct RuleAnalysisOptions {
  /// Upper bound on contexts enumerated per heuristic or pair.
  std::uint64_t max_contexts = 1u << 20;
};

struct RuleConflict {
  std::string recommending;
  std::string discouraging;
  std::string component;

  bool operator==(const RuleConflict&) const = default;
};

struct RuleAnalysis {
  std::vector<std::string> never_firing;
  std::vector<RuleConflict> conflicts;
  // Checks skipped because the context space exceeded the bound. A skipped
  // check is never reported as a finding.
  std::vector<std::string> inconclusive_heuristics;
  std::vector<RuleConflict> inconclusive_pairs;

  bool operator==(const RuleAnalysis&) const = default;
};

/// Exhaustive check over every full assignment of the factors a rule
/// mentions and every subset of the components its selected() atoms can
/// match.
RuleAnalysis analyze_rules(const Library& lib, const RuleAnalysisOptions& opts = {});

}  // namespace methlib
