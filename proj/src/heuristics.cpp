#include "methlib/heuristics.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "methlib/error.hpp"

namespace methlib {

std::string add_heuristic(Library& lib, Heuristic h) {
  if (!lib.components.count(h.consequent)) {
    throw Error(ErrorCode::UnknownId, "unknown consequent component '" + h.consequent + "'");
  }
  auto problems = check_condition(h.condition, lib, "heuristic");
  if (!problems.empty()) {
    const auto& p = problems.front();
    auto code = p.kind == ViolationKind::DomainViolation ? ErrorCode::OutOfDomain : ErrorCode::DanglingReference;
    throw Error(code, p.detail);
  }
  if (h.id.empty()) {
    do {
      h.id = "h" + std::to_string(++lib.counters.heuristic);
    } while (lib.heuristics.count(h.id));
  } else if (lib.heuristics.count(h.id)) {
    throw Error(ErrorCode::DuplicateId, "heuristic '" + h.id + "' already exists");
  }
  auto id = h.id;
  lib.heuristics.emplace(id, std::move(h));
  return id;
}

namespace {

void check_context(const Library& lib, const TruthContext& ctx) {
  check_situation(lib, ctx.situation);
  for (const auto& id : ctx.selection) {
    if (!lib.components.count(id)) throw Error(ErrorCode::UnknownId, "unknown selected component '" + id + "'");
  }
}

bool fires(const Library& lib, const Heuristic& h, const TruthContext& ctx) {
  const auto* candidate = &lib.components.at(h.consequent);
  return eval_condition(h.condition, ctx, lib, candidate) == Truth::True;
}

}  // namespace

std::vector<std::string> firing_heuristics(const Library& lib, const TruthContext& ctx) {
  require_valid(lib);
  check_context(lib, ctx);
  std::vector<std::string> out;
  for (const auto& [id, h] : lib.heuristics) {
    if (fires(lib, h, ctx)) out.push_back(id);
  }
  return out;
}

std::vector<Recommendation> recommend(const Library& lib, const TruthContext& ctx) {
  std::map<std::string, Recommendation> grouped;
  for (const auto& hid : firing_heuristics(lib, ctx)) {
    const auto& h = lib.heuristics.at(hid);
    auto& rec = grouped[h.consequent];
    rec.component = h.consequent;
    rec.firing.push_back(hid);
    if (h.strength == Strength::Recommend) ++rec.recommend_count;
  }
  std::vector<Recommendation> out;
  out.reserve(grouped.size());
  for (auto& [cid, rec] : grouped) {
    rec.name = lib.components.at(cid).name;
    rec.strength = rec.recommend_count > 0 ? Strength::Recommend : Strength::Discourage;
    out.push_back(std::move(rec));
  }
  std::sort(out.begin(), out.end(), [](const Recommendation& a, const Recommendation& b) {
    if (a.recommend_count != b.recommend_count) return a.recommend_count > b.recommend_count;
    if (a.name != b.name) return a.name < b.name;
    return a.component < b.component;
  });
  return out;
}

namespace {

struct ContextSpace {
  std::vector<const SituationalFactorDef*> factors;
  std::vector<std::string> universe;  // components selected() atoms can match
  bool bounded = true;
  std::uint64_t size = 1;
};

ContextSpace context_space(const Library& lib, const std::vector<const Heuristic*>& rules, std::uint64_t max) {
  ContextSpace space;
  std::set<std::string> factor_ids, universe;
  for (const auto* h : rules) {
    for (const auto& f : referenced_factors(h->condition)) factor_ids.insert(f);
    for (const auto& t : referenced_selections(h->condition)) {
      for (const auto& id : resolve_selection_target(lib, t)) universe.insert(id);
    }
  }
  for (const auto& f : factor_ids) space.factors.push_back(&lib.factors.at(f));
  space.universe.assign(universe.begin(), universe.end());

  auto grow = [&](std::uint64_t k) {
    if (k != 0 && space.size > max / k) space.bounded = false;
    space.size *= k;
  };
  for (const auto* f : space.factors) {
    if (!space.bounded) break;
    grow(f->domain.size());
  }
  for (std::size_t i = 0; i < space.universe.size() && space.bounded; ++i) grow(2);
  if (space.size > max) space.bounded = false;
  return space;
}

// Calls visit(ctx) for every context; stops early when visit returns true.
template <typename Visit>
bool any_context(const ContextSpace& space, Visit&& visit) {
  std::vector<std::size_t> digits(space.factors.size(), 0);
  const std::uint64_t subsets = std::uint64_t{1} << space.universe.size();
  TruthContext ctx;
  while (true) {
    ctx.situation.clear();
    for (std::size_t i = 0; i < digits.size(); ++i) {
      ctx.situation[space.factors[i]->id] = space.factors[i]->domain[digits[i]];
    }
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
      ctx.selection.clear();
      for (std::size_t b = 0; b < space.universe.size(); ++b) {
        if (mask >> b & 1u) ctx.selection.insert(space.universe[b]);
      }
      if (visit(ctx)) return true;
    }
    std::size_t i = 0;
    while (i < digits.size() && ++digits[i] == space.factors[i]->domain.size()) digits[i++] = 0;
    if (i == digits.size()) return false;
  }
}

}  // namespace

RuleAnalysis analyze_rules(const Library& lib, const RuleAnalysisOptions& opts) {
  require_valid(lib);
  RuleAnalysis report;

  for (const auto& [id, h] : lib.heuristics) {
    auto space = context_space(lib, {&h}, opts.max_contexts);
    if (!space.bounded) {
      report.inconclusive_heuristics.push_back(id);
      continue;
    }
    bool ever = any_context(space, [&](const TruthContext& ctx) { return fires(lib, h, ctx); });
    if (!ever) report.never_firing.push_back(id);
  }

  for (const auto& [rid, r] : lib.heuristics) {
    if (r.strength != Strength::Recommend) continue;
    for (const auto& [did, d] : lib.heuristics) {
      if (d.strength != Strength::Discourage || d.consequent != r.consequent) continue;
      RuleConflict pair{rid, did, r.consequent};
      auto space = context_space(lib, {&r, &d}, opts.max_contexts);
      if (!space.bounded) {
        report.inconclusive_pairs.push_back(pair);
        continue;
      }
      bool both = any_context(space, [&](const TruthContext& ctx) { return fires(lib, r, ctx) && fires(lib, d, ctx); });
      if (both) report.conflicts.push_back(pair);
    }
  }
  return report;
}

}  // namespace methlib
