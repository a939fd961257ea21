#include "methlib/ingest.hpp"

#include <algorithm>
#include <set>

#include "methlib/dectree.hpp"
#include "methlib/error.hpp"
#include "methlib/heuristics.hpp"
#include "methlib/text.hpp"

namespace methlib {

ScreeningVerdict screen(const ScreeningAnswers& answers, ScreeningPolicy policy, std::string screener) {
  auto need = [](const std::optional<CriterionAnswer>& a, const char* what) {
    if (!a) throw Error(ErrorCode::MissingAnswer, std::string("missing screening answer: ") + what);
    return *a;
  };
  ScreeningVerdict v;
  v.structured = need(answers.structured, "structured");
  v.novel = need(answers.novel, "novel");
  v.in_domain = need(answers.in_domain, "in-domain");
  v.reusable = need(answers.reusable, "reusable");
  v.policy = policy;
  v.screener = std::move(screener);

  int satisfied = v.structured.satisfied + v.novel.satisfied + v.in_domain.satisfied + v.reusable.satisfied;
  bool accept = policy == ScreeningPolicy::Strict ? satisfied == 4 : (satisfied >= 3 && v.in_domain.satisfied);
  v.decision = accept ? Decision::Accept : Decision::Reject;
  return v;
}

const ScreeningVerdict& screen_document(Library& lib, const std::string& document, const ScreeningAnswers& answers,
                                        ScreeningPolicy policy, std::string screener) {
  auto it = lib.documents.find(document);
  if (it == lib.documents.end()) throw Error(ErrorCode::UnknownId, "unknown source document '" + document + "'");
  it->second.screening = screen(answers, policy, std::move(screener));
  return *it->second.screening;
}

const SourceDocument& add_document(Library& lib, SourceDocument doc) {
  if (text::normalize_name(doc.id).empty()) throw Error(ErrorCode::EmptyName, "document id is empty");
  if (text::normalize_name(doc.title).empty()) throw Error(ErrorCode::EmptyName, "document title is empty");
  if (text::normalize_name(doc.citation).empty()) throw Error(ErrorCode::EmptyName, "document citation is empty");
  if (lib.documents.count(doc.id)) throw Error(ErrorCode::DuplicateId, "document '" + doc.id + "' already exists");
  doc.screening.reset();
  auto id = doc.id;
  return lib.documents.emplace(id, std::move(doc)).first->second;
}

std::vector<DuplicateCandidate> detect_duplicates(const Library& lib, std::string_view name, ComponentKind kind,
                                                  const DuplicateOptions& opts) {
  std::vector<DuplicateCandidate> out;
  for (const auto& [id, c] : lib.components) {
    double score = text::name_similarity(name, c.name);
    if (c.kind != kind) score *= 0.5;
    if (score < opts.floor) continue;
    out.push_back({id, c.name, c.kind, score, score >= opts.threshold});
  }
  std::sort(out.begin(), out.end(), [](const DuplicateCandidate& a, const DuplicateCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.name != b.name) return a.name < b.name;
    return a.component < b.component;
  });
  return out;
}

bool ImportBatch::empty() const {
  return properties.empty() && factors.empty() && components.empty() && relations.empty() && heuristics.empty() &&
         trees.empty();
}

namespace {

RejectedDraft reject(std::string section, std::string ref, const Error& e) {
  return {std::move(section), std::move(ref), std::string(code_name(e.code())), e.what()};
}

bool same_property(const PropertyDefinition& a, const PropertyDefinition& b) {
  return a.id == b.id && a.name == b.name && a.description == b.description && a.domain == b.domain;
}

bool same_factor(const SituationalFactorDef& a, const SituationalFactorDef& b) {
  return a.id == b.id && a.name == b.name && a.description == b.description && a.domain == b.domain &&
         a.source == b.source;
}

// Name resolution for drafts: components created by this batch win, then
// pre-existing components; an ambiguous library match is an error.
class NameResolver {
 public:
  NameResolver(const Library& lib, const std::set<std::string>& preexisting) : lib_(lib), preexisting_(preexisting) {}

  void add(const std::string& name, const std::string& id) { batch_[text::normalize_name(name)] = id; }
  bool in_batch(const std::string& name) const { return batch_.count(text::normalize_name(name)) != 0; }

  std::string resolve(const std::string& name) const {
    auto key = text::normalize_name(name);
    if (auto it = batch_.find(key); it != batch_.end()) return it->second;
    std::vector<std::string> hits;
    for (const auto& id : find_by_name(lib_, name)) {
      if (preexisting_.count(id)) hits.push_back(id);
    }
    if (hits.empty()) throw Error(ErrorCode::UnknownId, "no component named '" + name + "'");
    if (hits.size() > 1) throw Error(ErrorCode::UnknownId, "component name '" + name + "' is ambiguous in the library");
    return hits.front();
  }

 private:
  const Library& lib_;
  const std::set<std::string>& preexisting_;
  std::map<std::string, std::string> batch_;
};

}  // namespace

ImportReport import_batch(Library& lib, const ImportBatch& batch, const DuplicateOptions& opts) {
  ImportReport rep;
  if (batch.empty()) return rep;

  Library work = lib;
  if (batch.document_def && !work.documents.count(batch.document_def->id)) {
    add_document(work, *batch.document_def);
  }
  auto doc = work.documents.find(batch.document);
  if (doc == work.documents.end()) {
    throw Error(ErrorCode::UnknownId, "unknown source document '" + batch.document + "'");
  }
  if (!doc->second.screening && batch.screening) {
    screen_document(work, batch.document, *batch.screening, batch.policy, batch.screener);
  }
  if (!doc->second.screening) {
    throw Error(ErrorCode::UnscreenedDocument, "source document '" + batch.document + "' has not been screened");
  }
  if (!doc->second.accepted()) {
    throw Error(ErrorCode::RejectedDocument, "source document '" + batch.document + "' was rejected by screening");
  }

  for (const auto& p : batch.properties) {
    auto existing = work.properties.find(p.id);
    if (existing != work.properties.end() && same_property(existing->second, p)) {
      rep.reused_definitions.push_back(p.id);
      continue;
    }
    try {
      add_property(work, p);
      rep.definitions.push_back(p.id);
    } catch (const Error& e) {
      rep.rejected.push_back(reject("property", p.id, e));
    }
  }
  for (const auto& f : batch.factors) {
    auto existing = work.factors.find(f.id);
    if (existing != work.factors.end() && same_factor(existing->second, f)) {
      rep.reused_definitions.push_back(f.id);
      continue;
    }
    try {
      add_factor(work, f);
      rep.definitions.push_back(f.id);
    } catch (const Error& e) {
      rep.rejected.push_back(reject("factor", f.id, e));
    }
  }

  std::set<std::string> preexisting;
  for (const auto& [id, c] : lib.components) preexisting.insert(id);
  NameResolver names(work, preexisting);

  for (const auto& draft : batch.components) {
    if (names.in_batch(draft.name)) {
      rep.rejected.push_back({"component", draft.name, std::string(code_name(ErrorCode::DuplicateId)),
                              "name appears twice in the batch"});
      continue;
    }
    auto candidates = detect_duplicates(work, draft.name, draft.kind, opts);
    try {
      auto d = draft;
      d.document = batch.document;
      auto id = add_component(work, std::move(d));
      names.add(draft.name, id);
      rep.components.emplace_back(draft.name, id);
      for (const auto& cand : candidates) {
        if (cand.needs_review && preexisting.count(cand.component)) rep.warnings.push_back({draft.name, id, cand});
      }
    } catch (const Error& e) {
      rep.rejected.push_back(reject("component", draft.name, e));
    }
  }

  for (const auto& r : batch.relations) {
    std::string ref = r.from + " -[" + r.label + "]-> " + r.to;
    try {
      rep.relations.push_back(add_relation(work, names.resolve(r.from), names.resolve(r.to), r.label, r.provenance));
    } catch (const Error& e) {
      rep.rejected.push_back(reject("relation", ref, e));
    }
  }

  for (const auto& hd : batch.heuristics) {
    try {
      Heuristic h;
      h.id = hd.id;
      h.condition = parse_condition(hd.condition, work);
      h.consequent = names.resolve(hd.consequent);
      h.strength = hd.strength;
      h.rationale = hd.rationale;
      h.provenance = hd.provenance;
      rep.heuristics.push_back(add_heuristic(work, std::move(h)));
    } catch (const Error& e) {
      rep.rejected.push_back(reject("heuristic", hd.id.empty() ? hd.condition : hd.id, e));
    }
  }

  for (const auto& td : batch.trees) {
    try {
      DecisionTree t = td;
      for (auto& [nid, node] : t.nodes) {
        if (auto* leaf = std::get_if<LeafNode>(&node)) {
          for (auto& name : leaf->premarked) name = names.resolve(name);
        }
      }
      rep.trees.push_back(load_tree(work, std::move(t)).id);
    } catch (const Error& e) {
      rep.rejected.push_back(reject("tree", td.id, e));
    }
  }

  lib = std::move(work);
  return rep;
}

std::string submit_feedback(Library& lib, FeedbackDraft draft, const std::string& at) {
  get_component(lib, draft.component);
  FeedbackRecord r;
  do {
    r.id = "f" + std::to_string(++lib.counters.feedback);
  } while (lib.feedback.count(r.id));
  r.component = std::move(draft.component);
  r.verdict = draft.verdict;
  r.note = std::move(draft.note);
  r.project_context = std::move(draft.project_context);
  r.timestamp = at;
  auto id = r.id;
  lib.feedback.emplace(id, std::move(r));
  return id;
}

FeedbackSummary feedback_summary(const Library& lib, const std::string& component) {
  get_component(lib, component);
  FeedbackSummary s;
  s.component = component;
  std::vector<const FeedbackRecord*> records;
  for (const auto& [id, r] : lib.feedback) {
    if (r.component == component) records.push_back(&r);
  }
  // record order: submission timestamp, then id
  std::sort(records.begin(), records.end(), [](auto* a, auto* b) {
    return std::tie(a->timestamp, a->id) < std::tie(b->timestamp, b->id);
  });
  for (const auto* r : records) {
    ++s.counts[std::string(feedback_verdict_name(r->verdict))];
    ++s.total;
    if (!r->note.empty()) s.notes.push_back(r->note);
  }
  return s;
}

}  // namespace methlib
