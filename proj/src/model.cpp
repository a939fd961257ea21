#include "methlib/model.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <set>
#include <tuple>

#include "methlib/dectree.hpp"
#include "methlib/error.hpp"
#include "methlib/text.hpp"

namespace methlib {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::pair<Enum, std::string_view>, N>& table,
                           std::string_view s, bool fold_case) {
  for (const auto& [value, name] : table) {
    if (fold_case ? text::to_lower(name) == text::to_lower(s) : name == s) return value;
  }
  return std::nullopt;
}

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<Enum, std::string_view>, N>& table, Enum e) {
  for (const auto& [value, name] : table) {
    if (value == e) return name;
  }
  return "?";
}

constexpr std::array<std::pair<ComponentKind, std::string_view>, 5> kKindNames{{
    {ComponentKind::Product, "Product"},
    {ComponentKind::Activity, "Activity"},
    {ComponentKind::Actor, "Actor"},
    {ComponentKind::Tool, "Tool"},
    {ComponentKind::Principle, "Principle"},
}};

constexpr std::array<std::pair<Strength, std::string_view>, 2> kStrengthNames{{
    {Strength::Recommend, "recommend"},
    {Strength::Discourage, "discourage"},
}};

constexpr std::array<std::pair<DocumentKind, std::string_view>, 6> kDocumentKindNames{{
    {DocumentKind::Book, "book"},
    {DocumentKind::ProjectDeliverable, "project-deliverable"},
    {DocumentKind::ProjectArchive, "project-archive"},
    {DocumentKind::CaseDescription, "case-description"},
    {DocumentKind::MethodDescription, "method-description"},
    {DocumentKind::Other, "other"},
}};

constexpr std::array<std::pair<ScreeningPolicy, std::string_view>, 2> kPolicyNames{{
    {ScreeningPolicy::Strict, "strict"},
    {ScreeningPolicy::Relaxed, "relaxed"},
}};

constexpr std::array<std::pair<FeedbackVerdict, std::string_view>, 4> kFeedbackNames{{
    {FeedbackVerdict::Useful, "useful"},
    {FeedbackVerdict::NotUseful, "not-useful"},
    {FeedbackVerdict::Incorrect, "incorrect"},
    {FeedbackVerdict::NeedsRefinement, "needs-refinement"},
}};

constexpr std::array<std::pair<ActionKind, std::string_view>, 7> kActionNames{{
    {ActionKind::Start, "start"},
    {ActionKind::SetFactor, "set-factor"},
    {ActionKind::ClearFactor, "clear-factor"},
    {ActionKind::Mark, "mark"},
    {ActionKind::Unmark, "unmark"},
    {ActionKind::Answer, "answer"},
    {ActionKind::Query, "query"},
}};

template <typename Map>
std::string fresh_id(const Map& existing, std::uint64_t& counter, std::string_view prefix) {
  std::string id;
  do {
    id = std::string(prefix) + std::to_string(++counter);
  } while (existing.count(id) != 0);
  return id;
}

bool has_duplicates(std::vector<std::string> values) {
  std::sort(values.begin(), values.end());
  return std::adjacent_find(values.begin(), values.end()) != values.end();
}

bool is_blank(std::string_view s) { return text::normalize_name(s).empty(); }

}  // namespace

std::string_view kind_name(ComponentKind k) { return name_of(kKindNames, k); }
std::optional<ComponentKind> parse_kind(std::string_view s) { return lookup(kKindNames, s, true); }
std::string_view strength_name(Strength s) { return name_of(kStrengthNames, s); }
std::optional<Strength> parse_strength(std::string_view s) { return lookup(kStrengthNames, s, false); }
std::string_view document_kind_name(DocumentKind k) { return name_of(kDocumentKindNames, k); }
std::optional<DocumentKind> parse_document_kind(std::string_view s) {
  return lookup(kDocumentKindNames, s, false);
}
std::string_view decision_name(Decision d) { return d == Decision::Accept ? "accept" : "reject"; }
std::string_view policy_name(ScreeningPolicy p) { return name_of(kPolicyNames, p); }
std::optional<ScreeningPolicy> parse_policy(std::string_view s) { return lookup(kPolicyNames, s, false); }
std::string_view feedback_verdict_name(FeedbackVerdict v) { return name_of(kFeedbackNames, v); }
std::optional<FeedbackVerdict> parse_feedback_verdict(std::string_view s) {
  return lookup(kFeedbackNames, s, false);
}
std::string_view action_name(ActionKind k) { return name_of(kActionNames, k); }
std::optional<ActionKind> parse_action(std::string_view s) { return lookup(kActionNames, s, false); }

std::string_view violation_kind_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::DanglingReference: return "dangling_reference";
    case ViolationKind::DomainViolation: return "domain_violation";
    case ViolationKind::Duplicate: return "duplicate";
    case ViolationKind::Invalid: return "invalid";
  }
  return "?";
}

bool PropertyDefinition::admits(std::string_view value) const {
  if (!domain) return true;
  return std::find(domain->begin(), domain->end(), value) != domain->end();
}

bool SituationalFactorDef::admits(std::string_view value) const {
  return std::find(domain.begin(), domain.end(), value) != domain.end();
}

const std::string& ensure_librarian_document(Library& lib) {
  auto it = lib.documents.find(std::string(kLibrarianDocument));
  if (it == lib.documents.end()) {
    SourceDocument doc;
    doc.id = kLibrarianDocument;
    doc.title = "Librarian entries";
    doc.kind = DocumentKind::Other;
    doc.citation = "librarian";
    ScreeningVerdict v;
    v.structured = {true, "entered directly by the librarian"};
    v.novel = {true, "entered directly by the librarian"};
    v.in_domain = {true, "entered directly by the librarian"};
    v.reusable = {true, "entered directly by the librarian"};
    v.decision = Decision::Accept;
    v.screener = "librarian";
    doc.screening = v;
    it = lib.documents.emplace(doc.id, std::move(doc)).first;
  }
  return it->first;
}

namespace {

void check_property_assignments(const Library& lib,
                                const std::map<std::string, std::vector<std::string>>& props) {
  for (const auto& [pid, values] : props) {
    auto def = lib.properties.find(pid);
    if (def == lib.properties.end()) {
      throw Error(ErrorCode::UnknownProperty, "unknown property '" + pid + "'");
    }
    if (values.empty()) {
      throw Error(ErrorCode::OutOfDomain, "property '" + pid + "' assigned no value");
    }
    for (const auto& v : values) {
      if (!def->second.admits(v)) {
        throw Error(ErrorCode::OutOfDomain, "value '" + v + "' not in domain of property '" + pid + "'");
      }
    }
  }
}

}  // namespace

std::string add_component(Library& lib, ComponentDraft draft) {
  if (is_blank(draft.name)) throw Error(ErrorCode::EmptyName, "component name is empty");
  check_property_assignments(lib, draft.properties);
  if (draft.document.empty()) {
    draft.document = ensure_librarian_document(lib);
  } else {
    auto doc = lib.documents.find(draft.document);
    if (doc == lib.documents.end()) {
      throw Error(ErrorCode::UnknownId, "unknown source document '" + draft.document + "'");
    }
    if (!doc->second.screening) {
      throw Error(ErrorCode::UnscreenedDocument, "document '" + draft.document + "' is not screened");
    }
    if (!doc->second.accepted()) {
      throw Error(ErrorCode::RejectedDocument, "document '" + draft.document + "' was rejected");
    }
  }
  for (auto& [pid, values] : draft.properties) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
  }

  MethodComponent c;
  c.id = fresh_id(lib.components, lib.counters.component, "c");
  c.kind = draft.kind;
  c.name = std::move(draft.name);
  c.description = std::move(draft.description);
  c.source = std::move(draft.source);
  c.document = std::move(draft.document);
  c.properties = std::move(draft.properties);
  auto id = c.id;
  lib.components.emplace(id, std::move(c));
  return id;
}

std::string add_relation(Library& lib, const std::string& from, const std::string& to,
                         std::string label, SourceRef provenance) {
  if (!lib.components.count(from)) throw Error(ErrorCode::UnknownId, "unknown component '" + from + "'");
  if (!lib.components.count(to)) throw Error(ErrorCode::UnknownId, "unknown component '" + to + "'");
  if (from == to) throw Error(ErrorCode::SelfLoop, "relation from '" + from + "' to itself");
  if (is_blank(label)) throw Error(ErrorCode::EmptyName, "relation label is empty");
  for (const auto& [id, r] : lib.relations) {
    if (r.from == from && r.to == to && r.label == label) {
      throw Error(ErrorCode::DuplicateRelation,
                  "relation " + from + " -[" + label + "]-> " + to + " already exists as " + id);
    }
  }
  Relation r;
  r.id = fresh_id(lib.relations, lib.counters.relation, "r");
  r.from = from;
  r.to = to;
  r.label = std::move(label);
  r.provenance = std::move(provenance);
  auto id = r.id;
  lib.relations.emplace(id, std::move(r));
  return id;
}

void add_property(Library& lib, PropertyDefinition def) {
  if (!text::is_identifier(def.id)) {
    throw Error(ErrorCode::InvalidDefinition, "property id '" + def.id + "' is not an identifier");
  }
  if (lib.properties.count(def.id)) throw Error(ErrorCode::DuplicateId, "property '" + def.id + "' exists");
  if (is_blank(def.name)) throw Error(ErrorCode::EmptyName, "property name is empty");
  if (def.domain && (def.domain->empty() || has_duplicates(*def.domain))) {
    throw Error(ErrorCode::InvalidDefinition, "property '" + def.id + "' needs a non-empty, duplicate-free domain");
  }
  auto id = def.id;
  lib.properties.emplace(id, std::move(def));
}

void add_factor(Library& lib, SituationalFactorDef def) {
  if (!text::is_identifier(def.id)) {
    throw Error(ErrorCode::InvalidDefinition, "factor id '" + def.id + "' is not an identifier");
  }
  if (lib.factors.count(def.id)) throw Error(ErrorCode::DuplicateId, "factor '" + def.id + "' exists");
  if (is_blank(def.name)) throw Error(ErrorCode::EmptyName, "factor name is empty");
  if (def.domain.empty() || has_duplicates(def.domain)) {
    throw Error(ErrorCode::InvalidDefinition, "factor '" + def.id + "' needs a non-empty, duplicate-free domain");
  }
  auto id = def.id;
  lib.factors.emplace(id, std::move(def));
}

namespace {

// True when `h` would lose its meaning without component `id`.
bool heuristic_depends_on(const Library& lib, const Heuristic& h, const std::string& id) {
  if (h.consequent == id) return true;
  for (const auto& target : referenced_selections(h.condition)) {
    auto hits = resolve_selection_target(lib, target);
    if (hits.size() == 1 && hits.front() == id) return true;
  }
  return false;
}

}  // namespace

void remove_component(Library& lib, const std::string& id, bool force) {
  if (!lib.components.count(id)) throw Error(ErrorCode::UnknownId, "unknown component '" + id + "'");

  std::vector<std::string> relations, heuristics;
  for (const auto& [rid, r] : lib.relations) {
    if (r.from == id || r.to == id) relations.push_back(rid);
  }
  for (const auto& [hid, h] : lib.heuristics) {
    if (heuristic_depends_on(lib, h, id)) heuristics.push_back(hid);
  }
  bool in_trees = false;
  for (const auto& [tid, t] : lib.trees) {
    for (const auto& [nid, node] : t.nodes) {
      if (auto* leaf = std::get_if<LeafNode>(&node)) {
        in_trees |= std::find(leaf->premarked.begin(), leaf->premarked.end(), id) != leaf->premarked.end();
      }
    }
  }

  if (!force && (!relations.empty() || !heuristics.empty() || in_trees)) {
    throw Error(ErrorCode::DanglingReference,
                "component '" + id + "' is still referenced (" + std::to_string(relations.size()) +
                    " relations, " + std::to_string(heuristics.size()) + " heuristics" +
                    (in_trees ? ", decision trees)" : ")"));
  }
  for (const auto& rid : relations) lib.relations.erase(rid);
  for (const auto& hid : heuristics) lib.heuristics.erase(hid);
  for (auto& [tid, t] : lib.trees) {
    for (auto& [nid, node] : t.nodes) {
      if (auto* leaf = std::get_if<LeafNode>(&node)) {
        std::erase(leaf->premarked, id);
      }
    }
  }
  lib.components.erase(id);
}

std::vector<Violation> validate(const Library& lib) {
  std::vector<Violation> out;
  auto add = [&](ViolationKind k, std::string subject, std::string detail) {
    out.push_back({k, std::move(subject), std::move(detail)});
  };
  auto key_check = [&](const std::string& kind, const std::string& key, const std::string& id) {
    if (key != id) add(ViolationKind::Invalid, kind + " " + key, "stored under key '" + key + "' but has id '" + id + "'");
  };

  for (const auto& [key, p] : lib.properties) {
    std::string subject = "property " + key;
    key_check("property", key, p.id);
    if (is_blank(p.name)) add(ViolationKind::Invalid, subject, "empty name");
    if (p.domain && p.domain->empty()) add(ViolationKind::Invalid, subject, "closed domain is empty");
    if (p.domain && has_duplicates(*p.domain)) add(ViolationKind::Duplicate, subject, "duplicate domain value");
  }
  for (const auto& [key, f] : lib.factors) {
    std::string subject = "factor " + key;
    key_check("factor", key, f.id);
    if (is_blank(f.name)) add(ViolationKind::Invalid, subject, "empty name");
    if (f.domain.empty()) add(ViolationKind::Invalid, subject, "domain is empty");
    if (has_duplicates(f.domain)) add(ViolationKind::Duplicate, subject, "duplicate domain value");
  }
  for (const auto& [key, d] : lib.documents) {
    std::string subject = "document " + key;
    key_check("document", key, d.id);
    if (is_blank(d.title)) add(ViolationKind::Invalid, subject, "empty title");
    if (is_blank(d.citation)) add(ViolationKind::Invalid, subject, "empty citation");
  }
  for (const auto& [key, c] : lib.components) {
    std::string subject = "component " + key;
    key_check("component", key, c.id);
    if (is_blank(c.name)) add(ViolationKind::Invalid, subject, "empty name");
    for (const auto& [pid, values] : c.properties) {
      auto def = lib.properties.find(pid);
      if (def == lib.properties.end()) {
        add(ViolationKind::DanglingReference, subject, "unknown property '" + pid + "'");
        continue;
      }
      if (values.empty()) add(ViolationKind::DomainViolation, subject, "property '" + pid + "' has no value");
      for (const auto& v : values) {
        if (!def->second.admits(v)) {
          add(ViolationKind::DomainViolation, subject, "value '" + v + "' outside domain of '" + pid + "'");
        }
      }
    }
    auto doc = lib.documents.find(c.document);
    if (doc == lib.documents.end()) {
      add(ViolationKind::DanglingReference, subject, "unknown source document '" + c.document + "'");
    } else if (!doc->second.accepted()) {
      add(ViolationKind::Invalid, subject, "source document '" + c.document + "' is not accepted");
    }
  }

  std::set<std::tuple<std::string, std::string, std::string>> triples;
  for (const auto& [key, r] : lib.relations) {
    std::string subject = "relation " + key;
    key_check("relation", key, r.id);
    if (!lib.components.count(r.from)) add(ViolationKind::DanglingReference, subject, "unknown endpoint '" + r.from + "'");
    if (!lib.components.count(r.to)) add(ViolationKind::DanglingReference, subject, "unknown endpoint '" + r.to + "'");
    if (r.from == r.to) add(ViolationKind::Invalid, subject, "self-loop");
    if (!triples.emplace(r.from, r.to, r.label).second) {
      add(ViolationKind::Duplicate, subject, "duplicate (from, to, label)");
    }
  }

  for (const auto& [key, h] : lib.heuristics) {
    std::string subject = "heuristic " + key;
    key_check("heuristic", key, h.id);
    if (!lib.components.count(h.consequent)) {
      add(ViolationKind::DanglingReference, subject, "unknown consequent '" + h.consequent + "'");
    }
    auto problems = check_condition(h.condition, lib, subject);
    out.insert(out.end(), problems.begin(), problems.end());
  }

  for (const auto& [key, t] : lib.trees) {
    key_check("tree", key, t.id);
    auto problems = check_tree(lib, t);
    out.insert(out.end(), problems.begin(), problems.end());
  }

  for (const auto& [key, f] : lib.feedback) key_check("feedback", key, f.id);

  for (const auto& [key, s] : lib.sessions) {
    std::string subject = "session " + key;
    key_check("session", key, s.id);
    for (const auto& [fid, value] : s.situation) {
      auto f = lib.factors.find(fid);
      if (f == lib.factors.end()) {
        add(ViolationKind::DanglingReference, subject, "unknown factor '" + fid + "'");
      } else if (!f->second.admits(value)) {
        add(ViolationKind::DomainViolation, subject, "value '" + value + "' outside domain of '" + fid + "'");
      }
    }
  }
  return out;
}

void require_valid(const Library& lib) {
  auto violations = validate(lib);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw Error(ErrorCode::InvalidLibrary, std::to_string(violations.size()) +
                                               " violation(s); first: " + v.subject + ": " + v.detail);
  }
}

void check_situation(const Library& lib, const Situation& situation) {
  for (const auto& [fid, value] : situation) {
    auto f = lib.factors.find(fid);
    if (f == lib.factors.end()) throw Error(ErrorCode::InvalidSituation, "unknown factor '" + fid + "'");
    if (!f->second.admits(value)) {
      throw Error(ErrorCode::InvalidSituation, "value '" + value + "' not in domain of factor '" + fid + "'");
    }
  }
}

const MethodComponent& get_component(const Library& lib, const std::string& id) {
  auto it = lib.components.find(id);
  if (it == lib.components.end()) throw Error(ErrorCode::UnknownId, "unknown component '" + id + "'");
  return it->second;
}

std::vector<std::string> find_by_name(const Library& lib, std::string_view name) {
  auto wanted = text::normalize_name(name);
  std::vector<std::string> out;
  for (const auto& [id, c] : lib.components) {
    if (text::normalize_name(c.name) == wanted) out.push_back(id);
  }
  return out;
}

std::vector<std::string> resolve_selection_target(const Library& lib, std::string_view target) {
  if (auto it = lib.components.find(std::string(target)); it != lib.components.end()) {
    return {it->first};
  }
  return find_by_name(lib, target);
}

std::string now_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace methlib
