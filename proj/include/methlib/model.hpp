#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "methlib/condition.hpp"
#include "methlib/violation.hpp"

namespace methlib {

// Records carry an `unknown` object holding fields this version does not
// understand; the store writes them back untouched.
using Json = nlohmann::json;

enum class ComponentKind { Product, Activity, Actor, Tool, Principle };

inline constexpr std::array<ComponentKind, 5> kAllKinds = {
    ComponentKind::Product, ComponentKind::Activity, ComponentKind::Actor, ComponentKind::Tool,
    ComponentKind::Principle};

std::string_view kind_name(ComponentKind k);
/// Case-insensitive.
std::optional<ComponentKind> parse_kind(std::string_view s);

struct SourceRef {
  std::string citation;
  std::optional<std::string> pages;
  std::map<std::string, std::string> extra;

  bool operator==(const SourceRef&) const = default;
};

struct PropertyDefinition {
  std::string id;
  std::string name;
  std::string description;
  std::optional<std::vector<std::string>> domain;  // nullopt: open text
  Json unknown = Json::object();

  bool closed() const { return domain.has_value(); }
  bool admits(std::string_view value) const;
  bool operator==(const PropertyDefinition&) const = default;
};

struct SituationalFactorDef {
  std::string id;
  std::string name;
  std::string description;
  std::vector<std::string> domain;
  SourceRef source;
  Json unknown = Json::object();

  bool admits(std::string_view value) const;
  bool operator==(const SituationalFactorDef&) const = default;
};

/// Partial assignment factor id -> value; absent factors are unknown.
using Situation = std::map<std::string, std::string>;

struct MethodComponent {
  std::string id;
  ComponentKind kind = ComponentKind::Product;
  std::string name;
  std::string description;
  SourceRef source;
  std::string document;  // accepted source document this was extracted from
  std::map<std::string, std::vector<std::string>> properties;
  Json unknown = Json::object();

  bool operator==(const MethodComponent&) const = default;
};

struct Relation {
  std::string id;
  std::string from;
  std::string to;
  std::string label;
  SourceRef provenance;
  Json unknown = Json::object();

  bool operator==(const Relation&) const = default;
};

enum class Strength { Recommend, Discourage };
std::string_view strength_name(Strength s);
std::optional<Strength> parse_strength(std::string_view s);

struct Heuristic {
  std::string id;
  Condition condition;
  std::string consequent;
  Strength strength = Strength::Recommend;
  std::string rationale;
  SourceRef provenance;
  Json unknown = Json::object();

  bool operator==(const Heuristic&) const = default;
};

// Decision trees are stored flat: nodes reference children by node id.
struct QuestionNode {
  std::string factor;
  std::map<std::string, std::string> branches;  // answer value -> node id
  std::optional<std::string> fallback;          // taken for unlisted answers

  bool operator==(const QuestionNode&) const = default;
};

struct LeafNode {
  std::vector<std::string> premarked;  // component ids
  std::string note;

  bool operator==(const LeafNode&) const = default;
};

using TreeNode = std::variant<QuestionNode, LeafNode>;

struct DecisionTree {
  std::string id;
  std::string name;
  std::string root;
  std::map<std::string, TreeNode> nodes;
  Json unknown = Json::object();

  bool operator==(const DecisionTree&) const = default;
};

enum class DocumentKind { Book, ProjectDeliverable, ProjectArchive, CaseDescription, MethodDescription, Other };
std::string_view document_kind_name(DocumentKind k);
std::optional<DocumentKind> parse_document_kind(std::string_view s);

struct CriterionAnswer {
  bool satisfied = false;
  std::string justification;

  bool operator==(const CriterionAnswer&) const = default;
};

enum class Decision { Accept, Reject };
enum class ScreeningPolicy { Strict, Relaxed };
std::string_view decision_name(Decision d);
std::string_view policy_name(ScreeningPolicy p);
std::optional<ScreeningPolicy> parse_policy(std::string_view s);

struct ScreeningVerdict {
  CriterionAnswer structured;
  CriterionAnswer novel;
  CriterionAnswer in_domain;
  CriterionAnswer reusable;
  Decision decision = Decision::Reject;
  ScreeningPolicy policy = ScreeningPolicy::Strict;
  std::string screener;

  bool operator==(const ScreeningVerdict&) const = default;
};

struct SourceDocument {
  std::string id;
  std::string title;
  DocumentKind kind = DocumentKind::Other;
  std::string citation;
  std::optional<ScreeningVerdict> screening;
  Json unknown = Json::object();

  bool accepted() const { return screening && screening->decision == Decision::Accept; }
  bool operator==(const SourceDocument&) const = default;
};

enum class FeedbackVerdict { Useful, NotUseful, Incorrect, NeedsRefinement };
std::string_view feedback_verdict_name(FeedbackVerdict v);
std::optional<FeedbackVerdict> parse_feedback_verdict(std::string_view s);

struct FeedbackRecord {
  std::string id;
  std::string component;
  FeedbackVerdict verdict = FeedbackVerdict::Useful;
  std::string note;
  std::string project_context;
  std::string timestamp;
  Json unknown = Json::object();

  bool operator==(const FeedbackRecord&) const = default;
};

enum class ActionKind { Start, SetFactor, ClearFactor, Mark, Unmark, Answer, Query };
std::string_view action_name(ActionKind k);
std::optional<ActionKind> parse_action(std::string_view s);

struct SessionAction {
  ActionKind kind = ActionKind::Start;
  std::string component;  // mark, unmark
  std::string factor;     // set/clear factor, answer
  std::string value;      // set factor, answer
  std::string tree;       // answer
  std::string text;       // query
  std::string at;

  bool operator==(const SessionAction&) const = default;
};

struct Walk {
  std::string tree;
  std::vector<std::pair<std::string, std::string>> path;  // (factor, answer)
  std::string cursor;                                     // node id

  bool operator==(const Walk&) const = default;
};

struct Session {
  std::string id;
  Situation situation;
  std::vector<std::string> marked;  // insertion order, no duplicates
  std::vector<SessionAction> history;
  std::map<std::string, Walk> walks;  // by tree id
  std::string created;
  std::string updated;
  Json unknown = Json::object();

  bool operator==(const Session&) const = default;
};

struct IdCounters {
  std::uint64_t component = 0;
  std::uint64_t relation = 0;
  std::uint64_t heuristic = 0;
  std::uint64_t session = 0;
  std::uint64_t feedback = 0;

  bool operator==(const IdCounters&) const = default;
};

/// The whole library. A plain value: readers may share a const reference,
/// a writer needs exclusive access. Collections are keyed by id.
struct Library {
  std::map<std::string, PropertyDefinition> properties;
  std::map<std::string, SituationalFactorDef> factors;
  std::map<std::string, MethodComponent> components;
  std::map<std::string, Relation> relations;
  std::map<std::string, Heuristic> heuristics;
  std::map<std::string, DecisionTree> trees;
  std::map<std::string, SourceDocument> documents;
  std::map<std::string, FeedbackRecord> feedback;
  std::map<std::string, Session> sessions;
  IdCounters counters;
  Json unknown = Json::object();

  bool operator==(const Library&) const = default;
};

inline constexpr std::string_view kLibrarianDocument = "librarian";

struct ComponentDraft {
  ComponentKind kind = ComponentKind::Product;
  std::string name;
  std::string description;
  SourceRef source;
  std::string document;  // empty: the synthetic librarian document
  std::map<std::string, std::vector<std::string>> properties;
};

std::string add_component(Library& lib, ComponentDraft draft);
std::string add_relation(Library& lib, const std::string& from, const std::string& to,
                         std::string label, SourceRef provenance = {});
void add_property(Library& lib, PropertyDefinition def);
void add_factor(Library& lib, SituationalFactorDef def);

/// Rejects components still referenced by relations, heuristics or trees
/// unless `force`, which removes those references as well.
void remove_component(Library& lib, const std::string& id, bool force = false);

/// Registers the accepted placeholder document used for manual entries.
const std::string& ensure_librarian_document(Library& lib);

/// Every integrity problem in the library; read-only.
std::vector<Violation> validate(const Library& lib);

/// Throws Error(InvalidLibrary) when validate() is not empty.
void require_valid(const Library& lib);

/// Throws Error(InvalidSituation) on an unknown factor or out-of-domain value.
void check_situation(const Library& lib, const Situation& situation);

const MethodComponent& get_component(const Library& lib, const std::string& id);

/// Components whose normalized name equals the normalized query, by id.
std::vector<std::string> find_by_name(const Library& lib, std::string_view name);

/// Components a selected() target refers to: an id or a normalized name.
std::vector<std::string> resolve_selection_target(const Library& lib, std::string_view target);

std::string now_timestamp();

}  // namespace methlib
