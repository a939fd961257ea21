#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "methlib/model.hpp"

namespace methlib {

// --- screening -------------------------------------------------------------

/// One answer per quality criterion; a missing answer is an error.
struct ScreeningAnswers {
  std::optional<CriterionAnswer> structured;
  std::optional<CriterionAnswer> novel;
  std::optional<CriterionAnswer> in_domain;
  std::optional<CriterionAnswer> reusable;
};

/// Strict: accept iff all four hold. Relaxed: at least three hold and the
/// in-domain criterion is one of them.
ScreeningVerdict screen(const ScreeningAnswers& answers, ScreeningPolicy policy = ScreeningPolicy::Strict,
                        std::string screener = {});

/// Screens a registered document and attaches the verdict to it.
const ScreeningVerdict& screen_document(Library& lib, const std::string& document, const ScreeningAnswers& answers,
                                        ScreeningPolicy policy = ScreeningPolicy::Strict, std::string screener = {});

/// Registers an unscreened source document.
const SourceDocument& add_document(Library& lib, SourceDocument doc);

// --- duplicate detection ---------------------------------------------------

struct DuplicateOptions {
  double threshold = 0.8;  // at or above: needs review
  double floor = 0.5;      // below: not reported
};

struct DuplicateCandidate {
  std::string component;
  std::string name;
  ComponentKind kind = ComponentKind::Product;
  double score = 0.0;
  bool needs_review = false;

  bool operator==(const DuplicateCandidate&) const = default;
};

/// Similarity is 1 - normalized edit distance of the normalized names,
/// halved across kinds. Ordered by score, then name, then id. Advisory only.
std::vector<DuplicateCandidate> detect_duplicates(const Library& lib, std::string_view name, ComponentKind kind,
                                                  const DuplicateOptions& opts = {});

// --- batch import ----------------------------------------------------------

struct RelationDraft {
  std::string from;  // component name, resolved batch first, then library
  std::string to;
  std::string label;
  SourceRef provenance;
};

struct HeuristicDraft {
  std::string id;  // optional
  std::string condition;
  std::string consequent;  // component name
  Strength strength = Strength::Recommend;
  std::string rationale;
  SourceRef provenance;
};

/// Same shape as a stored tree, but leaves premark components by name.
using TreeDraft = DecisionTree;

struct ImportBatch {
  std::string document;                       // source document id
  std::optional<SourceDocument> document_def; // registered when new
  std::optional<ScreeningAnswers> screening;  // applied when the document is unscreened
  ScreeningPolicy policy = ScreeningPolicy::Strict;
  std::string screener;

  std::vector<PropertyDefinition> properties;
  std::vector<SituationalFactorDef> factors;
  std::vector<ComponentDraft> components;
  std::vector<RelationDraft> relations;
  std::vector<HeuristicDraft> heuristics;
  std::vector<TreeDraft> trees;

  bool empty() const;
};

struct DuplicateWarning {
  std::string draft;       // draft name
  std::string created;     // id of the new component
  DuplicateCandidate match;

  bool operator==(const DuplicateWarning&) const = default;
};

struct RejectedDraft {
  std::string section;  // "component", "relation", ...
  std::string ref;      // name or id of the draft
  std::string code;     // stable error code
  std::string reason;

  bool operator==(const RejectedDraft&) const = default;
};

struct ImportReport {
  std::vector<std::string> definitions;             // factor/property ids added
  std::vector<std::string> reused_definitions;      // identical ones already present
  std::vector<std::pair<std::string, std::string>> components;  // (name, id)
  std::vector<std::string> relations;
  std::vector<std::string> heuristics;
  std::vector<std::string> trees;
  std::vector<DuplicateWarning> warnings;
  std::vector<RejectedDraft> rejected;

  bool operator==(const ImportReport&) const = default;
};

/// Imports every draft that is valid on its own; invalid drafts are listed
/// as rejected and do not abort the batch. Throws UnscreenedDocument or
/// RejectedDocument (leaving `lib` untouched) unless the source document is
/// accepted.
ImportReport import_batch(Library& lib, const ImportBatch& batch, const DuplicateOptions& opts = {});

// --- feedback --------------------------------------------------------------

struct FeedbackDraft {
  std::string component;
  FeedbackVerdict verdict = FeedbackVerdict::Useful;
  std::string note;
  std::string project_context;
};

/// Append-only; the component must exist at submission time.
std::string submit_feedback(Library& lib, FeedbackDraft draft, const std::string& at = now_timestamp());

struct FeedbackSummary {
  std::string component;
  std::map<std::string, std::size_t> counts;  // verdict name -> count, non-zero only
  std::size_t total = 0;
  std::vector<std::string> notes;             // non-empty notes in record order

  bool operator==(const FeedbackSummary&) const = default;
};

FeedbackSummary feedback_summary(const Library& lib, const std::string& component);

}  // namespace methlib
