#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "methlib/dectree.hpp"
#include "methlib/heuristics.hpp"
#include "methlib/ingest.hpp"
#include "methlib/model.hpp"
#include "methlib/navigate.hpp"

namespace methlib {

// Library files are UTF-8 JSON, two-space indented, keys sorted, every
// collection an array sorted by id. Equal libraries serialize to identical
// bytes. Heuristic conditions are stored as condition-language text.

inline constexpr std::string_view kFormatTag = "methlib/1";
inline constexpr std::string_view kBatchFormatTag = "methlib-batch/1";
inline constexpr int kFormatVersion = 1;

struct SaveOptions {
  bool include_sessions = true;
};

/// Canonical text of a JSON value: two-space indent plus trailing newline.
std::string canonical(const Json& j);

Json library_to_json(const Library& lib, const SaveOptions& opts = {});
/// Throws MalformedFile (with a JSON path in the message) or UnsupportedVersion.
Library library_from_json(const Json& j);

/// Throws InvalidLibrary unless validate(lib) is empty.
std::string save(const Library& lib, const SaveOptions& opts = {});
/// Writes through a temporary file and renames it into place.
void save_file(const Library& lib, const std::filesystem::path& path, const SaveOptions& opts = {});

struct LoadResult {
  Library library;
  std::vector<Violation> violations;  // from validate(); the caller decides
};

/// Throws MalformedFile with line/column for syntax errors.
LoadResult load(std::string_view text);
LoadResult load_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

ImportBatch batch_from_json(const Json& j);
ImportBatch load_batch(std::string_view text);

// Record codecs shared with the service.
Json encode(const SourceRef& s);
SourceRef decode_source_ref(const Json& j);
Json encode(const MethodComponent& c);
ComponentDraft decode_component_draft(const Json& j);
Json encode(const Relation& r);
Json encode(const Heuristic& h);
Json encode(const DecisionTree& t);
DecisionTree decode_tree(const Json& j);
Json encode(const SourceDocument& d);
SourceDocument decode_document(const Json& j);
Json encode(const ScreeningVerdict& v);
ScreeningAnswers decode_screening_answers(const Json& j);
Json encode(const FeedbackRecord& f);
Json encode(const Session& s);
Situation decode_situation(const Json& j);

// Result objects: the structured output of the CLI and the HTTP API.
Json encode(const Violation& v);
Json encode(const std::vector<Violation>& v);
Json encode(const Recommendation& r);
Json encode(const std::vector<Recommendation>& r);
Json encode(const NeighborRow& r);
Json encode(const std::vector<NeighborRow>& r);
Json encode(const SelectionReport& r);
Json encode(const MarkOutcome& m);
Json encode(const QuestionView& q);
Json encode(const WalkState& w);
Json encode(const DuplicateCandidate& d);
Json encode(const ImportReport& r);
Json encode(const FeedbackSummary& s);
Json encode(const RuleAnalysis& a);
Json encode(const CoherenceIssue& c);

}  // namespace methlib
