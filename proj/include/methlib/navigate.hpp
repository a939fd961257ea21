#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "methlib/dectree.hpp"
#include "methlib/model.hpp"

namespace methlib {

// Sessions live inside the Library so that every front end (CLI, HTTP)
// sees the same persisted state. Each operation appends to the history.

Session& start_session(Library& lib, Situation situation, const std::string& at = now_timestamp());

Session& get_session(Library& lib, const std::string& id);
const Session& get_session(const Library& lib, const std::string& id);

struct MarkOutcome {
  bool changed = false;
  bool warning = false;  // unmark of a component that was not marked
  std::string message;

  bool operator==(const MarkOutcome&) const = default;
};

MarkOutcome mark(Library& lib, const std::string& session, const std::string& component,
                 const std::string& at = now_timestamp());
MarkOutcome unmark(Library& lib, const std::string& session, const std::string& component,
                   const std::string& at = now_timestamp());

/// Applies assignments (a value sets the factor, nullopt clears it). The
/// whole change is checked before anything is applied. Marks are kept.
void update_situation(Library& lib, const std::string& session,
                      const std::map<std::string, std::optional<std::string>>& changes,
                      const std::string& at = now_timestamp());

/// Runs a query on behalf of a session and logs it; results do not mark.
std::vector<std::string> session_query(Library& lib, const std::string& session, const std::string& text,
                                       const std::string& at = now_timestamp());

struct WalkState {
  Walk walk;
  std::optional<QuestionView> question;
  std::optional<LeafNode> leaf;

  bool operator==(const WalkState&) const = default;
};

/// Current state of the session's walk over `tree` (a fresh walk if none).
WalkState walk_state(const Library& lib, const std::string& session, const std::string& tree);

/// Answers the pending question of the session's walk over `tree` and
/// records the answer as a situation assignment.
WalkState answer(Library& lib, const std::string& session, const std::string& tree, const std::string& value,
                 const std::string& at = now_timestamp());

/// Components premarked by the leaves of the session's finished walks.
std::set<std::string> premarked(const Library& lib, const Session& session);

enum class Direction { Out, In, Both };
std::optional<Direction> parse_direction(std::string_view s);
std::string_view direction_name(Direction d);

struct NeighborRow {
  std::string relation;
  std::string label;
  std::string component;
  std::string name;
  Direction direction = Direction::Out;  // Out: component is the relation target
  bool marked = false;
  bool premarked = false;

  bool operator==(const NeighborRow&) const = default;
};

/// Adjacent (relation, component) pairs ordered by label, then component
/// name, then component id, then relation id. `session` only feeds the
/// marked/premarked flags and may be null.
std::vector<NeighborRow> neighbors(const Library& lib, const Session* session, const std::string& component,
                                   Direction direction, const std::optional<std::string>& label = std::nullopt);

struct FiringHeuristic {
  std::string id;
  std::string consequent;
  std::string consequent_name;
  Strength strength = Strength::Recommend;

  bool operator==(const FiringHeuristic&) const = default;
};

struct SelectionReport {
  std::string session;
  Situation situation;
  std::vector<MethodComponent> components;  // in marking order
  std::vector<Relation> induced_relations;  // by id
  std::vector<FiringHeuristic> firing_heuristics;
  std::vector<std::string> warnings;        // marks dropped because the component is gone

  bool operator==(const SelectionReport&) const = default;
};

SelectionReport report(const Library& lib, const std::string& session);

struct ReplayedState {
  Situation situation;
  std::vector<std::string> marked;
  std::map<std::string, Walk> walks;

  bool operator==(const ReplayedState&) const = default;
};

/// Rebuilds situation, marks and walks from a history log.
ReplayedState replay(const Library& lib, const std::vector<SessionAction>& history);

/// Graphviz text. Without a session: the whole network. With one: the
/// marked components and the relations induced among them.
std::string export_dot(const Library& lib, const std::optional<std::string>& session = std::nullopt);

}  // namespace methlib
