#pragma once

#include <optional>
#include <string>
#include <vector>

#include "methlib/model.hpp"

namespace methlib {

/// Structural problems: missing root or child nodes, unknown factors,
/// branch values outside the factor domain, dangling premarks, cycles.
std::vector<Violation> check_tree(const Library& lib, const DecisionTree& tree);

/// Validates and registers a tree definition. Throws the first problem as
/// UnknownFactor, OutOfDomain, UnknownId (premark) or InvalidDefinition
/// (cycles and other structural faults).
const DecisionTree& load_tree(Library& lib, DecisionTree definition);

const DecisionTree& get_tree(const Library& lib, const std::string& id);

struct QuestionView {
  std::string node;
  std::string factor;
  std::vector<std::string> answers;  // values with an explicit branch
  bool has_fallback = false;
  std::vector<std::string> domain;   // every value the factor admits

  bool operator==(const QuestionView&) const = default;
};

Walk start_walk(const DecisionTree& tree);

bool at_leaf(const DecisionTree& tree, const Walk& walk);

/// nullopt once the walk has reached a leaf.
std::optional<QuestionView> current_question(const Library& lib, const Walk& walk);

/// Follows the branch for `answer`, or the fallback for other in-domain
/// values. Throws InvalidAnswer for values outside the factor domain or
/// without a matching branch, WalkFinished at a leaf.
void step(const Library& lib, Walk& walk, const std::string& answer);

/// Throws NotAtLeaf while a question is pending.
const LeafNode& result(const Library& lib, const Walk& walk);

struct CoherenceIssue {
  std::string tree;
  std::string leaf;
  std::string component;
  std::string detail;

  bool operator==(const CoherenceIssue&) const = default;
};

/// Diagnostic: premarked components that the heuristics do not recommend
/// for the situation implied by the path to the leaf. Only components that
/// are the consequent of some heuristic are checked; fallback edges leave
/// their factor unassigned.
std::vector<CoherenceIssue> check_coherence(const Library& lib, const DecisionTree& tree);

}  // namespace methlib
