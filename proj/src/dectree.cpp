#include "methlib/dectree.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "methlib/error.hpp"
#include "methlib/heuristics.hpp"
#include "methlib/text.hpp"

namespace methlib {

namespace {

struct TreeProblem {
  ErrorCode code;
  Violation violation;
};

std::vector<TreeProblem> tree_problems(const Library& lib, const DecisionTree& tree) {
  std::vector<TreeProblem> out;
  const std::string subject = "tree " + tree.id;
  auto add = [&](ErrorCode code, ViolationKind kind, std::string detail) {
    out.push_back({code, {kind, subject, std::move(detail)}});
  };

  if (text::normalize_name(tree.id).empty()) add(ErrorCode::InvalidDefinition, ViolationKind::Invalid, "empty id");
  if (!tree.nodes.count(tree.root)) {
    add(ErrorCode::InvalidDefinition, ViolationKind::DanglingReference, "root node '" + tree.root + "' does not exist");
  }

  for (const auto& [nid, node] : tree.nodes) {
    const std::string where = "node '" + nid + "': ";
    if (const auto* q = std::get_if<QuestionNode>(&node)) {
      auto f = lib.factors.find(q->factor);
      if (f == lib.factors.end()) {
        add(ErrorCode::UnknownFactor, ViolationKind::DanglingReference, where + "unknown factor '" + q->factor + "'");
      }
      if (q->branches.empty() && !q->fallback) {
        add(ErrorCode::InvalidDefinition, ViolationKind::Invalid, where + "question without branches");
      }
      for (const auto& [value, child] : q->branches) {
        if (f != lib.factors.end() && !f->second.admits(value)) {
          add(ErrorCode::OutOfDomain, ViolationKind::DomainViolation,
              where + "branch value '" + value + "' not in domain of '" + q->factor + "'");
        }
        if (!tree.nodes.count(child)) {
          add(ErrorCode::InvalidDefinition, ViolationKind::DanglingReference, where + "unknown child '" + child + "'");
        }
      }
      if (q->fallback && !tree.nodes.count(*q->fallback)) {
        add(ErrorCode::InvalidDefinition, ViolationKind::DanglingReference,
            where + "unknown fallback child '" + *q->fallback + "'");
      }
    } else {
      const auto& leaf = std::get<LeafNode>(node);
      std::set<std::string> seen;
      for (const auto& cid : leaf.premarked) {
        if (!lib.components.count(cid)) {
          add(ErrorCode::UnknownId, ViolationKind::DanglingReference, where + "premarked component '" + cid + "' does not exist");
        }
        if (!seen.insert(cid).second) {
          add(ErrorCode::InvalidDefinition, ViolationKind::Duplicate, where + "component '" + cid + "' premarked twice");
        }
      }
    }
  }

  // Three-colour DFS from every node so cycles in unreachable parts count too.
  enum class Colour { White, Grey, Black };
  std::map<std::string, Colour> colour;
  for (const auto& [nid, node] : tree.nodes) colour[nid] = Colour::White;
  bool cyclic = false;
  std::function<void(const std::string&)> visit = [&](const std::string& nid) {
    colour[nid] = Colour::Grey;
    if (const auto* q = std::get_if<QuestionNode>(&tree.nodes.at(nid))) {
      std::vector<std::string> children;
      for (const auto& [v, child] : q->branches) children.push_back(child);
      if (q->fallback) children.push_back(*q->fallback);
      for (const auto& child : children) {
        auto it = colour.find(child);
        if (it == colour.end()) continue;
        if (it->second == Colour::Grey) cyclic = true;
        if (it->second == Colour::White) visit(child);
      }
    }
    colour[nid] = Colour::Black;
  };
  for (const auto& [nid, node] : tree.nodes) {
    if (colour[nid] == Colour::White) visit(nid);
  }
  if (cyclic) add(ErrorCode::InvalidDefinition, ViolationKind::Invalid, "definition contains a cycle");
  return out;
}

const TreeNode& node_at(const DecisionTree& tree, const std::string& id) {
  auto it = tree.nodes.find(id);
  if (it == tree.nodes.end()) throw Error(ErrorCode::DanglingReference, "tree '" + tree.id + "' has no node '" + id + "'");
  return it->second;
}

}  // namespace

std::vector<Violation> check_tree(const Library& lib, const DecisionTree& tree) {
  std::vector<Violation> out;
  for (auto& p : tree_problems(lib, tree)) out.push_back(std::move(p.violation));
  return out;
}

const DecisionTree& load_tree(Library& lib, DecisionTree definition) {
  if (lib.trees.count(definition.id)) {
    throw Error(ErrorCode::DuplicateId, "decision tree '" + definition.id + "' already exists");
  }
  auto problems = tree_problems(lib, definition);
  if (!problems.empty()) {
    const auto& p = problems.front();
    throw Error(p.code, p.violation.subject + ": " + p.violation.detail);
  }
  auto id = definition.id;
  return lib.trees.emplace(id, std::move(definition)).first->second;
}

const DecisionTree& get_tree(const Library& lib, const std::string& id) {
  auto it = lib.trees.find(id);
  if (it == lib.trees.end()) throw Error(ErrorCode::UnknownId, "unknown decision tree '" + id + "'");
  return it->second;
}

Walk start_walk(const DecisionTree& tree) { return Walk{tree.id, {}, tree.root}; }

bool at_leaf(const DecisionTree& tree, const Walk& walk) {
  return std::holds_alternative<LeafNode>(node_at(tree, walk.cursor));
}

std::optional<QuestionView> current_question(const Library& lib, const Walk& walk) {
  const auto& tree = get_tree(lib, walk.tree);
  const auto* q = std::get_if<QuestionNode>(&node_at(tree, walk.cursor));
  if (!q) return std::nullopt;
  QuestionView view;
  view.node = walk.cursor;
  view.factor = q->factor;
  for (const auto& [value, child] : q->branches) view.answers.push_back(value);
  view.has_fallback = q->fallback.has_value();
  if (auto f = lib.factors.find(q->factor); f != lib.factors.end()) view.domain = f->second.domain;
  return view;
}

void step(const Library& lib, Walk& walk, const std::string& answer) {
  const auto& tree = get_tree(lib, walk.tree);
  const auto* q = std::get_if<QuestionNode>(&node_at(tree, walk.cursor));
  if (!q) throw Error(ErrorCode::WalkFinished, "walk on tree '" + tree.id + "' already reached a leaf");
  auto f = lib.factors.find(q->factor);
  if (f == lib.factors.end()) throw Error(ErrorCode::DanglingReference, "unknown factor '" + q->factor + "'");
  if (!f->second.admits(answer)) {
    throw Error(ErrorCode::InvalidAnswer, "'" + answer + "' is not a value of factor '" + q->factor + "'");
  }
  std::string next;
  if (auto b = q->branches.find(answer); b != q->branches.end()) {
    next = b->second;
  } else if (q->fallback) {
    next = *q->fallback;
  } else {
    throw Error(ErrorCode::InvalidAnswer, "no branch for '" + answer + "' and no default");
  }
  walk.path.emplace_back(q->factor, answer);
  walk.cursor = next;
}

const LeafNode& result(const Library& lib, const Walk& walk) {
  const auto& tree = get_tree(lib, walk.tree);
  const auto* leaf = std::get_if<LeafNode>(&node_at(tree, walk.cursor));
  if (!leaf) throw Error(ErrorCode::NotAtLeaf, "walk on tree '" + tree.id + "' is at a question");
  return *leaf;
}

std::vector<CoherenceIssue> check_coherence(const Library& lib, const DecisionTree& tree) {
  std::set<std::string> with_heuristics;
  for (const auto& [hid, h] : lib.heuristics) with_heuristics.insert(h.consequent);

  std::vector<CoherenceIssue> out;
  std::set<std::tuple<std::string, std::string, std::string>> reported;
  std::function<void(const std::string&, Situation&)> descend = [&](const std::string& nid, Situation& situation) {
    const auto& node = node_at(tree, nid);
    if (const auto* leaf = std::get_if<LeafNode>(&node)) {
      TruthContext ctx{situation, {}};
      std::set<std::string> recommended;
      for (const auto& rec : recommend(lib, ctx)) {
        if (rec.strength == Strength::Recommend) recommended.insert(rec.component);
      }
      for (const auto& cid : leaf->premarked) {
        if (!with_heuristics.count(cid) || recommended.count(cid)) continue;
        if (!reported.emplace(tree.id, nid, cid).second) continue;
        std::string where;
        for (const auto& [f, v] : situation) where += (where.empty() ? "" : ", ") + f + "=" + v;
        out.push_back({tree.id, nid, cid, "not recommended for {" + where + "}"});
      }
      return;
    }
    const auto& q = std::get<QuestionNode>(node);
    auto saved = situation.find(q.factor) != situation.end() ? std::optional(situation[q.factor]) : std::nullopt;
    for (const auto& [value, child] : q.branches) {
      situation[q.factor] = value;
      descend(child, situation);
    }
    situation.erase(q.factor);
    if (q.fallback) descend(*q.fallback, situation);
    if (saved) situation[q.factor] = *saved;
  };
  Situation start;
  descend(tree.root, start);
  return out;
}

}  // namespace methlib
