#include "methlib/navigate.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "methlib/error.hpp"
#include "methlib/heuristics.hpp"
#include "methlib/network.hpp"
#include "methlib/query.hpp"

namespace methlib {

namespace {

SessionAction action(ActionKind kind, const std::string& at) {
  SessionAction a;
  a.kind = kind;
  a.at = at;
  return a;
}

void log(Session& s, SessionAction a) {
  s.updated = a.at;
  s.history.push_back(std::move(a));
}

bool is_marked(const Session& s, const std::string& id) {
  return std::find(s.marked.begin(), s.marked.end(), id) != s.marked.end();
}

}  // namespace

Session& start_session(Library& lib, Situation situation, const std::string& at) {
  check_situation(lib, situation);
  Session s;
  do {
    s.id = "s" + std::to_string(++lib.counters.session);
  } while (lib.sessions.count(s.id));
  s.created = at;
  s.updated = at;
  s.history.push_back(action(ActionKind::Start, at));
  for (const auto& [factor, value] : situation) {
    auto a = action(ActionKind::SetFactor, at);
    a.factor = factor;
    a.value = value;
    s.history.push_back(std::move(a));
  }
  s.situation = std::move(situation);
  auto id = s.id;
  return lib.sessions.emplace(id, std::move(s)).first->second;
}

Session& get_session(Library& lib, const std::string& id) {
  auto it = lib.sessions.find(id);
  if (it == lib.sessions.end()) throw Error(ErrorCode::UnknownId, "unknown session '" + id + "'");
  return it->second;
}

const Session& get_session(const Library& lib, const std::string& id) {
  auto it = lib.sessions.find(id);
  if (it == lib.sessions.end()) throw Error(ErrorCode::UnknownId, "unknown session '" + id + "'");
  return it->second;
}

MarkOutcome mark(Library& lib, const std::string& session, const std::string& component, const std::string& at) {
  auto& s = get_session(lib, session);
  get_component(lib, component);
  MarkOutcome out;
  if (!is_marked(s, component)) {
    s.marked.push_back(component);
    out.changed = true;
  }
  auto a = action(ActionKind::Mark, at);
  a.component = component;
  log(s, std::move(a));
  return out;
}

MarkOutcome unmark(Library& lib, const std::string& session, const std::string& component, const std::string& at) {
  auto& s = get_session(lib, session);
  bool was_marked = is_marked(s, component);
  // a mark may outlive its component; allow clearing it
  if (!was_marked) get_component(lib, component);
  MarkOutcome out;
  if (was_marked) {
    std::erase(s.marked, component);
    out.changed = true;
  } else {
    out.warning = true;
    out.message = "component '" + component + "' was not marked";
  }
  auto a = action(ActionKind::Unmark, at);
  a.component = component;
  log(s, std::move(a));
  return out;
}

void update_situation(Library& lib, const std::string& session,
                      const std::map<std::string, std::optional<std::string>>& changes, const std::string& at) {
  auto& s = get_session(lib, session);
  for (const auto& [factor, value] : changes) {
    auto f = lib.factors.find(factor);
    if (f == lib.factors.end()) throw Error(ErrorCode::InvalidSituation, "unknown factor '" + factor + "'");
    if (value && !f->second.admits(*value)) {
      throw Error(ErrorCode::InvalidSituation, "value '" + *value + "' not in domain of factor '" + factor + "'");
    }
  }
  for (const auto& [factor, value] : changes) {
    auto a = action(value ? ActionKind::SetFactor : ActionKind::ClearFactor, at);
    a.factor = factor;
    if (value) {
      a.value = *value;
      s.situation[factor] = *value;
    } else {
      s.situation.erase(factor);
    }
    log(s, std::move(a));
  }
}

std::vector<std::string> session_query(Library& lib, const std::string& session, const std::string& text,
                                       const std::string& at) {
  auto& s = get_session(lib, session);
  auto ids = eval_query(lib, parse_query(text, lib));
  auto a = action(ActionKind::Query, at);
  a.text = text;
  log(s, std::move(a));
  return ids;
}

namespace {

WalkState describe_walk(const Library& lib, const Walk& walk) {
  WalkState st;
  st.walk = walk;
  st.question = current_question(lib, walk);
  if (!st.question) st.leaf = result(lib, walk);
  return st;
}

}  // namespace

WalkState walk_state(const Library& lib, const std::string& session, const std::string& tree) {
  const auto& s = get_session(lib, session);
  const auto& t = get_tree(lib, tree);
  auto it = s.walks.find(tree);
  return describe_walk(lib, it != s.walks.end() ? it->second : start_walk(t));
}

WalkState answer(Library& lib, const std::string& session, const std::string& tree, const std::string& value,
                 const std::string& at) {
  auto& s = get_session(lib, session);
  const auto& t = get_tree(lib, tree);
  auto it = s.walks.find(tree);
  Walk walk = it != s.walks.end() ? it->second : start_walk(t);
  step(lib, walk, value);
  const auto& [factor, chosen] = walk.path.back();
  s.situation[factor] = chosen;
  auto a = action(ActionKind::Answer, at);
  a.tree = tree;
  a.factor = factor;
  a.value = chosen;
  log(s, std::move(a));
  s.walks[tree] = walk;
  return describe_walk(lib, walk);
}

std::set<std::string> premarked(const Library& lib, const Session& session) {
  std::set<std::string> out;
  for (const auto& [tid, walk] : session.walks) {
    auto t = lib.trees.find(tid);
    if (t == lib.trees.end()) continue;
    auto n = t->second.nodes.find(walk.cursor);
    if (n == t->second.nodes.end()) continue;
    if (const auto* leaf = std::get_if<LeafNode>(&n->second)) out.insert(leaf->premarked.begin(), leaf->premarked.end());
  }
  return out;
}

std::optional<Direction> parse_direction(std::string_view s) {
  if (s == "out") return Direction::Out;
  if (s == "in") return Direction::In;
  if (s == "both") return Direction::Both;
  return std::nullopt;
}

std::string_view direction_name(Direction d) {
  switch (d) {
    case Direction::Out: return "out";
    case Direction::In: return "in";
    case Direction::Both: return "both";
  }
  return "?";
}

std::vector<NeighborRow> neighbors(const Library& lib, const Session* session, const std::string& component,
                                   Direction direction, const std::optional<std::string>& label) {
  get_component(lib, component);
  auto net = build_network(lib);
  std::set<std::string> pre = session ? premarked(lib, *session) : std::set<std::string>{};

  std::vector<NeighborRow> rows;
  auto emit = [&](const std::string& rid, Direction dir) {
    const auto& r = lib.relations.at(rid);
    if (label && r.label != *label) return;
    const auto& other = lib.components.at(dir == Direction::Out ? r.to : r.from);
    NeighborRow row;
    row.relation = rid;
    row.label = r.label;
    row.component = other.id;
    row.name = other.name;
    row.direction = dir;
    row.marked = session && is_marked(*session, other.id);
    row.premarked = pre.count(other.id) != 0;
    rows.push_back(std::move(row));
  };
  if (direction != Direction::In) {
    for (const auto& rid : net.outgoing(component)) emit(rid, Direction::Out);
  }
  if (direction != Direction::Out) {
    for (const auto& rid : net.incoming(component)) emit(rid, Direction::In);
  }
  std::sort(rows.begin(), rows.end(), [](const NeighborRow& a, const NeighborRow& b) {
    return std::tie(a.label, a.name, a.component, a.relation) < std::tie(b.label, b.name, b.component, b.relation);
  });
  return rows;
}

SelectionReport report(const Library& lib, const std::string& session) {
  const auto& s = get_session(lib, session);
  SelectionReport out;
  out.session = s.id;
  out.situation = s.situation;

  std::set<std::string> live;
  for (const auto& id : s.marked) {
    auto it = lib.components.find(id);
    if (it == lib.components.end()) {
      out.warnings.push_back("marked component '" + id + "' no longer exists");
      continue;
    }
    live.insert(id);
    out.components.push_back(it->second);
  }
  for (const auto& [rid, r] : lib.relations) {
    if (live.count(r.from) && live.count(r.to)) out.induced_relations.push_back(r);
  }
  Situation situation;
  for (const auto& [f, v] : s.situation) {
    auto def = lib.factors.find(f);
    if (def != lib.factors.end() && def->second.admits(v)) {
      situation.emplace(f, v);
    } else {
      out.warnings.push_back("situation assignment '" + f + "' is no longer valid");
    }
  }
  for (const auto& hid : firing_heuristics(lib, TruthContext{situation, live})) {
    const auto& h = lib.heuristics.at(hid);
    out.firing_heuristics.push_back({hid, h.consequent, lib.components.at(h.consequent).name, h.strength});
  }
  return out;
}

ReplayedState replay(const Library& lib, const std::vector<SessionAction>& history) {
  ReplayedState st;
  for (const auto& a : history) {
    switch (a.kind) {
      case ActionKind::Start:
        st = ReplayedState{};
        break;
      case ActionKind::SetFactor:
        st.situation[a.factor] = a.value;
        break;
      case ActionKind::ClearFactor:
        st.situation.erase(a.factor);
        break;
      case ActionKind::Mark:
        if (std::find(st.marked.begin(), st.marked.end(), a.component) == st.marked.end()) {
          st.marked.push_back(a.component);
        }
        break;
      case ActionKind::Unmark:
        std::erase(st.marked, a.component);
        break;
      case ActionKind::Answer: {
        auto it = st.walks.find(a.tree);
        Walk walk = it != st.walks.end() ? it->second : start_walk(get_tree(lib, a.tree));
        step(lib, walk, a.value);
        st.walks[a.tree] = walk;
        st.situation[a.factor] = a.value;
        break;
      }
      case ActionKind::Query:
        break;
    }
  }
  return st;
}

namespace {

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string export_dot(const Library& lib, const std::optional<std::string>& session) {
  std::vector<const MethodComponent*> nodes;
  std::vector<const Relation*> edges;
  std::set<std::string> pre;
  if (session) {
    auto rep = report(lib, *session);
    pre = premarked(lib, get_session(lib, *session));
    for (const auto& c : rep.components) nodes.push_back(&lib.components.at(c.id));
    std::sort(nodes.begin(), nodes.end(), [](auto* a, auto* b) { return a->id < b->id; });
    for (const auto& r : rep.induced_relations) edges.push_back(&lib.relations.at(r.id));
  } else {
    require_valid(lib);
    for (const auto& [id, c] : lib.components) nodes.push_back(&c);
    for (const auto& [id, r] : lib.relations) edges.push_back(&r);
  }

  std::ostringstream out;
  out << "digraph methlib {\n";
  out << "  node [shape=box];\n";
  for (const auto* c : nodes) {
    out << "  " << dot_quote(c->id) << " [label=" << dot_quote(std::string(kind_name(c->kind)) + "\n" + c->name);
    if (pre.count(c->id)) out << ", style=bold";
    out << "];\n";
  }
  for (const auto* r : edges) {
    out << "  " << dot_quote(r->from) << " -> " << dot_quote(r->to) << " [label=" << dot_quote(r->label) << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace methlib
