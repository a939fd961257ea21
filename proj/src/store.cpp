#include "methlib/store.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "methlib/error.hpp"

namespace methlib {

namespace {

[[noreturn]] void malformed(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::MalformedFile, (path.empty() ? std::string("$") : path) + ": " + what);
}

// Reads the fields of one JSON object and remembers which were consumed, so
// that the rest can be kept as unknown fields.
class Fields {
 public:
  Fields(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) malformed(path_, "expected an object");
  }

  const std::string& path() const { return path_; }
  std::string sub(const std::string& key) const { return path_ + "." + key; }

  bool has(const std::string& key) const {
    auto it = j_.find(key);
    return it != j_.end() && !it->is_null();
  }

  const Json& at(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) malformed(path_, "missing field '" + key + "'");
    return *it;
  }

  const Json* opt(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  std::string str(const std::string& key) { return as_string(at(key), sub(key)); }

  std::string str_or(const std::string& key, std::string fallback = {}) {
    const Json* v = opt(key);
    return v ? as_string(*v, sub(key)) : fallback;
  }

  std::optional<std::string> opt_str(const std::string& key) {
    const Json* v = opt(key);
    if (!v) return std::nullopt;
    return as_string(*v, sub(key));
  }

  bool boolean(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_boolean()) malformed(sub(key), "expected a boolean");
    return v.get<bool>();
  }

  std::uint64_t count_or_zero(const std::string& key) {
    const Json* v = opt(key);
    if (!v) return 0;
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
      malformed(sub(key), "expected a non-negative integer");
    }
    return v->get<std::uint64_t>();
  }

  std::vector<std::string> strings(const std::string& key) {
    const Json* v = opt(key);
    if (!v) return {};
    return as_strings(*v, sub(key));
  }

  Json rest() const {
    Json out = Json::object();
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) out[it.key()] = it.value();
    }
    return out;
  }

  static std::string as_string(const Json& v, const std::string& path) {
    if (!v.is_string()) malformed(path, "expected a string");
    return v.get<std::string>();
  }

  static std::vector<std::string> as_strings(const Json& v, const std::string& path) {
    if (!v.is_array()) malformed(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_string(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Json merged(Json j, const Json& unknown) {
  for (auto it = unknown.begin(); it != unknown.end(); ++it) {
    if (!j.contains(it.key())) j[it.key()] = it.value();
  }
  return j;
}

template <class T, class F>
T parse_enum(const std::string& text, F parse, const std::string& path, const char* what) {
  auto v = parse(text);
  if (!v) malformed(path, std::string("unknown ") + what + " '" + text + "'");
  return *v;
}

const Json& array_at(Fields& f, const std::string& key) {
  static const Json empty = Json::array();
  const Json* v = f.opt(key);
  if (!v) return empty;
  if (!v->is_array()) malformed(f.sub(key), "expected an array");
  return *v;
}

std::map<std::string, std::string> string_map(const Json& j, const std::string& path) {
  if (!j.is_object()) malformed(path, "expected an object");
  std::map<std::string, std::string> out;
  for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = Fields::as_string(it.value(), path + "." + it.key());
  return out;
}

SourceRef source_at(Fields& f, const std::string& key) {
  const Json* v = f.opt(key);
  if (!v) return {};
  SourceRef s;
  Fields g(*v, f.sub(key));
  s.citation = g.str_or("citation");
  s.pages = g.opt_str("pages");
  if (const Json* e = g.opt("extra")) s.extra = string_map(*e, g.sub("extra"));
  return s;
}

Json encode_answer(const CriterionAnswer& a) { return {{"satisfied", a.satisfied}, {"justification", a.justification}}; }

CriterionAnswer decode_answer(const Json& j, const std::string& path) {
  if (j.is_boolean()) return {j.get<bool>(), {}};
  Fields f(j, path);
  return {f.boolean("satisfied"), f.str_or("justification")};
}

ScreeningVerdict decode_verdict(const Json& j, const std::string& path) {
  Fields f(j, path);
  ScreeningVerdict v;
  v.structured = decode_answer(f.at("structured"), f.sub("structured"));
  v.novel = decode_answer(f.at("novel"), f.sub("novel"));
  v.in_domain = decode_answer(f.at("in_domain"), f.sub("in_domain"));
  v.reusable = decode_answer(f.at("reusable"), f.sub("reusable"));
  auto d = f.str("decision");
  if (d == "accept") {
    v.decision = Decision::Accept;
  } else if (d == "reject") {
    v.decision = Decision::Reject;
  } else {
    malformed(f.sub("decision"), "unknown decision '" + d + "'");
  }
  v.policy = parse_enum<ScreeningPolicy>(f.str_or("policy", "strict"), parse_policy, f.sub("policy"), "policy");
  v.screener = f.str_or("screener");
  return v;
}

PropertyDefinition decode_property(const Json& j, const std::string& path) {
  Fields f(j, path);
  PropertyDefinition p;
  p.id = f.str("id");
  p.name = f.str_or("name");
  p.description = f.str_or("description");
  if (const Json* d = f.opt("domain")) p.domain = Fields::as_strings(*d, f.sub("domain"));
  p.unknown = f.rest();
  return p;
}

Json encode_property(const PropertyDefinition& p) {
  Json j = {{"id", p.id}, {"name", p.name}, {"description", p.description}};
  j["domain"] = p.domain ? Json(*p.domain) : Json(nullptr);
  return merged(std::move(j), p.unknown);
}

SituationalFactorDef decode_factor(const Json& j, const std::string& path) {
  Fields f(j, path);
  SituationalFactorDef d;
  d.id = f.str("id");
  d.name = f.str_or("name");
  d.description = f.str_or("description");
  d.domain = f.strings("domain");
  d.source = source_at(f, "source");
  d.unknown = f.rest();
  return d;
}

Json encode_factor(const SituationalFactorDef& d) {
  Json j = {{"id", d.id}, {"name", d.name}, {"description", d.description}, {"domain", d.domain},
            {"source", encode(d.source)}};
  return merged(std::move(j), d.unknown);
}

std::map<std::string, std::vector<std::string>> decode_properties(Fields& f) {
  std::map<std::string, std::vector<std::string>> out;
  const Json* v = f.opt("properties");
  if (!v) return out;
  if (!v->is_object()) malformed(f.sub("properties"), "expected an object");
  for (auto it = v->begin(); it != v->end(); ++it) {
    auto path = f.sub("properties") + "." + it.key();
    // a single value may be given as a plain string
    out[it.key()] = it->is_string() ? std::vector<std::string>{it->get<std::string>()} : Fields::as_strings(*it, path);
  }
  return out;
}

MethodComponent decode_component(const Json& j, const std::string& path) {
  Fields f(j, path);
  MethodComponent c;
  c.id = f.str("id");
  c.kind = parse_enum<ComponentKind>(f.str("kind"), parse_kind, f.sub("kind"), "component kind");
  c.name = f.str("name");
  c.description = f.str_or("description");
  c.source = source_at(f, "source");
  c.document = f.str_or("document");
  c.properties = decode_properties(f);
  c.unknown = f.rest();
  return c;
}

Relation decode_relation(const Json& j, const std::string& path) {
  Fields f(j, path);
  Relation r;
  r.id = f.str("id");
  r.from = f.str("from");
  r.to = f.str("to");
  r.label = f.str("label");
  r.provenance = source_at(f, "provenance");
  r.unknown = f.rest();
  return r;
}

Condition condition_at(Fields& f, const std::string& key) {
  auto text = f.str(key);
  try {
    return parse_condition(text);
  } catch (const Error& e) {
    malformed(f.sub(key), std::string("bad condition: ") + e.what());
  }
}

Heuristic decode_heuristic(const Json& j, const std::string& path) {
  Fields f(j, path);
  Heuristic h;
  h.id = f.str("id");
  h.condition = condition_at(f, "condition");
  h.consequent = f.str("consequent");
  h.strength = parse_enum<Strength>(f.str_or("strength", "recommend"), parse_strength, f.sub("strength"), "strength");
  h.rationale = f.str_or("rationale");
  h.provenance = source_at(f, "provenance");
  h.unknown = f.rest();
  return h;
}

TreeNode decode_node(const Json& j, const std::string& path) {
  Fields f(j, path);
  if (f.has("question")) {
    QuestionNode q;
    q.factor = f.str("question");
    if (const Json* b = f.opt("branches")) q.branches = string_map(*b, f.sub("branches"));
    q.fallback = f.opt_str("default");
    return q;
  }
  LeafNode l;
  l.premarked = f.strings("premarked");
  l.note = f.str_or("note");
  return l;
}

Json encode_node(const TreeNode& n) {
  if (const auto* q = std::get_if<QuestionNode>(&n)) {
    Json j = {{"question", q->factor}, {"branches", q->branches}};
    if (q->fallback) j["default"] = *q->fallback;
    return j;
  }
  const auto& l = std::get<LeafNode>(n);
  return {{"premarked", l.premarked}, {"note", l.note}};
}

DecisionTree decode_tree_at(const Json& j, const std::string& path) {
  Fields f(j, path);
  DecisionTree t;
  t.id = f.str("id");
  t.name = f.str_or("name");
  t.root = f.str("root");
  const Json& nodes = f.at("nodes");
  if (!nodes.is_object()) malformed(f.sub("nodes"), "expected an object");
  for (auto it = nodes.begin(); it != nodes.end(); ++it) {
    t.nodes.emplace(it.key(), decode_node(it.value(), f.sub("nodes") + "." + it.key()));
  }
  t.unknown = f.rest();
  return t;
}

SourceDocument decode_document_at(const Json& j, const std::string& path) {
  Fields f(j, path);
  SourceDocument d;
  d.id = f.str("id");
  d.title = f.str_or("title");
  d.kind = parse_enum<DocumentKind>(f.str_or("kind", "other"), parse_document_kind, f.sub("kind"), "document kind");
  d.citation = f.str_or("citation");
  if (const Json* s = f.opt("screening")) d.screening = decode_verdict(*s, f.sub("screening"));
  d.unknown = f.rest();
  return d;
}

FeedbackRecord decode_feedback(const Json& j, const std::string& path) {
  Fields f(j, path);
  FeedbackRecord r;
  r.id = f.str("id");
  r.component = f.str("component");
  r.verdict = parse_enum<FeedbackVerdict>(f.str("verdict"), parse_feedback_verdict, f.sub("verdict"), "verdict");
  r.note = f.str_or("note");
  r.project_context = f.str_or("project_context");
  r.timestamp = f.str_or("timestamp");
  r.unknown = f.rest();
  return r;
}

Json encode_action(const SessionAction& a) {
  Json j = {{"kind", action_name(a.kind)}, {"at", a.at}};
  auto put = [&](const char* k, const std::string& v) {
    if (!v.empty()) j[k] = v;
  };
  put("component", a.component);
  put("factor", a.factor);
  put("value", a.value);
  put("tree", a.tree);
  put("text", a.text);
  return j;
}

SessionAction decode_action(const Json& j, const std::string& path) {
  Fields f(j, path);
  SessionAction a;
  a.kind = parse_enum<ActionKind>(f.str("kind"), parse_action, f.sub("kind"), "action");
  a.component = f.str_or("component");
  a.factor = f.str_or("factor");
  a.value = f.str_or("value");
  a.tree = f.str_or("tree");
  a.text = f.str_or("text");
  a.at = f.str_or("at");
  return a;
}

Json encode_walk(const Walk& w) {
  Json path = Json::array();
  for (const auto& [factor, value] : w.path) path.push_back({factor, value});
  return {{"tree", w.tree}, {"path", path}, {"cursor", w.cursor}};
}

Walk decode_walk(const Json& j, const std::string& path) {
  Fields f(j, path);
  Walk w;
  w.tree = f.str("tree");
  w.cursor = f.str("cursor");
  const Json& steps = array_at(f, "path");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    auto pair = Fields::as_strings(steps[i], f.sub("path") + "[" + std::to_string(i) + "]");
    if (pair.size() != 2) malformed(f.sub("path") + "[" + std::to_string(i) + "]", "expected [factor, answer]");
    w.path.emplace_back(pair[0], pair[1]);
  }
  return w;
}

Session decode_session(const Json& j, const std::string& path) {
  Fields f(j, path);
  Session s;
  s.id = f.str("id");
  if (const Json* sit = f.opt("situation")) s.situation = string_map(*sit, f.sub("situation"));
  s.marked = f.strings("marked");
  const Json& hist = array_at(f, "history");
  for (std::size_t i = 0; i < hist.size(); ++i) {
    s.history.push_back(decode_action(hist[i], f.sub("history") + "[" + std::to_string(i) + "]"));
  }
  const Json& walks = array_at(f, "walks");
  for (std::size_t i = 0; i < walks.size(); ++i) {
    auto w = decode_walk(walks[i], f.sub("walks") + "[" + std::to_string(i) + "]");
    auto tid = w.tree;
    s.walks.emplace(tid, std::move(w));
  }
  s.created = f.str_or("created");
  s.updated = f.str_or("updated");
  s.unknown = f.rest();
  return s;
}

template <class Map, class Encode>
Json encode_collection(const Map& m, Encode enc) {
  Json out = Json::array();
  for (const auto& [id, rec] : m) out.push_back(enc(rec));
  return out;
}

template <class Map, class Decode>
void decode_collection(Fields& f, const std::string& key, Map& into, Decode dec) {
  const Json& arr = array_at(f, key);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    auto path = f.sub(key) + "[" + std::to_string(i) + "]";
    auto rec = dec(arr[i], path);
    auto id = rec.id;
    if (!into.emplace(id, std::move(rec)).second) malformed(path, "duplicate id '" + id + "'");
  }
}

void check_format(const std::string& tag, std::string_view expected_prefix) {
  std::string prefix(expected_prefix.substr(0, expected_prefix.find('/') + 1));
  if (tag.rfind(prefix, 0) != 0) malformed("$.format", "unrecognized format '" + tag + "'");
  auto ver = tag.substr(prefix.size());
  int n = 0;
  try {
    std::size_t used = 0;
    n = std::stoi(ver, &used);
    if (used != ver.size()) throw std::invalid_argument(ver);
  } catch (const std::exception&) {
    malformed("$.format", "unrecognized format '" + tag + "'");
  }
  if (n > kFormatVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "format '" + tag + "' is newer than this version supports");
  }
  if (n < 1) malformed("$.format", "unrecognized format '" + tag + "'");
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t offset = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
    Position pos{offset, 1, 1};
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++pos.line;
        pos.column = 1;
      } else {
        ++pos.column;
      }
    }
    throw Error(ErrorCode::MalformedFile,
                "invalid JSON at line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column), pos);
  }
}

}  // namespace

std::string canonical(const Json& j) {
  try {
    return j.dump(2) + "\n";
  } catch (const Json::type_error& e) {
    throw Error(ErrorCode::InvalidRequest, std::string("cannot serialize: ") + e.what());
  }
}

Json encode(const SourceRef& s) {
  Json j = {{"citation", s.citation}, {"extra", s.extra}};
  if (s.pages) j["pages"] = *s.pages;
  return j;
}

SourceRef decode_source_ref(const Json& j) {
  Json wrapper = {{"source", j}};
  Fields f(wrapper, "$");
  return source_at(f, "source");
}

Json encode(const MethodComponent& c) {
  Json j = {{"id", c.id},
            {"kind", kind_name(c.kind)},
            {"name", c.name},
            {"description", c.description},
            {"source", encode(c.source)},
            {"document", c.document},
            {"properties", c.properties}};
  return merged(std::move(j), c.unknown);
}

ComponentDraft decode_component_draft(const Json& j) {
  Fields f(j, "$");
  ComponentDraft d;
  d.kind = parse_enum<ComponentKind>(f.str("kind"), parse_kind, f.sub("kind"), "component kind");
  d.name = f.str("name");
  d.description = f.str_or("description");
  d.source = source_at(f, "source");
  d.document = f.str_or("document");
  d.properties = decode_properties(f);
  return d;
}

Json encode(const Relation& r) {
  Json j = {{"id", r.id}, {"from", r.from}, {"to", r.to}, {"label", r.label}, {"provenance", encode(r.provenance)}};
  return merged(std::move(j), r.unknown);
}

Json encode(const Heuristic& h) {
  Json j = {{"id", h.id},
            {"condition", print_condition(h.condition)},
            {"consequent", h.consequent},
            {"strength", strength_name(h.strength)},
            {"rationale", h.rationale},
            {"provenance", encode(h.provenance)}};
  return merged(std::move(j), h.unknown);
}

Json encode(const DecisionTree& t) {
  Json nodes = Json::object();
  for (const auto& [id, n] : t.nodes) nodes[id] = encode_node(n);
  Json j = {{"id", t.id}, {"name", t.name}, {"root", t.root}, {"nodes", nodes}};
  return merged(std::move(j), t.unknown);
}

DecisionTree decode_tree(const Json& j) { return decode_tree_at(j, "$"); }

Json encode(const ScreeningVerdict& v) {
  return {{"structured", encode_answer(v.structured)},
          {"novel", encode_answer(v.novel)},
          {"in_domain", encode_answer(v.in_domain)},
          {"reusable", encode_answer(v.reusable)},
          {"decision", decision_name(v.decision)},
          {"policy", policy_name(v.policy)},
          {"screener", v.screener}};
}

ScreeningAnswers decode_screening_answers(const Json& j) {
  Fields f(j, "$");
  ScreeningAnswers a;
  auto get = [&](const char* key) -> std::optional<CriterionAnswer> {
    const Json* v = f.opt(key);
    if (!v) return std::nullopt;
    return decode_answer(*v, f.sub(key));
  };
  a.structured = get("structured");
  a.novel = get("novel");
  a.in_domain = get("in_domain");
  a.reusable = get("reusable");
  return a;
}

Json encode(const SourceDocument& d) {
  Json j = {{"id", d.id}, {"title", d.title}, {"kind", document_kind_name(d.kind)}, {"citation", d.citation}};
  j["screening"] = d.screening ? encode(*d.screening) : Json(nullptr);
  return merged(std::move(j), d.unknown);
}

SourceDocument decode_document(const Json& j) { return decode_document_at(j, "$"); }

Json encode(const FeedbackRecord& r) {
  Json j = {{"id", r.id},
            {"component", r.component},
            {"verdict", feedback_verdict_name(r.verdict)},
            {"note", r.note},
            {"project_context", r.project_context},
            {"timestamp", r.timestamp}};
  return merged(std::move(j), r.unknown);
}

Json encode(const Session& s) {
  Json history = Json::array();
  for (const auto& a : s.history) history.push_back(encode_action(a));
  Json j = {{"id", s.id},
            {"situation", s.situation},
            {"marked", s.marked},
            {"history", history},
            {"walks", encode_collection(s.walks, encode_walk)},
            {"created", s.created},
            {"updated", s.updated}};
  return merged(std::move(j), s.unknown);
}

Situation decode_situation(const Json& j) { return string_map(j, "$"); }

Json library_to_json(const Library& lib, const SaveOptions& opts) {
  Json j = {
      {"format", kFormatTag},
      {"counters",
       {{"component", lib.counters.component},
        {"relation", lib.counters.relation},
        {"heuristic", lib.counters.heuristic},
        {"session", lib.counters.session},
        {"feedback", lib.counters.feedback}}},
      {"property_definitions", encode_collection(lib.properties, encode_property)},
      {"situational_factors", encode_collection(lib.factors, encode_factor)},
      {"components", encode_collection(lib.components, [](const auto& c) { return encode(c); })},
      {"relations", encode_collection(lib.relations, [](const auto& r) { return encode(r); })},
      {"heuristics", encode_collection(lib.heuristics, [](const auto& h) { return encode(h); })},
      {"decision_trees", encode_collection(lib.trees, [](const auto& t) { return encode(t); })},
      {"source_documents", encode_collection(lib.documents, [](const auto& d) { return encode(d); })},
      {"feedback", encode_collection(lib.feedback, [](const auto& f) { return encode(f); })},
  };
  if (opts.include_sessions) j["sessions"] = encode_collection(lib.sessions, [](const auto& s) { return encode(s); });
  return merged(std::move(j), lib.unknown);
}

Library library_from_json(const Json& j) {
  Fields f(j, "$");
  check_format(f.str("format"), kFormatTag);
  Library lib;
  if (const Json* c = f.opt("counters")) {
    Fields g(*c, f.sub("counters"));
    lib.counters.component = g.count_or_zero("component");
    lib.counters.relation = g.count_or_zero("relation");
    lib.counters.heuristic = g.count_or_zero("heuristic");
    lib.counters.session = g.count_or_zero("session");
    lib.counters.feedback = g.count_or_zero("feedback");
  }
  decode_collection(f, "property_definitions", lib.properties, decode_property);
  decode_collection(f, "situational_factors", lib.factors, decode_factor);
  decode_collection(f, "components", lib.components, decode_component);
  decode_collection(f, "relations", lib.relations, decode_relation);
  decode_collection(f, "heuristics", lib.heuristics, decode_heuristic);
  decode_collection(f, "decision_trees", lib.trees, decode_tree_at);
  decode_collection(f, "source_documents", lib.documents, decode_document_at);
  decode_collection(f, "feedback", lib.feedback, decode_feedback);
  decode_collection(f, "sessions", lib.sessions, decode_session);
  lib.unknown = f.rest();
  return lib;
}

std::string save(const Library& lib, const SaveOptions& opts) {
  require_valid(lib);
  return canonical(library_to_json(lib, opts));
}

void save_file(const Library& lib, const std::filesystem::path& path, const SaveOptions& opts) {
  auto text = save(lib, opts);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot replace '" + path.string() + "': " + ec.message());
}

LoadResult load(std::string_view text) {
  LoadResult r;
  r.library = library_from_json(parse_json(text));
  r.violations = validate(r.library);
  return r;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LoadResult load_file(const std::filesystem::path& path) { return load(read_text_file(path)); }

ImportBatch batch_from_json(const Json& j) {
  Fields f(j, "$");
  if (const Json* tag = f.opt("format")) check_format(Fields::as_string(*tag, "$.format"), kBatchFormatTag);
  ImportBatch b;
  if (const Json* doc = f.opt("document")) {
    if (doc->is_string()) {
      b.document = doc->get<std::string>();
    } else {
      auto d = decode_document_at(*doc, f.sub("document"));
      b.document = d.id;
      b.document_def = std::move(d);
    }
  }
  if (const Json* s = f.opt("screening")) {
    b.screening = decode_screening_answers(*s);
    Fields g(*s, f.sub("screening"));
    b.policy = parse_enum<ScreeningPolicy>(g.str_or("policy", "strict"), parse_policy, g.sub("policy"), "policy");
    b.screener = g.str_or("screener");
  }

  const Json& props = array_at(f, "property_definitions");
  for (std::size_t i = 0; i < props.size(); ++i) {
    b.properties.push_back(decode_property(props[i], f.sub("property_definitions") + "[" + std::to_string(i) + "]"));
  }
  const Json& factors = array_at(f, "situational_factors");
  for (std::size_t i = 0; i < factors.size(); ++i) {
    b.factors.push_back(decode_factor(factors[i], f.sub("situational_factors") + "[" + std::to_string(i) + "]"));
  }
  const Json& comps = array_at(f, "components");
  for (std::size_t i = 0; i < comps.size(); ++i) {
    auto path = f.sub("components") + "[" + std::to_string(i) + "]";
    try {
      b.components.push_back(decode_component_draft(comps[i]));
    } catch (const Error& e) {
      malformed(path, e.what());
    }
  }
  const Json& rels = array_at(f, "relations");
  for (std::size_t i = 0; i < rels.size(); ++i) {
    Fields g(rels[i], f.sub("relations") + "[" + std::to_string(i) + "]");
    b.relations.push_back({g.str("from"), g.str("to"), g.str("label"), source_at(g, "provenance")});
  }
  const Json& heur = array_at(f, "heuristics");
  for (std::size_t i = 0; i < heur.size(); ++i) {
    Fields g(heur[i], f.sub("heuristics") + "[" + std::to_string(i) + "]");
    HeuristicDraft h;
    h.id = g.str_or("id");
    h.condition = g.str("condition");
    h.consequent = g.str("consequent");
    h.strength = parse_enum<Strength>(g.str_or("strength", "recommend"), parse_strength, g.sub("strength"), "strength");
    h.rationale = g.str_or("rationale");
    h.provenance = source_at(g, "provenance");
    b.heuristics.push_back(std::move(h));
  }
  const Json& trees = array_at(f, "decision_trees");
  for (std::size_t i = 0; i < trees.size(); ++i) {
    b.trees.push_back(decode_tree_at(trees[i], f.sub("decision_trees") + "[" + std::to_string(i) + "]"));
  }
  return b;
}

ImportBatch load_batch(std::string_view text) { return batch_from_json(parse_json(text)); }

// --- result objects ----------------------------------------------------------

Json encode(const Violation& v) {
  return {{"kind", violation_kind_name(v.kind)}, {"subject", v.subject}, {"detail", v.detail}};
}

Json encode(const std::vector<Violation>& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(encode(x));
  return out;
}

Json encode(const Recommendation& r) {
  return {{"component", r.component},
          {"name", r.name},
          {"firing", r.firing},
          {"recommend_count", r.recommend_count},
          {"strength", strength_name(r.strength)}};
}

Json encode(const std::vector<Recommendation>& r) {
  Json out = Json::array();
  for (const auto& x : r) out.push_back(encode(x));
  return out;
}

Json encode(const NeighborRow& r) {
  return {{"relation", r.relation},   {"label", r.label},   {"component", r.component},
          {"name", r.name},           {"direction", direction_name(r.direction)},
          {"marked", r.marked},       {"premarked", r.premarked}};
}

Json encode(const std::vector<NeighborRow>& r) {
  Json out = Json::array();
  for (const auto& x : r) out.push_back(encode(x));
  return out;
}

Json encode(const SelectionReport& r) {
  Json comps = Json::array();
  for (const auto& c : r.components) comps.push_back(encode(c));
  Json rels = Json::array();
  for (const auto& x : r.induced_relations) rels.push_back(encode(x));
  Json firing = Json::array();
  for (const auto& h : r.firing_heuristics) {
    firing.push_back({{"id", h.id},
                      {"consequent", h.consequent},
                      {"consequent_name", h.consequent_name},
                      {"strength", strength_name(h.strength)}});
  }
  return {{"session", r.session},         {"situation", r.situation}, {"components", comps},
          {"induced_relations", rels},    {"firing_heuristics", firing}, {"warnings", r.warnings}};
}

Json encode(const MarkOutcome& m) { return {{"changed", m.changed}, {"warning", m.warning}, {"message", m.message}}; }

Json encode(const QuestionView& q) {
  return {{"node", q.node},
          {"factor", q.factor},
          {"answers", q.answers},
          {"has_default", q.has_fallback},
          {"domain", q.domain}};
}

Json encode(const WalkState& w) {
  Json j = {{"walk", encode_walk(w.walk)}, {"finished", !w.question.has_value()}};
  j["question"] = w.question ? encode(*w.question) : Json(nullptr);
  j["leaf"] = w.leaf ? Json{{"premarked", w.leaf->premarked}, {"note", w.leaf->note}} : Json(nullptr);
  return j;
}

Json encode(const DuplicateCandidate& d) {
  return {{"component", d.component},
          {"name", d.name},
          {"kind", kind_name(d.kind)},
          {"score", d.score},
          {"needs_review", d.needs_review}};
}

Json encode(const ImportReport& r) {
  Json comps = Json::array();
  for (const auto& [name, id] : r.components) comps.push_back({{"name", name}, {"id", id}});
  Json warnings = Json::array();
  for (const auto& w : r.warnings) {
    warnings.push_back({{"draft", w.draft}, {"created", w.created}, {"match", encode(w.match)}});
  }
  Json rejected = Json::array();
  for (const auto& x : r.rejected) {
    rejected.push_back({{"section", x.section}, {"ref", x.ref}, {"code", x.code}, {"reason", x.reason}});
  }
  return {{"definitions", r.definitions}, {"reused_definitions", r.reused_definitions},
          {"components", comps},          {"relations", r.relations},
          {"heuristics", r.heuristics},   {"trees", r.trees},
          {"warnings", warnings},         {"rejected", rejected}};
}

Json encode(const FeedbackSummary& s) {
  return {{"component", s.component}, {"counts", s.counts}, {"total", s.total}, {"notes", s.notes}};
}

Json encode(const RuleAnalysis& a) {
  auto pairs = [](const std::vector<RuleConflict>& v) {
    Json out = Json::array();
    for (const auto& c : v) {
      out.push_back({{"recommending", c.recommending}, {"discouraging", c.discouraging}, {"component", c.component}});
    }
    return out;
  };
  return {{"never_firing", a.never_firing},
          {"conflicts", pairs(a.conflicts)},
          {"inconclusive_heuristics", a.inconclusive_heuristics},
          {"inconclusive_pairs", pairs(a.inconclusive_pairs)}};
}

Json encode(const CoherenceIssue& c) {
  return {{"tree", c.tree}, {"leaf", c.leaf}, {"component", c.component}, {"detail", c.detail}};
}

}  // namespace methlib
