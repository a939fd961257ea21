#include "methlib/service.hpp"

#include <mutex>

#include <httplib.h>

#include "methlib/dectree.hpp"
#include "methlib/error.hpp"
#include "methlib/heuristics.hpp"
#include "methlib/ingest.hpp"
#include "methlib/navigate.hpp"
#include "methlib/query.hpp"
#include "methlib/store.hpp"

namespace methlib {

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownId: return 404;
    case ErrorCode::DuplicateRelation:
    case ErrorCode::DuplicateId: return 409;
    case ErrorCode::IoError:
    case ErrorCode::InvalidLibrary: return 500;
    default: return 400;
  }
}

Response json_response(const Json& j, int status = 200) { return {status, canonical(j), "application/json"}; }

[[noreturn]] void bad_request(const std::string& message) { throw Error(ErrorCode::InvalidRequest, message); }

Json parse_body(const std::string& body) {
  if (body.empty()) return Json::object();
  try {
    return Json::parse(body);
  } catch (const Json::parse_error& e) {
    bad_request(std::string("request body is not valid JSON: ") + e.what());
  }
}

std::string body_string(const Json& j, const char* key, bool required = true) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (required) bad_request(std::string("missing field '") + key + "'");
    return {};
  }
  if (!it->is_string()) bad_request(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::optional<std::string> query_param(const std::map<std::string, std::string>& q, const std::string& key) {
  auto it = q.find(key);
  if (it == q.end()) return std::nullopt;
  return it->second;
}

TruthContext context_from(const Json& j) {
  TruthContext ctx;
  if (auto it = j.find("situation"); it != j.end() && !it->is_null()) ctx.situation = decode_situation(*it);
  if (auto it = j.find("selection"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) bad_request("field 'selection' must be an array of component ids");
    for (const auto& v : *it) {
      if (!v.is_string()) bad_request("field 'selection' must be an array of component ids");
      ctx.selection.insert(v.get<std::string>());
    }
  }
  return ctx;
}

std::map<std::string, std::optional<std::string>> situation_changes(const Json& j) {
  if (!j.is_object()) bad_request("situation update must be an object");
  std::map<std::string, std::optional<std::string>> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it->is_null()) {
      out[it.key()] = std::nullopt;
    } else if (it->is_string()) {
      out[it.key()] = it->get<std::string>();
    } else {
      bad_request("situation values must be strings or null");
    }
  }
  return out;
}

Json components_json(const Library& lib, const std::vector<std::string>& ids) {
  Json out = Json::array();
  for (const auto& id : ids) out.push_back(encode(lib.components.at(id)));
  return out;
}

}  // namespace

Response error_response(const std::exception& e) {
  Json j;
  int status = 500;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    status = status_for(err->code());
    j["code"] = code_name(err->code());
    if (const auto& p = err->position()) {
      j["position"] = {{"offset", p->offset}, {"line", p->line}, {"column", p->column}};
    } else {
      j["position"] = nullptr;
    }
  } else if (dynamic_cast<const Json::exception*>(&e)) {
    status = 400;
    j["code"] = code_name(ErrorCode::InvalidRequest);
    j["position"] = nullptr;
  } else {
    j["code"] = "internal";
    j["position"] = nullptr;
  }
  j["message"] = e.what();
  return {status, j.dump(2, ' ', false, Json::error_handler_t::replace) + "\n", "application/json"};
}

Service::Service(std::filesystem::path file, ServiceOptions opts) : file_(std::move(file)), opts_(std::move(opts)) {
  auto loaded = load_file(*file_);
  if (!loaded.violations.empty()) {
    throw Error(ErrorCode::InvalidLibrary, "library file has " + std::to_string(loaded.violations.size()) +
                                               " integrity violation(s); first: " + loaded.violations.front().detail);
  }
  lib_ = std::move(loaded.library);
}

Service::Service(Library lib, ServiceOptions opts) : opts_(std::move(opts)), lib_(std::move(lib)) {}

Library Service::snapshot() const {
  std::shared_lock lock(mutex_);
  return lib_;
}

void Service::commit(Library next) {
  if (file_) save_file(next, *file_);
  lib_ = std::move(next);
}

Response Service::handle(const std::string& method, const std::string& path,
                         const std::map<std::string, std::string>& query, const std::string& body) {
  try {
    return dispatch(method, path, query, body);
  } catch (const std::exception& e) {
    return error_response(e);
  }
}

Response Service::dispatch(const std::string& method, const std::string& path,
                           const std::map<std::string, std::string>& query, const std::string& body) {
  const auto seg = split_path(path);
  const auto n = seg.size();
  const bool get = method == "GET";
  const bool post = method == "POST";
  const bool patch = method == "PATCH";
  auto is = [&](std::initializer_list<const char*> parts) {
    if (parts.size() != n) return false;
    std::size_t i = 0;
    for (const char* p : parts) {
      if (*p != '*' && seg[i] != p) return false;
      ++i;
    }
    return true;
  };

  // reads
  if (get) {
    std::shared_lock lock(mutex_);
    const Library& lib = lib_;
    if (is({"components"})) {
      auto q = query_param(query, "query");
      Query parsed = q && !q->empty() ? parse_query(*q, lib) : parse_query("all");
      return json_response(components_json(lib, eval_query(lib, parsed)));
    }
    if (is({"components", "*"})) return json_response(encode(get_component(lib, seg[1])));
    if (is({"network", "*", "neighbors"})) {
      auto dir_text = query_param(query, "direction").value_or("both");
      auto dir = parse_direction(dir_text);
      if (!dir) bad_request("direction must be out, in or both");
      auto label = query_param(query, "label");
      if (label && label->empty()) label.reset();
      const Session* session = nullptr;
      if (auto sid = query_param(query, "session"); sid && !sid->empty()) session = &get_session(lib, *sid);
      return json_response(encode(neighbors(lib, session, seg[1], *dir, label)));
    }
    if (is({"sessions", "*"})) return json_response(encode(get_session(lib, seg[1])));
    if (is({"sessions", "*", "report"})) return json_response(encode(report(lib, seg[1])));
    if (is({"sessions", "*", "walk", "*"})) return json_response(encode(walk_state(lib, seg[1], seg[3])));
    if (is({"trees"})) {
      Json out = Json::array();
      for (const auto& [id, t] : lib.trees) out.push_back(encode(t));
      return json_response(out);
    }
    if (is({"trees", "*"})) return json_response(encode(get_tree(lib, seg[1])));
    if (is({"feedback", "*", "summary"})) return json_response(encode(feedback_summary(lib, seg[1])));
    if (is({"export", "dot"})) {
      auto sid = query_param(query, "session");
      if (sid && sid->empty()) sid.reset();
      return {200, export_dot(lib, sid), "text/vnd.graphviz"};
    }
    if (is({"validate"})) return json_response(encode(validate(lib)));
    if (is({"analysis", "rules"})) return json_response(encode(analyze_rules(lib)));
    if (is({"analysis", "coherence"})) {
      Json out = Json::array();
      for (const auto& [id, t] : lib.trees) {
        for (const auto& issue : check_coherence(lib, t)) out.push_back(encode(issue));
      }
      return json_response(out);
    }
  }

  if (post && is({"recommend"})) {
    auto j = parse_body(body);
    std::shared_lock lock(mutex_);
    return json_response(encode(recommend(lib_, context_from(j))));
  }
  if (post && is({"ingest", "duplicates"})) {
    auto j = parse_body(body);
    auto kind = parse_kind(body_string(j, "kind"));
    if (!kind) bad_request("unknown component kind");
    std::shared_lock lock(mutex_);
    Json out = Json::array();
    for (const auto& c : detect_duplicates(lib_, body_string(j, "name"), *kind)) out.push_back(encode(c));
    return json_response(out);
  }

  if (!(post || patch)) {
    bad_request("no route for " + method + " " + path);
  }

  // writes
  auto j = parse_body(body);
  const auto at = opts_.clock();
  std::unique_lock lock(mutex_);
  Library next = lib_;
  Response resp;

  if (post && is({"components"})) {
    auto draft = decode_component_draft(j);
    if (draft.document.empty()) ensure_librarian_document(next);
    auto dups = detect_duplicates(next, draft.name, draft.kind);
    auto id = add_component(next, std::move(draft));
    Json warnings = Json::array();
    for (const auto& d : dups) {
      if (d.needs_review) warnings.push_back(encode(d));
    }
    resp = json_response({{"component", encode(next.components.at(id))}, {"duplicates", warnings}}, 201);
  } else if (post && is({"relations"})) {
    SourceRef prov = j.contains("provenance") ? decode_source_ref(j["provenance"]) : SourceRef{};
    auto id = add_relation(next, body_string(j, "from"), body_string(j, "to"), body_string(j, "label"), prov);
    resp = json_response(encode(next.relations.at(id)), 201);
  } else if (post && is({"sessions"})) {
    Situation s = j.contains("situation") ? decode_situation(j["situation"]) : Situation{};
    auto& session = start_session(next, std::move(s), at);
    resp = json_response(encode(session), 201);
  } else if (post && (is({"sessions", "*", "mark"}) || is({"sessions", "*", "unmark"}))) {
    auto component = body_string(j, "component");
    auto outcome = seg[2] == "mark" ? mark(next, seg[1], component, at) : unmark(next, seg[1], component, at);
    Json out = encode(outcome);
    out["marked"] = get_session(next, seg[1]).marked;
    resp = json_response(out);
  } else if (patch && is({"sessions", "*", "situation"})) {
    update_situation(next, seg[1], situation_changes(j), at);
    resp = json_response(get_session(next, seg[1]).situation);
  } else if (post && is({"sessions", "*", "query"})) {
    auto ids = session_query(next, seg[1], body_string(j, "query"), at);
    resp = json_response(components_json(next, ids));
  } else if (post && is({"sessions", "*", "walk", "*", "answer"})) {
    resp = json_response(encode(answer(next, seg[1], seg[3], body_string(j, "value"), at)));
  } else if (post && is({"trees"})) {
    resp = json_response(encode(load_tree(next, decode_tree(j))), 201);
  } else if (post && is({"ingest", "documents"})) {
    resp = json_response(encode(add_document(next, decode_document(j))), 201);
  } else if (post && is({"ingest", "screenings"})) {
    auto policy = parse_policy(body_string(j, "policy", false).empty() ? "strict" : body_string(j, "policy"));
    if (!policy) bad_request("policy must be strict or relaxed");
    const auto& v = screen_document(next, body_string(j, "document"), decode_screening_answers(j.value("answers", j)),
                                    *policy, body_string(j, "screener", false));
    resp = json_response(encode(v));
  } else if (post && is({"ingest", "batches"})) {
    resp = json_response(encode(import_batch(next, batch_from_json(j))));
  } else if (post && is({"feedback"})) {
    FeedbackDraft d;
    d.component = body_string(j, "component");
    auto verdict = parse_feedback_verdict(body_string(j, "verdict"));
    if (!verdict) bad_request("verdict must be useful, not-useful, incorrect or needs-refinement");
    d.verdict = *verdict;
    d.note = body_string(j, "note", false);
    d.project_context = body_string(j, "project_context", false);
    auto id = submit_feedback(next, std::move(d), at);
    resp = json_response(encode(next.feedback.at(id)), 201);
  } else {
    bad_request("no route for " + method + " " + path);
  }

  commit(std::move(next));
  return resp;
}

// --- HTTP front end -----------------------------------------------------------

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;

  explicit Impl(Service& s) : service(s) {
    auto route = [this](const httplib::Request& req, httplib::Response& res) {
      std::map<std::string, std::string> query;
      for (const auto& [k, v] : req.params) query.emplace(k, v);
      auto r = service.handle(req.method, req.path, query, req.body);
      res.status = r.status;
      res.set_content(r.body, r.content_type);
    };
    const char* any = R"(/.*)";
    server.Get(any, route);
    server.Post(any, route);
    server.Patch(any, route);
  }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() {
  return impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace methlib
