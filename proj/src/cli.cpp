#include "methlib/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "methlib/dectree.hpp"
#include "methlib/error.hpp"
#include "methlib/heuristics.hpp"
#include "methlib/ingest.hpp"
#include "methlib/navigate.hpp"
#include "methlib/query.hpp"
#include "methlib/service.hpp"
#include "methlib/store.hpp"

namespace methlib {

namespace {

constexpr int kOk = 0;
constexpr int kUserError = 1;
constexpr int kDataError = 2;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedFile:
    case ErrorCode::UnsupportedVersion:
    case ErrorCode::InvalidLibrary:
    case ErrorCode::DanglingReference:
    case ErrorCode::UnscreenedDocument:
    case ErrorCode::RejectedDocument: return kDataError;
    default: return kUserError;
  }
}

struct Options {
  std::string library;
  std::string format = "text";
  bool structured() const { return format == "structured"; }
};

Library load_valid(const Options& o) {
  auto loaded = load_file(o.library);
  if (!loaded.violations.empty()) {
    throw Error(ErrorCode::InvalidLibrary, "library has " + std::to_string(loaded.violations.size()) +
                                               " integrity violation(s); run 'validate' for details");
  }
  return std::move(loaded.library);
}

std::optional<bool> parse_bool(const std::string& s) {
  if (s == "yes" || s == "true" || s == "y" || s == "1") return true;
  if (s == "no" || s == "false" || s == "n" || s == "0") return false;
  return std::nullopt;
}

void print_violations(std::ostream& out, const std::vector<Violation>& vs) {
  for (const auto& v : vs) out << violation_kind_name(v.kind) << "\t" << v.subject << "\t" << v.detail << "\n";
}

void print_report(std::ostream& out, const ImportReport& r) {
  out << "definitions: " << r.definitions.size() << " added, " << r.reused_definitions.size() << " reused\n";
  out << "components: " << r.components.size() << "\n";
  out << "relations: " << r.relations.size() << "\n";
  out << "heuristics: " << r.heuristics.size() << "\n";
  out << "trees: " << r.trees.size() << "\n";
  for (const auto& w : r.warnings) {
    out << "possible duplicate: '" << w.draft << "' (" << w.created << ") ~ '" << w.match.name << "' ("
        << w.match.component << ") score " << w.match.score << "\n";
  }
  for (const auto& x : r.rejected) out << "rejected " << x.section << " '" << x.ref << "': [" << x.code << "] " << x.reason << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Method component library"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "structured"}))->capture_default_str();

  std::function<int()> action;

  auto* init = app.add_subcommand("init", "Create an empty library file");
  init->add_option("file", o.library, "Library file")->required();
  bool force = false;
  init->add_flag("--force", force, "Overwrite an existing file");
  init->callback([&] {
    action = [&] {
      if (std::filesystem::exists(o.library) && !force) {
        throw Error(ErrorCode::InvalidRequest, "'" + o.library + "' already exists (use --force)");
      }
      save_file(Library{}, o.library);
      if (!o.structured()) out << "created " << o.library << "\n";
      return kOk;
    };
  });

  auto* validate_cmd = app.add_subcommand("validate", "Check library integrity");
  validate_cmd->add_option("file", o.library, "Library file")->required();
  validate_cmd->callback([&] {
    action = [&] {
      auto loaded = load_file(o.library);
      if (o.structured()) {
        out << canonical(encode(loaded.violations));
      } else {
        print_violations(out, loaded.violations);
        out << loaded.violations.size() << " violations\n";
      }
      return loaded.violations.empty() ? kOk : kDataError;
    };
  });

  auto* query_cmd = app.add_subcommand("query", "Run a component query");
  query_cmd->add_option("file", o.library, "Library file")->required();
  std::string query_text;
  query_cmd->add_option("query", query_text, "Query text")->required();
  query_cmd->callback([&] {
    action = [&] {
      auto lib = load_valid(o);
      auto ids = eval_query(lib, parse_query(query_text, lib));
      if (o.structured()) {
        Json arr = Json::array();
        for (const auto& id : ids) arr.push_back(encode(lib.components.at(id)));
        out << canonical(arr);
      } else {
        for (const auto& id : ids) {
          const auto& c = lib.components.at(id);
          out << c.id << "\t" << kind_name(c.kind) << "\t" << c.name << "\n";
        }
      }
      return kOk;
    };
  });

  auto* rec = app.add_subcommand("recommend", "Fire heuristics for a situation");
  rec->add_option("file", o.library, "Library file")->required();
  std::vector<std::string> factor_args, select_args;
  rec->add_option("--factor", factor_args, "factor=value assignment");
  rec->add_option("--select", select_args, "Selected component id");
  rec->callback([&] {
    action = [&] {
      auto lib = load_valid(o);
      TruthContext ctx;
      for (const auto& a : factor_args) {
        auto eq = a.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::InvalidRequest, "expected factor=value, got '" + a + "'");
        ctx.situation[a.substr(0, eq)] = a.substr(eq + 1);
      }
      ctx.selection.insert(select_args.begin(), select_args.end());
      auto recs = recommend(lib, ctx);
      if (o.structured()) {
        out << canonical(encode(recs));
      } else {
        for (const auto& r : recs) {
          out << r.name << "\t" << r.component << "\t" << strength_name(r.strength) << "\t" << r.recommend_count << "\t";
          for (std::size_t i = 0; i < r.firing.size(); ++i) out << (i ? "," : "") << r.firing[i];
          out << "\n";
        }
      }
      return kOk;
    };
  });

  auto* imp = app.add_subcommand("import", "Import a batch file");
  imp->add_option("file", o.library, "Library file")->required();
  std::string batch_file;
  imp->add_option("batch", batch_file, "Batch file")->required()->check(CLI::ExistingFile);
  imp->callback([&] {
    action = [&] {
      auto lib = load_valid(o);
      auto batch = load_batch(read_text_file(batch_file));
      auto report = import_batch(lib, batch);
      save_file(lib, o.library);
      if (o.structured()) {
        out << canonical(encode(report));
      } else {
        print_report(out, report);
      }
      return report.rejected.empty() ? kOk : kDataError;
    };
  });

  auto* scr = app.add_subcommand("screen", "Screen a registered source document");
  scr->add_option("file", o.library, "Library file")->required();
  std::string doc_id, screener;
  std::map<std::string, std::string> answers;
  bool relaxed = false;
  scr->add_option("document", doc_id, "Document id")->required();
  for (const char* c : {"structured", "novel", "in-domain", "reusable"}) {
    scr->add_option(std::string("--") + c, answers[c], "yes (default when given bare) or no")->expected(0, 1)->default_str("yes");
  }
  scr->add_flag("--relaxed", relaxed, "Relaxed policy");
  scr->add_option("--screener", screener, "Screener name");
  scr->callback([&] {
    action = [&] {
      auto lib = load_valid(o);
      auto get = [&](const char* key) -> std::optional<CriterionAnswer> {
        const auto& s = answers[key];
        if (s.empty()) return std::nullopt;
        auto b = parse_bool(s);
        if (!b) throw Error(ErrorCode::InvalidRequest, std::string("--") + key + " expects yes or no");
        return CriterionAnswer{*b, {}};
      };
      ScreeningAnswers a{get("structured"), get("novel"), get("in-domain"), get("reusable")};
      auto verdict = screen_document(lib, doc_id, a, relaxed ? ScreeningPolicy::Relaxed : ScreeningPolicy::Strict,
                                     screener);
      save_file(lib, o.library);
      if (o.structured()) {
        out << canonical(encode(verdict));
      } else {
        out << doc_id << ": " << decision_name(verdict.decision) << "\n";
      }
      return kOk;
    };
  });

  auto* add_doc = app.add_subcommand("add-document", "Register a source document");
  add_doc->add_option("file", o.library, "Library file")->required();
  SourceDocument doc;
  std::string doc_kind = "other";
  add_doc->add_option("id", doc.id, "Document id")->required();
  add_doc->add_option("--title", doc.title, "Title")->required();
  add_doc->add_option("--citation", doc.citation, "Citation")->required();
  add_doc->add_option("--kind", doc_kind, "Document kind")->capture_default_str();
  add_doc->callback([&] {
    action = [&] {
      auto kind = parse_document_kind(doc_kind);
      if (!kind) throw Error(ErrorCode::InvalidRequest, "unknown document kind '" + doc_kind + "'");
      doc.kind = *kind;
      auto lib = load_valid(o);
      const auto& d = add_document(lib, doc);
      auto encoded = encode(d);
      save_file(lib, o.library);
      if (o.structured()) {
        out << canonical(encoded);
      } else {
        out << "registered " << doc.id << "\n";
      }
      return kOk;
    };
  });

  auto* dot = app.add_subcommand("export-dot", "Export the network as Graphviz");
  dot->add_option("file", o.library, "Library file")->required();
  std::string dot_session, dot_output;
  dot->add_option("--session", dot_session, "Only the session selection");
  dot->add_option("-o,--output", dot_output, "Output file");
  dot->callback([&] {
    action = [&] {
      auto lib = load_valid(o);
      auto text = export_dot(lib, dot_session.empty() ? std::nullopt : std::optional<std::string>(dot_session));
      if (dot_output.empty()) {
        out << text;
      } else {
        std::ofstream f(dot_output, std::ios::binary);
        if (!(f << text)) throw Error(ErrorCode::IoError, "cannot write '" + dot_output + "'");
      }
      return kOk;
    };
  });

  auto* analyze = app.add_subcommand("analyze", "Report never-firing and conflicting heuristics");
  analyze->add_option("file", o.library, "Library file")->required();
  analyze->callback([&] {
    action = [&] {
      auto lib = load_valid(o);
      auto a = analyze_rules(lib);
      std::vector<CoherenceIssue> issues;
      for (const auto& [id, t] : lib.trees) {
        auto more = check_coherence(lib, t);
        issues.insert(issues.end(), more.begin(), more.end());
      }
      if (o.structured()) {
        Json coh = Json::array();
        for (const auto& i : issues) coh.push_back(encode(i));
        out << canonical({{"rules", encode(a)}, {"coherence", coh}});
      } else {
        for (const auto& h : a.never_firing) out << "never fires: " << h << "\n";
        for (const auto& c : a.conflicts) {
          out << "conflict: " << c.recommending << " vs " << c.discouraging << " on " << c.component << "\n";
        }
        for (const auto& h : a.inconclusive_heuristics) out << "inconclusive: " << h << "\n";
        for (const auto& c : a.inconclusive_pairs) {
          out << "inconclusive pair: " << c.recommending << " vs " << c.discouraging << "\n";
        }
        for (const auto& i : issues) out << "incoherent leaf: " << i.tree << "/" << i.leaf << ": " << i.detail << "\n";
      }
      return kOk;
    };
  });

  auto* stats = app.add_subcommand("stats", "Collection sizes");
  stats->add_option("file", o.library, "Library file")->required();
  stats->callback([&] {
    action = [&] {
      auto lib = load_valid(o);
      Json kinds = Json::object();
      for (auto k : kAllKinds) kinds[std::string(kind_name(k))] = 0;
      for (const auto& [id, c] : lib.components) kinds[std::string(kind_name(c.kind))] = kinds[std::string(kind_name(c.kind))].get<int>() + 1;
      Json j = {{"components", lib.components.size()},  {"relations", lib.relations.size()},
                {"heuristics", lib.heuristics.size()},  {"factors", lib.factors.size()},
                {"properties", lib.properties.size()},  {"trees", lib.trees.size()},
                {"documents", lib.documents.size()},    {"feedback", lib.feedback.size()},
                {"sessions", lib.sessions.size()},      {"kinds", kinds}};
      if (o.structured()) {
        out << canonical(j);
      } else {
        for (auto it = j.begin(); it != j.end(); ++it) {
          if (it.key() == "kinds") continue;
          out << it.key() << ": " << it.value() << "\n";
        }
        for (auto it = kinds.begin(); it != kinds.end(); ++it) out << "  " << it.key() << ": " << it.value() << "\n";
      }
      return kOk;
    };
  });

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("file", o.library, "Library file")->required();
  std::string bind = "127.0.0.1:8080";
  serve->add_option("--bind", bind, "host:port")->capture_default_str();
  serve->callback([&] {
    action = [&] {
      auto colon = bind.rfind(':');
      if (colon == std::string::npos) throw Error(ErrorCode::InvalidRequest, "--bind expects host:port");
      int port = 0;
      try {
        port = std::stoi(bind.substr(colon + 1));
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidRequest, "--bind expects host:port");
      }
      Service service{std::filesystem::path(o.library)};
      HttpServer server(service);
      int bound = server.bind(bind.substr(0, colon), port);
      if (bound < 0) throw Error(ErrorCode::IoError, "cannot bind " + bind);
      err << "listening on " << bind.substr(0, colon) << ":" << bound << std::endl;
      return server.listen() ? kOk : kUserError;
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUserError;
  }

  try {
    return action ? action() : kUserError;
  } catch (const Error& e) {
    if (o.structured()) {
      err << error_response(e).body;
    } else {
      err << "error [" << code_name(e.code()) << "]: " << e.what() << "\n";
    }
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUserError;
  }
}

}  // namespace methlib
