#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "methlib/cli.hpp"
#include "methlib/service.hpp"
#include "methlib/store.hpp"

using namespace methlib;

namespace {

const std::string kSeed = std::string(METHLIB_DATA_DIR) + "/seed_batch.json";

struct Run {
  int code;
  std::string out;
  std::string err;
};

struct Workspace {
  std::filesystem::path dir;
  std::string lib;

  Workspace() {
    dir = std::filesystem::temp_directory_path() / "methlib_cli_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    lib = (dir / "library.json").string();
  }
  ~Workspace() { std::filesystem::remove_all(dir); }

  Run run(std::vector<std::string> args) const {
    // the library file is the first argument after the command name
    std::size_t cmd = args.size() >= 2 && args[0] == "--format" ? 2 : 0;
    if (cmd < args.size()) args.insert(args.begin() + static_cast<long>(cmd) + 1, lib);
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
  }

  void seeded() const {
    REQUIRE(run({"init"}).code == 0);
    REQUIRE(run({"import", kSeed}).code == 0);
  }
};

}  // namespace

TEST_CASE("cli: init and validate") {
  Workspace ws;
  auto r = ws.run({"init"});
  CHECK(r.code == 0);
  CHECK(std::filesystem::exists(ws.lib));
  CHECK(ws.run({"init"}).code == 1);
  CHECK(ws.run({"init", "--force"}).code == 0);
  CHECK(ws.run({"validate"}).out == "0 violations\n");
  CHECK(ws.run({"--format", "structured", "validate"}).out == "[]\n");
}

TEST_CASE("cli: usage errors exit with 1") {
  Workspace ws;
  CHECK(ws.run({}).code == 1);
  CHECK(ws.run({"frobnicate"}).code == 1);
  CHECK(ws.run({"--format", "yaml", "stats"}).code == 1);
  {
    std::ostringstream out, err;
    CHECK(run_cli({"validate"}, out, err) == 1);  // file argument missing
  }
  ws.seeded();
  CHECK(ws.run({"query", "kind = "}).code == 1);
  CHECK(ws.run({"recommend", "--factor", "data_complexity"}).code == 1);
  CHECK(ws.run({"recommend", "--factor", "data_complexity=extreme"}).code == 1);
  CHECK(ws.run({"screen", "sanden97", "--structured", "maybe"}).code == 1);
}

TEST_CASE("cli: data errors exit with 2") {
  Workspace ws;
  CHECK(ws.run({"stats"}).code == 1);  // no such file
  {
    std::ofstream(ws.lib) << "{\"format\": \"methlib/1\",";
  }
  auto r = ws.run({"stats"});
  CHECK(r.code == 2);
  CHECK(r.err.find("malformed_file") != std::string::npos);
  {
    std::ofstream(ws.lib) << "{\"format\": \"methlib/9\"}";
  }
  CHECK(ws.run({"validate"}).code == 2);

  ws.run({"init", "--force"});
  ws.run({"import", kSeed});
  auto j = Json::parse(read_text_file(ws.lib));
  j["relations"][0]["to"] = "c404";
  {
    std::ofstream(ws.lib) << canonical(j);
  }
  auto v = ws.run({"validate"});
  CHECK(v.code == 2);
  CHECK(v.out.find("c404") != std::string::npos);
  CHECK(ws.run({"query", "all"}).code == 2);
}

TEST_CASE("cli: seed import, query and recommend") {
  Workspace ws;
  ws.run({"init"});
  auto imp = ws.run({"import", kSeed});
  CHECK(imp.code == 0);
  CHECK(imp.out.find("components: 10") != std::string::npos);

  auto q = ws.run({"query", "kind = Principle"});
  CHECK(q.out == "c2\tPrinciple\tfunctional decomposition\nc1\tPrinciple\tinfrastructural approach\n");

  auto rec = ws.run({"recommend", "--factor", "data_complexity=high"});
  CHECK(rec.code == 0);
  CHECK(rec.out == "natural language modeling technique\tc8\trecommend\t1\tH1\n");
  CHECK(ws.run({"recommend"}).out.empty());
  CHECK(ws.run({"recommend", "--select", "c9"}).out.find("c10") != std::string::npos);

  auto stats = Json::parse(ws.run({"--format", "structured", "stats"}).out);
  CHECK(stats["components"] == 10);
  CHECK(stats["kinds"]["Product"] == 4);

  auto again = ws.run({"--format", "structured", "import", kSeed});
  CHECK(again.code == 2);
  auto rep = Json::parse(again.out);
  CHECK(rep["components"].size() == 10);
  std::size_t certain = 0;
  for (const auto& w : rep["warnings"]) certain += w["match"]["score"] == 1.0;
  CHECK(certain == 10);
}

TEST_CASE("cli: structured recommend output equals the service response") {
  Workspace ws;
  ws.seeded();
  Service svc(std::filesystem::path(ws.lib));
  const std::vector<std::pair<std::vector<std::string>, std::string>> cases = {
      {{}, "{}"},
      {{"--factor", "data_complexity=high"}, R"({"situation": {"data_complexity": "high"}})"},
      {{"--select", "c9"}, R"({"selection": ["c9"]})"},
      {{"--factor", "data_complexity=high", "--select", "c9", "--select", "c2"},
       R"({"situation": {"data_complexity": "high"}, "selection": ["c9", "c2"]})"},
  };
  for (const auto& [args, body] : cases) {
    std::vector<std::string> full = {"--format", "structured", "recommend"};
    full.insert(full.end(), args.begin(), args.end());
    auto cli = ws.run(full);
    auto http = svc.handle("POST", "/recommend", {}, body);
    CHECK(cli.code == 0);
    CHECK(http.status == 200);
    CHECK(cli.out == http.body);
  }
}

TEST_CASE("cli: documents and screening") {
  Workspace ws;
  ws.seeded();
  CHECK(ws.run({"add-document", "arch", "--title", "Archive", "--citation", "x", "--kind", "project-archive"}).code == 0);
  CHECK(ws.run({"add-document", "arch", "--title", "Archive", "--citation", "x"}).code == 1);
  CHECK(ws.run({"add-document", "bad", "--title", "t", "--citation", "x", "--kind", "scroll"}).code == 1);
  CHECK(ws.run({"screen", "arch", "--structured", "yes", "--novel", "yes", "--in-domain", "yes"}).code == 1);
  auto s = ws.run({"screen", "arch", "--structured", "--novel", "no", "--in-domain", "--reusable"});
  CHECK(s.out == "arch: reject\n");
  s = ws.run({"screen", "arch", "--structured", "yes", "--novel", "no", "--in-domain", "yes", "--reusable", "yes",
              "--relaxed"});
  CHECK(s.out == "arch: accept\n");
  CHECK(load_file(ws.lib).library.documents.at("arch").accepted());
}

TEST_CASE("cli: DOT export and analysis") {
  Workspace ws;
  ws.seeded();
  auto dot = ws.run({"export-dot"});
  CHECK(dot.code == 0);
  CHECK(dot.out.rfind("digraph", 0) == 0);
  auto file = (ws.dir / "net.dot").string();
  CHECK(ws.run({"export-dot", "-o", file}).code == 0);
  CHECK(read_text_file(file) == dot.out);
  CHECK(ws.run({"export-dot", "--session", "s1"}).code == 1);

  auto an = Json::parse(ws.run({"--format", "structured", "analyze"}).out);
  CHECK(an["rules"]["never_firing"].empty());
  CHECK(an["rules"]["conflicts"].empty());
  CHECK(an["coherence"].empty());
}
