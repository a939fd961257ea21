#include <doctest.h>

#include <functional>
#include <set>

#include "methlib/error.hpp"
#include "methlib/heuristics.hpp"
#include "methlib/ingest.hpp"
#include "methlib/model.hpp"
#include "methlib/navigate.hpp"
#include "support/gen.hpp"

using namespace methlib;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;  // sentinel: nothing thrown
}

bool has_violation(const Library& lib, ViolationKind kind) {
  for (const auto& v : validate(lib)) {
    if (v.kind == kind) return true;
  }
  return false;
}

Library base() {
  Library lib;
  add_property(lib, {"system_aspect", "aspect of the system to model", "", std::vector<std::string>{"what", "how"},
                     Json::object()});
  add_factor(lib, {"data_complexity", "data complexity", "", {"low", "high"}, {}, Json::object()});
  ensure_librarian_document(lib);
  return lib;
}

}  // namespace

TEST_CASE("model: kind names") {
  for (auto k : kAllKinds) CHECK(parse_kind(kind_name(k)) == k);
  CHECK(parse_kind("PRINCIPLE") == ComponentKind::Principle);
  CHECK_FALSE(parse_kind("gadget").has_value());
}

TEST_CASE("model: add_component") {
  auto lib = base();
  auto id = add_component(lib, {ComponentKind::Product, "job model", "d", {}, "", {{"system_aspect", {"how", "what", "how"}}}});
  CHECK(id == "c1");
  const auto& c = get_component(lib, id);
  CHECK(c.document == kLibrarianDocument);
  CHECK(c.properties.at("system_aspect") == std::vector<std::string>{"how", "what"});
  CHECK(add_component(lib, {ComponentKind::Product, "object model", "", {}, "", {}}) == "c2");

  CHECK(code_of([&] { add_component(lib, {ComponentKind::Product, "  ", "", {}, "", {}}); }) == ErrorCode::EmptyName);
  CHECK(code_of([&] { add_component(lib, {ComponentKind::Product, "x", "", {}, "", {{"colour", {"red"}}}}); }) ==
        ErrorCode::UnknownProperty);
  CHECK(code_of([&] { add_component(lib, {ComponentKind::Product, "x", "", {}, "", {{"system_aspect", {"why"}}}}); }) ==
        ErrorCode::OutOfDomain);
  CHECK(code_of([&] { add_component(lib, {ComponentKind::Product, "x", "", {}, "nodoc", {}}); }) == ErrorCode::UnknownId);
  CHECK(lib.components.size() == 2);
  CHECK(validate(lib).empty());
}

TEST_CASE("model: screening gate on components") {
  auto lib = base();
  add_document(lib, {"book", "A book", DocumentKind::Book, "cite", std::nullopt, Json::object()});
  CHECK(code_of([&] { add_component(lib, {ComponentKind::Tool, "x", "", {}, "book", {}}); }) ==
        ErrorCode::UnscreenedDocument);
  CriterionAnswer yes{true, {}}, no{false, {}};
  screen_document(lib, "book", {yes, no, yes, yes});
  CHECK(code_of([&] { add_component(lib, {ComponentKind::Tool, "x", "", {}, "book", {}}); }) ==
        ErrorCode::RejectedDocument);
  screen_document(lib, "book", {yes, yes, yes, yes});
  CHECK_NOTHROW(add_component(lib, {ComponentKind::Tool, "x", "", {}, "book", {}}));

  // a document that loses its acceptance shows up in validation
  lib.documents.at("book").screening->decision = Decision::Reject;
  CHECK(has_violation(lib, ViolationKind::Invalid));
}

TEST_CASE("model: generated drafts get distinct ids") {
  gen::Rng rng(100);
  auto lib = base();
  std::vector<std::string> reference;
  for (int i = 0; i < 100; ++i) {
    auto id = add_component(lib, {ComponentKind::Tool, gen::component_name(rng), "", {}, "", {}});
    reference.push_back(id);
  }
  std::set<std::string> distinct(reference.begin(), reference.end());
  CHECK(distinct.size() == 100);
  CHECK(lib.components.size() == 100);
  for (const auto& id : reference) CHECK(lib.components.count(id) == 1);
}

TEST_CASE("model: add_relation") {
  auto lib = base();
  auto a = add_component(lib, {ComponentKind::Product, "a", "", {}, "", {}});
  auto b = add_component(lib, {ComponentKind::Product, "b", "", {}, "", {}});
  CHECK(add_relation(lib, a, b, "contains") == "r1");
  CHECK(code_of([&] { add_relation(lib, a, b, "contains"); }) == ErrorCode::DuplicateRelation);
  CHECK_NOTHROW(add_relation(lib, a, b, "uses"));
  CHECK_NOTHROW(add_relation(lib, b, a, "contains"));
  CHECK(code_of([&] { add_relation(lib, a, a, "uses"); }) == ErrorCode::SelfLoop);
  CHECK(code_of([&] { add_relation(lib, a, "c99", "uses"); }) == ErrorCode::UnknownId);
  CHECK(code_of([&] { add_relation(lib, a, b, " "); }) == ErrorCode::EmptyName);
  CHECK(lib.relations.size() == 3);
  CHECK(validate(lib).empty());
}

TEST_CASE("model: definitions") {
  auto lib = base();
  CHECK(code_of([&] { add_factor(lib, {"Bad Id", "n", "", {"a"}, {}, Json::object()}); }) == ErrorCode::InvalidDefinition);
  CHECK(code_of([&] { add_factor(lib, {"data_complexity", "n", "", {"a"}, {}, Json::object()}); }) == ErrorCode::DuplicateId);
  CHECK(code_of([&] { add_factor(lib, {"f", "n", "", {}, {}, Json::object()}); }) == ErrorCode::InvalidDefinition);
  CHECK(code_of([&] { add_factor(lib, {"f", "n", "", {"a", "a"}, {}, Json::object()}); }) == ErrorCode::InvalidDefinition);
  CHECK(code_of([&] { add_property(lib, {"p", "", "", std::nullopt, Json::object()}); }) == ErrorCode::EmptyName);
  CHECK_NOTHROW(add_property(lib, {"notes", "notes", "", std::nullopt, Json::object()}));
}

TEST_CASE("model: situations") {
  auto lib = base();
  CHECK_NOTHROW(check_situation(lib, {{"data_complexity", "high"}}));
  CHECK(code_of([&] { check_situation(lib, {{"budget", "high"}}); }) == ErrorCode::InvalidSituation);
  CHECK(code_of([&] { check_situation(lib, {{"data_complexity", "extreme"}}); }) == ErrorCode::InvalidSituation);
}

TEST_CASE("model: remove_component refuses while referenced") {
  auto lib = base();
  auto a = add_component(lib, {ComponentKind::Activity, "participatory approach", "", {}, "", {}});
  auto b = add_component(lib, {ComponentKind::Actor, "socially skillful team", "", {}, "", {}});
  auto c = add_component(lib, {ComponentKind::Tool, "loner", "", {}, "", {}});
  add_relation(lib, a, b, "needs");
  Heuristic h;
  h.condition = parse_condition("selected(\"participatory approach\")");
  h.consequent = b;
  add_heuristic(lib, h);

  CHECK(code_of([&] { remove_component(lib, a, false); }) == ErrorCode::DanglingReference);
  CHECK(code_of([&] { remove_component(lib, b, false); }) == ErrorCode::DanglingReference);
  CHECK(code_of([&] { remove_component(lib, "c42", false); }) == ErrorCode::UnknownId);
  CHECK_NOTHROW(remove_component(lib, c, false));
  CHECK(validate(lib).empty());

  remove_component(lib, a, true);
  CHECK(lib.relations.empty());
  CHECK(lib.heuristics.empty());
  CHECK(validate(lib).empty());
}

TEST_CASE("model: validate reports tampering") {
  auto lib = base();
  auto a = add_component(lib, {ComponentKind::Product, "a", "", {}, "", {}});
  auto b = add_component(lib, {ComponentKind::Product, "b", "", {}, "", {}});
  auto r = add_relation(lib, a, b, "uses");
  REQUIRE(validate(lib).empty());

  SUBCASE("dangling endpoint") {
    lib.components.erase(b);
    std::size_t expected = 0;
    for (const auto& [rid, rel] : lib.relations) {
      expected += !lib.components.count(rel.from);
      expected += !lib.components.count(rel.to);
    }
    std::size_t got = 0;
    for (const auto& v : validate(lib)) got += v.kind == ViolationKind::DanglingReference;
    CHECK(expected == 1);
    CHECK(got == expected);
    (void)r;
  }
  SUBCASE("duplicate triple") {
    auto copy = lib.relations.at(r);
    copy.id = "r9";
    lib.relations.emplace("r9", copy);
    CHECK(has_violation(lib, ViolationKind::Duplicate));
  }
  SUBCASE("property value outside domain") {
    lib.components.at(a).properties["system_aspect"] = {"when"};
    CHECK(has_violation(lib, ViolationKind::DomainViolation));
  }
  SUBCASE("heuristic with unknown factor") {
    Heuristic h;
    h.id = "h1";
    h.condition = make_factor_eq("budget", "high");
    h.consequent = a;
    lib.heuristics.emplace("h1", h);
    CHECK(has_violation(lib, ViolationKind::DanglingReference));
    CHECK(code_of([&] { require_valid(lib); }) == ErrorCode::InvalidLibrary);
  }
  SUBCASE("key mismatch") {
    lib.components.at(b).id = "c5";
    CHECK(has_violation(lib, ViolationKind::Invalid));
  }
}

TEST_CASE("model: find_by_name and selection targets") {
  auto lib = base();
  auto a = add_component(lib, {ComponentKind::Product, "Job  Model", "", {}, "", {}});
  CHECK(find_by_name(lib, "job model") == std::vector<std::string>{a});
  CHECK(resolve_selection_target(lib, a) == std::vector<std::string>{a});
  CHECK(resolve_selection_target(lib, " JOB model ") == std::vector<std::string>{a});
  CHECK(resolve_selection_target(lib, "nothing").empty());
}

TEST_CASE("model: random libraries built through the API are valid") {
  gen::Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    auto lib = gen::library(rng);
    auto v = validate(lib);
    CHECK_MESSAGE(v.empty(), (v.empty() ? std::string() : v.front().subject + ": " + v.front().detail));
  }
}
