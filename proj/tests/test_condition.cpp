#include <doctest.h>

#include <functional>
#include <set>

#include "methlib/condition.hpp"
#include "methlib/error.hpp"
#include "methlib/model.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace methlib;

namespace {

Library schema_lib() {
  Library lib;
  add_factor(lib, {"data_complexity", "data complexity", "", {"low", "medium", "high"}, {}, Json::object()});
  add_factor(lib, {"team_size", "team size", "", {"small", "large"}, {}, Json::object()});
  add_property(lib, {"system_aspect", "aspect", "", std::vector<std::string>{"what", "how"}, Json::object()});
  add_property(lib, {"notes", "notes", "", std::nullopt, Json::object()});
  ensure_librarian_document(lib);
  add_component(lib, {ComponentKind::Activity, "participatory approach", "", {}, "", {}});
  add_component(lib, {ComponentKind::Actor, "socially skillful team", "", {}, "", {{"system_aspect", {"how"}}}});
  return lib;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

Position position_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    REQUIRE(e.position().has_value());
    return *e.position();
  }
  FAIL("expected an error");
  return {};
}

// Set-based recognizer for the condition grammar over space-separated
// tokens: returns every position at which a phrase starting at i can end.
struct Recognizer {
  std::vector<std::string> t;

  bool is(std::size_t i, const char* s) const { return i < t.size() && t[i] == s; }
  bool str(std::size_t i) const { return i < t.size() && t[i].size() >= 2 && t[i].front() == '"'; }
  bool ident(std::size_t i) const {
    static const std::set<std::string> punct = {"(", ")", "{", "}", ",", "="};
    return i < t.size() && !str(i) && !punct.count(t[i]);
  }

  std::set<std::size_t> atom(std::size_t i) const {
    std::set<std::size_t> out;
    if (is(i, "true")) out.insert(i + 1);
    if (is(i, "(")) {
      for (auto e : expr(i + 1)) {
        if (is(e, ")")) out.insert(e + 1);
      }
    }
    if (is(i, "selected") && is(i + 1, "(") && str(i + 2) && is(i + 3, ")")) out.insert(i + 4);
    if ((is(i, "factor") || is(i, "prop")) && is(i + 1, "(") && ident(i + 2) && is(i + 3, ")")) {
      if (is(i + 4, "=") && str(i + 5)) out.insert(i + 6);
      if (is(i, "factor") && is(i + 4, "in") && is(i + 5, "{") && str(i + 6)) {
        std::size_t j = i + 7;
        while (is(j, ",") && str(j + 1)) j += 2;
        if (is(j, "}")) out.insert(j + 1);
      }
    }
    return out;
  }

  std::set<std::size_t> unary(std::size_t i) const {
    auto out = atom(i);
    if (is(i, "not")) {
      for (auto e : unary(i + 1)) out.insert(e);
    }
    return out;
  }

  std::set<std::size_t> chain(std::size_t i, const char* op,
                              const std::function<std::set<std::size_t>(std::size_t)>& part) const {
    std::set<std::size_t> out, frontier = part(i);
    while (!frontier.empty()) {
      std::set<std::size_t> next;
      for (auto e : frontier) {
        if (!out.insert(e).second) continue;
        if (is(e, op)) {
          for (auto f : part(e + 1)) next.insert(f);
        }
      }
      frontier = std::move(next);
    }
    return out;
  }

  std::set<std::size_t> term(std::size_t i) const {
    return chain(i, "and", [this](std::size_t k) { return unary(k); });
  }
  std::set<std::size_t> expr(std::size_t i) const {
    return chain(i, "or", [this](std::size_t k) { return term(k); });
  }
  bool accepts() const { return expr(0).count(t.size()) != 0; }
};

}  // namespace

TEST_CASE("condition: parse of the paper rules") {
  auto c = parse_condition("factor(data_complexity) = \"high\"");
  CHECK(c == make_factor_eq("data_complexity", "high"));
  CHECK(parse_condition("selected(\"participatory approach\")") == make_selected("participatory approach"));
  CHECK(parse_condition("factor(team_size) in {\"small\", \"large\"}") ==
        make_factor_in("team_size", {"small", "large"}));
  CHECK(parse_condition("prop(system_aspect) = \"how\"") == make_property_eq("system_aspect", "how"));
  CHECK(parse_condition("  true  ") == make_true());
}

TEST_CASE("condition: precedence and associativity") {
  auto a = make_selected("a"), b = make_selected("b"), c = make_selected("c");
  CHECK(parse_condition("selected(\"a\") or selected(\"b\") and selected(\"c\")") == make_or(a, make_and(b, c)));
  CHECK(parse_condition("selected(\"a\") and selected(\"b\") and selected(\"c\")") == make_and(make_and(a, b), c));
  CHECK(parse_condition("not selected(\"a\") and selected(\"b\")") == make_and(make_not(a), b));
  CHECK(parse_condition("not (selected(\"a\") and selected(\"b\"))") == make_not(make_and(a, b)));
  CHECK(print_condition(make_and(a, make_and(b, c))) == "selected(\"a\") and (selected(\"b\") and selected(\"c\"))");
  CHECK(print_condition(make_and(make_and(a, b), c)) == "selected(\"a\") and selected(\"b\") and selected(\"c\")");
}

TEST_CASE("condition: syntax errors carry positions") {
  CHECK(code_of([] { parse_condition(""); }) == ErrorCode::SyntaxError);
  CHECK(position_of([] { parse_condition("true and"); }).offset == 8);
  CHECK(position_of([] { parse_condition("true )"); }).offset == 5);
  CHECK(position_of([] { parse_condition("factor(x) = high"); }).offset == 12);
  auto p = position_of([] { parse_condition("true and\n  selected(\"x\" )x"); });
  CHECK(p.line == 2);
  CHECK(p.column == 17);
  CHECK(code_of([] { parse_condition("factor(x) in {}"); }) == ErrorCode::SyntaxError);
  CHECK(code_of([] { parse_condition("selected(\"unterminated)"); }) == ErrorCode::SyntaxError);
  CHECK(code_of([] { parse_condition("factor(Bad) = \"v\""); }) == ErrorCode::SyntaxError);
}

TEST_CASE("condition: schema-checked parse") {
  auto lib = schema_lib();
  CHECK_NOTHROW(parse_condition("factor(data_complexity) = \"high\"", lib));
  CHECK(code_of([&] { parse_condition("factor(budget) = \"high\"", lib); }) == ErrorCode::UnknownFactor);
  CHECK(position_of([&] { parse_condition("true and factor(budget) = \"high\"", lib); }).offset == 16);
  CHECK(code_of([&] { parse_condition("factor(data_complexity) = \"extreme\"", lib); }) == ErrorCode::OutOfDomain);
  CHECK(code_of([&] { parse_condition("prop(colour) = \"red\"", lib); }) == ErrorCode::UnknownProperty);
  CHECK(code_of([&] { parse_condition("prop(system_aspect) = \"why\"", lib); }) == ErrorCode::OutOfDomain);
  CHECK_NOTHROW(parse_condition("prop(notes) = \"anything\"", lib));
}

TEST_CASE("condition: grammar enumeration up to four tokens") {
  const std::vector<std::string> alphabet = {"true", "not", "and", "or", "(", ")", "selected", "factor",
                                             "prop", "in", "=", "{", "}", ",", "\"a\"", "x"};
  std::size_t checked = 0, accepted = 0, mismatches = 0;
  std::function<void(std::vector<std::string>&)> walk = [&](std::vector<std::string>& toks) {
    if (!toks.empty()) {
      std::string text;
      for (const auto& t : toks) text += (text.empty() ? "" : " ") + t;
      bool ok = true;
      try {
        parse_condition(text);
      } catch (const Error& e) {
        ok = false;
        if (e.code() != ErrorCode::SyntaxError) ++mismatches;
      }
      bool expected = Recognizer{toks}.accepts();
      if (ok != expected) {
        ++mismatches;
        MESSAGE("mismatch on: " << text);
      }
      ++checked;
      accepted += ok;
    }
    if (toks.size() == 4) return;
    for (const auto& a : alphabet) {
      toks.push_back(a);
      walk(toks);
      toks.pop_back();
    }
  };
  std::vector<std::string> toks;
  walk(toks);
  CHECK(checked == 16 + 256 + 4096 + 65536);
  CHECK(accepted > 5);
  CHECK(mismatches == 0);
}

TEST_CASE("condition: print/parse round trip on generated ASTs") {
  gen::Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    auto c = gen::wild_condition(rng, 1 + i % 5);
    auto text = print_condition(c);
    Condition back;
    REQUIRE_NOTHROW(back = parse_condition(text));
    CHECK_MESSAGE(back == c, text);
    CHECK(print_condition(back) == text);
  }
}

TEST_CASE("condition: Kleene connectives") {
  const std::vector<Truth> all = {Truth::False, Truth::True, Truth::Unknown};
  for (auto a : all) {
    CHECK(kleene_not(kleene_not(a)) == a);
    for (auto b : all) {
      int na = oracle::to_num(a), nb = oracle::to_num(b);
      CHECK(kleene_and(a, b) == oracle::from_num(std::min(na, nb)));
      CHECK(kleene_or(a, b) == oracle::from_num(std::max(na, nb)));
      CHECK(kleene_and(a, b) == kleene_and(b, a));
      CHECK(kleene_not(kleene_and(a, b)) == kleene_or(kleene_not(a), kleene_not(b)));
    }
  }
}

TEST_CASE("condition: evaluation of the paper rules") {
  auto lib = schema_lib();
  auto h1 = parse_condition("factor(data_complexity) = \"high\"", lib);
  CHECK(eval_condition(h1, {{{"data_complexity", "high"}}, {}}, lib) == Truth::True);
  CHECK(eval_condition(h1, {{{"data_complexity", "low"}}, {}}, lib) == Truth::False);
  CHECK(eval_condition(h1, {}, lib) == Truth::Unknown);

  auto h2 = parse_condition("selected(\"participatory approach\")", lib);
  CHECK(eval_condition(h2, {{}, {"c1"}}, lib) == Truth::True);
  CHECK(eval_condition(h2, {}, lib) == Truth::False);
  CHECK(eval_condition(parse_condition("selected(\"c1\")"), {{}, {"c1"}}, lib) == Truth::True);
  CHECK(eval_condition(parse_condition("selected(\"  Participatory   APPROACH \")"), {{}, {"c1"}}, lib) == Truth::True);

  auto prop = parse_condition("prop(system_aspect) = \"how\"", lib);
  CHECK(eval_condition(prop, {}, lib) == Truth::Unknown);
  CHECK(eval_condition(prop, {}, lib, &lib.components.at("c2")) == Truth::True);
  CHECK(eval_condition(prop, {}, lib, &lib.components.at("c1")) == Truth::False);

  CHECK(eval_condition(make_or(h1, make_true()), {}, lib) == Truth::True);
  CHECK(eval_condition(make_and(h1, make_not(make_true())), {}, lib) == Truth::False);
}

TEST_CASE("condition: evaluation against a removed factor is a dangling reference") {
  auto lib = schema_lib();
  auto c = parse_condition("factor(data_complexity) = \"high\"", lib);
  lib.factors.erase("data_complexity");
  CHECK(code_of([&] { eval_condition(c, {}, lib); }) == ErrorCode::DanglingReference);
  CHECK_FALSE(check_condition(c, lib, "heuristic H1").empty());
}

TEST_CASE("condition: evaluator agrees with the reference on random instances") {
  gen::Rng rng(2024);
  std::size_t compared = 0;
  for (int inst = 0; inst < 200; ++inst) {
    auto lib = gen::library(rng, {60, 3, false});
    auto schema = gen::schema_of(lib);
    for (int k = 0; k < 10; ++k) {
      auto c = gen::condition(rng, schema, 4);
      TruthContext ctx;
      for (const auto& [id, f] : lib.factors) {
        if (gen::coin(rng)) ctx.situation[id] = gen::pick(rng, f.domain);
      }
      for (const auto& [id, comp] : lib.components) {
        if (gen::coin(rng, 0.2)) ctx.selection.insert(id);
      }
      const MethodComponent* cand = nullptr;
      if (!lib.components.empty() && gen::coin(rng, 0.7)) {
        auto it = lib.components.begin();
        std::advance(it, gen::below(rng, lib.components.size()));
        cand = &it->second;
      }
      auto got = eval_condition(c, ctx, lib, cand);
      CHECK_MESSAGE(got == oracle::eval(c, ctx, lib, cand), print_condition(c));
      ++compared;

      // soundness: a definite value survives every completion
      if (got != Truth::Unknown && cand) {
        std::vector<std::pair<std::string, std::vector<std::string>>> factors;
        for (const auto& [id, f] : lib.factors) factors.emplace_back(id, f.domain);
        for (const auto& full : oracle::completions(ctx.situation, factors)) {
          CHECK(eval_condition(c, {full, ctx.selection}, lib, cand) == got);
        }
      }
    }
  }
  CHECK(compared == 2000);
}

TEST_CASE("condition: Kleene monotonicity under situation extension") {
  gen::Rng rng(77);
  std::size_t violations = 0, definite = 0;
  for (int i = 0; i < 500; ++i) {
    auto lib = gen::library(rng, {12, 3, false});
    auto schema = gen::schema_of(lib);
    auto c = gen::condition(rng, schema, 4);
    TruthContext partial;
    for (const auto& [id, f] : lib.factors) {
      if (gen::coin(rng, 0.4)) partial.situation[id] = gen::pick(rng, f.domain);
    }
    TruthContext extended = partial;
    for (const auto& [id, f] : lib.factors) {
      if (!extended.situation.count(id) && gen::coin(rng)) extended.situation[id] = gen::pick(rng, f.domain);
    }
    auto before = eval_condition(c, partial, lib);
    auto after = eval_condition(c, extended, lib);
    if (before != Truth::Unknown) {
      ++definite;
      if (after != before) ++violations;
    }
  }
  CHECK(definite > 50);
  CHECK(violations == 0);
}

TEST_CASE("condition: referenced factors and selections") {
  auto c = parse_condition(
      "factor(a) = \"1\" and (selected(\"x\") or not factor(b) in {\"2\"}) or prop(p) = \"q\" and selected(\"y\")");
  CHECK(referenced_factors(c) == std::set<std::string>{"a", "b"});
  CHECK(referenced_selections(c) == std::set<std::string>{"x", "y"});
  CHECK(has_selected_atom(c));
  CHECK_FALSE(has_selected_atom(parse_condition("true")));
}
