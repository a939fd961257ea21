#include "methlib/query.hpp"

#include <algorithm>

#include "dsl_lexer.hpp"
#include "methlib/error.hpp"
#include "methlib/text.hpp"

namespace methlib {

Query query_and(Query a, Query b) { return {QueryAnd{std::move(a), std::move(b)}}; }
Query query_or(Query a, Query b) { return {QueryOr{std::move(a), std::move(b)}}; }
Query query_not(Query a) { return {QueryNot{std::move(a)}}; }

namespace {

class QueryParser {
 public:
  QueryParser(std::string_view src, const Library* schema) : ts_(src), schema_(schema) {}

  Query run() {
    auto q = expr();
    ts_.expect_end();
    return q;
  }

 private:
  Query expr() {
    auto lhs = term();
    while (ts_.accept_word("or")) lhs = query_or(std::move(lhs), term());
    return lhs;
  }

  Query term() {
    auto lhs = unary();
    while (ts_.accept_word("and")) lhs = query_and(std::move(lhs), unary());
    return lhs;
  }

  Query unary() {
    if (ts_.accept_word("not")) return query_not(unary());
    return atom();
  }

  Query atom() {
    if (ts_.accept_word("all")) return {MatchAll{}};
    if (ts_.accept(dsl::Tok::LParen)) {
      auto inner = expr();
      ts_.expect(dsl::Tok::RParen, "')'");
      return inner;
    }
    if (ts_.accept_word("kind")) {
      ts_.expect(dsl::Tok::Equals, "'='");
      auto w = ts_.expect(dsl::Tok::Word, "component kind");
      auto kind = parse_kind(w.text);
      if (!kind) dsl::fail(ErrorCode::SyntaxError, ts_.source(), w.offset, "unknown component kind '" + w.text + "'");
      return {KindIs{*kind}};
    }
    if (ts_.accept_word("name")) {
      ts_.expect(dsl::Tok::Tilde, "'~'");
      return {NameContains{ts_.expect(dsl::Tok::String, "string").text}};
    }
    if (ts_.accept_word("source")) {
      ts_.expect(dsl::Tok::Tilde, "'~'");
      return {SourceContains{ts_.expect(dsl::Tok::String, "string").text}};
    }
    if (ts_.accept_word("prop")) return property_atom();
    const auto& t = ts_.peek();
    dsl::fail(ErrorCode::SyntaxError, ts_.source(), t.offset,
              "expected query, found " + std::string(dsl::describe(t.kind)) +
                  (t.kind == dsl::Tok::Word ? " '" + t.text + "'" : ""));
  }

  Query property_atom() {
    ts_.expect(dsl::Tok::LParen, "'('");
    auto id = ts_.expect(dsl::Tok::Word, "identifier");
    if (!text::is_identifier(id.text)) {
      dsl::fail(ErrorCode::SyntaxError, ts_.source(), id.offset, "'" + id.text + "' is not an identifier");
    }
    ts_.expect(dsl::Tok::RParen, "')'");
    const PropertyDefinition* def = nullptr;
    if (schema_) {
      auto it = schema_->properties.find(id.text);
      if (it == schema_->properties.end()) {
        dsl::fail(ErrorCode::UnknownProperty, ts_.source(), id.offset, "unknown property '" + id.text + "'");
      }
      def = &it->second;
    }
    if (!ts_.accept(dsl::Tok::Equals)) return {HasProperty{id.text}};
    auto v = ts_.expect(dsl::Tok::String, "string");
    if (def && !def->admits(v.text)) {
      dsl::fail(ErrorCode::OutOfDomain, ts_.source(), v.offset,
                "'" + v.text + "' is not a value of property '" + id.text + "'");
    }
    return {PropertyEquals{id.text, v.text}};
  }

  dsl::TokenStream ts_;
  const Library* schema_;
};

constexpr int kOrLevel = 1;
constexpr int kAndLevel = 2;
constexpr int kUnaryLevel = 3;

int level_of(const Query& q) {
  if (std::holds_alternative<QueryOr>(q.node)) return kOrLevel;
  if (std::holds_alternative<QueryAnd>(q.node)) return kAndLevel;
  return kUnaryLevel;
}

void print_at(const Query& q, int min_level, std::string& out) {
  bool wrap = level_of(q) < min_level;
  if (wrap) out += "(";
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, MatchAll>) {
          out += "all";
        } else if constexpr (std::is_same_v<T, KindIs>) {
          out += "kind = ";
          out += kind_name(n.kind);
        } else if constexpr (std::is_same_v<T, NameContains>) {
          out += "name ~ " + text::quote(n.text);
        } else if constexpr (std::is_same_v<T, SourceContains>) {
          out += "source ~ " + text::quote(n.text);
        } else if constexpr (std::is_same_v<T, HasProperty>) {
          out += "prop(" + n.property + ")";
        } else if constexpr (std::is_same_v<T, PropertyEquals>) {
          out += "prop(" + n.property + ") = " + text::quote(n.value);
        } else if constexpr (std::is_same_v<T, QueryAnd>) {
          print_at(*n.lhs, kAndLevel, out);
          out += " and ";
          print_at(*n.rhs, kUnaryLevel, out);
        } else if constexpr (std::is_same_v<T, QueryOr>) {
          print_at(*n.lhs, kOrLevel, out);
          out += " or ";
          print_at(*n.rhs, kAndLevel, out);
        } else {
          out += "not ";
          print_at(*n.operand, kUnaryLevel, out);
        }
      },
      q.node);
  if (wrap) out += ")";
}

}  // namespace

Query parse_query(std::string_view text) { return QueryParser(text, nullptr).run(); }
Query parse_query(std::string_view text, const Library& lib) { return QueryParser(text, &lib).run(); }

std::string print_query(const Query& q) {
  std::string out;
  print_at(q, kOrLevel, out);
  return out;
}

bool matches(const Query& q, const MethodComponent& c) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, MatchAll>) {
          return true;
        } else if constexpr (std::is_same_v<T, KindIs>) {
          return c.kind == n.kind;
        } else if constexpr (std::is_same_v<T, NameContains>) {
          return text::contains_ci(c.name, n.text);
        } else if constexpr (std::is_same_v<T, SourceContains>) {
          return text::contains_ci(c.source.citation, n.text);
        } else if constexpr (std::is_same_v<T, HasProperty>) {
          return c.properties.count(n.property) != 0;
        } else if constexpr (std::is_same_v<T, PropertyEquals>) {
          auto it = c.properties.find(n.property);
          return it != c.properties.end() &&
                 std::find(it->second.begin(), it->second.end(), n.value) != it->second.end();
        } else if constexpr (std::is_same_v<T, QueryAnd>) {
          return matches(*n.lhs, c) && matches(*n.rhs, c);
        } else if constexpr (std::is_same_v<T, QueryOr>) {
          return matches(*n.lhs, c) || matches(*n.rhs, c);
        } else {
          return !matches(*n.operand, c);
        }
      },
      q.node);
}

std::vector<std::string> eval_query(const Library& lib, const Query& q) {
  require_valid(lib);
  std::vector<const MethodComponent*> hits;
  for (const auto& [id, c] : lib.components) {
    if (matches(q, c)) hits.push_back(&c);
  }
  std::sort(hits.begin(), hits.end(), [](const MethodComponent* a, const MethodComponent* b) {
    if (a->name != b->name) return a->name < b->name;
    return a->id < b->id;
  });
  std::vector<std::string> out;
  out.reserve(hits.size());
  for (const auto* c : hits) out.push_back(c->id);
  return out;
}

}  // namespace methlib
