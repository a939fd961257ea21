#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "methlib/box.hpp"
#include "methlib/model.hpp"

namespace methlib {

struct Query;

struct MatchAll {
  bool operator==(const MatchAll&) const = default;
};
struct KindIs {
  ComponentKind kind;
  bool operator==(const KindIs&) const = default;
};
/// Case-insensitive substring of the component name.
struct NameContains {
  std::string text;
  bool operator==(const NameContains&) const = default;
};
/// Case-insensitive substring of the source citation.
struct SourceContains {
  std::string text;
  bool operator==(const SourceContains&) const = default;
};
struct HasProperty {
  std::string property;
  bool operator==(const HasProperty&) const = default;
};
struct PropertyEquals {
  std::string property;
  std::string value;
  bool operator==(const PropertyEquals&) const = default;
};
struct QueryAnd {
  Box<Query> lhs;
  Box<Query> rhs;
  bool operator==(const QueryAnd&) const = default;
};
struct QueryOr {
  Box<Query> lhs;
  Box<Query> rhs;
  bool operator==(const QueryOr&) const = default;
};
struct QueryNot {
  Box<Query> operand;
  bool operator==(const QueryNot&) const = default;
};

struct Query {
  using Node = std::variant<MatchAll, KindIs, NameContains, SourceContains, HasProperty, PropertyEquals,
                            QueryAnd, QueryOr, QueryNot>;
  Node node;

  bool operator==(const Query&) const = default;
};

Query query_and(Query a, Query b);
Query query_or(Query a, Query b);
Query query_not(Query a);

/// Grammar:
///   expr  := term ("or" term)*      term := unary ("and" unary)*
///   unary := "not" unary | atom
///   atom  := "all" | "kind" "=" WORD | "name" "~" STRING | "source" "~" STRING
///          | "prop" "(" IDENT ")" ["=" STRING] | "(" expr ")"
Query parse_query(std::string_view text);
/// Also checks property references and closed-domain literals.
Query parse_query(std::string_view text, const Library& lib);

std::string print_query(const Query& q);

/// Denotation of `q` on one component.
bool matches(const Query& q, const MethodComponent& c);

/// Ids of the matching components ordered by name, then id.
std::vector<std::string> eval_query(const Library& lib, const Query& q);

}  // namespace methlib
