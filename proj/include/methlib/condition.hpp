#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "methlib/box.hpp"
#include "methlib/violation.hpp"

namespace methlib {

struct Library;
struct MethodComponent;

/// Strong Kleene truth values. Partial situations leave factors unknown.
enum class Truth { False, True, Unknown };

std::string_view truth_name(Truth t);

Truth kleene_and(Truth a, Truth b);
Truth kleene_or(Truth a, Truth b);
Truth kleene_not(Truth a);

struct Condition;

struct ConstTrue {
  bool operator==(const ConstTrue&) const = default;
};

/// factor(id) = "v"  or  factor(id) in {"a", "b"}
struct FactorAtom {
  std::string factor;
  bool in_set = false;
  std::vector<std::string> values;  // exactly one value unless in_set

  bool operator==(const FactorAtom&) const = default;
};

/// selected("x"): some selected component has id x or normalized name x.
struct SelectedAtom {
  std::string target;
  bool operator==(const SelectedAtom&) const = default;
};

/// prop(id) = "v", evaluated against the heuristic's candidate component.
struct PropertyAtom {
  std::string property;
  std::string value;
  bool operator==(const PropertyAtom&) const = default;
};

struct AndCondition {
  Box<Condition> lhs;
  Box<Condition> rhs;
  bool operator==(const AndCondition&) const = default;
};

struct OrCondition {
  Box<Condition> lhs;
  Box<Condition> rhs;
  bool operator==(const OrCondition&) const = default;
};

struct NotCondition {
  Box<Condition> operand;
  bool operator==(const NotCondition&) const = default;
};

struct Condition {
  using Node = std::variant<ConstTrue, FactorAtom, SelectedAtom, PropertyAtom, AndCondition,
                            OrCondition, NotCondition>;
  Node node;

  bool operator==(const Condition&) const = default;
};

Condition make_true();
Condition make_factor_eq(std::string factor, std::string value);
Condition make_factor_in(std::string factor, std::vector<std::string> values);
Condition make_selected(std::string target);
Condition make_property_eq(std::string property, std::string value);
Condition make_and(Condition lhs, Condition rhs);
Condition make_or(Condition lhs, Condition rhs);
Condition make_not(Condition operand);

/// Syntax only. Throws Error(SyntaxError) with the offending offset.
Condition parse_condition(std::string_view text);

/// Syntax plus schema: factor and property references must exist and
/// literals must lie in closed domains.
Condition parse_condition(std::string_view text, const Library& lib);

/// Canonical text; parse_condition(print_condition(c)) == c.
std::string print_condition(const Condition& c);

/// Schema problems in an already-parsed condition; `subject` names the owner.
std::vector<Violation> check_condition(const Condition& c, const Library& lib,
                                       const std::string& subject);

struct TruthContext {
  std::map<std::string, std::string> situation;  // factor id -> value
  std::set<std::string> selection;               // component ids
};

/// Three-valued evaluation. `candidate` scopes prop() atoms; without one
/// they are unknown. Throws Error(DanglingReference) when the condition
/// names a factor or property the library no longer has.
Truth eval_condition(const Condition& c, const TruthContext& ctx, const Library& lib,
                     const MethodComponent* candidate = nullptr);

/// Factor ids referenced anywhere in the condition.
std::set<std::string> referenced_factors(const Condition& c);
/// Targets of selected() atoms.
std::set<std::string> referenced_selections(const Condition& c);
bool has_selected_atom(const Condition& c);

}  // namespace methlib
