#include "methlib/condition.hpp"

#include <algorithm>

#include "dsl_lexer.hpp"
#include "methlib/error.hpp"
#include "methlib/model.hpp"
#include "methlib/text.hpp"

namespace methlib {

std::string_view truth_name(Truth t) {
  switch (t) {
    case Truth::True: return "true";
    case Truth::False: return "false";
    case Truth::Unknown: return "unknown";
  }
  return "?";
}

Truth kleene_and(Truth a, Truth b) {
  if (a == Truth::False || b == Truth::False) return Truth::False;
  if (a == Truth::True && b == Truth::True) return Truth::True;
  return Truth::Unknown;
}

Truth kleene_or(Truth a, Truth b) {
  if (a == Truth::True || b == Truth::True) return Truth::True;
  if (a == Truth::False && b == Truth::False) return Truth::False;
  return Truth::Unknown;
}

Truth kleene_not(Truth a) {
  if (a == Truth::Unknown) return a;
  return a == Truth::True ? Truth::False : Truth::True;
}

Condition make_true() { return {ConstTrue{}}; }
Condition make_factor_eq(std::string factor, std::string value) {
  return {FactorAtom{std::move(factor), false, {std::move(value)}}};
}
Condition make_factor_in(std::string factor, std::vector<std::string> values) {
  return {FactorAtom{std::move(factor), true, std::move(values)}};
}
Condition make_selected(std::string target) { return {SelectedAtom{std::move(target)}}; }
Condition make_property_eq(std::string property, std::string value) {
  return {PropertyAtom{std::move(property), std::move(value)}};
}
Condition make_and(Condition lhs, Condition rhs) { return {AndCondition{std::move(lhs), std::move(rhs)}}; }
Condition make_or(Condition lhs, Condition rhs) { return {OrCondition{std::move(lhs), std::move(rhs)}}; }
Condition make_not(Condition operand) { return {NotCondition{std::move(operand)}}; }

namespace {

class ConditionParser {
 public:
  ConditionParser(std::string_view src, const Library* schema) : ts_(src), schema_(schema) {}

  Condition run() {
    auto c = expr();
    ts_.expect_end();
    return c;
  }

 private:
  Condition expr() {
    auto lhs = term();
    while (ts_.accept_word("or")) lhs = make_or(std::move(lhs), term());
    return lhs;
  }

  Condition term() {
    auto lhs = unary();
    while (ts_.accept_word("and")) lhs = make_and(std::move(lhs), unary());
    return lhs;
  }

  Condition unary() {
    if (ts_.accept_word("not")) return make_not(unary());
    return atom();
  }

  Condition atom() {
    if (ts_.accept_word("true")) return make_true();
    if (ts_.accept(dsl::Tok::LParen)) {
      auto inner = expr();
      ts_.expect(dsl::Tok::RParen, "')'");
      return inner;
    }
    if (ts_.accept_word("factor")) return factor_atom();
    if (ts_.accept_word("selected")) {
      ts_.expect(dsl::Tok::LParen, "'('");
      auto target = ts_.expect(dsl::Tok::String, "string");
      ts_.expect(dsl::Tok::RParen, "')'");
      return make_selected(target.text);
    }
    if (ts_.accept_word("prop")) return property_atom();
    const auto& t = ts_.peek();
    dsl::fail(ErrorCode::SyntaxError, ts_.source(), t.offset,
              "expected condition, found " + std::string(dsl::describe(t.kind)) +
                  (t.kind == dsl::Tok::Word ? " '" + t.text + "'" : ""));
  }

  dsl::Token identifier() {
    auto t = ts_.expect(dsl::Tok::Word, "identifier");
    if (!text::is_identifier(t.text)) {
      dsl::fail(ErrorCode::SyntaxError, ts_.source(), t.offset, "'" + t.text + "' is not an identifier");
    }
    return t;
  }

  Condition factor_atom() {
    ts_.expect(dsl::Tok::LParen, "'('");
    auto id = identifier();
    ts_.expect(dsl::Tok::RParen, "')'");

    const SituationalFactorDef* def = nullptr;
    if (schema_) {
      auto it = schema_->factors.find(id.text);
      if (it == schema_->factors.end()) {
        dsl::fail(ErrorCode::UnknownFactor, ts_.source(), id.offset, "unknown factor '" + id.text + "'");
      }
      def = &it->second;
    }
    auto literal = [&] {
      auto v = ts_.expect(dsl::Tok::String, "string");
      if (def && !def->admits(v.text)) {
        dsl::fail(ErrorCode::OutOfDomain, ts_.source(), v.offset,
                  "'" + v.text + "' is not a value of factor '" + id.text + "'");
      }
      return v.text;
    };

    if (ts_.accept(dsl::Tok::Equals)) return make_factor_eq(id.text, literal());
    if (ts_.accept_word("in")) {
      ts_.expect(dsl::Tok::LBrace, "'{'");
      std::vector<std::string> values{literal()};
      while (ts_.accept(dsl::Tok::Comma)) values.push_back(literal());
      ts_.expect(dsl::Tok::RBrace, "'}'");
      return make_factor_in(id.text, std::move(values));
    }
    dsl::fail(ErrorCode::SyntaxError, ts_.source(), ts_.peek().offset, "expected '=' or 'in'");
  }

  Condition property_atom() {
    ts_.expect(dsl::Tok::LParen, "'('");
    auto id = identifier();
    ts_.expect(dsl::Tok::RParen, "')'");
    ts_.expect(dsl::Tok::Equals, "'='");
    auto v = ts_.expect(dsl::Tok::String, "string");
    if (schema_) {
      auto it = schema_->properties.find(id.text);
      if (it == schema_->properties.end()) {
        dsl::fail(ErrorCode::UnknownProperty, ts_.source(), id.offset, "unknown property '" + id.text + "'");
      }
      if (!it->second.admits(v.text)) {
        dsl::fail(ErrorCode::OutOfDomain, ts_.source(), v.offset,
                  "'" + v.text + "' is not a value of property '" + id.text + "'");
      }
    }
    return make_property_eq(id.text, v.text);
  }

  dsl::TokenStream ts_;
  const Library* schema_;
};

constexpr int kOrLevel = 1;
constexpr int kAndLevel = 2;
constexpr int kUnaryLevel = 3;

void print_at(const Condition& c, int min_level, std::string& out);

struct Printer {
  std::string& out;

  int operator()(const ConstTrue&) const {
    out += "true";
    return kUnaryLevel;
  }
  int operator()(const FactorAtom& a) const {
    out += "factor(" + a.factor + ")";
    if (!a.in_set) {
      out += " = " + text::quote(a.values.empty() ? std::string() : a.values.front());
      return kUnaryLevel;
    }
    out += " in {";
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      if (i) out += ", ";
      out += text::quote(a.values[i]);
    }
    out += "}";
    return kUnaryLevel;
  }
  int operator()(const SelectedAtom& a) const {
    out += "selected(" + text::quote(a.target) + ")";
    return kUnaryLevel;
  }
  int operator()(const PropertyAtom& a) const {
    out += "prop(" + a.property + ") = " + text::quote(a.value);
    return kUnaryLevel;
  }
  int operator()(const AndCondition& a) const {
    print_at(*a.lhs, kAndLevel, out);
    out += " and ";
    print_at(*a.rhs, kUnaryLevel, out);
    return kAndLevel;
  }
  int operator()(const OrCondition& a) const {
    print_at(*a.lhs, kOrLevel, out);
    out += " or ";
    print_at(*a.rhs, kAndLevel, out);
    return kOrLevel;
  }
  int operator()(const NotCondition& a) const {
    out += "not ";
    print_at(*a.operand, kUnaryLevel, out);
    return kUnaryLevel;
  }
};

int level_of(const Condition& c) {
  if (std::holds_alternative<OrCondition>(c.node)) return kOrLevel;
  if (std::holds_alternative<AndCondition>(c.node)) return kAndLevel;
  return kUnaryLevel;
}

void print_at(const Condition& c, int min_level, std::string& out) {
  bool wrap = level_of(c) < min_level;
  if (wrap) out += "(";
  std::visit(Printer{out}, c.node);
  if (wrap) out += ")";
}

template <typename Fn>
void walk(const Condition& c, Fn&& fn) {
  fn(c);
  if (auto* a = std::get_if<AndCondition>(&c.node)) {
    walk(*a->lhs, fn);
    walk(*a->rhs, fn);
  } else if (auto* o = std::get_if<OrCondition>(&c.node)) {
    walk(*o->lhs, fn);
    walk(*o->rhs, fn);
  } else if (auto* n = std::get_if<NotCondition>(&c.node)) {
    walk(*n->operand, fn);
  }
}

}  // namespace

Condition parse_condition(std::string_view text) { return ConditionParser(text, nullptr).run(); }

Condition parse_condition(std::string_view text, const Library& lib) {
  return ConditionParser(text, &lib).run();
}

std::string print_condition(const Condition& c) {
  std::string out;
  print_at(c, kOrLevel, out);
  return out;
}

std::vector<Violation> check_condition(const Condition& c, const Library& lib, const std::string& subject) {
  std::vector<Violation> out;
  walk(c, [&](const Condition& node) {
    if (auto* f = std::get_if<FactorAtom>(&node.node)) {
      auto it = lib.factors.find(f->factor);
      if (it == lib.factors.end()) {
        out.push_back({ViolationKind::DanglingReference, subject, "unknown factor '" + f->factor + "'"});
        return;
      }
      if (f->values.empty() || (!f->in_set && f->values.size() != 1)) {
        out.push_back({ViolationKind::Invalid, subject, "malformed factor atom on '" + f->factor + "'"});
      }
      for (const auto& v : f->values) {
        if (!it->second.admits(v)) {
          out.push_back({ViolationKind::DomainViolation, subject,
                         "'" + v + "' is not a value of factor '" + f->factor + "'"});
        }
      }
    } else if (auto* p = std::get_if<PropertyAtom>(&node.node)) {
      auto it = lib.properties.find(p->property);
      if (it == lib.properties.end()) {
        out.push_back({ViolationKind::DanglingReference, subject, "unknown property '" + p->property + "'"});
      } else if (!it->second.admits(p->value)) {
        out.push_back({ViolationKind::DomainViolation, subject,
                       "'" + p->value + "' is not a value of property '" + p->property + "'"});
      }
    } else if (auto* s = std::get_if<SelectedAtom>(&node.node)) {
      if (resolve_selection_target(lib, s->target).empty()) {
        out.push_back({ViolationKind::DanglingReference, subject,
                       "selected(\"" + s->target + "\") matches no component"});
      }
    }
  });
  return out;
}

namespace {

struct Evaluator {
  const TruthContext& ctx;
  const Library& lib;
  const MethodComponent* candidate;

  Truth operator()(const ConstTrue&) const { return Truth::True; }

  Truth operator()(const FactorAtom& a) const {
    if (!lib.factors.count(a.factor)) {
      throw Error(ErrorCode::DanglingReference, "condition references unknown factor '" + a.factor + "'");
    }
    auto it = ctx.situation.find(a.factor);
    if (it == ctx.situation.end()) return Truth::Unknown;
    bool hit = std::find(a.values.begin(), a.values.end(), it->second) != a.values.end();
    return hit ? Truth::True : Truth::False;
  }

  Truth operator()(const SelectedAtom& a) const {
    for (const auto& id : resolve_selection_target(lib, a.target)) {
      if (ctx.selection.count(id)) return Truth::True;
    }
    return Truth::False;
  }

  Truth operator()(const PropertyAtom& a) const {
    if (!lib.properties.count(a.property)) {
      throw Error(ErrorCode::DanglingReference, "condition references unknown property '" + a.property + "'");
    }
    if (!candidate) return Truth::Unknown;
    auto it = candidate->properties.find(a.property);
    if (it == candidate->properties.end()) return Truth::False;
    bool hit = std::find(it->second.begin(), it->second.end(), a.value) != it->second.end();
    return hit ? Truth::True : Truth::False;
  }

  Truth operator()(const AndCondition& a) const {
    return kleene_and(std::visit(*this, a.lhs->node), std::visit(*this, a.rhs->node));
  }
  Truth operator()(const OrCondition& a) const {
    return kleene_or(std::visit(*this, a.lhs->node), std::visit(*this, a.rhs->node));
  }
  Truth operator()(const NotCondition& a) const { return kleene_not(std::visit(*this, a.operand->node)); }
};

}  // namespace

Truth eval_condition(const Condition& c, const TruthContext& ctx, const Library& lib,
                     const MethodComponent* candidate) {
  return std::visit(Evaluator{ctx, lib, candidate}, c.node);
}

std::set<std::string> referenced_factors(const Condition& c) {
  std::set<std::string> out;
  walk(c, [&](const Condition& n) {
    if (auto* f = std::get_if<FactorAtom>(&n.node)) out.insert(f->factor);
  });
  return out;
}

std::set<std::string> referenced_selections(const Condition& c) {
  std::set<std::string> out;
  walk(c, [&](const Condition& n) {
    if (auto* s = std::get_if<SelectedAtom>(&n.node)) out.insert(s->target);
  });
  return out;
}

bool has_selected_atom(const Condition& c) { return !referenced_selections(c).empty(); }

}  // namespace methlib
