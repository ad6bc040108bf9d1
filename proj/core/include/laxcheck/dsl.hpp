#pragma once

#include "laxcheck/checks.hpp"
#include "laxcheck/sexpr.hpp"
#include "laxcheck/theory.hpp"

#include <string>
#include <vector>

namespace laxcheck {

/// Evaluates an expression form over a context. Accepts (+ ...), (- ...),
/// (* ...), (/ a b), (^ x p) with rational p, (ddt e), (delta e),
/// (jet f k [comp]), (var f k [comp]), (dot-jets f1 k1 f2 k2), rational
/// literals and atom symbols.
Expr eval_expr(const Context& ctx, const SNode& n);
/// Canonicalizes a raw expression tree (idempotent on canonical output).
inline Expr normalize(const Context& ctx, const SNode& raw) { return eval_expr(ctx, raw); }
inline Expr normalize(const Context& ctx, const std::string& raw) {
  return eval_expr(ctx, parse_sexpr(raw));
}

/// Parses a theory file into a coordinate theory.
Theory parse_theory(const std::string& text);
/// Canonical serialization; parse(print(t)) equals t.
std::string print_theory(const Theory& t);
/// Structural equality of coordinate theories (same declarations and data).
bool theories_equal(const Theory& a, const Theory& b);

/// Yang-Mills proof-script files. Goals are stored as forms and evaluated
/// per flag combination; step sections may differ per combination since the
/// canonical term order is flag-dependent.
struct ParsedScript {
  std::string id;
  SNode lhsForm, rhsForm;
  bool hasGoal = false;
  std::map<int, NCScript> stepsByCombo; // key: NCFlags::comboIndex()
  NCScript stepsFor(const NCFlags& f) const {
    auto it = stepsByCombo.find(f.comboIndex());
    if (it != stepsByCombo.end()) return it->second;
    NCScript s;
    s.id = id;
    return s;
  }
};
NCExpr eval_nc_expr(const NCFlags& f, const SNode& n);
std::vector<ParsedScript> parse_scripts(const std::string& text);
std::string print_script(const ParsedScript& s);

struct PlanItem {
  std::string check;       // lax-axioms, chain-map, ... , kernel, suite
  std::string theory;      // builtin name or file path
  std::string package;
  std::string direction;   // phi | psi | both
  std::string preMorphism; // "chi" for the kernel check
  int codim = 1;
  std::string scriptFile;
};

struct Plan {
  std::vector<PlanItem> items;
};

Plan parse_plan(const std::string& text);

} // namespace laxcheck
