#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "biopepa/diagnostics.hpp"

namespace biopepa {

struct SpeciesRef {
  std::string species;
  std::string location;

  std::string str() const { return species + "@" + location; }
  friend bool operator==(const SpeciesRef&, const SpeciesRef&) = default;
  friend auto operator<=>(const SpeciesRef&, const SpeciesRef&) = default;
};

struct SpeciesRefHash {
  size_t operator()(const SpeciesRef& r) const {
    return std::hash<std::string>()(r.species) * 1000003u ^ std::hash<std::string>()(r.location);
  }
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

enum class ExprKind { Number, Param, Species, Neg, Add, Sub, Mul, Div, Pow, MassAction };

/// Kinetic-law expression tree. MassAction is a complete rate law on its own:
/// the constant is the argument, the concentration product comes from the
/// reaction the expression is attached to.
struct ExprNode {
  ExprKind kind;
  double number = 0.0;       // Number
  std::string name;          // Param
  SpeciesRef species;        // Species
  ExprPtr lhs, rhs;          // operators; MassAction and Neg use lhs only

  static ExprPtr make_number(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Number;
    n->number = v;
    return n;
  }
  static ExprPtr make_param(std::string name) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Param;
    n->name = std::move(name);
    return n;
  }
  static ExprPtr make_species(SpeciesRef ref) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Species;
    n->species = std::move(ref);
    return n;
  }
  static ExprPtr make_unary(ExprKind kind, ExprPtr operand) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->lhs = std::move(operand);
    return n;
  }
  static ExprPtr make_binary(ExprKind kind, ExprPtr l, ExprPtr r) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }
};

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

/// Name bindings for expression evaluation. `species_amount` may be null when
/// the expression is known to be species-free (e.g. a mass-action constant).
struct EvalContext {
  std::function<double(const std::string&)> parameter;          // throws EvalError on unknown
  std::function<double(const SpeciesRef&)> species_amount;      // may be null
  bool zero_over_zero_is_zero = false;                          // reward-expression convention
};

/// Evaluates a species-free or species-bound expression. MassAction nodes are
/// rejected here; they only make sense applied to a reaction (see network).
double eval_expr(const ExprPtr& expr, const EvalContext& ctx, const std::string& what);

/// Collects free names: species references and parameter names.
void collect_expr_refs(const ExprPtr& expr, std::vector<SpeciesRef>& species,
                       std::vector<std::string>& params);

std::string expr_to_string(const ExprPtr& expr);

}  // namespace biopepa
