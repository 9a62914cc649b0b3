#include "biopepa/expr.hpp"

#include <cmath>
#include <cstdio>

namespace biopepa {

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::Number:
      return a->number == b->number;
    case ExprKind::Param:
      return a->name == b->name;
    case ExprKind::Species:
      return a->species == b->species;
    case ExprKind::Neg:
    case ExprKind::MassAction:
      return expr_equal(a->lhs, b->lhs);
    default:
      return expr_equal(a->lhs, b->lhs) && expr_equal(a->rhs, b->rhs);
  }
}

double eval_expr(const ExprPtr& expr, const EvalContext& ctx, const std::string& what) {
  if (!expr) throw EvalError(what + ": empty expression");
  switch (expr->kind) {
    case ExprKind::Number:
      return expr->number;
    case ExprKind::Param:
      return ctx.parameter(expr->name);
    case ExprKind::Species:
      if (!ctx.species_amount)
        throw EvalError(what + ": species " + expr->species.str() +
                        " not allowed in a constant expression");
      return ctx.species_amount(expr->species);
    case ExprKind::Neg:
      return -eval_expr(expr->lhs, ctx, what);
    case ExprKind::Add:
      return eval_expr(expr->lhs, ctx, what) + eval_expr(expr->rhs, ctx, what);
    case ExprKind::Sub:
      return eval_expr(expr->lhs, ctx, what) - eval_expr(expr->rhs, ctx, what);
    case ExprKind::Mul:
      return eval_expr(expr->lhs, ctx, what) * eval_expr(expr->rhs, ctx, what);
    case ExprKind::Div: {
      double num = eval_expr(expr->lhs, ctx, what);
      double den = eval_expr(expr->rhs, ctx, what);
      if (den == 0.0) {
        if (ctx.zero_over_zero_is_zero && num == 0.0) return 0.0;
        throw EvalError(what + ": division by zero");
      }
      return num / den;
    }
    case ExprKind::Pow: {
      double base = eval_expr(expr->lhs, ctx, what);
      double exponent = eval_expr(expr->rhs, ctx, what);
      double v = std::pow(base, exponent);
      if (!std::isfinite(v)) throw EvalError(what + ": power is not finite");
      return v;
    }
    case ExprKind::MassAction:
      throw EvalError(what + ": fMA outside a rate position");
  }
  throw EvalError(what + ": unknown expression node");
}

void collect_expr_refs(const ExprPtr& expr, std::vector<SpeciesRef>& species,
                       std::vector<std::string>& params) {
  if (!expr) return;
  switch (expr->kind) {
    case ExprKind::Param:
      params.push_back(expr->name);
      break;
    case ExprKind::Species:
      species.push_back(expr->species);
      break;
    default:
      collect_expr_refs(expr->lhs, species, params);
      collect_expr_refs(expr->rhs, species, params);
      break;
  }
}

namespace {

int precedence(ExprKind k) {
  switch (k) {
    case ExprKind::Add:
    case ExprKind::Sub:
      return 1;
    case ExprKind::Mul:
    case ExprKind::Div:
      return 2;
    case ExprKind::Neg:
      return 3;
    case ExprKind::Pow:
      return 4;
    default:
      return 5;
  }
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print(const ExprPtr& e, std::string& out, int parent_prec, bool right_side) {
  const int prec = precedence(e->kind);
  // left-associative operators need parens on an equal-precedence right child;
  // pow is right-associative so it is the mirror case
  bool parens = prec < parent_prec ||
                (prec == parent_prec && right_side && e->kind != ExprKind::Pow && parent_prec > 0 &&
                 parent_prec < 4) ||
                (prec == parent_prec && !right_side && e->kind == ExprKind::Pow);
  if (parens) out += "(";
  switch (e->kind) {
    case ExprKind::Number:
      out += format_number(e->number);
      break;
    case ExprKind::Param:
      out += e->name;
      break;
    case ExprKind::Species:
      out += e->species.str();
      break;
    case ExprKind::Neg:
      out += "-";
      print(e->lhs, out, precedence(ExprKind::Neg), true);
      break;
    case ExprKind::MassAction:
      out += "fMA(";
      print(e->lhs, out, 0, false);
      out += ")";
      break;
    default: {
      const char* sym = e->kind == ExprKind::Add   ? " + "
                        : e->kind == ExprKind::Sub ? " - "
                        : e->kind == ExprKind::Mul ? " * "
                        : e->kind == ExprKind::Div ? " / "
                                                   : " ^ ";
      print(e->lhs, out, prec, false);
      out += sym;
      print(e->rhs, out, prec, true);
      break;
    }
  }
  if (parens) out += ")";
}

}  // namespace

std::string expr_to_string(const ExprPtr& expr) {
  if (!expr) return "0";
  std::string out;
  print(expr, out, 0, false);
  return out;
}

}  // namespace biopepa
