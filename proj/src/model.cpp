#include "biopepa/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

namespace biopepa {

const char* prefix_op_symbol(PrefixOp op) {
  switch (op) {
    case PrefixOp::Reactant: return "<<";
    case PrefixOp::Product: return ">>";
    case PrefixOp::Activator: return "(+)";
    case PrefixOp::Inhibitor: return "(-)";
    case PrefixOp::Modifier: return "(.)";
  }
  return "?";
}

bool model_equal(const ModelPtr& a, const ModelPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->is_instance != b->is_instance) return false;
  if (a->is_instance) return a->subject == b->subject && a->initial == b->initial;
  return a->sync == b->sync && model_equal(a->left, b->left) && model_equal(a->right, b->right);
}

int SpeciesInfo::max_level() const {
  if (!max_amount) throw BuildError("species " + subject.str() + " has no maximum amount");
  // tolerate round-off when the max is an exact multiple of h
  return static_cast<int>(std::ceil(*max_amount / step_size - 1e-9));
}

const Location* BioPepaSystem::find_location(const std::string& name) const {
  for (const auto& l : locations)
    if (l.name == name) return &l;
  return nullptr;
}
const Parameter* BioPepaSystem::find_parameter(const std::string& name) const {
  for (const auto& p : parameters)
    if (p.name == name) return &p;
  return nullptr;
}
const FunctionalRate* BioPepaSystem::find_rate(const std::string& action) const {
  for (const auto& r : rates)
    if (r.action == action) return &r;
  return nullptr;
}
const SpeciesComponent* BioPepaSystem::find_component(const SpeciesRef& ref) const {
  for (const auto& c : components)
    if (c.subject == ref) return &c;
  return nullptr;
}
const SpeciesInfo* BioPepaSystem::find_info(const SpeciesRef& ref) const {
  for (const auto& i : species_info)
    if (i.subject == ref) return &i;
  return nullptr;
}

bool operator==(const BioPepaSystem& a, const BioPepaSystem& b) {
  return a.locations == b.locations && a.species_info == b.species_info &&
         a.parameters == b.parameters && a.rates == b.rates && a.components == b.components &&
         model_equal(a.model, b.model);
}

namespace {

void collect_instances(const ModelPtr& node,
                       std::vector<const ModelNode*>& instances) {
  if (!node) return;
  if (node->is_instance) {
    instances.push_back(node.get());
    return;
  }
  collect_instances(node->left, instances);
  collect_instances(node->right, instances);
}

}  // namespace

std::vector<Diagnostic> check_wellformed(const BioPepaSystem& system) {
  std::vector<Diagnostic> diags;
  auto error = [&](std::string msg, SourceSpan span = {}) {
    diags.push_back({Severity::Error, std::move(msg), std::move(span)});
  };
  auto warning = [&](std::string msg, SourceSpan span = {}) {
    diags.push_back({Severity::Warning, std::move(msg), std::move(span)});
  };

  std::unordered_set<std::string> location_names;
  for (const auto& l : system.locations) {
    if (!location_names.insert(l.name).second)
      error("duplicate location " + l.name, l.span);
    if (!(l.size > 0)) error("location " + l.name + " has non-positive size", l.span);
  }

  std::set<SpeciesRef> declared;
  for (const auto& c : system.components) {
    if (!declared.insert(c.subject).second)
      error("duplicate species component " + c.subject.str(), c.span);
    if (!location_names.count(c.subject.location))
      error("species " + c.subject.str() + " references unknown location " + c.subject.location,
            c.span);
  }

  // choice terms: no duplicate (action, op) per subject; every action rated
  for (const auto& c : system.components) {
    std::set<std::pair<std::string, PrefixOp>> seen;
    for (const auto& p : c.prefixes) {
      if (!seen.insert({p.action, p.op}).second)
        error("species " + c.subject.str() + " repeats (" + p.action + ", " +
                  prefix_op_symbol(p.op) + ")",
              c.span);
      if (p.stoichiometry < 1)
        error("species " + c.subject.str() + ": stoichiometry of " + p.action +
                  " must be positive",
              c.span);
      if (!system.find_rate(p.action))
        error("action " + p.action + " used by " + c.subject.str() + " has no functional rate",
              c.span);
    }
  }

  std::unordered_set<std::string> param_names;
  for (const auto& p : system.parameters)
    if (!param_names.insert(p.name).second) error("duplicate parameter " + p.name, p.span);

  // functional rates: free names must resolve; fMA takes a constant argument
  for (const auto& r : system.rates) {
    std::vector<SpeciesRef> sp;
    std::vector<std::string> params;
    ExprPtr body = r.expression;
    if (body && body->kind == ExprKind::MassAction) body = body->lhs;
    collect_expr_refs(body, sp, params);
    if (r.expression && r.expression->kind == ExprKind::MassAction && !sp.empty())
      error("rate " + r.action + ": fMA argument must not reference species", r.span);
    for (const auto& ref : sp)
      if (!declared.count(ref))
        error("rate " + r.action + " references undeclared species " + ref.str(), r.span);
    for (const auto& name : params)
      if (!param_names.count(name))
        error("rate " + r.action + " references unknown parameter " + name, r.span);
  }

  for (const auto& info : system.species_info) {
    if (!(info.step_size > 0))
      error("species info for " + info.subject.str() + " has non-positive step size", info.span);
    if (!declared.count(info.subject))
      error("species info references undeclared species " + info.subject.str(), info.span);
  }

  // model component: every declared species in exactly one instance
  std::vector<const ModelNode*> instances;
  collect_instances(system.model, instances);
  std::map<SpeciesRef, int> instance_count;
  for (const auto* inst : instances) {
    ++instance_count[inst->subject];
    if (!declared.count(inst->subject))
      error("model component instantiates undeclared species " + inst->subject.str(), inst->span);
    if (inst->initial < 0)
      error("negative initial amount for " + inst->subject.str(), inst->span);
    if (const auto* info = system.find_info(inst->subject)) {
      if (info->max_amount && inst->initial > *info->max_amount)
        error("initial amount of " + inst->subject.str() + " exceeds its declared maximum",
              inst->span);
    }
  }
  for (const auto& [ref, n] : instance_count)
    if (n > 1) error("species " + ref.str() + " appears in " + std::to_string(n) + " instances");
  if (system.model) {
    for (const auto& ref : declared)
      if (!instance_count.count(ref))
        error("species " + ref.str() + " is declared but never instantiated in the model");
  } else if (!system.components.empty()) {
    error("system declares species components but no model component");
  }

  // unused parameters are suspicious but harmless
  std::unordered_set<std::string> used_params;
  for (const auto& r : system.rates) {
    std::vector<SpeciesRef> sp;
    std::vector<std::string> params;
    ExprPtr body = r.expression;
    if (body && body->kind == ExprKind::MassAction) body = body->lhs;
    collect_expr_refs(body, sp, params);
    used_params.insert(params.begin(), params.end());
  }
  for (const auto& p : system.parameters)
    if (!used_params.count(p.name)) warning("parameter " + p.name + " is never used", p.span);

  return diags;
}

int amount_to_level(double amount, const SpeciesInfo& info) {
  if (amount < 0) throw EvalError("negative amount for " + info.subject.str());
  long long level = std::llround(amount / info.step_size);
  if (level < 0) level = 0;
  if (info.max_amount) {
    int cap = info.max_level();
    if (level > cap) level = cap;
  }
  return static_cast<int>(level);
}

}  // namespace biopepa
