#include "biopepa/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace biopepa {

std::vector<std::pair<int, int>> Reaction::net_change() const {
  std::map<int, int> delta;
  for (const auto& p : reactants) delta[p.species] -= p.stoichiometry;
  for (const auto& p : products) delta[p.species] += p.stoichiometry;
  std::vector<std::pair<int, int>> out;
  for (const auto& [sp, d] : delta)
    if (d != 0) out.emplace_back(sp, d);
  return out;
}

int ReactionNetwork::species_index(const SpeciesRef& ref) const {
  for (std::size_t i = 0; i < species.size(); ++i)
    if (species[i] == ref) return static_cast<int>(i);
  return -1;
}

int ReactionNetwork::reaction_index(const std::string& action) const {
  for (std::size_t i = 0; i < reactions.size(); ++i)
    if (reactions[i].action == action) return static_cast<int>(i);
  return -1;
}

namespace {

// Species of a subtree that can perform `action`. Throws when the cooperation
// structure would fire the action independently on both sides (one reaction
// per action cannot represent that) or when an explicit sync set demands a
// participant that cannot perform it.
std::set<SpeciesRef> participants(const ModelPtr& node, const std::string& action,
                                  const BioPepaSystem& system) {
  if (!node) return {};
  if (node->is_instance) {
    const auto* comp = system.find_component(node->subject);
    if (comp)
      for (const auto& p : comp->prefixes)
        if (p.action == action) return {node->subject};
    return {};
  }
  auto left = participants(node->left, action, system);
  auto right = participants(node->right, action, system);
  const bool in_set =
      node->sync.star ? (!left.empty() && !right.empty())
                      : std::binary_search(node->sync.actions.begin(), node->sync.actions.end(),
                                           action);
  if (in_set && !node->sync.star) {
    if (left.empty() || right.empty())
      throw BuildError("action " + action +
                       " is in an explicit cooperation set but one operand cannot perform it");
  }
  if (!in_set && !left.empty() && !right.empty())
    throw BuildError("action " + action +
                     " is shared across a cooperation that does not synchronise it");
  left.insert(right.begin(), right.end());
  return left;
}

void gather_initials(const ModelPtr& node, std::map<SpeciesRef, double>& initials) {
  if (!node) return;
  if (node->is_instance) {
    initials[node->subject] = node->initial;
    return;
  }
  gather_initials(node->left, initials);
  gather_initials(node->right, initials);
}

}  // namespace

ReactionNetwork derive_reactions(const BioPepaSystem& system, std::vector<Diagnostic>* diags) {
  ReactionNetwork net;
  for (const auto& c : system.components) net.species.push_back(c.subject);

  std::map<SpeciesRef, double> initials;
  gather_initials(system.model, initials);
  net.initial.counts.resize(net.species.size(), 0);
  for (std::size_t i = 0; i < net.species.size(); ++i) {
    auto it = initials.find(net.species[i]);
    if (it != initials.end()) net.initial.counts[i] = std::llround(it->second);
  }

  for (const auto& p : system.parameters) net.parameters[p.name] = p.value;

  net.species_info.resize(net.species.size());
  for (std::size_t i = 0; i < net.species.size(); ++i) {
    net.species_info[i].subject = net.species[i];
    net.species_info[i].step_size = 0;  // absent
    if (const auto* info = system.find_info(net.species[i])) net.species_info[i] = *info;
  }

  // actions in functional-rate declaration order, restricted to those that
  // some species component actually uses
  std::set<std::string> used_actions;
  for (const auto& c : system.components)
    for (const auto& p : c.prefixes) used_actions.insert(p.action);

  for (const auto& fr : system.rates) {
    if (!used_actions.count(fr.action)) {
      if (diags)
        diags->push_back({Severity::Warning,
                          "functional rate " + fr.action + " is used by no species component",
                          fr.span});
      continue;
    }
    auto parts = participants(system.model, fr.action, system);
    if (parts.empty()) {
      // declared in components but none of them is instantiated in the model
      if (diags)
        diags->push_back({Severity::Warning,
                          "action " + fr.action + " has no participant in the model component",
                          fr.span});
      continue;
    }
    Reaction rx;
    rx.action = fr.action;
    rx.rate = fr.expression;
    for (const auto& ref : parts) {
      const auto* comp = system.find_component(ref);
      int idx = net.species_index(ref);
      for (const auto& p : comp->prefixes) {
        if (p.action != fr.action) continue;
        Participant part{idx, p.stoichiometry};
        switch (p.op) {
          case PrefixOp::Reactant: rx.reactants.push_back(part); break;
          case PrefixOp::Product: rx.products.push_back(part); break;
          case PrefixOp::Activator: rx.activators.push_back(part); break;
          case PrefixOp::Inhibitor: rx.inhibitors.push_back(part); break;
          case PrefixOp::Modifier: rx.modifiers.push_back(part); break;
        }
      }
    }
    // flag rate expressions that mention species without a role here
    if (diags) {
      std::vector<SpeciesRef> expr_species;
      std::vector<std::string> expr_params;
      ExprPtr body = fr.expression;
      if (body && body->kind == ExprKind::MassAction) body = body->lhs;
      collect_expr_refs(body, expr_species, expr_params);
      for (const auto& ref : expr_species) {
        if (!parts.count(ref))
          diags->push_back({Severity::Warning,
                            "rate of " + fr.action + " references " + ref.str() +
                                " which has no role in the reaction",
                            fr.span});
      }
    }
    net.reactions.push_back(std::move(rx));
  }

  // actions used by components but never rated: well-formedness reports them;
  // keep network derivation strict anyway
  for (const auto& a : used_actions)
    if (!system.find_rate(a)) throw BuildError("action " + a + " has no functional rate");

  return net;
}

double evaluate_rate(const ReactionNetwork& net, const Reaction& reaction, const State& state,
                     bool* clamped) {
  EvalContext ctx;
  ctx.parameter = [&](const std::string& name) -> double {
    auto it = net.parameters.find(name);
    if (it == net.parameters.end())
      throw EvalError("reaction " + reaction.action + ": unknown parameter " + name);
    return it->second;
  };
  ctx.species_amount = [&](const SpeciesRef& ref) -> double {
    int idx = net.species_index(ref);
    if (idx < 0) throw EvalError("reaction " + reaction.action + ": unknown species " + ref.str());
    return static_cast<double>(state.counts[idx]);
  };

  double value;
  if (reaction.rate && reaction.rate->kind == ExprKind::MassAction) {
    double k = eval_expr(reaction.rate->lhs, ctx, "reaction " + reaction.action);
    value = k;
    for (const auto& p : reaction.reactants)
      value *= std::pow(static_cast<double>(state.counts[p.species]), p.stoichiometry);
    for (const auto& p : reaction.activators)
      value *= std::pow(static_cast<double>(state.counts[p.species]), p.stoichiometry);
  } else {
    value = eval_expr(reaction.rate, ctx, "reaction " + reaction.action);
  }
  if (!std::isfinite(value))
    throw EvalError("reaction " + reaction.action + ": rate is not finite");
  if (value < 0) {
    if (clamped) *clamped = true;
    value = 0;
  }
  return value;
}

double propensity(const ReactionNetwork& net, const Reaction& reaction, const State& state,
                  bool* clamped) {
  for (const auto& p : reaction.reactants)
    if (state.counts[p.species] < p.stoichiometry) return 0.0;
  return evaluate_rate(net, reaction, state, clamped);
}

void apply_reaction(const Reaction& reaction, State& state) {
  for (const auto& p : reaction.reactants) {
    state.counts[p.species] -= p.stoichiometry;
    if (state.counts[p.species] < 0)
      throw EvalError("reaction " + reaction.action + " drove a count negative");
  }
  for (const auto& p : reaction.products) state.counts[p.species] += p.stoichiometry;
}

std::vector<std::vector<int>> dependency_graph(const ReactionNetwork& net) {
  const int n = static_cast<int>(net.reactions.size());
  // rate inputs per reaction: rate-expression species plus reactant and
  // activator roles (both enter the propensity)
  std::vector<std::unordered_set<int>> inputs(n);
  for (int r = 0; r < n; ++r) {
    const auto& rx = net.reactions[r];
    std::vector<SpeciesRef> expr_species;
    std::vector<std::string> expr_params;
    ExprPtr body = rx.rate;
    if (body && body->kind == ExprKind::MassAction) body = body->lhs;
    collect_expr_refs(body, expr_species, expr_params);
    for (const auto& ref : expr_species) {
      int idx = net.species_index(ref);
      if (idx >= 0) inputs[r].insert(idx);
    }
    for (const auto& p : rx.reactants) inputs[r].insert(p.species);
    for (const auto& p : rx.activators) inputs[r].insert(p.species);
  }

  std::vector<std::vector<int>> graph(n);
  for (int r = 0; r < n; ++r) {
    auto changed = net.reactions[r].net_change();
    for (int s = 0; s < n; ++s) {
      if (s == r) {
        graph[r].push_back(s);  // the fired reaction always redraws its clock
        continue;
      }
      bool depends = false;
      for (const auto& [sp, delta] : changed) {
        (void)delta;
        if (inputs[s].count(sp)) {
          depends = true;
          break;
        }
      }
      if (depends) graph[r].push_back(s);
    }
  }
  return graph;
}

}  // namespace biopepa
