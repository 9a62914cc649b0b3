#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "biopepa/model.hpp"

namespace biopepa {

/// Participant of a reaction: species index into the network's species table
/// plus the stoichiometry of this role.
struct Participant {
  int species = -1;
  int stoichiometry = 1;

  friend bool operator==(const Participant&, const Participant&) = default;
};

struct Reaction {
  std::string action;
  std::vector<Participant> reactants;
  std::vector<Participant> products;
  std::vector<Participant> activators;
  std::vector<Participant> inhibitors;
  std::vector<Participant> modifiers;
  ExprPtr rate;

  /// Net count change per firing, as (species, delta) pairs; zero-net species
  /// (catalytic write-throughs) are omitted.
  std::vector<std::pair<int, int>> net_change() const;
};

/// Dense molecule counts, indexed like ReactionNetwork::species.
struct State {
  std::vector<std::int64_t> counts;

  std::int64_t operator[](int i) const { return counts[i]; }
  friend bool operator==(const State&, const State&) = default;
};

/// Flattened form of a system: one reaction per action, role-tagged
/// participants, an index map for species and the initial state.
/// Immutable once built; safe to share between concurrent analyses.
struct ReactionNetwork {
  std::vector<SpeciesRef> species;                 // model-declaration order
  std::vector<Reaction> reactions;
  State initial;
  std::map<std::string, double> parameters;
  std::vector<SpeciesInfo> species_info;           // aligned with `species`; step_size 0 = absent

  int species_index(const SpeciesRef& ref) const;  // -1 if unknown
  int reaction_index(const std::string& action) const;
  std::string species_name(int i) const { return species[i].str(); }
  bool has_info(int i) const { return species_info[i].step_size > 0; }
};

/// Flattens a well-formed system into its reaction network. Cooperation
/// determines which declared roles synchronise into each reaction; the
/// wildcard synchronises every component sharing the action. Warnings (rate
/// expressions naming species with no role in the reaction) are appended to
/// `diags` when given.
ReactionNetwork derive_reactions(const BioPepaSystem& system,
                                 std::vector<Diagnostic>* diags = nullptr);

/// Evaluates a reaction's rate against a state. MassAction(k) multiplies the
/// constant by count^kappa over reactants and activators. General expressions
/// see species bound to their counts. Negative results clamp to zero
/// (`clamped` reports it); division by zero or a non-finite result throws
/// EvalError naming the action.
double evaluate_rate(const ReactionNetwork& net, const Reaction& reaction, const State& state,
                     bool* clamped = nullptr);

/// Rate with the enabling guard: zero whenever some reactant has fewer than
/// kappa molecules, so firing can never drive a count negative.
double propensity(const ReactionNetwork& net, const Reaction& reaction, const State& state,
                  bool* clamped = nullptr);

/// Applies one firing to `state`: reactants down by kappa, products up by
/// kappa. Aborts (never silently wraps) if a count would go negative.
void apply_reaction(const Reaction& reaction, State& state);

/// Gibson-Bruck dependency graph: r -> r' iff firing r can change r's own or
/// r'-s rate inputs (rate-expression species plus reactant/activator roles).
/// Every reaction depends on itself.
std::vector<std::vector<int>> dependency_graph(const ReactionNetwork& net);

}  // namespace biopepa
