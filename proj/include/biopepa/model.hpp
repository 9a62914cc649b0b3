#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "biopepa/diagnostics.hpp"
#include "biopepa/expr.hpp"

namespace biopepa {

enum class LocationKind { Compartment, Membrane };

struct Location {
  std::string name;
  double size = 1.0;
  std::string unit;  // e.g. "ul"; informational only
  LocationKind kind = LocationKind::Compartment;
  SourceSpan span;

  friend bool operator==(const Location& a, const Location& b) {
    return a.name == b.name && a.size == b.size && a.unit == b.unit && a.kind == b.kind;
  }
};

/// Role of a species in a reaction.
enum class PrefixOp { Reactant, Product, Activator, Inhibitor, Modifier };

const char* prefix_op_symbol(PrefixOp op);  // "<<", ">>", "(+)", "(-)", "(.)"

struct PrefixTerm {
  std::string action;
  int stoichiometry = 1;
  PrefixOp op = PrefixOp::Reactant;

  friend bool operator==(const PrefixTerm&, const PrefixTerm&) = default;
};

/// One species' declaration: the reactions it takes part in and how.
struct SpeciesComponent {
  SpeciesRef subject;
  std::vector<PrefixTerm> prefixes;
  SourceSpan span;

  friend bool operator==(const SpeciesComponent& a, const SpeciesComponent& b) {
    return a.subject == b.subject && a.prefixes == b.prefixes;
  }
};

/// Synchronisation set of a cooperation: the wildcard (all shared actions)
/// or an explicit action list.
struct SyncSet {
  bool star = true;
  std::vector<std::string> actions;  // sorted, unique when !star

  friend bool operator==(const SyncSet&, const SyncSet&) = default;
};

struct ModelNode;
using ModelPtr = std::shared_ptr<const ModelNode>;

/// Cooperation tree: leaves are species instances with initial amounts,
/// internal nodes compose two subtrees over a sync set.
struct ModelNode {
  bool is_instance = true;
  // instance
  SpeciesRef subject;
  double initial = 0.0;
  // cooperation
  ModelPtr left, right;
  SyncSet sync;
  SourceSpan span;

  static ModelPtr instance(SpeciesRef ref, double initial) {
    auto n = std::make_shared<ModelNode>();
    n->is_instance = true;
    n->subject = std::move(ref);
    n->initial = initial;
    return n;
  }
  static ModelPtr cooperation(ModelPtr l, ModelPtr r, SyncSet sync) {
    auto n = std::make_shared<ModelNode>();
    n->is_instance = false;
    n->left = std::move(l);
    n->right = std::move(r);
    n->sync = std::move(sync);
    return n;
  }
};

bool model_equal(const ModelPtr& a, const ModelPtr& b);

/// Per-species discretisation data (the optional set N of a system). The
/// maximum amount may be left open and filled in later from simulation.
struct SpeciesInfo {
  SpeciesRef subject;
  double step_size = 1.0;
  std::optional<double> max_amount;
  SourceSpan span;

  /// Highest level index; requires max_amount.
  int max_level() const;

  friend bool operator==(const SpeciesInfo& a, const SpeciesInfo& b) {
    return a.subject == b.subject && a.step_size == b.step_size && a.max_amount == b.max_amount;
  }
};

struct Parameter {
  std::string name;
  double value = 0.0;
  SourceSpan span;

  friend bool operator==(const Parameter& a, const Parameter& b) {
    return a.name == b.name && a.value == b.value;
  }
};

struct FunctionalRate {
  std::string action;
  ExprPtr expression;
  SourceSpan span;

  friend bool operator==(const FunctionalRate& a, const FunctionalRate& b) {
    return a.action == b.action && expr_equal(a.expression, b.expression);
  }
};

/// A complete system: locations, species info, parameters, functional rates,
/// species components and the model component, in declaration order.
struct BioPepaSystem {
  std::vector<Location> locations;
  std::vector<SpeciesInfo> species_info;
  std::vector<Parameter> parameters;
  std::vector<FunctionalRate> rates;
  std::vector<SpeciesComponent> components;
  ModelPtr model;  // null for an empty document

  const Location* find_location(const std::string& name) const;
  const Parameter* find_parameter(const std::string& name) const;
  const FunctionalRate* find_rate(const std::string& action) const;
  const SpeciesComponent* find_component(const SpeciesRef& ref) const;
  const SpeciesInfo* find_info(const SpeciesRef& ref) const;

  friend bool operator==(const BioPepaSystem& a, const BioPepaSystem& b);
};

/// Cross-reference checks for Definition-style consistency. Returns an empty
/// list iff the system is well formed; never throws.
std::vector<Diagnostic> check_wellformed(const BioPepaSystem& system);

/// Discretises an amount onto the species' level grid: round(amount / h),
/// clamped to [0, max_level]. Negative amounts are rejected.
int amount_to_level(double amount, const SpeciesInfo& info);

}  // namespace biopepa
