#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "biopepa/network.hpp"
#include "biopepa/parser.hpp"
#include "biopepa/trace.hpp"

namespace biopepa {

/// Total assignment of reactions to named modules.
struct ModulePartition {
  std::map<std::string, std::vector<std::string>> modules;  // module -> actions

  std::vector<std::string> module_names() const;
  const std::string* module_of(const std::string& action) const;

  /// Errors unless every network reaction is assigned exactly once and every
  /// assigned action exists.
  std::vector<Diagnostic> validate(const ReactionNetwork& net) const;
};

ModulePartition parse_partition_json(const std::string& text);
ModulePartition read_partition_file(const std::string& path);
std::string partition_to_json(const ModulePartition& partition);

/// Boundary classification of a module's species: local (touched by no other
/// module), external regulator (foreign roles are all activator/inhibitor/
/// modifier) or external reagent (some foreign reaction consumes/produces it).
enum class SpeciesClass { Local, ExternalRegulator, ExternalReagent };

const char* species_class_name(SpeciesClass c);

struct ClassifiedSpecies {
  SpeciesRef species;
  SpeciesClass cls = SpeciesClass::Local;
  std::vector<std::string> foreign_modules;  // sorted
};

struct SpeciesClassification {
  // module -> entries sorted by species name
  std::map<std::string, std::vector<ClassifiedSpecies>> per_module;

  const ClassifiedSpecies* find(const std::string& module, const SpeciesRef& ref) const;
};

SpeciesClassification classify_species(const ReactionNetwork& net,
                                       const ModulePartition& partition);

/// Synthetic replacement for the environment of one boundary species.
struct EnvironmentStub {
  enum class Strategy { FixedInitial, ZeroOrderCreation, FirstOrderDegradation };

  SpeciesRef target;
  Strategy strategy = Strategy::FixedInitial;
  double rate = 0.0;     // creation/degradation constant
  double initial = 0.0;  // FixedInitial amount, or starting amount for creation
  std::string note;      // provenance: how this stub was obtained

  friend bool operator==(const EnvironmentStub&, const EnvironmentStub&) = default;
};

std::vector<EnvironmentStub> parse_stubs_json(const std::string& text);
std::vector<EnvironmentStub> read_stubs_file(const std::string& path);
std::string stubs_to_json(const std::vector<EnvironmentStub>& stubs);

/// Extracts one module as a standalone system: the module's reactions, its
/// species restricted to module roles, stub reactions (actions stub_create_X /
/// stub_decay_X) and stub initial amounts overriding the parent's. Every
/// external reagent must be covered by a stub; offenders are reported in the
/// BuildError message.
BioPepaSystem extract_module(const BioPepaSystem& system, const ModulePartition& partition,
                             const std::string& module,
                             const std::vector<EnvironmentStub>& stubs);

/// Fits a stub to a reference trace. "zero_order_creation" takes the
/// least-squares slope of the mean through its initial value (a linear trace
/// through the origin degenerates to endpoint/T); a slope indistinguishable
/// from zero degrades to FixedInitial of the mean. "fixed_initial" takes the
/// reference maximum. The note records the fit window and residual.
EnvironmentStub fit_stub(const EnsembleTrace& reference, const SpeciesRef& species,
                         EnvironmentStub::Strategy hint);

/// Trace agreement metrics; the candidate is resampled onto the reference
/// grid by step-function evaluation when the grids differ.
struct TraceComparison {
  struct PerSpecies {
    std::string species;
    double rmse = 0.0;
    double normalized_rmse = 0.0;  // rmse / max |reference|
    double max_abs_deviation = 0.0;
    double peak_time_diff = 0.0;
    bool skipped = false;  // reference max is zero
  };
  std::vector<PerSpecies> entries;
  double worst_normalized_rmse = 0.0;
};

TraceComparison compare_traces(const EnsembleTrace& candidate, const EnsembleTrace& reference,
                               const std::vector<std::string>& species);

}  // namespace biopepa
