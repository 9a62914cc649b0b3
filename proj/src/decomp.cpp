#include "biopepa/decomp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

namespace biopepa {

using nlohmann::json;

std::vector<std::string> ModulePartition::module_names() const {
  std::vector<std::string> out;
  for (const auto& [name, actions] : modules) out.push_back(name);
  return out;
}

const std::string* ModulePartition::module_of(const std::string& action) const {
  for (const auto& [name, actions] : modules)
    if (std::find(actions.begin(), actions.end(), action) != actions.end()) return &name;
  return nullptr;
}

std::vector<Diagnostic> ModulePartition::validate(const ReactionNetwork& net) const {
  std::vector<Diagnostic> diags;
  std::map<std::string, int> assigned;
  for (const auto& [name, actions] : modules) {
    for (const auto& a : actions) {
      ++assigned[a];
      if (net.reaction_index(a) < 0)
        diags.push_back({Severity::Error, "partition assigns unknown reaction " + a, {}});
    }
  }
  for (const auto& [a, n] : assigned)
    if (n > 1)
      diags.push_back(
          {Severity::Error, "reaction " + a + " is assigned to " + std::to_string(n) + " modules", {}});
  for (const auto& rx : net.reactions)
    if (!assigned.count(rx.action))
      diags.push_back(
          {Severity::Error, "partition does not assign reaction " + rx.action + " to any module", {}});
  return diags;
}

ModulePartition parse_partition_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("partition file: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("modules") || !doc["modules"].is_object())
    throw IoError("partition file must be an object with a 'modules' object");
  ModulePartition p;
  for (const auto& [name, actions] : doc["modules"].items()) {
    if (!actions.is_array()) throw IoError("module " + name + " must list its reactions");
    std::vector<std::string> list;
    for (const auto& a : actions) {
      if (!a.is_string()) throw IoError("module " + name + " has a non-string reaction");
      list.push_back(a.get<std::string>());
    }
    p.modules[name] = std::move(list);
  }
  return p;
}

ModulePartition read_partition_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_partition_json(ss.str());
}

std::string partition_to_json(const ModulePartition& partition) {
  json doc;
  doc["modules"] = json::object();
  for (const auto& [name, actions] : partition.modules) doc["modules"][name] = actions;
  return doc.dump(2) + "\n";
}

const char* species_class_name(SpeciesClass c) {
  switch (c) {
    case SpeciesClass::Local: return "local";
    case SpeciesClass::ExternalRegulator: return "external_regulator";
    case SpeciesClass::ExternalReagent: return "external_reagent";
  }
  return "?";
}

const ClassifiedSpecies* SpeciesClassification::find(const std::string& module,
                                                     const SpeciesRef& ref) const {
  auto it = per_module.find(module);
  if (it == per_module.end()) return nullptr;
  for (const auto& e : it->second)
    if (e.species == ref) return &e;
  return nullptr;
}

namespace {

// species touched by a reaction in any role / in a mass-transfer role
void touched_species(const Reaction& rx, std::set<int>& any, std::set<int>& mass) {
  for (const auto& p : rx.reactants) { any.insert(p.species); mass.insert(p.species); }
  for (const auto& p : rx.products) { any.insert(p.species); mass.insert(p.species); }
  for (const auto& p : rx.activators) any.insert(p.species);
  for (const auto& p : rx.inhibitors) any.insert(p.species);
  for (const auto& p : rx.modifiers) any.insert(p.species);
}

}  // namespace

SpeciesClassification classify_species(const ReactionNetwork& net,
                                       const ModulePartition& partition) {
  SpeciesClassification out;
  // per module: which species its reactions touch
  std::map<std::string, std::set<int>> module_species;
  // per species: modules touching it at all / in reactant-product roles
  std::vector<std::set<std::string>> any_touch(net.species.size());
  std::vector<std::set<std::string>> mass_touch(net.species.size());

  for (const auto& rx : net.reactions) {
    const std::string* module = partition.module_of(rx.action);
    if (!module) throw BuildError("partition does not cover reaction " + rx.action);
    std::set<int> any, mass;
    touched_species(rx, any, mass);
    for (int sp : any) {
      module_species[*module].insert(sp);
      any_touch[sp].insert(*module);
    }
    for (int sp : mass) mass_touch[sp].insert(*module);
  }

  for (const auto& [module, species_set] : module_species) {
    auto& entries = out.per_module[module];
    for (int sp : species_set) {
      ClassifiedSpecies e;
      e.species = net.species[sp];
      std::set<std::string> foreign = any_touch[sp];
      foreign.erase(module);
      e.foreign_modules.assign(foreign.begin(), foreign.end());
      if (foreign.empty()) {
        e.cls = SpeciesClass::Local;
      } else {
        bool mass_elsewhere = false;
        for (const auto& m : mass_touch[sp])
          if (m != module) mass_elsewhere = true;
        e.cls = mass_elsewhere ? SpeciesClass::ExternalReagent : SpeciesClass::ExternalRegulator;
      }
      entries.push_back(std::move(e));
    }
    std::sort(entries.begin(), entries.end(),
              [](const ClassifiedSpecies& a, const ClassifiedSpecies& b) {
                return a.species < b.species;
              });
  }
  return out;
}

namespace {

const char* strategy_name(EnvironmentStub::Strategy s) {
  switch (s) {
    case EnvironmentStub::Strategy::FixedInitial: return "fixed_initial";
    case EnvironmentStub::Strategy::ZeroOrderCreation: return "zero_order_creation";
    case EnvironmentStub::Strategy::FirstOrderDegradation: return "first_order_degradation";
  }
  return "?";
}

EnvironmentStub::Strategy strategy_from_name(const std::string& name) {
  if (name == "fixed_initial") return EnvironmentStub::Strategy::FixedInitial;
  if (name == "zero_order_creation") return EnvironmentStub::Strategy::ZeroOrderCreation;
  if (name == "first_order_degradation") return EnvironmentStub::Strategy::FirstOrderDegradation;
  throw IoError("unknown stub strategy '" + name + "'");
}

SpeciesRef parse_species_name(const std::string& name) {
  auto at = name.find('@');
  if (at == std::string::npos || at == 0 || at + 1 >= name.size())
    throw IoError("species name '" + name + "' must look like name@location");
  return {name.substr(0, at), name.substr(at + 1)};
}

std::string sanitize(const SpeciesRef& ref) {
  std::string s = ref.species + "_" + ref.location;
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') c = '_';
  return s;
}

}  // namespace

std::vector<EnvironmentStub> parse_stubs_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("stub file: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("stubs") || !doc["stubs"].is_array())
    throw IoError("stub file must be an object with a 'stubs' array");
  std::vector<EnvironmentStub> out;
  for (const auto& item : doc["stubs"]) {
    EnvironmentStub stub;
    if (!item.contains("species") || !item.contains("strategy"))
      throw IoError("each stub needs 'species' and 'strategy'");
    stub.target = parse_species_name(item["species"].get<std::string>());
    stub.strategy = strategy_from_name(item["strategy"].get<std::string>());
    if (item.contains("rate")) stub.rate = item["rate"].get<double>();
    if (item.contains("initial")) stub.initial = item["initial"].get<double>();
    if (item.contains("amount")) stub.initial = item["amount"].get<double>();
    if (item.contains("note")) stub.note = item["note"].get<std::string>();
    if (stub.rate < 0 || stub.initial < 0)
      throw IoError("stub for " + stub.target.str() + " has a negative rate or amount");
    out.push_back(std::move(stub));
  }
  return out;
}

std::vector<EnvironmentStub> read_stubs_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_stubs_json(ss.str());
}

std::string stubs_to_json(const std::vector<EnvironmentStub>& stubs) {
  json arr = json::array();
  for (const auto& s : stubs) {
    json item;
    item["species"] = s.target.str();
    item["strategy"] = strategy_name(s.strategy);
    if (s.strategy == EnvironmentStub::Strategy::FixedInitial) {
      item["amount"] = s.initial;
    } else {
      item["rate"] = s.rate;
      item["initial"] = s.initial;
    }
    if (!s.note.empty()) item["note"] = s.note;
    arr.push_back(std::move(item));
  }
  json doc;
  doc["stubs"] = std::move(arr);
  return doc.dump(2) + "\n";
}

BioPepaSystem extract_module(const BioPepaSystem& system, const ModulePartition& partition,
                             const std::string& module, const std::vector<EnvironmentStub>& stubs) {
  auto it = partition.modules.find(module);
  if (it == partition.modules.end()) throw BuildError("unknown module " + module);
  const std::set<std::string> module_actions(it->second.begin(), it->second.end());

  ReactionNetwork net = derive_reactions(system);
  auto diags = partition.validate(net);
  if (count_errors(diags) > 0) throw BuildError("invalid partition: " + diags.front().message);
  auto classification = classify_species(net, partition);

  const auto& entries = classification.per_module.at(module);
  std::map<SpeciesRef, const EnvironmentStub*> stub_of;
  for (const auto& s : stubs) stub_of[s.target] = &s;

  // every external reagent needs a stub (a fixed initial counts)
  std::string offenders;
  for (const auto& e : entries) {
    if (e.cls == SpeciesClass::ExternalReagent && !stub_of.count(e.species))
      offenders += (offenders.empty() ? "" : ", ") + e.species.str();
  }
  if (!offenders.empty())
    throw BuildError("module " + module + " has external reagents without stubs: " + offenders);
  for (const auto& s : stubs) {
    bool in_module = false;
    for (const auto& e : entries)
      if (e.species == s.target) {
        in_module = true;
        if (e.cls == SpeciesClass::Local)
          throw BuildError("stub targets local species " + s.target.str());
      }
    if (!in_module) throw BuildError("stub targets " + s.target.str() + " outside module " + module);
  }

  BioPepaSystem out;
  std::set<SpeciesRef> kept_species;
  for (const auto& e : entries) kept_species.insert(e.species);

  for (const auto& loc : system.locations)
    for (const auto& ref : kept_species)
      if (ref.location == loc.name &&
          std::none_of(out.locations.begin(), out.locations.end(),
                       [&](const Location& l) { return l.name == loc.name; }))
        out.locations.push_back(loc);

  out.parameters = system.parameters;

  for (const auto& r : system.rates)
    if (module_actions.count(r.action)) out.rates.push_back(r);

  for (const auto& info : system.species_info)
    if (kept_species.count(info.subject)) out.species_info.push_back(info);

  // components restricted to module actions, plus stub reactions
  for (const auto& comp : system.components) {
    if (!kept_species.count(comp.subject)) continue;
    SpeciesComponent restricted;
    restricted.subject = comp.subject;
    for (const auto& p : comp.prefixes)
      if (module_actions.count(p.action)) restricted.prefixes.push_back(p);
    if (auto sit = stub_of.find(comp.subject); sit != stub_of.end()) {
      const EnvironmentStub& stub = *sit->second;
      if (stub.strategy == EnvironmentStub::Strategy::ZeroOrderCreation) {
        std::string action = "stub_create_" + sanitize(comp.subject);
        restricted.prefixes.push_back({action, 1, PrefixOp::Product});
        out.rates.push_back({action,
                             ExprNode::make_unary(ExprKind::MassAction,
                                                  ExprNode::make_number(stub.rate)),
                             {}});
      } else if (stub.strategy == EnvironmentStub::Strategy::FirstOrderDegradation) {
        std::string action = "stub_decay_" + sanitize(comp.subject);
        restricted.prefixes.push_back({action, 1, PrefixOp::Reactant});
        out.rates.push_back({action,
                             ExprNode::make_unary(ExprKind::MassAction,
                                                  ExprNode::make_number(stub.rate)),
                             {}});
      }
    }
    if (restricted.prefixes.empty()) continue;  // no role left in this module
    out.components.push_back(std::move(restricted));
  }

  // model component: flat wildcard cooperation, parent initials unless stubbed
  std::map<SpeciesRef, double> initial;
  std::vector<const ModelNode*> stack;
  std::function<void(const ModelPtr&)> walk = [&](const ModelPtr& node) {
    if (!node) return;
    if (node->is_instance) {
      initial[node->subject] = node->initial;
      return;
    }
    walk(node->left);
    walk(node->right);
  };
  walk(system.model);

  ModelPtr tree;
  for (const auto& comp : out.components) {
    double amount = 0.0;
    if (auto iit = initial.find(comp.subject); iit != initial.end()) amount = iit->second;
    if (auto sit = stub_of.find(comp.subject); sit != stub_of.end()) amount = sit->second->initial;
    ModelPtr inst = ModelNode::instance(comp.subject, amount);
    tree = tree ? ModelNode::cooperation(std::move(tree), std::move(inst), SyncSet{true, {}})
                : std::move(inst);
  }
  out.model = std::move(tree);
  return out;
}

EnvironmentStub fit_stub(const EnsembleTrace& reference, const SpeciesRef& species,
                         EnvironmentStub::Strategy hint) {
  int idx = reference.species_index(species.str());
  if (idx < 0) throw BuildError("reference trace does not cover " + species.str());
  const auto& mean = reference.mean[idx];
  const auto& times = reference.times;
  if (times.empty()) throw BuildError("reference trace is empty");

  char note[160];
  EnvironmentStub stub;
  stub.target = species;

  double peak = 0.0;
  for (double v : mean) peak = std::max(peak, v);

  if (hint == EnvironmentStub::Strategy::FixedInitial) {
    stub.strategy = EnvironmentStub::Strategy::FixedInitial;
    stub.initial = peak;
    std::snprintf(note, sizeof note, "reference max over [%g, %g]", times.front(), times.back());
    stub.note = note;
    return stub;
  }
  if (hint == EnvironmentStub::Strategy::FirstOrderDegradation)
    throw BuildError("degradation stubs cannot be fitted from a reference trace");

  // least-squares slope of mean(t) - mean(0) against t, through the origin
  const double m0 = mean.front();
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    stt += times[i] * times[i];
    sty += times[i] * (mean[i] - m0);
  }
  if (stt == 0.0) throw BuildError("reference trace has a degenerate time grid");
  double slope = sty / stt;

  double ss = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double r = mean[i] - m0 - slope * times[i];
    ss += r * r;
  }
  double residual = std::sqrt(ss / times.size());

  // a flat trace has nothing to create; pin the amount instead
  if (std::abs(slope) * (times.back() - times.front()) < 1e-9 * std::max(1.0, peak)) {
    stub.strategy = EnvironmentStub::Strategy::FixedInitial;
    stub.initial = m0;
    std::snprintf(note, sizeof note, "flat reference (slope %.3g); pinned to initial value",
                  slope);
    stub.note = note;
    return stub;
  }

  stub.strategy = EnvironmentStub::Strategy::ZeroOrderCreation;
  stub.rate = slope;
  stub.initial = m0;
  std::snprintf(note, sizeof note,
                "least-squares slope over [%g, %g], rms residual %.3g", times.front(),
                times.back(), residual);
  stub.note = note;
  return stub;
}

TraceComparison compare_traces(const EnsembleTrace& candidate, const EnsembleTrace& reference,
                               const std::vector<std::string>& species) {
  std::vector<std::string> wanted = species;
  if (wanted.empty()) {
    for (const auto& s : reference.species)
      if (candidate.species_index(s) >= 0) wanted.push_back(s);
    if (wanted.empty()) throw BuildError("traces share no species");
  }

  TraceComparison out;
  for (const auto& name : wanted) {
    int ci = candidate.species_index(name);
    int ri = reference.species_index(name);
    if (ci < 0 || ri < 0)
      throw BuildError("species " + name + " is missing from " +
                       (ci < 0 ? "the candidate" : "the reference") + " trace");

    TraceComparison::PerSpecies entry;
    entry.species = name;

    double ref_max = 0.0;
    for (double v : reference.mean[ri]) ref_max = std::max(ref_max, std::abs(v));
    if (ref_max == 0.0) {
      entry.skipped = true;
      out.entries.push_back(entry);
      continue;
    }

    double ss = 0.0, maxdev = 0.0;
    double cand_peak = -1.0, cand_peak_t = 0.0, ref_peak = -1.0, ref_peak_t = 0.0;
    for (std::size_t i = 0; i < reference.times.size(); ++i) {
      const double t = reference.times[i];
      const double rv = reference.mean[ri][i];
      const double cv = candidate.mean_at(ci, t);
      const double d = cv - rv;
      ss += d * d;
      maxdev = std::max(maxdev, std::abs(d));
      if (rv > ref_peak) {
        ref_peak = rv;
        ref_peak_t = t;
      }
      if (cv > cand_peak) {
        cand_peak = cv;
        cand_peak_t = t;
      }
    }
    entry.rmse = std::sqrt(ss / reference.times.size());
    entry.normalized_rmse = entry.rmse / ref_max;
    entry.max_abs_deviation = maxdev;
    entry.peak_time_diff = std::abs(cand_peak_t - ref_peak_t);
    out.worst_normalized_rmse = std::max(out.worst_normalized_rmse, entry.normalized_rmse);
    out.entries.push_back(std::move(entry));
  }
  return out;
}

}  // namespace biopepa
