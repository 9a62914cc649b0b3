#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biopepa/network.hpp"

namespace biopepa {

/// Explicit CTMC over species levels. States are the reachable level vectors;
/// transitions carry positive rates and the label of the inducing reaction.
class LevelCtmc {
 public:
  struct Transition {
    int target;
    double rate;
    int reaction;
  };

  std::vector<SpeciesRef> species;      // network order
  std::vector<double> step_size;        // h per species
  std::vector<int> max_level;           // per species
  std::vector<std::string> reactions;   // labels, network order

  int initial_state = 0;

  std::size_t state_count() const { return row_begin_.size() - 1; }
  std::size_t transition_count() const { return transitions_.size(); }

  const std::vector<std::int16_t>& levels(int state) const { return states_[state]; }
  int level_of(int state, int species_idx) const { return states_[state][species_idx]; }
  double amount_of(int state, int species_idx) const {
    return states_[state][species_idx] * step_size[species_idx];
  }

  struct Row {
    const Transition* begin_;
    const Transition* end_;
    const Transition* begin() const { return begin_; }
    const Transition* end() const { return end_; }
  };
  Row out(int state) const {
    return {transitions_.data() + row_begin_[state], transitions_.data() + row_begin_[state + 1]};
  }
  double exit_rate(int state) const { return exit_rate_[state]; }
  double max_exit_rate() const { return max_exit_rate_; }

  int species_index(const std::string& name) const;
  int reaction_index(const std::string& action) const;

  // populated by build_level_ctmc
  std::vector<std::vector<std::int16_t>> states_;
  std::vector<Transition> transitions_;   // grouped by source
  std::vector<std::size_t> row_begin_;    // state -> first transition
  std::vector<double> exit_rate_;
  double max_exit_rate_ = 0.0;
};

/// Builds the CTMC with levels by breadth-first exploration from the initial
/// level state. A reaction moves each reactant level down and each product
/// level up by its stoichiometry; the transition exists iff every resulting
/// level stays inside [0, max_level] and the rate is positive. Rates are
/// f(levels*h) / h_r with h_r the (single) step size of the species the
/// reaction changes. Throws BuildError when a reaction spans mixed step
/// sizes or a species lacks info, CapacityError past `state_cap`.
LevelCtmc build_level_ctmc(const ReactionNetwork& net, long long state_cap = 5000000);

/// Dense transient distribution at one time point.
struct TransientDistribution {
  double time = 0.0;
  std::vector<double> probability;
};

/// Transient solver by uniformization: Lambda = 1.02 * max exit rate, Poisson
/// mixture of DTMC powers truncated to drop < epsilon mass, renormalised per
/// advance. Supports incremental advance along a sorted time list.
class TransientSolver {
 public:
  explicit TransientSolver(const LevelCtmc& ctmc, double epsilon = 1e-10);

  /// Distribution at absolute time t; t must not decrease between calls
  /// unless reset() is used.
  const TransientDistribution& advance_to(double t);
  void reset();

  const TransientDistribution& current() const { return dist_; }

  /// Expected total reward accumulated on [0, t] for a per-state reward rate
  /// vector, via the cumulative uniformization formulation. Must be driven
  /// with the same nondecreasing time sequence as advance_to.
  double accumulate_reward(const std::vector<double>& reward_rate, double t);

 private:
  void advance_by(double dt);
  void accumulate_by(const std::vector<double>& reward_rate, double dt, double& acc);

  const LevelCtmc& ctmc_;
  double epsilon_;
  double lambda_ = 0.0;
  // uniformized DTMC in CSR form (includes diagonal self-mass)
  std::vector<std::size_t> row_begin_;
  std::vector<int> col_;
  std::vector<double> prob_;
  TransientDistribution dist_;
  std::vector<double> scratch_a_, scratch_b_;
};

TransientDistribution transient(const LevelCtmc& ctmc, double t, double epsilon = 1e-10);

/// Poisson(mu) probabilities w[left..right] covering at least 1 - epsilon of
/// the mass, computed stably around the mode.
struct PoissonWindow {
  long long left = 0;
  long long right = 0;
  std::vector<double> weight;  // weight[k - left]
  double total = 0.0;
};
PoissonWindow poisson_window(double mu, double epsilon);

}  // namespace biopepa
