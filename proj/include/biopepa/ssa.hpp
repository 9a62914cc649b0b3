#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "biopepa/network.hpp"
#include "biopepa/trace.hpp"

namespace biopepa {

/// One exact realisation: the initial state plus the ordered firing record.
/// Times are strictly increasing; replaying the events from the initial state
/// never produces a negative count.
struct Trajectory {
  State initial;
  struct Event {
    double time;
    int reaction;
  };
  std::vector<Event> events;
  double end_time = 0.0;
  bool stalled = false;      // all propensities hit zero before end_time
  long long rate_clamps = 0; // negative general-rate evaluations clamped to 0
};

/// Exact stochastic simulation by the Gibson-Bruck next-reaction method.
/// Putative firing times live in an indexed priority queue; firing a reaction
/// redraws its own clock and rescales dependents' clocks by the propensity
/// ratio without consuming fresh randomness. A reaction re-enabled from zero
/// propensity draws a fresh exponential. Deterministic in (network, t_end,
/// seed).
Trajectory simulate(const ReactionNetwork& net, double t_end, std::uint64_t seed);

/// Counts firings per reaction up to the trajectory end.
std::map<std::string, long long> record_firing_counts(const ReactionNetwork& net,
                                                      const Trajectory& trajectory);

/// Samples a trajectory on a time grid as a right-continuous step function.
/// Returns [species][grid] counts.
std::vector<std::vector<std::int64_t>> sample_on_grid(const ReactionNetwork& net,
                                                      const Trajectory& trajectory,
                                                      const std::vector<double>& grid);

/// Uniform grid of `points` times spanning [0, t_end] inclusive.
std::vector<double> uniform_grid(double t_end, int points);

/// Runs `runs` independent simulations with seeds base_seed .. base_seed+runs-1
/// and folds per-point mean/variance in run order (deterministic regardless of
/// `threads`). grid_points >= 2.
EnsembleTrace ensemble(const ReactionNetwork& net, double t_end, int grid_points, int runs,
                       std::uint64_t base_seed, int threads = 1);

/// Ensemble-mean firing counts per reaction, the SSA estimate of the
/// cumulative-reward query.
std::map<std::string, double> ensemble_firing_counts(const ReactionNetwork& net, double t_end,
                                                     int runs, std::uint64_t base_seed);

}  // namespace biopepa
