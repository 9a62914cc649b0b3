#include "biopepa/ssa.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <future>
#include <limits>

#include "biopepa/indexed_queue.hpp"
#include "biopepa/rng.hpp"

namespace biopepa {

Trajectory simulate(const ReactionNetwork& net, double t_end, std::uint64_t seed) {
  if (!(t_end > 0)) throw BuildError("simulate: t_end must be positive");
  const auto deps = dependency_graph(net);
  const int n = static_cast<int>(net.reactions.size());

  Trajectory traj;
  traj.initial = net.initial;
  traj.end_time = t_end;

  State state = net.initial;
  Rng rng(seed);
  IndexedPriorityQueue queue(static_cast<std::size_t>(n));

  std::vector<double> prop(n);
  bool clamped = false;
  for (int r = 0; r < n; ++r) {
    prop[r] = propensity(net, net.reactions[r], state, &clamped);
    queue.update(r, rng.exponential(prop[r]));
  }

  double now = 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  while (n > 0) {
    const int r = static_cast<int>(queue.min_key());
    const double t = queue.min_value();
    if (t > t_end || t == inf) break;
    assert(t >= now);
    assert(queue.valid());
    now = t;
    apply_reaction(net.reactions[r], state);
    traj.events.push_back({now, r});

    for (int dep : deps[r]) {
      const double a_old = prop[dep];
      const double a_new = propensity(net, net.reactions[dep], state, &clamped);
      prop[dep] = a_new;
      if (dep == r) {
        queue.update(dep, now + rng.exponential(a_new));
      } else if (a_new <= 0.0) {
        queue.update(dep, inf);
      } else if (a_old <= 0.0 || queue.value(dep) == inf) {
        // re-enabled: no residual clock to rescale, draw fresh
        queue.update(dep, now + rng.exponential(a_new));
      } else {
        queue.update(dep, now + (a_old / a_new) * (queue.value(dep) - now));
      }
    }
  }
  if (now < t_end) {
    bool exhausted = queue.min_value() == inf;
    if (exhausted) {
      traj.stalled = true;
      traj.end_time = traj.events.empty() ? 0.0 : traj.events.back().time;
    }
  }
  if (clamped) traj.rate_clamps = 1;  // at least one negative rate was clamped
  return traj;
}

std::map<std::string, long long> record_firing_counts(const ReactionNetwork& net,
                                                      const Trajectory& trajectory) {
  std::map<std::string, long long> counts;
  for (const auto& rx : net.reactions) counts[rx.action] = 0;
  for (const auto& e : trajectory.events) ++counts[net.reactions[e.reaction].action];
  return counts;
}

std::vector<std::vector<std::int64_t>> sample_on_grid(const ReactionNetwork& net,
                                                      const Trajectory& trajectory,
                                                      const std::vector<double>& grid) {
  const std::size_t ns = net.species.size();
  std::vector<std::vector<std::int64_t>> out(ns, std::vector<std::int64_t>(grid.size()));
  State state = trajectory.initial;
  std::size_t e = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    while (e < trajectory.events.size() && trajectory.events[e].time <= grid[g]) {
      apply_reaction(net.reactions[trajectory.events[e].reaction], state);
      ++e;
    }
    for (std::size_t s = 0; s < ns; ++s) out[s][g] = state.counts[s];
  }
  return out;
}

std::vector<double> uniform_grid(double t_end, int points) {
  if (points < 2) throw BuildError("grid needs at least 2 points");
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = t_end * i / (points - 1);
  grid.back() = t_end;
  return grid;
}

EnsembleTrace ensemble(const ReactionNetwork& net, double t_end, int grid_points, int runs,
                       std::uint64_t base_seed, int threads) {
  if (runs < 1) throw BuildError("ensemble: runs must be >= 1");
  const auto grid = uniform_grid(t_end, grid_points);
  const std::size_t ns = net.species.size();

  EnsembleTrace trace;
  trace.times = grid;
  trace.runs = runs;
  for (const auto& s : net.species) trace.species.push_back(s.str());
  trace.mean.assign(ns, std::vector<double>(grid.size(), 0.0));
  trace.variance.assign(ns, std::vector<double>(grid.size(), 0.0));

  auto run_one = [&](int k) {
    auto traj = simulate(net, t_end, base_seed + static_cast<std::uint64_t>(k));
    return sample_on_grid(net, traj, grid);
  };

  int folded = 0;
  auto fold_one = [&](const std::vector<std::vector<std::int64_t>>& sample) {
    const double nk = ++folded;
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const double x = static_cast<double>(sample[s][g]);
        const double d = x - trace.mean[s][g];
        trace.mean[s][g] += d / nk;
        trace.variance[s][g] += d * (x - trace.mean[s][g]);
      }
    }
  };

  if (threads <= 1) {
    for (int k = 0; k < runs; ++k) fold_one(run_one(k));
  } else {
    // workers sample runs independently; the Welford fold happens in run
    // order so the result does not depend on the thread count
    std::vector<std::vector<std::vector<std::int64_t>>> samples(runs);
    std::vector<std::future<void>> futs;
    std::atomic<int> next{0};
    for (int w = 0; w < threads; ++w) {
      futs.push_back(std::async(std::launch::async, [&]() {
        for (;;) {
          int k = next.fetch_add(1);
          if (k >= runs) return;
          samples[k] = run_one(k);
        }
      }));
    }
    for (auto& f : futs) f.get();
    for (int k = 0; k < runs; ++k) fold_one(samples[k]);
  }
  if (runs > 1) {
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t g = 0; g < grid.size(); ++g) trace.variance[s][g] /= (runs - 1);
  } else {
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t g = 0; g < grid.size(); ++g) trace.variance[s][g] = 0.0;
  }
  return trace;
}

std::map<std::string, double> ensemble_firing_counts(const ReactionNetwork& net, double t_end,
                                                     int runs, std::uint64_t base_seed) {
  std::map<std::string, double> mean;
  for (const auto& rx : net.reactions) mean[rx.action] = 0.0;
  for (int k = 0; k < runs; ++k) {
    auto traj = simulate(net, t_end, base_seed + static_cast<std::uint64_t>(k));
    for (const auto& [action, count] : record_firing_counts(net, traj))
      mean[action] += static_cast<double>(count);
  }
  for (auto& [action, total] : mean) total /= runs;
  return mean;
}

}  // namespace biopepa
