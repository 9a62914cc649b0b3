#include "biopepa/ctmc.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <unordered_map>

namespace biopepa {

namespace {

struct LevelVecHash {
  std::size_t operator()(const std::vector<std::int16_t>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (auto x : v) {
      h ^= static_cast<std::size_t>(static_cast<std::uint16_t>(x));
      h *= 1099511628211ull;
    }
    return h;
  }
};

}  // namespace

int LevelCtmc::species_index(const std::string& name) const {
  for (std::size_t i = 0; i < species.size(); ++i)
    if (species[i].str() == name) return static_cast<int>(i);
  return -1;
}

int LevelCtmc::reaction_index(const std::string& action) const {
  for (std::size_t i = 0; i < reactions.size(); ++i)
    if (reactions[i] == action) return static_cast<int>(i);
  return -1;
}

LevelCtmc build_level_ctmc(const ReactionNetwork& net, long long state_cap) {
  const std::size_t ns = net.species.size();
  LevelCtmc ctmc;
  ctmc.species = net.species;
  ctmc.step_size.resize(ns);
  ctmc.max_level.resize(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    if (!net.has_info(i))
      throw BuildError("species " + net.species[i].str() +
                       " has no step size; CTMC construction needs full species info");
    if (!net.species_info[i].max_amount)
      throw BuildError("species " + net.species[i].str() +
                       " has no maximum amount; derive one from simulation first");
    ctmc.step_size[i] = net.species_info[i].step_size;
    ctmc.max_level[i] = net.species_info[i].max_level();
  }

  // per reaction: net level change and the shared step size h_r
  struct CompiledReaction {
    std::vector<std::pair<int, int>> delta;  // species -> net level change
    double h_r = 1.0;
    bool moves = false;
  };
  std::vector<CompiledReaction> compiled(net.reactions.size());
  for (std::size_t r = 0; r < net.reactions.size(); ++r) {
    const auto& rx = net.reactions[r];
    ctmc.reactions.push_back(rx.action);
    auto& c = compiled[r];
    c.delta = rx.net_change();
    if (c.delta.empty()) continue;  // changes nothing: no transition
    c.moves = true;
    double h = ctmc.step_size[c.delta.front().first];
    for (const auto& [sp, d] : c.delta) {
      (void)d;
      if (ctmc.step_size[sp] != h)
        throw BuildError("reaction " + rx.action +
                         " changes species with mixed step sizes (h=" + std::to_string(h) +
                         " vs h=" + std::to_string(ctmc.step_size[sp]) + " for " +
                         net.species[sp].str() + ")");
    }
    c.h_r = h;
  }

  // initial level state
  std::vector<std::int16_t> init(ns);
  for (std::size_t i = 0; i < ns; ++i)
    init[i] = static_cast<std::int16_t>(
        amount_to_level(static_cast<double>(net.initial.counts[i]), net.species_info[i]));

  std::unordered_map<std::vector<std::int16_t>, int, LevelVecHash> index;
  index.emplace(init, 0);
  ctmc.states_.push_back(init);
  ctmc.initial_state = 0;

  std::deque<int> frontier{0};
  std::vector<std::vector<LevelCtmc::Transition>> rows;
  rows.emplace_back();

  while (!frontier.empty()) {
    const int sid = frontier.front();
    frontier.pop_front();
    const auto levels = ctmc.states_[sid];

    // bind amounts = level * h; evaluate_rate sees them through a state whose
    // counts are scaled, so build a synthetic amount vector instead
    std::vector<double> amount(ns);
    for (std::size_t i = 0; i < ns; ++i) amount[i] = levels[i] * ctmc.step_size[i];

    for (std::size_t r = 0; r < net.reactions.size(); ++r) {
      const auto& c = compiled[r];
      if (!c.moves) continue;
      const auto& rx = net.reactions[r];

      // reactant roles must hold at least kappa levels
      bool enabled = true;
      for (const auto& p : rx.reactants)
        if (levels[p.species] < p.stoichiometry) {
          enabled = false;
          break;
        }
      if (!enabled) continue;

      // bounds check on the successor
      std::vector<std::int16_t> next = levels;
      for (const auto& [sp, d] : c.delta) {
        int nl = next[sp] + d;
        if (nl < 0 || nl > ctmc.max_level[sp]) {
          enabled = false;
          break;
        }
        next[sp] = static_cast<std::int16_t>(nl);
      }
      if (!enabled) continue;

      // rate at the level state: f(levels * h) / h_r
      EvalContext ctx;
      ctx.parameter = [&](const std::string& name) -> double {
        auto it = net.parameters.find(name);
        if (it == net.parameters.end())
          throw EvalError("reaction " + rx.action + ": unknown parameter " + name);
        return it->second;
      };
      ctx.species_amount = [&](const SpeciesRef& ref) -> double {
        int idx = net.species_index(ref);
        if (idx < 0)
          throw EvalError("reaction " + rx.action + ": unknown species " + ref.str());
        return amount[idx];
      };
      double rate;
      if (rx.rate && rx.rate->kind == ExprKind::MassAction) {
        rate = eval_expr(rx.rate->lhs, ctx, "reaction " + rx.action);
        for (const auto& p : rx.reactants) rate *= std::pow(amount[p.species], p.stoichiometry);
        for (const auto& p : rx.activators) rate *= std::pow(amount[p.species], p.stoichiometry);
      } else {
        rate = eval_expr(rx.rate, ctx, "reaction " + rx.action);
      }
      if (!std::isfinite(rate))
        throw EvalError("reaction " + rx.action + ": rate is not finite at a level state");
      rate /= c.h_r;
      if (rate <= 0.0) continue;

      int target;
      auto it = index.find(next);
      if (it != index.end()) {
        target = it->second;
      } else {
        target = static_cast<int>(ctmc.states_.size());
        if (target >= state_cap)
          throw CapacityError("state cap " + std::to_string(state_cap) +
                                  " exceeded while building the CTMC with levels",
                              static_cast<long long>(ctmc.states_.size()));
        index.emplace(next, target);
        ctmc.states_.push_back(next);
        rows.emplace_back();
        frontier.push_back(target);
      }
      assert(target != sid);  // delta is nonempty, so the successor differs
      rows[sid].push_back({target, rate, static_cast<int>(r)});
    }
  }

  // compile rows to CSR
  ctmc.row_begin_.resize(ctmc.states_.size() + 1, 0);
  std::size_t total = 0;
  for (std::size_t s = 0; s < rows.size(); ++s) {
    ctmc.row_begin_[s] = total;
    total += rows[s].size();
  }
  ctmc.row_begin_[rows.size()] = total;
  ctmc.transitions_.reserve(total);
  ctmc.exit_rate_.resize(rows.size(), 0.0);
  for (std::size_t s = 0; s < rows.size(); ++s) {
    double exit = 0.0;
    for (const auto& t : rows[s]) {
      ctmc.transitions_.push_back(t);
      exit += t.rate;
    }
    ctmc.exit_rate_[s] = exit;
    ctmc.max_exit_rate_ = std::max(ctmc.max_exit_rate_, exit);
  }
  return ctmc;
}

// ---- Poisson window ----

PoissonWindow poisson_window(double mu, double epsilon) {
  PoissonWindow w;
  if (mu <= 0) {
    w.left = w.right = 0;
    w.weight = {1.0};
    w.total = 1.0;
    return w;
  }
  const long long mode = static_cast<long long>(mu);
  auto log_pmf = [mu](long long k) {
    return -mu + k * std::log(mu) - std::lgamma(static_cast<double>(k) + 1.0);
  };
  // expand symmetrically from the mode until the captured mass suffices
  long long lo = mode, hi = mode;
  double mass = std::exp(log_pmf(mode));
  while (mass < 1.0 - epsilon) {
    const bool can_left = lo > 0;
    double next_lo = can_left ? std::exp(log_pmf(lo - 1)) : 0.0;
    double next_hi = std::exp(log_pmf(hi + 1));
    if (can_left && next_lo >= next_hi) {
      --lo;
      mass += next_lo;
    } else {
      ++hi;
      mass += next_hi;
    }
    if (hi - lo > 40000000) throw EvalError("poisson window failed to converge");
  }
  w.left = lo;
  w.right = hi;
  w.weight.resize(static_cast<std::size_t>(hi - lo + 1));
  for (long long k = lo; k <= hi; ++k)
    w.weight[static_cast<std::size_t>(k - lo)] = std::exp(log_pmf(k));
  w.total = mass;
  return w;
}

// ---- transient solver ----

TransientSolver::TransientSolver(const LevelCtmc& ctmc, double epsilon)
    : ctmc_(ctmc), epsilon_(epsilon) {
  const std::size_t n = ctmc.state_count();
  lambda_ = 1.02 * ctmc.max_exit_rate();

  // uniformized DTMC P = I + Q / Lambda in CSR form
  row_begin_.resize(n + 1, 0);
  if (lambda_ > 0) {
    for (std::size_t s = 0; s < n; ++s)
      row_begin_[s + 1] = row_begin_[s] + (ctmc.out(static_cast<int>(s)).end() -
                                           ctmc.out(static_cast<int>(s)).begin()) +
                          1;
    col_.resize(row_begin_[n]);
    prob_.resize(row_begin_[n]);
    for (std::size_t s = 0; s < n; ++s) {
      std::size_t at = row_begin_[s];
      double stay = 1.0 - ctmc.exit_rate(static_cast<int>(s)) / lambda_;
      col_[at] = static_cast<int>(s);
      prob_[at] = stay;
      ++at;
      for (const auto& t : ctmc.out(static_cast<int>(s))) {
        col_[at] = t.target;
        prob_[at] = t.rate / lambda_;
        ++at;
      }
    }
  }
  reset();
}

void TransientSolver::reset() {
  dist_.time = 0.0;
  dist_.probability.assign(ctmc_.state_count(), 0.0);
  dist_.probability[ctmc_.initial_state] = 1.0;
}

const TransientDistribution& TransientSolver::advance_to(double t) {
  if (t < 0) throw EvalError("transient time must be nonnegative");
  if (t < dist_.time)
    throw EvalError("transient times must be nondecreasing (reset to go back)");
  advance_by(t - dist_.time);
  dist_.time = t;
  return dist_;
}

void TransientSolver::advance_by(double dt) {
  if (dt <= 0 || lambda_ <= 0) return;  // absorbing-only chains stay put
  const double mu = lambda_ * dt;
  PoissonWindow win = poisson_window(mu, epsilon_);

  const std::size_t n = ctmc_.state_count();
  scratch_a_ = dist_.probability;          // psi_k, k = 0
  scratch_b_.assign(n, 0.0);               // accumulator
  std::vector<double>& psi = scratch_a_;
  std::vector<double>& acc = scratch_b_;
  std::vector<double> next(n);

  for (long long k = 0;; ++k) {
    if (k >= win.left && k <= win.right) {
      const double wk = win.weight[static_cast<std::size_t>(k - win.left)];
      for (std::size_t i = 0; i < n; ++i) acc[i] += wk * psi[i];
    }
    if (k >= win.right) break;
    // psi <- psi * P
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      const double p = psi[s];
      if (p == 0.0) continue;
      for (std::size_t e = row_begin_[s]; e < row_begin_[s + 1]; ++e)
        next[col_[e]] += p * prob_[e];
    }
    psi.swap(next);
  }

  // renormalise: the only missing mass is the truncated Poisson tail
  double sum = 0.0;
  for (double v : acc) sum += v;
  assert(sum > 1.0 - epsilon_ * 10 - 1e-9);
  if (sum > 0)
    for (double& v : acc) v /= sum;
  dist_.probability.swap(acc);
}

double TransientSolver::accumulate_reward(const std::vector<double>& reward_rate, double t) {
  if (reward_rate.size() != ctmc_.state_count())
    throw EvalError("reward vector size mismatch");
  if (t < dist_.time) throw EvalError("cumulative times must be nondecreasing");
  double acc = 0.0;
  accumulate_by(reward_rate, t - dist_.time, acc);
  return acc;
}

void TransientSolver::accumulate_by(const std::vector<double>& reward_rate, double dt,
                                    double& acc) {
  if (dt <= 0) return;
  const std::size_t n = ctmc_.state_count();
  if (lambda_ <= 0) {
    // frozen chain: reward accrues linearly in the current distribution
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) r += dist_.probability[i] * reward_rate[i];
    acc += r * dt;
    return;
  }
  const double mu = lambda_ * dt;
  PoissonWindow win = poisson_window(mu, epsilon_);

  // int_0^dt psi(u) du = (1/Lambda) sum_k P(Pois(mu) > k) psi_k
  // where the tail P(> k) is 1 - prefix sum of the window weights
  std::vector<double> psi = dist_.probability;
  std::vector<double> next(n);
  double prefix = 0.0;
  for (long long k = 0;; ++k) {
    if (k >= win.left && k <= win.right)
      prefix += win.weight[static_cast<std::size_t>(k - win.left)];
    const double tail = std::max(0.0, 1.0 - prefix);
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) r += psi[i] * reward_rate[i];
    acc += tail * r / lambda_;
    if (k >= win.right) break;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      const double p = psi[s];
      if (p == 0.0) continue;
      for (std::size_t e = row_begin_[s]; e < row_begin_[s + 1]; ++e)
        next[col_[e]] += p * prob_[e];
    }
    psi.swap(next);
  }
}

TransientDistribution transient(const LevelCtmc& ctmc, double t, double epsilon) {
  TransientSolver solver(ctmc, epsilon);
  return solver.advance_to(t);
}

}  // namespace biopepa
