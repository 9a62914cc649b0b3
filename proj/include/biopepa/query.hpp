#pragma once

#include <map>
#include <string>
#include <vector>

#include "biopepa/ctmc.hpp"
#include "biopepa/expr.hpp"

namespace biopepa {

/// One checkable property over a CTMC with levels, at a list of time points.
struct Query {
  enum class Kind { Probability, InstantaneousReward, CumulativeReward };
  enum class Cmp { Gt, Ge, Lt, Le, Eq };

  std::string id;
  Kind kind = Kind::Probability;
  std::vector<double> times;  // sorted, nonnegative

  // Probability: P[species cmp level]
  SpeciesRef species;
  Cmp cmp = Cmp::Gt;
  int level = 0;

  // InstantaneousReward: expected value of an amount expression
  ExprPtr reward;

  // CumulativeReward: expected firings of these reactions on [0, t]
  std::vector<std::string> reactions;
};

/// Parses the query file grammar, one query per line:
///   P[Ste2active@mem > 0] @ 0..30 step 0.5;
///   ratio: R[amount(A@c) / (amount(A@c) + amount(B@c))] @ 0, 5, 10;
///   R[count(v2, v3)] @ 30;
/// Unlabelled queries get ids q1, q2, ...
std::vector<Query> parse_queries(const std::string& text, const std::string& file = "<query>");

struct QueryResultRow {
  std::string query;
  double time;
  double value;
};

/// Evaluates queries against a built CTMC. Probability thresholds compare
/// level indices; reward expressions see amounts (level * h), with 0/0 = 0.
std::vector<QueryResultRow> eval_queries(const LevelCtmc& ctmc,
                                         const std::vector<Query>& queries,
                                         const std::map<std::string, double>& parameters);

struct SweepResultRow {
  std::string query;
  double parameter_value;
  double time;
  double value;
};

/// Rebuilds the CTMC for each parameter value and evaluates the queries.
std::vector<SweepResultRow> sweep(const ReactionNetwork& base, const std::string& parameter,
                                  const std::vector<double>& values,
                                  const std::vector<Query>& queries, long long state_cap);

}  // namespace biopepa
