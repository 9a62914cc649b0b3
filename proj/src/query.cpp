#include "biopepa/query.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "lexer.hpp"

namespace biopepa {

namespace {

using detail::Lexer;
using detail::Tok;
using detail::Token;
using detail::tok_name;

class QueryParser {
 public:
  QueryParser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  std::vector<Query> run() {
    std::vector<Query> out;
    while (!at(Tok::End)) out.push_back(query(static_cast<int>(out.size()) + 1));
    return out;
  }

 private:
  const Token& peek(int ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(Tok k) const { return peek().kind == k; }
  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  Token expect(Tok k, const char* context) {
    if (!at(k))
      throw ParseError(std::string("expected ") + tok_name(k) + " in " + context, peek().span,
                       {tok_name(k)});
    return take();
  }

  Query query(int ordinal) {
    Query q;
    q.id = "q" + std::to_string(ordinal);
    if (at(Tok::Ident) && peek(1).kind == Tok::Colon && peek().text != "P" && peek().text != "R") {
      q.id = take().text;
      take();  // ':'
    }
    Token head = expect(Tok::Ident, "query");
    if (head.text == "P") {
      q.kind = Query::Kind::Probability;
      expect(Tok::LBracket, "probability query");
      q.species = species_ref();
      switch (peek().kind) {
        case Tok::Gt: q.cmp = Query::Cmp::Gt; break;
        case Tok::Ge: q.cmp = Query::Cmp::Ge; break;
        case Tok::Lt: q.cmp = Query::Cmp::Lt; break;
        case Tok::Le: q.cmp = Query::Cmp::Le; break;
        case Tok::Equals: q.cmp = Query::Cmp::Eq; break;
        default:
          throw ParseError("expected a comparison operator", peek().span,
                           {"'>'", "'>='", "'<'", "'<='", "'='"});
      }
      take();
      Token level = expect(Tok::Number, "level threshold");
      if (level.number < 0 || level.number != std::floor(level.number))
        throw ParseError("level threshold must be a nonnegative integer", level.span);
      q.level = static_cast<int>(level.number);
      expect(Tok::RBracket, "probability query");
    } else if (head.text == "R") {
      expect(Tok::LBracket, "reward query");
      if (at(Tok::Ident) && peek().text == "count") {
        q.kind = Query::Kind::CumulativeReward;
        take();
        expect(Tok::LParen, "count reward");
        for (;;) {
          q.reactions.push_back(expect(Tok::Ident, "reaction name").text);
          if (at(Tok::Comma)) {
            take();
            continue;
          }
          break;
        }
        expect(Tok::RParen, "count reward");
      } else {
        q.kind = Query::Kind::InstantaneousReward;
        q.reward = parse_expr();
      }
      expect(Tok::RBracket, "reward query");
    } else {
      throw ParseError("expected 'P' or 'R', found '" + head.text + "'", head.span, {"P", "R"});
    }

    expect(Tok::At, "query times");
    q.times = times();
    expect(Tok::Semi, "query");
    return q;
  }

  std::vector<double> times() {
    std::vector<double> out;
    double first = expect(Tok::Number, "time point").number;
    if (at(Tok::DotDot)) {
      take();
      double last = expect(Tok::Number, "time range end").number;
      Token kw = expect(Tok::Ident, "time range");
      if (kw.text != "step") throw ParseError("expected 'step'", kw.span, {"step"});
      double step = expect(Tok::Number, "time step").number;
      if (step <= 0) throw ParseError("time step must be positive", kw.span);
      if (last < first) throw ParseError("time range is reversed", kw.span);
      // tolerate round-off at the far end of the range
      for (double t = first; t <= last + step * 1e-9; t += step) out.push_back(std::min(t, last));
    } else {
      out.push_back(first);
      while (at(Tok::Comma)) {
        take();
        out.push_back(expect(Tok::Number, "time point").number);
      }
    }
    for (double t : out)
      if (t < 0) throw ParseError("time points must be nonnegative", peek().span);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  SpeciesRef species_ref() {
    Token name = expect(Tok::Ident, "species reference");
    expect(Tok::At, "species reference");
    Token loc = expect(Tok::Ident, "species reference");
    return {name.text, loc.text};
  }

  // arithmetic over numbers, parameters and amount(species)
  ExprPtr parse_expr() { return parse_add(); }
  ExprPtr parse_add() {
    ExprPtr left = parse_mul();
    for (;;) {
      if (at(Tok::Plus)) {
        take();
        left = ExprNode::make_binary(ExprKind::Add, std::move(left), parse_mul());
      } else if (at(Tok::Minus)) {
        take();
        left = ExprNode::make_binary(ExprKind::Sub, std::move(left), parse_mul());
      } else {
        return left;
      }
    }
  }
  ExprPtr parse_mul() {
    ExprPtr left = parse_unary();
    for (;;) {
      if (at(Tok::Star)) {
        take();
        left = ExprNode::make_binary(ExprKind::Mul, std::move(left), parse_unary());
      } else if (at(Tok::Slash)) {
        take();
        left = ExprNode::make_binary(ExprKind::Div, std::move(left), parse_unary());
      } else {
        return left;
      }
    }
  }
  ExprPtr parse_unary() {
    if (at(Tok::Minus)) {
      take();
      ExprPtr inner = parse_unary();
      if (inner->kind == ExprKind::Number) return ExprNode::make_number(-inner->number);
      return ExprNode::make_unary(ExprKind::Neg, std::move(inner));
    }
    return parse_pow();
  }
  ExprPtr parse_pow() {
    ExprPtr base = parse_primary();
    if (at(Tok::Caret)) {
      take();
      ExprPtr exponent = at(Tok::Minus) ? parse_unary() : parse_pow();
      return ExprNode::make_binary(ExprKind::Pow, std::move(base), std::move(exponent));
    }
    return base;
  }
  ExprPtr parse_primary() {
    if (at(Tok::Number)) return ExprNode::make_number(take().number);
    if (at(Tok::LParen)) {
      take();
      ExprPtr inner = parse_expr();
      expect(Tok::RParen, "reward expression");
      return inner;
    }
    if (at(Tok::Ident)) {
      Token name = take();
      if (name.text == "amount") {
        expect(Tok::LParen, "amount()");
        SpeciesRef ref = species_ref();
        expect(Tok::RParen, "amount()");
        return ExprNode::make_species(std::move(ref));
      }
      return ExprNode::make_param(name.text);
    }
    throw ParseError("expected a reward expression", peek().span,
                     {"number", "identifier", "amount", "'('"});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Query> parse_queries(const std::string& text, const std::string& file) {
  Lexer lexer(text, file);
  QueryParser parser(lexer.run());
  return parser.run();
}

namespace {

bool level_satisfies(int level, Query::Cmp cmp, int threshold) {
  switch (cmp) {
    case Query::Cmp::Gt: return level > threshold;
    case Query::Cmp::Ge: return level >= threshold;
    case Query::Cmp::Lt: return level < threshold;
    case Query::Cmp::Le: return level <= threshold;
    case Query::Cmp::Eq: return level == threshold;
  }
  return false;
}

// per-state reward vector for an amount expression
std::vector<double> state_rewards(const LevelCtmc& ctmc, const ExprPtr& expr,
                                  const std::map<std::string, double>& parameters,
                                  const std::string& what) {
  EvalContext ctx;
  ctx.zero_over_zero_is_zero = true;
  ctx.parameter = [&](const std::string& name) -> double {
    auto it = parameters.find(name);
    if (it == parameters.end()) throw EvalError(what + ": unknown parameter " + name);
    return it->second;
  };
  const int n = static_cast<int>(ctmc.state_count());
  std::vector<double> out(n);
  for (int s = 0; s < n; ++s) {
    ctx.species_amount = [&](const SpeciesRef& ref) -> double {
      int idx = ctmc.species_index(ref.str());
      if (idx < 0) throw EvalError(what + ": unknown species " + ref.str());
      return ctmc.amount_of(s, idx);
    };
    double v = eval_expr(expr, ctx, what);
    if (!std::isfinite(v))
      throw EvalError(what + ": reward is not finite in state " + std::to_string(s));
    out[s] = v;
  }
  return out;
}

// rate of the labelled reactions out of each state
std::vector<double> firing_rate_rewards(const LevelCtmc& ctmc,
                                        const std::vector<std::string>& reactions,
                                        const std::string& what) {
  std::set<int> wanted;
  for (const auto& name : reactions) {
    int idx = ctmc.reaction_index(name);
    if (idx < 0) throw EvalError(what + ": unknown reaction " + name);
    wanted.insert(idx);
  }
  std::vector<double> out(ctmc.state_count(), 0.0);
  for (int s = 0; s < static_cast<int>(ctmc.state_count()); ++s)
    for (const auto& t : ctmc.out(s))
      if (wanted.count(t.reaction)) out[s] += t.rate;
  return out;
}

}  // namespace

std::vector<QueryResultRow> eval_queries(const LevelCtmc& ctmc, const std::vector<Query>& queries,
                                         const std::map<std::string, double>& parameters) {
  std::vector<QueryResultRow> rows;
  for (const auto& q : queries) {
    TransientSolver solver(ctmc);

    if (q.kind == Query::Kind::Probability) {
      int sp = ctmc.species_index(q.species.str());
      if (sp < 0) throw EvalError("query " + q.id + ": unknown species " + q.species.str());
      if (q.level > ctmc.max_level[sp])
        throw EvalError("query " + q.id + ": level " + std::to_string(q.level) +
                        " is outside [0, " + std::to_string(ctmc.max_level[sp]) + "]");
      for (double t : q.times) {
        const auto& dist = solver.advance_to(t);
        double p = 0.0;
        for (std::size_t s = 0; s < dist.probability.size(); ++s)
          if (level_satisfies(ctmc.level_of(static_cast<int>(s), sp), q.cmp, q.level))
            p += dist.probability[s];
        rows.push_back({q.id, t, p});
      }
    } else if (q.kind == Query::Kind::InstantaneousReward) {
      auto reward = state_rewards(ctmc, q.reward, parameters, "query " + q.id);
      for (double t : q.times) {
        const auto& dist = solver.advance_to(t);
        double v = 0.0;
        for (std::size_t s = 0; s < dist.probability.size(); ++s)
          v += dist.probability[s] * reward[s];
        rows.push_back({q.id, t, v});
      }
    } else {
      auto reward = firing_rate_rewards(ctmc, q.reactions, "query " + q.id);
      double total = 0.0;
      for (double t : q.times) {
        total += solver.accumulate_reward(reward, t);
        solver.advance_to(t);
        rows.push_back({q.id, t, total});
      }
    }
  }
  return rows;
}

std::vector<SweepResultRow> sweep(const ReactionNetwork& base, const std::string& parameter,
                                  const std::vector<double>& values,
                                  const std::vector<Query>& queries, long long state_cap) {
  if (!base.parameters.count(parameter))
    throw EvalError("sweep: unknown parameter " + parameter);
  std::vector<SweepResultRow> rows;
  for (double v : values) {
    ReactionNetwork net = base;
    net.parameters[parameter] = v;
    LevelCtmc ctmc = build_level_ctmc(net, state_cap);
    for (const auto& r : eval_queries(ctmc, queries, net.parameters))
      rows.push_back({r.query, v, r.time, r.value});
  }
  return rows;
}

}  // namespace biopepa
