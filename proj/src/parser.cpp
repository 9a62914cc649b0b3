#include "biopepa/parser.hpp"

#include "lexer.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace biopepa {

namespace {

using detail::Lexer;
using detail::Tok;
using detail::Token;
using detail::tok_name;

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string file)
      : toks_(std::move(tokens)), file_(std::move(file)) {}

  BioPepaSystem run() {
    while (!at(Tok::End)) statement();
    resolve_model();
    return std::move(system_);
  }

 private:
  // ---- token plumbing ----
  const Token& peek(int ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_ident(const char* word) const { return at(Tok::Ident) && peek().text == word; }
  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  Token expect(Tok k, const char* context) {
    if (!at(k))
      throw ParseError(std::string("expected ") + tok_name(k) + " in " + context + ", found " +
                           describe(peek()),
                       peek().span, {tok_name(k)});
    return take();
  }
  static std::string describe(const Token& t) {
    if (t.kind == Tok::Ident) return "'" + t.text + "'";
    if (t.kind == Tok::Number) return "number " + t.text;
    return tok_name(t.kind);
  }

  // ---- statements ----
  void statement() {
    if (at_ident("location")) return location_decl();
    if (at_ident("param")) return parameter_decl();
    if (at_ident("rate")) return rate_decl();
    if (at_ident("info")) return info_decl();
    if (at_ident("model")) return model_decl();
    if (at(Tok::Ident)) {
      if (peek(1).kind == Tok::At) return species_component_decl();
      if (peek(1).kind == Tok::Equals) return group_decl();
    }
    throw ParseError("expected a declaration, found " + describe(peek()), peek().span,
                     {"location", "param", "rate", "info", "model", "identifier"});
  }

  void location_decl() {
    take();  // location
    Token name = expect(Tok::Ident, "location declaration");
    expect(Tok::Colon, "location declaration");
    Location loc;
    loc.name = name.text;
    loc.span = name.span;
    loc.size = expect(Tok::Number, "location size").number;
    if (at(Tok::Ident) && !at_ident("compartment") && !at_ident("membrane"))
      loc.unit = take().text;
    expect(Tok::Comma, "location declaration");
    if (at_ident("compartment"))
      loc.kind = LocationKind::Compartment;
    else if (at_ident("membrane"))
      loc.kind = LocationKind::Membrane;
    else
      throw ParseError("expected 'compartment' or 'membrane', found " + describe(peek()),
                       peek().span, {"compartment", "membrane"});
    take();
    expect(Tok::Semi, "location declaration");
    if (std::any_of(system_.locations.begin(), system_.locations.end(),
                    [&](const Location& l) { return l.name == loc.name; }))
      throw ParseError("duplicate location " + loc.name, name.span);
    system_.locations.push_back(std::move(loc));
  }

  void parameter_decl() {
    take();  // param
    Token name = expect(Tok::Ident, "parameter declaration");
    expect(Tok::Equals, "parameter declaration");
    ExprPtr value = parse_expr(false);
    expect(Tok::Semi, "parameter declaration");
    if (std::any_of(system_.parameters.begin(), system_.parameters.end(),
                    [&](const Parameter& p) { return p.name == name.text; }))
      throw ParseError("duplicate parameter " + name.text, name.span);
    // one-pass evaluation: parameters may reference earlier parameters only
    EvalContext ctx;
    ctx.parameter = [&](const std::string& n) -> double {
      for (const auto& p : system_.parameters)
        if (p.name == n) return p.value;
      throw EvalError("unknown parameter " + n);
    };
    double v;
    try {
      v = eval_expr(value, ctx, "parameter " + name.text);
    } catch (const EvalError& e) {
      throw ParseError(e.what(), name.span);
    }
    system_.parameters.push_back({name.text, v, name.span});
  }

  void rate_decl() {
    take();  // rate
    Token name = expect(Tok::Ident, "rate declaration");
    expect(Tok::Equals, "rate declaration");
    ExprPtr body;
    if (at_ident("fMA")) {
      Token f = take();
      expect(Tok::LParen, "fMA rate");
      ExprPtr arg = parse_expr(false);
      expect(Tok::RParen, "fMA rate");
      body = ExprNode::make_unary(ExprKind::MassAction, std::move(arg));
      (void)f;
    } else {
      body = parse_expr(true);
    }
    expect(Tok::Semi, "rate declaration");
    if (std::any_of(system_.rates.begin(), system_.rates.end(),
                    [&](const FunctionalRate& r) { return r.action == name.text; }))
      throw ParseError("duplicate rate for action " + name.text, name.span);
    system_.rates.push_back({name.text, std::move(body), name.span});
  }

  void info_decl() {
    take();  // info
    SpeciesInfo info;
    Token first = peek();
    info.subject = species_ref("species info");
    info.span = first.span;
    expect(Tok::Colon, "species info");
    bool saw_h = false;
    for (;;) {
      Token key = expect(Tok::Ident, "species info entry");
      expect(Tok::Equals, "species info entry");
      double v = signed_number("species info value");
      if (key.text == "h") {
        info.step_size = v;
        saw_h = true;
      } else if (key.text == "max") {
        info.max_amount = v;
      } else {
        throw ParseError("unknown species info field '" + key.text + "'", key.span, {"h", "max"});
      }
      if (at(Tok::Comma)) {
        take();
        continue;
      }
      break;
    }
    expect(Tok::Semi, "species info");
    if (!saw_h) throw ParseError("species info requires a step size h", first.span, {"h"});
    if (std::any_of(system_.species_info.begin(), system_.species_info.end(),
                    [&](const SpeciesInfo& i) { return i.subject == info.subject; }))
      throw ParseError("duplicate species info for " + info.subject.str(), first.span);
    system_.species_info.push_back(std::move(info));
  }

  void species_component_decl() {
    Token first = peek();
    SpeciesRef subject = species_ref("species component");
    expect(Tok::Equals, "species component");
    SpeciesComponent comp;
    comp.subject = subject;
    comp.span = first.span;
    for (;;) {
      comp.prefixes.push_back(prefix_term(subject));
      if (at(Tok::Plus)) {
        take();
        continue;
      }
      break;
    }
    expect(Tok::Semi, "species component");
    if (std::any_of(system_.components.begin(), system_.components.end(),
                    [&](const SpeciesComponent& c) { return c.subject == subject; }))
      throw ParseError("duplicate species component " + subject.str(), first.span);
    system_.components.push_back(std::move(comp));
  }

  PrefixTerm prefix_term(const SpeciesRef& subject) {
    PrefixTerm term;
    if (at(Tok::LParen)) {
      take();
      term.action = expect(Tok::Ident, "prefix term").text;
      expect(Tok::Comma, "prefix term");
      Token k = expect(Tok::Number, "stoichiometry");
      double kv = k.number;
      if (kv < 1 || kv != std::floor(kv))
        throw ParseError("stoichiometry must be a positive integer", k.span);
      term.stoichiometry = static_cast<int>(kv);
      expect(Tok::RParen, "prefix term");
    } else {
      term.action = expect(Tok::Ident, "prefix term").text;
    }
    switch (peek().kind) {
      case Tok::OpReactant: term.op = PrefixOp::Reactant; break;
      case Tok::OpProduct: term.op = PrefixOp::Product; break;
      case Tok::OpActivator: term.op = PrefixOp::Activator; break;
      case Tok::OpInhibitor: term.op = PrefixOp::Inhibitor; break;
      case Tok::OpModifier: term.op = PrefixOp::Modifier; break;
      default:
        throw ParseError("expected a prefix operator after action " + term.action +
                             ", found " + describe(peek()),
                         peek().span, {"'<<'", "'>>'", "'(+)'", "'(-)'", "'(.)'"});
    }
    take();
    Token cont = peek();
    SpeciesRef target = species_ref("prefix continuation");
    if (!(target == subject))
      throw ParseError("prefix continuation " + target.str() + " must repeat the subject " +
                           subject.str(),
                       cont.span);
    return term;
  }

  void group_decl() {
    Token name = take();
    expect(Tok::Equals, "model group");
    ModelPtr tree = coop_expr();
    expect(Tok::Semi, "model group");
    if (groups_.count(name.text))
      throw ParseError("duplicate model group " + name.text, name.span);
    groups_[name.text] = std::move(tree);
  }

  void model_decl() {
    Token kw = take();
    if (model_seen_) throw ParseError("duplicate model component", kw.span);
    model_seen_ = true;
    system_.model = coop_expr();
    expect(Tok::Semi, "model component");
  }

  ModelPtr coop_expr() {
    ModelPtr left = coop_primary();
    for (;;) {
      if (at(Tok::CoopStar)) {
        take();
        ModelPtr right = coop_primary();
        left = ModelNode::cooperation(std::move(left), std::move(right), SyncSet{true, {}});
        continue;
      }
      if (at(Tok::Lt)) {
        take();
        SyncSet sync{false, {}};
        if (!at(Tok::Gt)) {
          for (;;) {
            sync.actions.push_back(expect(Tok::Ident, "cooperation set").text);
            if (at(Tok::Comma)) {
              take();
              continue;
            }
            break;
          }
        }
        expect(Tok::Gt, "cooperation set");
        std::sort(sync.actions.begin(), sync.actions.end());
        sync.actions.erase(std::unique(sync.actions.begin(), sync.actions.end()),
                           sync.actions.end());
        ModelPtr right = coop_primary();
        left = ModelNode::cooperation(std::move(left), std::move(right), std::move(sync));
        continue;
      }
      break;
    }
    return left;
  }

  ModelPtr coop_primary() {
    if (at(Tok::LParen)) {
      take();
      ModelPtr inner = coop_expr();
      expect(Tok::RParen, "model component");
      return inner;
    }
    Token first = expect(Tok::Ident, "model component");
    if (at(Tok::At)) {
      SpeciesRef ref{first.text, expect_location_part()};
      expect(Tok::LBracket, "species instance");
      ExprPtr init = parse_expr(false);
      expect(Tok::RBracket, "species instance");
      EvalContext ctx;
      ctx.parameter = [&](const std::string& n) -> double {
        for (const auto& p : system_.parameters)
          if (p.name == n) return p.value;
        throw EvalError("unknown parameter " + n + " in initial amount of " + ref.str());
      };
      double v;
      try {
        v = eval_expr(init, ctx, "initial amount of " + ref.str());
      } catch (const EvalError& e) {
        throw ParseError(e.what(), first.span);
      }
      auto node = ModelNode::instance(ref, v);
      const_cast<ModelNode*>(node.get())->span = first.span;
      return node;
    }
    // reference to a previously defined group
    auto it = groups_.find(first.text);
    if (it == groups_.end())
      throw ParseError("unknown model group " + first.text, first.span);
    return it->second;
  }

  std::string expect_location_part() {
    expect(Tok::At, "species reference");
    return expect(Tok::Ident, "species reference").text;
  }

  SpeciesRef species_ref(const char* context) {
    Token name = expect(Tok::Ident, context);
    expect(Tok::At, context);
    Token loc = expect(Tok::Ident, context);
    return {name.text, loc.text};
  }

  double signed_number(const char* context) {
    bool neg = false;
    if (at(Tok::Minus)) {
      take();
      neg = true;
    }
    double v = expect(Tok::Number, context).number;
    return neg ? -v : v;
  }

  // ---- arithmetic expressions ----
  ExprPtr parse_expr(bool allow_species) { return parse_add(allow_species); }

  ExprPtr parse_add(bool allow_species) {
    ExprPtr left = parse_mul(allow_species);
    for (;;) {
      if (at(Tok::Plus)) {
        take();
        left = ExprNode::make_binary(ExprKind::Add, std::move(left), parse_mul(allow_species));
      } else if (at(Tok::Minus)) {
        take();
        left = ExprNode::make_binary(ExprKind::Sub, std::move(left), parse_mul(allow_species));
      } else {
        return left;
      }
    }
  }

  ExprPtr parse_mul(bool allow_species) {
    ExprPtr left = parse_unary(allow_species);
    for (;;) {
      if (at(Tok::Star)) {
        take();
        left = ExprNode::make_binary(ExprKind::Mul, std::move(left), parse_unary(allow_species));
      } else if (at(Tok::Slash)) {
        take();
        left = ExprNode::make_binary(ExprKind::Div, std::move(left), parse_unary(allow_species));
      } else {
        return left;
      }
    }
  }

  ExprPtr parse_unary(bool allow_species) {
    if (at(Tok::Minus)) {
      Token m = take();
      (void)m;
      ExprPtr inner = parse_unary(allow_species);
      // fold a negated literal so serialisation round-trips exactly
      if (inner->kind == ExprKind::Number) return ExprNode::make_number(-inner->number);
      return ExprNode::make_unary(ExprKind::Neg, std::move(inner));
    }
    return parse_pow(allow_species);
  }

  ExprPtr parse_pow(bool allow_species) {
    ExprPtr base = parse_primary(allow_species);
    if (at(Tok::Caret)) {
      take();
      // right-associative; exponent may carry its own unary minus
      ExprPtr exponent = at(Tok::Minus) ? parse_unary(allow_species) : parse_pow(allow_species);
      return ExprNode::make_binary(ExprKind::Pow, std::move(base), std::move(exponent));
    }
    return base;
  }

  ExprPtr parse_primary(bool allow_species) {
    if (at(Tok::Number)) return ExprNode::make_number(take().number);
    if (at(Tok::LParen)) {
      take();
      ExprPtr inner = parse_expr(allow_species);
      expect(Tok::RParen, "expression");
      return inner;
    }
    if (at(Tok::Ident)) {
      Token name = take();
      if (at(Tok::At)) {
        if (!allow_species)
          throw ParseError("species reference " + name.text + " not allowed here", name.span);
        return ExprNode::make_species({name.text, expect_location_part()});
      }
      return ExprNode::make_param(name.text);
    }
    throw ParseError("expected an expression, found " + describe(peek()), peek().span,
                     {"number", "identifier", "'('"});
  }

  void resolve_model() {
    // nothing further: groups are inlined eagerly
  }

  std::vector<Token> toks_;
  std::string file_;
  std::size_t pos_ = 0;
  BioPepaSystem system_;
  std::map<std::string, ModelPtr> groups_;
  bool model_seen_ = false;
};

}  // namespace

BioPepaSystem parse(const std::string& text, const std::string& file) {
  Lexer lexer(text, file);
  Parser parser(lexer.run(), file);
  return parser.run();
}

BioPepaSystem parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

// ---- serialisation ----

namespace {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Cooperation parses left-associatively, so a cooperation in left-child
// position prints bare while one in right-child position needs parentheses
// to keep its shape through a round trip.
void print_model(const ModelPtr& node, std::string& out, bool parenthesise) {
  if (!node) return;
  if (node->is_instance) {
    out += node->subject.str() + "[" + format_number(node->initial) + "]";
    return;
  }
  if (parenthesise) out += "(";
  print_model(node->left, out, false);
  out += " ";
  if (node->sync.star) {
    out += "<*>";
  } else {
    out += "<";
    for (std::size_t i = 0; i < node->sync.actions.size(); ++i) {
      if (i) out += ", ";
      out += node->sync.actions[i];
    }
    out += ">";
  }
  out += " ";
  print_model(node->right, out, !node->right->is_instance);
  if (parenthesise) out += ")";
}

}  // namespace

std::string serialize(const BioPepaSystem& system) {
  std::string out;
  out += "// locations\n";
  for (const auto& l : system.locations) {
    out += "location " + l.name + " : " + format_number(l.size);
    if (!l.unit.empty()) out += " " + l.unit;
    out += l.kind == LocationKind::Compartment ? ", compartment;\n" : ", membrane;\n";
  }
  out += "\n// parameters\n";
  for (const auto& p : system.parameters)
    out += "param " + p.name + " = " + format_number(p.value) + ";\n";
  out += "\n// functional rates\n";
  for (const auto& r : system.rates)
    out += "rate " + r.action + " = " + expr_to_string(r.expression) + ";\n";
  out += "\n// species info\n";
  for (const auto& i : system.species_info) {
    out += "info " + i.subject.str() + " : h = " + format_number(i.step_size);
    if (i.max_amount) out += ", max = " + format_number(*i.max_amount);
    out += ";\n";
  }
  out += "\n// species components\n";
  for (const auto& c : system.components) {
    out += c.subject.str() + " = ";
    for (std::size_t i = 0; i < c.prefixes.size(); ++i) {
      const auto& p = c.prefixes[i];
      if (i) out += " + ";
      if (p.stoichiometry != 1)
        out += "(" + p.action + ", " + std::to_string(p.stoichiometry) + ") ";
      else
        out += p.action + " ";
      out += prefix_op_symbol(p.op);
      out += " " + c.subject.str();
    }
    out += ";\n";
  }
  out += "\n// model component\n";
  if (system.model) {
    std::string m;
    print_model(system.model, m, false);
    out += "model " + m + ";\n";
  }
  return out;
}

}  // namespace biopepa
