#pragma once

#include <cctype>
#include <cstdlib>
#include <string>
#include <vector>

#include "biopepa/diagnostics.hpp"

namespace biopepa::detail {

enum class Tok {
  End, Ident, Number,
  Semi, Colon, Comma, Equals, At, LParen, RParen, LBracket, RBracket,
  Plus, Minus, Star, Slash, Caret,
  OpReactant,   // <<
  OpProduct,    // >>
  OpActivator,  // (+)
  OpInhibitor,  // (-)
  OpModifier,   // (.)
  CoopStar,     // <*>
  Lt, Gt, Le, Ge,
  DotDot,       // .. (time ranges in query files)
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  SourceSpan span;
};

inline const char* tok_name(Tok t) {
  switch (t) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Comma: return "','";
    case Tok::Equals: return "'='";
    case Tok::At: return "'@'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Caret: return "'^'";
    case Tok::OpReactant: return "'<<'";
    case Tok::OpProduct: return "'>>'";
    case Tok::OpActivator: return "'(+)'";
    case Tok::OpInhibitor: return "'(-)'";
    case Tok::OpModifier: return "'(.)'";
    case Tok::CoopStar: return "'<*>'";
    case Tok::Lt: return "'<'";
    case Tok::Gt: return "'>'";
    case Tok::Le: return "'<='";
    case Tok::Ge: return "'>='";
    case Tok::DotDot: return "'..'";
  }
  return "?";
}

class Lexer {
 public:
  Lexer(const std::string& text, std::string file) : text_(text), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      Token t = next();
      out.push_back(t);
      if (t.kind == Tok::End) break;
    }
    return out;
  }

 private:
  void skip_space_and_comments() {
    for (;;) {
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) bump();
      if (pos_ + 1 < text_.size() && text_[pos_] == '/' && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') bump();
        continue;
      }
      break;
    }
  }

  Token next() {
    Token t;
    t.span = here(1);
    if (pos_ >= text_.size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        bump();
      t.kind = Tok::Ident;
      t.text = text_.substr(start, pos_ - start);
      t.span.length = static_cast<int>(pos_ - start);
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < text_.size() &&
         std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
      return lex_number();
    }
    switch (c) {
      case ';': bump(); t.kind = Tok::Semi; return t;
      case ':': bump(); t.kind = Tok::Colon; return t;
      case ',': bump(); t.kind = Tok::Comma; return t;
      case '=': bump(); t.kind = Tok::Equals; return t;
      case '@': bump(); t.kind = Tok::At; return t;
      case '[': bump(); t.kind = Tok::LBracket; return t;
      case ']': bump(); t.kind = Tok::RBracket; return t;
      case '+': bump(); t.kind = Tok::Plus; return t;
      case '-': bump(); t.kind = Tok::Minus; return t;
      case '*': bump(); t.kind = Tok::Star; return t;
      case '/': bump(); t.kind = Tok::Slash; return t;
      case '^': bump(); t.kind = Tok::Caret; return t;
      case '.':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '.') {
          bump(); bump();
          t.kind = Tok::DotDot;
          t.span.length = 2;
          return t;
        }
        throw ParseError("unexpected character '.'", here(1));
      case '(':
        if (pos_ + 2 < text_.size() && text_[pos_ + 2] == ')') {
          char mid = text_[pos_ + 1];
          if (mid == '+' || mid == '-' || mid == '.') {
            bump(); bump(); bump();
            t.kind = mid == '+'   ? Tok::OpActivator
                     : mid == '-' ? Tok::OpInhibitor
                                  : Tok::OpModifier;
            t.span.length = 3;
            return t;
          }
        }
        bump();
        t.kind = Tok::LParen;
        return t;
      case ')': bump(); t.kind = Tok::RParen; return t;
      case '<':
        if (pos_ + 2 < text_.size() && text_[pos_ + 1] == '*' && text_[pos_ + 2] == '>') {
          bump(); bump(); bump();
          t.kind = Tok::CoopStar;
          t.span.length = 3;
          return t;
        }
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '<') {
          bump(); bump();
          t.kind = Tok::OpReactant;
          t.span.length = 2;
          return t;
        }
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
          bump(); bump();
          t.kind = Tok::Le;
          t.span.length = 2;
          return t;
        }
        bump();
        t.kind = Tok::Lt;
        return t;
      case '>':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
          bump(); bump();
          t.kind = Tok::OpProduct;
          t.span.length = 2;
          return t;
        }
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
          bump(); bump();
          t.kind = Tok::Ge;
          t.span.length = 2;
          return t;
        }
        bump();
        t.kind = Tok::Gt;
        return t;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", here(1));
    }
  }

  Token lex_number() {
    Token t;
    t.span = here(1);
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) bump();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      // '..' belongs to range syntax, not this literal
      if (!(pos_ + 1 < text_.size() && text_[pos_ + 1] == '.')) {
        bump();
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) bump();
      }
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark_pos = pos_;
      int mark_line = line_, mark_col = col_;
      bump();
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) bump();
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) bump();
      } else {
        // 'e' starts an identifier, not an exponent
        pos_ = mark_pos;
        line_ = mark_line;
        col_ = mark_col;
      }
    }
    t.kind = Tok::Number;
    t.text = text_.substr(start, pos_ - start);
    t.number = std::strtod(t.text.c_str(), nullptr);
    t.span.length = static_cast<int>(pos_ - start);
    return t;
  }

  SourceSpan here(int len) const { return {file_, line_, col_, len}; }
  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& text_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace biopepa::detail
