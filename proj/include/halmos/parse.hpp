#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "halmos/algebra.hpp"
#include "halmos/errors.hpp"
#include "halmos/formula.hpp"
#include "halmos/term.hpp"

namespace halmos {

namespace detail {

enum class TokenKind {
  Ident, Exists, Forall, LParen, RParen, Comma, Equal, Bang, Amp, Pipe, Arrow, Dot, End
};

struct Token {
  TokenKind kind;
  std::string text;
  int line;
  int column;
};

/// Identifiers are runs of [A-Za-z0-9_]; digit-leading names are allowed so
/// that constants like 0 and 1 can be written directly.
class Lexer {
 public:
  Lexer(std::string_view text, int first_line) : text_(text), line_(first_line) {}

  Token next() {
    skip_space();
    const int line = line_;
    const int col = col_;
    if (pos_ >= text_.size()) return {TokenKind::End, "", line, col};
    const char c = text_[pos_];
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        advance();
      }
      std::string word(text_.substr(start, pos_ - start));
      if (word == "exists") return {TokenKind::Exists, std::move(word), line, col};
      if (word == "forall") return {TokenKind::Forall, std::move(word), line, col};
      return {TokenKind::Ident, std::move(word), line, col};
    }
    advance();
    switch (c) {
      case '(': return {TokenKind::LParen, "(", line, col};
      case ')': return {TokenKind::RParen, ")", line, col};
      case ',': return {TokenKind::Comma, ",", line, col};
      case '=': return {TokenKind::Equal, "=", line, col};
      case '!': return {TokenKind::Bang, "!", line, col};
      case '&': return {TokenKind::Amp, "&", line, col};
      case '|': return {TokenKind::Pipe, "|", line, col};
      case '.': return {TokenKind::Dot, ".", line, col};
      case '-':
        if (pos_ < text_.size() && text_[pos_] == '>') {
          advance();
          return {TokenKind::Arrow, "->", line, col};
        }
        throw ParseError("stray '-'", line, col);
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      advance();
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
  int col_ = 1;
};

/// Recursive-descent parser for the formula DSL.  A null signature puts the
/// parser in open mode: parenthesized heads become applications unchecked,
/// bare identifiers become variables.
class FormulaParser {
 public:
  FormulaParser(std::string_view text, const Signature* sig, int first_line)
      : lexer_(text, first_line), sig_(sig) {
    current_ = lexer_.next();
  }

  Formula parse_formula_all() {
    Formula f = formula();
    expect_end();
    return f;
  }

  Term parse_term_all() {
    Term t = term();
    expect_end();
    return t;
  }

 private:
  Formula formula() {
    if (current_.kind == TokenKind::Exists || current_.kind == TokenKind::Forall) {
      const bool ex = current_.kind == TokenKind::Exists;
      shift();
      const Token var = expect(TokenKind::Ident, "quantified variable");
      expect(TokenKind::Dot, "'.' after quantified variable");
      Formula body = formula();
      return ex ? Formula::exists(var.text, std::move(body))
                : Formula::forall(var.text, std::move(body));
    }
    return implication();
  }

  Formula implication() {
    std::vector<Formula> parts;
    parts.push_back(disjunction());
    while (current_.kind == TokenKind::Arrow) {
      shift();
      parts.push_back(disjunction());
    }
    // a -> b -> c associates to the right and desugars to !(a) | (!(b) | c)
    Formula result = parts.back();
    for (std::size_t i = parts.size() - 1; i-- > 0;) {
      result = Formula::disj(Formula::negated(parts[i]), std::move(result));
    }
    return result;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (current_.kind == TokenKind::Pipe) {
      shift();
      f = Formula::disj(std::move(f), conjunction());
    }
    return f;
  }

  Formula conjunction() {
    Formula f = unary();
    while (current_.kind == TokenKind::Amp) {
      shift();
      f = Formula::conj(std::move(f), unary());
    }
    return f;
  }

  Formula unary() {
    if (current_.kind == TokenKind::Bang) {
      shift();
      return Formula::negated(unary());
    }
    return atom();
  }

  Formula atom() {
    if (current_.kind == TokenKind::LParen) {
      shift();
      Formula f = formula();
      expect(TokenKind::RParen, "')'");
      return f;
    }
    Term lhs = term();
    expect(TokenKind::Equal, "'=' between terms");
    Term rhs = term();
    return Formula::equal(std::move(lhs), std::move(rhs));
  }

  Term term() {
    const Token head = expect(TokenKind::Ident, "term");
    if (current_.kind == TokenKind::LParen) {
      shift();
      std::vector<Term> args;
      args.push_back(term());
      while (current_.kind == TokenKind::Comma) {
        shift();
        args.push_back(term());
      }
      expect(TokenKind::RParen, "')'");
      if (sig_) {
        const int op = sig_->index_of(head.text);
        if (op < 0) throw ParseError("unknown operation " + head.text, head.line, head.column);
        const int arity = sig_->operation(op).arity;
        if (arity != static_cast<int>(args.size())) {
          throw ParseError(head.text + " expects " + std::to_string(arity) + " arguments, got " +
                               std::to_string(args.size()),
                           head.line, head.column);
        }
      }
      return Term::apply(head.text, std::move(args));
    }
    if (sig_) {
      const int op = sig_->index_of(head.text);
      if (op >= 0) {
        if (sig_->operation(op).arity != 0) {
          throw ParseError("operation " + head.text + " needs arguments", head.line, head.column);
        }
        return Term::apply(head.text);
      }
    }
    return Term::variable(head.text);
  }

  void shift() { current_ = lexer_.next(); }

  Token expect(TokenKind kind, const std::string& what) {
    if (current_.kind != kind) {
      throw ParseError("expected " + what +
                           (current_.kind == TokenKind::End ? ", found end of input"
                                                            : ", found '" + current_.text + "'"),
                       current_.line, current_.column);
    }
    Token t = current_;
    shift();
    return t;
  }

  void expect_end() {
    if (current_.kind != TokenKind::End) {
      throw ParseError("unexpected trailing input '" + current_.text + "'", current_.line,
                       current_.column);
    }
  }

  Lexer lexer_;
  const Signature* sig_;
  Token current_;
};

}  // namespace detail

/// Parse one term.  With a signature, operation names and arities are
/// checked; without one, any parenthesized head is an application and any
/// bare identifier a variable.
inline Term parse_term(std::string_view text, const Signature* sig = nullptr,
                       int first_line = 1) {
  return detail::FormulaParser(text, sig, first_line).parse_term_all();
}

/// Parse one formula of the DSL.  Precedence, tightest first: !, &, |, ->
/// (right-associative, desugared to negation and disjunction); quantifiers
/// extend as far right as possible.
inline Formula parse_formula(std::string_view text, const Signature* sig = nullptr,
                             int first_line = 1) {
  return detail::FormulaParser(text, sig, first_line).parse_formula_all();
}

/// Parse a point list: points separated by ';' or newlines, each point a
/// comma-separated list of var=label covering exactly the variables of X.
/// '#' starts a comment that runs to the end of its line.
inline std::vector<Point> parse_point_list(std::string_view text, const VariableSet& x,
                                           const FiniteAlgebra& h) {
  std::vector<Point> points;
  int line = 1;
  std::size_t pos = 0;
  std::string chunk;
  auto flush = [&](int at_line) {
    // trim
    std::size_t b = chunk.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
      chunk.clear();
      return;
    }
    std::size_t e = chunk.find_last_not_of(" \t\r");
    std::string body = chunk.substr(b, e - b + 1);
    chunk.clear();

    std::vector<int> values(static_cast<std::size_t>(x.size()), -1);
    std::size_t p = 0;
    while (p < body.size()) {
      std::size_t comma = body.find(',', p);
      std::string item = body.substr(p, comma == std::string::npos ? std::string::npos : comma - p);
      p = comma == std::string::npos ? body.size() : comma + 1;
      std::size_t eq = item.find('=');
      if (eq == std::string::npos) throw ParseError("point entry without '=': " + item, at_line);
      auto trim = [](std::string s) {
        std::size_t b2 = s.find_first_not_of(" \t\r");
        if (b2 == std::string::npos) return std::string();
        std::size_t e2 = s.find_last_not_of(" \t\r");
        return s.substr(b2, e2 - b2 + 1);
      };
      const std::string var = trim(item.substr(0, eq));
      const std::string label = trim(item.substr(eq + 1));
      const int vi = x.index_of(var);
      if (vi < 0) throw ParseError("unknown variable " + var + " in point", at_line);
      const int el = h.label_index(label);
      if (el < 0) throw ParseError("unknown element label " + label, at_line);
      if (values[static_cast<std::size_t>(vi)] >= 0) {
        throw ParseError("variable " + var + " assigned twice", at_line);
      }
      values[static_cast<std::size_t>(vi)] = el;
    }
    for (int i = 0; i < x.size(); ++i) {
      if (values[static_cast<std::size_t>(i)] < 0) {
        throw ParseError("point does not assign " + x.name(i), at_line);
      }
    }
    points.emplace_back(x, &h, std::move(values));
  };

  while (pos < text.size()) {
    const char c = text[pos];
    if (c == '#') {
      while (pos < text.size() && text[pos] != '\n') ++pos;
      continue;
    }
    if (c == ';' || c == '\n') {
      flush(line);
      if (c == '\n') ++line;
      ++pos;
      continue;
    }
    chunk += c;
    ++pos;
  }
  flush(line);
  return points;
}

/// Parse a substitution written as "x := term; y := term".  The domain is
/// the keys in written order.  The codomain is the given variable set when
/// provided, otherwise the image variables in order of first occurrence.
inline Substitution parse_substitution(std::string_view text, const Signature* sig = nullptr,
                                       const VariableSet* codomain = nullptr) {
  std::vector<std::string> domain;
  std::vector<Term> images;
  std::size_t pos = 0;
  int line = 1;
  while (pos <= text.size()) {
    std::size_t semi = text.find(';', pos);
    std::string_view entry = text.substr(pos, semi == std::string_view::npos ? std::string_view::npos
                                                                             : semi - pos);
    const int entry_line = line;
    for (char c : entry) {
      if (c == '\n') ++line;
    }
    pos = semi == std::string_view::npos ? text.size() + 1 : semi + 1;

    std::size_t b = entry.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
      if (semi == std::string_view::npos) break;
      continue;
    }
    std::size_t assign = entry.find(":=");
    if (assign == std::string_view::npos) {
      throw ParseError("substitution entry without ':='", entry_line);
    }
    std::string_view lhs = entry.substr(0, assign);
    std::size_t lb = lhs.find_first_not_of(" \t\r\n");
    std::size_t le = lhs.find_last_not_of(" \t\r\n");
    if (lb == std::string_view::npos) throw ParseError("substitution entry without a variable", entry_line);
    domain.emplace_back(lhs.substr(lb, le - lb + 1));
    images.push_back(parse_term(entry.substr(assign + 2), sig, entry_line));
    if (semi == std::string_view::npos) break;
  }
  if (domain.empty()) throw ParseError("empty substitution", 1);

  VariableSet dom(domain);
  if (codomain) return Substitution(dom, *codomain, std::move(images));
  std::vector<std::string> cod_names;
  for (const Term& t : images) collect_variables(t, cod_names);
  return Substitution(dom, VariableSet(cod_names), std::move(images));
}

}  // namespace halmos
