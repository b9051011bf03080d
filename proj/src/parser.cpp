// Recursive-descent parser for the expression grammar:
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' uint)?
//   base   := number | ident | '(' expr ')' | 'sqrt' '(' expr ')' | '-' base

#include <cctype>
#include <charconv>

#include "oddgeo/error.hpp"
#include "oddgeo/expr.hpp"

namespace oddgeo {
namespace {

class Parser {
 public:
  Parser(std::string_view text, const Chart& chart) : text_(text), chart_(chart) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+')) e = e + term();
      else if (accept('-')) e = e - term();
      else return e;
    }
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      if (accept('*')) e = e * factor();
      else if (accept('/')) e = e / factor();
      else return e;
    }
  }

  Expr factor() {
    Expr b = base();
    if (accept('^')) {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected unsigned integer exponent");
      int exponent = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, exponent);
      if (ec != std::errc()) {
        pos_ = start;
        fail("exponent out of range");
      }
      return pow(b, exponent);
    }
    return b;
  }

  Expr base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (c == '-') {
      ++pos_;
      return -base();
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string_view ident = text_.substr(start, pos_ - start);
      if (ident == "sqrt") {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '(') {
          ++pos_;
          Expr e = expr();
          expect(')');
          return sqrt(e);
        }
        // A chart symbol may legitimately be called "sqrt"; fall through.
      }
      if (auto i = chart_.coord_index(ident)) return Expr::coord(*i);
      if (auto i = chart_.constant_index(ident)) return Expr::constant(*i);
      throw UnknownSymbolError(std::string(ident));
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Expr number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    // Optional exponent part, only when followed by digits.
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return Expr::literal(v);
  }

  std::string_view text_;
  const Chart& chart_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr_text(std::string_view text, const Chart& chart) { return Parser(text, chart).parse(); }

}  // namespace oddgeo
