#pragma once

// Uniform interface over the two coefficient fields (exact rationals and
// rational functions), plus the expression parser used for parameters and
// printed coefficients.

#include <cctype>
#include <concepts>
#include <string>
#include <string_view>
#include <variant>

#include "qvir/errors.hpp"
#include "qvir/polynomial.hpp"
#include "qvir/rational.hpp"
#include "qvir/rational_function.hpp"

namespace qvir {

inline bool is_zero(const Rational& x) { return x.is_zero(); }
inline bool is_zero(const RationalFunction& x) { return x.is_zero(); }
inline Rational inverse(const Rational& x) { return x.inverse(); }
inline RationalFunction inverse(const RationalFunction& x) { return x.inverse(); }
inline std::string to_string(const Rational& x) { return x.to_string(); }
inline std::string to_string(const RationalFunction& x) { return x.to_string(); }
inline Rational pow(const Rational& x, long e) { return x.pow(e); }
inline RationalFunction pow(const RationalFunction& x, long e) { return x.pow(e); }

template <class F>
concept CoefficientField = requires(const F& a, const F& b) {
  { a + b } -> std::convertible_to<F>;
  { a - b } -> std::convertible_to<F>;
  { a * b } -> std::convertible_to<F>;
  { a / b } -> std::convertible_to<F>;
  { -a } -> std::convertible_to<F>;
  { a == b } -> std::convertible_to<bool>;
  { is_zero(a) } -> std::convertible_to<bool>;
  { inverse(a) } -> std::convertible_to<F>;
  { to_string(a) } -> std::convertible_to<std::string>;
  F(1L);
};

static_assert(CoefficientField<Rational>);
static_assert(CoefficientField<RationalFunction>);

/// Converts a parsed rational function to F; a non-constant value cannot
/// become a Rational.
template <class F>
F field_cast(const RationalFunction& x) {
  if constexpr (std::same_as<F, Rational>) {
    if (!x.is_constant()) throw UsageError("expected a number, got '" + x.to_string() + "'");
    return x.constant_value();
  } else {
    return x;
  }
}

namespace detail {

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, TablePtr table) : text_(text), table_(std::move(table)) {}

  RationalFunction parse() {
    RationalFunction r = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  RationalFunction expr() {
    RationalFunction r = term();
    for (;;) {
      if (eat('+')) r += term();
      else if (eat('-')) r -= term();
      else return r;
    }
  }

  RationalFunction term() {
    RationalFunction r = unary();
    for (;;) {
      if (eat('*')) {
        r *= unary();
      } else if (eat('/')) {
        RationalFunction d = unary();
        if (d.is_zero()) throw DomainError("division by zero in '" + std::string(text_) + "'");
        r /= d;
      } else {
        return r;
      }
    }
  }

  RationalFunction unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  RationalFunction power() {
    RationalFunction base = primary();
    if (!eat('^')) return base;
    skip_ws();
    bool neg = false;
    if (eat('-')) neg = true;
    else eat('+');
    bool paren = eat('(');
    if (paren) {
      if (eat('-')) neg = !neg;
    }
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer exponent");
    long e = std::stol(std::string(text_.substr(start, pos_ - start)));
    if (paren && !eat(')')) fail("expected ')'");
    if (neg) e = -e;
    if (e < 0 && base.is_zero()) throw DomainError("negative power of zero");
    return base.pow(e);
  }

  RationalFunction primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      RationalFunction r = expr();
      if (!eat(')')) fail("expected ')'");
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      RationalFunction r(Rational::parse(text_.substr(start, pos_ - start)));
      return with_table(r);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      if (!table_ || !table_->index_of(name)) fail("unknown symbol '" + name + "'");
      return RationalFunction::symbol(table_, name);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  RationalFunction with_table(const RationalFunction& r) const {
    if (!table_) return r;
    return RationalFunction(table_, r.numerator());
  }

  std::string_view text_;
  TablePtr table_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses an arithmetic expression over the symbols of `table` (which may be
/// null for purely numeric input). Integers, + - * /, ^ with an integer
/// exponent, and parentheses are accepted.
inline RationalFunction parse_expression(std::string_view text, const TablePtr& table = nullptr) {
  return detail::ExpressionParser(text, table).parse();
}

using FieldElement = std::variant<Rational, RationalFunction>;

/// Parses text into the smallest fitting field: a Rational when the value is
/// constant, otherwise a RationalFunction over `table`.
inline FieldElement make_element(std::string_view text, const TablePtr& table = nullptr) {
  RationalFunction r = parse_expression(text, table);
  if (r.is_constant()) return r.constant_value();
  return r;
}

inline std::string to_string(const FieldElement& x) {
  return std::visit([](const auto& v) { return to_string(v); }, x);
}

}  // namespace qvir
