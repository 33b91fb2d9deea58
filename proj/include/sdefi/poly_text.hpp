#pragma once

// Canonical text form of Laurent polynomials:
//   3/2*x1^2*x2^-1 - x1 + (1/2+i)*x2 + 7
// Terms are printed in descending graded-lex order.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "sdefi/poly.hpp"

namespace sdefi {

inline std::vector<std::string> default_var_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
  return names;
}

inline std::string monomial_to_string(const ExpVec& e, const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (e[k] == 0) continue;
    if (!out.empty()) out += "*";
    out += names.at(k);
    if (e[k] != 1) out += "^" + std::to_string(e[k]);
  }
  return out;
}

inline std::string to_string(const LaurentPoly& p, const std::vector<std::string>& names) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    const std::string mono = monomial_to_string(e, names);
    std::string term;
    if (mono.empty()) {
      term = c.to_string();
    } else if (c.is_one()) {
      term = mono;
    } else if (c == CRational(-1)) {
      term = "-" + mono;
    } else {
      term = c.to_string() + "*" + mono;
    }
    if (first) {
      out = term;
      first = false;
    } else if (term.front() == '-') {
      out += " - " + term.substr(1);
    } else {
      out += " + " + term;
    }
  }
  return out;
}

inline std::string to_string(const LaurentPoly& p) { return to_string(p, default_var_names(p.dim())); }

namespace detail {

class PolyParser {
 public:
  PolyParser(std::string_view text, const std::vector<std::string>& names)
      : s_(text), names_(names) {}

  LaurentPoly parse() {
    LaurentPoly out(names_.size());
    skip_ws();
    if (at_end()) fail("empty polynomial");
    bool first = true;
    while (!at_end()) {
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = take() == '-' ? -1 : 1;
        skip_ws();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      parse_term(out, sign);
      first = false;
      skip_ws();
    }
    return out;
  }

 private:
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  char take() { return s_[pos_++]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw InputError("cannot parse polynomial '" + std::string(s_) + "' at offset " +
                     std::to_string(pos_) + ": " + why);
  }

  std::string digits() {
    std::string d;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) d += take();
    return d;
  }

  mpq_class number() {
    std::string num = digits();
    if (num.empty()) fail("expected digits");
    if (peek() == '.' || peek() == 'e' || peek() == 'E') fail("decimal literals are not exact; use p/q");
    std::string den = "1";
    if (peek() == '/') {
      ++pos_;
      den = digits();
      if (den.empty()) fail("expected denominator");
    }
    return parse_rational(num + "/" + den);
  }

  bool is_var_name(const std::string& id) const {
    for (const auto& n : names_)
      if (n == id) return true;
    return false;
  }

  std::string identifier_at(std::size_t p) const {
    std::string id;
    if (p < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[p])) || s_[p] == '_')) {
      while (p < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p])) || s_[p] == '_')) id += s_[p++];
    }
    return id;
  }

  // Real or imaginary numeric atom: `3/2`, `3/2i`, `i`.
  CRational atom() {
    if (peek() == 'i' && !is_var_name(identifier_at(pos_))) {
      ++pos_;
      return CRational::imaginary_unit();
    }
    mpq_class q = number();
    if (peek() == 'i' && identifier_at(pos_) == "i") {
      ++pos_;
      return {mpq_class(0), q};
    }
    return {q};
  }

  CRational parenthesized() {
    ++pos_;  // '('
    CRational acc(0);
    skip_ws();
    bool first = true;
    while (peek() != ')') {
      if (at_end()) fail("unterminated '('");
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = take() == '-' ? -1 : 1;
        skip_ws();
      } else if (!first) {
        fail("expected '+' or '-' inside coefficient");
      }
      CRational a = atom();
      acc += sign < 0 ? -a : a;
      first = false;
      skip_ws();
    }
    ++pos_;  // ')'
    return acc;
  }

  void parse_term(LaurentPoly& out, int sign) {
    CRational coeff(1);
    bool have_coeff = false;
    if (peek() == '(') {
      coeff = parenthesized();
      have_coeff = true;
    } else if (std::isdigit(static_cast<unsigned char>(peek())) ||
               (peek() == 'i' && !is_var_name(identifier_at(pos_)))) {
      coeff = atom();
      have_coeff = true;
    }
    ExpVec e(names_.size(), 0);
    skip_ws();
    bool need_factor = !have_coeff;
    if (have_coeff && peek() == '*') {
      ++pos_;
      skip_ws();
      need_factor = true;
    }
    if (need_factor || std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_') {
      while (true) {
        const std::string id = identifier_at(pos_);
        if (id.empty()) fail("expected a variable name");
        std::size_t axis = names_.size();
        for (std::size_t k = 0; k < names_.size(); ++k)
          if (names_[k] == id) axis = k;
        if (axis == names_.size()) fail("unknown variable '" + id + "'");
        pos_ += id.size();
        int power = 1;
        skip_ws();
        if (peek() == '^') {
          ++pos_;
          int psign = 1;
          if (peek() == '-' || peek() == '+') psign = take() == '-' ? -1 : 1;
          const std::string d = digits();
          if (d.empty()) fail("expected exponent");
          power = psign * std::stoi(d);
          skip_ws();
        }
        e[axis] += power;
        if (peek() != '*') break;
        ++pos_;
        skip_ws();
      }
    }
    out.add_term(std::move(e), sign < 0 ? -coeff : coeff);
  }

  std::string_view s_;
  const std::vector<std::string>& names_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Inverse of to_string. Accepts any sum of terms in the canonical grammar
/// (term order and repeated monomials are allowed on input).
inline LaurentPoly parse_poly(std::string_view text, const std::vector<std::string>& names) {
  return detail::PolyParser(text, names).parse();
}

}  // namespace sdefi
