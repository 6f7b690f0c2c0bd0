#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "maldist/rational.hpp"

namespace maldist {

// Minimal s-expression tree shared by every textual grammar in the project.
class SExpr {
 public:
  static SExpr atom(std::string text);
  static SExpr list(std::vector<SExpr> items);

  bool is_atom() const { return is_atom_; }
  bool is_list() const { return !is_atom_; }
  const std::string& text() const;
  const std::vector<SExpr>& items() const;
  std::size_t size() const { return items_.size(); }
  const SExpr& operator[](std::size_t i) const;

  // Head symbol of a list, or the atom itself; empty for "()".
  std::string head() const;

  Natural as_natural() const;
  std::int64_t as_integer() const;
  Rational as_rational() const;

  std::string to_string() const;
  friend bool operator==(const SExpr&, const SExpr&) = default;

 private:
  bool is_atom_ = true;
  std::string text_;
  std::vector<SExpr> items_;
};

// Parses exactly one expression; trailing input other than whitespace is an error.
SExpr parse_sexpr(std::string_view text);

}  // namespace maldist
