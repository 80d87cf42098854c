#pragma once

// Concrete syntax, loosest binding first:
//
//   formula := or ( "->" formula )?               right associative
//   or      := and ( ("|" | "||") and )*
//   and     := binary ( ("&" | "&&") binary )*
//   binary  := unary ( ("U" | "R") binary )?     right associative
//   unary   := ("!" | "X" | "N" | "G" | "F") unary | primary
//   primary := "true" | "false" | ident | "(" formula ")"
//   ident   := [A-Za-z_][A-Za-z0-9_]* ( "#" [A-Za-z0-9_]+ )?
//
// A suffix "#j" marks an agent slot that is bound when a rule is
// instantiated for a concrete agent; "#3" is an already-grounded name.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mergeplan/ltlf/formula.hpp"

namespace mergeplan::ltlf {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& what);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class FragmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Syntax tree exactly as written.
Formula parse_syntax(std::string_view text);

// Canonical form of any formula.
Formula parse_formula(std::string_view text);

// Canonical form, restricted to the obligation fragment (G p / F p).
Formula parse_ltlf(std::string_view text);

}  // namespace mergeplan::ltlf
