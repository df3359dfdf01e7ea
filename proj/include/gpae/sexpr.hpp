#pragma once

#include <string>
#include <string_view>

#include "gpae/tree.hpp"

namespace gpae {

// Reports 1-based line/column of the offending token.
class ParseError : public FormatError {
 public:
  ParseError(int line, int col, const std::string& message);
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

// Prefix s-expression, one line, e.g. "(add x0 (sin x1))". Constants use
// the shortest decimal form that parses back to the same double.
std::string serialize_tree(const ExprTree& tree);

// Parses a single expression; trailing whitespace is allowed, anything
// else is an error. Feature indices must fall inside `visible`.
ExprTree parse_tree(std::string_view text, Scope visible);

}  // namespace gpae
