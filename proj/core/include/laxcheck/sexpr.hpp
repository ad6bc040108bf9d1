#pragma once

#include "laxcheck/error.hpp"
#include "laxcheck/rational.hpp"

#include <string>
#include <vector>

namespace laxcheck {

/// S-expression node with source spans for diagnostics.
struct SNode {
  enum class Kind : uint8_t { Sym, Num, List };
  Kind kind = Kind::List;
  std::string sym;
  Rat num;
  std::vector<SNode> items;
  int line = 0, col = 0;

  bool isSym(const char* s) const { return kind == Kind::Sym && sym == s; }
  bool headIs(const char* s) const {
    return kind == Kind::List && !items.empty() && items.front().isSym(s);
  }
  std::string where() const { return std::to_string(line) + ":" + std::to_string(col); }
};

/// Parses all toplevel forms; throws SyntaxError with line/column.
std::vector<SNode> parse_sexprs(const std::string& text);
SNode parse_sexpr(const std::string& text); // exactly one toplevel form

std::string print_sexpr(const SNode& n, int indent = 0);

} // namespace laxcheck
