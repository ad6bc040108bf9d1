#include "laxcheck/sexpr.hpp"

#include <cctype>
#include <sstream>

namespace laxcheck {

namespace {

struct Lexer {
  const std::string& s;
  size_t i = 0;
  int line = 1, col = 1;

  void bump() {
    if (i < s.size() && s[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  }
  void skipWs() {
    for (;;) {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) bump();
      if (i < s.size() && s[i] == ';') {
        while (i < s.size() && s[i] != '\n') bump();
        continue;
      }
      break;
    }
  }
  bool atEnd() {
    skipWs();
    return i >= s.size();
  }
};

bool isDelim(char c) {
  return c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c));
}

// A token is numeric when it parses fully as [+-]?digits[/digits].
bool parseRat(const std::string& tok, Rat& out) {
  size_t p = 0;
  bool negative = false;
  if (p < tok.size() && (tok[p] == '+' || tok[p] == '-')) {
    negative = tok[p] == '-';
    ++p;
  }
  if (p >= tok.size() || !std::isdigit(static_cast<unsigned char>(tok[p]))) return false;
  size_t numStart = p;
  while (p < tok.size() && std::isdigit(static_cast<unsigned char>(tok[p]))) ++p;
  Int num(tok.substr(numStart, p - numStart));
  Int den = 1;
  if (p < tok.size()) {
    if (tok[p] != '/') return false;
    ++p;
    size_t denStart = p;
    while (p < tok.size() && std::isdigit(static_cast<unsigned char>(tok[p]))) ++p;
    if (p != tok.size() || denStart == p) return false;
    den = Int(tok.substr(denStart, p - denStart));
    if (den == 0) return false;
  }
  out = Rat(num, den);
  if (negative) out = -out;
  return true;
}

SNode parseNode(Lexer& lx, int depth) {
  if (depth > 200)
    fail(Errc::SyntaxError, "nesting too deep at " + std::to_string(lx.line) + ":" + std::to_string(lx.col));
  lx.skipWs();
  if (lx.i >= lx.s.size()) fail(Errc::SyntaxError, "unexpected end of input");
  SNode n;
  n.line = lx.line;
  n.col = lx.col;
  char c = lx.s[lx.i];
  if (c == '(') {
    lx.bump();
    n.kind = SNode::Kind::List;
    for (;;) {
      lx.skipWs();
      if (lx.i >= lx.s.size()) fail(Errc::SyntaxError, "unclosed '(' opened at " + n.where());
      if (lx.s[lx.i] == ')') {
        lx.bump();
        break;
      }
      n.items.push_back(parseNode(lx, depth + 1));
    }
    return n;
  }
  if (c == ')') fail(Errc::SyntaxError, "unexpected ')' at " + n.where());
  std::string tok;
  while (lx.i < lx.s.size() && !isDelim(lx.s[lx.i])) {
    tok.push_back(lx.s[lx.i]);
    lx.bump();
  }
  Rat r;
  if (parseRat(tok, r)) {
    n.kind = SNode::Kind::Num;
    n.num = r;
  } else {
    n.kind = SNode::Kind::Sym;
    n.sym = tok;
  }
  return n;
}

} // namespace

std::vector<SNode> parse_sexprs(const std::string& text) {
  Lexer lx{text};
  std::vector<SNode> out;
  while (!lx.atEnd()) out.push_back(parseNode(lx, 0));
  return out;
}

SNode parse_sexpr(const std::string& text) {
  auto all = parse_sexprs(text);
  if (all.size() != 1) fail(Errc::SyntaxError, "expected exactly one toplevel form");
  return std::move(all.front());
}

namespace {

size_t flatSize(const SNode& n) {
  if (n.kind != SNode::Kind::List) return 1;
  size_t s = 2;
  for (const auto& it : n.items) s += flatSize(it);
  return s;
}

} // namespace

std::string print_sexpr(const SNode& n, int indent) {
  std::ostringstream os;
  switch (n.kind) {
    case SNode::Kind::Sym:
      return n.sym;
    case SNode::Kind::Num:
      return to_string(n.num);
    case SNode::Kind::List: {
      os << "(";
      bool flat = flatSize(n) <= 24;
      for (size_t i = 0; i < n.items.size(); ++i) {
        if (i) {
          if (flat)
            os << " ";
          else
            os << "\n" << std::string(size_t(indent) + 2, ' ');
        }
        os << print_sexpr(n.items[i], flat ? indent : indent + 2);
      }
      os << ")";
      return os.str();
    }
  }
  return "";
}

} // namespace laxcheck
