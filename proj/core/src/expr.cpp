#include "laxcheck/expr.hpp"

#include <algorithm>
#include <sstream>

namespace laxcheck {

Expr Expr::constant(const Rat& c) {
  Expr e;
  if (c != 0) e.terms_[Monomial{}] = c;
  return e;
}

void Expr::addTerm(const Monomial& m, const Rat& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Expr add(const Expr& a, const Expr& b) {
  Expr r = a;
  for (const auto& [m, c] : b.terms()) r.addTerm(m, c);
  return r;
}

Expr sub(const Expr& a, const Expr& b) { return add(a, neg(b)); }

Expr scale(const Expr& a, const Rat& c) {
  Expr r;
  if (c == 0) return r;
  for (const auto& [m, k] : a.terms()) r.addTerm(m, k * c);
  return r;
}

Expr neg(const Expr& a) { return scale(a, Rat(-1)); }

namespace {

int crossSign(const Context& ctx, AtomId a, AtomId b) {
  if (ctx.flags().dtSign == DtSign::Central &&
      (ctx.atom(a).kind == AtomKind::Dt || ctx.atom(b).kind == AtomKind::Dt))
    return 1;
  return -1;
}

// Merge two sorted odd lists; returns false when an odd square appears.
bool mergeOdd(const Context& ctx, const std::vector<AtomId>& x, const std::vector<AtomId>& y,
              std::vector<AtomId>& out, int& sign) {
  out.clear();
  out.reserve(x.size() + y.size());
  size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i] == y[j]) return false;
    if (x[i] < y[j]) {
      out.push_back(x[i++]);
    } else {
      // y[j] crosses the remaining elements of x
      for (size_t k = i; k < x.size(); ++k) sign *= crossSign(ctx, y[j], x[k]);
      out.push_back(y[j++]);
    }
  }
  while (i < x.size()) out.push_back(x[i++]);
  while (j < y.size()) out.push_back(y[j++]);
  return true;
}

void mulEven(std::vector<std::pair<AtomId, int32_t>>& acc, const std::vector<std::pair<AtomId, int32_t>>& b) {
  std::vector<std::pair<AtomId, int32_t>> out;
  out.reserve(acc.size() + b.size());
  size_t i = 0, j = 0;
  while (i < acc.size() && j < b.size()) {
    if (acc[i].first == b[j].first) {
      int32_t e = acc[i].second + b[j].second;
      if (e != 0) out.push_back({acc[i].first, e});
      ++i, ++j;
    } else if (acc[i].first < b[j].first) {
      out.push_back(acc[i++]);
    } else {
      out.push_back(b[j++]);
    }
  }
  while (i < acc.size()) out.push_back(acc[i++]);
  while (j < b.size()) out.push_back(b[j++]);
  acc = std::move(out);
}

// Multiply a term into an Expr, reducing radical exponents through their
// defining relation. Returns the canonical Expr of the product term.
Expr termToExpr(const Context& ctx, Monomial m, Rat c) {
  if (c == 0) return Expr::zero();
  // Find a radical with exponent outside {0,1}.
  for (size_t i = 0; i < m.even.size(); ++i) {
    const auto& [a, e] = m.even[i];
    if (ctx.atom(a).kind != AtomKind::Radical) continue;
    if (e == 1) continue;
    int32_t b = ((e % 2) + 2) % 2;
    int32_t k = (e - b) / 2;
    AtomId base = ctx.atom(a).baseAtom;
    Monomial rest = m;
    if (b == 0)
      rest.even.erase(rest.even.begin() + ptrdiff_t(i));
    else
      rest.even[i].second = 1;
    Expr partial = termToExpr(ctx, std::move(rest), c);
    return gmul(ctx, partial, Expr::atomPow(ctx, base, k));
  }
  Expr r;
  r.addTerm(m, c);
  return r;
}

} // namespace

Expr Expr::atomPow(const Context& ctx, AtomId id, int32_t exp) {
  if (exp == 0) return constant(1);
  const AtomDecl& a = ctx.atom(id);
  bool odd = ctx.isOdd(id);
  if (odd) {
    if (exp >= 2) return zero();
    if (exp < 0) fail(Errc::NonInvertibleDenominator, a.name + " is odd");
    Monomial m;
    m.odd.push_back(id);
    Expr e;
    e.addTerm(m, Rat(1));
    return e;
  }
  if (a.kind == AtomKind::Radical) {
    int32_t b = ((exp % 2) + 2) % 2;
    int32_t k = (exp - b) / 2;
    Expr r = constant(1);
    if (b == 1) {
      Monomial m;
      m.even.push_back({id, 1});
      r = Expr();
      r.addTerm(m, Rat(1));
    }
    if (k != 0) r = gmul(ctx, r, atomPow(ctx, a.baseAtom, k));
    return r;
  }
  if (a.kind == AtomKind::DefScalar && exp > 0) return gpow(ctx, ctx.expansion(id), exp);
  if (exp < 0 && !a.invertible) fail(Errc::NonInvertibleDenominator, a.name);
  Monomial m;
  m.even.push_back({id, exp});
  Expr e;
  e.addTerm(m, Rat(1));
  return e;
}

Expr gmul(const Context& ctx, const Expr& a, const Expr& b) {
  Expr r;
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) {
      int sign = 1;
      Monomial m;
      if (!mergeOdd(ctx, ma.odd, mb.odd, m.odd, sign)) continue;
      m.even = ma.even;
      mulEven(m.even, mb.even);
      bool needReduce = false;
      for (const auto& [id, e] : m.even)
        if (ctx.atom(id).kind == AtomKind::Radical && e != 1) {
          needReduce = true;
          break;
        }
      Rat c = ca * cb * sign;
      if (needReduce)
        r = add(r, termToExpr(ctx, std::move(m), c));
      else
        r.addTerm(m, c);
    }
  return r;
}

Expr gpow(const Context& ctx, const Expr& a, int n) {
  if (n < 0) fail(Errc::Internal, "gpow negative");
  Expr r = Expr::constant(1);
  Expr base = a;
  while (n > 0) {
    if (n & 1) r = gmul(ctx, r, base);
    base = gmul(ctx, base, base);
    n >>= 1;
  }
  return r;
}

Expr invert(const Context& ctx, const Expr& a) {
  if (a.termCount() != 1) fail(Errc::NonInvertibleDenominator, "sum of " + std::to_string(a.termCount()) + " terms");
  const auto& [m, c] = *a.terms().begin();
  if (!m.odd.empty()) fail(Errc::NonInvertibleDenominator, "odd factor " + ctx.atom(m.odd.front()).name);
  Expr r = Expr::constant(Rat(1) / c);
  for (const auto& [id, e] : m.even) r = gmul(ctx, r, Expr::atomPow(ctx, id, -e));
  return r;
}

namespace {

std::optional<Rat> ratSqrt(const Rat& r) {
  if (r < 0) return std::nullopt;
  Int n = numerator(r), d = denominator(r);
  Int sn = sqrt(n), sd = sqrt(d);
  if (sn * sn != n || sd * sd != d) return std::nullopt;
  return Rat(sn, sd);
}

} // namespace

Expr ratPow(const Context& ctx, const Expr& a, const Rat& exp) {
  Int num = numerator(exp), den = denominator(exp);
  if (den == 1) {
    long long n = num.convert_to<long long>();
    if (n >= 0) return gpow(ctx, a, int(n));
    return gpow(ctx, invert(ctx, a), int(-n));
  }
  if (den != 2) fail(Errc::NonInvertibleDenominator, "only half-integer powers supported");
  if (a.termCount() != 1) fail(Errc::NonInvertibleDenominator, "half-integer power of a sum");
  const auto& [m, c] = *a.terms().begin();
  if (!m.odd.empty()) fail(Errc::NonInvertibleDenominator, "half-integer power of odd element");
  long long p = num.convert_to<long long>(); // exponent = p/2 with p odd
  Expr r;
  {
    auto sc = ratSqrt(c);
    if (!sc) fail(Errc::NonInvertibleDenominator, "coefficient " + to_string(c) + " has no rational square root");
    // c^(p/2) = sc^p
    Rat k = 1;
    long long ap = p >= 0 ? p : -p;
    for (long long i = 0; i < ap; ++i) k *= *sc;
    if (p < 0) k = Rat(1) / k;
    r = Expr::constant(k);
  }
  for (const auto& [id, e] : m.even) {
    // id^(e*p/2)
    long long twice = (long long)e * p;
    if (twice % 2 == 0) {
      r = gmul(ctx, r, Expr::atomPow(ctx, id, int32_t(twice / 2)));
    } else {
      auto rad = ctx.radicalOf(id);
      if (!rad) fail(Errc::NonInvertibleDenominator, "no declared square root of " + ctx.atom(id).name);
      r = gmul(ctx, r, Expr::atomPow(ctx, *rad, int32_t(twice)));
    }
  }
  return r;
}

bool is_zero(const Context& ctx, const Expr& a) {
  Expr cur = a;
  for (;;) {
    if (cur.isZero()) return true;
    // Find a DefScalar present with a negative exponent.
    AtomId z = 0;
    bool found = false;
    int32_t maxNeg = 0;
    for (const auto& [m, c] : cur.terms())
      for (const auto& [id, e] : m.even)
        if (e < 0 && ctx.atom(id).kind == AtomKind::DefScalar) {
          if (!found || id < z) {
            z = id;
            found = true;
          }
        }
    if (!found) return cur.isZero();
    for (const auto& [m, c] : cur.terms())
      for (const auto& [id, e] : m.even)
        if (id == z && e < 0) maxNeg = std::max(maxNeg, -e);
    const Expr& ex = ctx.expansion(z);
    Expr next;
    for (const auto& [m, c] : cur.terms()) {
      int32_t e = 0;
      Monomial rest = m;
      for (size_t i = 0; i < rest.even.size(); ++i)
        if (rest.even[i].first == z) {
          e = rest.even[i].second;
          rest.even.erase(rest.even.begin() + ptrdiff_t(i));
          break;
        }
      Expr t;
      t.addTerm(rest, c);
      next = add(next, gmul(ctx, t, gpow(ctx, ex, int(maxNeg + e))));
    }
    cur = std::move(next);
  }
}

Degree degree_of_monomial(const Context& ctx, const Monomial& m) {
  Degree d;
  for (const auto& [id, e] : m.even) d = d + ctx.atom(id).degree * e;
  for (AtomId id : m.odd) d = d + ctx.atom(id).degree;
  return d;
}

std::optional<Degree> degree_of(const Context& ctx, const Expr& a) {
  std::optional<Degree> d;
  for (const auto& [m, c] : a.terms()) {
    Degree dm = degree_of_monomial(ctx, m);
    if (!d)
      d = dm;
    else if (*d != dm)
      return std::nullopt;
  }
  if (!d) return Degree{};
  return d;
}

std::optional<int> lax_degree_of(const Context& ctx, const Expr& a) {
  std::optional<int> d;
  for (const auto& [m, c] : a.terms()) {
    int dm = degree_of_monomial(ctx, m).lax(ctx.dimM());
    if (!d)
      d = dm;
    else if (*d != dm)
      return std::nullopt;
  }
  if (!d) return 0;
  return d;
}

std::optional<int> parity_of(const Context& ctx, const Expr& a) {
  std::optional<int> p;
  for (const auto& [m, c] : a.terms()) {
    int pm = degree_of_monomial(ctx, m).parity();
    if (!p)
      p = pm;
    else if (*p != pm)
      return std::nullopt;
  }
  if (!p) return 0;
  return p;
}

Expr fdM_component(const Context& ctx, const Expr& a, int fd) {
  Expr r;
  for (const auto& [m, c] : a.terms())
    if (degree_of_monomial(ctx, m).fdM == fd) r.addTerm(m, c);
  return r;
}

Expr strip_dt(const Context& ctx, const Expr& a) {
  Expr r;
  AtomId dt = ctx.dt();
  for (const auto& [m, c] : a.terms()) {
    auto it = std::find(m.odd.begin(), m.odd.end(), dt);
    if (it == m.odd.end()) fail(Errc::Internal, "strip_dt: term without dt");
    // dt is last in the canonical order, so no sign is incurred.
    Monomial n = m;
    n.odd.erase(n.odd.begin() + (it - m.odd.begin()));
    r.addTerm(n, c);
  }
  return r;
}

Rat tensor_number(const Context& ctx, const Monomial& m) {
  Rat t = 0;
  for (const auto& [id, e] : m.even) {
    auto ta = ctx.tensorNumber(id);
    if (!ta) fail(Errc::UndefinedTensorNumber, ctx.atom(id).name);
    t += *ta * e;
  }
  for (AtomId id : m.odd) {
    auto ta = ctx.tensorNumber(id);
    if (!ta) fail(Errc::UndefinedTensorNumber, ctx.atom(id).name);
    t += *ta;
  }
  return t;
}

Rat tensor_number(const Context& ctx, const Expr& a) {
  std::optional<Rat> t;
  for (const auto& [m, c] : a.terms()) {
    Rat tm = tensor_number(ctx, m);
    if (!t)
      t = tm;
    else if (*t != tm)
      fail(Errc::UndefinedTensorNumber, "terms carry different tensor numbers");
  }
  if (!t) fail(Errc::UndefinedTensorNumber, "zero expression");
  return *t;
}

std::string to_string(const Context& ctx, const Monomial& m) {
  std::ostringstream os;
  bool first = true;
  auto sep = [&] {
    if (!first) os << " ";
    first = false;
  };
  for (const auto& [id, e] : m.even) {
    sep();
    if (e == 1)
      os << ctx.atom(id).name;
    else
      os << "(^ " << ctx.atom(id).name << " " << e << ")";
  }
  for (AtomId id : m.odd) {
    sep();
    os << ctx.atom(id).name;
  }
  if (first) os << "1";
  return os.str();
}

std::string to_string(const Context& ctx, const Expr& a) {
  if (a.isZero()) return "0";
  std::ostringstream os;
  bool multi = a.termCount() > 1;
  if (multi) os << "(+ ";
  bool first = true;
  for (const auto& [m, c] : a.terms()) {
    if (!first) os << " ";
    first = false;
    bool one = m.empty();
    if (one) {
      os << to_string(c);
    } else if (c == 1) {
      if (m.even.size() + m.odd.size() > 1)
        os << "(* " << to_string(ctx, m) << ")";
      else
        os << to_string(ctx, m);
    } else {
      os << "(* " << to_string(c) << " " << to_string(ctx, m) << ")";
    }
  }
  if (multi) os << ")";
  return os.str();
}

namespace {

int atomJetOrder(const Context& ctx, AtomId id, std::map<AtomId, int>& memo) {
  auto it = memo.find(id);
  if (it != memo.end()) return it->second;
  memo[id] = -1; // guards recursion
  const AtomDecl& d = ctx.atom(id);
  int best = -1;
  switch (d.kind) {
    case AtomKind::Jet:
    case AtomKind::Variation:
      best = d.jetOrder;
      break;
    case AtomKind::FuncDeriv:
      best = 0; // depends on the 0-jet of its argument
      break;
    case AtomKind::Radical:
      best = atomJetOrder(ctx, d.baseAtom, memo);
      break;
    case AtomKind::DefScalar: {
      const Expr& ex = ctx.expansion(id);
      for (const auto& [m, c] : ex.terms()) {
        for (const auto& [a2, e2] : m.even) best = std::max(best, atomJetOrder(ctx, a2, memo));
        for (AtomId a2 : m.odd) best = std::max(best, atomJetOrder(ctx, a2, memo));
      }
      break;
    }
    default:
      break;
  }
  memo[id] = best;
  return best;
}

} // namespace

int max_jet_order(const Context& ctx, const Expr& a) {
  int best = -1;
  std::map<AtomId, int> memo;
  for (const auto& [m, c] : a.terms()) {
    for (const auto& [id, e] : m.even) best = std::max(best, atomJetOrder(ctx, id, memo));
    for (AtomId id : m.odd) best = std::max(best, atomJetOrder(ctx, id, memo));
  }
  return best;
}

} // namespace laxcheck
