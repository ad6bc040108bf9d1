#pragma once

#include "laxcheck/expr.hpp"
#include "laxcheck/varcalc.hpp"

#include <random>

namespace laxtest {

using namespace laxcheck;

// A 1D-gravity-like symbol table used across the algebra tests: matter q
// (target dimension n), metric g, reparametrization ghost xi, antifields,
// constants E and m, the named scalars T, Omega, W = gE - T, the flow
// parameter u with P = u g + (1-u) T/E, and the radical basis.
inline ContextPtr makeGrLikeContext(int n = 2) {
  Context::Builder b(n);
  b.constant("E").constant("m");
  b.flowParam("u");
  b.field("q", 0, n, false, Rat(0));
  b.field("g", 0, 1, true, Rat(2));
  b.field("xi", 1, 1, false, Rat(-1), true);
  b.field("q+", -1, n, false, Rat(1));
  b.field("g+", -1, 1, false, Rat(-1));
  b.field("xi+", -2, 1, false, Rat(2));
  b.defScalar("T", true, Rat(2));
  b.defScalar("Omega", true, Rat(3));
  b.defScalar("W", true, Rat(2));
  b.defScalar("P", true, Rat(2));
  b.defScalar("EL_g", false, Rat(-1));
  b.radical("sqrtg", "g");
  b.radical("sqrtT", "T");
  b.radical("sqrtE", "E");
  b.radical("sqrtP", "P");
  auto ctx = b.build();

  auto at = [&](const std::string& s) { return Expr::atom(*ctx, ctx->atomByName(s)); };
  auto pw = [&](const std::string& s, int e) { return Expr::atomPow(*ctx, ctx->atomByName(s), e); };
  FieldId q = ctx->fieldByName("q");
  Expr qdot2;
  for (int c = 0; c < n; ++c) {
    Expr qd = Expr::atom(*ctx, ctx->jet(q, 1, c));
    qdot2 = add(qdot2, gmul(*ctx, qd, qd));
  }
  define_scalar(*ctx, "T", scale(gmul(*ctx, at("m"), qdot2), rat(1, 2)));
  // Omega = sqrt(g) T + g sqrt(T) sqrt(E)
  define_scalar(*ctx, "Omega",
                add(gmul(*ctx, at("sqrtg"), pw("T", 1)),
                    gmul(*ctx, at("g"), gmul(*ctx, at("sqrtT"), at("sqrtE")))));
  // W = g E - T
  define_scalar(*ctx, "W", sub(gmul(*ctx, at("g"), at("E")), pw("T", 1)));
  // P = u g + (1 - u) T / E
  define_scalar(*ctx, "P",
                add(gmul(*ctx, at("u"), at("g")),
                    gmul(*ctx, sub(Expr::constant(1), at("u")), gmul(*ctx, pw("T", 1), pw("E", -1)))));
  // EL_g = E/(2 sqrtg) - T/(2 g^{3/2})
  define_scalar(*ctx, "EL_g",
                sub(scale(gmul(*ctx, at("E"), gmul(*ctx, at("sqrtg"), pw("g", -1))), rat(1, 2)),
                    scale(gmul(*ctx, pw("T", 1), gmul(*ctx, at("sqrtg"), pw("g", -2))), rat(1, 2))));
  return ctx;
}

// Random expression generator for property tests.
class Gen {
public:
  Gen(const Context& ctx, uint64_t seed) : ctx_(ctx), rng_(seed) {}

  Rat ratCoeff() {
    std::uniform_int_distribution<int> num(-6, 6), den(1, 4);
    int n = num(rng_);
    if (n == 0) n = 1;
    return Rat(n, den(rng_));
  }

  AtomId randomAtom(bool allowDt = true) {
    for (;;) {
      std::uniform_int_distribution<size_t> pick(0, ctx_.atomCount() - 1);
      AtomId id = AtomId(pick(rng_));
      const AtomDecl& a = ctx_.atom(id);
      if (a.kind == AtomKind::Dt && !allowDt) continue;
      if (a.kind == AtomKind::FlowParam) continue; // flow tests add u explicitly
      if ((a.kind == AtomKind::Jet || a.kind == AtomKind::Variation) && a.jetOrder > 3) continue;
      if (a.kind == AtomKind::DefScalar) continue; // enter only through powers
      if (a.kind == AtomKind::Radical && flowDependent(a.baseAtom)) continue;
      return id;
    }
  }

  // Random monomial-as-expression (may normalize to zero via odd squares).
  Expr monomial(int maxFactors = 4) {
    std::uniform_int_distribution<int> nf(1, maxFactors), ex(1, 2), sgnInv(0, 3);
    Expr e = Expr::constant(ratCoeff());
    int k = nf(rng_);
    for (int i = 0; i < k && !e.isZero(); ++i) {
      AtomId id = randomAtom();
      const AtomDecl& a = ctx_.atom(id);
      int exp = ctx_.isOdd(id) ? 1 : ex(rng_);
      if (!ctx_.isOdd(id) && a.invertible && sgnInv(rng_) == 0) exp = -exp;
      e = gmul(ctx_, e, Expr::atomPow(ctx_, id, exp));
    }
    return e;
  }

  Expr expr(int maxTerms = 3, int maxFactors = 4) {
    std::uniform_int_distribution<int> nt(1, maxTerms);
    Expr e;
    int k = nt(rng_);
    for (int i = 0; i < k; ++i) e = add(e, monomial(maxFactors));
    return e;
  }

  // Homogeneous expression: one seed monomial times scalar-degree monomials.
  Expr homogeneous(int maxTerms = 3) {
    Expr seed = monomial();
    while (seed.isZero()) seed = monomial();
    Expr e = seed;
    std::uniform_int_distribution<int> nt(0, maxTerms - 1), pick(0, 2);
    int k = nt(rng_);
    for (int i = 0; i < k; ++i) {
      // scalar factor from invertible even atoms
      static const char* names[] = {"g", "E", "m"};
      const char* nm = names[pick(rng_)];
      auto id = ctx_.tryAtomByName(nm);
      if (!id) continue;
      std::uniform_int_distribution<int> ex(-1, 1);
      Expr f = gmul(ctx_, Expr::constant(ratCoeff()), Expr::atomPow(ctx_, *id, ex(rng_)));
      e = add(e, gmul(ctx_, seed, f));
    }
    return e;
  }

  std::mt19937_64& rng() { return rng_; }

private:
  bool flowDependent(AtomId base) const {
    const AtomDecl& b = ctx_.atom(base);
    if (b.kind == AtomKind::FlowParam) return true;
    if (b.kind != AtomKind::DefScalar) return false;
    for (const auto& [m, c] : ctx_.expansion(base).terms())
      for (const auto& [id, e] : m.even)
        if (ctx_.atom(id).kind == AtomKind::FlowParam) return true;
    return false;
  }

  const Context& ctx_;
  std::mt19937_64 rng_;
};

} // namespace laxtest
