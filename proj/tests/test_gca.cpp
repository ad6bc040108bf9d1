#include "doctest.h"
#include "test_util.hpp"

using namespace laxcheck;
using laxtest::makeGrLikeContext;

namespace {

struct Fixture {
  ContextPtr ctx = makeGrLikeContext(2);
  Expr at(const std::string& s) const { return Expr::atom(*ctx, ctx->atomByName(s)); }
  Expr pw(const std::string& s, int e) const { return Expr::atomPow(*ctx, ctx->atomByName(s), e); }
  Expr mul(const Expr& a, const Expr& b) const { return gmul(*ctx, a, b); }
  Expr mul(const Expr& a, const Expr& b, const Expr& c) const { return mul(mul(a, b), c); }
  bool zero(const Expr& e) const { return is_zero(*ctx, e); }
};

} // namespace

TEST_CASE("with Omega and EL_g the square-root Euler-Lagrange identities hold") {
  Fixture F;
  // sqrt(E/T) - 1/sqrt(g) - (2 g^{3/2} / Omega) EL_g = 0
  Expr sqrtEoverT = F.mul(F.at("sqrtE"), F.mul(F.at("sqrtT"), F.pw("T", -1)));
  Expr invSqrtg = F.mul(F.at("sqrtg"), F.pw("g", -1));
  Expr g32 = F.mul(F.at("g"), F.at("sqrtg"));
  Expr third = scale(F.mul(g32, F.pw("Omega", -1), F.pw("EL_g", 1)), 2);
  Expr lhs = sub(sub(sqrtEoverT, invSqrtg), third);
  CHECK(F.zero(lhs));
  CHECK_FALSE(F.zero(add(lhs, Expr::constant(1))));

  // 2 sqrt(ET) - T/sqrt(g) - sqrt(g) E + (4 g^{7/2}/Omega^2) T EL_g^2 = 0
  Expr a = scale(F.mul(F.at("sqrtE"), F.at("sqrtT")), 2);
  Expr b = F.mul(F.pw("T", 1), invSqrtg);
  Expr c = F.mul(F.at("sqrtg"), F.at("E"));
  Expr g72 = F.mul(F.mul(F.pw("g", 3), F.at("sqrtg")), F.pw("Omega", -2));
  Expr d = scale(F.mul(g72, F.pw("T", 1), F.pw("EL_g", 2)), 4);
  CHECK(F.zero(add(sub(sub(a, b), c), d)));
}

TEST_CASE("radical defining relations") {
  Fixture F;
  for (const char* r : {"sqrtg", "sqrtT", "sqrtE", "sqrtP"}) {
    AtomId id = F.ctx->atomByName(r);
    AtomId base = F.ctx->atom(id).baseAtom;
    Expr rel = sub(F.mul(F.at(r), F.at(r)), Expr::atomPow(*F.ctx, base, 1));
    CHECK(F.zero(rel));
    CHECK(rel.isZero()); // already canonical, not only after clearing
  }
  // negative radical power: 1/sqrtg = sqrtg / g
  CHECK(F.pw("sqrtg", -1) == F.mul(F.at("sqrtg"), F.pw("g", -1)));
}

TEST_CASE("graded product signs") {
  Fixture F;
  Expr dt = F.at("dt");
  CHECK(F.mul(dt, dt).isZero());
  FieldId q = F.ctx->fieldByName("q");
  Expr dq = Expr::atom(*F.ctx, F.ctx->variation(q, 0, 0));
  CHECK(F.mul(dq, dt) == neg(F.mul(dt, dq)));
  Expr xi = F.at("xi");
  Expr qp = Expr::atom(*F.ctx, F.ctx->jet(F.ctx->fieldByName("q+"), 0, 0));
  CHECK(F.mul(xi, qp) == neg(F.mul(qp, xi)));
  CHECK(F.mul(xi, xi).isZero());
}

TEST_CASE("is_zero decides substitution instances") {
  Fixture F;
  // EL_g restricted by g := T/E vanishes.
  Morphism m;
  m.src = m.tgt = F.ctx.get();
  m.implicitIdentity = true;
  FieldId g = F.ctx->fieldByName("g");
  m.images[F.ctx->jet(g, 0, 0)] = F.mul(F.pw("T", 1), F.pw("E", -1));
  m.invImages[F.ctx->jet(g, 0, 0)] = F.mul(F.at("E"), F.pw("T", -1));
  m.images[F.ctx->atomByName("sqrtg")] =
      F.mul(F.at("sqrtT"), F.mul(F.at("sqrtE"), F.pw("E", -1)));
  validate_morphism(m);
  Expr img = apply_morphism(*F.ctx, m, F.pw("EL_g", 1));
  CHECK(is_zero(*F.ctx, img));

  // qdot . qdot - 2T/m = 0 at n = 2.
  FieldId q = F.ctx->fieldByName("q");
  Expr qd2;
  for (int c = 0; c < 2; ++c) {
    Expr v = Expr::atom(*F.ctx, F.ctx->jet(q, 1, c));
    qd2 = add(qd2, F.mul(v, v));
  }
  CHECK(F.zero(sub(qd2, scale(F.mul(F.pw("T", 1), F.pw("m", -1)), 2))));

  // eta^{3/2} - 1 does not vanish generically.
  Expr eta32 = F.mul(F.mul(F.at("g"), F.at("E")), F.mul(F.at("sqrtg"), F.at("sqrtE"), F.mul(F.at("sqrtT"), F.pw("T", -2))));
  CHECK_FALSE(F.zero(sub(eta32, Expr::constant(1))));
}

TEST_CASE("degree bookkeeping") {
  Fixture F;
  auto dt = degree_of(*F.ctx, F.at("dt"));
  REQUIRE(dt.has_value());
  CHECK(dt->gh == 0);
  CHECK(dt->fdM == 1);
  CHECK(dt->fdF == 0);

  // (q+ . dq + xi+ dxi) dt has uniform degree (-1, 1, 1) and lax degree -1.
  FieldId q = F.ctx->fieldByName("q"), qp = F.ctx->fieldByName("q+");
  FieldId xi = F.ctx->fieldByName("xi"), xip = F.ctx->fieldByName("xi+");
  Expr theta0;
  for (int c = 0; c < 2; ++c)
    theta0 = add(theta0, F.mul(Expr::atom(*F.ctx, F.ctx->jet(qp, 0, c)),
                               Expr::atom(*F.ctx, F.ctx->variation(q, 0, c))));
  theta0 = add(theta0, F.mul(Expr::atom(*F.ctx, F.ctx->jet(xip, 0, 0)),
                             Expr::atom(*F.ctx, F.ctx->variation(xi, 0, 0))));
  theta0 = F.mul(theta0, F.at("dt"));
  auto d = degree_of(*F.ctx, theta0);
  REQUIRE(d.has_value());
  CHECK(d->gh == -1);
  CHECK(d->fdM == 1);
  CHECK(d->fdF == 1);
  CHECK(lax_degree_of(*F.ctx, theta0) == -1);

  // inhomogeneous mix reports nullopt
  CHECK_FALSE(degree_of(*F.ctx, add(F.at("dt"), F.at("g"))).has_value());
}

TEST_CASE("gmul is associative and graded-commutative on random data") {
  Fixture F;
  laxtest::Gen gen(*F.ctx, 20240817u);
  for (int i = 0; i < 1000; ++i) {
    Expr a = gen.homogeneous(), b = gen.homogeneous(), c = gen.homogeneous();
    CHECK(F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c)));
  }
  for (int i = 0; i < 400; ++i) {
    Expr a = gen.homogeneous(), b = gen.homogeneous();
    auto pa = parity_of(*F.ctx, a), pb = parity_of(*F.ctx, b);
    if (!pa || !pb) continue;
    int sgn = (*pa * *pb) % 2 == 0 ? 1 : -1;
    CHECK(F.zero(sub(F.mul(a, b), scale(F.mul(b, a), Rat(sgn)))));
  }
}

TEST_CASE("addition and scaling are canonical") {
  Fixture F;
  laxtest::Gen gen(*F.ctx, 7u);
  for (int i = 0; i < 200; ++i) {
    Expr a = gen.expr();
    CHECK(sub(a, a).isZero());
    CHECK(add(a, neg(a)).isZero());
    CHECK(scale(a, Rat(0)).isZero());
    CHECK(scale(scale(a, rat(2, 3)), rat(3, 2)) == a);
  }
}

TEST_CASE("tensor numbers of atoms and monomials") {
  Fixture F;
  auto t = [&](const Expr& e) { return tensor_number(*F.ctx, e); };
  CHECK(t(F.at("g")) == 2);
  CHECK(t(F.at("xi")) == -1);
  CHECK(t(F.at("sqrtg")) == 1);
  CHECK(t(F.pw("T", 1)) == 2);
  CHECK(t(F.pw("EL_g", 1)) == -1);
  CHECK(t(F.pw("Omega", 1)) == 3);
  CHECK(t(F.pw("W", 1)) == 2);
  CHECK(t(F.at("u")) == 0);
  FieldId q = F.ctx->fieldByName("q");
  CHECK(t(Expr::atom(*F.ctx, F.ctx->jet(q, 1, 0))) == 1);
  // t(g^3 qdot) = 7
  CHECK(t(F.mul(F.pw("g", 3), Expr::atom(*F.ctx, F.ctx->jet(q, 1, 0)))) == 7);
}

TEST_CASE("non-invertible denominators are rejected") {
  Fixture F;
  FieldId q = F.ctx->fieldByName("q");
  CHECK_THROWS_AS((void)Expr::atomPow(*F.ctx, F.ctx->jet(q, 1, 0), -1), Error);
  CHECK_THROWS_AS((void)Expr::atomPow(*F.ctx, F.ctx->atomByName("EL_g"), -1), Error);
  CHECK_THROWS_AS((void)invert(*F.ctx, add(F.at("g"), F.at("E"))), Error);
}
