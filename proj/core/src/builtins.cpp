#include "laxcheck/ncdga.hpp"
#include "laxcheck/theory.hpp"

#include <functional>

namespace laxcheck {

namespace {

// Expression-building shorthand over one context.
struct EB {
  const Context& c;
  Expr at(const std::string& s) const { return Expr::atom(c, c.atomByName(s)); }
  Expr pw(const std::string& s, int e) const { return Expr::atomPow(c, c.atomByName(s), e); }
  Expr jet(const std::string& f, int ord, int comp = 0) const {
    return Expr::atom(c, c.jet(c.fieldByName(f), ord, comp));
  }
  Expr var(const std::string& f, int ord = 0, int comp = 0) const {
    return Expr::atom(c, c.variation(c.fieldByName(f), ord, comp));
  }
  Expr k(long long n, long long d = 1) const { return Expr::constant(rat(n, d)); }
  Expr mul(const Expr& a, const Expr& b) const { return gmul(c, a, b); }
  template <typename... Ts>
  Expr mul(const Expr& a, const Expr& b, const Expr& x, Ts... rest) const {
    return mul(mul(a, b), x, rest...);
  }
  Expr dt() const { return Expr::atom(c, c.dt()); }
  Expr ddt(const Expr& e) const { return total_derivative(c, e); }
  int n() const { return c.targetDim(); }
  Expr dot(const std::function<Expr(int)>& a, const std::function<Expr(int)>& b) const {
    Expr s;
    for (int i = 0; i < n(); ++i) s = add(s, mul(a(i), b(i)));
    return s;
  }
};

// ----------------------------------------------------------------- cp ----

std::shared_ptr<CoordTheory> make_cp1(ConventionFlags fl) {
  Context::Builder b(1, 8, fl);
  b.flowParam("u");
  b.field("a", 0).field("v", 0).field("a+", -1).field("v+", -1);
  auto ctx = b.build();
  EB e{*ctx};
  auto th = std::make_shared<CoordTheory>();
  th->name = "contractible-pair";
  th->ctx = ctx;
  std::map<AtomId, Expr> q;
  q[ctx->jet(ctx->fieldByName("v+"), 0, 0)] = e.at("v");
  th->Q = prolong_vf(*ctx, 1, std::move(q));
  th->theta = {e.mul(add(e.mul(e.at("a+"), e.var("a")), e.mul(e.at("v+"), e.var("v"))), e.dt()),
               Expr::zero()};
  th->L = {e.mul(scale(e.mul(e.at("v"), e.at("v")), rat(1, 2)), e.dt()), Expr::zero()};
  return th;
}

std::shared_ptr<CoordTheory> make_cp2(ConventionFlags fl) {
  Context::Builder b(1, 8, fl);
  b.field("a", 0).field("a+", -1);
  auto ctx = b.build();
  EB e{*ctx};
  auto th = std::make_shared<CoordTheory>();
  th->name = "cp-reduced";
  th->ctx = ctx;
  th->Q = prolong_vf(*ctx, 1, {});
  th->theta = {e.mul(e.mul(e.at("a+"), e.var("a")), e.dt()), Expr::zero()};
  th->L = {Expr::zero(), Expr::zero()};
  return th;
}

std::shared_ptr<CoordPackage> make_cp_package(ConventionFlags conv) {
  auto pkg = std::make_shared<CoordPackage>();
  pkg->name = "cp";
  pkg->t1 = make_cp1(conv);
  pkg->t2 = make_cp2(conv);
  const Context& c1 = *pkg->t1->ctx;
  const Context& c2 = *pkg->t2->ctx;
  EB e1{c1}, e2{c2};

  Morphism& phi = pkg->phiStar;
  phi.src = &c1;
  phi.tgt = &c2;
  phi.images[c1.jet(c1.fieldByName("a"), 0, 0)] = e2.at("a");
  phi.images[c1.jet(c1.fieldByName("a+"), 0, 0)] = e2.at("a+");
  phi.images[c1.jet(c1.fieldByName("v"), 0, 0)] = Expr::zero();
  phi.images[c1.jet(c1.fieldByName("v+"), 0, 0)] = Expr::zero();

  Morphism& psi = pkg->psiStar;
  psi.src = &c2;
  psi.tgt = &c1;
  psi.images[c2.jet(c2.fieldByName("a"), 0, 0)] = e1.at("a");
  psi.images[c2.jet(c2.fieldByName("a+"), 0, 0)] = e1.at("a+");

  pkg->beta1 = {scale(e1.mul(e1.at("v+"), e1.var("v+"), e1.dt()), rat(-1, 2)), Expr::zero()};
  pkg->f1 = {scale(e1.mul(e1.at("v+"), e1.at("v"), e1.dt()), rat(1, 2)), Expr::zero()};

  std::map<AtomId, Expr> r;
  r[c1.jet(c1.fieldByName("v"), 0, 0)] = neg(e1.at("v+"));
  pkg->R = prolong_vf(c1, -1, std::move(r));

  FlowData& fl = pkg->flow;
  fl.chiS.src = fl.chiS.tgt = &c1;
  fl.chiS.implicitIdentity = true;
  fl.chiS.images[c1.jet(c1.fieldByName("v"), 0, 0)] = e1.mul(e1.at("u"), e1.at("v"));
  fl.chiS.images[c1.jet(c1.fieldByName("v+"), 0, 0)] = e1.mul(e1.at("u"), e1.at("v+"));
  fl.limits.ctx = &c1;
  fl.chiStarExpected[c1.jet(c1.fieldByName("a"), 0, 0)] = e1.at("a");
  fl.chiStarExpected[c1.jet(c1.fieldByName("a+"), 0, 0)] = e1.at("a+");
  fl.chiStarExpected[c1.jet(c1.fieldByName("v"), 0, 0)] = Expr::zero();
  fl.chiStarExpected[c1.jet(c1.fieldByName("v+"), 0, 0)] = Expr::zero();
  fl.hchi[c1.jet(c1.fieldByName("v"), 0, 0)] = neg(e1.at("v+"));
  fl.antideriv[c1.jet(c1.fieldByName("v"), 0, 0)] = e1.mul(e1.at("u"), e1.at("v+"));

  ClassicalReduction cl;
  cl.solution.src = cl.solution.tgt = &c1;
  cl.solution.implicitIdentity = true;
  cl.solution.images[c1.jet(c1.fieldByName("v"), 0, 0)] = Expr::zero();
  cl.classicalPullback.src = &c2;
  cl.classicalPullback.tgt = &c1;
  cl.classicalPullback.images[c2.jet(c2.fieldByName("a"), 0, 0)] = e1.at("a");
  cl.classicalL1 = pkg->t1->L[0];
  cl.classicalL2 = pkg->t2->L[0];
  pkg->classical = std::move(cl);
  return pkg;
}

// ----------------------------------------------------------------- cm ----

std::shared_ptr<CoordTheory> make_cm1(ConventionFlags fl) {
  Context::Builder b(1, 8, fl);
  b.flowParam("u");
  b.field("q", 0).field("p", 0).field("q+", -1).field("p+", -1);
  b.funcAtom("G", "q", true);
  auto ctx = b.build();
  EB e{*ctx};
  auto th = std::make_shared<CoordTheory>();
  th->name = "cm1";
  th->ctx = ctx;
  Expr G1 = e.at("G.1");
  Expr p = e.at("p"), q1 = e.jet("q", 1);
  std::map<AtomId, Expr> q;
  // Q q+ = -pdot - 1/2 (dh/dq)(p,p) with h = 1/G
  q[ctx->jet(ctx->fieldByName("q+"), 0, 0)] =
      add(neg(e.jet("p", 1)), scale(e.mul(G1, p, p, e.pw("G", -2)), rat(1, 2)));
  q[ctx->jet(ctx->fieldByName("p+"), 0, 0)] = sub(q1, e.mul(p, e.pw("G", -1)));
  th->Q = prolong_vf(*ctx, 1, std::move(q));
  th->theta = {e.mul(add(e.mul(e.at("q+"), e.var("q")), e.mul(e.at("p+"), e.var("p"))), e.dt()),
               e.mul(p, e.var("q"))};
  th->L = {e.mul(sub(e.mul(p, q1), scale(e.mul(p, p, e.pw("G", -1)), rat(1, 2))), e.dt()),
           Expr::zero()};
  return th;
}

std::shared_ptr<CoordTheory> make_cm2(ConventionFlags fl) {
  Context::Builder b(1, 8, fl);
  b.field("q", 0).field("q+", -1);
  b.funcAtom("G", "q", true);
  auto ctx = b.build();
  EB e{*ctx};
  auto th = std::make_shared<CoordTheory>();
  th->name = "cm2";
  th->ctx = ctx;
  Expr G = e.at("G"), G1 = e.at("G.1");
  Expr q1 = e.jet("q", 1), q2 = e.jet("q", 2);
  std::map<AtomId, Expr> q;
  // Q q+ = 1/2 G' qdot^2 - (d/dt G) qdot - G qddot
  q[ctx->jet(ctx->fieldByName("q+"), 0, 0)] =
      sub(sub(scale(e.mul(G1, q1, q1), rat(1, 2)), e.mul(e.ddt(G), q1)), e.mul(G, q2));
  th->Q = prolong_vf(*ctx, 1, std::move(q));
  th->theta = {e.mul(e.mul(e.at("q+"), e.var("q")), e.dt()), e.mul(G, q1, e.var("q"))};
  th->L = {e.mul(scale(e.mul(G, q1, q1), rat(1, 2)), e.dt()), Expr::zero()};
  return th;
}

std::shared_ptr<CoordPackage> make_cm_package(ConventionFlags conv) {
  auto pkg = std::make_shared<CoordPackage>();
  pkg->name = "cm";
  pkg->t1 = make_cm1(conv);
  pkg->t2 = make_cm2(conv);
  const Context& c1 = *pkg->t1->ctx;
  const Context& c2 = *pkg->t2->ctx;
  EB e1{c1}, e2{c2};

  Morphism& phi = pkg->phiStar;
  phi.src = &c1;
  phi.tgt = &c2;
  phi.funcMap["G"] = "G";
  phi.images[c1.jet(c1.fieldByName("q"), 0, 0)] = e2.at("q");
  phi.images[c1.jet(c1.fieldByName("p"), 0, 0)] = e2.mul(e2.at("G"), e2.jet("q", 1));
  phi.images[c1.jet(c1.fieldByName("q+"), 0, 0)] = e2.at("q+");
  phi.images[c1.jet(c1.fieldByName("p+"), 0, 0)] = Expr::zero();

  Morphism& psi = pkg->psiStar;
  psi.src = &c2;
  psi.tgt = &c1;
  psi.funcMap["G"] = "G";
  psi.images[c2.jet(c2.fieldByName("q"), 0, 0)] = e1.at("q");
  {
    // psi* q~+ = q+ - 1/2 G'(p+)(Q p+) - d/dt(G p+) + G' qdot p+
    Expr G = e1.at("G"), G1 = e1.at("G.1");
    Expr Qpp = sub(e1.jet("q", 1), e1.mul(e1.at("p"), e1.pw("G", -1)));
    Expr img = e1.at("q+");
    img = sub(img, scale(e1.mul(G1, e1.at("p+"), Qpp), rat(1, 2)));
    img = sub(img, e1.ddt(e1.mul(G, e1.at("p+"))));
    img = add(img, e1.mul(G1, e1.jet("q", 1), e1.at("p+")));
    psi.images[c2.jet(c2.fieldByName("q+"), 0, 0)] = img;
  }

  {
    Expr G = e1.at("G");
    pkg->beta1 = {scale(e1.mul(G, e1.at("p+"), e1.var("p+"), e1.dt()), rat(1, 2)),
                  e1.mul(G, e1.at("p+"), e1.var("q"))};
    Expr Qpp = sub(e1.jet("q", 1), e1.mul(e1.at("p"), e1.pw("G", -1)));
    pkg->f1 = {scale(e1.mul(G, e1.at("p+"), Qpp, e1.dt()), rat(-1, 2)), Expr::zero()};
  }

  std::map<AtomId, Expr> r;
  r[c1.jet(c1.fieldByName("p"), 0, 0)] = e1.mul(e1.at("G"), e1.at("p+"));
  pkg->R = prolong_vf(c1, -1, std::move(r));

  FlowData& fl = pkg->flow;
  fl.chiS.src = fl.chiS.tgt = &c1;
  fl.chiS.implicitIdentity = true;
  fl.limits.ctx = &c1;
  {
    Expr u = e1.at("u"), G = e1.at("G"), G1 = e1.at("G.1");
    Expr q1 = e1.jet("q", 1);
    fl.chiS.images[c1.jet(c1.fieldByName("p"), 0, 0)] =
        add(e1.mul(u, e1.at("p")), e1.mul(sub(e1.k(1), u), G, q1));
    fl.chiS.images[c1.jet(c1.fieldByName("p+"), 0, 0)] = e1.mul(u, e1.at("p+"));
    // chi_s q+ = q+ + (u-1)(Gdot p+ + G p+dot - G' qdot p+) + 1/2 (u^2-1) G' p+ (Q p+)
    Expr X = add(sub(e1.mul(e1.ddt(G), e1.at("p+")), e1.mul(G1, q1, e1.at("p+"))),
                 e1.mul(G, e1.jet("p+", 1)));
    Expr Qpp = sub(q1, e1.mul(e1.at("p"), e1.pw("G", -1)));
    Expr Y = e1.mul(G1, e1.at("p+"), Qpp);
    fl.chiS.images[c1.jet(c1.fieldByName("q+"), 0, 0)] =
        add(e1.at("q+"), add(e1.mul(sub(u, e1.k(1)), X),
                             scale(e1.mul(sub(e1.mul(u, u), e1.k(1)), Y), rat(1, 2))));
    fl.chiStarExpected[c1.jet(c1.fieldByName("q"), 0, 0)] = e1.at("q");
    fl.chiStarExpected[c1.jet(c1.fieldByName("p"), 0, 0)] = e1.mul(G, q1);
    fl.chiStarExpected[c1.jet(c1.fieldByName("p+"), 0, 0)] = Expr::zero();
    fl.chiStarExpected[c1.jet(c1.fieldByName("q+"), 0, 0)] =
        sub(sub(e1.at("q+"), X), scale(Y, rat(1, 2)));
    fl.hchi[c1.jet(c1.fieldByName("p"), 0, 0)] = e1.mul(G, e1.at("p+"));
    fl.antideriv[c1.jet(c1.fieldByName("p"), 0, 0)] = neg(e1.mul(u, G, e1.at("p+")));
  }

  ClassicalReduction cl;
  cl.solution.src = cl.solution.tgt = &c1;
  cl.solution.implicitIdentity = true;
  cl.solution.images[c1.jet(c1.fieldByName("p"), 0, 0)] = e1.mul(e1.at("G"), e1.jet("q", 1));
  cl.classicalPullback.src = &c2;
  cl.classicalPullback.tgt = &c1;
  cl.classicalPullback.funcMap["G"] = "G";
  cl.classicalPullback.images[c2.jet(c2.fieldByName("q"), 0, 0)] = e1.at("q");
  cl.classicalL1 = pkg->t1->L[0];
  cl.classicalL2 = pkg->t2->L[0];
  Morphism wrong;
  wrong.src = wrong.tgt = &c1;
  wrong.implicitIdentity = true;
  wrong.images[c1.jet(c1.fieldByName("p"), 0, 0)] = scale(e1.mul(e1.at("G"), e1.jet("q", 1)), 2);
  cl.wrongSolution = std::move(wrong);
  pkg->classical = std::move(cl);
  return pkg;
}

// ------------------------------------------------------------- jacobi ----

ContextPtr jacobi_context(int n, ConventionFlags fl) {
  Context::Builder b(n, 8, fl);
  b.constant("E").constant("m");
  b.field("q", 0, n, false, Rat(0));
  b.field("xi", 1, 1, false, Rat(-1), true);
  b.field("q+", -1, n, false, Rat(1));
  b.field("xi+", -2, 1, false, Rat(2));
  b.defScalar("T", true, Rat(2));
  b.radical("sqrtT", "T");
  b.radical("sqrtE", "E");
  auto ctx = b.build();
  EB e{*ctx};
  Expr qd2;
  for (int i = 0; i < n; ++i) qd2 = add(qd2, e.mul(e.jet("q", 1, i), e.jet("q", 1, i)));
  define_scalar(*ctx, "T", scale(e.mul(e.at("m"), qd2), rat(1, 2)));
  return ctx;
}

std::shared_ptr<CoordTheory> make_jacobi(int n, ConventionFlags fl) {
  auto ctx = jacobi_context(n, fl);
  EB e{*ctx};
  auto th = std::make_shared<CoordTheory>();
  th->name = "jacobi";
  th->ctx = ctx;
  Expr xi = e.at("xi"), xid = e.jet("xi", 1);
  Expr sET = e.mul(e.at("sqrtE"), e.at("sqrtT"), e.pw("T", -1), e.at("m")); // sqrt(E/T) m
  std::map<AtomId, Expr> Q, Ga;
  FieldId q = ctx->fieldByName("q"), qp = ctx->fieldByName("q+");
  for (int i = 0; i < n; ++i) {
    Q[ctx->jet(q, 0, i)] = e.mul(xi, e.jet("q", 1, i));
    Q[ctx->jet(qp, 0, i)] =
        neg(e.ddt(add(e.mul(sET, e.jet("q", 1, i)), e.mul(e.jet("q+", 0, i), xi))));
    Ga[ctx->jet(q, 0, i)] = e.mul(xi, e.jet("q", 1, i));
    Ga[ctx->jet(qp, 0, i)] = add(e.mul(xi, e.jet("q+", 1, i)), e.mul(xid, e.jet("q+", 0, i)));
  }
  Q[ctx->jet(ctx->fieldByName("xi"), 0, 0)] = e.mul(xi, xid);
  Ga[ctx->jet(ctx->fieldByName("xi"), 0, 0)] = e.mul(xi, xid);
  {
    Expr qdotqp = e.dot([&](int i) { return e.jet("q+", 0, i); },
                        [&](int i) { return e.jet("q", 1, i); });
    Q[ctx->jet(ctx->fieldByName("xi+"), 0, 0)] =
        add(neg(qdotqp), add(e.mul(xi, e.jet("xi+", 1)), scale(e.mul(xid, e.at("xi+")), 2)));
    Ga[ctx->jet(ctx->fieldByName("xi+"), 0, 0)] =
        add(e.mul(xi, e.jet("xi+", 1)), scale(e.mul(xid, e.at("xi+")), 2));
  }
  th->Q = prolong_vf(*ctx, 1, std::move(Q));
  th->gamma = prolong_vf(*ctx, 1, std::move(Ga));
  Expr th0 = e.dot([&](int i) { return e.jet("q+", 0, i); }, [&](int i) { return e.var("q", 0, i); });
  th0 = add(th0, e.mul(e.at("xi+"), e.var("xi")));
  Expr th1 = e.dot([&](int i) { return e.mul(sET, e.jet("q", 1, i)); },
                   [&](int i) { return e.var("q", 0, i); });
  th1 = add(th1, e.dot([&](int i) { return e.mul(e.jet("q+", 0, i), xi); },
                       [&](int i) { return e.var("q", 0, i); }));
  th1 = sub(th1, e.mul(e.at("xi+"), xi, e.var("xi")));
  th->theta = {e.mul(th0, e.dt()), th1};
  Expr L0 = scale(e.mul(e.at("sqrtE"), e.at("sqrtT")), 2);
  L0 = add(L0, e.dot([&](int i) { return e.jet("q+", 0, i); },
                     [&](int i) { return e.mul(xi, e.jet("q", 1, i)); }));
  L0 = add(L0, e.mul(e.at("xi+"), xi, xid));
  th->L = {e.mul(L0, e.dt()), Expr::zero()};
  return th;
}

// --------------------------------------------------------------- gr1d ----

ContextPtr gr1d_context(int n, ConventionFlags fl) {
  Context::Builder b(n, 8, fl);
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
  EB e{*ctx};
  Expr qd2;
  for (int i = 0; i < n; ++i) qd2 = add(qd2, e.mul(e.jet("q", 1, i), e.jet("q", 1, i)));
  define_scalar(*ctx, "T", scale(e.mul(e.at("m"), qd2), rat(1, 2)));
  define_scalar(*ctx, "Omega",
                add(e.mul(e.at("sqrtg"), e.pw("T", 1)),
                    e.mul(e.at("g"), e.at("sqrtT"), e.at("sqrtE"))));
  define_scalar(*ctx, "W", sub(e.mul(e.at("g"), e.at("E")), e.pw("T", 1)));
  define_scalar(*ctx, "P",
                add(e.mul(e.at("u"), e.at("g")),
                    e.mul(sub(e.k(1), e.at("u")), e.pw("T", 1), e.pw("E", -1))));
  define_scalar(*ctx, "EL_g",
                sub(scale(e.mul(e.at("E"), e.at("sqrtg"), e.pw("g", -1)), rat(1, 2)),
                    scale(e.mul(e.pw("T", 1), e.at("sqrtg"), e.pw("g", -2)), rat(1, 2))));
  return ctx;
}

std::shared_ptr<CoordTheory> make_gr1d(int n, ConventionFlags fl) {
  auto ctx = gr1d_context(n, fl);
  EB e{*ctx};
  auto th = std::make_shared<CoordTheory>();
  th->name = "gr1d";
  th->ctx = ctx;
  Expr xi = e.at("xi"), xid = e.jet("xi", 1);
  Expr g = e.at("g"), gd = e.jet("g", 1), gp = e.at("g+"), gpd = e.jet("g+", 1);
  Expr mOverSqrtg = e.mul(e.at("m"), e.at("sqrtg"), e.pw("g", -1));
  std::map<AtomId, Expr> Q, Ga;
  FieldId qf = ctx->fieldByName("q"), qpf = ctx->fieldByName("q+");
  for (int i = 0; i < n; ++i) {
    Q[ctx->jet(qf, 0, i)] = e.mul(xi, e.jet("q", 1, i));
    Q[ctx->jet(qpf, 0, i)] =
        neg(e.ddt(add(e.mul(mOverSqrtg, e.jet("q", 1, i)), e.mul(e.jet("q+", 0, i), xi))));
    Ga[ctx->jet(qf, 0, i)] = e.mul(xi, e.jet("q", 1, i));
    Ga[ctx->jet(qpf, 0, i)] = add(e.mul(xi, e.jet("q+", 1, i)), e.mul(xid, e.jet("q+", 0, i)));
  }
  Q[ctx->jet(ctx->fieldByName("g"), 0, 0)] = add(e.mul(xi, gd), scale(e.mul(xid, g), 2));
  Ga[ctx->jet(ctx->fieldByName("g"), 0, 0)] = add(e.mul(xi, gd), scale(e.mul(xid, g), 2));
  Q[ctx->jet(ctx->fieldByName("xi"), 0, 0)] = e.mul(xi, xid);
  Ga[ctx->jet(ctx->fieldByName("xi"), 0, 0)] = e.mul(xi, xid);
  Q[ctx->jet(ctx->fieldByName("g+"), 0, 0)] =
      add(e.pw("EL_g", 1), sub(e.mul(xi, gpd), e.mul(xid, gp)));
  Ga[ctx->jet(ctx->fieldByName("g+"), 0, 0)] = sub(e.mul(xi, gpd), e.mul(xid, gp));
  {
    Expr qdotqp = e.dot([&](int i) { return e.jet("q+", 0, i); },
                        [&](int i) { return e.jet("q", 1, i); });
    Expr v = neg(qdotqp);
    v = add(v, e.mul(gp, gd));
    v = add(v, scale(e.mul(gpd, g), 2));
    v = add(v, e.mul(xi, e.jet("xi+", 1)));
    v = add(v, scale(e.mul(xid, e.at("xi+")), 2));
    Q[ctx->jet(ctx->fieldByName("xi+"), 0, 0)] = v;
    Ga[ctx->jet(ctx->fieldByName("xi+"), 0, 0)] =
        add(e.mul(xi, e.jet("xi+", 1)), scale(e.mul(xid, e.at("xi+")), 2));
  }
  th->Q = prolong_vf(*ctx, 1, std::move(Q));
  th->gamma = prolong_vf(*ctx, 1, std::move(Ga));

  Expr th0 = e.dot([&](int i) { return e.jet("q+", 0, i); }, [&](int i) { return e.var("q", 0, i); });
  th0 = add(th0, e.mul(e.at("xi+"), e.var("xi")));
  th0 = add(th0, e.mul(gp, e.var("g")));
  Expr th1 = e.dot([&](int i) { return e.mul(mOverSqrtg, e.jet("q", 1, i)); },
                   [&](int i) { return e.var("q", 0, i); });
  th1 = add(th1, e.dot([&](int i) { return e.mul(e.jet("q+", 0, i), xi); },
                       [&](int i) { return e.var("q", 0, i); }));
  th1 = add(th1, e.mul(gp, xi, e.var("g")));
  th1 = sub(th1, e.mul(add(scale(e.mul(gp, g), 2), e.mul(e.at("xi+"), xi)), e.var("xi")));
  th->theta = {e.mul(th0, e.dt()), th1};

  Expr L0 = e.mul(e.pw("T", 1), e.at("sqrtg"), e.pw("g", -1));
  L0 = add(L0, e.mul(e.at("sqrtg"), e.at("E")));
  L0 = add(L0, e.dot([&](int i) { return e.jet("q+", 0, i); },
                     [&](int i) { return e.mul(xi, e.jet("q", 1, i)); }));
  L0 = add(L0, e.mul(gp, add(e.mul(xi, gd), scale(e.mul(g, xid), 2))));
  L0 = add(L0, e.mul(e.at("xi+"), xi, xid));
  Expr L1 = e.mul(sub(e.mul(e.pw("T", 1), e.pw("g", -1)), e.at("E")), e.at("sqrtg"), xi);
  th->L = {e.mul(L0, e.dt()), L1};
  return th;
}

// -------------------------------------------------------- jac-gr glue ----

Expr eta32(const EB& e) {
  return e.mul(e.at("g"), e.at("E"), e.at("sqrtg"), e.at("sqrtE"), e.at("sqrtT"), e.pw("T", -2));
}

Expr perp_component(const EB& e, const std::function<Expr(int)>& v, int i) {
  Expr dotv = e.dot([&](int j) { return e.jet("q", 1, j); }, v);
  return sub(v(i), e.mul(dotv, e.at("m"), e.jet("q", 1, i), e.pw("T", -1), e.k(1, 2)));
}

std::shared_ptr<CoordPackage> make_jacgr_package(int n, ConventionFlags conv) {
  auto pkg = std::make_shared<CoordPackage>();
  pkg->name = "jac-gr";
  pkg->t1 = make_gr1d(n, conv);
  pkg->t2 = make_jacobi(n, conv);
  const Context& c1 = *pkg->t1->ctx;
  const Context& c2 = *pkg->t2->ctx;
  EB e1{c1}, e2{c2};

  FieldId q1 = c1.fieldByName("q"), qp1 = c1.fieldByName("q+");
  FieldId q2 = c2.fieldByName("q"), qp2 = c2.fieldByName("q+");

  Morphism& phi = pkg->phiStar; // Omega(GR) -> Omega(J)
  phi.src = &c1;
  phi.tgt = &c2;
  for (int i = 0; i < n; ++i) {
    phi.images[c1.jet(q1, 0, i)] = e2.jet("q", 0, i);
    phi.images[c1.jet(qp1, 0, i)] = e2.jet("q+", 0, i);
  }
  phi.images[c1.jet(c1.fieldByName("xi"), 0, 0)] = e2.at("xi");
  phi.images[c1.jet(c1.fieldByName("xi+"), 0, 0)] = e2.at("xi+");
  phi.images[c1.jet(c1.fieldByName("g"), 0, 0)] = e2.mul(e2.pw("T", 1), e2.pw("E", -1));
  phi.invImages[c1.jet(c1.fieldByName("g"), 0, 0)] = e2.mul(e2.at("E"), e2.pw("T", -1));
  phi.images[c1.jet(c1.fieldByName("g+"), 0, 0)] = Expr::zero();
  phi.images[c1.atomByName("sqrtg")] = e2.mul(e2.at("sqrtT"), e2.at("sqrtE"), e2.pw("E", -1));

  Morphism& psi = pkg->psiStar; // Omega(J) -> Omega(GR)
  psi.src = &c2;
  psi.tgt = &c1;
  for (int i = 0; i < n; ++i) psi.images[c2.jet(q2, 0, i)] = e1.jet("q", 0, i);
  psi.images[c2.jet(c2.fieldByName("xi"), 0, 0)] = e1.at("xi");
  {
    Expr ELg = e1.pw("EL_g", 1);
    Expr ELgDot = total_derivative(c1, ELg);
    Expr g32overE = e1.mul(e1.at("g"), e1.at("sqrtg"), e1.pw("E", -1));
    Expr bracket = add(e1.mul(e1.at("g+"), e1.jet("g", 1)),
                       scale(e1.mul(e1.jet("g+", 1), e1.at("g")), 2));
    bracket = add(bracket, e1.mul(g32overE, sub(e1.mul(ELgDot, e1.at("g+")),
                                                e1.mul(ELg, e1.jet("g+", 1)))));
    Expr Tdot = total_derivative(c1, e1.pw("T", 1));
    for (int i = 0; i < n; ++i) {
      Expr qddPerp = sub(e1.jet("q", 2, i),
                         e1.mul(e1.jet("q", 1, i), Tdot, e1.pw("T", -1), e1.k(1, 2)));
      Expr img = e1.jet("q+", 0, i);
      img = sub(img, e1.mul(bracket, e1.at("m"), e1.jet("q", 1, i), e1.pw("T", -1), e1.k(1, 2)));
      img = add(img, scale(e1.mul(e1.at("g+"), qddPerp, e1.at("m"), e1.pw("E", -1)), 2));
      psi.images[c2.jet(qp2, 0, i)] = gmul(c1, eta32(e1), img);
    }
    psi.images[c2.jet(c2.fieldByName("xi+"), 0, 0)] =
        gmul(c1, eta32(e1), add(e1.at("xi+"), e1.mul(g32overE, e1.jet("g+", 1), e1.at("g+"))));
  }

  // beta/f data on the GR side (psi direction).
  {
    Expr gp = e1.at("g+"), gpd = e1.jet("g+", 1);
    Expr g72OmegaSq = e1.mul(e1.pw("g", 3), e1.at("sqrtg"), e1.pw("Omega", -2));
    Expr e32 = eta32(e1);
    Expr beta0 = neg(scale(e1.mul(g72OmegaSq, e1.pw("T", 1), gp, e1.var("g+")), 4));
    Expr cPerp = add(scale(e1.mul(e1.pw("g", 2), e1.pw("Omega", -1)), 2),
                     scale(e1.mul(e32, e1.at("sqrtg"), e1.pw("E", -1)), 2));
    Expr cPar = sub(scale(e1.mul(g72OmegaSq, e1.pw("T", 1)), 4),
                    e1.mul(e32, e1.at("g"), e1.at("sqrtg"), e1.pw("E", -1)));
    for (int i = 0; i < n; ++i) {
      Expr qpPerpI = perp_component(e1, [&](int j) { return e1.jet("q+", 0, j); }, i);
      Expr mqdot = e1.mul(e1.at("m"), e1.jet("q", 1, i), e1.pw("T", -1), e1.k(1, 2));
      beta0 = add(beta0, e1.mul(cPerp, gp, qpPerpI, e1.var("q", 0, i)));
      beta0 = add(beta0, e1.mul(cPar, gpd, gp, mqdot, e1.var("q", 0, i)));
      beta0 = sub(beta0, e1.mul(sub(e32, e1.k(1)), e1.at("xi+"), mqdot, e1.var("q", 0, i)));
    }
    Expr beta1 = gmul(c1, e1.at("xi"), beta0);
    for (int i = 0; i < n; ++i)
      beta1 = add(beta1,
                  scale(e1.mul(e1.at("g"), e1.at("sqrtg"), e1.pw("Omega", -1), gp, e1.at("m"),
                               e1.jet("q", 1, i), e1.var("q", 0, i)),
                        2));
    pkg->beta1 = {gmul(c1, beta0, e1.dt()), beta1};
    Expr f0 = scale(e1.mul(gp, sub(e1.at("g"), scale(e1.mul(e1.at("g"), e1.at("sqrtg"),
                                                            e1.pw("T", 1), e1.pw("Omega", -1)),
                                                     2))),
                    2);
    pkg->f1 = {gmul(c1, f0, e1.dt()), gmul(c1, e1.at("xi"), f0)};
  }

  // Homotopy vector field R on the GR side.
  {
    std::map<AtomId, Expr> r;
    r[c1.jet(c1.fieldByName("g"), 0, 0)] =
        neg(scale(e1.mul(e1.at("g"), e1.at("sqrtg"), e1.at("g+"), e1.pw("E", -1)), 2));
    Expr sqgOverE3 = scale(e1.mul(e1.at("sqrtg"), e1.pw("E", -1)), 3);
    for (int i = 0; i < n; ++i) {
      Expr mqdot = e1.mul(e1.at("m"), e1.jet("q", 1, i), e1.pw("T", -1), e1.k(1, 2));
      Expr qpPerpI = perp_component(e1, [&](int j) { return e1.jet("q+", 0, j); }, i);
      r[c1.jet(qp1, 0, i)] = add(neg(e1.mul(sqgOverE3, e1.pw("EL_g", 1), e1.at("xi+"), mqdot)),
                                 e1.mul(sqgOverE3, e1.at("g+"), qpPerpI));
    }
    pkg->R = prolong_vf(c1, -1, std::move(r));
  }

  // Closed-form flow, limits, h_chi and antiderivatives.
  {
    FlowData& fl = pkg->flow;
    Morphism& m = fl.chiS;
    m.src = m.tgt = &c1;
    m.implicitIdentity = true;
    Expr u = e1.at("u");
    m.images[c1.jet(c1.fieldByName("g"), 0, 0)] = e1.pw("P", 1);
    m.invImages[c1.jet(c1.fieldByName("g"), 0, 0)] = e1.pw("P", -1);
    m.images[c1.atomByName("sqrtg")] = e1.at("sqrtP");
    m.invImages[c1.atomByName("W")] = e1.mul(e1.pw("u", -1), e1.pw("W", -1));
    Expr scfac = e1.mul(e1.at("g"), e1.at("sqrtg"), e1.at("sqrtP"), e1.pw("P", -2));
    m.images[c1.jet(c1.fieldByName("g+"), 0, 0)] = e1.mul(scfac, u, e1.at("g+"));
    Expr g32gp = e1.mul(e1.at("g"), e1.at("sqrtg"), e1.at("g+"));
    auto sigma = [&](const Expr& phi0) {
      return sub(e1.mul(phi0, e1.ddt(g32gp)), e1.mul(e1.ddt(phi0), g32gp));
    };
    Expr sigmaTE = sigma(e1.mul(e1.pw("T", 1), e1.pw("E", -1)));
    Expr sigmaGEL = sigma(e1.mul(e1.at("g"), e1.at("sqrtg"), e1.pw("EL_g", 1)));
    Expr gm32 = e1.mul(e1.at("sqrtg"), e1.pw("g", -2)); // g^{-3/2}
    Expr um1 = sub(u, e1.k(1));
    Expr u2m1 = sub(e1.mul(u, u), e1.k(1));
    Expr Tdot = total_derivative(c1, e1.pw("T", 1));
    for (int i = 0; i < n; ++i) {
      Expr mqdot = e1.mul(e1.at("m"), e1.jet("q", 1, i), e1.pw("T", -1), e1.k(1, 2));
      Expr qddPerp = sub(e1.jet("q", 2, i),
                         e1.mul(e1.jet("q", 1, i), Tdot, e1.pw("T", -1), e1.k(1, 2)));
      Expr inner = e1.jet("q+", 0, i);
      inner = add(inner, scale(e1.mul(um1, gm32, sigmaTE, mqdot), 2));
      inner = add(inner, scale(e1.mul(u2m1, gm32, sigmaGEL, mqdot, e1.pw("E", -1)), 3));
      inner = sub(inner, scale(e1.mul(um1, e1.at("m"), e1.pw("E", -1), qddPerp, e1.at("g+")), 2));
      m.images[c1.jet(qp1, 0, i)] = gmul(c1, scfac, inner);
    }
    m.images[c1.jet(c1.fieldByName("xi+"), 0, 0)] =
        gmul(c1, scfac,
             sub(e1.at("xi+"), e1.mul(u2m1, e1.at("g"), e1.at("sqrtg"), e1.pw("E", -1),
                                      e1.jet("g+", 1), e1.at("g+"))));

    fl.limits.ctx = &c1;
    fl.limits.limitInfty[c1.atomByName("sqrtP")] =
        e1.mul(e1.at("sqrtT"), e1.at("sqrtE"), e1.pw("E", -1));
    fl.limits.invInfty[c1.atomByName("P")] = e1.mul(e1.at("E"), e1.pw("T", -1));
    fl.limits.limitZero[c1.atomByName("sqrtP")] = e1.at("sqrtg");
    fl.limits.invZero[c1.atomByName("P")] = e1.pw("g", -1);

    for (int i = 0; i < n; ++i) {
      fl.chiStarExpected[c1.jet(q1, 0, i)] = e1.jet("q", 0, i);
      fl.chiStarExpected[c1.jet(qp1, 0, i)] = psi.images.at(c2.jet(qp2, 0, i));
    }
    fl.chiStarExpected[c1.jet(c1.fieldByName("xi"), 0, 0)] = e1.at("xi");
    fl.chiStarExpected[c1.jet(c1.fieldByName("xi+"), 0, 0)] =
        psi.images.at(c2.jet(c2.fieldByName("xi+"), 0, 0));
    fl.chiStarExpected[c1.jet(c1.fieldByName("g"), 0, 0)] =
        e1.mul(e1.pw("T", 1), e1.pw("E", -1));
    fl.chiStarExpected[c1.jet(c1.fieldByName("g+"), 0, 0)] = Expr::zero();

    Expr e32 = eta32(e1);
    AtomId gAtom = c1.jet(c1.fieldByName("g"), 0, 0);
    fl.hchi[gAtom] =
        neg(scale(e1.mul(e1.at("g"), e1.at("sqrtg"), e1.at("g+"), e1.pw("E", -1)), 2));
    fl.antideriv[gAtom] =
        scale(e1.mul(u, e1.at("g"), e1.at("sqrtg"), e1.at("g+"), e1.pw("E", -1)), 2);
    Expr A1 = neg(scale(e1.mul(e1.at("sqrtP"), e1.pw("P", -2)), rat(2, 3)));
    Expr A2 = e1.mul(e1.pw("W", -2),
                     add(sub(scale(e1.mul(e1.at("E"), e1.at("E"), e1.at("sqrtP")), 2),
                             scale(e1.mul(e1.pw("T", 2), e1.at("sqrtP"), e1.pw("P", -2)),
                                   rat(2, 3))),
                         scale(e1.mul(e1.at("E"), e1.pw("T", 1), e1.at("sqrtP"), e1.pw("P", -1)),
                               4)));
    Expr Aperp =
        scale(e1.mul(e1.at("E"), e1.pw("W", -1), e1.at("sqrtP"), e1.pw("P", -2)), rat(2, 3));
    Expr g32xp = e1.mul(e1.at("g"), e1.at("sqrtg"), e1.at("xi+"));
    Expr g3gpd = e1.mul(e1.pw("g", 3), e1.pw("E", -1), e1.jet("g+", 1), e1.at("g+"));
    Expr hPar1 = e1.mul(sub(e1.k(1), e32),
                        add(e1.at("xi+"), e1.mul(e1.at("g"), e1.at("sqrtg"), e1.pw("E", -1),
                                                 e1.jet("g+", 1), e1.at("g+"))));
    Expr ratc = add(sub(add(scale(e1.mul(e1.pw("g", 2), e1.at("E"), e1.at("E")), 3),
                            scale(e1.mul(e1.at("g"), e1.at("E"), e1.pw("T", 1)), 6)),
                        e1.pw("T", 2)),
                    neg(scale(e1.mul(e1.at("g"), e1.at("E"), e1.at("sqrtg"), e1.at("sqrtE"),
                                     e1.at("sqrtT")),
                              8)));
    Expr hPar2 = e1.mul(ratc, e1.pw("W", -2), e1.at("g"), e1.at("sqrtg"), e1.pw("E", -1),
                        e1.jet("g+", 1), e1.at("g+"));
    Expr hPerpC = scale(e1.mul(sub(e32, e1.k(1)), e1.pw("W", -1), e1.at("g"), e1.at("sqrtg"),
                               e1.at("g+")),
                        2);
    for (int i = 0; i < n; ++i) {
      Expr mqdot = e1.mul(e1.at("m"), e1.jet("q", 1, i), e1.pw("T", -1), e1.k(1, 2));
      Expr qpPerpI = perp_component(e1, [&](int j) { return e1.jet("q+", 0, j); }, i);
      fl.hchi[c1.jet(qp1, 0, i)] =
          add(e1.mul(add(hPar1, hPar2), mqdot), e1.mul(hPerpC, qpPerpI));
      Expr Apar = e1.mul(e1.k(3, 2), mqdot,
                         sub(e1.mul(add(g32xp, g3gpd), A1), e1.mul(g3gpd, A2)));
      Expr Ape = e1.mul(scale(e1.mul(e1.pw("g", 3), e1.pw("E", -1), e1.at("g+"), qpPerpI), 3),
                        Aperp);
      fl.antideriv[c1.jet(qp1, 0, i)] = add(Apar, Ape);
    }
  }
  return pkg;
}

} // namespace

std::vector<std::string> builtin_theory_names() {
  return {"contractible-pair", "cm1", "cm2", "ym1", "ym2", "jacobi", "gr1d"};
}

std::vector<std::string> builtin_package_names() { return {"cp", "cm", "ym", "jac-gr"}; }

Theory builtin_theory(const std::string& name, const TheoryOptions& opts) {
  Theory t;
  t.name = name;
  ConventionFlags fl{opts.dtSign};
  if (name == "contractible-pair") {
    t.coord = make_cp1(fl);
  } else if (name == "cm1") {
    t.coord = make_cm1(fl);
  } else if (name == "cm2") {
    t.coord = make_cm2(fl);
  } else if (name == "jacobi") {
    t.coord = make_jacobi(opts.targetDim > 0 ? opts.targetDim : 2, fl);
  } else if (name == "gr1d") {
    t.coord = make_gr1d(opts.targetDim > 0 ? opts.targetDim : 2, fl);
  } else if (name == "ym1") {
    t.nc = nc_builtin_theory(1);
  } else if (name == "ym2") {
    t.nc = nc_builtin_theory(2);
  } else {
    fail(Errc::UnknownTheory, name);
  }
  return t;
}

EquivalencePackage builtin_package(const std::string& name, const TheoryOptions& opts) {
  EquivalencePackage p;
  p.name = name;
  ConventionFlags fl{opts.dtSign};
  if (name == "cp") {
    p.coord = make_cp_package(fl);
  } else if (name == "cm") {
    p.coord = make_cm_package(fl);
  } else if (name == "jac-gr") {
    p.coord = make_jacgr_package(opts.targetDim > 0 ? opts.targetDim : 2, fl);
  } else if (name == "ym") {
    p.nc = nc_builtin_package();
  } else {
    fail(Errc::UnknownPackage, name);
  }
  return p;
}

} // namespace laxcheck
