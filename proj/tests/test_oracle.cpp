#include "doctest.h"
#include "laxcheck/checks.hpp"

#include <iostream>

using namespace laxcheck;

TEST_CASE("oracle agrees with the symbolic verdict on lax-axiom identities") {
  for (const char* name : {"contractible-pair", "cm1", "cm2", "jacobi", "gr1d"}) {
    CAPTURE(name);
    Theory t = builtin_theory(name);
    CheckOutcome o = check_lax_axioms(t);
    REQUIRE(o.report.status == CheckStatus::Pass);
    REQUIRE_FALSE(o.identities.empty());
    int n = 0;
    for (const auto& ident : o.identities) {
      OracleReport r = numeric_oracle(ident, 20, 0xC0FFEEu + n);
      if (!r.pass) std::cerr << ident.id << ": " << r.note << "\n";
      CHECK(r.pass);
      ++n;
    }
  }
}

TEST_CASE("oracle agrees on the jac-gr equivalence identities") {
  EquivalencePackage p = builtin_package("jac-gr");
  int n = 0;
  for (const auto& o : run_equivalence_suite(p)) {
    for (const auto& ident : o.identities) {
      OracleReport r = numeric_oracle(ident, 5, 0xABCDu + n);
      if (!r.pass) std::cerr << ident.id << ": " << r.note << "\n";
      CHECK(r.pass);
      ++n;
    }
  }
  CHECK(n > 50);
}

TEST_CASE("oracle rejects a generically nonzero identity") {
  Theory t = builtin_theory("gr1d");
  const Context& c = *t.coord->ctx;
  // eta^{3/2} - 1 is nonzero generically
  Expr eta32 = gmul(c, gmul(c, Expr::atom(c, c.atomByName("g")), Expr::atom(c, c.atomByName("E"))),
                    gmul(c, gmul(c, Expr::atom(c, c.atomByName("sqrtg")), Expr::atom(c, c.atomByName("sqrtE"))),
                         gmul(c, Expr::atom(c, c.atomByName("sqrtT")), Expr::atomPow(c, c.atomByName("T"), -2))));
  IdentityInstance ident{"negative-control", t.coord->ctx, eta32, Expr::constant(1)};
  OracleReport r = numeric_oracle(ident, 5, 99);
  CHECK_FALSE(r.pass);
  // and the zero identity passes trivially
  IdentityInstance zid{"zero", t.coord->ctx, Expr::zero(), Expr::zero()};
  CHECK(numeric_oracle(zid, 5, 99).pass);
}

TEST_CASE("designated sign mutations all break the suite") {
  auto muts = designated_mutations();
  CHECK(muts.size() == 20);
  for (const auto& m : muts) {
    CAPTURE(m.id);
    Theory t = apply_mutation(m);
    bool anyFail = false;
    CheckOutcome lax = check_lax_axioms(t);
    if (lax.report.status == CheckStatus::Fail) anyFail = true;
    if (!anyFail) {
      CheckOutcome cd = compute_codim_L(t, 1);
      if (cd.report.status == CheckStatus::Fail) anyFail = true;
    }
    if (!anyFail) {
      CheckOutcome de = check_descent(t);
      if (de.report.status == CheckStatus::Fail) anyFail = true;
    }
    CHECK(anyFail);
  }
}
