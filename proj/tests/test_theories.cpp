#include "doctest.h"
#include "laxcheck/checks.hpp"

#include <iostream>

using namespace laxcheck;

namespace {

void expectPass(const CheckOutcome& o) {
  if (o.report.status != CheckStatus::Pass) {
    std::cerr << "== " << o.report.id << " ==\n";
    for (const auto& n : o.report.notes) std::cerr << "  " << n << "\n";
  }
  CHECK(o.report.status == CheckStatus::Pass);
}

} // namespace

TEST_CASE("lax axioms hold for the coordinate built-ins") {
  for (const char* name : {"contractible-pair", "cm1", "cm2", "jacobi", "gr1d"}) {
    CAPTURE(name);
    Theory t = builtin_theory(name);
    expectPass(check_lax_axioms(t));
  }
}

TEST_CASE("codimension-1 Lagrangian formula reproduces the declared L1") {
  expectPass(compute_codim_L(builtin_theory("gr1d"), 1));
  expectPass(compute_codim_L(builtin_theory("jacobi"), 1));
  expectPass(compute_codim_L(builtin_theory("cm1"), 1));
  expectPass(compute_codim_L(builtin_theory("cm2"), 1));
  expectPass(compute_codim_L(builtin_theory("contractible-pair"), 1));
}

TEST_CASE("descent equations for the built-ins") {
  for (const char* name : {"contractible-pair", "cm1", "cm2", "jacobi", "gr1d"}) {
    CAPTURE(name);
    expectPass(check_descent(builtin_theory(name)));
  }
}

TEST_CASE("Q decomposes into Chevalley-Eilenberg and Koszul-Tate parts") {
  for (const char* name : {"contractible-pair", "cm1", "cm2", "jacobi", "gr1d"}) {
    CAPTURE(name);
    expectPass(check_Q_decomposition(builtin_theory(name)));
  }
}

TEST_CASE("shipped f-transformation preserves the axioms") {
  for (const char* name : {"contractible-pair", "cm1", "cm2", "jacobi", "gr1d"}) {
    CAPTURE(name);
    expectPass(check_f_transform(builtin_theory(name)));
  }
}
