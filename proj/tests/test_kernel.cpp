#include "doctest.h"
#include "laxcheck/checks.hpp"

#include <iostream>

using namespace laxcheck;

TEST_CASE("cm1 pre-boundary form has the canonical constant-rank kernel") {
  Theory t = builtin_theory("cm1");
  KernelReport rep = preboundary_kernel(t);
  std::cerr << "cm1: " << rep.summary << "\n";
  CHECK(rep.constantRank);
  CHECK(rep.pivots.size() == 1); // the (q, p) pair
  // kernel: every direction except q and p
  for (const auto& g : rep.kernel) CHECK(g.verified);
  bool hasQp = false, hasPp = false;
  for (const auto& g : rep.kernel) {
    if (g.direction == "q+") hasQp = true;
    if (g.direction == "p+") hasPp = true;
    CHECK(g.direction != "q");
    CHECK(g.direction != "p");
  }
  CHECK(hasQp);
  CHECK(hasPp);
}

TEST_CASE("1d gravity is compatible with the boundary reduction") {
  Theory t = builtin_theory("gr1d");
  KernelReport rep = preboundary_kernel(t);
  std::cerr << "gr1d: " << rep.summary << "\n";
  for (const auto& g : rep.kernel)
    if (!g.verified) std::cerr << "  unverified direction " << g.direction << "\n";
  for (const auto& d : rep.degeneracyConditions) std::cerr << "  degeneracy " << d << "\n";
  CHECK(rep.constantRank);
  CHECK_FALSE(rep.higherJetsThanDefault);
}

TEST_CASE("jacobi theory yields a singular boundary structure") {
  Theory t = builtin_theory("jacobi");
  KernelReport rep = preboundary_kernel(t);
  std::cerr << "jacobi: " << rep.summary << "\n";
  CHECK_FALSE(rep.constantRank);
  CHECK_FALSE(rep.degeneracyConditions.empty());
  // degeneracy conditions involve the sqrt(E/T)-scaled velocity projector
  bool sqrtSeen = false;
  for (const auto& d : rep.degeneracyConditions)
    if (d.find("sqrtE") != std::string::npos || d.find("sqrtT") != std::string::npos)
      sqrtSeen = true;
  CHECK(sqrtSeen);
}

TEST_CASE("pulling 1d gravity back along chi* spoils the boundary structure") {
  EquivalencePackage pk = builtin_package("jac-gr");
  Theory gr;
  gr.name = "gr1d";
  gr.coord = pk.coord->t1;
  Morphism chi = compose_morphisms(pk.coord->phiStar, pk.coord->psiStar);
  KernelReport rep = preboundary_kernel(gr, &chi);
  std::cerr << "gr1d+chi: " << rep.summary << "\n";
  CHECK_FALSE(rep.constantRank);
  CHECK(rep.higherJetsThanDefault); // psi-images carry second jets
  CHECK_FALSE(rep.degeneracyConditions.empty());

  // Theorem-level comparison: the chi-pulled form shows the same singular
  // pattern as the Jacobi one under the field identification.
  Theory jac;
  jac.name = "jacobi";
  jac.coord = pk.coord->t2;
  KernelReport jrep = preboundary_kernel(jac);
  CHECK(jrep.constantRank == rep.constantRank);
  // the classical part of the singular locus (the velocity projector
  // conditions) is the same in both reports, and every Jacobi degenerate
  // direction reappears among the chi ones under the field identification
  REQUIRE_FALSE(jrep.degeneracyBodies.empty());
  int found = 0;
  for (const auto& d : jrep.degeneracyBodies)
    for (const auto& e : rep.degeneracyBodies)
      if (d == e) ++found;
  std::cerr << "  shared classical degeneracy conditions: " << found << "\n";
  CHECK(found == int(jrep.degeneracyBodies.size()));
  for (const auto& gJ : jrep.kernel) {
    if (gJ.verified) continue;
    bool present = false;
    for (const auto& gC : rep.kernel)
      if (!gC.verified && gC.direction == gJ.direction) present = true;
    CHECK_MESSAGE(present, "direction ", gJ.direction);
  }
}
