#pragma once

#include "laxcheck/expr.hpp"
#include "laxcheck/varcalc.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace laxcheck {

/// Coordinate-sector lax theory: symbol table, cohomological vector field,
/// optional Chevalley-Eilenberg part, and the theta/L densities by
/// codimension (codim 0 carries the dt factor).
struct CoordTheory {
  std::string name;
  ContextPtr ctx;
  EvolutionaryVF Q;
  std::optional<EvolutionaryVF> gamma;
  std::vector<Expr> theta; // index = codimension
  std::vector<Expr> L;

  Expr thetaC(size_t k) const { return k < theta.size() ? theta[k] : Expr::zero(); }
  Expr LC(size_t k) const { return k < L.size() ? L[k] : Expr::zero(); }
  /// All 0-jet generator atoms (per component) in canonical order.
  std::vector<AtomId> generators() const;
};

/// Closed-form flow chi*_s = e^{s L_D} with its limits and homotopy values.
struct FlowData {
  Morphism chiS;      // ctx1 -> ctx1, uses the flow parameter u = e^{-s}
  SContext limits;    // u -> 1 (s=0) and u -> 0 (s=infinity) images
  std::map<AtomId, Expr> chiStarExpected; // declared chi* on 0-jet generators
  std::map<AtomId, Expr> hchi;            // declared h_chi values
  std::map<AtomId, Expr> antideriv;       // A(s) with dA/ds = chi_s(R phi)
};

struct ClassicalReduction {
  Morphism solution;          // partial EL solution substituted on ctx1
  Morphism classicalPullback; // ctx2 classical sector -> ctx1
  Expr classicalL1;           // ghost/antifield-free part of L0 of theory 1
  Expr classicalL2;           // of theory 2
  std::optional<Morphism> wrongSolution; // negative control
};

/// Equivalence package between theory 1 (extended) and theory 2 (reduced):
/// phi: F2 -> F1 with pullback phi* : Omega(F1) -> Omega(F2), psi the other
/// way; transformation data beta/f on each side; homotopy data R, chi_s,
/// h_chi on side 1.
struct CoordPackage {
  std::string name;
  std::shared_ptr<CoordTheory> t1, t2;
  Morphism phiStar; // src ctx1, tgt ctx2
  Morphism psiStar; // src ctx2, tgt ctx1
  std::vector<Expr> beta1, f1; // ctx1, psi direction
  std::vector<Expr> beta2, f2; // ctx2, phi direction
  EvolutionaryVF R;            // on ctx1
  FlowData flow;
  std::optional<ClassicalReduction> classical;

  Expr beta1C(size_t k) const { return k < beta1.size() ? beta1[k] : Expr::zero(); }
  Expr f1C(size_t k) const { return k < f1.size() ? f1[k] : Expr::zero(); }
  Expr beta2C(size_t k) const { return k < beta2.size() ? beta2[k] : Expr::zero(); }
  Expr f2C(size_t k) const { return k < f2.size() ? f2[k] : Expr::zero(); }
};

struct NCTheory;  // Yang-Mills sector, see ncdga.hpp
struct NCPackage;

/// A catalog entry: exactly one of the two representations is set.
struct Theory {
  std::string name;
  std::shared_ptr<CoordTheory> coord;
  std::shared_ptr<NCTheory> nc;
};

struct EquivalencePackage {
  std::string name;
  std::shared_ptr<CoordPackage> coord;
  std::shared_ptr<NCPackage> nc;
};

struct TheoryOptions {
  int targetDim = 0; // 0 = per-theory default
  DtSign dtSign = DtSign::Koszul;
};

/// Built-in catalog.
Theory builtin_theory(const std::string& name, const TheoryOptions& opts = {});
EquivalencePackage builtin_package(const std::string& name, const TheoryOptions& opts = {});
std::vector<std::string> builtin_theory_names();
std::vector<std::string> builtin_package_names();

} // namespace laxcheck
