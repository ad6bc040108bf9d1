#pragma once

#include "laxcheck/ncdga.hpp"
#include "laxcheck/theory.hpp"

#include <optional>
#include <string>
#include <vector>

namespace laxcheck {

enum class CheckStatus : uint8_t { Pass, Fail, Skip };
const char* check_status_name(CheckStatus s);

struct CheckReport {
  std::string id;
  CheckStatus status = CheckStatus::Pass;
  std::string residual;     // canonical string of the first failing residual
  std::string flags;        // convention flags the check ran under
  double elapsedMs = 0;
  std::vector<std::string> notes; // audit trail (script steps, sub-results)
};

/// A verified equality, kept for the numeric-oracle cross-check
/// (coordinate sector only).
struct IdentityInstance {
  std::string id;
  ContextPtr ctx;
  Expr lhs, rhs;
};

struct CheckOutcome {
  CheckReport report;
  std::vector<IdentityInstance> identities;
};

// Theory-level checks -------------------------------------------------------

CheckOutcome check_lax_axioms(const Theory& t);
/// Evaluates L^k = (1/k) iota_E (iota_Q delta theta^k - d theta^{k+1}) and
/// compares with the declared component.
CheckOutcome compute_codim_L(const Theory& t, int k);
CheckOutcome check_descent(const Theory& t);
/// Descent equations L_Q O^k = d O^{k+1} for an arbitrary tuple.
CheckOutcome check_descent_tuple(const ContextPtr& ctx, const std::vector<Expr>& O,
                                 const EvolutionaryVF& Q, const std::string& id);
CheckOutcome check_Q_decomposition(const Theory& t);
/// Applies theta -> theta + delta f, L -> L + d f and re-runs the axioms.
/// When fs is empty, uses built-in data (shipped f for gr1d, zero otherwise).
CheckOutcome check_f_transform(const Theory& t, const std::vector<Expr>& fs = {});

enum class Direction { Phi, Psi };

// Package-level checks -------------------------------------------------------

CheckOutcome check_chain_map(const EquivalencePackage& p, Direction dir);
CheckOutcome check_transform(const EquivalencePackage& p, Direction dir);
CheckOutcome check_classical_reduction(const EquivalencePackage& p);
CheckOutcome check_commutator_D(const EquivalencePackage& p);
CheckOutcome check_flow(const EquivalencePackage& p);
CheckOutcome check_hchi(const EquivalencePackage& p);
CheckOutcome check_composition(const EquivalencePackage& p);

// Pre-boundary kernel ---------------------------------------------------------

struct KernelPivot {
  std::string row, col;
  std::string pivot; // canonical string of the pivot entry
};

struct KernelGenerator {
  std::string direction;                          // free coordinate
  std::vector<std::pair<std::string, std::string>> components; // coord -> coeff
  bool verified = false;
};

struct KernelReport {
  std::string theory;
  std::vector<std::string> coordinates;
  int maxJetOrder = 0;
  bool higherJetsThanDefault = false;
  std::vector<KernelPivot> pivots;
  std::vector<KernelGenerator> kernel;
  std::vector<std::string> degeneracyConditions; // field-dependent blockers
  /// Ghost/antifield-free parts of the conditions (the classical singular
  /// locus), used to compare singular patterns across theories.
  std::vector<std::string> degeneracyBodies;
  bool constantRank = false;
  std::string summary;
};

/// Computes the kernel of varpi^1 = delta theta^1 over the boundary jets.
/// An optional pre-morphism (e.g. chi*) is applied to theta^1 first.
KernelReport preboundary_kernel(const Theory& t, const Morphism* preMorphism = nullptr);
CheckOutcome preboundary_kernel_check(const Theory& t, const Morphism* preMorphism,
                                      bool expectConstantRank, KernelReport* out = nullptr);

// Numeric oracle ---------------------------------------------------------------

struct OracleReport {
  bool pass = false;
  int trials = 0;
  int rejected = 0;
  std::string note;
};

/// Evaluates lhs - rhs at random rational field configurations in an exact
/// tower of quadratic extensions; PASS iff all samples vanish.
OracleReport numeric_oracle(const IdentityInstance& ident, int trials, uint64_t seed);

// Suites ------------------------------------------------------------------------

std::vector<CheckOutcome> run_lax_suite(const Theory& t);
std::vector<CheckOutcome> run_equivalence_suite(const EquivalencePackage& p);
std::vector<CheckOutcome> run_kernel_suite();

// Mutation robustness -------------------------------------------------------------

struct Mutation {
  std::string id;      // e.g. "gr1d/Q/g+/flip-ELg"
  std::string theory;  // builtin theory name
};

/// The designated sign mutations exercised by the robustness criterion.
std::vector<Mutation> designated_mutations();
/// Applies the mutation and returns the mutated theory.
Theory apply_mutation(const Mutation& m);

} // namespace laxcheck
