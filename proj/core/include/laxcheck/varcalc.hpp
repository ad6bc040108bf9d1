#pragma once

#include "laxcheck/expr.hpp"

#include <functional>
#include <map>
#include <optional>

namespace laxcheck {

/// Graded derivation defined by base images on Jet/Variation/Dt/Constant/
/// FlowParam atoms. Radicals, background-function derivatives and named
/// scalars are differentiated through their defining relations.
struct Derivation {
  int parity = 0;
  /// Base image; return std::nullopt for zero.
  std::function<std::optional<Expr>(const Context&, AtomId)> base;
};

Expr apply_derivation(const Context& ctx, const Derivation& d, const Expr& a);

/// d/dt prolonged to jets, radicals and scalars.
Expr total_derivative(const Context& ctx, const Expr& a);
Expr total_derivative(const Context& ctx, const Expr& a, int times);
/// Vertical differential: jets to variations.
Expr vertical_delta(const Context& ctx, const Expr& a);
/// Horizontal differential d = dt * d/dt.
Expr horizontal_d(const Context& ctx, const Expr& a);
/// Partial derivative with respect to one jet atom (left derivative).
Expr jet_partial(const Context& ctx, AtomId jetAtom, const Expr& a);

/// Evolutionary vector field: values on 0-jet atoms, prolonged by d/dt.
struct EvolutionaryVF {
  int ghShift = 0;
  std::map<AtomId, Expr> action; // key: jet(f,0,comp)

  std::optional<Expr> actionOf(AtomId jet0) const {
    auto it = action.find(jet0);
    if (it == action.end()) return std::nullopt;
    return it->second;
  }
};

/// Builds an EvolutionaryVF and validates value degrees.
EvolutionaryVF prolong_vf(const Context& ctx, int ghShift, std::map<AtomId, Expr> action);

/// X applied to a jet: d/dt^k of the 0-jet action.
Expr vf_on_jet(const Context& ctx, const EvolutionaryVF& X, FieldId f, int order, int comp);

/// Contraction iota_X (replaces variations, kills dt).
Expr contract(const Context& ctx, const EvolutionaryVF& X, const Expr& a);
/// Variational Lie derivative L_X = [iota_X, delta].
Expr lie_derivative(const Context& ctx, const EvolutionaryVF& X, const Expr& a);
/// Same value computed through the commutator definition (used in tests).
Expr lie_derivative_composite(const Context& ctx, const EvolutionaryVF& X, const Expr& a);

/// Graded commutator [X, Y] of evolutionary vector fields.
EvolutionaryVF vf_commutator(const Context& ctx, const EvolutionaryVF& X, const EvolutionaryVF& Y);

/// Graded Euler vector field E(f) = gh(f) f.
EvolutionaryVF graded_euler_vf(const Context& ctx);

/// Euler operator of a top-form density for one field component:
/// sum_k (-d/dt)^k  d(density)/d(jet(f,k)).
Expr euler_operator(const Context& ctx, const Expr& density, FieldId f, int comp = 0);

/// Pullback morphism between two symbol tables. Images are given on 0-jets,
/// constants, the flow parameter, radicals and background functions; jets
/// are prolonged with d/dt, variations with delta.
struct Morphism {
  const Context* src = nullptr;
  const Context* tgt = nullptr;
  std::map<AtomId, Expr> images;      // src atom -> tgt expr
  std::map<AtomId, Expr> invImages;   // optional: src atom inverse -> tgt expr
  std::map<std::string, std::string> funcMap; // background function renaming
  /// Fields without an image map to the same-name target atom. Substitutions
  /// and flows set this; theory-pair pullbacks list every field explicitly.
  bool implicitIdentity = false;
};

Expr apply_morphism(const Context& srcCtx, const Morphism& m, const Expr& a);

/// Validates radical images (square equals base image) and value parities.
void validate_morphism(const Morphism& m);

/// Composition second after first: result(x) = second(first(x)).
Morphism compose_morphisms(const Morphism& first, const Morphism& second);

/// Flow-parameter derivative du/ds = -u extended as a derivation.
Expr s_derivative(const Context& ctx, const Expr& a);

/// Data for taking s -> 0 / s -> infinity limits of flow expressions.
struct SContext {
  const Context* ctx = nullptr;
  std::map<AtomId, Expr> limitInfty; // images of u-dependent radicals/scalars at u=0
  std::map<AtomId, Expr> invInfty;   // inverse images at u=0
  std::map<AtomId, Expr> limitZero;  // at s=0 (u=1)
  std::map<AtomId, Expr> invZero;
};

enum class SEndpoint { Zero, Infinity };
Expr s_limit(const SContext& sc, const Expr& a, SEndpoint ep);

/// Chevalley-Eilenberg action via tensor numbers; both computation paths are
/// compared and TensorMismatch is thrown when they disagree.
Expr gamma_action(const Context& ctx, const EvolutionaryVF& gamma, const Expr& a);

} // namespace laxcheck
