#pragma once

#include "laxcheck/degree.hpp"
#include "laxcheck/error.hpp"
#include "laxcheck/rational.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace laxcheck {

using AtomId = uint32_t;
using FieldId = uint32_t;

class Expr;

enum class AtomKind : uint8_t {
  Constant,   // E, m, ...
  FlowParam,  // u = e^{-s}
  FuncDeriv,  // k-th formal derivative of a background function of one field
  Jet,        // d^k/dt^k of a field component
  Variation,  // vertical variation of a jet
  Radical,    // square root of an invertible scalar atom
  DefScalar,  // named composite scalar with an expansion
  Dt,         // the source 1-form
};

struct FieldDecl {
  std::string name;
  int gh = 0;
  int ncomp = 1;
  bool invertible = false;
  std::optional<Rat> tensor; // tensor number of the 0-jet
  bool ghost = false;        // true when gamma acts with the 1/2 Lie rule
};

struct AtomDecl {
  AtomKind kind;
  std::string name;
  Degree degree;
  bool invertible = false;
  FieldId field = 0;      // Jet/Variation/FuncDeriv argument field
  int jetOrder = 0;       // Jet/Variation
  int comp = 0;           // Jet/Variation component (0-based)
  int derivOrder = 0;     // FuncDeriv
  AtomId baseAtom = 0;    // Radical: invertible scalar atom it is the root of
  std::optional<Rat> tensor;
};

/// How dt commutes with odd atoms. Koszul (default) gives the sign -1;
/// Central treats dt as commuting with everything (dt^2 = 0 still enforced).
enum class DtSign : uint8_t { Koszul, Central };

struct ConventionFlags {
  DtSign dtSign = DtSign::Koszul;
};

/// Immutable symbol table for one theory: fields, jets, variations and the
/// scalar atoms they generate. Atom ids are assigned in the global canonical
/// order (constants, flow parameter, background-function derivatives, field
/// jets, variations, radicals, named scalars, dt), so monomials can be
/// ordered by id alone.
class Context {
public:
  class Builder;

  int dimM() const { return dimM_; }
  int targetDim() const { return targetDim_; }
  int maxJet() const { return maxJet_; }
  const ConventionFlags& flags() const { return flags_; }

  size_t atomCount() const { return atoms_.size(); }
  const AtomDecl& atom(AtomId id) const { return atoms_[id]; }
  const std::vector<FieldDecl>& fields() const { return fields_; }
  const FieldDecl& field(FieldId f) const { return fields_[f]; }

  AtomId atomByName(const std::string& name) const;
  std::optional<AtomId> tryAtomByName(const std::string& name) const;
  std::optional<FieldId> tryFieldByName(const std::string& name) const;
  FieldId fieldByName(const std::string& name) const;

  AtomId jet(FieldId f, int order, int comp = 0) const;
  AtomId variation(FieldId f, int order, int comp = 0) const;
  AtomId dt() const { return dtAtom_; }
  std::optional<AtomId> flowParam() const { return uAtom_; }
  AtomId funcDeriv(const std::string& base, int order) const;

  /// Expansion of a DefScalar (canonical, free of positive DefScalar powers).
  const Expr& expansion(AtomId defScalar) const;
  bool hasExpansion(AtomId id) const;

  /// Radical whose square is the given invertible scalar atom, if declared.
  std::optional<AtomId> radicalOf(AtomId base) const;

  int parity(AtomId id) const { return atoms_[id].degree.parity(); }
  bool isOdd(AtomId id) const { return parity(id) == 1; }

  /// Tensor number of an atom; nullopt when undefined.
  std::optional<Rat> tensorNumber(AtomId id) const;

  ~Context();
  Context(Context&&) noexcept;
  Context& operator=(Context&&) noexcept;
  Context(const Context&) = delete;
  Context& operator=(const Context&) = delete;

private:
  friend class Builder;
  friend void define_scalar(Context& ctx, const std::string& name, Expr expansion);
  Context();

  std::vector<FieldDecl> fields_;
  std::vector<AtomDecl> atoms_;
  std::map<std::string, AtomId> byName_;
  std::map<std::string, FieldId> fieldByName_;
  std::map<std::pair<FieldId, std::pair<int, int>>, AtomId> jets_, variations_;
  std::map<std::pair<std::string, int>, AtomId> funcDerivs_;
  std::map<AtomId, AtomId> radicalOf_;
  std::unique_ptr<std::map<AtomId, Expr>> expansions_;
  AtomId dtAtom_ = 0;
  std::optional<AtomId> uAtom_;
  int dimM_ = 1, targetDim_ = 1, maxJet_ = 8;
  ConventionFlags flags_;
};

/// Two-phase construction: declare atoms, build() fixes the canonical id
/// order, then defineScalar() fills DefScalar expansions before use.
class Context::Builder {
public:
  explicit Builder(int targetDim = 1, int maxJet = 8, ConventionFlags flags = {});

  Builder& constant(const std::string& name, bool invertible = true);
  Builder& flowParam(const std::string& name = "u");
  Builder& field(const std::string& name, int gh, int ncomp = 1, bool invertible = false,
                 std::optional<Rat> tensor = std::nullopt, bool ghost = false);
  /// Background function of one declared field (arbitrary formal derivatives).
  Builder& funcAtom(const std::string& base, const std::string& argField, bool invertible = false,
                    std::optional<Rat> tensor = std::nullopt);
  Builder& radical(const std::string& name, const std::string& ofScalar);
  Builder& defScalar(const std::string& name, bool invertible,
                     std::optional<Rat> tensor = std::nullopt);

  std::shared_ptr<Context> build();

private:
  struct PendingFunc {
    std::string base, argField;
    bool invertible;
    std::optional<Rat> tensor;
  };
  struct PendingScalar {
    std::string name;
    bool invertible;
    std::optional<Rat> tensor;
  };
  struct PendingRadical {
    std::string name, of;
  };
  int targetDim_, maxJet_;
  ConventionFlags flags_;
  std::vector<std::pair<std::string, bool>> constants_;
  std::optional<std::string> flowParam_;
  std::vector<FieldDecl> fields_;
  std::vector<PendingFunc> funcs_;
  std::vector<PendingRadical> radicals_;
  std::vector<PendingScalar> scalars_;
};

using ContextPtr = std::shared_ptr<Context>;

/// Mutable handle used only while installing DefScalar expansions.
void define_scalar(Context& ctx, const std::string& name, Expr expansion);

} // namespace laxcheck
