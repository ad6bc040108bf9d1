#pragma once

#include "laxcheck/error.hpp"
#include "laxcheck/rational.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace laxcheck {

/// Convention flags for the Yang-Mills sector: parity of the source
/// dimension d and the signature sign epsilon_s.
struct NCFlags {
  bool dOdd = false;
  int epsS = 1;
  int comboIndex() const { return (dOdd ? 2 : 0) + (epsS < 0 ? 1 : 0); }
  static NCFlags fromCombo(int i) { return NCFlags{(i & 2) != 0, (i & 1) ? -1 : 1}; }
};

enum class NCBase : uint8_t { A, c, B, Adag, Bdag, cdag, F };
enum class NCDecor : uint8_t { Delta, Star, DA };

const char* nc_base_name(NCBase b);

/// Form degree affine in the source dimension: a + b d.
struct AffDeg {
  int a = 0, b = 0;
  AffDeg operator+(const AffDeg& o) const { return {a + o.a, b + o.b}; }
  bool operator==(const AffDeg& o) const { return a == o.a && b == o.b; }
  int parity(const NCFlags& f) const { return (((a + (f.dOdd ? b : 0)) % 2) + 2) % 2; }
};

/// One letter of a trace word: a base symbol with a decoration stack
/// (innermost first, at most one delta, stars collapsed on construction).
struct NCLetter {
  NCBase base;
  std::vector<NCDecor> decor;

  bool operator<(const NCLetter& o) const {
    if (base != o.base) return base < o.base;
    return decor < o.decor;
  }
  bool operator==(const NCLetter& o) const { return base == o.base && decor == o.decor; }

  AffDeg formDeg() const;
  int ghost() const;
  int fdF() const; // number of delta decorations (0 or 1)
  int internalParity() const { return (((ghost() + fdF()) % 2) + 2) % 2; }
  int parity(const NCFlags& f) const { return (formDeg().parity(f) + internalParity()) % 2; }
  std::string str() const;
};

using NCWord = std::vector<NCLetter>;

/// Laurent-free polynomial in the flow parameter u = e^{-s}.
struct UPoly {
  std::map<int, Rat> c; // exponent -> coefficient
  static UPoly constant(const Rat& r);
  static UPoly u(int n = 1);
  bool isZero() const { return c.empty(); }
  UPoly operator+(const UPoly& o) const;
  UPoly operator*(const UPoly& o) const;
  UPoly operator*(const Rat& r) const;
  bool operator==(const UPoly& o) const { return c == o.c; }
  UPoly dds() const;               // d/ds with du/ds = -u
  Rat at(int uval01) const;        // evaluate at u = 0 or u = 1
  std::string str() const;
};

/// Sum of words (free or cyclic) with exact u-polynomial coefficients.
/// Canonical form: stars involuted, delta-delta killed, trace words rotated
/// to their minimal representative with Koszul signs absorbed.
struct NCExpr {
  bool trace = false;
  std::map<NCWord, UPoly> terms;

  bool isZero() const { return terms.empty(); }
  size_t termCount() const { return terms.size(); }
  bool operator==(const NCExpr& o) const { return trace == o.trace && terms == o.terms; }
  std::string str() const;
};

// Construction -------------------------------------------------------------

NCExpr nc_zero(bool trace = false);
NCExpr nc_letter(const NCFlags& f, NCLetter l, UPoly coeff = UPoly::constant(1));
NCExpr nc_word(const NCFlags& f, const NCWord& w, UPoly coeff = UPoly::constant(1), bool trace = false);
NCExpr nc_add(const NCExpr& a, const NCExpr& b);
NCExpr nc_sub(const NCExpr& a, const NCExpr& b);
NCExpr nc_scale(const NCExpr& a, const Rat& r);
NCExpr nc_scale(const NCExpr& a, const UPoly& r);
NCExpr nc_neg(const NCExpr& a);
/// Free product (concatenation); operands must not be traces.
NCExpr nc_mul(const NCFlags& f, const NCExpr& a, const NCExpr& b);
/// Graded bracket [a, b]; operands must be parity-homogeneous.
NCExpr nc_bracket(const NCFlags& f, const NCExpr& a, const NCExpr& b);
/// Wrap a free expression into a trace (cyclic canonicalization).
NCExpr nc_tr(const NCFlags& f, const NCExpr& a);
/// Re-canonicalizes (idempotent).
NCExpr nc_normalize(const NCFlags& f, const NCExpr& a);

std::optional<int> nc_parity(const NCFlags& f, const NCExpr& a);
/// Uniform total form degree, or nullopt.
std::optional<AffDeg> nc_form_degree(const NCExpr& a);
std::optional<int> nc_ghost(const NCExpr& a);
/// Split by codimension: a word of form degree (−k, 1) has codimension k.
std::map<int, NCExpr> nc_split_codim(const NCExpr& a);

// Differentials ------------------------------------------------------------

/// Hodge star of a g-valued expression (all but one factor must be 0-forms).
NCExpr nc_star(const NCFlags& f, const NCExpr& a);
/// d_A as a graded derivation (Bianchi d_A F = 0 built in; d_A d_A stacks).
NCExpr nc_dA(const NCFlags& f, const NCExpr& a);
/// Vertical differential with the delta-F and delta-dA-commute rules.
NCExpr nc_delta(const NCFlags& f, const NCExpr& a);
/// Horizontal differential of a density: d Tr[w] = Tr[d_A w].
NCExpr nc_d(const NCFlags& f, const NCExpr& a);

/// Evolutionary vector field given by images of plain base letters.
struct NCVf {
  int ghShift = 0;
  std::map<NCBase, NCExpr> action;
};

NCExpr nc_contract(const NCFlags& f, const NCVf& X, const NCExpr& a);
NCExpr nc_lie(const NCFlags& f, const NCVf& X, const NCExpr& a);

enum class NCDiffOp : uint8_t { D, Delta, IotaQ, LieQ };
/// Uniform entry point for the differentials; Q is required for IotaQ/LieQ.
inline NCExpr nc_differential(const NCFlags& f, NCDiffOp op, const NCExpr& a,
                              const NCVf* Q = nullptr) {
  switch (op) {
    case NCDiffOp::D: return nc_d(f, a);
    case NCDiffOp::Delta: return nc_delta(f, a);
    case NCDiffOp::IotaQ: if (!Q) fail(Errc::Internal, "iota_Q needs a Q table"); return nc_contract(f, *Q, a);
    case NCDiffOp::LieQ: if (!Q) fail(Errc::Internal, "L_Q needs a Q table"); return nc_lie(f, *Q, a);
  }
  fail(Errc::Internal, "unreachable");
}
NCExpr nc_lie_composite(const NCFlags& f, const NCVf& X, const NCExpr& a);
NCVf nc_commutator(const NCFlags& f, const NCVf& X, const NCVf& Y);
/// iota of the graded Euler vector field (delta X -> gh(X) X).
NCExpr nc_contract_euler(const NCFlags& f, const NCExpr& a);

/// Letter-image morphism; decorations are re-applied to the images.
struct NCMorphism {
  std::map<NCBase, NCExpr> images;
};
NCExpr nc_apply_morphism(const NCFlags& f, const NCMorphism& m, const NCExpr& a);

NCExpr nc_s_derivative(const NCFlags& f, const NCExpr& a);
NCExpr nc_s_limit(const NCFlags& f, const NCExpr& a, int uval01);

// Rewrite rules and proof scripts -------------------------------------------

enum class NCRule : uint8_t {
  BracketExpand,
  TraceCyclic,
  TraceOfBracketZero,
  StarSwap,
  StarInvolution,
  Bianchi,
  DASquared,
  DeltaF,
  DeltaDACommute,
  LeibnizD,
  LeibnizDelta,
};

const char* nc_rule_name(NCRule r);
std::optional<NCRule> nc_rule_by_name(const std::string& s);

struct NCScriptStep {
  NCRule rule;
  int term = 0; // index into the canonical term order
  int pos = 0;  // letter offset inside the word
};

struct NCScript {
  std::string id;
  std::vector<NCScriptStep> steps;
};

/// Applies one rule instance; throws RuleMismatch if it does not match.
NCExpr nc_apply_rule(const NCFlags& f, const NCExpr& a, NCRule rule, int term, int pos);

/// Deterministic bounded reduction: saturates dA-squared and Bianchi, then
/// maps every word to the minimum of its star-swap orbit. Records the steps
/// taken (a replayable certificate).
NCExpr nc_auto_reduce(const NCFlags& f, const NCExpr& a, std::vector<NCScriptStep>* steps = nullptr);

struct NCScriptResult {
  bool pass = false;
  NCExpr residual;
  std::vector<std::string> audit;
};
NCScriptResult nc_check_script(const NCFlags& f, const NCExpr& lhs, const NCExpr& rhs,
                               const NCScript& script);

// Theories -----------------------------------------------------------------

/// Flag-specific data of one Yang-Mills formulation.
struct NCTheoryData {
  NCFlags flags;
  std::vector<NCBase> bases;
  NCVf Q;
  std::vector<NCExpr> theta; // codim 0..2 (traces)
  std::vector<NCExpr> L;
  NCExpr thetaC(size_t k) const { return k < theta.size() ? theta[k] : nc_zero(true); }
  NCExpr LC(size_t k) const { return k < L.size() ? L[k] : nc_zero(true); }
};

struct NCTheory {
  std::string name;
  int order = 1; // 1 = first-order (with B), 2 = second-order
  std::array<NCTheoryData, 4> byFlags;
  const NCTheoryData& data(const NCFlags& f) const { return byFlags[size_t(f.comboIndex())]; }
};

struct NCPackageData {
  NCFlags flags;
  NCMorphism phiStar; // Omega(1YM) -> Omega(2YM)
  NCMorphism psiStar; // Omega(2YM) -> Omega(1YM)
  std::vector<NCExpr> beta1, f1; // on the first-order side
  NCVf R;
  NCMorphism chiS; // flow with u-coefficients
  std::map<NCBase, NCExpr> chiStarExpected;
  std::map<NCBase, NCExpr> hchi;
  std::map<NCBase, NCExpr> antideriv;
  NCMorphism classicalSolution; // B -> *F
  NCMorphism wrongSolution;     // negative control
  NCExpr classicalL1, classicalL2;
};

struct NCPackage {
  std::string name;
  std::shared_ptr<NCTheory> t1, t2;
  std::array<NCPackageData, 4> byFlags;
  const NCPackageData& data(const NCFlags& f) const { return byFlags[size_t(f.comboIndex())]; }
};

std::shared_ptr<NCTheory> nc_builtin_theory(int order);
std::shared_ptr<NCPackage> nc_builtin_package();

} // namespace laxcheck
