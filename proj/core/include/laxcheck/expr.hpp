#pragma once

#include "laxcheck/context.hpp"
#include "laxcheck/degree.hpp"
#include "laxcheck/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace laxcheck {

/// Canonical monomial: commuting atoms with integer exponents (negative only
/// on invertible atoms, radicals reduced to exponent 1) and an ordered list
/// of distinct odd atoms. Atom ids are already in canonical order.
struct Monomial {
  std::vector<std::pair<AtomId, int32_t>> even; // sorted by id, exp != 0
  std::vector<AtomId> odd;                      // sorted by id, no repeats

  bool operator<(const Monomial& o) const {
    if (odd != o.odd) return odd < o.odd;
    return even < o.even;
  }
  bool operator==(const Monomial& o) const { return odd == o.odd && even == o.even; }
  bool empty() const { return even.empty() && odd.empty(); }
};

/// Canonical element of the graded-commutative algebra: a term map from
/// monomials to nonzero exact rationals. Two Exprs compare equal iff their
/// term maps are identical.
class Expr {
public:
  Expr() = default;

  static Expr zero() { return Expr(); }
  static Expr constant(const Rat& c);
  static Expr constant(long long c) { return constant(Rat(c)); }
  /// Atom to an integer power; positive powers of DefScalars expand.
  static Expr atomPow(const Context& ctx, AtomId id, int32_t exp = 1);
  static Expr atom(const Context& ctx, AtomId id) { return atomPow(ctx, id, 1); }

  bool isZero() const { return terms_.empty(); } // structural (termwise) zero
  size_t termCount() const { return terms_.size(); }
  const std::map<Monomial, Rat>& terms() const { return terms_; }

  bool operator==(const Expr& o) const { return terms_ == o.terms_; }
  bool operator!=(const Expr& o) const { return !(*this == o); }

  void addTerm(const Monomial& m, const Rat& c);

private:
  std::map<Monomial, Rat> terms_;
};

Expr add(const Expr& a, const Expr& b);
Expr sub(const Expr& a, const Expr& b);
Expr scale(const Expr& a, const Rat& c);
Expr neg(const Expr& a);

/// Graded-commutative product with Koszul signs from total parity.
Expr gmul(const Context& ctx, const Expr& a, const Expr& b);
Expr gpow(const Context& ctx, const Expr& a, int n); // n >= 0

/// Inverse of a single-term monomial of invertible atoms.
/// Throws NonInvertibleDenominator otherwise.
Expr invert(const Context& ctx, const Expr& a);

/// Rational power of a monomial expression. Half-integer exponents require a
/// declared radical for every odd-power factor.
Expr ratPow(const Context& ctx, const Expr& a, const Rat& exp);

/// Complete zero test in the localized radical-extended ring: clears all
/// DefScalar denominators by their expansions and checks termwise.
bool is_zero(const Context& ctx, const Expr& a);

Degree degree_of_monomial(const Context& ctx, const Monomial& m);
/// Common degree of all terms, or nullopt when inhomogeneous. Zero reports
/// degree (0,0,0).
std::optional<Degree> degree_of(const Context& ctx, const Expr& a);
/// Common lax degree (gh - codim) of all terms, or nullopt.
std::optional<int> lax_degree_of(const Context& ctx, const Expr& a);
std::optional<int> parity_of(const Context& ctx, const Expr& a);

/// Component of horizontal form degree fd (0 or 1 on a 1d source).
Expr fdM_component(const Context& ctx, const Expr& a, int fd);
/// Strip one dt factor from every term (requires all terms to carry dt).
Expr strip_dt(const Context& ctx, const Expr& a);

/// Tensor number of a monomial/homogeneous Expr (sum of per-factor numbers).
/// Throws UndefinedTensorNumber if an atom has none or terms disagree.
Rat tensor_number(const Context& ctx, const Monomial& m);
Rat tensor_number(const Context& ctx, const Expr& a);

std::string to_string(const Context& ctx, const Monomial& m);
std::string to_string(const Context& ctx, const Expr& a);

/// Max jet order of a field appearing in the expression (-1 when absent).
int max_jet_order(const Context& ctx, const Expr& a);

} // namespace laxcheck
