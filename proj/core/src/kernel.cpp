#include "laxcheck/checks.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>

namespace laxcheck {

namespace {

// Invertibility of an even entry: a single unit monomial, optionally plus
// nilpotent (odd-containing) terms. Returns the inverse when invertible.
std::optional<Expr> invertUnitSoul(const Context& c, const Expr& e) {
  Expr body, soul;
  for (const auto& [m, co] : e.terms()) {
    if (m.odd.empty())
      body.addTerm(m, co);
    else
      soul.addTerm(m, co);
  }
  if (body.termCount() != 1) return std::nullopt;
  const auto& [m, co] = *body.terms().begin();
  for (const auto& [id, ex] : m.even)
    if (ex < 0 ? false : !c.atom(id).invertible) return std::nullopt;
  Expr binv;
  try {
    binv = invert(c, body);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (soul.isZero()) return binv;
  // (b + n)^{-1} = b^{-1} sum_k (-n b^{-1})^k, n nilpotent.
  Expr x = gmul(c, neg(soul), binv);
  Expr acc = Expr::constant(1);
  Expr pow = x;
  for (int k = 0; k < 12 && !pow.isZero(); ++k) {
    acc = add(acc, pow);
    pow = gmul(c, pow, x);
  }
  if (!pow.isZero()) return std::nullopt;
  return gmul(c, binv, acc);
}

struct Coordinate {
  AtomId jet; // the coordinate x_alpha
  AtomId var; // its variation delta x_alpha
  std::string name;
};

// iota of the point derivation along one coordinate.
Expr pointContract(const Context& c, AtomId varAtom, const Expr& a, const Expr& coeff) {
  Derivation d;
  d.parity = (c.parity(varAtom) + (parity_of(c, coeff).value_or(0))) % 2;
  d.base = [varAtom, &coeff](const Context&, AtomId id) -> std::optional<Expr> {
    if (id == varAtom) return coeff;
    return std::nullopt;
  };
  return apply_derivation(c, d, a);
}

Expr coefficientOf(const Context& c, AtomId varAtom, const Expr& row) {
  return pointContract(c, varAtom, row, Expr::constant(1));
}

} // namespace

KernelReport preboundary_kernel(const Theory& t, const Morphism* preMorphism) {
  if (!t.coord) fail(Errc::Internal, "pre-boundary kernel is defined for coordinate theories");
  const CoordTheory& th = *t.coord;
  const Context& c = *th.ctx;
  KernelReport rep;
  rep.theory = t.name + (preMorphism ? "+pre-morphism" : "");

  Expr theta1 = th.thetaC(1);
  if (preMorphism) theta1 = apply_morphism(c, *preMorphism, theta1);
  Expr varpi = vertical_delta(c, theta1);

  // Boundary coordinates: all jets up to the highest order whose variation
  // appears in varpi.
  int maxOrd = 0;
  for (const auto& [m, co] : varpi.terms()) {
    auto scan = [&](AtomId id) {
      const AtomDecl& d = c.atom(id);
      if (d.kind == AtomKind::Variation) maxOrd = std::max(maxOrd, d.jetOrder);
    };
    for (const auto& [id, ex] : m.even) scan(id);
    for (AtomId id : m.odd) scan(id);
  }
  rep.maxJetOrder = maxOrd;
  rep.higherJetsThanDefault = maxOrd > 1;

  std::vector<Coordinate> coords;
  for (FieldId f = 0; f < c.fields().size(); ++f)
    for (int k = 0; k <= maxOrd; ++k)
      for (int comp = 0; comp < c.field(f).ncomp; ++comp)
        coords.push_back({c.jet(f, k, comp), c.variation(f, k, comp), c.atom(c.jet(f, k, comp)).name});
  for (const auto& co : coords) rep.coordinates.push_back(co.name);

  // Rows of the pre-boundary two-form.
  std::vector<Expr> rows;
  for (const auto& co : coords) rows.push_back(coefficientOf(c, co.var, varpi));

  // Greedy symplectic pairing with invertible even pivots. A pivot at
  // (alpha, beta) consumes both coordinates; both rows remain available for
  // the kernel back-substitution below.
  std::vector<bool> paired(coords.size(), false);
  std::map<AtomId, std::pair<size_t, Expr>> unitRowForCol; // var atom -> (row idx, inverse)
  for (size_t a = 0; a < coords.size(); ++a) {
    if (paired[a] || rows[a].isZero()) continue;
    for (size_t b = 0; b < coords.size(); ++b) {
      if (paired[b] || b == a) continue;
      Expr entry = coefficientOf(c, coords[b].var, rows[a]);
      if (entry.isZero()) continue;
      auto par = parity_of(c, entry);
      if (!par || *par != 0) continue;
      auto inv = invertUnitSoul(c, entry);
      if (!inv) continue;
      paired[a] = paired[b] = true;
      rep.pivots.push_back({coords[a].name, coords[b].name, to_string(c, entry)});
      unitRowForCol[coords[b].var] = {a, *inv};
      // the transposed entry serves as a pivot for the other column
      Expr entryT = coefficientOf(c, coords[a].var, rows[b]);
      auto invT = invertUnitSoul(c, entryT);
      if (invT) unitRowForCol[coords[a].var] = {b, *invT};
      break;
    }
  }

  std::set<std::string> degeneracy, degBodies;
  auto classicalBody = [&](const Expr& e) {
    Expr r;
    for (const auto& [m, co] : e.terms()) {
      bool ok = true;
      for (const auto& [id, ex] : m.even)
        if (c.atom(id).degree.gh != 0) ok = false;
      for (AtomId id : m.odd)
        if (c.atom(id).degree.gh != 0) ok = false;
      if (ok) r.addTerm(m, co);
    }
    return r;
  };
  // Kernel candidates along each unpaired coordinate.
  for (size_t a = 0; a < coords.size(); ++a) {
    if (paired[a]) continue;
    // X = e_a + corrections; iterate corrections until the residual vanishes.
    std::map<AtomId, Expr> images; // variation atom -> component
    images[coords[a].var] = Expr::constant(1);
    auto residual = [&]() {
      Derivation d;
      // components have mixed parity in general; apply one coordinate at a
      // time and sum, so each application is parity-homogeneous.
      Expr r;
      for (const auto& [v, comp] : images) {
        if (comp.isZero()) continue;
        r = add(r, pointContract(c, v, varpi, comp));
      }
      return r;
    };
    Expr r = residual();
    bool ok = is_zero(c, r);
    for (int iter = 0; iter < 24 && !ok; ++iter) {
      bool progressed = false;
      // collect the residual components per variation atom
      for (const auto& co : coords) {
        Expr comp = coefficientOf(c, co.var, r);
        if (comp.isZero()) continue;
        auto it = unitRowForCol.find(co.var);
        if (it == unitRowForCol.end()) continue;
        size_t rowIdx = it->second.first;
        const Expr& pivInv = it->second.second;
        Expr corr = neg(gmul(c, comp, pivInv));
        // self-correcting sign: try the correction, keep it if the component
        // shrinks to zero, otherwise flip.
        Expr& slot = images[coords[rowIdx].var];
        Expr save = slot;
        slot = add(slot, corr);
        Expr r2 = residual();
        if (!is_zero(c, coefficientOf(c, co.var, r2))) {
          slot = add(save, neg(corr));
          r2 = residual();
        }
        r = r2;
        progressed = true;
      }
      ok = is_zero(c, r);
      if (!progressed) break;
    }
    KernelGenerator gen;
    gen.direction = coords[a].name;
    for (const auto& [v, comp] : images) {
      if (comp.isZero()) continue;
      const AtomDecl& d = c.atom(v);
      gen.components.push_back({c.atom(c.jet(d.field, d.jetOrder, d.comp)).name, to_string(c, comp)});
    }
    gen.verified = ok;
    if (ok) {
      rep.kernel.push_back(std::move(gen));
    } else {
      // record the leftover residual components as degeneracy conditions
      for (const auto& co : coords) {
        Expr comp = coefficientOf(c, co.var, r);
        if (!is_zero(c, comp)) {
          degeneracy.insert(to_string(c, comp));
          Expr body = classicalBody(comp);
          if (!is_zero(c, body)) {
            degBodies.insert(to_string(c, body));
            degBodies.insert(to_string(c, neg(body)));
          }
        }
      }
      rep.kernel.push_back(std::move(gen));
    }
  }
  rep.degeneracyConditions.assign(degeneracy.begin(), degeneracy.end());
  rep.degeneracyBodies.assign(degBodies.begin(), degBodies.end());
  rep.constantRank = degeneracy.empty();
  {
    std::ostringstream os;
    os << (rep.constantRank ? "constant rank" : "non-constant rank") << "; "
       << rep.pivots.size() << " symplectic pairs, "
       << std::count_if(rep.kernel.begin(), rep.kernel.end(),
                        [](const KernelGenerator& g) { return g.verified; })
       << " verified kernel generators, " << rep.degeneracyConditions.size()
       << " degeneracy conditions";
    rep.summary = os.str();
  }
  return rep;
}

CheckOutcome preboundary_kernel_check(const Theory& t, const Morphism* preMorphism,
                                      bool expectConstantRank, KernelReport* out) {
  CheckOutcome outcome;
  outcome.report.id = std::string("kernel/") + t.name + (preMorphism ? "+chi" : "");
  auto t0 = std::chrono::steady_clock::now();
  KernelReport rep = preboundary_kernel(t, preMorphism);
  outcome.report.notes.push_back(rep.summary);
  if (rep.higherJetsThanDefault)
    outcome.report.notes.push_back("jets beyond the default order-1 truncation appear (order " +
                                   std::to_string(rep.maxJetOrder) + ")");
  for (const auto& d : rep.degeneracyConditions)
    outcome.report.notes.push_back("degeneracy: " + d);
  bool pass = rep.constantRank == expectConstantRank;
  // every reported kernel generator must annihilate varpi exactly
  for (const auto& g : rep.kernel)
    if (g.verified == false && rep.constantRank) pass = false;
  outcome.report.status = pass ? CheckStatus::Pass : CheckStatus::Fail;
  if (!pass)
    outcome.report.residual = rep.summary;
  outcome.report.elapsedMs = std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
  if (out) *out = std::move(rep);
  return outcome;
}

} // namespace laxcheck
