#include "laxcheck/checks.hpp"

#include <chrono>
#include <sstream>

namespace laxcheck {

const char* check_status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Skip: return "SKIP";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

struct Collector {
  CheckOutcome out;
  Clock::time_point t0 = Clock::now();
  ContextPtr ctx;

  explicit Collector(std::string id, ContextPtr c = nullptr) {
    out.report.id = std::move(id);
    ctx = std::move(c);
    if (ctx) {
      out.report.flags = ctx->flags().dtSign == DtSign::Koszul ? "dt-sign=koszul" : "dt-sign=central";
    }
  }

  void ident(const std::string& sub, const Expr& lhs, const Expr& rhs) {
    if (ctx) out.identities.push_back({out.report.id + "/" + sub, ctx, lhs, rhs});
    Expr r = sub_expr(lhs, rhs);
    if (!is_zero(*ctx, r)) failWith(sub, to_string(*ctx, r));
  }

  static Expr sub_expr(const Expr& a, const Expr& b) { return sub(a, b); }

  void failWith(const std::string& sub, const std::string& residual) {
    out.report.status = CheckStatus::Fail;
    if (out.report.residual.empty()) out.report.residual = residual;
    out.report.notes.push_back("FAIL " + sub + ": residual " + residual);
  }

  void note(const std::string& n) { out.report.notes.push_back(n); }

  void skip(const std::string& why) {
    out.report.status = CheckStatus::Skip;
    out.report.notes.push_back(why);
  }

  CheckOutcome finish() {
    out.report.elapsedMs =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(Clock::now() - t0)
            .count();
    return std::move(out);
  }
};

std::string flagStr(const NCFlags& f) {
  std::ostringstream os;
  os << "d-parity=" << (f.dOdd ? "odd" : "even") << ",epsilon-s=" << (f.epsS > 0 ? "+1" : "-1");
  return os.str();
}

// NC residual check: auto-reduce and test for zero; record steps taken.
bool ncIdent(Collector& col, const NCFlags& f, const std::string& sub, const NCExpr& lhs,
             const NCExpr& rhs) {
  std::vector<NCScriptStep> steps;
  NCExpr r = nc_auto_reduce(f, nc_sub(lhs, rhs), &steps);
  if (!r.isZero()) {
    col.failWith(sub + "[" + flagStr(f) + "]", r.str());
    return false;
  }
  if (!steps.empty())
    col.note(sub + "[" + flagStr(f) + "]: closed by " + std::to_string(steps.size()) +
             " rewrite steps");
  return true;
}

std::vector<AtomId> coordGenerators(const CoordTheory& t) { return t.generators(); }

Expr vfAction(const Context& ctx, const EvolutionaryVF& X, AtomId gen) {
  auto v = X.actionOf(gen);
  return v ? *v : Expr::zero();
}

// ---------------------------------------------------------------------------
// Lax axioms
// ---------------------------------------------------------------------------

void coordLaxAxioms(Collector& col, const CoordTheory& t) {
  const Context& c = *t.ctx;
  // Degree bookkeeping.
  for (size_t k = 0; k < t.theta.size(); ++k) {
    if (t.theta[k].isZero()) continue;
    auto lx = lax_degree_of(c, t.theta[k]);
    if (!lx || *lx != -1) col.failWith("deg-theta" + std::to_string(k), "lax degree != -1");
    auto d = degree_of(c, t.theta[k]);
    if (!d || d->fdM != 1 - int(k) || d->fdF != 1)
      col.failWith("form-theta" + std::to_string(k), "wrong form bidegree");
  }
  for (size_t k = 0; k < t.L.size(); ++k) {
    if (t.L[k].isZero()) continue;
    auto lx = lax_degree_of(c, t.L[k]);
    if (!lx || *lx != 0) col.failWith("deg-L" + std::to_string(k), "lax degree != 0");
  }
  // Q^2 = 0 on generators.
  for (AtomId gen : coordGenerators(t)) {
    Expr q1 = vfAction(c, t.Q, gen);
    Expr q2 = lie_derivative(c, t.Q, q1);
    col.ident("Q2/" + c.atom(gen).name, q2, Expr::zero());
  }
  Expr theta0 = t.thetaC(0), theta1 = t.thetaC(1);
  Expr L0 = t.LC(0), L1 = t.LC(1);
  Expr w0 = vertical_delta(c, theta0), w1 = vertical_delta(c, theta1);
  // iota_Q varpi = delta L + d theta, componentwise.
  col.ident("eq1-codim0", contract(c, t.Q, w0), add(vertical_delta(c, L0), horizontal_d(c, theta1)));
  col.ident("eq1-codim1", contract(c, t.Q, w1), vertical_delta(c, L1));
  // iota_Q iota_Q varpi = 2 d L.
  col.ident("eq2-codim0", contract(c, t.Q, contract(c, t.Q, w0)),
            scale(horizontal_d(c, L1), 2));
  col.ident("eq2-codim1", contract(c, t.Q, contract(c, t.Q, w1)), Expr::zero());
  // Consequences: L_Q varpi = d varpi and L_Q L = d(2L - iota_Q theta).
  col.ident("cons1-codim0", lie_derivative(c, t.Q, w0), horizontal_d(c, w1));
  col.ident("cons1-codim1", lie_derivative(c, t.Q, w1), Expr::zero());
  col.ident("cons2-codim0", lie_derivative(c, t.Q, L0),
            horizontal_d(c, sub(scale(L1, 2), contract(c, t.Q, theta1))));
  col.ident("cons2-codim1", lie_derivative(c, t.Q, L1), Expr::zero());
}

void ncLaxAxioms(Collector& col, const NCTheory& t) {
  for (int combo = 0; combo < 4; ++combo) {
    NCFlags f = NCFlags::fromCombo(combo);
    const NCTheoryData& d = t.data(f);
    for (NCBase b : d.bases) {
      auto it = d.Q.action.find(b);
      NCExpr q1 = it == d.Q.action.end() ? nc_zero() : it->second;
      NCExpr q2 = nc_lie(f, d.Q, q1);
      ncIdent(col, f, std::string("Q2/") + nc_base_name(b), q2, nc_zero());
    }
    std::vector<NCExpr> w;
    for (size_t k = 0; k < 3; ++k) w.push_back(nc_delta(f, d.thetaC(k)));
    for (size_t k = 0; k < 3; ++k) {
      NCExpr lhs = nc_contract(f, d.Q, w[k]);
      NCExpr rhs = nc_delta(f, d.LC(k));
      if (k + 1 < 3) rhs = nc_add(rhs, nc_d(f, d.thetaC(k + 1)));
      ncIdent(col, f, "eq1-codim" + std::to_string(k), lhs, rhs);
      NCExpr lhs2 = nc_contract(f, d.Q, nc_contract(f, d.Q, w[k]));
      NCExpr rhs2 = k + 1 < 3 ? nc_scale(nc_d(f, d.LC(k + 1)), Rat(2)) : nc_zero(true);
      ncIdent(col, f, "eq2-codim" + std::to_string(k), lhs2, rhs2);
      NCExpr lhs3 = nc_lie(f, d.Q, w[k]);
      NCExpr rhs3 = k + 1 < 3 ? nc_d(f, w[k + 1]) : nc_zero(true);
      ncIdent(col, f, "cons1-codim" + std::to_string(k), lhs3, rhs3);
      NCExpr lhs4 = nc_lie(f, d.Q, d.LC(k));
      NCExpr rhs4 = k + 1 < 3 ? nc_d(f, nc_sub(nc_scale(d.LC(k + 1), Rat(2)),
                                               nc_contract(f, d.Q, d.thetaC(k + 1))))
                              : nc_zero(true);
      ncIdent(col, f, "cons2-codim" + std::to_string(k), lhs4, rhs4);
    }
  }
}

} // namespace

CheckOutcome check_lax_axioms(const Theory& t) {
  Collector col("lax-axioms/" + t.name, t.coord ? t.coord->ctx : nullptr);
  if (t.coord)
    coordLaxAxioms(col, *t.coord);
  else
    ncLaxAxioms(col, *t.nc);
  return col.finish();
}

CheckOutcome compute_codim_L(const Theory& t, int k) {
  Collector col("codim-L" + std::to_string(k) + "/" + t.name, t.coord ? t.coord->ctx : nullptr);
  if (k < 1) {
    col.skip("codimension must be >= 1");
    return col.finish();
  }
  if (t.coord) {
    const CoordTheory& th = *t.coord;
    const Context& c = *th.ctx;
    EvolutionaryVF E = graded_euler_vf(c);
    Expr inner = contract(c, th.Q, vertical_delta(c, th.thetaC(size_t(k))));
    inner = sub(inner, horizontal_d(c, th.thetaC(size_t(k) + 1)));
    Expr Lk = scale(contract(c, E, inner), Rat(1, k));
    col.ident("matches-declared", Lk, th.LC(size_t(k)));
  } else {
    for (int combo = 0; combo < 4; ++combo) {
      NCFlags f = NCFlags::fromCombo(combo);
      const NCTheoryData& d = t.nc->data(f);
      NCExpr inner = nc_contract(f, d.Q, nc_delta(f, d.thetaC(size_t(k))));
      inner = nc_sub(inner, nc_d(f, d.thetaC(size_t(k) + 1)));
      NCExpr Lk = nc_scale(nc_contract_euler(f, inner), Rat(1, k));
      ncIdent(col, f, "matches-declared", Lk, d.LC(size_t(k)));
    }
  }
  return col.finish();
}

CheckOutcome check_descent_tuple(const ContextPtr& ctx, const std::vector<Expr>& O,
                                 const EvolutionaryVF& Q, const std::string& id) {
  Collector col("descent/" + id, ctx);
  const Context& c = *ctx;
  for (size_t k = 0; k < O.size(); ++k) {
    Expr rhs = k + 1 < O.size() ? horizontal_d(c, O[k + 1]) : Expr::zero();
    col.ident("level" + std::to_string(k), lie_derivative(c, Q, O[k]), rhs);
  }
  return col.finish();
}

CheckOutcome check_descent(const Theory& t) {
  Collector col("descent/" + t.name, t.coord ? t.coord->ctx : nullptr);
  if (t.coord) {
    const CoordTheory& th = *t.coord;
    const Context& c = *th.ctx;
    std::vector<Expr> O;
    for (size_t k = 0; k < th.theta.size(); ++k) O.push_back(vertical_delta(c, th.thetaC(k)));
    for (size_t k = 0; k < O.size(); ++k) {
      Expr rhs = k + 1 < O.size() ? horizontal_d(c, O[k + 1]) : Expr::zero();
      col.ident("level" + std::to_string(k), lie_derivative(c, th.Q, O[k]), rhs);
    }
  } else {
    for (int combo = 0; combo < 4; ++combo) {
      NCFlags f = NCFlags::fromCombo(combo);
      const NCTheoryData& d = t.nc->data(f);
      for (size_t k = 0; k < 3; ++k) {
        NCExpr Ok = nc_delta(f, d.thetaC(k));
        NCExpr rhs = k + 1 < 3 ? nc_d(f, nc_delta(f, d.thetaC(k + 1))) : nc_zero(true);
        ncIdent(col, f, "level" + std::to_string(k), nc_lie(f, d.Q, Ok), rhs);
      }
    }
  }
  return col.finish();
}

namespace {

// Ghost-free, antifield-free part of a density: keep monomials whose atoms
// all carry ghost number 0.
Expr classicalPart(const Context& c, const Expr& e) {
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
}

} // namespace

CheckOutcome check_Q_decomposition(const Theory& t) {
  Collector col("q-decomposition/" + t.name, t.coord ? t.coord->ctx : nullptr);
  if (!t.coord) {
    col.skip("Chevalley-Eilenberg split is checked for coordinate theories only");
    return col.finish();
  }
  const CoordTheory& th = *t.coord;
  const Context& c = *th.ctx;
  Expr Lcl = classicalPart(c, th.LC(0));
  // Locate the ghost field if any.
  std::optional<FieldId> ghost;
  for (FieldId f = 0; f < c.fields().size(); ++f)
    if (c.field(f).ghost) ghost = f;
  for (FieldId f = 0; f < c.fields().size(); ++f) {
    const FieldDecl& fd = c.field(f);
    if (fd.gh != -1 && fd.gh != -2) continue;
    // pair antifield "x+" with field "x"
    std::string base = fd.name;
    if (base.size() < 2 || base.substr(base.size() - 1) != "+") continue;
    base = base.substr(0, base.size() - 1);
    for (int comp = 0; comp < fd.ncomp; ++comp) {
      AtomId gen = c.jet(f, 0, comp);
      Expr gammaPart;
      if (th.gamma) gammaPart = vfAction(c, *th.gamma, gen);
      Expr deltaKT = sub(vfAction(c, th.Q, gen), gammaPart);
      Expr expected;
      if (fd.gh == -1) {
        FieldId src = c.fieldByName(base);
        expected = euler_operator(c, Lcl, src, comp);
      } else {
        // Koszul-Tate on the antighost of the reparametrization ghost:
        // sum over non-ghost fields of -f+ . fdot + t(f) d/dt(f+ . f).
        if (!ghost) {
          col.skip("no ghost field");
          continue;
        }
        for (FieldId f2 = 0; f2 < c.fields().size(); ++f2) {
          const FieldDecl& fd2 = c.field(f2);
          if (fd2.gh != 0) continue;
          auto anti = c.tryFieldByName(fd2.name + "+");
          if (!anti) continue;
          auto tn = fd2.tensor;
          for (int c2 = 0; c2 < fd2.ncomp; ++c2) {
            Expr fp = Expr::atom(c, c.jet(*anti, 0, c2));
            Expr fdot = Expr::atom(c, c.jet(f2, 1, c2));
            Expr ff = Expr::atom(c, c.jet(f2, 0, c2));
            expected = sub(expected, gmul(c, fp, fdot));
            if (tn && *tn != 0)
              expected = add(expected,
                             scale(total_derivative(c, gmul(c, fp, ff)), *tn));
          }
        }
      }
      col.ident("deltaKT/" + c.atom(gen).name, deltaKT, expected);
    }
  }
  return col.finish();
}

namespace {

std::vector<Expr> builtin_f_transform_data(const CoordTheory& th) {
  const Context& c = *th.ctx;
  if (th.name == "gr1d") {
    auto at = [&](const char* s) { return Expr::atom(c, c.atomByName(s)); };
    auto pw = [&](const char* s, int e) { return Expr::atomPow(c, c.atomByName(s), e); };
    Expr inner = sub(at("g"), scale(gmul(c, gmul(c, at("g"), at("sqrtg")),
                                         gmul(c, pw("T", 1), pw("Omega", -1))),
                                    2));
    Expr f0 = scale(gmul(c, at("g+"), inner), 2);
    return {gmul(c, f0, Expr::atom(c, c.dt())), gmul(c, at("xi"), f0)};
  }
  return {Expr::zero(), Expr::zero()};
}

} // namespace

CheckOutcome check_f_transform(const Theory& t, const std::vector<Expr>& fs) {
  Collector col("f-transform/" + t.name, t.coord ? t.coord->ctx : nullptr);
  if (!t.coord) {
    col.skip("f-transformations are exercised on coordinate theories");
    return col.finish();
  }
  CoordTheory th = *t.coord;
  const Context& c = *th.ctx;
  std::vector<Expr> f = fs.empty() ? builtin_f_transform_data(th) : fs;
  f.resize(2, Expr::zero());
  for (size_t k = 0; k < f.size(); ++k) {
    if (f[k].isZero()) continue;
    auto lx = lax_degree_of(c, f[k]);
    if (!lx || *lx != -1) {
      col.failWith("deg-f" + std::to_string(k), "f component must have lax degree -1");
      return col.finish();
    }
  }
  // theta^k -> theta^k + delta f^k ; L^k -> L^k + d f^{k+1} (componentwise).
  CoordTheory mutated = th;
  for (size_t k = 0; k < mutated.theta.size(); ++k) {
    mutated.theta[k] = add(mutated.theta[k], vertical_delta(c, f[k]));
    Expr df = k + 1 < f.size() ? horizontal_d(c, f[k + 1]) : Expr::zero();
    mutated.L[k] = add(mutated.L[k], df);
  }
  coordLaxAxioms(col, mutated);
  return col.finish();
}

// ---------------------------------------------------------------------------
// Package checks
// ---------------------------------------------------------------------------

namespace {

void coordChainMap(Collector& col, const CoordPackage& p, Direction dir) {
  const CoordTheory& src = dir == Direction::Phi ? *p.t1 : *p.t2;
  const CoordTheory& tgt = dir == Direction::Phi ? *p.t2 : *p.t1;
  const Morphism& m = dir == Direction::Phi ? p.phiStar : p.psiStar;
  const Context& cs = *src.ctx;
  const Context& ct = *tgt.ctx;
  for (AtomId gen : coordGenerators(src)) {
    Expr lhs = apply_morphism(cs, m, vfAction(cs, src.Q, gen));
    Expr img = m.images.count(gen) ? m.images.at(gen) : Expr::zero();
    auto it = m.images.find(gen);
    if (it == m.images.end()) {
      col.failWith("missing-image/" + cs.atom(gen).name, "generator has no image");
      continue;
    }
    Expr rhs = lie_derivative(ct, tgt.Q, it->second);
    Expr r = sub(lhs, rhs);
    col.out.identities.push_back({col.out.report.id + "/" + cs.atom(gen).name, tgt.ctx, lhs, rhs});
    if (!is_zero(ct, r)) col.failWith(cs.atom(gen).name, to_string(ct, r));
  }
}

void ncChainMap(Collector& col, const NCPackage& p, Direction dir) {
  for (int combo = 0; combo < 4; ++combo) {
    NCFlags f = NCFlags::fromCombo(combo);
    const NCPackageData& d = p.byFlags[size_t(combo)];
    const NCTheoryData& src = dir == Direction::Phi ? p.t1->data(f) : p.t2->data(f);
    const NCTheoryData& tgt = dir == Direction::Phi ? p.t2->data(f) : p.t1->data(f);
    const NCMorphism& m = dir == Direction::Phi ? d.phiStar : d.psiStar;
    for (NCBase b : src.bases) {
      auto qa = src.Q.action.find(b);
      NCExpr lhs = nc_apply_morphism(f, m, qa == src.Q.action.end() ? nc_zero() : qa->second);
      NCExpr rhs = nc_lie(f, tgt.Q, m.images.at(b));
      ncIdent(col, f, nc_base_name(b), lhs, rhs);
    }
  }
}

void coordTransform(Collector& col, const CoordPackage& p, Direction dir) {
  // phi direction: phi* theta1 = theta2 + (L_Q2 - d) beta2 + delta f2.
  // psi direction: psi* theta2 = theta1 + (L_Q1 - d) beta1 + delta f1.
  const CoordTheory& from = dir == Direction::Phi ? *p.t1 : *p.t2;
  const CoordTheory& to = dir == Direction::Phi ? *p.t2 : *p.t1;
  const Morphism& m = dir == Direction::Phi ? p.phiStar : p.psiStar;
  const Context& cf = *from.ctx;
  const Context& ct = *to.ctx;
  auto beta = [&](size_t k) { return dir == Direction::Phi ? p.beta2C(k) : p.beta1C(k); };
  auto fC = [&](size_t k) { return dir == Direction::Phi ? p.f2C(k) : p.f1C(k); };
  auto zeta = [&](size_t k) { return contract(ct, to.Q, beta(k)); };
  // Degree constraints on the data: #(beta) = -2, #(f) = -1, #(zeta) = -1.
  for (size_t k = 0; k < 2; ++k) {
    if (!beta(k).isZero()) {
      auto lx = lax_degree_of(ct, beta(k));
      if (!lx || *lx != -2) col.failWith("deg-beta" + std::to_string(k), "lax degree != -2");
    }
    if (!fC(k).isZero()) {
      auto lx = lax_degree_of(ct, fC(k));
      if (!lx || *lx != -1) col.failWith("deg-f" + std::to_string(k), "lax degree != -1");
    }
    if (!zeta(k).isZero()) {
      auto lx = lax_degree_of(ct, zeta(k));
      if (!lx || *lx != -1) col.failWith("deg-zeta" + std::to_string(k), "lax degree != -1");
    }
  }
  for (size_t k = 0; k < 2; ++k) {
    Expr dTheta = sub(apply_morphism(cf, m, from.thetaC(k)), to.thetaC(k));
    Expr rhs = lie_derivative(ct, to.Q, beta(k));
    if (k + 1 < 2) rhs = sub(rhs, horizontal_d(ct, beta(k + 1)));
    rhs = add(rhs, vertical_delta(ct, fC(k)));
    col.out.identities.push_back(
        {col.out.report.id + "/dtheta" + std::to_string(k), to.ctx, dTheta, rhs});
    Expr r = sub(dTheta, rhs);
    if (!is_zero(ct, r)) col.failWith("dtheta" + std::to_string(k), to_string(ct, r));
  }
  for (size_t k = 0; k < 2; ++k) {
    Expr dL = sub(apply_morphism(cf, m, from.LC(k)), to.LC(k));
    Expr rhs = lie_derivative(ct, to.Q, zeta(k));
    if (k + 1 < 2) {
      rhs = sub(rhs, horizontal_d(ct, zeta(k + 1)));
      rhs = add(rhs, horizontal_d(ct, fC(k + 1)));
    }
    col.out.identities.push_back(
        {col.out.report.id + "/dL" + std::to_string(k), to.ctx, dL, rhs});
    Expr r = sub(dL, rhs);
    if (!is_zero(ct, r)) col.failWith("dL" + std::to_string(k), to_string(ct, r));
  }
}

// Lax degree of an inhomogeneous trace expression: gh - codim per word.
std::optional<int> ncLaxDegree(const NCExpr& e) {
  std::optional<int> out;
  for (const auto& [w, c] : e.terms) {
    AffDeg fd;
    int gh = 0;
    for (const auto& l : w) {
      fd = fd + l.formDeg();
      gh += l.ghost();
    }
    if (fd.b != 1) return std::nullopt;
    int lax = gh + fd.a; // codim = -fd.a
    if (!out)
      out = lax;
    else if (*out != lax)
      return std::nullopt;
  }
  return out ? out : std::optional<int>(0);
}

void ncTransform(Collector& col, const NCPackage& p, Direction dir) {
  for (int combo = 0; combo < 4; ++combo) {
    NCFlags f = NCFlags::fromCombo(combo);
    const NCPackageData& d = p.byFlags[size_t(combo)];
    const NCTheoryData& from = dir == Direction::Phi ? p.t1->data(f) : p.t2->data(f);
    const NCTheoryData& to = dir == Direction::Phi ? p.t2->data(f) : p.t1->data(f);
    const NCMorphism& m = dir == Direction::Phi ? d.phiStar : d.psiStar;
    auto beta = [&](size_t k) -> NCExpr {
      if (dir == Direction::Phi) return nc_zero(true);
      return k < d.beta1.size() ? d.beta1[k] : nc_zero(true);
    };
    auto fc = [&](size_t k) -> NCExpr {
      if (dir == Direction::Phi) return nc_zero(true);
      return k < d.f1.size() ? d.f1[k] : nc_zero(true);
    };
    for (size_t k = 0; k < 3; ++k) {
      if (!beta(k).isZero()) {
        auto lx = ncLaxDegree(beta(k));
        if (!lx || *lx != -2)
          col.failWith("deg-beta" + std::to_string(k) + "[" + flagStr(f) + "]",
                       "lax degree != -2");
      }
      if (!fc(k).isZero()) {
        auto lx = ncLaxDegree(fc(k));
        if (!lx || *lx != -1)
          col.failWith("deg-f" + std::to_string(k) + "[" + flagStr(f) + "]", "lax degree != -1");
      }
      NCExpr zk = nc_contract(f, to.Q, beta(k));
      if (!zk.isZero()) {
        auto lx = ncLaxDegree(zk);
        if (!lx || *lx != -1)
          col.failWith("deg-zeta" + std::to_string(k) + "[" + flagStr(f) + "]",
                       "lax degree != -1");
      }
    }
    for (size_t k = 0; k < 3; ++k) {
      NCExpr dTheta = nc_sub(nc_apply_morphism(f, m, from.thetaC(k)), to.thetaC(k));
      NCExpr rhs = nc_lie(f, to.Q, beta(k));
      if (k + 1 < 3) rhs = nc_sub(rhs, nc_d(f, beta(k + 1)));
      rhs = nc_add(rhs, nc_delta(f, fc(k)));
      ncIdent(col, f, "dtheta" + std::to_string(k), dTheta, rhs);
    }
    for (size_t k = 0; k < 3; ++k) {
      NCExpr zk = nc_contract(f, to.Q, beta(k));
      NCExpr zk1 = k + 1 < 3 ? nc_contract(f, to.Q, beta(k + 1)) : nc_zero(true);
      NCExpr dL = nc_sub(nc_apply_morphism(f, m, from.LC(k)), to.LC(k));
      NCExpr rhs = nc_lie(f, to.Q, zk);
      if (k + 1 < 3) {
        rhs = nc_sub(rhs, nc_d(f, zk1));
        rhs = nc_add(rhs, nc_d(f, fc(k + 1)));
      }
      ncIdent(col, f, "dL" + std::to_string(k), dL, rhs);
    }
  }
}

} // namespace

CheckOutcome check_chain_map(const EquivalencePackage& p, Direction dir) {
  std::string d = dir == Direction::Phi ? "phi" : "psi";
  Collector col("chain-map-" + d + "/" + p.name,
                p.coord ? (dir == Direction::Phi ? p.coord->t2->ctx : p.coord->t1->ctx) : nullptr);
  if (p.coord)
    coordChainMap(col, *p.coord, dir);
  else
    ncChainMap(col, *p.nc, dir);
  return col.finish();
}

CheckOutcome check_transform(const EquivalencePackage& p, Direction dir) {
  std::string d = dir == Direction::Phi ? "phi" : "psi";
  Collector col("transform-" + d + "/" + p.name,
                p.coord ? (dir == Direction::Phi ? p.coord->t2->ctx : p.coord->t1->ctx) : nullptr);
  if (p.coord)
    coordTransform(col, *p.coord, dir);
  else
    ncTransform(col, *p.nc, dir);
  return col.finish();
}

CheckOutcome check_classical_reduction(const EquivalencePackage& p) {
  Collector col("classical-reduction/" + p.name, p.coord ? p.coord->t1->ctx : nullptr);
  if (p.coord) {
    if (!p.coord->classical) {
      col.skip("no classical reduction data shipped for this pair");
      return col.finish();
    }
    const ClassicalReduction& cl = *p.coord->classical;
    const Context& c1 = *p.coord->t1->ctx;
    const Context& c2 = *p.coord->t2->ctx;
    Expr lhs = apply_morphism(c1, cl.solution, classicalPart(c1, cl.classicalL1));
    Expr rhs = apply_morphism(c2, cl.classicalPullback, classicalPart(c2, cl.classicalL2));
    col.ident("on-shell", lhs, rhs);
  } else {
    for (int combo = 0; combo < 4; ++combo) {
      NCFlags f = NCFlags::fromCombo(combo);
      const NCPackageData& d = p.nc->byFlags[size_t(combo)];
      NCExpr lhs = nc_apply_morphism(f, d.classicalSolution, d.classicalL1);
      ncIdent(col, f, "on-shell", lhs, d.classicalL2);
    }
  }
  return col.finish();
}

CheckOutcome check_commutator_D(const EquivalencePackage& p) {
  Collector col("commutator-D/" + p.name, p.coord ? p.coord->t1->ctx : nullptr);
  if (p.coord) {
    const CoordPackage& pk = *p.coord;
    const Context& c = *pk.t1->ctx;
    EvolutionaryVF D = vf_commutator(c, pk.t1->Q, pk.R);
    for (AtomId gen : coordGenerators(*pk.t1)) {
      Expr lhs = lie_derivative(c, D, vfAction(c, pk.t1->Q, gen));
      Expr rhs = lie_derivative(c, pk.t1->Q, vfAction(c, D, gen));
      col.ident("DQ/" + c.atom(gen).name, lhs, rhs);
    }
    if (pk.t1->gamma) {
      const EvolutionaryVF& ga = *pk.t1->gamma;
      for (AtomId gen : coordGenerators(*pk.t1)) {
        // [R, gamma] = R gamma + gamma R (both odd)
        Expr lhs = add(lie_derivative(c, pk.R, vfAction(c, ga, gen)),
                       lie_derivative(c, ga, vfAction(c, pk.R, gen)));
        col.ident("Rgamma/" + c.atom(gen).name, lhs, Expr::zero());
      }
      // D = [R, delta_KT] with delta_KT = Q - gamma.
      EvolutionaryVF dkt;
      dkt.ghShift = 1;
      for (AtomId gen : coordGenerators(*pk.t1)) {
        Expr v = sub(vfAction(c, pk.t1->Q, gen), vfAction(c, *pk.t1->gamma, gen));
        if (!v.isZero()) dkt.action[gen] = v;
      }
      for (AtomId gen : coordGenerators(*pk.t1)) {
        Expr lhs = add(lie_derivative(c, pk.R, vfAction(c, dkt, gen)),
                       lie_derivative(c, dkt, vfAction(c, pk.R, gen)));
        col.ident("RdeltaKT/" + c.atom(gen).name, lhs, vfAction(c, D, gen));
      }
    }
  } else {
    for (int combo = 0; combo < 4; ++combo) {
      NCFlags f = NCFlags::fromCombo(combo);
      const NCPackageData& d = p.nc->byFlags[size_t(combo)];
      const NCTheoryData& t1 = p.nc->t1->data(f);
      NCVf D = nc_commutator(f, t1.Q, d.R);
      for (NCBase b : t1.bases) {
        auto qa = t1.Q.action.find(b);
        NCExpr qb = qa == t1.Q.action.end() ? nc_zero() : qa->second;
        auto da = D.action.find(b);
        NCExpr db = da == D.action.end() ? nc_zero() : da->second;
        ncIdent(col, f, std::string("DQ/") + nc_base_name(b), nc_lie(f, D, qb),
                nc_lie(f, t1.Q, db));
      }
    }
  }
  return col.finish();
}

CheckOutcome check_flow(const EquivalencePackage& p) {
  Collector col("flow/" + p.name, p.coord ? p.coord->t1->ctx : nullptr);
  if (p.coord) {
    const CoordPackage& pk = *p.coord;
    const Context& c = *pk.t1->ctx;
    const FlowData& fl = pk.flow;
    EvolutionaryVF D = vf_commutator(c, pk.t1->Q, pk.R);
    for (AtomId gen : coordGenerators(*pk.t1)) {
      std::string nm = c.atom(gen).name;
      Expr chis = apply_morphism(c, fl.chiS, Expr::atom(c, gen));
      // (a) s = 0 is the identity
      col.ident("a/" + nm, s_limit(fl.limits, chis, SEndpoint::Zero), Expr::atom(c, gen));
      // (b) d/ds chi_s = chi_s(D phi)
      col.ident("b/" + nm, s_derivative(c, chis),
                apply_morphism(c, fl.chiS, vfAction(c, D, gen)));
      // (c) s -> infinity limit matches the declared chi*
      auto exp = fl.chiStarExpected.find(gen);
      if (exp != fl.chiStarExpected.end())
        col.ident("c/" + nm, s_limit(fl.limits, chis, SEndpoint::Infinity), exp->second);
      // (d) chi_s commutes with Q on generators
      col.ident("d/" + nm, apply_morphism(c, fl.chiS, vfAction(c, pk.t1->Q, gen)),
                lie_derivative(c, pk.t1->Q, chis));
    }
  } else {
    for (int combo = 0; combo < 4; ++combo) {
      NCFlags f = NCFlags::fromCombo(combo);
      const NCPackageData& d = p.nc->byFlags[size_t(combo)];
      const NCTheoryData& t1 = p.nc->t1->data(f);
      NCVf D = nc_commutator(f, t1.Q, d.R);
      for (NCBase b : t1.bases) {
        std::string nm = nc_base_name(b);
        NCExpr chis = d.chiS.images.at(b);
        ncIdent(col, f, "a/" + nm, nc_s_limit(f, chis, 1),
                nc_letter(f, NCLetter{b, {}}));
        auto da = D.action.find(b);
        NCExpr db = da == D.action.end() ? nc_zero() : da->second;
        ncIdent(col, f, "b/" + nm, nc_s_derivative(f, chis), nc_apply_morphism(f, d.chiS, db));
        auto exp = d.chiStarExpected.find(b);
        if (exp != d.chiStarExpected.end())
          ncIdent(col, f, "c/" + nm, nc_s_limit(f, chis, 0), exp->second);
        auto qa = t1.Q.action.find(b);
        NCExpr qb = qa == t1.Q.action.end() ? nc_zero() : qa->second;
        ncIdent(col, f, "d/" + nm, nc_apply_morphism(f, d.chiS, qb), nc_lie(f, t1.Q, chis));
      }
    }
  }
  return col.finish();
}

CheckOutcome check_hchi(const EquivalencePackage& p) {
  Collector col("h-chi/" + p.name, p.coord ? p.coord->t1->ctx : nullptr);
  if (p.coord) {
    const CoordPackage& pk = *p.coord;
    const Context& c = *pk.t1->ctx;
    const FlowData& fl = pk.flow;
    for (AtomId gen : coordGenerators(*pk.t1)) {
      std::string nm = c.atom(gen).name;
      Expr Rphi = vfAction(c, pk.R, gen);
      auto declared = fl.hchi.find(gen);
      if (Rphi.isZero()) {
        if (declared != fl.hchi.end())
          col.ident("zero/" + nm, declared->second, Expr::zero());
        continue;
      }
      auto anti = fl.antideriv.find(gen);
      if (anti == fl.antideriv.end() || declared == fl.hchi.end()) {
        col.failWith(nm, "missing antiderivative or declared value");
        continue;
      }
      // dA/ds = chi_s(R phi)
      col.ident("ode/" + nm, s_derivative(c, anti->second),
                apply_morphism(c, fl.chiS, Rphi));
      // A(inf) - A(0) = declared value
      Expr diff = sub(s_limit(fl.limits, anti->second, SEndpoint::Infinity),
                      s_limit(fl.limits, anti->second, SEndpoint::Zero));
      col.ident("value/" + nm, diff, declared->second);
    }
  } else {
    for (int combo = 0; combo < 4; ++combo) {
      NCFlags f = NCFlags::fromCombo(combo);
      const NCPackageData& d = p.nc->byFlags[size_t(combo)];
      const NCTheoryData& t1 = p.nc->t1->data(f);
      for (NCBase b : t1.bases) {
        std::string nm = nc_base_name(b);
        auto ra = d.R.action.find(b);
        NCExpr rphi = ra == d.R.action.end() ? nc_zero() : ra->second;
        auto declared = d.hchi.find(b);
        if (rphi.isZero()) {
          if (declared != d.hchi.end()) ncIdent(col, f, "zero/" + nm, declared->second, nc_zero());
          continue;
        }
        auto anti = d.antideriv.find(b);
        if (anti == d.antideriv.end() || declared == d.hchi.end()) {
          col.failWith(nm, "missing antiderivative or declared value");
          continue;
        }
        ncIdent(col, f, "ode/" + nm, nc_s_derivative(f, anti->second),
                nc_apply_morphism(f, d.chiS, rphi));
        NCExpr diff = nc_sub(nc_s_limit(f, anti->second, 0), nc_s_limit(f, anti->second, 1));
        ncIdent(col, f, "value/" + nm, diff, declared->second);
      }
    }
  }
  return col.finish();
}

CheckOutcome check_composition(const EquivalencePackage& p) {
  Collector col("composition/" + p.name, p.coord ? p.coord->t1->ctx : nullptr);
  if (p.coord) {
    const CoordPackage& pk = *p.coord;
    const Context& c1 = *pk.t1->ctx;
    const Context& c2 = *pk.t2->ctx;
    // lambda* = phi* . psi* is the identity on theory-2 generators.
    for (AtomId gen : coordGenerators(*pk.t2)) {
      Expr lam = apply_morphism(c1, pk.phiStar, pk.psiStar.images.at(gen));
      Expr r = sub(lam, Expr::atom(c2, gen));
      col.out.identities.push_back(
          {col.out.report.id + "/lambda/" + c2.atom(gen).name, pk.t2->ctx, lam, Expr::atom(c2, gen)});
      if (!is_zero(c2, r)) col.failWith("lambda/" + c2.atom(gen).name, to_string(c2, r));
    }
    // psi* . phi* equals the declared chi* on theory-1 generators.
    for (AtomId gen : coordGenerators(*pk.t1)) {
      Expr chi = apply_morphism(c2, pk.psiStar, pk.phiStar.images.at(gen));
      auto exp = pk.flow.chiStarExpected.find(gen);
      if (exp == pk.flow.chiStarExpected.end()) continue;
      Expr r = sub(chi, exp->second);
      col.out.identities.push_back(
          {col.out.report.id + "/chi/" + c1.atom(gen).name, pk.t1->ctx, chi, exp->second});
      if (!is_zero(c1, r)) col.failWith("chi/" + c1.atom(gen).name, to_string(c1, r));
    }
  } else {
    for (int combo = 0; combo < 4; ++combo) {
      NCFlags f = NCFlags::fromCombo(combo);
      const NCPackageData& d = p.nc->byFlags[size_t(combo)];
      const NCTheoryData& t2 = p.nc->t2->data(f);
      const NCTheoryData& t1 = p.nc->t1->data(f);
      for (NCBase b : t2.bases) {
        NCExpr lam = nc_apply_morphism(f, d.phiStar, d.psiStar.images.at(b));
        ncIdent(col, f, std::string("lambda/") + nc_base_name(b), lam,
                nc_letter(f, NCLetter{b, {}}));
      }
      for (NCBase b : t1.bases) {
        NCExpr chi = nc_apply_morphism(f, d.psiStar, d.phiStar.images.at(b));
        auto exp = d.chiStarExpected.find(b);
        if (exp == d.chiStarExpected.end()) continue;
        ncIdent(col, f, std::string("chi/") + nc_base_name(b), chi, exp->second);
      }
    }
  }
  return col.finish();
}

// ---------------------------------------------------------------------------
// Suites and mutations
// ---------------------------------------------------------------------------

std::vector<CheckOutcome> run_lax_suite(const Theory& t) {
  std::vector<CheckOutcome> out;
  out.push_back(check_lax_axioms(t));
  out.push_back(compute_codim_L(t, 1));
  out.push_back(check_descent(t));
  out.push_back(check_Q_decomposition(t));
  out.push_back(check_f_transform(t));
  return out;
}

std::vector<CheckOutcome> run_equivalence_suite(const EquivalencePackage& p) {
  std::vector<CheckOutcome> out;
  out.push_back(check_chain_map(p, Direction::Phi));
  out.push_back(check_chain_map(p, Direction::Psi));
  out.push_back(check_transform(p, Direction::Phi));
  out.push_back(check_transform(p, Direction::Psi));
  out.push_back(check_classical_reduction(p));
  out.push_back(check_commutator_D(p));
  out.push_back(check_flow(p));
  out.push_back(check_hchi(p));
  out.push_back(check_composition(p));
  return out;
}

namespace {

// Negates one named subexpression inside a theory datum.
struct MutSpec {
  std::string id;
  std::string theory;
  std::function<void(Theory&)> apply;
};

void negateQ(CoordTheory& t, const char* field, const Expr& term) {
  const Context& c = *t.ctx;
  AtomId gen = c.jet(c.fieldByName(field), 0, 0);
  t.Q.action[gen] = sub(t.Q.action[gen], scale(term, 2));
}

std::vector<MutSpec>& mutSpecs() {
  static std::vector<MutSpec> specs = [] {
    std::vector<MutSpec> v;
    auto coordMut = [&](const std::string& id, const std::string& th,
                        std::function<void(CoordTheory&)> fn) {
      v.push_back({id, th, [fn](Theory& t) { fn(*t.coord); }});
    };
    // gr1d
    coordMut("gr1d/Q/g+/flip-ELg", "gr1d", [](CoordTheory& t) {
      negateQ(t, "g+", Expr::atomPow(*t.ctx, t.ctx->atomByName("EL_g"), 1));
    });
    coordMut("gr1d/Q/g/flip-2xidotg", "gr1d", [](CoordTheory& t) {
      const Context& c = *t.ctx;
      Expr term = scale(gmul(c, Expr::atom(c, c.jet(c.fieldByName("xi"), 1, 0)),
                             Expr::atom(c, c.atomByName("g"))),
                        2);
      negateQ(t, "g", term);
    });
    coordMut("gr1d/Q/xi+/flip-qdot-q+", "gr1d", [](CoordTheory& t) {
      const Context& c = *t.ctx;
      Expr term;
      FieldId q = c.fieldByName("q"), qp = c.fieldByName("q+");
      for (int i = 0; i < c.targetDim(); ++i)
        term = add(term, gmul(c, Expr::atom(c, c.jet(qp, 0, i)), Expr::atom(c, c.jet(q, 1, i))));
      negateQ(t, "xi+", neg(term));
    });
    coordMut("gr1d/theta1/flip-matter", "gr1d", [](CoordTheory& t) {
      const Context& c = *t.ctx;
      Expr term;
      FieldId q = c.fieldByName("q");
      Expr mg = gmul(c, gmul(c, Expr::atom(c, c.atomByName("m")), Expr::atom(c, c.atomByName("sqrtg"))),
                     Expr::atomPow(c, c.atomByName("g"), -1));
      for (int i = 0; i < c.targetDim(); ++i)
        term = add(term, gmul(c, gmul(c, mg, Expr::atom(c, c.jet(q, 1, i))),
                              Expr::atom(c, c.variation(q, 0, i))));
      t.theta[1] = sub(t.theta[1], scale(term, 2));
    });
    coordMut("gr1d/L1/flip", "gr1d", [](CoordTheory& t) { t.L[1] = neg(t.L[1]); });
    coordMut("gr1d/L0/flip-sqrtgE", "gr1d", [](CoordTheory& t) {
      const Context& c = *t.ctx;
      Expr term = gmul(c, gmul(c, Expr::atom(c, c.atomByName("sqrtg")),
                               Expr::atom(c, c.atomByName("E"))),
                       Expr::atom(c, c.dt()));
      t.L[0] = sub(t.L[0], scale(term, 2));
    });
    // jacobi
    coordMut("jacobi/Q/xi/flip", "jacobi", [](CoordTheory& t) {
      const Context& c = *t.ctx;
      negateQ(t, "xi", gmul(c, Expr::atom(c, c.atomByName("xi")),
                            Expr::atom(c, c.jet(c.fieldByName("xi"), 1, 0))));
    });
    coordMut("jacobi/theta1/flip-sET", "jacobi", [](CoordTheory& t) {
      const Context& c = *t.ctx;
      Expr sET = gmul(c, gmul(c, Expr::atom(c, c.atomByName("sqrtE")), Expr::atom(c, c.atomByName("sqrtT"))),
                      gmul(c, Expr::atomPow(c, c.atomByName("T"), -1), Expr::atom(c, c.atomByName("m"))));
      Expr term;
      FieldId q = c.fieldByName("q");
      for (int i = 0; i < c.targetDim(); ++i)
        term = add(term, gmul(c, gmul(c, sET, Expr::atom(c, c.jet(q, 1, i))),
                              Expr::atom(c, c.variation(q, 0, i))));
      t.theta[1] = sub(t.theta[1], scale(term, 2));
    });
    coordMut("jacobi/L0/flip-2sqrtET", "jacobi", [](CoordTheory& t) {
      const Context& c = *t.ctx;
      Expr term = scale(gmul(c, gmul(c, Expr::atom(c, c.atomByName("sqrtE")),
                                     Expr::atom(c, c.atomByName("sqrtT"))),
                             Expr::atom(c, c.dt())),
                        2);
      t.L[0] = sub(t.L[0], scale(term, 2));
    });
    coordMut("jacobi/Q/q+/flip", "jacobi", [](CoordTheory& t) {
      const Context& c = *t.ctx;
      AtomId gen = c.jet(c.fieldByName("q+"), 0, 0);
      t.Q.action[gen] = neg(t.Q.action[gen]);
    });
    // cm1 / cm2
    coordMut("cm1/Q/p+/flip-p-over-G", "cm1", [](CoordTheory& t) {
      const Context& c = *t.ctx;
      Expr term = neg(gmul(c, Expr::atom(c, c.atomByName("p")), Expr::atomPow(c, c.atomByName("G"), -1)));
      negateQ(t, "p+", term);
    });
    coordMut("cm1/L0/flip-h-term", "cm1", [](CoordTheory& t) {
      const Context& c = *t.ctx;
      Expr p = Expr::atom(c, c.atomByName("p"));
      Expr term = scale(gmul(c, gmul(c, p, p), gmul(c, Expr::atomPow(c, c.atomByName("G"), -1),
                                                    Expr::atom(c, c.dt()))),
                        rat(-1, 2));
      t.L[0] = sub(t.L[0], scale(term, 2));
    });
    coordMut("cm1/theta1/flip", "cm1", [](CoordTheory& t) { t.theta[1] = neg(t.theta[1]); });
    coordMut("cm2/Q/q+/flip-Gqddot", "cm2", [](CoordTheory& t) {
      const Context& c = *t.ctx;
      Expr term = neg(gmul(c, Expr::atom(c, c.atomByName("G")),
                           Expr::atom(c, c.jet(c.fieldByName("q"), 2, 0))));
      negateQ(t, "q+", term);
    });
    coordMut("cm2/L0/flip", "cm2", [](CoordTheory& t) { t.L[0] = neg(t.L[0]); });
    // cp
    coordMut("cp/Q/v+/flip", "contractible-pair", [](CoordTheory& t) {
      negateQ(t, "v+", Expr::atom(*t.ctx, t.ctx->atomByName("v")));
    });
    coordMut("cp/L0/flip", "contractible-pair", [](CoordTheory& t) { t.L[0] = neg(t.L[0]); });
    // ym
    auto ncMut = [&](const std::string& id, const std::string& th,
                     std::function<void(NCTheoryData&)> fn) {
      v.push_back({id, th, [fn](Theory& t) {
                     for (auto& d : t.nc->byFlags) fn(d);
                   }});
    };
    ncMut("ym1/Q/B+/flip-eps-starB", "ym1", [](NCTheoryData& d) {
      NCFlags f = d.flags;
      NCExpr term = nc_scale(nc_letter(f, NCLetter{NCBase::B, {NCDecor::Star}}),
                             Rat(-f.epsS));
      d.Q.action[NCBase::Bdag] = nc_sub(d.Q.action[NCBase::Bdag], nc_scale(term, Rat(2)));
    });
    ncMut("ym1/L0/flip-BstarB", "ym1", [](NCTheoryData& d) {
      NCFlags f = d.flags;
      NCExpr term = nc_scale(
          nc_tr(f, nc_mul(f, nc_letter(f, NCLetter{NCBase::B, {}}),
                          nc_letter(f, NCLetter{NCBase::B, {NCDecor::Star}}))),
          Rat(-f.epsS) * rat(1, 2));
      d.L[0] = nc_sub(d.L[0], nc_scale(term, Rat(2)));
    });
    ncMut("ym2/theta1/flip", "ym2", [](NCTheoryData& d) { d.theta[1] = nc_neg(d.theta[1]); });
    return v;
  }();
  return specs;
}

} // namespace

std::vector<Mutation> designated_mutations() {
  std::vector<Mutation> out;
  for (auto& s : mutSpecs()) out.push_back({s.id, s.theory});
  return out;
}

Theory apply_mutation(const Mutation& m) {
  for (auto& s : mutSpecs()) {
    if (s.id != m.id) continue;
    Theory t = builtin_theory(s.theory);
    s.apply(t);
    return t;
  }
  fail(Errc::UnknownCheck, "unknown mutation " + m.id);
}

std::vector<CheckOutcome> run_kernel_suite() {
  std::vector<CheckOutcome> out;
  EquivalencePackage pk = builtin_package("jac-gr");
  Theory gr;
  gr.name = "gr1d";
  gr.coord = pk.coord->t1;
  Theory jac;
  jac.name = "jacobi";
  jac.coord = pk.coord->t2;
  Theory cm = builtin_theory("cm1");
  out.push_back(preboundary_kernel_check(cm, nullptr, true));
  out.push_back(preboundary_kernel_check(gr, nullptr, true));
  out.push_back(preboundary_kernel_check(jac, nullptr, false));
  Morphism chi = compose_morphisms(pk.coord->phiStar, pk.coord->psiStar);
  out.push_back(preboundary_kernel_check(gr, &chi, false));
  return out;
}

} // namespace laxcheck
