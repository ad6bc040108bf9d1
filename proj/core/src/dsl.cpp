#include "laxcheck/dsl.hpp"

#include <sstream>

namespace laxcheck {

namespace {

[[noreturn]] void synerr(const SNode& n, const std::string& msg) {
  fail(Errc::SyntaxError, msg + " at " + n.where());
}

const SNode& expectList(const SNode& n, size_t minItems) {
  if (n.kind != SNode::Kind::List || n.items.size() < minItems) synerr(n, "malformed form");
  return n;
}

std::string expectSym(const SNode& n) {
  if (n.kind != SNode::Kind::Sym) synerr(n, "expected a symbol");
  return n.sym;
}

Rat expectNum(const SNode& n) {
  if (n.kind != SNode::Kind::Num) synerr(n, "expected a number");
  return n.num;
}

int expectInt(const SNode& n) {
  Rat r = expectNum(n);
  if (denominator(r) != 1) synerr(n, "expected an integer");
  return int(numerator(r).convert_to<long long>());
}

// keyword arguments: (:key value ...) pairs after `from`.
struct KwArgs {
  std::map<std::string, const SNode*> kv;
  static KwArgs scan(const SNode& n, size_t from) {
    KwArgs out;
    for (size_t i = from; i + 1 < n.items.size() + 1; i += 2) {
      if (i + 1 >= n.items.size() + 0 && n.items[i].kind == SNode::Kind::Sym &&
          !n.items[i].sym.empty() && n.items[i].sym[0] == ':')
        synerr(n.items[i], "keyword without value");
      if (i >= n.items.size()) break;
      const SNode& k = n.items[i];
      if (k.kind != SNode::Kind::Sym || k.sym.empty() || k.sym[0] != ':') synerr(k, "expected :keyword");
      if (i + 1 >= n.items.size()) synerr(k, "keyword without value");
      out.kv[k.sym] = &n.items[i + 1];
    }
    return out;
  }
  const SNode* get(const std::string& k) const {
    auto it = kv.find(k);
    return it == kv.end() ? nullptr : it->second;
  }
  bool getBool(const std::string& k, bool dflt = false) const {
    const SNode* n = get(k);
    if (!n) return dflt;
    if (n->isSym("true")) return true;
    if (n->isSym("false")) return false;
    synerr(*n, "expected true/false");
  }
};

} // namespace

Expr eval_expr(const Context& ctx, const SNode& n) {
  switch (n.kind) {
    case SNode::Kind::Num:
      return Expr::constant(n.num);
    case SNode::Kind::Sym: {
      auto id = ctx.tryAtomByName(n.sym);
      if (!id) fail(Errc::UndeclaredAtom, n.sym + " at " + n.where());
      return Expr::atomPow(ctx, *id, 1);
    }
    case SNode::Kind::List:
      break;
  }
  if (n.items.empty()) synerr(n, "empty form");
  std::string head = expectSym(n.items.front());
  auto arg = [&](size_t i) -> const SNode& {
    if (i >= n.items.size()) synerr(n, head + ": missing argument");
    return n.items[i];
  };
  if (head == "+") {
    Expr r;
    for (size_t i = 1; i < n.items.size(); ++i) r = add(r, eval_expr(ctx, n.items[i]));
    return r;
  }
  if (head == "*") {
    Expr r = Expr::constant(1);
    for (size_t i = 1; i < n.items.size(); ++i) r = gmul(ctx, r, eval_expr(ctx, n.items[i]));
    return r;
  }
  if (head == "-") {
    if (n.items.size() == 2) return neg(eval_expr(ctx, arg(1)));
    Expr r = eval_expr(ctx, arg(1));
    for (size_t i = 2; i < n.items.size(); ++i) r = sub(r, eval_expr(ctx, n.items[i]));
    return r;
  }
  if (head == "/") {
    expectList(n, 3);
    Expr a = eval_expr(ctx, arg(1));
    for (size_t i = 2; i < n.items.size(); ++i) a = gmul(ctx, a, invert(ctx, eval_expr(ctx, n.items[i])));
    return a;
  }
  if (head == "^") {
    expectList(n, 3);
    Rat p = expectNum(arg(2));
    // integer powers of named atoms stay atom powers (a named scalar keeps
    // its inverse as a monomial factor instead of inverting the expansion)
    if (arg(1).kind == SNode::Kind::Sym && denominator(p) == 1) {
      auto id = ctx.tryAtomByName(arg(1).sym);
      if (!id) fail(Errc::UndeclaredAtom, arg(1).sym + " at " + arg(1).where());
      return Expr::atomPow(ctx, *id, int32_t(numerator(p).convert_to<long long>()));
    }
    return ratPow(ctx, eval_expr(ctx, arg(1)), p);
  }
  if (head == "ddt") return total_derivative(ctx, eval_expr(ctx, arg(1)));
  if (head == "delta") return vertical_delta(ctx, eval_expr(ctx, arg(1)));
  if (head == "jet" || head == "var") {
    FieldId f = ctx.fieldByName(expectSym(arg(1)));
    int ord = expectInt(arg(2));
    int comp = n.items.size() > 3 ? expectInt(arg(3)) : 0;
    AtomId id = head == "jet" ? ctx.jet(f, ord, comp) : ctx.variation(f, ord, comp);
    return Expr::atom(ctx, id);
  }
  if (head == "dot-jets") {
    expectList(n, 5);
    FieldId f1 = ctx.fieldByName(expectSym(arg(1)));
    int k1 = expectInt(arg(2));
    FieldId f2 = ctx.fieldByName(expectSym(arg(3)));
    int k2 = expectInt(arg(4));
    if (ctx.field(f1).ncomp != ctx.field(f2).ncomp) synerr(n, "dot-jets: component mismatch");
    Expr r;
    for (int c = 0; c < ctx.field(f1).ncomp; ++c)
      r = add(r, gmul(ctx, Expr::atom(ctx, ctx.jet(f1, k1, c)), Expr::atom(ctx, ctx.jet(f2, k2, c))));
    return r;
  }
  synerr(n, "unknown operator " + head);
}

// ---------------------------------------------------------------------------
// Theory files
// ---------------------------------------------------------------------------

Theory parse_theory(const std::string& text) {
  SNode root = parse_sexpr(text);
  expectList(root, 2);
  if (!root.headIs("theory")) synerr(root, "expected (theory NAME ...)");
  std::string name = expectSym(root.items[1]);

  int targetDim = 1;
  for (size_t i = 2; i < root.items.size(); ++i) {
    const SNode& it = expectList(root.items[i], 1);
    if (it.headIs("target-dim")) targetDim = expectInt(it.items.at(1));
    if (it.headIs("dim-m") && expectInt(it.items.at(1)) != 1)
      synerr(it, "only one-dimensional sources are supported");
  }

  Context::Builder b(targetDim);
  std::vector<const SNode*> qForm, gammaForm, thetaForm, lForm;
  std::vector<std::pair<std::string, const SNode*>> scalarDefNodes;
  for (size_t i = 2; i < root.items.size(); ++i) {
    const SNode& it = expectList(root.items[i], 1);
    std::string head = expectSym(it.items.front());
    if (head == "dim-m" || head == "target-dim") {
      continue;
    } else if (head == "constant") {
      KwArgs kw = KwArgs::scan(it, 2);
      b.constant(expectSym(it.items.at(1)), kw.getBool(":invertible", true));
    } else if (head == "flow-param") {
      b.flowParam(it.items.size() > 1 ? expectSym(it.items.at(1)) : "u");
    } else if (head == "field") {
      KwArgs kw = KwArgs::scan(it, 2);
      std::string nm = expectSym(it.items.at(1));
      int gh = kw.get(":gh") ? expectInt(*kw.get(":gh")) : 0;
      int ncomp = kw.get(":components") ? expectInt(*kw.get(":components")) : 1;
      bool inv = kw.getBool(":invertible");
      bool ghost = kw.getBool(":ghost");
      if (ghost && gh != 1)
        fail(Errc::DegreeError, "ghost field " + nm + " must carry ghost number 1 (got " +
                                    std::to_string(gh) + ")");
      std::optional<Rat> tensor;
      if (kw.get(":tensor")) tensor = expectNum(*kw.get(":tensor"));
      b.field(nm, gh, ncomp, inv, tensor, ghost);
    } else if (head == "func-atom") {
      KwArgs kw = KwArgs::scan(it, 3);
      b.funcAtom(expectSym(it.items.at(1)), expectSym(it.items.at(2)), kw.getBool(":invertible"));
    } else if (head == "scalar") {
      KwArgs kw = KwArgs::scan(it, 2);
      std::string nm = expectSym(it.items.at(1));
      std::optional<Rat> tensor;
      if (kw.get(":tensor")) tensor = expectNum(*kw.get(":tensor"));
      b.defScalar(nm, kw.getBool(":invertible"), tensor);
      const SNode* def = kw.get(":def");
      if (!def) synerr(it, "scalar without :def");
      scalarDefNodes.push_back({nm, def});
    } else if (head == "radical") {
      KwArgs kw = KwArgs::scan(it, 2);
      const SNode* of = kw.get(":of");
      if (!of) synerr(it, "radical without :of");
      b.radical(expectSym(it.items.at(1)), expectSym(*of));
    } else if (head == "Q") {
      qForm.push_back(&it);
    } else if (head == "gamma") {
      gammaForm.push_back(&it);
    } else if (head == "theta") {
      thetaForm.push_back(&it);
    } else if (head == "L") {
      lForm.push_back(&it);
    } else {
      synerr(it, "unknown declaration " + head);
    }
  }
  ContextPtr ctx = b.build();
  for (auto& [nm, def] : scalarDefNodes) define_scalar(*ctx, nm, eval_expr(*ctx, *def));

  auto th = std::make_shared<CoordTheory>();
  th->name = name;
  th->ctx = ctx;

  auto parseTable = [&](const SNode& form) {
    std::map<AtomId, Expr> action;
    for (size_t i = 1; i < form.items.size(); ++i) {
      const SNode& entry = expectList(form.items[i], 2);
      std::string atomName = expectSym(entry.items[0]);
      auto id = ctx->tryAtomByName(atomName);
      if (!id) fail(Errc::UndeclaredField, atomName + " at " + entry.items[0].where());
      const AtomDecl& d = ctx->atom(*id);
      if (d.kind != AtomKind::Jet || d.jetOrder != 0)
        fail(Errc::UndeclaredField, atomName + " is not a field generator");
      action[*id] = eval_expr(*ctx, entry.items[1]);
    }
    return action;
  };
  if (qForm.empty()) synerr(root, "theory without a Q table");
  th->Q = prolong_vf(*ctx, 1, parseTable(*qForm.front()));
  if (!gammaForm.empty()) th->gamma = prolong_vf(*ctx, 1, parseTable(*gammaForm.front()));

  auto parseCodims = [&](const SNode& form) {
    std::vector<Expr> out(2, Expr::zero());
    for (size_t i = 1; i < form.items.size(); ++i) {
      const SNode& entry = expectList(form.items[i], 3);
      if (!entry.headIs("codim")) synerr(entry, "expected (codim K EXPR)");
      int k = expectInt(entry.items[1]);
      if (k < 0 || k > 1) synerr(entry, "codimension out of range");
      out[size_t(k)] = eval_expr(*ctx, entry.items[2]);
    }
    return out;
  };
  if (thetaForm.empty() || lForm.empty()) synerr(root, "theory without theta/L data");
  th->theta = parseCodims(*thetaForm.front());
  th->L = parseCodims(*lForm.front());
  // structural validation
  for (size_t k = 0; k < 2; ++k) {
    if (!th->theta[k].isZero()) {
      auto lx = lax_degree_of(*ctx, th->theta[k]);
      if (!lx || *lx != -1) fail(Errc::DegreeError, "theta codim " + std::to_string(k) + " has lax degree != -1");
    }
    if (!th->L[k].isZero()) {
      auto lx = lax_degree_of(*ctx, th->L[k]);
      if (!lx || *lx != 0) fail(Errc::DegreeError, "L codim " + std::to_string(k) + " has lax degree != 0");
    }
  }
  Theory t;
  t.name = name;
  t.coord = th;
  return t;
}

namespace {

SNode sym(const std::string& s) {
  SNode n;
  n.kind = SNode::Kind::Sym;
  n.sym = s;
  return n;
}
SNode num(const Rat& r) {
  SNode n;
  n.kind = SNode::Kind::Num;
  n.num = r;
  return n;
}
SNode list(std::vector<SNode> items) {
  SNode n;
  n.kind = SNode::Kind::List;
  n.items = std::move(items);
  return n;
}

SNode exprForm(const Context& ctx, const Expr& e) {
  if (e.isZero()) return num(0);
  std::vector<SNode> terms;
  for (const auto& [m, c] : e.terms()) {
    std::vector<SNode> factors;
    factors.push_back(sym("*"));
    if (c != 1 || (m.even.empty() && m.odd.empty())) factors.push_back(num(c));
    for (const auto& [id, ex] : m.even) {
      if (ex == 1)
        factors.push_back(sym(ctx.atom(id).name));
      else
        factors.push_back(list({sym("^"), sym(ctx.atom(id).name), num(ex)}));
    }
    for (AtomId id : m.odd) factors.push_back(sym(ctx.atom(id).name));
    terms.push_back(factors.size() == 2 ? factors[1] : list(std::move(factors)));
  }
  if (terms.size() == 1) return terms.front();
  std::vector<SNode> sum;
  sum.push_back(sym("+"));
  for (auto& t : terms) sum.push_back(std::move(t));
  return list(std::move(sum));
}

} // namespace

std::string print_theory(const Theory& t) {
  if (!t.coord) fail(Errc::Internal, "only coordinate theories serialize to the DSL");
  const CoordTheory& th = *t.coord;
  const Context& c = *th.ctx;
  std::vector<SNode> forms;
  forms.push_back(sym("theory"));
  forms.push_back(sym(t.name));
  forms.push_back(list({sym("dim-m"), num(1)}));
  forms.push_back(list({sym("target-dim"), num(c.targetDim())}));
  for (size_t id = 0; id < c.atomCount(); ++id) {
    const AtomDecl& a = c.atom(AtomId(id));
    if (a.kind == AtomKind::Constant)
      forms.push_back(list({sym("constant"), sym(a.name), sym(":invertible"),
                            sym(a.invertible ? "true" : "false")}));
    if (a.kind == AtomKind::FlowParam) forms.push_back(list({sym("flow-param"), sym(a.name)}));
    if (a.kind == AtomKind::FuncDeriv && a.derivOrder == 0)
      forms.push_back(list({sym("func-atom"), sym(a.name), sym(c.field(a.field).name),
                            sym(":invertible"), sym(a.invertible ? "true" : "false")}));
  }
  for (FieldId f = 0; f < c.fields().size(); ++f) {
    const FieldDecl& fd = c.field(f);
    std::vector<SNode> form{sym("field"), sym(fd.name), sym(":gh"), num(fd.gh)};
    if (fd.ncomp != 1) {
      form.push_back(sym(":components"));
      form.push_back(num(fd.ncomp));
    }
    if (fd.invertible) {
      form.push_back(sym(":invertible"));
      form.push_back(sym("true"));
    }
    if (fd.ghost) {
      form.push_back(sym(":ghost"));
      form.push_back(sym("true"));
    }
    if (fd.tensor) {
      form.push_back(sym(":tensor"));
      form.push_back(num(*fd.tensor));
    }
    forms.push_back(list(std::move(form)));
  }
  for (size_t id = 0; id < c.atomCount(); ++id) {
    const AtomDecl& a = c.atom(AtomId(id));
    if (a.kind == AtomKind::DefScalar) {
      std::vector<SNode> form{sym("scalar"), sym(a.name)};
      if (a.invertible) {
        form.push_back(sym(":invertible"));
        form.push_back(sym("true"));
      }
      if (a.tensor) {
        form.push_back(sym(":tensor"));
        form.push_back(num(*a.tensor));
      }
      form.push_back(sym(":def"));
      form.push_back(exprForm(c, c.expansion(AtomId(id))));
      forms.push_back(list(std::move(form)));
    }
    if (a.kind == AtomKind::Radical)
      forms.push_back(list({sym("radical"), sym(a.name), sym(":of"), sym(c.atom(a.baseAtom).name)}));
  }
  auto tableForm = [&](const char* head, const EvolutionaryVF& X) {
    std::vector<SNode> form{sym(head)};
    for (const auto& [id, e] : X.action)
      form.push_back(list({sym(c.atom(id).name), exprForm(c, e)}));
    return list(std::move(form));
  };
  forms.push_back(tableForm("Q", th.Q));
  if (th.gamma) forms.push_back(tableForm("gamma", *th.gamma));
  auto codimForm = [&](const char* head, const std::vector<Expr>& comps) {
    std::vector<SNode> form{sym(head)};
    for (size_t k = 0; k < comps.size(); ++k)
      form.push_back(list({sym("codim"), num(int(k)), exprForm(c, comps[k])}));
    return list(std::move(form));
  };
  forms.push_back(codimForm("theta", th.theta));
  forms.push_back(codimForm("L", th.L));
  return print_sexpr(list(std::move(forms))) + "\n";
}

bool theories_equal(const Theory& a, const Theory& b) {
  if (!a.coord || !b.coord) return false;
  const CoordTheory &x = *a.coord, &y = *b.coord;
  const Context &cx = *x.ctx, &cy = *y.ctx;
  if (cx.targetDim() != cy.targetDim()) return false;
  if (cx.atomCount() != cy.atomCount()) return false;
  for (size_t id = 0; id < cx.atomCount(); ++id)
    if (cx.atom(AtomId(id)).name != cy.atom(AtomId(id)).name) return false;
  auto exprEq = [&](const Expr& u, const Expr& v) { return is_zero(cx, sub(u, v)); };
  if (x.Q.action.size() != y.Q.action.size()) return false;
  for (const auto& [id, e] : x.Q.action) {
    auto it = y.Q.action.find(id);
    if (it == y.Q.action.end() || !exprEq(e, it->second)) return false;
  }
  if (x.gamma.has_value() != y.gamma.has_value()) return false;
  for (size_t k = 0; k < 2; ++k) {
    if (!exprEq(x.thetaC(k), y.thetaC(k))) return false;
    if (!exprEq(x.LC(k), y.LC(k))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Proof scripts
// ---------------------------------------------------------------------------

NCExpr eval_nc_expr(const NCFlags& f, const SNode& n) {
  auto letterOf = [&](const SNode& node, auto&& self) -> NCLetter {
    if (node.kind == SNode::Kind::Sym) {
      for (int i = 0; i <= int(NCBase::F); ++i)
        if (node.sym == nc_base_name(NCBase(i))) return NCLetter{NCBase(i), {}};
      synerr(node, "unknown letter " + node.sym);
    }
    const SNode& l = expectList(node, 2);
    std::string head = expectSym(l.items[0]);
    NCLetter inner = self(l.items[1], self);
    if (head == "delta")
      inner.decor.push_back(NCDecor::Delta);
    else if (head == "star")
      inner.decor.push_back(NCDecor::Star);
    else if (head == "dA")
      inner.decor.push_back(NCDecor::DA);
    else
      synerr(l, "unknown decoration " + head);
    return inner;
  };
  switch (n.kind) {
    case SNode::Kind::Num:
      return nc_word(f, {}, UPoly::constant(n.num));
    case SNode::Kind::Sym: {
      if (n.sym == "eps") return nc_word(f, {}, UPoly::constant(Rat(f.epsS)));
      if (n.sym == "u") return nc_word(f, {}, UPoly::u());
      return nc_letter(f, letterOf(n, letterOf));
    }
    case SNode::Kind::List:
      break;
  }
  if (n.items.empty()) synerr(n, "empty form");
  std::string head = expectSym(n.items.front());
  auto arg = [&](size_t i) -> const SNode& {
    if (i >= n.items.size()) synerr(n, head + ": missing argument");
    return n.items[i];
  };
  // On single letters these coincide with decoration stacking.
  if (head == "delta") return nc_delta(f, eval_nc_expr(f, arg(1)));
  if (head == "star") return nc_star(f, eval_nc_expr(f, arg(1)));
  if (head == "dA") return nc_dA(f, eval_nc_expr(f, arg(1)));
  if (head == "+") {
    NCExpr r;
    bool first = true;
    for (size_t i = 1; i < n.items.size(); ++i) {
      NCExpr e = eval_nc_expr(f, n.items[i]);
      r = first ? e : nc_add(r, e);
      first = false;
    }
    return r;
  }
  if (head == "-") {
    if (n.items.size() == 2) return nc_neg(eval_nc_expr(f, n.items[1]));
    NCExpr r = eval_nc_expr(f, n.items[1]);
    for (size_t i = 2; i < n.items.size(); ++i) r = nc_sub(r, eval_nc_expr(f, n.items[i]));
    return r;
  }
  if (head == "*") {
    NCExpr r = nc_word(f, {}, UPoly::constant(1));
    for (size_t i = 1; i < n.items.size(); ++i) r = nc_mul(f, r, eval_nc_expr(f, n.items[i]));
    return r;
  }
  if (head == "bracket") {
    expectList(n, 3);
    return nc_bracket(f, eval_nc_expr(f, n.items[1]), eval_nc_expr(f, n.items[2]));
  }
  if (head == "tr") {
    NCExpr r = nc_word(f, {}, UPoly::constant(1));
    for (size_t i = 1; i < n.items.size(); ++i) r = nc_mul(f, r, eval_nc_expr(f, n.items[i]));
    return nc_tr(f, r);
  }
  if (head == "u^") {
    expectList(n, 3);
    return nc_scale(eval_nc_expr(f, n.items[2]), UPoly::u(expectInt(n.items[1])));
  }
  // catalog-backed operators for lemma goals
  static const auto ym1 = nc_builtin_theory(1);
  static const auto ym2 = nc_builtin_theory(2);
  static const auto ymPkg = nc_builtin_package();
  const NCTheoryData& d1 = ym1->data(f);
  const NCTheoryData& d2 = ym2->data(f);
  const NCPackageData& pd = ymPkg->data(f);
  auto baseArg = [&](size_t i) {
    std::string s = expectSym(arg(i));
    for (int b = 0; b <= int(NCBase::F); ++b)
      if (s == nc_base_name(NCBase(b))) return NCBase(b);
    synerr(arg(i), "unknown letter " + s);
  };
  if (head == "q1") return nc_lie(f, d1.Q, eval_nc_expr(f, arg(1)));
  if (head == "q2") return nc_lie(f, d2.Q, eval_nc_expr(f, arg(1)));
  if (head == "iq1") return nc_contract(f, d1.Q, eval_nc_expr(f, arg(1)));
  if (head == "iq2") return nc_contract(f, d2.Q, eval_nc_expr(f, arg(1)));
  if (head == "psi") return nc_apply_morphism(f, pd.psiStar, eval_nc_expr(f, arg(1)));
  if (head == "phi") return nc_apply_morphism(f, pd.phiStar, eval_nc_expr(f, arg(1)));
  if (head == "chis") return nc_apply_morphism(f, pd.chiS, eval_nc_expr(f, arg(1)));
  if (head == "bigd") {
    NCVf D = nc_commutator(f, d1.Q, pd.R);
    return nc_lie(f, D, eval_nc_expr(f, arg(1)));
  }
  if (head == "rr") return nc_lie(f, pd.R, eval_nc_expr(f, arg(1)));
  if (head == "d") return nc_d(f, eval_nc_expr(f, arg(1)));
  if (head == "dds") return nc_s_derivative(f, eval_nc_expr(f, arg(1)));
  if (head == "lim-inf") return nc_s_limit(f, eval_nc_expr(f, arg(1)), 0);
  if (head == "lim-zero") return nc_s_limit(f, eval_nc_expr(f, arg(1)), 1);
  if (head == "theta1") return d1.thetaC(size_t(expectInt(arg(1))));
  if (head == "theta2") return d2.thetaC(size_t(expectInt(arg(1))));
  if (head == "L1") return d1.LC(size_t(expectInt(arg(1))));
  if (head == "L2") return d2.LC(size_t(expectInt(arg(1))));
  if (head == "beta") {
    size_t k = size_t(expectInt(arg(1)));
    return k < pd.beta1.size() ? pd.beta1[k] : nc_zero(true);
  }
  if (head == "f") {
    size_t k = size_t(expectInt(arg(1)));
    return k < pd.f1.size() ? pd.f1[k] : nc_zero(true);
  }
  if (head == "anti") {
    auto it = pd.antideriv.find(baseArg(1));
    if (it == pd.antideriv.end()) synerr(n, "no antiderivative shipped");
    return it->second;
  }
  if (head == "hchi") {
    auto it = pd.hchi.find(baseArg(1));
    if (it == pd.hchi.end()) synerr(n, "no h-chi value shipped");
    return it->second;
  }
  synerr(n, "unknown nc operator " + head);
}

std::vector<ParsedScript> parse_scripts(const std::string& text) {
  std::vector<ParsedScript> out;
  for (const SNode& root : parse_sexprs(text)) {
    expectList(root, 2);
    if (!root.headIs("script")) synerr(root, "expected (script NAME ...)");
    ParsedScript ps;
    ps.id = expectSym(root.items[1]);
    for (size_t i = 2; i < root.items.size(); ++i) {
      const SNode& it = expectList(root.items[i], 1);
      std::string head = expectSym(it.items.front());
      if (head == "goal") {
        expectList(it, 3);
        const SNode& lhs = expectList(it.items[1], 2);
        const SNode& rhs = expectList(it.items[2], 2);
        if (!lhs.headIs("lhs") || !rhs.headIs("rhs")) synerr(it, "goal needs (lhs ...) (rhs ...)");
        ps.lhsForm = lhs.items[1];
        ps.rhsForm = rhs.items[1];
        ps.hasGoal = true;
      } else if (head == "steps") {
        // (steps :d-parity even :epsilon-s +1 (rule term pos) ...)
        NCFlags fl;
        size_t j = 1;
        while (j + 1 < it.items.size() && it.items[j].kind == SNode::Kind::Sym &&
               !it.items[j].sym.empty() && it.items[j].sym[0] == ':') {
          std::string key = it.items[j].sym;
          const SNode& val = it.items[j + 1];
          if (key == ":d-parity") {
            fl.dOdd = expectSym(val) == "odd";
          } else if (key == ":epsilon-s") {
            if (val.kind == SNode::Kind::Num)
              fl.epsS = val.num < 0 ? -1 : 1;
            else
              fl.epsS = expectSym(val) == "-1" ? -1 : 1;
          } else {
            synerr(val, "unknown steps option " + key);
          }
          j += 2;
        }
        NCScript sc;
        sc.id = ps.id;
        for (; j < it.items.size(); ++j) {
          const SNode& st = expectList(it.items[j], 3);
          auto rule = nc_rule_by_name(expectSym(st.items[0]));
          if (!rule) synerr(st.items[0], "unknown rule " + st.items[0].sym);
          sc.steps.push_back({*rule, expectInt(st.items[1]), expectInt(st.items[2])});
        }
        ps.stepsByCombo[fl.comboIndex()] = std::move(sc);
      } else {
        synerr(it, "unknown script section " + head);
      }
    }
    out.push_back(std::move(ps));
  }
  return out;
}

std::string print_script(const ParsedScript& s) {
  std::vector<SNode> form{sym("script"), sym(s.id)};
  if (s.hasGoal)
    form.push_back(list({sym("goal"), list({sym("lhs"), s.lhsForm}), list({sym("rhs"), s.rhsForm})}));
  for (const auto& [combo, sc] : s.stepsByCombo) {
    NCFlags fl = NCFlags::fromCombo(combo);
    std::vector<SNode> steps{sym("steps"), sym(":d-parity"), sym(fl.dOdd ? "odd" : "even"),
                             sym(":epsilon-s"), sym(fl.epsS > 0 ? "+1" : "-1")};
    for (const auto& st : sc.steps)
      steps.push_back(list({sym(nc_rule_name(st.rule)), num(st.term), num(st.pos)}));
    form.push_back(list(std::move(steps)));
  }
  return print_sexpr(list(std::move(form))) + "\n";
}

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

Plan parse_plan(const std::string& text) {
  SNode root = parse_sexpr(text);
  expectList(root, 1);
  if (!root.headIs("plan")) synerr(root, "expected (plan ...)");
  Plan plan;
  static const std::vector<std::string> knownChecks = {
      "lax-axioms",    "codim-L",      "descent",       "q-decomposition",
      "f-transform",   "chain-map",    "transform",     "classical-reduction",
      "commutator-D",  "flow",         "h-chi",         "composition",
      "kernel",        "script"};
  for (size_t i = 1; i < root.items.size(); ++i) {
    const SNode& it = expectList(root.items[i], 2);
    std::string head = expectSym(it.items.front());
    PlanItem item;
    if (head == "check") {
      item.check = expectSym(it.items[1]);
      bool known = false;
      for (const auto& k : knownChecks) known |= k == item.check;
      if (!known) fail(Errc::UnknownCheck, item.check + " at " + it.where());
      KwArgs kw = KwArgs::scan(it, 2);
      if (kw.get(":theory")) item.theory = expectSym(*kw.get(":theory"));
      if (kw.get(":package")) item.package = expectSym(*kw.get(":package"));
      if (kw.get(":direction")) item.direction = expectSym(*kw.get(":direction"));
      if (kw.get(":pre-morphism")) item.preMorphism = expectSym(*kw.get(":pre-morphism"));
      if (kw.get(":codim")) item.codim = expectInt(*kw.get(":codim"));
      if (kw.get(":file")) item.scriptFile = expectSym(*kw.get(":file"));
      // names that are not file paths must resolve among the built-ins
      if (!item.theory.empty() && item.theory.find('/') == std::string::npos &&
          item.theory.find('.') == std::string::npos) {
        bool ok = false;
        for (const auto& nm : builtin_theory_names()) ok |= nm == item.theory;
        if (!ok) fail(Errc::UnresolvedReference, item.theory + " at " + it.where());
      }
      if (!item.package.empty()) {
        bool ok = false;
        for (const auto& nm : builtin_package_names()) ok |= nm == item.package;
        if (!ok) fail(Errc::UnresolvedReference, item.package + " at " + it.where());
      }
    } else if (head == "suite") {
      item.check = "suite-" + expectSym(it.items[1]);
      if (item.check != "suite-all" && item.check != "suite-lax" && item.check != "suite-equivalence" &&
          item.check != "suite-kernel")
        fail(Errc::UnknownCheck, item.check + " at " + it.where());
      KwArgs kw = KwArgs::scan(it, 2);
      if (kw.get(":theory")) item.theory = expectSym(*kw.get(":theory"));
      if (kw.get(":package")) item.package = expectSym(*kw.get(":package"));
    } else {
      synerr(it, "unknown plan entry " + head);
    }
    plan.items.push_back(std::move(item));
  }
  return plan;
}

} // namespace laxcheck
