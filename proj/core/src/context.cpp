#include "laxcheck/context.hpp"

#include "laxcheck/expr.hpp"

namespace laxcheck {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::UndeclaredAtom: return "UndeclaredAtom";
    case Errc::NonInvertibleDenominator: return "NonInvertibleDenominator";
    case Errc::DegreeMismatch: return "DegreeMismatch";
    case Errc::DegreeError: return "DegreeError";
    case Errc::MissingImage: return "MissingImage";
    case Errc::SingularLimit: return "SingularLimit";
    case Errc::UndefinedTensorNumber: return "UndefinedTensorNumber";
    case Errc::TensorMismatch: return "TensorMismatch";
    case Errc::RuleMismatch: return "RuleMismatch";
    case Errc::UnknownTheory: return "UnknownTheory";
    case Errc::UnknownPackage: return "UnknownPackage";
    case Errc::UnknownCheck: return "UnknownCheck";
    case Errc::UnresolvedReference: return "UnresolvedReference";
    case Errc::UndeclaredField: return "UndeclaredField";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::NonEliminable: return "NonEliminable";
    case Errc::SampleRejected: return "SampleRejected";
    case Errc::Internal: return "Internal";
  }
  return "Error";
}

Context::Context() : expansions_(std::make_unique<std::map<AtomId, Expr>>()) {}
Context::~Context() = default;
Context::Context(Context&&) noexcept = default;
Context& Context::operator=(Context&&) noexcept = default;

AtomId Context::atomByName(const std::string& name) const {
  auto it = byName_.find(name);
  if (it == byName_.end()) fail(Errc::UndeclaredAtom, name);
  return it->second;
}

std::optional<AtomId> Context::tryAtomByName(const std::string& name) const {
  auto it = byName_.find(name);
  if (it == byName_.end()) return std::nullopt;
  return it->second;
}

std::optional<FieldId> Context::tryFieldByName(const std::string& name) const {
  auto it = fieldByName_.find(name);
  if (it == fieldByName_.end()) return std::nullopt;
  return it->second;
}

FieldId Context::fieldByName(const std::string& name) const {
  auto f = tryFieldByName(name);
  if (!f) fail(Errc::UndeclaredField, name);
  return *f;
}

AtomId Context::jet(FieldId f, int order, int comp) const {
  auto it = jets_.find({f, {order, comp}});
  if (it == jets_.end())
    fail(Errc::UndeclaredAtom, "jet " + fields_[f].name + " order " + std::to_string(order) +
                                   " (max jet order " + std::to_string(maxJet_) + ")");
  return it->second;
}

AtomId Context::variation(FieldId f, int order, int comp) const {
  auto it = variations_.find({f, {order, comp}});
  if (it == variations_.end())
    fail(Errc::UndeclaredAtom, "variation of " + fields_[f].name + " order " + std::to_string(order));
  return it->second;
}

AtomId Context::funcDeriv(const std::string& base, int order) const {
  auto it = funcDerivs_.find({base, order});
  if (it == funcDerivs_.end()) fail(Errc::UndeclaredAtom, "function atom " + base + "^(" + std::to_string(order) + ")");
  return it->second;
}

const Expr& Context::expansion(AtomId id) const {
  auto it = expansions_->find(id);
  if (it == expansions_->end()) fail(Errc::UndeclaredAtom, "no expansion for " + atoms_[id].name);
  return it->second;
}

bool Context::hasExpansion(AtomId id) const { return expansions_->count(id) > 0; }

std::optional<AtomId> Context::radicalOf(AtomId base) const {
  auto it = radicalOf_.find(base);
  if (it == radicalOf_.end()) return std::nullopt;
  return it->second;
}

std::optional<Rat> Context::tensorNumber(AtomId id) const {
  const AtomDecl& a = atoms_[id];
  switch (a.kind) {
    case AtomKind::Constant: return Rat(0);
    case AtomKind::FlowParam: return Rat(0);
    case AtomKind::Dt: return Rat(1);
    case AtomKind::Jet:
    case AtomKind::Variation: {
      const auto& t = fields_[a.field].tensor;
      if (!t) return std::nullopt;
      return *t + a.jetOrder;
    }
    case AtomKind::FuncDeriv:
    case AtomKind::Radical:
    case AtomKind::DefScalar:
      return a.tensor;
  }
  return std::nullopt;
}

Context::Builder::Builder(int targetDim, int maxJet, ConventionFlags flags)
    : targetDim_(targetDim), maxJet_(maxJet), flags_(flags) {}

Context::Builder& Context::Builder::constant(const std::string& name, bool invertible) {
  constants_.push_back({name, invertible});
  return *this;
}

Context::Builder& Context::Builder::flowParam(const std::string& name) {
  flowParam_ = name;
  return *this;
}

Context::Builder& Context::Builder::field(const std::string& name, int gh, int ncomp, bool invertible,
                                          std::optional<Rat> tensor, bool ghost) {
  FieldDecl d;
  d.name = name;
  d.gh = gh;
  d.ncomp = ncomp;
  d.invertible = invertible;
  d.tensor = tensor;
  d.ghost = ghost;
  fields_.push_back(d);
  return *this;
}

Context::Builder& Context::Builder::funcAtom(const std::string& base, const std::string& argField,
                                             bool invertible, std::optional<Rat> tensor) {
  funcs_.push_back({base, argField, invertible, tensor});
  return *this;
}

Context::Builder& Context::Builder::radical(const std::string& name, const std::string& ofScalar) {
  radicals_.push_back({name, ofScalar});
  return *this;
}

Context::Builder& Context::Builder::defScalar(const std::string& name, bool invertible,
                                              std::optional<Rat> tensor) {
  scalars_.push_back({name, invertible, tensor});
  return *this;
}

std::shared_ptr<Context> Context::Builder::build() {
  auto ctx = std::shared_ptr<Context>(new Context());
  ctx->dimM_ = 1;
  ctx->targetDim_ = targetDim_;
  ctx->maxJet_ = maxJet_;
  ctx->flags_ = flags_;
  ctx->fields_ = fields_;
  for (size_t i = 0; i < fields_.size(); ++i) ctx->fieldByName_[fields_[i].name] = FieldId(i);

  auto push = [&](AtomDecl d) -> AtomId {
    AtomId id = AtomId(ctx->atoms_.size());
    if (ctx->byName_.count(d.name)) fail(Errc::Internal, "duplicate atom name " + d.name);
    ctx->byName_[d.name] = id;
    ctx->atoms_.push_back(std::move(d));
    return id;
  };

  for (auto& [name, inv] : constants_) {
    AtomDecl d;
    d.kind = AtomKind::Constant;
    d.name = name;
    d.invertible = inv;
    d.tensor = Rat(0);
    push(std::move(d));
  }
  if (flowParam_) {
    AtomDecl d;
    d.kind = AtomKind::FlowParam;
    d.name = *flowParam_;
    d.invertible = true; // s_limit guards against leftover negative powers
    d.tensor = Rat(0);
    ctx->uAtom_ = push(std::move(d));
  }
  for (auto& f : funcs_) {
    FieldId arg = ctx->fieldByName(f.argField);
    if (ctx->fields_[arg].ncomp != 1)
      fail(Errc::Internal, "function atoms support one-component arguments only");
    for (int k = 0; k <= maxJet_; ++k) {
      AtomDecl d;
      d.kind = AtomKind::FuncDeriv;
      d.name = k == 0 ? f.base : f.base + "." + std::to_string(k);
      d.invertible = (k == 0) && f.invertible;
      d.field = arg;
      d.derivOrder = k;
      d.tensor = f.tensor;
      AtomId id = push(std::move(d));
      ctx->funcDerivs_[{f.base, k}] = id;
    }
  }
  // Jets: fields in declaration order (fields before antifields by
  // convention of declaration), lower jets first.
  for (FieldId f = 0; f < ctx->fields_.size(); ++f) {
    const FieldDecl& fd = ctx->fields_[f];
    for (int k = 0; k <= maxJet_; ++k)
      for (int c = 0; c < fd.ncomp; ++c) {
        AtomDecl d;
        d.kind = AtomKind::Jet;
        d.name = fd.name + (k ? "." + std::to_string(k) : "") + (fd.ncomp > 1 ? "_" + std::to_string(c + 1) : "");
        d.degree = Degree{fd.gh, 0, 0};
        d.invertible = fd.invertible && k == 0;
        d.field = f;
        d.jetOrder = k;
        d.comp = c;
        ctx->jets_[{f, {k, c}}] = push(std::move(d));
      }
  }
  for (FieldId f = 0; f < ctx->fields_.size(); ++f) {
    const FieldDecl& fd = ctx->fields_[f];
    for (int k = 0; k <= maxJet_; ++k)
      for (int c = 0; c < fd.ncomp; ++c) {
        AtomDecl d;
        d.kind = AtomKind::Variation;
        d.name = "d" + fd.name + (k ? "." + std::to_string(k) : "") +
                 (fd.ncomp > 1 ? "_" + std::to_string(c + 1) : "");
        d.degree = Degree{fd.gh, 0, 1};
        d.field = f;
        d.jetOrder = k;
        d.comp = c;
        ctx->variations_[{f, {k, c}}] = push(std::move(d));
      }
  }
  std::vector<std::pair<AtomId, std::string>> radicalFixups;
  for (auto& r : radicals_) {
    AtomDecl d;
    d.kind = AtomKind::Radical;
    d.name = r.name;
    d.invertible = true;
    AtomId id = push(std::move(d));
    radicalFixups.push_back({id, r.of});
  }
  for (auto& s : scalars_) {
    AtomDecl d;
    d.kind = AtomKind::DefScalar;
    d.name = s.name;
    d.invertible = s.invertible;
    d.tensor = s.tensor;
    push(std::move(d));
  }
  {
    AtomDecl d;
    d.kind = AtomKind::Dt;
    d.name = "dt";
    d.degree = Degree{0, 1, 0};
    ctx->dtAtom_ = push(std::move(d));
  }
  for (auto& [id, of] : radicalFixups) {
    AtomId base = ctx->atomByName(of);
    const AtomDecl& b = ctx->atoms_[base];
    if (!b.invertible) fail(Errc::Internal, "radical of non-invertible scalar " + of);
    if (b.degree != Degree{}) fail(Errc::Internal, "radical of non-scalar " + of);
    ctx->atoms_[id].baseAtom = base;
    if (auto t = ctx->tensorNumber(base)) ctx->atoms_[id].tensor = *t / 2;
    ctx->radicalOf_[base] = id;
  }
  return ctx;
}

void define_scalar(Context& ctx, const std::string& name, Expr expansion) {
  AtomId id = ctx.atomByName(name);
  const AtomDecl& d = ctx.atom(id);
  if (d.kind != AtomKind::DefScalar)
    fail(Errc::Internal, name + " is not a definable scalar");
  auto deg = degree_of(ctx, expansion);
  if (!deg || *deg != Degree{}) fail(Errc::DegreeError, "expansion of " + name + " must be a scalar");
  // Expansions must be free of positive DefScalar powers so denominator
  // clearing terminates in one round per scalar.
  for (const auto& [m, c] : expansion.terms())
    for (const auto& [a, e] : m.even)
      if (ctx.atom(a).kind == AtomKind::DefScalar && e > 0)
        fail(Errc::Internal, "expansion of " + name + " not fully expanded");
  (*ctx.expansions_)[id] = std::move(expansion);
}

} // namespace laxcheck
