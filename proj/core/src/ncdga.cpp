#include "laxcheck/ncdga.hpp"

#include <algorithm>
#include <sstream>

namespace laxcheck {

const char* nc_base_name(NCBase b) {
  switch (b) {
    case NCBase::A: return "A";
    case NCBase::c: return "c";
    case NCBase::B: return "B";
    case NCBase::Adag: return "A+";
    case NCBase::Bdag: return "B+";
    case NCBase::cdag: return "c+";
    case NCBase::F: return "F";
  }
  return "?";
}

namespace {

AffDeg baseForm(NCBase b) {
  switch (b) {
    case NCBase::A: return {1, 0};
    case NCBase::c: return {0, 0};
    case NCBase::B: return {-2, 1};
    case NCBase::Adag: return {-1, 1};
    case NCBase::Bdag: return {2, 0};
    case NCBase::cdag: return {0, 1};
    case NCBase::F: return {2, 0};
  }
  return {};
}

int baseGhost(NCBase b) {
  switch (b) {
    case NCBase::A: return 0;
    case NCBase::c: return 1;
    case NCBase::B: return 0;
    case NCBase::Adag: return -1;
    case NCBase::Bdag: return -1;
    case NCBase::cdag: return -2;
    case NCBase::F: return 0;
  }
  return 0;
}

int wordParity(const NCFlags& f, const NCWord& w) {
  int p = 0;
  for (const auto& l : w) p ^= l.parity(f);
  return p;
}

} // namespace

AffDeg NCLetter::formDeg() const {
  AffDeg d = baseForm(base);
  for (NCDecor k : decor) {
    if (k == NCDecor::Star) d = AffDeg{-d.a, 1 - d.b};
    if (k == NCDecor::DA) d = d + AffDeg{1, 0};
  }
  return d;
}

int NCLetter::ghost() const { return baseGhost(base); }

int NCLetter::fdF() const {
  int n = 0;
  for (NCDecor k : decor)
    if (k == NCDecor::Delta) ++n;
  return n;
}

std::string NCLetter::str() const {
  std::string s = nc_base_name(base);
  for (NCDecor k : decor) {
    if (k == NCDecor::Delta) s = "(delta " + s + ")";
    if (k == NCDecor::Star) s = "(star " + s + ")";
    if (k == NCDecor::DA) s = "(dA " + s + ")";
  }
  return s;
}

UPoly UPoly::constant(const Rat& r) {
  UPoly p;
  if (r != 0) p.c[0] = r;
  return p;
}

UPoly UPoly::u(int n) {
  UPoly p;
  p.c[n] = 1;
  return p;
}

UPoly UPoly::operator+(const UPoly& o) const {
  UPoly r = *this;
  for (auto& [e, v] : o.c) {
    auto [it, ins] = r.c.try_emplace(e, v);
    if (!ins) {
      it->second += v;
      if (it->second == 0) r.c.erase(it);
    }
  }
  return r;
}

UPoly UPoly::operator*(const UPoly& o) const {
  UPoly r;
  for (auto& [e1, v1] : c)
    for (auto& [e2, v2] : o.c) {
      Rat v = v1 * v2;
      auto [it, ins] = r.c.try_emplace(e1 + e2, v);
      if (!ins) {
        it->second += v;
        if (it->second == 0) r.c.erase(it);
      }
    }
  return r;
}

UPoly UPoly::operator*(const Rat& r0) const {
  UPoly r;
  if (r0 == 0) return r;
  for (auto& [e, v] : c) r.c[e] = v * r0;
  return r;
}

UPoly UPoly::dds() const {
  UPoly r;
  for (auto& [e, v] : c)
    if (e != 0) r.c[e] = v * Rat(-e);
  return r;
}

Rat UPoly::at(int uval01) const {
  Rat s = 0;
  for (auto& [e, v] : c) {
    if (uval01 == 1)
      s += v;
    else if (e == 0)
      s += v;
  }
  return s;
}

std::string UPoly::str() const {
  if (c.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [e, v] : c) {
    if (!first) os << "+";
    first = false;
    os << to_string(v);
    if (e != 0) os << "*u^" << e;
  }
  return os.str();
}

namespace {

struct SignedWord {
  NCWord w;
  int sign = 1;
  bool zero = false;
};

// Collapse star-star pairs and reject delta-delta at construction.
SignedWord canonLetter(const NCFlags& f, NCLetter l) {
  SignedWord out;
  out.sign = 1;
  // delta count
  if (l.fdF() >= 2) {
    out.zero = true;
    return out;
  }
  // move a single Delta innermost through Stars (they commute); Delta cannot
  // pass DA (such stacks are produced only by explicit rule application).
  // Collapse adjacent stars, innermost first.
  std::vector<NCDecor> out_decor;
  AffDeg deg = baseForm(l.base);
  for (NCDecor k : l.decor) {
    if (k == NCDecor::Star && !out_decor.empty() && out_decor.back() == NCDecor::Star) {
      // star star X = epsS (-1)^{k(d-k)} X with k = current form degree minus
      // the inner star: recompute from the stack without the last star.
      out_decor.pop_back();
      AffDeg inner{-deg.a, 1 - deg.b}; // degree before the inner star
      int kpar = inner.parity(f);
      int dk = ((f.dOdd ? 1 : 0) - kpar % 2 + 4) % 2;
      int expo = (kpar * dk) % 2;
      out.sign *= (f.epsS < 0 ? -1 : 1) * (expo ? -1 : 1);
      deg = inner;
      continue;
    }
    out_decor.push_back(k);
    if (k == NCDecor::Star) deg = AffDeg{-deg.a, 1 - deg.b};
    if (k == NCDecor::DA) deg = deg + AffDeg{1, 0};
  }
  // canonicalize [Star, Delta] adjacency to [Delta, Star]
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i + 1 < out_decor.size(); ++i)
      if (out_decor[i] == NCDecor::Star && out_decor[i + 1] == NCDecor::Delta) {
        std::swap(out_decor[i], out_decor[i + 1]);
        changed = true;
      }
  }
  l.decor = std::move(out_decor);
  out.w.push_back(std::move(l));
  return out;
}

// Minimal rotation of a trace word, with the Koszul sign. Returns zero=true
// when a periodic rotation forces the word to vanish.
SignedWord canonRotate(const NCFlags& f, const NCWord& w) {
  SignedWord best;
  best.w = w;
  best.sign = 1;
  if (w.size() <= 1) return best;
  int total = wordParity(f, w);
  NCWord cur = w;
  int sign = 1;
  bool zero = false;
  for (size_t i = 1; i < w.size(); ++i) {
    int px = cur.front().parity(f);
    // Tr[x w'] = (-1)^{|x| |w'|} Tr[w' x], |w'| = total - |x|
    int flip = (px * ((total + px) % 2)) % 2;
    sign *= flip ? -1 : 1;
    std::rotate(cur.begin(), cur.begin() + 1, cur.end());
    if (cur < best.w) {
      best.w = cur;
      best.sign = sign;
    } else if (cur == best.w && sign != best.sign) {
      zero = true;
    }
  }
  best.zero = zero;
  return best;
}

void addWord(const NCFlags& f, NCExpr& e, NCWord w, UPoly coeff) {
  if (coeff.isZero()) return;
  if (e.trace && w.size() > 1) {
    SignedWord r = canonRotate(f, w);
    if (r.zero) return;
    w = std::move(r.w);
    coeff = coeff * Rat(r.sign);
  }
  auto [it, ins] = e.terms.try_emplace(std::move(w), coeff);
  if (!ins) {
    it->second = it->second + coeff;
    if (it->second.isZero()) e.terms.erase(it);
  }
}

} // namespace

NCExpr nc_zero(bool trace) {
  NCExpr e;
  e.trace = trace;
  return e;
}

NCExpr nc_letter(const NCFlags& f, NCLetter l, UPoly coeff) {
  NCExpr e;
  SignedWord sw = canonLetter(f, std::move(l));
  if (!sw.zero) addWord(f, e, sw.w, coeff * Rat(sw.sign));
  return e;
}

NCExpr nc_word(const NCFlags& f, const NCWord& w, UPoly coeff, bool trace) {
  NCExpr e;
  e.trace = trace;
  NCWord out;
  int sign = 1;
  for (const NCLetter& l : w) {
    SignedWord sw = canonLetter(f, l);
    if (sw.zero) return e;
    sign *= sw.sign;
    out.push_back(std::move(sw.w.front()));
  }
  addWord(f, e, std::move(out), coeff * Rat(sign));
  return e;
}

NCExpr nc_add(const NCExpr& a, const NCExpr& b) {
  if (a.isZero()) return b;
  if (b.isZero()) return a;
  if (a.trace != b.trace) fail(Errc::Internal, "mixing trace and free expressions");
  NCExpr r = a;
  for (auto& [w, c] : b.terms) {
    auto [it, ins] = r.terms.try_emplace(w, c);
    if (!ins) {
      it->second = it->second + c;
      if (it->second.isZero()) r.terms.erase(it);
    }
  }
  return r;
}

NCExpr nc_scale(const NCExpr& a, const Rat& r0) {
  NCExpr r;
  r.trace = a.trace;
  if (r0 == 0) return r;
  for (auto& [w, c] : a.terms) r.terms[w] = c * r0;
  return r;
}

NCExpr nc_scale(const NCExpr& a, const UPoly& r0) {
  NCExpr r;
  r.trace = a.trace;
  if (r0.isZero()) return r;
  for (auto& [w, c] : a.terms) {
    UPoly v = c * r0;
    if (!v.isZero()) r.terms[w] = v;
  }
  return r;
}

NCExpr nc_neg(const NCExpr& a) { return nc_scale(a, Rat(-1)); }
NCExpr nc_sub(const NCExpr& a, const NCExpr& b) { return nc_add(a, nc_neg(b)); }

NCExpr nc_mul(const NCFlags& f, const NCExpr& a, const NCExpr& b) {
  if (a.trace || b.trace) fail(Errc::Internal, "nc_mul of trace expressions");
  NCExpr r;
  for (auto& [wa, ca] : a.terms)
    for (auto& [wb, cb] : b.terms) {
      NCWord w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      addWord(f, r, std::move(w), ca * cb);
    }
  return r;
}

std::optional<int> nc_parity(const NCFlags& f, const NCExpr& a) {
  std::optional<int> p;
  for (auto& [w, c] : a.terms) {
    int pw = wordParity(f, w);
    if (!p)
      p = pw;
    else if (*p != pw)
      return std::nullopt;
  }
  if (!p) return 0;
  return p;
}

NCExpr nc_bracket(const NCFlags& f, const NCExpr& a, const NCExpr& b) {
  auto pa = nc_parity(f, a), pb = nc_parity(f, b);
  if (!pa || !pb) fail(Errc::DegreeError, "bracket of inhomogeneous expressions");
  int sgn = (*pa * *pb) % 2 ? -1 : 1;
  return nc_sub(nc_mul(f, a, b), nc_scale(nc_mul(f, b, a), Rat(sgn)));
}

NCExpr nc_tr(const NCFlags& f, const NCExpr& a) {
  if (a.trace) return a;
  NCExpr r;
  r.trace = true;
  for (auto& [w, c] : a.terms) addWord(f, r, w, c);
  return r;
}

NCExpr nc_normalize(const NCFlags& f, const NCExpr& a) {
  NCExpr r;
  r.trace = a.trace;
  for (auto& [w, c] : a.terms) {
    NCWord out;
    int sign = 1;
    bool zero = false;
    for (const NCLetter& l : w) {
      SignedWord sw = canonLetter(f, l);
      if (sw.zero) {
        zero = true;
        break;
      }
      sign *= sw.sign;
      out.push_back(std::move(sw.w.front()));
    }
    if (!zero) addWord(f, r, std::move(out), c * Rat(sign));
  }
  return r;
}

std::optional<AffDeg> nc_form_degree(const NCExpr& a) {
  std::optional<AffDeg> d;
  for (auto& [w, c] : a.terms) {
    AffDeg dw;
    for (auto& l : w) dw = dw + l.formDeg();
    if (!d)
      d = dw;
    else if (!(*d == dw))
      return std::nullopt;
  }
  if (!d) return AffDeg{};
  return d;
}

std::optional<int> nc_ghost(const NCExpr& a) {
  std::optional<int> g;
  for (auto& [w, c] : a.terms) {
    int gw = 0;
    for (auto& l : w) gw += l.ghost();
    if (!g)
      g = gw;
    else if (*g != gw)
      return std::nullopt;
  }
  if (!g) return 0;
  return g;
}

std::map<int, NCExpr> nc_split_codim(const NCExpr& a) {
  std::map<int, NCExpr> out;
  for (auto& [w, c] : a.terms) {
    AffDeg dw;
    for (auto& l : w) dw = dw + l.formDeg();
    if (dw.b != 1) fail(Errc::DegreeError, "word with form degree not of shape d - k");
    int k = -dw.a;
    auto& e = out[k];
    e.trace = a.trace;
    e.terms[w] = c;
  }
  return out;
}

std::string NCExpr::str() const {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [w, c] : terms) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.str() << ")";
    os << (trace ? " tr[" : " [");
    bool f1 = true;
    for (auto& l : w) {
      if (!f1) os << " ";
      f1 = false;
      os << l.str();
    }
    os << "]";
  }
  return os.str();
}

// --------------------------------------------------------------------------
// Letter-level decorated operations
// --------------------------------------------------------------------------

namespace {

NCLetter plain(NCBase b) { return NCLetter{b, {}}; }
NCLetter dec(NCBase b, std::vector<NCDecor> d) { return NCLetter{b, std::move(d)}; }

NCExpr letterExpr(const NCFlags& f, const NCLetter& l) { return nc_letter(f, l); }

NCExpr starOfExpr(const NCFlags& f, const NCExpr& a);
NCExpr dAOfExpr(const NCFlags& f, const NCExpr& a);
NCExpr deltaOfExpr(const NCFlags& f, const NCExpr& a);

NCExpr deltaLetter(const NCFlags& f, const NCLetter& l) {
  if (!l.decor.empty() && l.decor.back() == NCDecor::DA) {
    NCLetter inner = l;
    inner.decor.pop_back();
    // delta(dA X) = -dA(delta X) + [delta A, X]
    NCExpr r = nc_neg(dAOfExpr(f, deltaLetter(f, inner)));
    return nc_add(r, nc_bracket(f, letterExpr(f, dec(NCBase::A, {NCDecor::Delta})),
                                letterExpr(f, inner)));
  }
  if (!l.decor.empty() && l.decor.back() == NCDecor::Star) {
    NCLetter inner = l;
    inner.decor.pop_back();
    return starOfExpr(f, deltaLetter(f, inner));
  }
  if (l.fdF() >= 1) return nc_zero();
  if (l.base == NCBase::F) // delta F = -dA delta A
    return nc_neg(letterExpr(f, dec(NCBase::A, {NCDecor::Delta, NCDecor::DA})));
  NCLetter out = l;
  out.decor.insert(out.decor.begin(), NCDecor::Delta);
  return letterExpr(f, out);
}

NCExpr dALetter(const NCFlags& f, const NCLetter& l) {
  if (l.decor.empty() && l.base == NCBase::F) return nc_zero(); // Bianchi
  NCLetter out = l;
  out.decor.push_back(NCDecor::DA);
  return letterExpr(f, out);
}

NCExpr starLetter(const NCFlags& f, const NCLetter& l) {
  NCLetter out = l;
  out.decor.push_back(NCDecor::Star);
  return letterExpr(f, out); // canonLetter folds star-star
}

// Apply a letter operation as a graded derivation over words.
NCExpr derive(const NCFlags& f, const NCExpr& a, int parity,
              const std::function<NCExpr(const NCLetter&)>& op) {
  NCExpr r;
  r.trace = a.trace;
  for (auto& [w, c] : a.terms) {
    int sign = 1;
    for (size_t j = 0; j < w.size(); ++j) {
      NCExpr img = op(w[j]);
      if (!img.isZero()) {
        for (auto& [wi, ci] : img.terms) {
          NCWord out(w.begin(), w.begin() + ptrdiff_t(j));
          out.insert(out.end(), wi.begin(), wi.end());
          out.insert(out.end(), w.begin() + ptrdiff_t(j) + 1, w.end());
          addWord(f, r, std::move(out), c * ci * Rat(sign));
        }
      }
      if (parity % 2 && w[j].parity(f)) sign = -sign;
    }
  }
  return r;
}

NCExpr starOfExpr(const NCFlags& f, const NCExpr& a) {
  // The star acts on the unique non-scalar factor. With total-parity Koszul
  // signs the componentwise star picks up a twist by the internal parity of
  // the letters after it when d is odd (bigraded-to-total sign conversion).
  NCExpr r;
  r.trace = a.trace;
  for (auto& [w, c] : a.terms) {
    int idx = -1;
    for (size_t j = 0; j < w.size(); ++j) {
      AffDeg d = w[j].formDeg();
      if (d.a == 0 && d.b == 0) continue;
      if (idx >= 0) fail(Errc::Internal, "star of a product of two forms");
      idx = int(j);
    }
    if (idx < 0 && !w.empty()) idx = 0;
    int twist = 0;
    if (f.dOdd)
      for (size_t j = size_t(idx) + 1; j < w.size(); ++j) twist ^= w[j].internalParity();
    NCWord out = w;
    NCExpr starred = starLetter(f, w[size_t(idx)]);
    for (auto& [wi, ci] : starred.terms) {
      NCWord o2(out.begin(), out.begin() + idx);
      o2.insert(o2.end(), wi.begin(), wi.end());
      o2.insert(o2.end(), out.begin() + idx + 1, out.end());
      addWord(f, r, std::move(o2), c * ci * Rat(twist ? -1 : 1));
    }
  }
  return r;
}

NCExpr dAOfExpr(const NCFlags& f, const NCExpr& a) {
  return derive(f, a, 1, [&](const NCLetter& l) { return dALetter(f, l); });
}

NCExpr deltaOfExpr(const NCFlags& f, const NCExpr& a) {
  return derive(f, a, 1, [&](const NCLetter& l) { return deltaLetter(f, l); });
}

// Generic vector-field letter action.
enum class VfMode { Iota, Lie };

NCExpr vfLetter(const NCFlags& f, const NCVf& X, VfMode mode, const NCLetter& l) {
  int sigma = ((X.ghShift % 2) + 2) % 2;
  // operator parity: sigma for L_X, sigma + 1 for iota_X
  int opParity = mode == VfMode::Lie ? sigma : (sigma + 1) % 2;
  if (!l.decor.empty() && l.decor.back() == NCDecor::DA) {
    NCLetter inner = l;
    inner.decor.pop_back();
    NCExpr r = vfLetter(f, X, mode, inner);
    NCExpr out;
    if (!r.isZero()) {
      out = dAOfExpr(f, r);
      // the operator passes the odd derivation d_A with its own parity
      if (opParity) out = nc_neg(out);
    }
    if (mode == VfMode::Lie) {
      auto it = X.action.find(NCBase::A);
      if (it != X.action.end() && !it->second.isZero())
        out = nc_add(out, nc_bracket(f, it->second, letterExpr(f, inner)));
    }
    return out;
  }
  if (!l.decor.empty() && l.decor.back() == NCDecor::Star) {
    NCLetter inner = l;
    inner.decor.pop_back();
    NCExpr r = vfLetter(f, X, mode, inner);
    if (r.isZero()) return r;
    return starOfExpr(f, r);
  }
  if (l.fdF() == 1) {
    // stack is exactly [Delta]
    auto it = X.action.find(l.base);
    if (it == X.action.end() || it->second.isZero()) return nc_zero();
    if (mode == VfMode::Iota) return it->second;
    NCExpr r = deltaOfExpr(f, it->second);
    if (sigma) r = nc_neg(r);
    return r;
  }
  if (mode == VfMode::Iota) return nc_zero();
  auto it = X.action.find(l.base);
  if (it == X.action.end()) return nc_zero();
  return it->second;
}

} // namespace

NCExpr nc_star(const NCFlags& f, const NCExpr& a) { return starOfExpr(f, a); }
NCExpr nc_dA(const NCFlags& f, const NCExpr& a) { return dAOfExpr(f, a); }
NCExpr nc_delta(const NCFlags& f, const NCExpr& a) { return deltaOfExpr(f, a); }
NCExpr nc_d(const NCFlags& f, const NCExpr& a) { return dAOfExpr(f, a); }

NCExpr nc_contract(const NCFlags& f, const NCVf& X, const NCExpr& a) {
  int parity = ((X.ghShift + 1) % 2 + 2) % 2;
  return derive(f, a, parity, [&](const NCLetter& l) { return vfLetter(f, X, VfMode::Iota, l); });
}

NCExpr nc_lie(const NCFlags& f, const NCVf& X, const NCExpr& a) {
  int parity = ((X.ghShift % 2) + 2) % 2;
  return derive(f, a, parity, [&](const NCLetter& l) { return vfLetter(f, X, VfMode::Lie, l); });
}

NCExpr nc_lie_composite(const NCFlags& f, const NCVf& X, const NCExpr& a) {
  int sigma = ((X.ghShift % 2) + 2) % 2;
  NCExpr r = nc_contract(f, X, nc_delta(f, a));
  NCExpr s = nc_delta(f, nc_contract(f, X, a));
  return nc_add(r, sigma ? nc_neg(s) : s);
}

NCVf nc_commutator(const NCFlags& f, const NCVf& X, const NCVf& Y) {
  NCVf Z;
  Z.ghShift = X.ghShift + Y.ghShift;
  int sgn = (X.ghShift * Y.ghShift) % 2 ? -1 : 1;
  auto handle = [&](NCBase b) {
    if (Z.action.count(b)) return;
    NCExpr v;
    auto ya = Y.action.find(b);
    if (ya != Y.action.end()) v = nc_lie(f, X, ya->second);
    auto xa = X.action.find(b);
    if (xa != X.action.end()) v = nc_sub(v, nc_scale(nc_lie(f, Y, xa->second), Rat(sgn)));
    if (!v.isZero()) Z.action[b] = v;
  };
  for (auto& [b, e] : X.action) handle(b);
  for (auto& [b, e] : Y.action) handle(b);
  return Z;
}

NCExpr nc_contract_euler(const NCFlags& f, const NCExpr& a) {
  NCVf euler;
  euler.ghShift = 0;
  for (NCBase b : {NCBase::A, NCBase::c, NCBase::B, NCBase::Adag, NCBase::Bdag, NCBase::cdag,
                   NCBase::F}) {
    int gh = baseGhost(b);
    if (gh != 0) euler.action[b] = nc_scale(nc_letter(f, NCLetter{b, {}}), Rat(gh));
  }
  return nc_contract(f, euler, a);
}

NCExpr nc_apply_morphism(const NCFlags& f, const NCMorphism& m, const NCExpr& a) {
  std::function<NCExpr(const NCLetter&)> imageOf = [&](const NCLetter& l) -> NCExpr {
    if (!l.decor.empty() && l.decor.back() == NCDecor::DA) {
      NCLetter inner = l;
      inner.decor.pop_back();
      return dAOfExpr(f, imageOf(inner));
    }
    if (!l.decor.empty() && l.decor.back() == NCDecor::Star) {
      NCLetter inner = l;
      inner.decor.pop_back();
      NCExpr r = imageOf(inner);
      if (r.isZero()) return r;
      return starOfExpr(f, r);
    }
    if (l.fdF() == 1) {
      NCLetter p = l;
      p.decor.clear();
      auto it = m.images.find(p.base);
      if (it == m.images.end()) fail(Errc::MissingImage, p.str());
      return deltaOfExpr(f, it->second);
    }
    auto it = m.images.find(l.base);
    if (it == m.images.end()) fail(Errc::MissingImage, l.str());
    return it->second;
  };
  NCExpr r;
  r.trace = a.trace;
  for (auto& [w, c] : a.terms) {
    NCExpr t = nc_word(f, {}, UPoly::constant(1));
    for (auto& l : w) t = nc_mul(f, t, imageOf(l));
    if (a.trace) t = nc_tr(f, t);
    r = nc_add(r, nc_scale(t, c));
  }
  return r;
}

NCExpr nc_s_derivative(const NCFlags& f, const NCExpr& a) {
  NCExpr r;
  r.trace = a.trace;
  for (auto& [w, c] : a.terms) {
    UPoly d = c.dds();
    if (!d.isZero()) r.terms[w] = d;
  }
  return r;
}

NCExpr nc_s_limit(const NCFlags& f, const NCExpr& a, int uval01) {
  NCExpr r;
  r.trace = a.trace;
  for (auto& [w, c] : a.terms) {
    Rat v = c.at(uval01);
    if (v != 0) addWord(f, r, w, UPoly::constant(v));
  }
  return r;
}

// --------------------------------------------------------------------------
// Rules and scripts
// --------------------------------------------------------------------------

const char* nc_rule_name(NCRule r) {
  switch (r) {
    case NCRule::BracketExpand: return "bracket-expand";
    case NCRule::TraceCyclic: return "trace-cyclic";
    case NCRule::TraceOfBracketZero: return "trace-of-bracket-zero";
    case NCRule::StarSwap: return "star-swap";
    case NCRule::StarInvolution: return "star-involution";
    case NCRule::Bianchi: return "bianchi";
    case NCRule::DASquared: return "dA-squared";
    case NCRule::DeltaF: return "delta-F";
    case NCRule::DeltaDACommute: return "delta-dA-commute";
    case NCRule::LeibnizD: return "leibniz-d";
    case NCRule::LeibnizDelta: return "leibniz-delta";
  }
  return "?";
}

std::optional<NCRule> nc_rule_by_name(const std::string& s) {
  for (int i = 0; i <= int(NCRule::LeibnizDelta); ++i)
    if (s == nc_rule_name(NCRule(i))) return NCRule(i);
  return std::nullopt;
}

namespace {

const NCWord& wordAt(const NCExpr& a, int term) {
  if (term < 0 || size_t(term) >= a.terms.size()) fail(Errc::RuleMismatch, "term index out of range");
  auto it = a.terms.begin();
  std::advance(it, term);
  return it->first;
}

// x (star y) = sign (star x) y for equal form degrees; the sign is
// (-1)^{k(d-k) + d g_y} in the total-parity convention.
std::optional<int> starSwapSign(const NCFlags& f, const NCLetter& x, const NCLetter& yStarStripped) {
  AffDeg kx = x.formDeg(), ky = yStarStripped.formDeg();
  if (!(kx == ky)) return std::nullopt;
  int k2 = kx.parity(f);
  int d2 = f.dOdd ? 1 : 0;
  int dk2 = ((d2 - k2) % 2 + 2) % 2;
  int gy = yStarStripped.internalParity();
  int expo = (k2 * dk2 + d2 * gy) % 2;
  return expo ? -1 : 1;
}

// Replace letters [pos, pos+1] of the word by a two-letter pair, with
// coefficient factor; returns the rewritten whole expression term. When the
// rewritten word is the original with opposite coefficient, the relation
// forces the term to vanish and it is dropped.
NCExpr spliceTwo(const NCFlags& f, const NCExpr& a, const NCWord& w, const UPoly& c, size_t pos,
                 const NCLetter& l1, const NCLetter& l2, int sign) {
  NCExpr r;
  r.trace = a.trace;
  for (auto& [w2, c2] : a.terms)
    if (!(w2 == w)) r.terms[w2] = c2;
  NCWord out;
  size_t n = w.size();
  for (size_t i = 0; i < n; ++i) {
    if (i == pos) {
      out.push_back(l1);
      out.push_back(l2);
      ++i; // skip pos+1 (mod handled by caller ordering)
      continue;
    }
    out.push_back(w[i]);
  }
  NCExpr t = nc_word(f, out, c * Rat(sign), a.trace);
  if (t.terms.size() == 1 && t.terms.begin()->first == w &&
      (t.terms.begin()->second + c).isZero())
    return r; // w = -w, so the term is zero
  return nc_add(r, t);
}

NCExpr applyStarSwap(const NCFlags& f, const NCExpr& a, int term, int pos) {
  const NCWord& w = wordAt(a, term);
  size_t n = w.size();
  if (n < 2) fail(Errc::RuleMismatch, "word too short");
  size_t i = size_t(pos) % n, j = (size_t(pos) + 1) % n;
  if (j != i + 1) {
    // wrap-around: rotate the word so the pair is adjacent, rely on
    // cyclic canonicalization to absorb the rotation sign.
    if (!a.trace) fail(Errc::RuleMismatch, "wrap-around swap outside a trace");
  }
  UPoly c = a.terms.at(w);
  const NCLetter &x = w[i], &y = w[j];
  // pattern A: x (star y)
  if (!y.decor.empty() && y.decor.back() == NCDecor::Star) {
    NCLetter ys = y;
    ys.decor.pop_back();
    auto sgn = starSwapSign(f, x, ys);
    if (sgn) {
      NCLetter sx = x;
      sx.decor.push_back(NCDecor::Star);
      if (j == i + 1) return spliceTwo(f, a, w, c, i, sx, ys, *sgn);
      // wrap-around pair (w[n-1], w[0]): rebuild as [y, w[1..n-2], star x]
      NCExpr r;
      r.trace = a.trace;
      for (auto& [w2, c2] : a.terms)
        if (!(w2 == w)) r.terms[w2] = c2;
      NCWord out;
      out.push_back(ys);
      for (size_t t2 = 1; t2 + 1 < n; ++t2) out.push_back(w[t2]);
      out.push_back(sx);
      NCExpr t = nc_word(f, out, c * Rat(*sgn), a.trace);
      if (t.terms.size() == 1 && t.terms.begin()->first == w &&
          (t.terms.begin()->second + c).isZero())
        return r;
      return nc_add(r, t);
    }
  }
  // pattern B: (star x) y -> x (star y)
  if (!x.decor.empty() && x.decor.back() == NCDecor::Star) {
    NCLetter xs = x;
    xs.decor.pop_back();
    auto sgn = starSwapSign(f, xs, y);
    if (sgn) {
      NCLetter sy = y;
      sy.decor.push_back(NCDecor::Star);
      if (j == i + 1) return spliceTwo(f, a, w, c, i, xs, sy, *sgn);
      NCExpr r;
      r.trace = a.trace;
      for (auto& [w2, c2] : a.terms)
        if (!(w2 == w)) r.terms[w2] = c2;
      NCWord out;
      out.push_back(sy);
      for (size_t t2 = 1; t2 + 1 < n; ++t2) out.push_back(w[t2]);
      out.push_back(xs);
      NCExpr t = nc_word(f, out, c * Rat(*sgn), a.trace);
      if (t.terms.size() == 1 && t.terms.begin()->first == w &&
          (t.terms.begin()->second + c).isZero())
        return r;
      return nc_add(r, t);
    }
  }
  fail(Errc::RuleMismatch, "star-swap does not apply");
}

// True when the letter is dA dA X possibly under outer stars.
bool dASquaredMatch(const NCLetter& l, size_t& daTop) {
  size_t nd = l.decor.size();
  size_t j = nd;
  while (j > 0 && l.decor[j - 1] == NCDecor::Star) --j;
  if (j < 2) return false;
  if (l.decor[j - 1] != NCDecor::DA || l.decor[j - 2] != NCDecor::DA) return false;
  daTop = j;
  return true;
}

NCExpr applyDASquared(const NCFlags& f, const NCExpr& a, int term, int pos) {
  const NCWord& w = wordAt(a, term);
  if (size_t(pos) >= w.size()) fail(Errc::RuleMismatch, "position out of range");
  const NCLetter& l = w[size_t(pos)];
  size_t daTop = 0;
  if (!dASquaredMatch(l, daTop)) fail(Errc::RuleMismatch, "letter is not dA dA X");
  NCLetter inner = l;
  inner.decor.erase(inner.decor.begin() + ptrdiff_t(daTop) - 2, inner.decor.begin() + ptrdiff_t(daTop));
  size_t nStars = l.decor.size() - daTop;
  inner.decor.resize(daTop - 2);
  // dA dA X = [F, X]; re-apply the outer stars to the bracket.
  NCExpr repl = nc_bracket(f, letterExpr(f, plain(NCBase::F)), letterExpr(f, inner));
  for (size_t s = 0; s < nStars; ++s) repl = starOfExpr(f, repl);
  UPoly c = a.terms.at(w);
  NCExpr r;
  r.trace = a.trace;
  for (auto& [w2, c2] : a.terms)
    if (!(w2 == w)) r.terms[w2] = c2;
  for (auto& [wi, ci] : repl.terms) {
    NCWord out(w.begin(), w.begin() + pos);
    out.insert(out.end(), wi.begin(), wi.end());
    out.insert(out.end(), w.begin() + pos + 1, w.end());
    NCExpr t = nc_word(f, out, c * ci, a.trace);
    r = nc_add(r, t);
  }
  return r;
}

NCExpr applyLetterRewrite(const NCFlags& f, const NCExpr& a, int term, int pos,
                          const std::function<std::optional<NCExpr>(const NCLetter&)>& rw) {
  const NCWord& w = wordAt(a, term);
  if (size_t(pos) >= w.size()) fail(Errc::RuleMismatch, "position out of range");
  auto repl = rw(w[size_t(pos)]);
  if (!repl) fail(Errc::RuleMismatch, "rule does not apply at position");
  UPoly c = a.terms.at(w);
  NCExpr r;
  r.trace = a.trace;
  for (auto& [w2, c2] : a.terms)
    if (!(w2 == w)) r.terms[w2] = c2;
  for (auto& [wi, ci] : repl->terms) {
    NCWord out(w.begin(), w.begin() + pos);
    out.insert(out.end(), wi.begin(), wi.end());
    out.insert(out.end(), w.begin() + pos + 1, w.end());
    r = nc_add(r, nc_word(f, out, c * ci, a.trace));
  }
  return r;
}

} // namespace

NCExpr nc_apply_rule(const NCFlags& f, const NCExpr& a, NCRule rule, int term, int pos) {
  switch (rule) {
    case NCRule::StarSwap:
      return applyStarSwap(f, a, term, pos);
    case NCRule::DASquared:
      return applyDASquared(f, a, term, pos);
    case NCRule::Bianchi:
      return applyLetterRewrite(f, a, term, pos, [&](const NCLetter& l) -> std::optional<NCExpr> {
        if (l.base == NCBase::F && l.decor == std::vector<NCDecor>{NCDecor::DA}) return nc_zero();
        return std::nullopt;
      });
    case NCRule::DeltaF:
      return applyLetterRewrite(f, a, term, pos, [&](const NCLetter& l) -> std::optional<NCExpr> {
        if (l.base == NCBase::F && l.decor == std::vector<NCDecor>{NCDecor::Delta})
          return nc_neg(letterExpr(f, dec(NCBase::A, {NCDecor::Delta, NCDecor::DA})));
        return std::nullopt;
      });
    case NCRule::DeltaDACommute:
      return applyLetterRewrite(f, a, term, pos, [&](const NCLetter& l) -> std::optional<NCExpr> {
        size_t n = l.decor.size();
        if (n >= 2 && l.decor[n - 1] == NCDecor::Delta && l.decor[n - 2] == NCDecor::DA) {
          NCLetter inner = l;
          inner.decor.pop_back();
          inner.decor.pop_back();
          return deltaLetter(f, dec(inner.base, inner.decor)); // resolves via the rule
        }
        return std::nullopt;
      });
    case NCRule::StarInvolution:
    case NCRule::BracketExpand:
    case NCRule::TraceCyclic:
    case NCRule::TraceOfBracketZero:
    case NCRule::LeibnizD:
    case NCRule::LeibnizDelta:
      // These identities are part of the canonical form; a step is a legal
      // no-op that re-normalizes.
      return nc_normalize(f, a);
  }
  fail(Errc::RuleMismatch, "unknown rule");
}

NCExpr nc_auto_reduce(const NCFlags& f, const NCExpr& a, std::vector<NCScriptStep>* steps) {
  NCExpr cur = a;
  for (int round = 0; round < 16; ++round) {
    bool changed = false;
    // dA-squared saturation
    for (;;) {
      bool hit = false;
      int ti = 0;
      for (auto it = cur.terms.begin(); it != cur.terms.end(); ++it, ++ti) {
        const NCWord& w = it->first;
        for (size_t p = 0; p < w.size(); ++p) {
          size_t daTop = 0;
          if (dASquaredMatch(w[p], daTop)) {
            cur = applyDASquared(f, cur, ti, int(p));
            if (steps) steps->push_back({NCRule::DASquared, ti, int(p)});
            hit = true;
            changed = true;
            break;
          }
        }
        if (hit) break;
      }
      if (!hit) break;
    }
    // star-swap orbit minimization, one term at a time
    bool swapped = false;
    for (auto it = cur.terms.begin(); it != cur.terms.end(); ++it) {
      const NCWord w = it->first;
      // BFS over the swap orbit of this word; a path ending in a
      // self-cancelling swap proves the word is zero.
      struct Node {
        NCWord w;
        std::vector<int> path;
      };
      std::vector<Node> frontier{{w, {}}};
      std::vector<NCWord> seen{w};
      NCWord best = w;
      std::vector<int> bestPath;
      bool cancels = false;
      std::vector<int> cancelPath;
      size_t guard = 0;
      while (!frontier.empty() && guard < 64 && !cancels) {
        Node nd = frontier.back();
        frontier.pop_back();
        ++guard;
        size_t n = nd.w.size();
        size_t limit = cur.trace ? n : (n > 0 ? n - 1 : 0);
        for (size_t p = 0; p < limit; ++p) {
          NCExpr probe;
          probe.trace = cur.trace;
          probe.terms[nd.w] = UPoly::constant(1);
          NCExpr res;
          try {
            res = applyStarSwap(f, probe, 0, int(p));
          } catch (const Error&) {
            continue;
          }
          if (res.isZero()) {
            cancels = true;
            cancelPath = nd.path;
            cancelPath.push_back(int(p));
            break;
          }
          if (res.terms.size() != 1) continue;
          const NCWord& w2 = res.terms.begin()->first;
          if (std::find(seen.begin(), seen.end(), w2) != seen.end()) continue;
          seen.push_back(w2);
          Node nx{w2, nd.path};
          nx.path.push_back(int(p));
          if (w2 < best) {
            best = w2;
            bestPath = nx.path;
          }
          frontier.push_back(nx);
        }
      }
      const std::vector<int>& path = cancels ? cancelPath : bestPath;
      if (cancels || !(best == w)) {
        NCWord curWord = w;
        for (int p : path) {
          int idx = 0;
          bool found = false;
          for (auto jt = cur.terms.begin(); jt != cur.terms.end(); ++jt, ++idx)
            if (jt->first == curWord) {
              found = true;
              break;
            }
          if (!found) break; // the word cancelled against another term
          NCExpr probe;
          probe.trace = cur.trace;
          probe.terms[curWord] = UPoly::constant(1);
          NCExpr res = applyStarSwap(f, probe, 0, p);
          cur = applyStarSwap(f, cur, idx, p);
          if (steps) steps->push_back({NCRule::StarSwap, idx, p});
          if (res.isZero()) break;
          curWord = res.terms.begin()->first;
        }
        swapped = true;
        changed = true;
        break; // term iterators invalidated; restart scan
      }
    }
    if (swapped) continue;
    if (!changed) break;
  }
  return cur;
}

NCScriptResult nc_check_script(const NCFlags& f, const NCExpr& lhs, const NCExpr& rhs,
                               const NCScript& script) {
  NCScriptResult out;
  NCExpr cur = nc_sub(lhs, rhs);
  out.audit.push_back("goal residual: " + cur.str());
  auto degreeAudit = [&](const NCExpr& e) {
    auto fd = nc_form_degree(e);
    auto gh = nc_ghost(e);
    if (!cur.isZero() && (!fd || !gh))
      out.audit.push_back("warning: intermediate lost (form, ghost) homogeneity");
  };
  degreeAudit(cur);
  for (const auto& st : script.steps) {
    try {
      cur = nc_apply_rule(f, cur, st.rule, st.term, st.pos);
    } catch (const Error& e) {
      // a step that fails to match stalls the script
      out.audit.push_back(std::string(nc_rule_name(st.rule)) + " @ (" + std::to_string(st.term) +
                          "," + std::to_string(st.pos) + ") does not apply: " + e.what());
      out.pass = false;
      out.residual = cur;
      return out;
    }
    out.audit.push_back(std::string(nc_rule_name(st.rule)) + " @ (" + std::to_string(st.term) +
                        "," + std::to_string(st.pos) + ") -> " + cur.str());
    degreeAudit(cur);
  }
  out.pass = cur.isZero();
  out.residual = cur;
  return out;
}

// --------------------------------------------------------------------------
// Built-in Yang-Mills theories and package
// --------------------------------------------------------------------------

namespace {

struct YB {
  NCFlags f;
  NCExpr L(NCBase b, std::vector<NCDecor> d = {}) const { return nc_letter(f, NCLetter{b, std::move(d)}); }
  NCExpr dl(NCBase b) const { return L(b, {NCDecor::Delta}); }
  NCExpr st(NCBase b) const { return L(b, {NCDecor::Star}); }
  NCExpr dA(NCBase b) const { return L(b, {NCDecor::DA}); }
  NCExpr mul(const NCExpr& a, const NCExpr& b) const { return nc_mul(f, a, b); }
  template <typename... Ts>
  NCExpr mul(const NCExpr& a, const NCExpr& b, const NCExpr& c, Ts... r) const {
    return mul(mul(a, b), c, r...);
  }
  NCExpr br(const NCExpr& a, const NCExpr& b) const { return nc_bracket(f, a, b); }
  NCExpr tr(const NCExpr& a) const { return nc_tr(f, a); }
  Rat eps() const { return Rat(f.epsS); }
};

NCTheoryData ym1_data(const NCFlags& f) {
  YB y{f};
  NCTheoryData d;
  d.flags = f;
  d.bases = {NCBase::A, NCBase::c, NCBase::B, NCBase::Adag, NCBase::Bdag, NCBase::cdag};
  NCVf Q;
  Q.ghShift = 1;
  Q.action[NCBase::A] = y.dA(NCBase::c);
  Q.action[NCBase::B] = y.br(y.L(NCBase::c), y.L(NCBase::B));
  Q.action[NCBase::c] = nc_scale(y.br(y.L(NCBase::c), y.L(NCBase::c)), rat(1, 2));
  Q.action[NCBase::Adag] =
      nc_add(y.dA(NCBase::B), y.br(y.L(NCBase::c), y.L(NCBase::Adag)));
  Q.action[NCBase::Bdag] =
      nc_add(nc_sub(y.L(NCBase::F), nc_scale(y.st(NCBase::B), y.eps())),
             y.br(y.L(NCBase::c), y.L(NCBase::Bdag)));
  Q.action[NCBase::cdag] =
      nc_add(nc_add(y.dA(NCBase::Adag), y.br(y.L(NCBase::c), y.L(NCBase::cdag))),
             y.br(y.L(NCBase::Bdag), y.L(NCBase::B)));
  Q.action[NCBase::F] = y.br(y.L(NCBase::c), y.L(NCBase::F));
  d.Q = Q;
  d.theta = {y.tr(nc_add(nc_add(y.mul(y.L(NCBase::Adag), y.dl(NCBase::A)),
                                y.mul(y.L(NCBase::Bdag), y.dl(NCBase::B))),
                         y.mul(y.L(NCBase::cdag), y.dl(NCBase::c)))),
             y.tr(nc_add(y.mul(y.L(NCBase::B), y.dl(NCBase::A)),
                         y.mul(y.L(NCBase::Adag), y.dl(NCBase::c)))),
             y.tr(y.mul(y.L(NCBase::B), y.dl(NCBase::c)))};
  NCExpr L0 = y.mul(y.L(NCBase::B), y.L(NCBase::F));
  L0 = nc_sub(L0, nc_scale(y.mul(y.L(NCBase::B), y.st(NCBase::B)), y.eps() * rat(1, 2)));
  L0 = nc_add(L0, y.mul(y.L(NCBase::Adag), y.dA(NCBase::c)));
  L0 = nc_add(L0, y.mul(y.L(NCBase::Bdag), y.br(y.L(NCBase::c), y.L(NCBase::B))));
  L0 = nc_add(L0, nc_scale(y.mul(y.L(NCBase::cdag), y.br(y.L(NCBase::c), y.L(NCBase::c))),
                           rat(1, 2)));
  NCExpr L1 = nc_add(y.mul(y.L(NCBase::B), y.dA(NCBase::c)),
                     nc_scale(y.mul(y.L(NCBase::Adag), y.br(y.L(NCBase::c), y.L(NCBase::c))),
                              rat(1, 2)));
  NCExpr L2 = nc_scale(y.mul(y.L(NCBase::B), y.br(y.L(NCBase::c), y.L(NCBase::c))), rat(1, 2));
  d.L = {y.tr(L0), y.tr(L1), y.tr(L2)};
  return d;
}

NCTheoryData ym2_data(const NCFlags& f) {
  YB y{f};
  NCTheoryData d;
  d.flags = f;
  d.bases = {NCBase::A, NCBase::c, NCBase::Adag, NCBase::cdag};
  NCVf Q;
  Q.ghShift = 1;
  Q.action[NCBase::A] = y.dA(NCBase::c);
  Q.action[NCBase::c] = nc_scale(y.br(y.L(NCBase::c), y.L(NCBase::c)), rat(1, 2));
  Q.action[NCBase::Adag] =
      nc_add(y.L(NCBase::F, {NCDecor::Star, NCDecor::DA}),
             y.br(y.L(NCBase::c), y.L(NCBase::Adag)));
  Q.action[NCBase::cdag] =
      nc_add(y.dA(NCBase::Adag), y.br(y.L(NCBase::c), y.L(NCBase::cdag)));
  Q.action[NCBase::F] = y.br(y.L(NCBase::c), y.L(NCBase::F));
  d.Q = Q;
  d.theta = {y.tr(nc_add(y.mul(y.L(NCBase::Adag), y.dl(NCBase::A)),
                         y.mul(y.L(NCBase::cdag), y.dl(NCBase::c)))),
             y.tr(nc_add(y.mul(y.dl(NCBase::A), y.st(NCBase::F)),
                         y.mul(y.L(NCBase::Adag), y.dl(NCBase::c)))),
             y.tr(y.mul(y.st(NCBase::F), y.dl(NCBase::c)))};
  NCExpr L0 = nc_scale(y.mul(y.L(NCBase::F), y.st(NCBase::F)), rat(1, 2));
  L0 = nc_add(L0, y.mul(y.L(NCBase::Adag), y.dA(NCBase::c)));
  L0 = nc_add(L0, nc_scale(y.mul(y.L(NCBase::cdag), y.br(y.L(NCBase::c), y.L(NCBase::c))),
                           rat(1, 2)));
  NCExpr L1 = nc_add(y.mul(y.st(NCBase::F), y.dA(NCBase::c)),
                     nc_scale(y.mul(y.L(NCBase::Adag), y.br(y.L(NCBase::c), y.L(NCBase::c))),
                              rat(1, 2)));
  NCExpr L2 = nc_scale(y.mul(y.st(NCBase::F), y.br(y.L(NCBase::c), y.L(NCBase::c))), rat(1, 2));
  d.L = {y.tr(L0), y.tr(L1), y.tr(L2)};
  return d;
}

NCPackageData ym_pack_data(const NCFlags& f) {
  YB y{f};
  NCPackageData p;
  p.flags = f;
  // phi*: Omega(1YM) -> Omega(2YM)
  p.phiStar.images[NCBase::A] = y.L(NCBase::A);
  p.phiStar.images[NCBase::c] = y.L(NCBase::c);
  p.phiStar.images[NCBase::B] = y.st(NCBase::F);
  p.phiStar.images[NCBase::Adag] = y.L(NCBase::Adag);
  p.phiStar.images[NCBase::Bdag] = nc_zero();
  p.phiStar.images[NCBase::cdag] = y.L(NCBase::cdag);
  p.phiStar.images[NCBase::F] = y.L(NCBase::F);
  // psi*: Omega(2YM) -> Omega(1YM)
  p.psiStar.images[NCBase::A] = y.L(NCBase::A);
  p.psiStar.images[NCBase::c] = y.L(NCBase::c);
  p.psiStar.images[NCBase::Adag] =
      nc_sub(y.L(NCBase::Adag), y.L(NCBase::Bdag, {NCDecor::Star, NCDecor::DA}));
  p.psiStar.images[NCBase::cdag] =
      nc_sub(y.L(NCBase::cdag),
             nc_scale(y.br(y.L(NCBase::Bdag), y.st(NCBase::Bdag)), rat(1, 2)));
  p.psiStar.images[NCBase::F] = y.L(NCBase::F);

  p.beta1 = {y.tr(nc_scale(y.mul(y.L(NCBase::Bdag), y.L(NCBase::Bdag, {NCDecor::Delta, NCDecor::Star})),
                           rat(1, 2))),
             y.tr(y.mul(y.st(NCBase::Bdag), y.dl(NCBase::A))),
             y.tr(y.mul(y.st(NCBase::Bdag), y.dl(NCBase::c)))};
  p.f1 = {y.tr(nc_scale(y.mul(y.L(NCBase::Bdag), nc_sub(y.L(NCBase::B), y.st(NCBase::F))),
                        rat(1, 2))),
          nc_zero(true), nc_zero(true)};

  p.R.ghShift = -1;
  p.R.action[NCBase::B] = y.st(NCBase::Bdag);

  // flow
  p.chiS.images[NCBase::A] = y.L(NCBase::A);
  p.chiS.images[NCBase::c] = y.L(NCBase::c);
  p.chiS.images[NCBase::F] = y.L(NCBase::F);
  p.chiS.images[NCBase::B] =
      nc_add(nc_scale(y.L(NCBase::B), UPoly::u()),
             nc_scale(y.st(NCBase::F), UPoly::constant(1) + UPoly::u() * Rat(-1)));
  p.chiS.images[NCBase::Bdag] = nc_scale(y.L(NCBase::Bdag), UPoly::u());
  p.chiS.images[NCBase::Adag] =
      nc_add(y.L(NCBase::Adag),
             nc_scale(y.L(NCBase::Bdag, {NCDecor::Star, NCDecor::DA}),
                      UPoly::u() + UPoly::constant(-1)));
  {
    UPoly half = UPoly::u(2) * rat(1, 2) + UPoly::constant(rat(-1, 2));
    p.chiS.images[NCBase::cdag] =
        nc_add(y.L(NCBase::cdag),
               nc_scale(y.br(y.L(NCBase::Bdag), y.st(NCBase::Bdag)), half));
  }
  p.chiStarExpected[NCBase::A] = y.L(NCBase::A);
  p.chiStarExpected[NCBase::c] = y.L(NCBase::c);
  p.chiStarExpected[NCBase::B] = y.st(NCBase::F);
  p.chiStarExpected[NCBase::Bdag] = nc_zero();
  p.chiStarExpected[NCBase::Adag] = p.psiStar.images[NCBase::Adag];
  p.chiStarExpected[NCBase::cdag] = p.psiStar.images[NCBase::cdag];
  p.hchi[NCBase::B] = y.st(NCBase::Bdag);
  p.antideriv[NCBase::B] = nc_scale(y.st(NCBase::Bdag), UPoly::u() * Rat(-1));

  p.classicalSolution.images[NCBase::A] = y.L(NCBase::A);
  p.classicalSolution.images[NCBase::c] = y.L(NCBase::c);
  p.classicalSolution.images[NCBase::F] = y.L(NCBase::F);
  p.classicalSolution.images[NCBase::B] = y.st(NCBase::F);
  p.classicalSolution.images[NCBase::Adag] = y.L(NCBase::Adag);
  p.classicalSolution.images[NCBase::Bdag] = y.L(NCBase::Bdag);
  p.classicalSolution.images[NCBase::cdag] = y.L(NCBase::cdag);
  p.wrongSolution = p.classicalSolution;
  p.wrongSolution.images[NCBase::B] = nc_scale(y.st(NCBase::F), Rat(2));
  p.classicalL1 = y.tr(nc_sub(y.mul(y.L(NCBase::B), y.L(NCBase::F)),
                              nc_scale(y.mul(y.L(NCBase::B), y.st(NCBase::B)),
                                       y.eps() * rat(1, 2))));
  p.classicalL2 = y.tr(nc_scale(y.mul(y.L(NCBase::F), y.st(NCBase::F)), rat(1, 2)));
  return p;
}

} // namespace

std::shared_ptr<NCTheory> nc_builtin_theory(int order) {
  auto t = std::make_shared<NCTheory>();
  t->order = order;
  t->name = order == 1 ? "ym1" : "ym2";
  for (int i = 0; i < 4; ++i)
    t->byFlags[size_t(i)] = order == 1 ? ym1_data(NCFlags::fromCombo(i)) : ym2_data(NCFlags::fromCombo(i));
  return t;
}

std::shared_ptr<NCPackage> nc_builtin_package() {
  auto p = std::make_shared<NCPackage>();
  p->name = "ym";
  p->t1 = nc_builtin_theory(1);
  p->t2 = nc_builtin_theory(2);
  for (int i = 0; i < 4; ++i) p->byFlags[size_t(i)] = ym_pack_data(NCFlags::fromCombo(i));
  return p;
}

} // namespace laxcheck
