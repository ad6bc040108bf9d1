#include "laxcheck/checks.hpp"

#include <random>

namespace laxcheck {

namespace {

// Exact arithmetic in Q adjoined with formal square roots of sampled
// rationals: a free rank-2^k algebra with basis indexed by radical subsets.
struct Tower {
  std::vector<Rat> radicands;
  using Elt = std::map<uint32_t, Rat>;

  static Elt constant(const Rat& r) {
    Elt e;
    if (r != 0) e[0] = r;
    return e;
  }
  Elt basis(size_t i) const {
    Elt e;
    e[uint32_t(1) << i] = 1;
    return e;
  }
  static void addTo(Elt& a, uint32_t m, const Rat& c) {
    if (c == 0) return;
    auto [it, ins] = a.try_emplace(m, c);
    if (!ins) {
      it->second += c;
      if (it->second == 0) a.erase(it);
    }
  }
  Elt add(const Elt& a, const Elt& b) const {
    Elt r = a;
    for (auto& [m, c] : b) addTo(r, m, c);
    return r;
  }
  Elt mul(const Elt& a, const Elt& b) const {
    Elt r;
    for (auto& [m1, c1] : a)
      for (auto& [m2, c2] : b) {
        uint32_t common = m1 & m2;
        Rat c = c1 * c2;
        for (size_t i = 0; i < radicands.size(); ++i)
          if (common & (uint32_t(1) << i)) c *= radicands[i];
        addTo(r, m1 ^ m2, c);
      }
    return r;
  }
  Elt scale(const Elt& a, const Rat& s) const {
    Elt r;
    if (s == 0) return r;
    for (auto& [m, c] : a) r[m] = c * s;
    return r;
  }
  // Inversion by iterated conjugation over the top radical.
  std::optional<Elt> inverse(const Elt& a, size_t level) const {
    if (a.empty()) return std::nullopt;
    if (level == 0) {
      auto it = a.find(0);
      if (it == a.end() || a.size() != 1) return std::nullopt;
      return constant(Rat(1) / it->second);
    }
    uint32_t bit = uint32_t(1) << (level - 1);
    Elt lo, hi;
    for (auto& [m, c] : a) {
      if (m & bit)
        hi[m ^ bit] = c;
      else
        lo[m] = c;
    }
    if (hi.empty()) return inverse(lo, level - 1);
    // a = lo + hi r ; a^-1 = (lo - hi r) / (lo^2 - hi^2 R)
    Elt norm = add(mul(lo, lo), scale(mul(hi, hi), -radicands[level - 1]));
    auto ninv = inverse(norm, level - 1);
    if (!ninv) return std::nullopt;
    Elt conj = lo;
    for (auto& [m, c] : hi) addTo(conj, m | bit, -c);
    return mul(conj, *ninv);
  }
  std::optional<Elt> inverse(const Elt& a) const { return inverse(a, radicands.size()); }
};

struct Poly {
  std::vector<Rat> c; // coefficients, c[i] t^i
  Poly derivative() const {
    Poly d;
    for (size_t i = 1; i < c.size(); ++i) d.c.push_back(c[i] * Rat(int64_t(i)));
    return d;
  }
  Rat eval(const Rat& t) const {
    Rat v = 0;
    for (size_t i = c.size(); i-- > 0;) v = v * t + c[i];
    return v;
  }
};

struct Sampler {
  std::mt19937_64 rng;
  explicit Sampler(uint64_t seed) : rng(seed) {}
  Rat smallRat(int lo = -5, int hi = 5) {
    std::uniform_int_distribution<int> num(lo, hi), den(1, 3);
    return Rat(num(rng), den(rng));
  }
  Rat nonzeroRat(int lo = 1, int hi = 6) {
    std::uniform_int_distribution<int> num(lo, hi), den(1, 3);
    return Rat(num(rng), den(rng));
  }
  Poly poly(int maxDeg = 5) {
    Poly p;
    std::uniform_int_distribution<int> deg(1, maxDeg);
    int d = deg(rng);
    for (int i = 0; i <= d; ++i) p.c.push_back(smallRat());
    if (p.c.back() == 0) p.c.back() = 1;
    return p;
  }
};

struct Evaluation {
  const Context& ctx;
  Tower tower;
  std::map<AtomId, Tower::Elt> values;   // numeric atoms
  std::map<AtomId, size_t> radicalIndex;

  bool isFormal(AtomId id) const {
    const AtomDecl& a = ctx.atom(id);
    if (a.kind == AtomKind::Dt || a.kind == AtomKind::Variation) return true;
    if (a.kind == AtomKind::Jet && ctx.field(a.field).gh != 0) return true;
    return false;
  }

  // throws Error(SampleRejected) on a non-invertible denominator
  Tower::Elt atomValue(AtomId id) {
    auto it = values.find(id);
    if (it != values.end()) return it->second;
    const AtomDecl& a = ctx.atom(id);
    Tower::Elt v;
    if (a.kind == AtomKind::DefScalar) {
      v = evalNumeric(ctx.expansion(id));
    } else if (a.kind == AtomKind::Radical) {
      v = tower.basis(radicalIndex.at(id));
    } else {
      fail(Errc::Internal, "no sampled value for " + a.name);
    }
    values[id] = v;
    return v;
  }

  Tower::Elt powValue(AtomId id, int e) {
    Tower::Elt base = atomValue(id);
    if (e < 0) {
      auto inv = tower.inverse(base);
      if (!inv) fail(Errc::SampleRejected, ctx.atom(id).name + " evaluates to a non-unit");
      base = *inv;
      e = -e;
    }
    Tower::Elt r = Tower::constant(1);
    for (int i = 0; i < e; ++i) r = tower.mul(r, base);
    return r;
  }

  Tower::Elt evalNumeric(const Expr& e) {
    Tower::Elt acc;
    for (const auto& [m, co] : e.terms()) {
      Tower::Elt t = Tower::constant(co);
      for (const auto& [id, ex] : m.even) t = tower.mul(t, powValue(id, ex));
      for (AtomId id : m.odd) t = tower.mul(t, powValue(id, 1));
      acc = tower.add(acc, t);
    }
    return acc;
  }

  // full evaluation: formal monomial -> tower element
  std::map<Monomial, Tower::Elt> evalFull(const Expr& e) {
    std::map<Monomial, Tower::Elt> out;
    for (const auto& [m, co] : e.terms()) {
      Monomial formal;
      Tower::Elt t = Tower::constant(co);
      for (const auto& [id, ex] : m.even) {
        if (isFormal(id))
          formal.even.push_back({id, ex});
        else
          t = tower.mul(t, powValue(id, ex));
      }
      for (AtomId id : m.odd) {
        if (isFormal(id))
          formal.odd.push_back(id);
        else
          t = tower.mul(t, powValue(id, 1));
      }
      auto [it, ins] = out.try_emplace(formal, t);
      if (!ins) it->second = tower.add(it->second, t);
    }
    for (auto it = out.begin(); it != out.end();) {
      if (it->second.empty())
        it = out.erase(it);
      else
        ++it;
    }
    return out;
  }
};

} // namespace

OracleReport numeric_oracle(const IdentityInstance& ident, int trials, uint64_t seed) {
  OracleReport rep;
  rep.trials = trials;
  const Context& c = *ident.ctx;
  Sampler s(seed);
  for (int trial = 0; trial < trials; ++trial) {
    bool done = false;
    for (int attempt = 0; attempt < 24 && !done; ++attempt) {
      Evaluation ev{c};
      // sample gh-0 fields as polynomials in t, evaluated at a random point
      Rat t0 = s.smallRat(-4, 4);
      std::map<std::string, Poly> funcPolys;
      for (FieldId f = 0; f < c.fields().size(); ++f) {
        const FieldDecl& fd = c.field(f);
        if (fd.gh != 0) continue;
        for (int comp = 0; comp < fd.ncomp; ++comp) {
          Poly p = s.poly();
          if (fd.invertible && p.eval(t0) == 0) p.c[0] += 1;
          Poly cur = p;
          for (int k = 0; k <= c.maxJet(); ++k) {
            ev.values[c.jet(f, k, comp)] = Tower::constant(cur.eval(t0));
            cur = cur.derivative();
          }
        }
      }
      // background functions: random polynomials in their argument
      for (size_t id = 0; id < c.atomCount(); ++id) {
        const AtomDecl& a = c.atom(AtomId(id));
        if (a.kind != AtomKind::FuncDeriv || a.derivOrder != 0) continue;
        Poly G = s.poly(4);
        Rat qv = 0;
        {
          auto jv = ev.values.find(c.jet(a.field, 0, 0));
          if (jv != ev.values.end() && jv->second.count(0)) qv = jv->second.at(0);
        }
        std::string base = a.name;
        Poly cur = G;
        for (int k = 0; k <= c.maxJet(); ++k) {
          Rat gv = cur.eval(qv);
          if (k == 0 && a.invertible && gv == 0) gv = 1;
          ev.values[c.funcDeriv(base, k)] = Tower::constant(gv);
          cur = cur.derivative();
        }
      }
      for (size_t id = 0; id < c.atomCount(); ++id) {
        const AtomDecl& a = c.atom(AtomId(id));
        if (a.kind == AtomKind::Constant) ev.values[AtomId(id)] = Tower::constant(s.nonzeroRat());
        if (a.kind == AtomKind::FlowParam) {
          std::uniform_int_distribution<int> num(1, 4);
          ev.values[AtomId(id)] = Tower::constant(Rat(num(s.rng), 5));
        }
      }
      // radicals: register tower radicands in declaration order
      try {
        for (size_t id = 0; id < c.atomCount(); ++id) {
          const AtomDecl& a = c.atom(AtomId(id));
          if (a.kind != AtomKind::Radical) continue;
          AtomId base = a.baseAtom;
          Tower::Elt bv;
          if (c.atom(base).kind == AtomKind::DefScalar)
            bv = ev.evalNumeric(c.expansion(base));
          else
            bv = ev.atomValue(base) /* jets/constants already sampled */;
          if (bv.size() > 1 || (bv.size() == 1 && bv.begin()->first != 0))
            fail(Errc::Internal, "radicand is not rational at the sample");
          Rat rv = bv.empty() ? Rat(0) : bv.begin()->second;
          if (rv == 0) fail(Errc::SampleRejected, "radicand vanishes");
          ev.radicalIndex[AtomId(id)] = ev.tower.radicands.size();
          ev.tower.radicands.push_back(rv);
        }
        auto L = ev.evalFull(ident.lhs);
        auto R = ev.evalFull(ident.rhs);
        // compare
        bool equal = true;
        for (auto& [k, v] : R) {
          auto it = L.find(k);
          if (it == L.end()) {
            if (!v.empty()) equal = false;
            continue;
          }
          Tower::Elt d = ev.tower.add(it->second, ev.tower.scale(v, -1));
          if (!d.empty()) equal = false;
        }
        for (auto& [k, v] : L)
          if (!R.count(k) && !v.empty()) equal = false;
        if (!equal) {
          rep.pass = false;
          rep.note = "disagreement at sample " + std::to_string(trial);
          return rep;
        }
        done = true;
      } catch (const Error& e) {
        if (e.code() == Errc::SampleRejected) {
          ++rep.rejected;
          continue; // resample
        }
        throw;
      }
    }
    if (!done) {
      rep.pass = false;
      rep.note = "SampleRejected: could not satisfy invertibility after bounded retries";
      return rep;
    }
  }
  rep.pass = true;
  return rep;
}

} // namespace laxcheck
