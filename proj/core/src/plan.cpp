#include "laxcheck/plan.hpp"

#include "json.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace laxcheck {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::UnresolvedReference, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool isBuiltinTheory(const std::string& name) {
  for (const auto& n : builtin_theory_names())
    if (n == name) return true;
  return false;
}

bool isBuiltinPackage(const std::string& name) {
  for (const auto& n : builtin_package_names())
    if (n == name) return true;
  return false;
}

Theory resolveTheory(const std::string& ref, const RunOptions& opts) {
  if (ref.empty()) fail(Errc::UnresolvedReference, "check needs a theory");
  if (isBuiltinTheory(ref)) {
    TheoryOptions topt;
    topt.dtSign = opts.dtSign;
    return builtin_theory(ref, topt);
  }
  if (ref.find('.') != std::string::npos || ref.find('/') != std::string::npos)
    return parse_theory(slurp(ref));
  fail(Errc::UnresolvedReference, "unknown theory " + ref);
}

EquivalencePackage resolvePackage(const std::string& ref, const RunOptions& opts) {
  if (ref.empty()) fail(Errc::UnresolvedReference, "check needs a package");
  if (isBuiltinPackage(ref)) {
    TheoryOptions topt;
    topt.dtSign = opts.dtSign;
    return builtin_package(ref, topt);
  }
  fail(Errc::UnresolvedReference, "unknown package " + ref);
}

// Expand suites into concrete checks.
std::vector<PlanItem> expandItem(const PlanItem& item) {
  std::vector<PlanItem> out;
  auto push = [&](const std::string& check, const std::string& th, const std::string& pk,
                  const std::string& dir = "", const std::string& pre = "") {
    PlanItem x;
    x.check = check;
    x.theory = th;
    x.package = pk;
    x.direction = dir;
    x.preMorphism = pre;
    out.push_back(std::move(x));
  };
  if (item.check == "suite-lax") {
    for (const char* c : {"lax-axioms", "codim-L", "descent", "q-decomposition", "f-transform"})
      push(c, item.theory, "");
    return out;
  }
  if (item.check == "suite-equivalence" || item.check == "suite-all") {
    if (!item.package.empty()) {
      push("chain-map", "", item.package, "phi");
      push("chain-map", "", item.package, "psi");
      push("transform", "", item.package, "phi");
      push("transform", "", item.package, "psi");
      // classical reduction only where the pair ships the data
      bool hasClassical = true;
      if (isBuiltinPackage(item.package)) {
        EquivalencePackage p = builtin_package(item.package);
        if (p.coord && !p.coord->classical) hasClassical = false;
      }
      if (hasClassical) push("classical-reduction", "", item.package);
      push("commutator-D", "", item.package);
      push("flow", "", item.package);
      push("h-chi", "", item.package);
      push("composition", "", item.package);
      return out;
    }
    if (item.check == "suite-all" && !item.theory.empty()) {
      for (const char* c : {"lax-axioms", "codim-L", "descent", "q-decomposition", "f-transform"})
        push(c, item.theory, "");
      return out;
    }
    fail(Errc::UnresolvedReference, "suite needs :theory or :package");
  }
  if (item.check == "suite-kernel") {
    push("kernel", "gr1d", "");
    push("kernel", "jacobi", "");
    push("kernel", "gr1d", "", "", "chi");
    return out;
  }
  out.push_back(item);
  return out;
}

CheckOutcome runItem(const PlanItem& item, const RunOptions& opts) {
  if (item.check == "lax-axioms") return check_lax_axioms(resolveTheory(item.theory, opts));
  if (item.check == "codim-L") return compute_codim_L(resolveTheory(item.theory, opts), item.codim);
  if (item.check == "descent") return check_descent(resolveTheory(item.theory, opts));
  if (item.check == "q-decomposition") return check_Q_decomposition(resolveTheory(item.theory, opts));
  if (item.check == "f-transform") return check_f_transform(resolveTheory(item.theory, opts));
  if (item.check == "chain-map" || item.check == "transform") {
    EquivalencePackage p = resolvePackage(item.package, opts);
    Direction d = item.direction == "psi" ? Direction::Psi : Direction::Phi;
    if (item.direction.empty() || item.direction == "both") {
      CheckOutcome a = item.check == "chain-map" ? check_chain_map(p, Direction::Phi)
                                                 : check_transform(p, Direction::Phi);
      CheckOutcome b = item.check == "chain-map" ? check_chain_map(p, Direction::Psi)
                                                 : check_transform(p, Direction::Psi);
      if (b.report.status == CheckStatus::Fail) return b;
      return a;
    }
    return item.check == "chain-map" ? check_chain_map(p, d) : check_transform(p, d);
  }
  if (item.check == "classical-reduction") return check_classical_reduction(resolvePackage(item.package, opts));
  if (item.check == "commutator-D") return check_commutator_D(resolvePackage(item.package, opts));
  if (item.check == "flow") return check_flow(resolvePackage(item.package, opts));
  if (item.check == "h-chi") return check_hchi(resolvePackage(item.package, opts));
  if (item.check == "composition") return check_composition(resolvePackage(item.package, opts));
  if (item.check == "kernel") {
    Theory t = resolveTheory(item.theory, opts);
    if (item.preMorphism.empty())
      return preboundary_kernel_check(t, nullptr, t.name != "jacobi");
    if (item.preMorphism != "chi")
      fail(Errc::UnresolvedReference, "unknown pre-morphism " + item.preMorphism);
    EquivalencePackage pk = builtin_package("jac-gr");
    Theory gr;
    gr.name = t.name;
    gr.coord = pk.coord->t1;
    Morphism chi = compose_morphisms(pk.coord->phiStar, pk.coord->psiStar);
    return preboundary_kernel_check(gr, &chi, false);
  }
  if (item.check == "script") {
    CheckOutcome out;
    out.report.id = "script/" + item.scriptFile;
    std::string path = item.scriptFile;
    std::ifstream probe(path);
    if (!probe && !opts.dataDir.empty()) path = opts.dataDir + "/" + item.scriptFile;
    auto scripts = parse_scripts(slurp(path));
    for (const auto& ps : scripts) {
      if (!ps.hasGoal) {
        out.report.notes.push_back(ps.id + ": no goal");
        continue;
      }
      for (int combo = 0; combo < 4; ++combo) {
        NCFlags f = NCFlags::fromCombo(combo);
        NCExpr lhs = eval_nc_expr(f, ps.lhsForm);
        NCExpr rhs = eval_nc_expr(f, ps.rhsForm);
        NCScript steps = ps.stepsFor(f);
        NCScriptResult r;
        try {
          r = nc_check_script(f, lhs, rhs, steps);
        } catch (const Error& e) {
          r.pass = false;
          r.audit.push_back(e.what());
        }
        std::string flagStr = std::string("[d-parity=") + (f.dOdd ? "odd" : "even") +
                              ",epsilon-s=" + (f.epsS > 0 ? "+1" : "-1") + "]";
        if (!r.pass) {
          out.report.status = CheckStatus::Fail;
          out.report.residual = "ScriptStalls: " + r.residual.str();
          out.report.notes.push_back(ps.id + flagStr + ": stalls with residual " + r.residual.str());
        } else {
          out.report.notes.push_back(ps.id + flagStr + ": replays to PASS (" +
                                     std::to_string(steps.steps.size()) + " steps)");
        }
      }
    }
    return out;
  }
  fail(Errc::UnknownCheck, item.check);
}

} // namespace

ReportDocument run_plan(const Plan& plan, const RunOptions& opts) {
  std::vector<PlanItem> items;
  for (const auto& it : plan.items)
    for (auto& x : expandItem(it)) items.push_back(std::move(x));

  std::vector<CheckOutcome> outcomes(items.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= items.size()) break;
      try {
        outcomes[i] = runItem(items[i], opts);
      } catch (const Error& e) {
        outcomes[i].report.id = items[i].check;
        outcomes[i].report.status = CheckStatus::Fail;
        outcomes[i].report.residual = e.what();
      }
    }
  };
  int jobs = std::max(1, opts.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ReportDocument doc;
  doc.options = opts;
  uint64_t oracleSalt = 0;
  for (auto& o : outcomes) {
    // optional numeric cross-check of every coordinate identity
    if (opts.oracleTrials > 0 && o.report.status == CheckStatus::Pass) {
      for (const auto& ident : o.identities) {
        OracleReport r = numeric_oracle(ident, opts.oracleTrials, opts.seed + oracleSalt++);
        if (!r.pass) {
          o.report.status = CheckStatus::Fail;
          o.report.residual = "oracle disagreement on " + ident.id + ": " + r.note;
          break;
        }
      }
      if (o.report.status == CheckStatus::Pass && !o.identities.empty())
        o.report.notes.push_back("numeric oracle agrees on " + std::to_string(o.identities.size()) +
                                 " identities");
    }
    switch (o.report.status) {
      case CheckStatus::Pass: ++doc.passed; break;
      case CheckStatus::Fail: ++doc.failed; break;
      case CheckStatus::Skip: ++doc.skipped; break;
    }
    doc.checks.push_back(std::move(o.report));
  }
  return doc;
}

std::string emit_report(const ReportDocument& doc, ReportFormat format) {
  if (format == ReportFormat::Json) {
    nlohmann::ordered_json j;
    j["schema_version"] = doc.schemaVersion;
    j["run"]["seed"] = doc.options.seed;
    j["run"]["dt_sign"] = doc.options.dtSign == DtSign::Koszul ? "koszul" : "central";
    j["run"]["oracle_trials"] = doc.options.oracleTrials;
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : doc.checks) {
      nlohmann::ordered_json jc;
      jc["id"] = c.id;
      jc["status"] = check_status_name(c.status);
      if (!c.residual.empty()) jc["residual"] = c.residual;
      if (!c.flags.empty()) jc["flags"] = c.flags;
      if (!c.notes.empty()) jc["notes"] = c.notes;
      if (doc.options.timings) jc["elapsed_ms"] = c.elapsedMs;
      checks.push_back(std::move(jc));
    }
    j["checks"] = std::move(checks);
    j["summary"]["pass"] = doc.passed;
    j["summary"]["fail"] = doc.failed;
    j["summary"]["skip"] = doc.skipped;
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  for (const auto& c : doc.checks) {
    os << check_status_name(c.status) << "  " << c.id;
    if (doc.options.timings) os << "  (" << c.elapsedMs << " ms)";
    os << "\n";
    if (c.status == CheckStatus::Fail && !c.residual.empty())
      os << "      residual: " << c.residual << "\n";
    for (const auto& n : c.notes)
      if (c.status != CheckStatus::Pass) os << "      " << n << "\n";
  }
  os << doc.passed << " passed, " << doc.failed << " failed, " << doc.skipped << " skipped\n";
  return os.str();
}

Plan builtin_full_plan() {
  Plan plan;
  for (const auto& name : builtin_theory_names()) {
    PlanItem it;
    it.check = "suite-lax";
    it.theory = name;
    plan.items.push_back(it);
  }
  for (const auto& name : builtin_package_names()) {
    PlanItem it;
    it.check = "suite-equivalence";
    it.package = name;
    plan.items.push_back(it);
  }
  PlanItem k;
  k.check = "suite-kernel";
  plan.items.push_back(k);
  return plan;
}

} // namespace laxcheck
