#include "CLI11.hpp"
#include "laxcheck/plan.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace laxcheck;

namespace {

int toExit(const ReportDocument& doc) { return doc.allPass() ? 0 : 1; }

RunOptions makeOptions(int jobs, uint64_t seed, int oracleTrials, const std::string& dtSign,
                       bool timings, const std::string& dataDir) {
  RunOptions opts;
  opts.jobs = jobs;
  opts.seed = seed;
  opts.oracleTrials = oracleTrials;
  opts.timings = timings;
  opts.dataDir = dataDir;
  if (dtSign == "central")
    opts.dtSign = DtSign::Central;
  else if (dtSign != "koszul")
    fail(Errc::SyntaxError, "--dt-sign must be koszul or central");
  return opts;
}

void emit(const ReportDocument& doc, const std::string& format, const std::string& outPath) {
  ReportFormat fmt = format == "text" ? ReportFormat::Text : ReportFormat::Json;
  std::string rendered = emit_report(doc, fmt);
  if (outPath.empty()) {
    std::cout << rendered;
  } else {
    std::ofstream out(outPath);
    out << rendered;
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::UnresolvedReference, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"laxcheck - exact verifier for lax BV-BFV field theory packages"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "list built-in theories and packages");

  auto* verify = app.add_subcommand("verify", "run verification suites");
  std::string theory, package, file, planFile;
  std::string suite = "all", format = "text", dtSign = "koszul", dParity = "both", epsS = "both";
  std::string outPath, dataDir;
  int jobs = 1, oracleTrials = 0;
  uint64_t seed = 0;
  bool timings = false;
  verify->add_option("--theory", theory, "built-in theory name");
  verify->add_option("--package", package, "built-in package name");
  verify->add_option("--file", file, "theory file (DSL)");
  verify->add_option("--plan", planFile, "plan file (DSL)");
  verify->add_option("--suite", suite, "all|lax|equivalence|kernel")->capture_default_str();
  verify->add_option("--jobs", jobs, "parallel workers")->capture_default_str();
  verify->add_option("--seed", seed, "seed for the numeric oracle")->capture_default_str();
  verify->add_option("--oracle-trials", oracleTrials,
                     "cross-check every identity at this many random points");
  verify->add_option("--format", format, "json|text")->capture_default_str();
  verify->add_option("--output", outPath, "write the report to a file");
  verify->add_option("--dt-sign", dtSign, "koszul|central")->capture_default_str();
  verify->add_option("--d-parity", dParity, "even|odd|both (informational; suites run both)")
      ->capture_default_str();
  verify->add_option("--epsilon-s", epsS, "+1|-1|both (informational; suites run both)")
      ->capture_default_str();
  verify->add_option("--data-dir", dataDir, "directory with script/plan data files");
  verify->add_flag("--timings", timings, "include per-check timings in the report");

  auto* kernel = app.add_subcommand("kernel", "pre-boundary kernel computation");
  std::string kTheory, kPre, kFormat = "text";
  kernel->add_option("--theory", kTheory, "theory name")->required();
  kernel->add_option("--pre-morphism", kPre, "apply a pre-morphism first (chi)");
  kernel->add_option("--format", kFormat, "json|text")->capture_default_str();

  auto* script = app.add_subcommand("script", "replay a proof-script file");
  std::string scriptFile;
  script->add_option("file", scriptFile, "script file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      std::cout << "theories:\n";
      for (const auto& n : builtin_theory_names()) std::cout << "  " << n << "\n";
      std::cout << "packages:\n";
      for (const auto& n : builtin_package_names()) std::cout << "  " << n << "\n";
      return 0;
    }
    if (verify->parsed()) {
      RunOptions opts = makeOptions(jobs, seed, oracleTrials, dtSign, timings, dataDir);
      Plan plan;
      if (!planFile.empty()) {
        plan = parse_plan(slurp(planFile));
      } else if (!file.empty()) {
        // external theory file: run the lax suite on it
        for (const char* c : {"lax-axioms", "codim-L", "descent", "q-decomposition", "f-transform"}) {
          PlanItem it;
          it.check = c;
          it.theory = file;
          plan.items.push_back(it);
        }
      } else if (!theory.empty()) {
        PlanItem it;
        it.check = suite == "lax" || suite == "all" ? "suite-lax" : "suite-" + suite;
        if (suite == "kernel") {
          it.check = "kernel";
        }
        it.theory = theory;
        plan.items.push_back(it);
      } else if (!package.empty()) {
        PlanItem it;
        it.check = suite == "equivalence" || suite == "all" ? "suite-equivalence" : "suite-" + suite;
        it.package = package;
        plan.items.push_back(it);
      } else if (suite == "all") {
        plan = builtin_full_plan();
      } else if (suite == "lax") {
        for (const auto& n : builtin_theory_names()) {
          PlanItem it;
          it.check = "suite-lax";
          it.theory = n;
          plan.items.push_back(it);
        }
      } else if (suite == "equivalence") {
        for (const auto& n : builtin_package_names()) {
          PlanItem it;
          it.check = "suite-equivalence";
          it.package = n;
          plan.items.push_back(it);
        }
      } else if (suite == "kernel") {
        PlanItem it;
        it.check = "suite-kernel";
        plan.items.push_back(it);
      } else {
        std::cerr << "nothing to verify\n";
        return 2;
      }
      ReportDocument doc = run_plan(plan, opts);
      emit(doc, format, outPath);
      return toExit(doc);
    }
    if (kernel->parsed()) {
      PlanItem it;
      it.check = "kernel";
      it.theory = kTheory;
      it.preMorphism = kPre;
      Plan plan;
      plan.items.push_back(it);
      RunOptions opts;
      ReportDocument doc = run_plan(plan, opts);
      // also print the detailed kernel report in text mode
      if (kFormat == "text") {
        Theory t = builtin_theory(kTheory);
        KernelReport rep;
        if (kPre == "chi") {
          EquivalencePackage pk = builtin_package("jac-gr");
          Theory gr;
          gr.name = kTheory;
          gr.coord = pk.coord->t1;
          Morphism chi = compose_morphisms(pk.coord->phiStar, pk.coord->psiStar);
          rep = preboundary_kernel(gr, &chi);
        } else {
          rep = preboundary_kernel(t);
        }
        std::cout << rep.theory << ": " << rep.summary << "\n";
        std::cout << "coordinates:";
        for (const auto& c : rep.coordinates) std::cout << " " << c;
        std::cout << "\n";
        for (const auto& p : rep.pivots)
          std::cout << "pair (" << p.row << ", " << p.col << ") pivot " << p.pivot << "\n";
        for (const auto& g : rep.kernel) {
          std::cout << (g.verified ? "kernel " : "blocked ") << g.direction;
          if (g.verified && !g.components.empty()) {
            std::cout << " =";
            for (const auto& [coord, coeff] : g.components)
              std::cout << " + (" << coeff << ") d/d" << coord;
          }
          std::cout << "\n";
        }
        for (const auto& d : rep.degeneracyConditions) std::cout << "degeneracy: " << d << "\n";
      } else {
        emit(doc, kFormat, "");
      }
      return toExit(doc);
    }
    if (script->parsed()) {
      PlanItem it;
      it.check = "script";
      it.scriptFile = scriptFile;
      Plan plan;
      plan.items.push_back(it);
      RunOptions opts;
      ReportDocument doc = run_plan(plan, opts);
      emit(doc, "text", "");
      return toExit(doc);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
