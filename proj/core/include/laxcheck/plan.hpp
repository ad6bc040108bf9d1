#pragma once

#include "laxcheck/dsl.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace laxcheck {

struct RunOptions {
  int jobs = 1;
  uint64_t seed = 0;
  int oracleTrials = 0; // 0 disables the numeric cross-check
  DtSign dtSign = DtSign::Koszul;
  bool timings = false;
  std::string dataDir; // where script files referenced by plans live
};

struct ReportDocument {
  std::string schemaVersion = "1";
  RunOptions options;
  std::vector<CheckReport> checks;
  int passed = 0, failed = 0, skipped = 0;

  bool allPass() const { return failed == 0; }
};

/// Executes the plan (parallel up to jobs); the document is deterministic
/// for fixed inputs, flags and seed, independent of the job count.
ReportDocument run_plan(const Plan& plan, const RunOptions& opts);

enum class ReportFormat { Json, Text };
std::string emit_report(const ReportDocument& doc, ReportFormat format);

/// Convenience: the full built-in verification plan (all theories, all
/// packages, the kernel computations).
Plan builtin_full_plan();

} // namespace laxcheck
