#pragma once

// The audit suite: every identity and explicit-constant inequality checked on
// one instance, collected into a deterministic JSON report.

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mmt/channel.hpp"
#include "mmt/instance.hpp"
#include "mmt/rate_distortion.hpp"

namespace mmt {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kReportSchema = "mmt-lab/1";

enum class CheckStatus { Pass, Fail, ReportOnly };

std::string_view to_string(CheckStatus status);

struct CheckRecord {
  std::string check_id;
  CheckStatus status = CheckStatus::Fail;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  Seed seed = 0;
  /// Human-readable statement of the pass condition.
  std::string rule;
  /// Set when the check threw; the check is then a failure.
  std::string error;
  /// Extra named quantities (ratios, per-part values).
  std::map<std::string, double> details;
  /// Wall time; kept out of the report so reports stay byte-identical.
  double runtime_ms = 0.0;
};

struct AuditBudget {
  /// Monte Carlo samples per curve point and for the width.
  std::size_t samples = 200'000;
  std::size_t grid_points = kDefaultGridPoints;
  double rd_tol = kDefaultCouplingTol;
  /// Random Dirichlet priors tried by the rate-integral check, besides uniform.
  std::size_t dirichlet_priors = 4;
  std::size_t nishimori_points = 20;
  /// Least-favorable searches behind the report-only sandwich ratios.
  std::size_t search_restarts = 2;
  std::size_t search_iterations = 6;
  std::size_t search_samples = 1000;
};

/// All checks run_audit knows, in report order.
const std::vector<std::string>& audit_check_ids();

struct AuditReport {
  std::string instance_name;
  Seed seed = 0;
  std::string config_hash;
  std::vector<CheckRecord> checks;

  bool any_failed() const;
};

/// Runs the enabled checks (all of them when `checks` is empty). Errors inside
/// a check are recorded on that check and never abort the suite. Throws
/// BadParams for unknown check ids or an invalid instance.
AuditReport run_audit(const Instance& inst, const std::set<std::string>& checks, const AuditBudget& budget);

/// Hex FNV-1a of the instance JSON, the budget, the check set and the version.
std::string config_hash(const Instance& inst, const std::set<std::string>& checks, const AuditBudget& budget);

/// Deterministic JSON (sorted keys, no timings).
std::string report_to_json(const AuditReport& report);
/// Wall times of every check, written next to the report.
std::string timings_to_json(const AuditReport& report);

/// Stores the report under `root / config_hash`. Never overwrites: the first
/// run writes report.json, later runs report-1.json, report-2.json, ...
/// Returns the path of the report written. IoError on failure.
std::filesystem::path write_report(const AuditReport& report, const std::filesystem::path& root);

}  // namespace mmt
