#pragma once

#include <string>
#include <vector>

#include "hypertune/strategies.hpp"

namespace hypertune::stats {

/// Linear-interpolation quantile: rank = q * (n - 1) over the sorted values.
/// q must be in [0, 1]; values must be non-empty.
double quantile(std::vector<double> values, double q);

struct SummaryStats {
  int count = 0;
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 when count == 1
};

SummaryStats summarize(const std::vector<double>& values);

enum class UTestMethod { Exact, NormalApprox };

struct UTestResult {
  double u_statistic = 0.0;  // U for the first sample, midranks under ties
  double p_two_sided = 1.0;
  UTestMethod method = UTestMethod::NormalApprox;
};

/// Two-sided Mann-Whitney U test. Uses exact enumeration of all
/// C(n+m, n) group assignments when n + m <= 16 and the pooled sample has
/// at most two tied groups; otherwise the normal approximation with
/// tie-corrected variance and a 0.5 continuity correction.
UTestResult mann_whitney_u(const std::vector<double>& a,
                           const std::vector<double>& b);

struct QuantileBand {
  std::vector<double> q25;
  std::vector<double> median;
  std::vector<double> q75;
};

/// Per-evaluation-index quartiles of best-seen curves across runs. All
/// curves must be non-empty and share one length.
QuantileBand iqr_trace(const std::vector<std::vector<double>>& best_seen);

/// Convenience overload over run traces.
QuantileBand iqr_trace(const std::vector<Trace>& traces);

/// Percent change of `value` over `baseline`: 100 * (value - baseline) /
/// |baseline|. Throws when baseline is 0.
double relative_improvement(double value, double baseline);

/// Runs grouped by strategy for one benchmark, in report order.
struct RunSet {
  std::string benchmark;
  std::vector<std::pair<std::string, std::vector<Trace>>> strategies;
};

/// Final best value per run, summarized per strategy in RunSet order.
std::vector<std::pair<std::string, SummaryStats>> best_found_summary(
    const RunSet& runs);

}  // namespace hypertune::stats
