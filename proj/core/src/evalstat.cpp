#include "hypertune/evalstat.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "hypertune/error.hpp"
#include "hypertune/gp.hpp"

namespace hypertune::stats {

namespace {

constexpr std::size_t kExactLimit = 16;  // pooled size bound for enumeration
constexpr std::size_t kExactTiedGroupLimit = 2;

// Midranks of the pooled sample, 1-based.
std::vector<double> midranks(const std::vector<double>& pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return pooled[i] < pooled[j];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double avg =
        0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

std::vector<std::size_t> tie_group_sizes(std::vector<double> pooled) {
  std::sort(pooled.begin(), pooled.end());
  std::vector<std::size_t> sizes;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j + 1 < pooled.size() && pooled[j + 1] == pooled[i]) ++j;
    if (j > i) sizes.push_back(j - i + 1);
    i = j + 1;
  }
  return sizes;
}

double u_from_ranksum(double rank_sum, std::size_t n) {
  return rank_sum - 0.5 * static_cast<double>(n) * static_cast<double>(n + 1);
}

// Exact two-sided p by enumerating every way to assign n of the pooled
// ranks to the first group; deviation from the null mean nm/2 is compared
// with a small tolerance since midranks introduce halves.
double exact_two_sided_p(const std::vector<double>& ranks, std::size_t n,
                         double observed_dev) {
  const std::size_t total = ranks.size();
  const double mean_u = 0.5 * static_cast<double>(n) *
                        static_cast<double>(total - n);
  std::vector<std::size_t> pick(n);
  std::iota(pick.begin(), pick.end(), 0);
  std::uint64_t extreme = 0;
  std::uint64_t count = 0;
  for (;;) {
    double rank_sum = 0.0;
    for (const auto idx : pick) rank_sum += ranks[idx];
    const double dev = std::abs(u_from_ranksum(rank_sum, n) - mean_u);
    if (dev >= observed_dev - 1e-9) ++extreme;
    ++count;
    // next combination in lexicographic order
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (pick[i] != i + total - n) {
        ++pick[i];
        for (std::size_t j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
        break;
      }
      if (i == 0) {
        return static_cast<double>(extreme) / static_cast<double>(count);
      }
    }
  }
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error("quantile of empty sample");
  if (q < 0.0 || q > 1.0) throw Error("quantile level must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double rank = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = std::min(lo + 1, values.size() - 1);
  if (values[lo] == values[hi]) return values[lo];
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

SummaryStats summarize(const std::vector<double>& values) {
  if (values.empty()) throw Error("summarize requires at least one value");
  SummaryStats s;
  s.count = static_cast<int>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  s.median = quantile(values, 0.5);
  if (values.size() > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

UTestResult mann_whitney_u(const std::vector<double>& a,
                           const std::vector<double>& b) {
  if (a.empty() || b.empty()) {
    throw Error("mann_whitney_u requires non-empty samples");
  }
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<double> pooled;
  pooled.reserve(n + m);
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());

  const std::vector<double> ranks = midranks(pooled);
  double rank_sum_a = 0.0;
  for (std::size_t i = 0; i < n; ++i) rank_sum_a += ranks[i];
  const double u = u_from_ranksum(rank_sum_a, n);
  const double mean_u = 0.5 * static_cast<double>(n) * static_cast<double>(m);
  const double dev = std::abs(u - mean_u);

  UTestResult result;
  result.u_statistic = u;

  const auto ties = tie_group_sizes(pooled);
  if (n + m <= kExactLimit && ties.size() <= kExactTiedGroupLimit) {
    result.method = UTestMethod::Exact;
    result.p_two_sided = exact_two_sided_p(ranks, n, dev);
    return result;
  }

  result.method = UTestMethod::NormalApprox;
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  const double total = nn + mm;
  double tie_term = 0.0;
  for (const auto t : ties) {
    const double td = static_cast<double>(t);
    tie_term += td * td * td - td;
  }
  const double var = nn * mm / 12.0 *
                     ((total + 1.0) - tie_term / (total * (total - 1.0)));
  if (var <= 0.0) {
    result.p_two_sided = 1.0;  // every pooled value identical
    return result;
  }
  const double z = std::max(0.0, (dev - 0.5) / std::sqrt(var));
  result.p_two_sided = std::min(1.0, 2.0 * (1.0 - gp::normal_cdf(z)));
  return result;
}

QuantileBand iqr_trace(const std::vector<std::vector<double>>& best_seen) {
  if (best_seen.empty()) throw Error("iqr_trace requires at least one run");
  const std::size_t len = best_seen.front().size();
  if (len == 0) throw Error("iqr_trace requires non-empty curves");
  for (const auto& curve : best_seen) {
    if (curve.size() != len) {
      throw Error("iqr_trace requires equal-length curves");
    }
  }
  QuantileBand band;
  band.q25.reserve(len);
  band.median.reserve(len);
  band.q75.reserve(len);
  std::vector<double> column(best_seen.size());
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t r = 0; r < best_seen.size(); ++r) {
      column[r] = best_seen[r][i];
    }
    band.q25.push_back(quantile(column, 0.25));
    band.median.push_back(quantile(column, 0.5));
    band.q75.push_back(quantile(column, 0.75));
  }
  return band;
}

QuantileBand iqr_trace(const std::vector<Trace>& traces) {
  std::vector<std::vector<double>> curves;
  curves.reserve(traces.size());
  for (const auto& t : traces) curves.push_back(t.best_seen);
  return iqr_trace(curves);
}

double relative_improvement(double value, double baseline) {
  if (baseline == 0.0) {
    throw Error("relative_improvement: baseline is zero");
  }
  return 100.0 * (value - baseline) / std::abs(baseline);
}

std::vector<std::pair<std::string, SummaryStats>> best_found_summary(
    const RunSet& runs) {
  std::vector<std::pair<std::string, SummaryStats>> out;
  out.reserve(runs.strategies.size());
  for (const auto& [name, traces] : runs.strategies) {
    std::vector<double> finals;
    finals.reserve(traces.size());
    for (const auto& t : traces) finals.push_back(t.final_best());
    out.emplace_back(name, summarize(finals));
  }
  return out;
}

}  // namespace hypertune::stats
