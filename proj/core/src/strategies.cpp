#include "hypertune/strategies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "hypertune/gp.hpp"

namespace hypertune {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Grids start at this size even for small budgets so low-resolution axes
// still get a few distinct values each.
constexpr int kMinGridTarget = 64;
constexpr int kMaxGridTarget = 1 << 22;

}  // namespace

double Trace::final_best() const {
  return best_seen.empty() ? kNegInf : best_seen.back();
}

StrategyKind strategy_from_name(const std::string& name) {
  if (name == "random") return StrategyKind::Random;
  if (name == "grid") return StrategyKind::Grid;
  if (name == "bayes") return StrategyKind::Bayes;
  throw Error("unknown strategy: " + name +
              " (expected random, grid, or bayes)");
}

std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Random: return "random";
    case StrategyKind::Grid: return "grid";
    case StrategyKind::Bayes: return "bayes";
  }
  throw Error("invalid strategy kind");
}

std::vector<Eigen::VectorXd> latin_hypercube(std::size_t d, std::size_t m,
                                             Rng& rng) {
  std::vector<Eigen::VectorXd> points(
      m, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d)));
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<std::size_t> strata(m);
    std::iota(strata.begin(), strata.end(), 0);
    rng.shuffle(strata);
    for (std::size_t i = 0; i < m; ++i) {
      points[i][static_cast<Eigen::Index>(j)] =
          (static_cast<double>(strata[i]) + rng.uniform()) /
          static_cast<double>(m);
    }
  }
  return points;
}

std::size_t bayes_init_design_size(std::size_t d) {
  return std::max<std::size_t>(2 * d, 4);
}

StrategyState StrategyState::make(StrategyKind kind, const ParamSpace& space,
                                  std::uint64_t seed, int budget,
                                  const BayesOptions& options) {
  if (budget < 1) throw Error("strategy budget must be >= 1");
  StrategyState s;
  s.kind_ = kind;
  s.space_ = space;
  s.rng_ = Rng(seed);
  s.options_ = options;
  s.budget_ = budget;

  if (kind == StrategyKind::Grid) {
    // Grow the grid target until the queue covers the budget or the finite
    // cross product is exhausted (size stops increasing).
    int target = std::max(budget, kMinGridTarget);
    std::size_t prev_size = 0;
    for (;;) {
      s.grid_queue_ = grid(space, target, s.rng_);
      if (s.grid_queue_.size() >= static_cast<std::size_t>(budget)) break;
      if (s.grid_queue_.size() == prev_size) break;
      prev_size = s.grid_queue_.size();
      if (target > kMaxGridTarget) break;
      target *= 2;
    }
  } else if (kind == StrategyKind::Bayes) {
    const std::size_t d = space.unit_dim();
    if (d > 0) {
      s.init_queue_ = latin_hypercube(d, bayes_init_design_size(d), s.rng_);
    }
  }
  return s;
}

Configuration StrategyState::suggest() {
  switch (kind_) {
    case StrategyKind::Random:
      return sample_uniform(space_, rng_);
    case StrategyKind::Grid:
      if (grid_next_ >= grid_queue_.size()) {
        throw Error("grid exhausted: budget exceeds grid size " +
                    std::to_string(grid_queue_.size()));
      }
      return grid_queue_[grid_next_++];
    case StrategyKind::Bayes:
      return suggest_bayes();
  }
  throw Error("invalid strategy kind");
}

Configuration StrategyState::suggest_bayes() {
  if (space_.unit_dim() == 0) return Configuration{};
  if (init_next_ < init_queue_.size()) {
    return from_unit(space_, init_queue_[init_next_++]);
  }
  if (history_y_.empty()) {
    // observe() was never called; fall back to a uniform draw rather than
    // fitting a surrogate on nothing.
    return sample_uniform(space_, rng_);
  }

  const auto n = static_cast<Eigen::Index>(history_x_.size());
  const auto d = static_cast<Eigen::Index>(space_.unit_dim());
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = history_x_[static_cast<std::size_t>(i)].transpose();
    y[i] = history_y_[static_cast<std::size_t>(i)];
  }
  const gp::GpModel model = gp::gp_fit(x, y, options_.gp_restarts, rng_);

  std::size_t best_idx = 0;
  for (std::size_t i = 1; i < history_y_.size(); ++i) {
    if (history_y_[i] > history_y_[best_idx]) best_idx = i;
  }
  const double best_value = history_y_[best_idx];
  const Eigen::VectorXd& incumbent = history_x_[best_idx];

  Eigen::VectorXd best_candidate;
  double best_ei = -1.0;
  auto consider = [&](const Eigen::VectorXd& candidate) {
    const double ei =
        gp::expected_improvement(model, candidate, best_value, options_.xi,
                                 /*maximize=*/true);
    if (ei > best_ei) {
      best_ei = ei;
      best_candidate = candidate;
    }
  };
  for (int c = 0; c < options_.uniform_candidates; ++c) {
    Eigen::VectorXd candidate(d);
    for (Eigen::Index j = 0; j < d; ++j) candidate[j] = rng_.uniform();
    consider(candidate);
  }
  for (int c = 0; c < options_.local_candidates; ++c) {
    Eigen::VectorXd candidate(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      candidate[j] = std::clamp(
          incumbent[j] + options_.local_sigma * rng_.normal(), 0.0, 1.0);
    }
    consider(candidate);
  }
  return from_unit(space_, best_candidate);
}

double StrategyState::observe(const Configuration& config, double value,
                              bool failed) {
  double recorded = value;
  if (failed) {
    double worst = 0.0;
    if (!history_y_.empty()) {
      worst = *std::min_element(history_y_.begin(), history_y_.end());
    }
    recorded = worst - 1.0;
  }
  if (space_.unit_dim() > 0) {
    history_x_.push_back(to_unit(space_, config));
  } else {
    history_x_.push_back(Eigen::VectorXd());
  }
  history_y_.push_back(recorded);
  history_failed_.push_back(failed);
  return recorded;
}

Trace run_loop(StrategyKind kind, const ParamSpace& space,
               const Objective& objective, int budget, std::uint64_t seed,
               const BayesOptions& options) {
  Trace trace;
  trace.strategy_name = to_string(kind);
  trace.seed = seed;

  StrategyState state = StrategyState::make(kind, space, seed, budget,
                                            options);
  double best = kNegInf;
  for (int eval = 0; eval < budget; ++eval) {
    Configuration config;
    try {
      config = state.suggest();
    } catch (const Error& e) {
      trace.fault = e.what();
      break;
    }

    const auto t0 = std::chrono::steady_clock::now();
    double value = 0.0;
    bool failed = false;
    try {
      value = objective(config);
      if (!std::isfinite(value)) failed = true;
    } catch (const std::exception&) {
      failed = true;
    }
    const auto t1 = std::chrono::steady_clock::now();
    trace.wall_times.push_back(
        std::chrono::duration<double>(t1 - t0).count());

    const double recorded = state.observe(config, value, failed);
    Observation obs;
    obs.config = config;
    obs.value = recorded;
    obs.eval_index = eval;
    obs.failed = failed;
    trace.observations.push_back(std::move(obs));

    if (!failed && recorded > best) best = recorded;
    trace.best_seen.push_back(best);
  }
  return trace;
}

}  // namespace hypertune
