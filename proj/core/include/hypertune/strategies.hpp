#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hypertune/space.hpp"

namespace hypertune {

/// One completed evaluation inside a run.
struct Observation {
  Configuration config;
  double value = 0.0;  // imputed when failed
  int eval_index = 0;
  bool failed = false;
};

/// Full record of one optimization run. best_seen[i] is the best successful
/// value up to and including evaluation i (-inf before the first success).
/// Wall times are kept for in-process reporting only and never serialized,
/// so persisted artifacts stay byte-identical across equal-seed runs.
struct Trace {
  std::string strategy_name;
  std::uint64_t seed = 0;
  std::vector<Observation> observations;
  std::vector<double> best_seen;
  std::vector<double> wall_times;  // seconds per evaluation
  std::string fault;               // non-empty if the run stopped early

  double final_best() const;
};

enum class StrategyKind { Random, Grid, Bayes };

StrategyKind strategy_from_name(const std::string& name);
std::string to_string(StrategyKind kind);

struct BayesOptions {
  double xi = 0.01;              // EI margin, fraction of the target sd
  int uniform_candidates = 2048;
  int local_candidates = 64;     // Gaussian perturbations of the incumbent
  double local_sigma = 0.05;
  int gp_restarts = 8;
};

/// m points in [0, 1)^d arranged as a Latin hypercube: per dimension a
/// random permutation of m strata, each point placed uniformly inside its
/// stratum. Draw order per dimension: the permutation shuffle, then the m
/// in-stratum offsets.
std::vector<Eigen::VectorXd> latin_hypercube(std::size_t d, std::size_t m,
                                             Rng& rng);

/// Size of the Bayesian initialization design for a d-dimensional embedding.
std::size_t bayes_init_design_size(std::size_t d);

/// Sequential ask/tell state for one strategy on one space. All strategies
/// maximize. Identical (kind, space, seed, budget) state produces identical
/// suggestion streams given identical observations.
class StrategyState {
 public:
  static StrategyState make(StrategyKind kind, const ParamSpace& space,
                            std::uint64_t seed, int budget,
                            const BayesOptions& options = {});

  /// Next configuration to evaluate. Throws Error when the strategy cannot
  /// produce one (finite grid exhausted).
  Configuration suggest();

  /// Records an evaluation. Failed evaluations are imputed at one objective
  /// unit below the worst value recorded so far (0 when history is empty)
  /// so the surrogate treats them as strictly bad. Returns the recorded
  /// value.
  double observe(const Configuration& config, double value, bool failed);

  StrategyKind kind() const { return kind_; }
  int observed_count() const { return static_cast<int>(history_y_.size()); }

 private:
  StrategyState() = default;

  Configuration suggest_bayes();

  StrategyKind kind_ = StrategyKind::Random;
  ParamSpace space_;
  Rng rng_{0};
  BayesOptions options_;
  int budget_ = 0;

  std::vector<Configuration> grid_queue_;
  std::size_t grid_next_ = 0;

  std::vector<Eigen::VectorXd> init_queue_;
  std::size_t init_next_ = 0;

  std::vector<Eigen::VectorXd> history_x_;
  std::vector<double> history_y_;
  std::vector<bool> history_failed_;
};

using Objective = std::function<double(const Configuration&)>;

/// Runs one strategy for exactly `budget` evaluations (fewer only when the
/// strategy faults, e.g. grid exhaustion; the fault lands in Trace::fault).
/// An objective that throws or returns a non-finite value is recorded as a
/// failed observation and the loop continues.
Trace run_loop(StrategyKind kind, const ParamSpace& space,
               const Objective& objective, int budget, std::uint64_t seed,
               const BayesOptions& options = {});

}  // namespace hypertune
