#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "hypertune/error.hpp"
#include "hypertune/rng.hpp"

namespace hypertune {

struct ContinuousDomain {
  double lo = 0.0;
  double hi = 1.0;
  bool log_scale = false;
};

struct IntegerDomain {
  std::int64_t lo = 0;
  std::int64_t hi = 1;
};

struct CategoricalDomain {
  std::vector<std::string> levels;
};

using Domain = std::variant<ContinuousDomain, IntegerDomain, CategoricalDomain>;

struct ParamDef {
  std::string name;
  Domain domain;
};

ParamDef continuous_param(std::string name, double lo, double hi,
                          bool log_scale = false);
ParamDef integer_param(std::string name, std::int64_t lo, std::int64_t hi);
ParamDef categorical_param(std::string name, std::vector<std::string> levels);

/// A mixed search space: ordered parameter definitions plus the bijection
/// onto the unit cube that the GP surrogate optimizes over. Continuous
/// parameters map to one coordinate (affine, or affine in log10 when
/// log_scale), integers to one coordinate by center-of-bin, categoricals to
/// a one-hot block.
class ParamSpace {
 public:
  ParamSpace() = default;
  explicit ParamSpace(std::vector<ParamDef> params);

  const std::vector<ParamDef>& params() const { return params_; }
  std::size_t size() const { return params_.size(); }
  bool empty() const { return params_.empty(); }

  /// Dimension of the unit-cube embedding.
  std::size_t unit_dim() const { return unit_dim_; }

  const ParamDef* find(const std::string& name) const;

  std::string to_json() const;
  static ParamSpace from_json(const std::string& text);

 private:
  std::vector<ParamDef> params_;
  std::size_t unit_dim_ = 0;
};

using ParamValue = std::variant<double, std::int64_t, std::string>;

/// One point in a parameter space, keyed by parameter name. std::map keeps
/// key order (and therefore serialization) deterministic.
struct Configuration {
  std::map<std::string, ParamValue> values;

  bool has(const std::string& name) const { return values.count(name) > 0; }
  double real(const std::string& name) const;
  std::int64_t integer(const std::string& name) const;
  const std::string& level(const std::string& name) const;

  std::string to_json() const;
  static Configuration from_json(const std::string& text);

  bool operator==(const Configuration& o) const { return values == o.values; }
};

/// Returns human-readable violations; empty means the configuration is a
/// valid point of the space (exact key set, every value in its domain).
std::vector<std::string> validate(const ParamSpace& space,
                                  const Configuration& config);

/// Throws Error listing all violations if `config` is not valid in `space`.
void require_valid(const ParamSpace& space, const Configuration& config,
                   const std::string& context);

/// Independent uniform draw per parameter. log_scale continuous parameters
/// are uniform in log10; integers and categorical levels are uniform over
/// their finite ranges.
Configuration sample_uniform(const ParamSpace& space, Rng& rng);

/// Cartesian grid with at most `target_count` points, shuffled by `rng` and
/// truncated. Per-axis resolution g is the largest value such that the full
/// cross product has at most target_count points (categoricals always
/// contribute all levels; integers contribute min(g, span) evenly spaced
/// values where span is the number of distinct integers).
std::vector<Configuration> grid(const ParamSpace& space, int target_count,
                                Rng& rng);

/// Maps a valid configuration to the unit cube.
Eigen::VectorXd to_unit(const ParamSpace& space, const Configuration& config);

/// Inverse of to_unit up to quantization: coordinates are clamped to [0, 1];
/// integers round to the nearest bin center; categoricals take the arg-max
/// coordinate of their one-hot block (lowest index wins ties).
Configuration from_unit(const ParamSpace& space, const Eigen::VectorXd& u);

}  // namespace hypertune
