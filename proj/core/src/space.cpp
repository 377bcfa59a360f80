#include "hypertune/space.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "json_detail.hpp"

namespace hypertune {

namespace {

std::int64_t integer_span(const IntegerDomain& d) { return d.hi - d.lo; }

}  // namespace

ParamDef continuous_param(std::string name, double lo, double hi,
                          bool log_scale) {
  return ParamDef{std::move(name), ContinuousDomain{lo, hi, log_scale}};
}

ParamDef integer_param(std::string name, std::int64_t lo, std::int64_t hi) {
  return ParamDef{std::move(name), IntegerDomain{lo, hi}};
}

ParamDef categorical_param(std::string name, std::vector<std::string> levels) {
  return ParamDef{std::move(name), CategoricalDomain{std::move(levels)}};
}

ParamSpace::ParamSpace(std::vector<ParamDef> params)
    : params_(std::move(params)) {
  std::set<std::string> seen;
  for (const auto& p : params_) {
    if (p.name.empty()) throw Error("parameter name must be non-empty");
    if (!seen.insert(p.name).second) {
      throw Error("duplicate parameter name: " + p.name);
    }
    if (const auto* c = std::get_if<ContinuousDomain>(&p.domain)) {
      if (!(c->lo < c->hi)) {
        throw Error("continuous parameter " + p.name + " requires lo < hi");
      }
      if (c->log_scale && !(c->lo > 0.0)) {
        throw Error("log-scale parameter " + p.name + " requires lo > 0");
      }
      if (!std::isfinite(c->lo) || !std::isfinite(c->hi)) {
        throw Error("continuous parameter " + p.name + " has non-finite bound");
      }
      unit_dim_ += 1;
    } else if (const auto* i = std::get_if<IntegerDomain>(&p.domain)) {
      if (i->lo > i->hi) {
        throw Error("integer parameter " + p.name + " requires lo <= hi");
      }
      unit_dim_ += 1;
    } else {
      const auto& levels = std::get<CategoricalDomain>(p.domain).levels;
      if (levels.size() < 2) {
        throw Error("categorical parameter " + p.name +
                    " requires at least two levels");
      }
      std::set<std::string> lv(levels.begin(), levels.end());
      if (lv.size() != levels.size()) {
        throw Error("categorical parameter " + p.name +
                    " has duplicate levels");
      }
      unit_dim_ += levels.size();
    }
  }
}

const ParamDef* ParamSpace::find(const std::string& name) const {
  for (const auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

double Configuration::real(const std::string& name) const {
  auto it = values.find(name);
  if (it == values.end()) throw Error("configuration missing value: " + name);
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) {
    return static_cast<double>(*i);
  }
  throw Error("configuration value " + name + " is not numeric");
}

std::int64_t Configuration::integer(const std::string& name) const {
  auto it = values.find(name);
  if (it == values.end()) throw Error("configuration missing value: " + name);
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) return *i;
  if (const auto* d = std::get_if<double>(&it->second)) {
    if (*d == std::floor(*d)) return static_cast<std::int64_t>(*d);
  }
  throw Error("configuration value " + name + " is not an integer");
}

const std::string& Configuration::level(const std::string& name) const {
  auto it = values.find(name);
  if (it == values.end()) throw Error("configuration missing value: " + name);
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  throw Error("configuration value " + name + " is not categorical");
}

std::vector<std::string> validate(const ParamSpace& space,
                                  const Configuration& config) {
  std::vector<std::string> violations;
  for (const auto& p : space.params()) {
    auto it = config.values.find(p.name);
    if (it == config.values.end()) {
      violations.push_back("missing parameter: " + p.name);
      continue;
    }
    const ParamValue& v = it->second;
    if (const auto* c = std::get_if<ContinuousDomain>(&p.domain)) {
      double x;
      if (const auto* d = std::get_if<double>(&v)) {
        x = *d;
      } else if (const auto* i = std::get_if<std::int64_t>(&v)) {
        x = static_cast<double>(*i);
      } else {
        violations.push_back("parameter " + p.name + " must be numeric");
        continue;
      }
      if (!std::isfinite(x) || x < c->lo || x > c->hi) {
        std::ostringstream os;
        os << "parameter " << p.name << " = " << x << " outside [" << c->lo
           << ", " << c->hi << "]";
        violations.push_back(os.str());
      }
    } else if (const auto* i = std::get_if<IntegerDomain>(&p.domain)) {
      std::int64_t x;
      if (const auto* iv = std::get_if<std::int64_t>(&v)) {
        x = *iv;
      } else if (const auto* d = std::get_if<double>(&v);
                 d != nullptr && *d == std::floor(*d)) {
        x = static_cast<std::int64_t>(*d);
      } else {
        violations.push_back("parameter " + p.name + " must be an integer");
        continue;
      }
      if (x < i->lo || x > i->hi) {
        std::ostringstream os;
        os << "parameter " << p.name << " = " << x << " outside [" << i->lo
           << ", " << i->hi << "]";
        violations.push_back(os.str());
      }
    } else {
      const auto& levels = std::get<CategoricalDomain>(p.domain).levels;
      const auto* s = std::get_if<std::string>(&v);
      if (s == nullptr) {
        violations.push_back("parameter " + p.name + " must be a level name");
      } else if (std::find(levels.begin(), levels.end(), *s) == levels.end()) {
        violations.push_back("parameter " + p.name + " has unknown level: " +
                             *s);
      }
    }
  }
  for (const auto& [name, value] : config.values) {
    (void)value;
    if (space.find(name) == nullptr) {
      violations.push_back("unknown parameter: " + name);
    }
  }
  return violations;
}

void require_valid(const ParamSpace& space, const Configuration& config,
                   const std::string& context) {
  const auto violations = validate(space, config);
  if (violations.empty()) return;
  std::string msg = context + ":";
  for (const auto& v : violations) msg += " " + v + ";";
  throw Error(msg);
}

Configuration sample_uniform(const ParamSpace& space, Rng& rng) {
  Configuration out;
  for (const auto& p : space.params()) {
    if (const auto* c = std::get_if<ContinuousDomain>(&p.domain)) {
      if (c->log_scale) {
        const double e = rng.uniform(std::log10(c->lo), std::log10(c->hi));
        out.values[p.name] = std::pow(10.0, e);
      } else {
        out.values[p.name] = rng.uniform(c->lo, c->hi);
      }
    } else if (const auto* i = std::get_if<IntegerDomain>(&p.domain)) {
      out.values[p.name] = rng.uniform_int(i->lo, i->hi);
    } else {
      const auto& levels = std::get<CategoricalDomain>(p.domain).levels;
      const auto idx = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(levels.size()) - 1));
      out.values[p.name] = levels[idx];
    }
  }
  return out;
}

namespace {

// Axis values at per-axis resolution g. Continuous axes get g evenly spaced
// values including both endpoints (midpoint when g = 1); integer axes get
// min(g, #distinct) evenly spaced integers.
std::vector<ParamValue> axis_values(const ParamDef& p, std::int64_t g) {
  std::vector<ParamValue> out;
  if (const auto* c = std::get_if<ContinuousDomain>(&p.domain)) {
    const double lo = c->log_scale ? std::log10(c->lo) : c->lo;
    const double hi = c->log_scale ? std::log10(c->hi) : c->hi;
    for (std::int64_t k = 0; k < g; ++k) {
      double v = g == 1 ? 0.5 * (lo + hi)
                        : lo + (hi - lo) * static_cast<double>(k) /
                                   static_cast<double>(g - 1);
      if (c->log_scale) v = std::pow(10.0, v);
      out.emplace_back(v);
    }
  } else if (const auto* i = std::get_if<IntegerDomain>(&p.domain)) {
    const std::int64_t distinct = integer_span(*i) + 1;
    const std::int64_t m = std::min<std::int64_t>(g, distinct);
    if (m == 1) {
      out.emplace_back(static_cast<std::int64_t>(
          std::llround(0.5 * static_cast<double>(i->lo + i->hi))));
    } else {
      for (std::int64_t k = 0; k < m; ++k) {
        const double v = static_cast<double>(i->lo) +
                         static_cast<double>(i->hi - i->lo) *
                             static_cast<double>(k) /
                             static_cast<double>(m - 1);
        out.emplace_back(static_cast<std::int64_t>(std::llround(v)));
      }
    }
  } else {
    for (const auto& level : std::get<CategoricalDomain>(p.domain).levels) {
      out.emplace_back(level);
    }
  }
  return out;
}

double grid_size_at(const ParamSpace& space, std::int64_t g) {
  double size = 1.0;
  for (const auto& p : space.params()) {
    if (std::holds_alternative<ContinuousDomain>(p.domain)) {
      size *= static_cast<double>(g);
    } else if (const auto* i = std::get_if<IntegerDomain>(&p.domain)) {
      size *= static_cast<double>(
          std::min<std::int64_t>(g, integer_span(*i) + 1));
    } else {
      size *= static_cast<double>(
          std::get<CategoricalDomain>(p.domain).levels.size());
    }
    if (size > 1e15) return size;  // saturate, avoids overflow
  }
  return size;
}

}  // namespace

std::vector<Configuration> grid(const ParamSpace& space, int target_count,
                                Rng& rng) {
  if (target_count < 1) throw Error("grid target_count must be >= 1");
  if (space.empty()) return {Configuration{}};

  // Resolution only matters up to the longest finite axis; past that the
  // size plateaus for spaces without continuous parameters.
  std::int64_t g_cap = 1;
  bool any_continuous = false;
  for (const auto& p : space.params()) {
    if (std::holds_alternative<ContinuousDomain>(p.domain)) {
      any_continuous = true;
    } else if (const auto* i = std::get_if<IntegerDomain>(&p.domain)) {
      g_cap = std::max<std::int64_t>(g_cap, integer_span(*i) + 1);
    }
  }
  if (any_continuous) g_cap = std::max<std::int64_t>(g_cap, target_count);

  std::int64_t g = 1;
  while (g < g_cap && grid_size_at(space, g + 1) <=
                          static_cast<double>(target_count)) {
    ++g;
  }
  // Axes that allow it always get at least two levels; overflow beyond
  // target_count is handled by the shuffle-and-truncate below.
  g = std::max<std::int64_t>(g, 2);

  std::vector<std::vector<ParamValue>> axes;
  axes.reserve(space.size());
  for (const auto& p : space.params()) axes.push_back(axis_values(p, g));

  std::vector<Configuration> out;
  std::vector<std::size_t> idx(axes.size(), 0);
  for (;;) {
    Configuration c;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      c.values[space.params()[a].name] = axes[a][idx[a]];
    }
    out.push_back(std::move(c));
    // odometer increment, last axis fastest
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].size()) break;
      idx[a] = 0;
      if (a == 0) goto done;
    }
  }
done:
  rng.shuffle(out);
  if (out.size() > static_cast<std::size_t>(target_count)) {
    out.resize(static_cast<std::size_t>(target_count));
  }
  return out;
}

Eigen::VectorXd to_unit(const ParamSpace& space, const Configuration& config) {
  require_valid(space, config, "to_unit");
  Eigen::VectorXd u(static_cast<Eigen::Index>(space.unit_dim()));
  Eigen::Index k = 0;
  for (const auto& p : space.params()) {
    if (const auto* c = std::get_if<ContinuousDomain>(&p.domain)) {
      const double v = config.real(p.name);
      if (c->log_scale) {
        u[k++] = (std::log10(v) - std::log10(c->lo)) /
                 (std::log10(c->hi) - std::log10(c->lo));
      } else {
        u[k++] = (v - c->lo) / (c->hi - c->lo);
      }
    } else if (const auto* i = std::get_if<IntegerDomain>(&p.domain)) {
      const double span = static_cast<double>(integer_span(*i));
      const double v = static_cast<double>(config.integer(p.name));
      u[k++] = (v - static_cast<double>(i->lo) + 0.5) / (span + 1.0);
    } else {
      const auto& levels = std::get<CategoricalDomain>(p.domain).levels;
      const std::string& lv = config.level(p.name);
      for (const auto& level : levels) {
        u[k++] = (level == lv) ? 1.0 : 0.0;
      }
    }
  }
  return u;
}

Configuration from_unit(const ParamSpace& space, const Eigen::VectorXd& u) {
  if (u.size() != static_cast<Eigen::Index>(space.unit_dim())) {
    throw Error("from_unit: vector has dimension " + std::to_string(u.size()) +
                ", space embeds in " + std::to_string(space.unit_dim()));
  }
  Configuration out;
  Eigen::Index k = 0;
  auto clamped = [&](Eigen::Index i) {
    return std::clamp(u[i], 0.0, 1.0);
  };
  for (const auto& p : space.params()) {
    if (const auto* c = std::get_if<ContinuousDomain>(&p.domain)) {
      const double t = clamped(k++);
      if (c->log_scale) {
        const double llo = std::log10(c->lo);
        const double lhi = std::log10(c->hi);
        out.values[p.name] = std::pow(10.0, llo + t * (lhi - llo));
      } else {
        out.values[p.name] = c->lo + t * (c->hi - c->lo);
      }
    } else if (const auto* i = std::get_if<IntegerDomain>(&p.domain)) {
      const double span = static_cast<double>(integer_span(*i));
      const double t = clamped(k++);
      auto v = i->lo + static_cast<std::int64_t>(
                           std::floor(t * (span + 1.0)));
      out.values[p.name] = std::min(v, i->hi);
    } else {
      const auto& levels = std::get<CategoricalDomain>(p.domain).levels;
      Eigen::Index best = 0;
      double best_val = clamped(k);
      for (Eigen::Index j = 1; j < static_cast<Eigen::Index>(levels.size());
           ++j) {
        const double val = clamped(k + j);
        if (val > best_val) {
          best_val = val;
          best = j;
        }
      }
      out.values[p.name] = levels[static_cast<std::size_t>(best)];
      k += static_cast<Eigen::Index>(levels.size());
    }
  }
  return out;
}

std::string ParamSpace::to_json() const {
  detail::ordered_json params = detail::ordered_json::array();
  for (const auto& p : params_) {
    detail::ordered_json j;
    j["name"] = p.name;
    if (const auto* c = std::get_if<ContinuousDomain>(&p.domain)) {
      j["type"] = "continuous";
      j["lo"] = c->lo;
      j["hi"] = c->hi;
      j["log"] = c->log_scale;
    } else if (const auto* i = std::get_if<IntegerDomain>(&p.domain)) {
      j["type"] = "integer";
      j["lo"] = i->lo;
      j["hi"] = i->hi;
    } else {
      j["type"] = "categorical";
      j["levels"] = std::get<CategoricalDomain>(p.domain).levels;
    }
    params.push_back(std::move(j));
  }
  detail::ordered_json root;
  root["params"] = std::move(params);
  return root.dump(2);
}

ParamSpace ParamSpace::from_json(const std::string& text) {
  const auto root = detail::parse_json(text, "parameter space");
  if (!root.is_object() || !root.contains("params") ||
      !root["params"].is_array()) {
    throw Error("parameter space JSON must be {\"params\": [...]}");
  }
  std::vector<ParamDef> defs;
  for (const auto& j : root["params"]) {
    if (!j.is_object() || !j.contains("name") || !j.contains("type")) {
      throw Error("each parameter needs \"name\" and \"type\"");
    }
    const std::string name = j["name"].get<std::string>();
    const std::string type = j["type"].get<std::string>();
    if (type == "continuous") {
      if (!j.contains("lo") || !j.contains("hi")) {
        throw Error("continuous parameter " + name + " needs lo and hi");
      }
      defs.push_back(continuous_param(name, j["lo"].get<double>(),
                                      j["hi"].get<double>(),
                                      j.value("log", false)));
    } else if (type == "integer") {
      if (!j.contains("lo") || !j.contains("hi")) {
        throw Error("integer parameter " + name + " needs lo and hi");
      }
      defs.push_back(integer_param(name, j["lo"].get<std::int64_t>(),
                                   j["hi"].get<std::int64_t>()));
    } else if (type == "categorical") {
      if (!j.contains("levels") || !j["levels"].is_array()) {
        throw Error("categorical parameter " + name + " needs levels");
      }
      defs.push_back(categorical_param(
          name, j["levels"].get<std::vector<std::string>>()));
    } else {
      throw Error("unknown parameter type: " + type);
    }
  }
  return ParamSpace(std::move(defs));
}

std::string Configuration::to_json() const {
  return detail::configuration_to_json(*this).dump(2);
}

Configuration Configuration::from_json(const std::string& text) {
  return detail::configuration_from_json(
      detail::parse_json(text, "configuration"));
}

}  // namespace hypertune
