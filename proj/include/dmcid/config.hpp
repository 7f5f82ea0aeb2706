/*
 * Copyright (C) 2026 The dmcid Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dmcid/channel.hpp"
#include "dmcid/experiments.hpp"
#include "dmcid/io.hpp"

namespace dmcid {

/// Invalid configuration; `flag` names the offending option (e.g. "--delta").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string flag, const std::string& detail)
      : std::runtime_error(flag + ": " + detail), flag_(std::move(flag)) {}
  const std::string& flag() const noexcept { return flag_; }

 private:
  std::string flag_;
};

/// Settings of one CLI run. Keys of a --config JSON file are the long flag
/// names without dashes ("delta", "median-variant", ...); flags override them.
struct ExperimentConfig {
  std::string experiment;  ///< capacity|estimate|identify|pac|lower-bound|fig1|fig2
  std::string channels_file;
  std::optional<std::vector<Channel>> channels;  ///< inline set from a config file
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds;  ///< explicit seed list; otherwise seed, seed+1, ... (reps)
  std::int64_t reps = 20;
  double delta = 0.1;
  std::vector<double> deltas;
  double eps = 0.1;
  std::string alg;
  std::string pac = "naive";
  std::string median_variant = "eps2";
  std::string mode = "joint";
  std::string out;
  std::string format;
  std::string counts_file;
  std::string ledger_file;
  std::int64_t senses = 0;
  double alpha = 0.1;
  std::int64_t budget_cap = 0;
  std::vector<std::size_t> ks;
  std::vector<double> delta_mins;
  std::vector<std::pair<double, double>> settings;  ///< fig2 (eps, delta) pairs
  std::uint64_t generation_seed = 2024;
  double tolerance = 0.005;
  std::int64_t max_attempts = 1000000;
  double capacity_tol = 1e-12;
  unsigned threads = 0;

  /// Seeds of a replicated experiment.
  std::vector<std::uint64_t> seed_list() const {
    if (!seeds.empty()) return seeds;
    std::vector<std::uint64_t> out;
    for (std::int64_t i = 0; i < reps; ++i) out.push_back(seed + static_cast<std::uint64_t>(i));
    return out;
  }
};

namespace detail {

template <class T>
T config_get(const nlohmann::json& j, std::string_view key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("--" + std::string(key), std::string("bad value in --config: ") + e.what());
  }
}

}  // namespace detail

/// Overlays the keys of a JSON config document onto `cfg`.
inline void apply_config_json(ExperimentConfig& cfg, std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("--config", e.what());
  }
  if (!doc.is_object()) throw ConfigError("--config", "expected a JSON object");
  for (const auto& [key, v] : doc.items()) {
    using detail::config_get;
    if (key == "experiment") cfg.experiment = config_get<std::string>(v, key);
    else if (key == "channels") {
      if (v.is_string()) {
        cfg.channels_file = v.get<std::string>();
      } else {
        try {
          nlohmann::json wrapped = {{"channels", v}};
          cfg.channels = channels_from_json(wrapped.dump());
        } catch (const Error& e) {
          throw ConfigError("--channels", e.what());
        }
      }
    } else if (key == "seed") cfg.seed = config_get<std::uint64_t>(v, key);
    else if (key == "seeds") cfg.seeds = config_get<std::vector<std::uint64_t>>(v, key);
    else if (key == "reps") cfg.reps = config_get<std::int64_t>(v, key);
    else if (key == "delta") cfg.delta = config_get<double>(v, key);
    else if (key == "deltas") cfg.deltas = config_get<std::vector<double>>(v, key);
    else if (key == "eps") cfg.eps = config_get<double>(v, key);
    else if (key == "alg") cfg.alg = config_get<std::string>(v, key);
    else if (key == "pac") cfg.pac = config_get<std::string>(v, key);
    else if (key == "median-variant") cfg.median_variant = config_get<std::string>(v, key);
    else if (key == "mode") cfg.mode = config_get<std::string>(v, key);
    else if (key == "out") cfg.out = config_get<std::string>(v, key);
    else if (key == "format") cfg.format = config_get<std::string>(v, key);
    else if (key == "counts") cfg.counts_file = config_get<std::string>(v, key);
    else if (key == "ledger") cfg.ledger_file = config_get<std::string>(v, key);
    else if (key == "senses") cfg.senses = config_get<std::int64_t>(v, key);
    else if (key == "alpha") cfg.alpha = config_get<double>(v, key);
    else if (key == "budget-cap") cfg.budget_cap = config_get<std::int64_t>(v, key);
    else if (key == "ks") cfg.ks = config_get<std::vector<std::size_t>>(v, key);
    else if (key == "delta-mins") cfg.delta_mins = config_get<std::vector<double>>(v, key);
    else if (key == "settings") cfg.settings = config_get<std::vector<std::pair<double, double>>>(v, key);
    else if (key == "generation-seed") cfg.generation_seed = config_get<std::uint64_t>(v, key);
    else if (key == "tolerance") cfg.tolerance = config_get<double>(v, key);
    else if (key == "max-attempts") cfg.max_attempts = config_get<std::int64_t>(v, key);
    else if (key == "capacity-tol") cfg.capacity_tol = config_get<double>(v, key);
    else if (key == "threads") cfg.threads = config_get<unsigned>(v, key);
    else throw ConfigError("--config", "unknown key '" + key + "'");
  }
}

namespace detail {

inline void require_open_unit(double v, const char* flag) {
  if (!(v > 0.0 && v < 1.0)) throw ConfigError(flag, "must lie in (0,1), got " + format_real(v));
}

inline void require_one_of(const std::string& v, const char* flag, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return;
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : "|") + std::string(a);
  throw ConfigError(flag, "must be one of {" + list + "}, got '" + v + "'");
}

}  // namespace detail

/// Checks the fields `cfg.experiment` uses; throws ConfigError naming the flag.
inline void validate(const ExperimentConfig& cfg) {
  using detail::require_one_of;
  using detail::require_open_unit;
  const auto& e = cfg.experiment;
  require_one_of(e, "experiment", {"capacity", "estimate", "identify", "pac", "lower-bound", "fig1", "fig2"});
  if (!cfg.format.empty()) require_one_of(cfg.format, "--format", {"csv", "json"});
  if (!(cfg.capacity_tol > 0.0)) throw ConfigError("--capacity-tol", "must be > 0");

  const bool needs_channels = e == "capacity" || e == "identify" || e == "pac" || e == "lower-bound" ||
                              (e == "estimate" && cfg.counts_file.empty());
  if (needs_channels && cfg.channels_file.empty() && !cfg.channels) {
    throw ConfigError("--channels", "a channel file is required");
  }
  if (e == "estimate") {
    if (cfg.counts_file.empty() && cfg.senses < 1) throw ConfigError("--senses", "must be >= 1 when simulating");
    require_open_unit(cfg.alpha, "--alpha");
  }
  if (e == "identify") {
    require_open_unit(cfg.delta, "--delta");
    if (!cfg.alg.empty() && cfg.alg != "gap") {
      require_one_of(cfg.alg, "--alg", {"gap", "naive", "median"});
      throw ConfigError("--alg", "identify runs gap elimination; use the pac subcommand for '" + cfg.alg + "'");
    }
    require_one_of(cfg.pac, "--pac", {"naive", "median"});
    if (cfg.budget_cap < 0) throw ConfigError("--budget-cap", "must be >= 0");
  }
  if (e == "pac") {
    require_open_unit(cfg.delta, "--delta");
    require_one_of(cfg.alg.empty() ? std::string("naive") : cfg.alg, "--alg", {"naive", "median"});
    const double emax = cfg.alg == "median" ? 4.0 : 2.0;
    if (!(cfg.eps > 0.0 && cfg.eps <= emax)) throw ConfigError("--eps", "must lie in (0," + format_real(emax) + "]");
  }
  if (e == "pac" || e == "identify" || e == "fig2") {
    require_one_of(cfg.median_variant, "--median-variant", {"eps2", "eps"});
  }
  if (e == "lower-bound") {
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0 / 2.4)) throw ConfigError("--delta", "must lie in (0, 1/2.4)");
    require_one_of(cfg.mode, "--mode", {"joint", "independent"});
  }
  if (e == "fig1") {
    for (double d : cfg.deltas) require_open_unit(d, "--deltas");
    for (double d : cfg.delta_mins)
      if (!(d > 0.0)) throw ConfigError("--delta-mins", "must be > 0");
    for (auto k : cfg.ks)
      if (k < 2) throw ConfigError("--ks", "every k must be >= 2");
    if (cfg.seeds.empty() && cfg.reps < 1) throw ConfigError("--reps", "must be >= 1");
    if (!(cfg.tolerance >= 0.0)) throw ConfigError("--tolerance", "must be >= 0");
    if (cfg.max_attempts < 1) throw ConfigError("--max-attempts", "must be >= 1");
    require_one_of(cfg.pac, "--pac", {"naive", "median"});
  }
  if (e == "fig2") {
    for (auto k : cfg.ks)
      if (k < 2) throw ConfigError("--ks", "every k must be >= 2");
    for (const auto& [eps, delta] : cfg.settings) {
      if (!(eps > 0.0 && eps <= 2.0)) throw ConfigError("--settings", "eps must lie in (0,2]");
      require_open_unit(delta, "--settings");
    }
  }
}

inline MedianSecondTerm median_variant_of(const std::string& s) {
  return s == "eps" ? MedianSecondTerm::Eps : MedianSecondTerm::EpsSquared;
}

inline Fig1Config fig1_config(const ExperimentConfig& cfg) {
  Fig1Config f;
  if (!cfg.ks.empty()) f.ks = cfg.ks;
  if (!cfg.delta_mins.empty()) f.delta_mins = cfg.delta_mins;
  if (!cfg.deltas.empty()) f.deltas = cfg.deltas;
  f.seeds = cfg.seed_list();
  f.tolerance = cfg.tolerance;
  f.generation_seed = cfg.generation_seed;
  f.max_attempts = cfg.max_attempts;
  f.identify.pac = cfg.pac == "median" ? PacKind::Median : PacKind::Naive;
  f.identify.median_variant = median_variant_of(cfg.median_variant);
  f.identify.budget_cap = cfg.budget_cap;
  f.identify.capacity_tol = cfg.capacity_tol;
  f.threads = cfg.threads;
  return f;
}

inline Fig2Config fig2_config(const ExperimentConfig& cfg) {
  Fig2Config f;
  f.ks = cfg.ks;
  if (!cfg.settings.empty()) f.settings = cfg.settings;
  f.median_variant = median_variant_of(cfg.median_variant);
  return f;
}

}  // namespace dmcid
