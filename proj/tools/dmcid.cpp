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

// dmcid command-line interface.
//
// Exit codes: 0 success, 2 configuration error (message names the flag),
// 3 runtime error.

#include <cstdint>
#include <cstring>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dmcid/dmcid.hpp"

namespace {

using dmcid::ConfigError;
using dmcid::ExperimentConfig;
using dmcid::format_real;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

// Parses "eps:delta,eps:delta".
std::vector<std::pair<double, double>> parse_settings(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("--settings", "expected eps:delta, got '" + item + "'");
    try {
      out.emplace_back(dmcid::parse_real(item.substr(0, colon)), dmcid::parse_real(item.substr(colon + 1)));
    } catch (const dmcid::Error&) {
      throw ConfigError("--settings", "expected eps:delta, got '" + item + "'");
    }
  }
  return out;
}

std::vector<dmcid::Channel> load_channels(const ExperimentConfig& cfg) {
  if (cfg.channels) return *cfg.channels;
  try {
    return dmcid::channels_from_json(dmcid::read_text_file(cfg.channels_file));
  } catch (const dmcid::Error& e) {
    throw ConfigError("--channels", e.what());
  }
}

void emit(const ExperimentConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    dmcid::write_text_file(cfg.out, text);
  }
}

void print_seed(std::uint64_t seed) { std::cerr << "seed: " << seed << '\n'; }

std::string fmt_or(const ExperimentConfig& cfg, const char* fallback) {
  return cfg.format.empty() ? fallback : cfg.format;
}

int run_capacity(const ExperimentConfig& cfg) {
  const auto channels = load_channels(cfg);
  std::vector<dmcid::CapacityResult> res;
  for (const auto& ch : channels) res.push_back(dmcid::capacity(ch, cfg.capacity_tol));
  if (fmt_or(cfg, "csv") == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t j = 0; j < res.size(); ++j) {
      arr.push_back({{"channel", j},
                     {"capacity", res[j].capacity},
                     {"duality_gap", res[j].duality_gap},
                     {"iterations", res[j].iterations},
                     {"converged", res[j].converged},
                     {"input_dist", res[j].input_dist.values()},
                     {"output_dist", res[j].output_dist.values()}});
    }
    emit(cfg, dmcid::dump_json({{"channels", arr}}));
  } else {
    std::ostringstream os;
    os << "channel,capacity,duality_gap,iterations,converged\n";
    for (std::size_t j = 0; j < res.size(); ++j) {
      os << j << ',' << format_real(res[j].capacity) << ',' << format_real(res[j].duality_gap) << ','
         << res[j].iterations << ',' << (res[j].converged ? 1 : 0) << '\n';
    }
    emit(cfg, os.str());
  }
  return 0;
}

struct EstimateRow {
  std::size_t channel;
  std::int64_t senses;
  double estimate;
  std::optional<double> truth;
  dmcid::ConfidenceRadius radius;
};

int run_estimate(const ExperimentConfig& cfg) {
  std::vector<EstimateRow> rows;
  std::optional<dmcid::SenseLedger> ledger;
  if (!cfg.counts_file.empty()) {
    dmcid::CountMatrix counts(1, 2);
    try {
      counts = dmcid::count_matrix_from_csv(dmcid::read_text_file(cfg.counts_file));
    } catch (const dmcid::Error& e) {
      throw ConfigError("--counts", e.what());
    }
    const dmcid::ConfidenceSpec spec(cfg.alpha, counts.input_size(), counts.output_size());
    rows.push_back({0, counts.total(), dmcid::estimate_capacity(counts, cfg.capacity_tol), std::nullopt,
                    dmcid::confidence_radius(spec, counts.total())});
  } else {
    const auto channels = load_channels(cfg);
    print_seed(cfg.seed);
    dmcid::Environment env(channels, cfg.seed);
    const dmcid::ConfidenceSpec spec(cfg.alpha, env.input_size(), env.output_size());
    for (std::size_t j = 0; j < channels.size(); ++j) {
      const auto counts = env.sense_uniform(j, cfg.senses);
      rows.push_back({j, cfg.senses, dmcid::estimate_capacity(counts, cfg.capacity_tol),
                      dmcid::capacity(channels[j], cfg.capacity_tol).capacity,
                      dmcid::confidence_radius(spec, cfg.senses)});
    }
    ledger = env.ledger();
  }
  if (ledger && !cfg.ledger_file.empty()) dmcid::write_text_file(cfg.ledger_file, dmcid::ledger_to_csv(*ledger));

  if (fmt_or(cfg, "csv") == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      arr.push_back({{"channel", r.channel},
                     {"senses", r.senses},
                     {"estimate", r.estimate},
                     {"capacity", r.truth ? nlohmann::json(*r.truth) : nlohmann::json(nullptr)},
                     {"radius", r.radius.value},
                     {"vacuous", r.radius.vacuous}});
    }
    nlohmann::json doc = {{"alpha", cfg.alpha}, {"estimates", arr}};
    if (cfg.counts_file.empty()) doc["seed"] = cfg.seed;
    emit(cfg, dmcid::dump_json(doc));
  } else {
    std::ostringstream os;
    os << "channel,senses,estimate,capacity,radius,vacuous\n";
    for (const auto& r : rows) {
      os << r.channel << ',' << r.senses << ',' << format_real(r.estimate) << ','
         << (r.truth ? format_real(*r.truth) : std::string()) << ',' << format_real(r.radius.value) << ','
         << (r.radius.vacuous ? 1 : 0) << '\n';
    }
    emit(cfg, os.str());
  }
  return 0;
}

int run_identify(const ExperimentConfig& cfg) {
  const auto channels = load_channels(cfg);
  print_seed(cfg.seed);
  dmcid::Environment env(channels, cfg.seed);
  dmcid::IdentifyOptions opt;
  opt.pac = cfg.pac == "median" ? dmcid::PacKind::Median : dmcid::PacKind::Naive;
  opt.median_variant = dmcid::median_variant_of(cfg.median_variant);
  opt.budget_cap = cfg.budget_cap;
  opt.capacity_tol = cfg.capacity_tol;
  auto rep = dmcid::best_channel_id(env, cfg.delta, opt);
  dmcid::score(rep, channels);
  if (!cfg.ledger_file.empty()) dmcid::write_text_file(cfg.ledger_file, dmcid::ledger_to_csv(env.ledger()));
  if (fmt_or(cfg, "json") == "csv") {
    emit(cfg, dmcid::identify_rounds_to_csv(rep));
  } else {
    auto doc = dmcid::to_json(rep);
    doc["seed"] = cfg.seed;
    doc["delta"] = cfg.delta;
    emit(cfg, dmcid::dump_json(doc));
  }
  return 0;
}

int run_pac(const ExperimentConfig& cfg) {
  const auto channels = load_channels(cfg);
  print_seed(cfg.seed);
  dmcid::Environment env(channels, cfg.seed);
  std::vector<std::size_t> all(channels.size());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  const bool median = cfg.alg == "median";
  const auto res = median ? dmcid::median_pac(env, all, cfg.eps, cfg.delta,
                                              dmcid::median_variant_of(cfg.median_variant), cfg.capacity_tol)
                          : dmcid::naive_pac(env, all, cfg.eps, cfg.delta, cfg.capacity_tol);
  if (!cfg.ledger_file.empty()) dmcid::write_text_file(cfg.ledger_file, dmcid::ledger_to_csv(env.ledger()));
  const bool eps_best = dmcid::is_eps_best(channels, res.channel, cfg.eps);
  if (fmt_or(cfg, "json") == "csv") {
    std::ostringstream os;
    os << "round,eps_r,delta_r,T_r\n";
    for (const auto& r : res.rounds)
      os << r.round << ',' << format_real(r.eps) << ',' << format_real(r.delta) << ',' << r.pulls << '\n';
    emit(cfg, os.str());
  } else {
    nlohmann::json rounds = nlohmann::json::array();
    for (const auto& r : res.rounds) rounds.push_back(dmcid::to_json(r));
    emit(cfg, dmcid::dump_json({{"alg", median ? "median" : "naive"},
                                {"eps", cfg.eps},
                                {"delta", cfg.delta},
                                {"seed", cfg.seed},
                                {"channel", res.channel},
                                {"senses", res.senses},
                                {"eps_best", eps_best},
                                {"rounds", rounds}}));
  }
  return 0;
}

int run_lower_bound(const ExperimentConfig& cfg) {
  const auto channels = load_channels(cfg);
  const auto mode = cfg.mode == "independent" ? dmcid::LowerBoundMode::Independent : dmcid::LowerBoundMode::Joint;
  const auto rep = dmcid::lower_bound(channels, cfg.delta, mode);
  if (fmt_or(cfg, "json") == "csv") {
    std::ostringstream os;
    os << "channel,term,input_perm,output_perm\n";
    for (std::size_t i = 0; i < rep.suboptimal.size(); ++i) {
      os << rep.suboptimal[i] << ',' << format_real(rep.per_channel_terms[i]) << ','
         << dmcid::detail::join_indices(rep.chosen_permutations[i].input, ';') << ','
         << dmcid::detail::join_indices(rep.chosen_permutations[i].output, ';') << '\n';
    }
    os << rep.best << ',' << format_real(rep.best_channel_term) << ",,\n";
    emit(cfg, os.str());
  } else {
    auto doc = dmcid::to_json(rep);
    doc["delta"] = cfg.delta;
    emit(cfg, dmcid::dump_json(doc));
  }
  return 0;
}

int run_fig1(const ExperimentConfig& cfg) {
  const auto f = dmcid::fig1_config(cfg);
  std::cerr << "seeds:";
  for (auto s : f.seeds) std::cerr << ' ' << s;
  std::cerr << '\n';
  const auto res = dmcid::run_fig1(f);
  if (fmt_or(cfg, "csv") == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : res.rows) {
      rows.push_back({{"k", r.k}, {"delta_min", r.delta_min}, {"delta", r.delta}, {"seed", r.seed},
                      {"total_senses", r.total_senses}, {"success", r.success}});
    }
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& s : res.summary) {
      summary.push_back({{"k", s.k}, {"delta_min", s.delta_min}, {"realized_delta_min", s.realized_delta_min},
                         {"delta", s.delta}, {"mean_total_senses", s.mean_total_senses},
                         {"success_rate", s.success_rate}});
    }
    emit(cfg, dmcid::dump_json({{"rows", rows}, {"summary", summary}}));
  } else {
    emit(cfg, dmcid::fig1_csv(res.rows));
    (cfg.out.empty() ? std::cerr : std::cout) << dmcid::fig1_summary_csv(res.summary);
  }
  return 0;
}

int run_fig2(const ExperimentConfig& cfg) {
  const auto res = dmcid::run_fig2(dmcid::fig2_config(cfg));
  if (fmt_or(cfg, "csv") == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : res.rows) {
      rows.push_back({{"k", r.k}, {"eps", r.eps}, {"delta", r.delta}, {"naive_budget", r.naive_budget},
                      {"median_budget", r.median_budget}, {"crossover_flag", r.crossover_flag}});
    }
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : res.crossings) {
      cs.push_back({{"eps", c.eps}, {"delta", c.delta}, {"sign_changes", c.sign_changes},
                    {"crossing_k", c.crossing_k ? nlohmann::json(*c.crossing_k) : nlohmann::json(nullptr)}});
    }
    emit(cfg, dmcid::dump_json({{"rows", rows}, {"crossings", cs}}));
  } else {
    emit(cfg, dmcid::fig2_csv(res.rows));
    (cfg.out.empty() ? std::cerr : std::cout) << dmcid::fig2_crossings_text(res.crossings);
  }
  return 0;
}

// Value of --config given as "--config F" or "--config=F", if any.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) return argv[i + 1];
    if (std::strncmp(argv[i], "--config=", 9) == 0) return argv[i] + 9;
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  ExperimentConfig cfg;
  try {
    const auto config_path = find_config_path(argc, argv);
    if (!config_path.empty()) {
      std::string text;
      try {
        text = dmcid::read_text_file(config_path);
      } catch (const dmcid::Error& e) {
        throw ConfigError("--config", e.what());
      }
      dmcid::apply_config_json(cfg, text);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  CLI::App app{"Best-capacity channel identification by simulated sensing"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config; keys are long flag names without dashes");

  std::string settings_text;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--channels", cfg.channels_file, "JSON channel set");
    sub->add_option("--out", cfg.out, "Output path (default stdout)");
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--capacity-tol", cfg.capacity_tol, "Blahut-Arimoto duality-gap tolerance");
  };
  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", cfg.seed, "Random seed"); };
  auto add_ledger = [&](CLI::App* sub) { sub->add_option("--ledger", cfg.ledger_file, "Write the sense ledger CSV"); };
  auto add_pac_flags = [&](CLI::App* sub) {
    sub->add_option("--pac", cfg.pac, "PAC subroutine {naive|median}");
    sub->add_option("--median-variant", cfg.median_variant, "MedianPAC second term {eps2|eps}");
  };

  auto* cap = app.add_subcommand("capacity", "Capacities of a channel set");
  add_common(cap);

  auto* est = app.add_subcommand("estimate", "Plug-in capacity estimates with confidence radii");
  add_common(est);
  add_seed(est);
  add_ledger(est);
  est->add_option("--counts", cfg.counts_file, "Count CSV x,y,count to estimate from");
  est->add_option("--senses", cfg.senses, "Senses per channel when simulating");
  est->add_option("--alpha", cfg.alpha, "Confidence parameter of the radius");

  auto* idf = app.add_subcommand("identify", "Identify the best channel by gap elimination");
  add_common(idf);
  add_seed(idf);
  add_ledger(idf);
  add_pac_flags(idf);
  idf->add_option("--delta", cfg.delta, "Error probability");
  idf->add_option("--alg", cfg.alg, "Algorithm {gap}");
  idf->add_option("--budget-cap", cfg.budget_cap, "Stop before exceeding this many senses (0 = off)");

  auto* pac = app.add_subcommand("pac", "Find an eps-best channel");
  add_common(pac);
  add_seed(pac);
  add_ledger(pac);
  pac->add_option("--alg", cfg.alg, "Algorithm {naive|median}");
  pac->add_option("--eps", cfg.eps, "Tolerance");
  pac->add_option("--delta", cfg.delta, "Error probability");
  pac->add_option("--median-variant", cfg.median_variant, "MedianPAC second term {eps2|eps}");

  auto* lb = app.add_subcommand("lower-bound", "Lower bound on expected senses");
  add_common(lb);
  lb->add_option("--delta", cfg.delta, "Error probability");
  lb->add_option("--mode", cfg.mode, "Relabeling search {joint|independent}");

  auto* f1 = app.add_subcommand("fig1", "Total senses of gap elimination against delta");
  f1->add_option("--out", cfg.out, "Output path (default stdout)");
  f1->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  f1->add_option("--seed", cfg.seed, "First seed");
  f1->add_option("--seeds", cfg.seeds, "Explicit seed list");
  f1->add_option("--reps", cfg.reps, "Replications (seeds seed..seed+reps-1)");
  f1->add_option("--ks", cfg.ks, "Channel counts");
  f1->add_option("--delta-mins", cfg.delta_mins, "Target best-vs-runner-up gaps");
  f1->add_option("--deltas", cfg.deltas, "Error probabilities");
  f1->add_option("--generation-seed", cfg.generation_seed, "Seed of the channel-set generator");
  f1->add_option("--tolerance", cfg.tolerance, "Accepted deviation from the target gap");
  f1->add_option("--max-attempts", cfg.max_attempts, "Rejection-sampling attempts per set");
  f1->add_option("--budget-cap", cfg.budget_cap, "Per-run sense cap (0 = off)");
  f1->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
  f1->add_option("--capacity-tol", cfg.capacity_tol, "Blahut-Arimoto duality-gap tolerance");
  add_pac_flags(f1);

  auto* f2 = app.add_subcommand("fig2", "NaivePAC vs MedianPAC budgets over k");
  f2->add_option("--out", cfg.out, "Output path (default stdout)");
  f2->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  f2->add_option("--ks", cfg.ks, "Channel counts (default 4,8,...,1024)");
  f2->add_option("--settings", settings_text, "eps:delta pairs, comma separated");
  f2->add_option("--median-variant", cfg.median_variant, "MedianPAC second term {eps2|eps}");

  for (auto* sub : app.get_subcommands({})) sub->add_option("--config", config_path, "JSON config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    for (auto* sub : app.get_subcommands()) cfg.experiment = sub->get_name();
    if (!settings_text.empty()) cfg.settings = parse_settings(settings_text);
    dmcid::validate(cfg);

    const auto& e = cfg.experiment;
    if (e == "capacity") return run_capacity(cfg);
    if (e == "estimate") return run_estimate(cfg);
    if (e == "identify") return run_identify(cfg);
    if (e == "pac") return run_pac(cfg);
    if (e == "lower-bound") return run_lower_bound(cfg);
    if (e == "fig1") return run_fig1(cfg);
    return run_fig2(cfg);
  } catch (const ConfigError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitRuntime;
  }
}
