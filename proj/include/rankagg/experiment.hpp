#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankagg/combiner.hpp"
#include "rankagg/dataset_io.hpp"
#include "rankagg/errors.hpp"
#include "rankagg/footrule.hpp"
#include "rankagg/generators.hpp"
#include "rankagg/random.hpp"
#include "rankagg/ranking.hpp"

namespace rankagg {

inline constexpr const char* kLibraryVersion = "0.1.0";

// The three aggregation pipelines exposed to experiments and the CLI.
enum class AggregatorKind { footrule, kemeny2, kemeny_ptas };

inline const char* aggregator_name(AggregatorKind k) {
  switch (k) {
    case AggregatorKind::footrule: return "footrule";
    case AggregatorKind::kemeny2: return "kemeny2";
    case AggregatorKind::kemeny_ptas: return "kemeny-ptas";
  }
  return "?";
}

inline AggregatorKind parse_aggregator(const std::string& name) {
  if (name == "footrule") return AggregatorKind::footrule;
  if (name == "kemeny2") return AggregatorKind::kemeny2;
  if (name == "kemeny-ptas") return AggregatorKind::kemeny_ptas;
  throw invalid_parameter_error("unknown objective '" + name + "'");
}

inline PrivacyModel parse_model(const std::string& name) {
  if (name == "pure") return PrivacyModel::pure;
  if (name == "zcdp") return PrivacyModel::zcdp;
  if (name == "approx") return PrivacyModel::approx;
  if (name == "ldp") return PrivacyModel::ldp;
  throw invalid_parameter_error("unknown model '" + name + "'");
}

inline GeneratorKind parse_generator(const std::string& name) {
  if (name == "mallows") return GeneratorKind::mallows;
  if (name == "uniform") return GeneratorKind::uniform;
  if (name == "unanimous") return GeneratorKind::unanimous;
  if (name == "adversarial-two-block") return GeneratorKind::adversarial_two_block;
  throw invalid_parameter_error("unknown generator '" + name + "'");
}

inline Regime parse_regime(const std::string& name) {
  if (name == "auto") return Regime::automatic;
  if (name == "small") return Regime::small;
  if (name == "large") return Regime::large;
  throw invalid_parameter_error("unknown regime '" + name + "'");
}

// budget for a model at a magnitude: epsilon for pure/ldp, rho for zcdp,
// (epsilon, delta) for approx
inline PrivacyBudget budget_for_model(PrivacyModel model, double magnitude, double delta) {
  switch (model) {
    case PrivacyModel::pure:
    case PrivacyModel::ldp: return PrivacyBudget::pure(magnitude);
    case PrivacyModel::zcdp: return PrivacyBudget::zcdp(magnitude);
    case PrivacyModel::approx: return PrivacyBudget::approx(magnitude, delta);
  }
  throw invalid_parameter_error("unknown model");
}

struct ExperimentSpec {
  GeneratorKind generator = GeneratorKind::mallows;
  double phi = 0.5;
  std::vector<int> ms;
  std::vector<std::size_t> ns;
  std::vector<double> budgets;  // epsilon or rho depending on model
  std::vector<PrivacyModel> models;
  double delta = 1e-6;
  std::vector<AggregatorKind> objectives;
  Regime regime = Regime::automatic;
  int buckets = 0;  // < 1: default bucket count
  int trials = 1;
  std::uint64_t seed = 0;
  std::string output_dir = "experiment-out";
  // not reachable from config files; programmatic callers may disable
  // noise to measure the non-private pipeline
  MechanismOptions options;
};

inline void validate(const ExperimentSpec& spec) {
  if (spec.ms.empty() || spec.ns.empty() || spec.budgets.empty() || spec.models.empty() ||
      spec.objectives.empty())
    throw invalid_input_error("experiment grid must be nonempty in every dimension");
  if (spec.trials < 1) throw invalid_parameter_error("trials must be >= 1");
  if (!(spec.phi >= 0.0 && spec.phi <= 1.0))
    throw invalid_parameter_error("phi must be in [0, 1]");
  for (int m : spec.ms)
    if (m < 1) throw invalid_parameter_error("m must be >= 1");
  for (std::size_t n : spec.ns)
    if (n < 1) throw invalid_parameter_error("n must be >= 1");
  for (double b : spec.budgets)
    if (!(b > 0)) throw invalid_parameter_error("budgets must be > 0");
  for (PrivacyModel model : spec.models) {
    budget_for_model(model, spec.budgets.front(), spec.delta);  // validates delta
    if (model == PrivacyModel::ldp)
      for (AggregatorKind k : spec.objectives)
        if (k == AggregatorKind::kemeny_ptas)
          throw invalid_parameter_error("the local model supports footrule and kemeny2 only");
  }
  if (spec.output_dir.empty()) throw invalid_parameter_error("output dir must be set");
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

}  // namespace detail

// Key-value experiment config: one `key = value` per line, `#` comments,
// comma-separated lists for the grid axes. Keys: generator, phi, m, n,
// budget, model, delta, objective, regime, buckets, trials, seed, output.
inline ExperimentSpec parse_experiment_spec(std::istream& in) {
  ExperimentSpec spec;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw invalid_input_error("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    try {
      if (key == "generator") {
        spec.generator = parse_generator(value);
      } else if (key == "phi") {
        spec.phi = std::stod(value);
      } else if (key == "m") {
        spec.ms.clear();
        for (const std::string& v : detail::split_list(value)) spec.ms.push_back(std::stoi(v));
      } else if (key == "n") {
        spec.ns.clear();
        for (const std::string& v : detail::split_list(value))
          spec.ns.push_back(static_cast<std::size_t>(std::stoull(v)));
      } else if (key == "budget") {
        spec.budgets.clear();
        for (const std::string& v : detail::split_list(value))
          spec.budgets.push_back(std::stod(v));
      } else if (key == "model") {
        spec.models.clear();
        for (const std::string& v : detail::split_list(value))
          spec.models.push_back(parse_model(v));
      } else if (key == "delta") {
        spec.delta = std::stod(value);
      } else if (key == "objective") {
        spec.objectives.clear();
        for (const std::string& v : detail::split_list(value))
          spec.objectives.push_back(parse_aggregator(v));
      } else if (key == "regime") {
        spec.regime = parse_regime(value);
      } else if (key == "buckets") {
        spec.buckets = value == "auto" ? 0 : std::stoi(value);
      } else if (key == "trials") {
        spec.trials = std::stoi(value);
      } else if (key == "seed") {
        spec.seed = std::stoull(value);
      } else if (key == "output") {
        spec.output_dir = value;
      } else {
        throw invalid_input_error("unknown key '" + key + "'");
      }
    } catch (const invalid_input_error&) {
      throw;
    } catch (const invalid_parameter_error&) {
      throw;
    } catch (const std::exception&) {
      throw invalid_input_error("line " + std::to_string(line_no) + ": cannot parse value '" +
                                value + "' for key '" + key + "'");
    }
  }
  validate(spec);
  return spec;
}

inline ExperimentSpec parse_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot read " + path);
  return parse_experiment_spec(in);
}

struct TrialOutcome {
  bool ok = false;
  double value = 0;           // objective value of the released ranking
  double excess = 0;          // over brute OPT (m <= 9) or the noiseless run
  bool exact_baseline = false;  // excess is against brute OPT
  bool fallback = false;
  Regime regime_used = Regime::small;
  std::string error;
};

namespace detail {

inline Ranking run_pipeline(AggregatorKind objective, const RankingDataset& data,
                            PrivacyModel model, const PrivacyBudget& budget, Regime regime,
                            int buckets, Rng& rng, const MechanismOptions& options,
                            bool* fallback, Regime* regime_used) {
  if (objective == AggregatorKind::kemeny_ptas) {
    PtasConfig config;
    config.options = options;
    config.buckets = buckets;
    config.warn_below_threshold = false;
    const PtasResult result = kemeny_ptas(data, budget, regime, rng, config);
    if (fallback) *fallback = result.fallback_used;
    if (regime_used) *regime_used = result.regime_used;
    return result.ranking;
  }
  PipelineConfig config;
  config.options = options;
  const AggregateResult result =
      objective == AggregatorKind::footrule
          ? footrule_aggregate(data, budget, model, rng, config)
          : kemeny_via_footrule(data, budget, model, rng, config);
  return result.ranking;
}

inline TrialOutcome run_trial(const ExperimentSpec& spec, AggregatorKind objective, int m,
                              std::size_t n, PrivacyModel model, double magnitude,
                              std::uint64_t trial_seed) {
  TrialOutcome out;
  try {
    const PrivacyBudget budget = budget_for_model(model, magnitude, spec.delta);
    const Objective metric =
        objective == AggregatorKind::footrule ? Objective::footrule : Objective::kemeny;
    Rng trial_rng(trial_seed);
    Rng data_rng = trial_rng.child(0);
    const RankingDataset data =
        generate_dataset(spec.generator, m, n, spec.phi, Ranking::identity(m), data_rng);

    Rng mech_rng = trial_rng.child(1);
    const Ranking released =
        run_pipeline(objective, data, model, budget, spec.regime, spec.buckets, mech_rng,
                     spec.options, &out.fallback, &out.regime_used);
    out.value = avg_distance(released, data, metric);

    if (m <= 9) {
      out.exact_baseline = true;
      out.excess = out.value - brute_force_optimal(data, metric).value;
    } else {
      Rng clean_rng = trial_rng.child(1);
      const Ranking clean = run_pipeline(
          objective, data, model, budget, spec.regime, spec.buckets, clean_rng,
          MechanismOptions::unsafe_noise_disabled_for_testing(), nullptr, nullptr);
      out.excess = out.value - avg_distance(clean, data, metric);
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace detail

struct ExperimentResult {
  std::filesystem::path trials_csv;
  std::filesystem::path aggregate_csv;
  std::filesystem::path timings_csv;
  std::filesystem::path manifest_json;
  std::size_t cells = 0;
  std::size_t failed_trials = 0;
};

// Sweeps the full grid; writes one row per (cell, trial) plus per-cell
// aggregates. trials.csv and aggregate.csv are deterministic given the
// spec; wall-clock timings go to their own file.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  namespace fs = std::filesystem;
  const fs::path dir(spec.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error("cannot create output dir " + dir.string() + ": " + ec.message());

  ExperimentResult result;
  result.trials_csv = dir / "trials.csv";
  result.aggregate_csv = dir / "aggregate.csv";
  result.timings_csv = dir / "timings.csv";
  result.manifest_json = dir / "manifest.json";

  std::ofstream trials_out(result.trials_csv);
  std::ofstream agg_out(result.aggregate_csv);
  std::ofstream timing_out(result.timings_csv);
  if (!trials_out || !agg_out || !timing_out)
    throw io_error("cannot write into " + dir.string());

  trials_out << "generator,phi,m,n,model,budget,delta,objective,regime,trial,seed,status,"
                "value,excess,excess_baseline,fallback\n";
  agg_out << "generator,phi,m,n,model,budget,delta,objective,regime,trials_ok,mean_value,"
             "std_value,mean_excess,std_excess,fallback_rate,failures\n";
  timing_out << "m,n,model,budget,objective,trial,millis\n";

  std::size_t cell_index = 0;
  for (const AggregatorKind objective : spec.objectives)
    for (const PrivacyModel model : spec.models)
      for (const int m : spec.ms)
        for (const std::size_t n : spec.ns)
          for (const double magnitude : spec.budgets) {
            const std::uint64_t cell_seed = derive_seed(spec.seed, cell_index);
            std::vector<TrialOutcome> outcomes;
            for (int trial = 0; trial < spec.trials; ++trial) {
              const std::uint64_t trial_seed =
                  derive_seed(cell_seed, static_cast<std::uint64_t>(trial));
              const auto t0 = std::chrono::steady_clock::now();
              const TrialOutcome out = detail::run_trial(spec, objective, m, n, model,
                                                         magnitude, trial_seed);
              const auto t1 = std::chrono::steady_clock::now();
              const auto millis =
                  std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
              outcomes.push_back(out);
              if (!out.ok) ++result.failed_trials;

              trials_out << generator_name(spec.generator) << ','
                         << detail::format_double(spec.phi) << ',' << m << ',' << n << ','
                         << model_name(model) << ',' << detail::format_double(magnitude) << ','
                         << detail::format_double(spec.delta) << ','
                         << aggregator_name(objective) << ',' << regime_name(spec.regime) << ','
                         << trial << ',' << trial_seed << ',' << (out.ok ? "ok" : "error") << ',';
              if (out.ok)
                trials_out << detail::format_double(out.value) << ','
                           << detail::format_double(out.excess) << ','
                           << (out.exact_baseline ? "opt" : "noiseless") << ','
                           << (out.fallback ? 1 : 0) << "\n";
              else
                trials_out << ",,," << "\n";
              timing_out << m << ',' << n << ',' << model_name(model) << ','
                         << detail::format_double(magnitude) << ','
                         << aggregator_name(objective) << ',' << trial << ',' << millis << "\n";
            }

            double sum_v = 0, sum_v2 = 0, sum_e = 0, sum_e2 = 0;
            std::size_t ok_count = 0, fallback_count = 0;
            for (const TrialOutcome& out : outcomes) {
              if (!out.ok) continue;
              ++ok_count;
              sum_v += out.value;
              sum_v2 += out.value * out.value;
              sum_e += out.excess;
              sum_e2 += out.excess * out.excess;
              if (out.fallback) ++fallback_count;
            }
            const double denom = ok_count > 0 ? static_cast<double>(ok_count) : 1.0;
            const double mean_v = sum_v / denom;
            const double mean_e = sum_e / denom;
            const double var_v = std::max(0.0, sum_v2 / denom - mean_v * mean_v);
            const double var_e = std::max(0.0, sum_e2 / denom - mean_e * mean_e);
            agg_out << generator_name(spec.generator) << ','
                    << detail::format_double(spec.phi) << ',' << m << ',' << n << ','
                    << model_name(model) << ',' << detail::format_double(magnitude) << ','
                    << detail::format_double(spec.delta) << ',' << aggregator_name(objective)
                    << ',' << regime_name(spec.regime) << ',' << ok_count << ','
                    << detail::format_double(mean_v) << ','
                    << detail::format_double(std::sqrt(var_v)) << ','
                    << detail::format_double(mean_e) << ','
                    << detail::format_double(std::sqrt(var_e)) << ','
                    << detail::format_double(ok_count > 0
                                                 ? static_cast<double>(fallback_count) / denom
                                                 : 0.0)
                    << ',' << (outcomes.size() - ok_count) << "\n";
            ++cell_index;
          }
  result.cells = cell_index;

  nlohmann::json manifest;
  manifest["library_version"] = kLibraryVersion;
  manifest["seed"] = spec.seed;
  manifest["generator"] = generator_name(spec.generator);
  manifest["phi"] = spec.phi;
  manifest["m"] = spec.ms;
  manifest["n"] = spec.ns;
  manifest["budget"] = spec.budgets;
  manifest["delta"] = spec.delta;
  std::vector<std::string> model_names, objective_names;
  for (PrivacyModel model : spec.models) model_names.emplace_back(model_name(model));
  for (AggregatorKind k : spec.objectives) objective_names.emplace_back(aggregator_name(k));
  manifest["model"] = model_names;
  manifest["objective"] = objective_names;
  manifest["regime"] = regime_name(spec.regime);
  manifest["buckets"] = spec.buckets;
  manifest["trials"] = spec.trials;
  manifest["cells"] = result.cells;
  manifest["failed_trials"] = result.failed_trials;
  manifest["files"] = {"trials.csv", "aggregate.csv", "timings.csv"};
  manifest["notes"] = "trials.csv and aggregate.csv are deterministic given this manifest; "
                      "timings.csv records wall-clock time and varies between runs";
  std::ofstream manifest_out(result.manifest_json);
  if (!manifest_out) throw io_error("cannot write " + result.manifest_json.string());
  manifest_out << manifest.dump(2) << "\n";
  return result;
}

}  // namespace rankagg
