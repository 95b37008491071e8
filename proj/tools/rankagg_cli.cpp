// Command-line driver: generate datasets, run the private aggregation
// pipelines, evaluate rankings, enumerate exact optima, and sweep
// benchmark grids. Exit codes: 0 ok, 2 usage or invalid input, 3 budget
// exhausted, 4 I/O failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rankagg/rankagg.hpp"

namespace {

using nlohmann::json;

std::string ranking_csv(const rankagg::Ranking& r) {
  std::ostringstream out;
  for (int u = 1; u <= r.m(); ++u) {
    if (u > 1) out << ',';
    out << r.position(u);
  }
  return out.str();
}

// --epsilon/--rho/--delta must match the chosen model
rankagg::PrivacyBudget budget_from_flags(rankagg::PrivacyModel model,
                                         std::optional<double> epsilon,
                                         std::optional<double> rho,
                                         std::optional<double> delta) {
  using rankagg::PrivacyModel;
  switch (model) {
    case PrivacyModel::pure:
    case PrivacyModel::ldp:
      if (!epsilon) throw rankagg::invalid_parameter_error("this model requires --epsilon");
      if (rho || delta)
        throw rankagg::invalid_parameter_error("--rho and --delta do not apply to this model");
      return rankagg::PrivacyBudget::pure(*epsilon);
    case PrivacyModel::zcdp:
      if (!rho) throw rankagg::invalid_parameter_error("model zcdp requires --rho");
      if (epsilon || delta)
        throw rankagg::invalid_parameter_error("--epsilon and --delta do not apply to zcdp");
      return rankagg::PrivacyBudget::zcdp(*rho);
    case PrivacyModel::approx:
      if (!epsilon || !delta)
        throw rankagg::invalid_parameter_error("model approx requires --epsilon and --delta");
      if (rho) throw rankagg::invalid_parameter_error("--rho does not apply to approx");
      return rankagg::PrivacyBudget::approx(*epsilon, *delta);
  }
  throw rankagg::invalid_parameter_error("unknown model");
}

json budget_json(rankagg::PrivacyModel model, std::optional<double> epsilon,
                 std::optional<double> rho, std::optional<double> delta) {
  json out;
  out["model"] = rankagg::model_name(model);
  if (epsilon) out["epsilon"] = *epsilon;
  if (rho) out["rho"] = *rho;
  if (delta) out["delta"] = *delta;
  return out;
}

int parse_buckets(const std::string& text) {
  if (text == "auto") return 0;
  try {
    std::size_t used = 0;
    const int b = std::stoi(text, &used);
    if (used != text.size() || b < 1) throw std::invalid_argument("bad");
    return b;
  } catch (const std::exception&) {
    throw rankagg::invalid_parameter_error("--buckets must be 'auto' or a positive integer");
  }
}

rankagg::Ranking ranking_from_csv(const std::string& text) {
  return rankagg::Ranking(rankagg::detail::parse_positions_line(text, 1));
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw rankagg::io_error("cannot write " + path);
  out << content;
  if (!out) throw rankagg::io_error("failed while writing " + path);
}

struct GenerateArgs {
  std::string generator = "mallows";
  int m = 0;
  std::size_t n = 0;
  double phi = 0.5;
  std::uint64_t seed = 0;
  std::string out;
};

int run_generate(const GenerateArgs& args) {
  rankagg::Rng rng(args.seed);
  const rankagg::RankingDataset data =
      rankagg::generate_dataset(rankagg::parse_generator(args.generator), args.m, args.n,
                                args.phi, rankagg::Ranking::identity(args.m), rng);
  rankagg::write_dataset(args.out, data);
  return 0;
}

struct AggregateArgs {
  std::string in;
  std::string objective;
  std::string model;
  std::optional<double> epsilon, rho, delta;
  std::string regime = "auto";
  std::string buckets = "auto";
  std::uint64_t seed = 0;
  bool report = false;
  std::string dump_messages;
  std::string out;
};

int run_aggregate(const AggregateArgs& args) {
  const rankagg::AggregatorKind objective = rankagg::parse_aggregator(args.objective);
  const rankagg::PrivacyModel model = rankagg::parse_model(args.model);
  const rankagg::PrivacyBudget budget =
      budget_from_flags(model, args.epsilon, args.rho, args.delta);
  if (model == rankagg::PrivacyModel::ldp && objective == rankagg::AggregatorKind::kemeny_ptas)
    throw rankagg::invalid_parameter_error("the local model supports footrule and kemeny2 only");
  if (!args.dump_messages.empty() && model != rankagg::PrivacyModel::ldp)
    throw rankagg::invalid_parameter_error("--dump-messages applies to the ldp model only");

  const rankagg::RankingDataset data = rankagg::read_dataset(args.in);
  rankagg::Rng rng(args.seed);

  std::ofstream message_log;
  if (!args.dump_messages.empty()) {
    message_log.open(args.dump_messages);
    if (!message_log) throw rankagg::io_error("cannot write " + args.dump_messages);
  }

  json report;
  rankagg::Ranking released = rankagg::Ranking::identity(data.m());
  rankagg::Objective metric = rankagg::Objective::kemeny;
  if (objective == rankagg::AggregatorKind::kemeny_ptas) {
    rankagg::PtasConfig config;
    config.buckets = parse_buckets(args.buckets);
    const rankagg::PtasResult result =
        rankagg::kemeny_ptas(data, budget, rankagg::parse_regime(args.regime), rng, config);
    released = result.ranking;
    report["consumed"] = result.audit.consumed;
    if (args.report) {
      report["regime_used"] = rankagg::regime_name(result.regime_used);
      report["fallback_used"] = result.fallback_used;
      report["bounded"] = result.bounded;
      report["imbalanced_pairs"] = result.imbalanced_count;
      report["balanced_pairs"] = result.balanced_count;
    }
  } else {
    metric = objective == rankagg::AggregatorKind::footrule ? rankagg::Objective::footrule
                                                            : rankagg::Objective::kemeny;
    rankagg::PipelineConfig config;
    if (message_log.is_open())
      config.message_sink = [&message_log](std::size_t user, std::uint64_t seed,
                                           const std::vector<double>& message) {
        json line;
        line["user"] = user;
        line["seed"] = seed;
        line["message"] = message;
        message_log << line.dump() << "\n";
      };
    const rankagg::AggregateResult result =
        objective == rankagg::AggregatorKind::footrule
            ? rankagg::footrule_aggregate(data, budget, model, rng, config)
            : rankagg::kemeny_via_footrule(data, budget, model, rng, config);
    released = result.ranking;
    report["consumed"] = result.audit.consumed;
  }

  report["objective_value"] = rankagg::avg_distance(released, data, metric);
  const std::optional<double> opt = rankagg::opt_if_computable(data, metric);
  report["opt_if_computable"] = opt ? json(*opt) : json(nullptr);
  report["budget"] = budget_json(model, args.epsilon, args.rho, args.delta);
  report["seed"] = args.seed;

  const std::string csv = ranking_csv(released);
  if (args.out.empty())
    std::cout << csv << "\n";
  else
    write_text_file(args.out, csv + "\n");
  std::cout << report.dump(2) << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string in;
  std::string ranking;
  std::string ranking_file;
  std::string objective = "kemeny";
};

rankagg::Objective parse_metric(const std::string& name) {
  if (name == "kemeny") return rankagg::Objective::kemeny;
  if (name == "footrule") return rankagg::Objective::footrule;
  throw rankagg::invalid_parameter_error("objective must be kemeny or footrule");
}

int run_evaluate(const EvaluateArgs& args) {
  if (args.ranking.empty() == args.ranking_file.empty())
    throw rankagg::invalid_parameter_error("provide exactly one of --ranking, --ranking-file");
  std::string text = args.ranking;
  if (!args.ranking_file.empty()) {
    std::ifstream in(args.ranking_file);
    if (!in) throw rankagg::io_error("cannot read " + args.ranking_file);
    while (std::getline(in, text) && text.empty()) {
    }
  }
  const rankagg::RankingDataset data = rankagg::read_dataset(args.in);
  const rankagg::Ranking sigma = ranking_from_csv(text);
  const rankagg::Objective metric = parse_metric(args.objective);
  json out;
  out["objective"] = rankagg::objective_name(metric);
  out["objective_value"] = rankagg::avg_distance(sigma, data, metric);
  out["m"] = data.m();
  out["n"] = data.n();
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct OracleArgs {
  std::string in;
  std::string objective = "kemeny";
};

int run_oracle(const OracleArgs& args) {
  const rankagg::RankingDataset data = rankagg::read_dataset(args.in);
  const rankagg::Objective metric = parse_metric(args.objective);
  const rankagg::BruteForceResult result = rankagg::brute_force_optimal(data, metric);
  std::cout << ranking_csv(result.ranking) << "\n";
  json out;
  out["objective"] = rankagg::objective_name(metric);
  out["objective_value"] = result.value;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_benchmark(const std::string& config_path) {
  const rankagg::ExperimentSpec spec = rankagg::parse_experiment_spec(config_path);
  const rankagg::ExperimentResult result = rankagg::run_experiment(spec);
  json out;
  out["cells"] = result.cells;
  out["failed_trials"] = result.failed_trials;
  out["trials_csv"] = result.trials_csv.string();
  out["aggregate_csv"] = result.aggregate_csv.string();
  out["timings_csv"] = result.timings_csv.string();
  out["manifest"] = result.manifest_json.string();
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private rank aggregation"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand("generate", "Sample a synthetic dataset");
  generate->add_option("--generator", gen.generator,
                       "mallows|uniform|unanimous|adversarial-two-block");
  generate->add_option("--m", gen.m, "number of candidates")->required();
  generate->add_option("--n", gen.n, "number of rankings")->required();
  generate->add_option("--phi", gen.phi, "Mallows dispersion in [0,1]");
  generate->add_option("--seed", gen.seed, "generator seed");
  generate->add_option("--out", gen.out, "output path (.json for JSON form)")->required();

  AggregateArgs agg;
  CLI::App* aggregate = app.add_subcommand("aggregate", "Run a private aggregation pipeline");
  aggregate->add_option("--in", agg.in, "dataset path")->required();
  aggregate->add_option("--objective", agg.objective, "footrule|kemeny2|kemeny-ptas")
      ->required();
  aggregate->add_option("--model", agg.model, "pure|zcdp|approx|ldp")->required();
  aggregate->add_option("--epsilon", agg.epsilon, "epsilon for pure/approx/ldp");
  aggregate->add_option("--rho", agg.rho, "rho for zcdp");
  aggregate->add_option("--delta", agg.delta, "delta for approx");
  aggregate->add_option("--regime", agg.regime, "auto|small|large (kemeny-ptas)");
  aggregate->add_option("--buckets", agg.buckets, "auto or a bucket count (kemeny-ptas)");
  aggregate->add_option("--seed", agg.seed, "mechanism seed");
  aggregate->add_flag("--report", agg.report, "extend the JSON report with solver details");
  aggregate->add_option("--dump-messages", agg.dump_messages,
                        "write the simulated ldp message log to this path");
  aggregate->add_option("--out", agg.out, "write the released ranking to this path");

  EvaluateArgs eval;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Cost of a ranking against a dataset");
  evaluate->add_option("--in", eval.in, "dataset path")->required();
  evaluate->add_option("--ranking", eval.ranking, "comma-separated positions");
  evaluate->add_option("--ranking-file", eval.ranking_file, "file holding one ranking line");
  evaluate->add_option("--objective", eval.objective, "kemeny|footrule");

  OracleArgs oracle;
  CLI::App* oracle_cmd = app.add_subcommand("oracle", "Exact optimum by enumeration (m <= 10)");
  oracle_cmd->add_option("--in", oracle.in, "dataset path")->required();
  oracle_cmd->add_option("--objective", oracle.objective, "kemeny|footrule");

  std::string config_path;
  CLI::App* benchmark = app.add_subcommand("benchmark", "Run an experiment sweep from a config");
  benchmark->add_option("--config", config_path, "key=value experiment config")->required();

  try {
    app.parse(argc, argv);
    if (generate->parsed()) return run_generate(gen);
    if (aggregate->parsed()) return run_aggregate(agg);
    if (evaluate->parsed()) return run_evaluate(eval);
    if (oracle_cmd->parsed()) return run_oracle(oracle);
    if (benchmark->parsed()) return run_benchmark(config_path);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const rankagg::budget_exhausted_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const rankagg::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
