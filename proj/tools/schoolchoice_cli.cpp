// schoolchoice-cli: simulate, evaluate, manipulate and oracle subcommands.
//
// Exit codes: 0 success, 2 usage or validation error, 1 runtime error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "schoolchoice/market.hpp"
#include "schoolchoice/mechanisms.hpp"
#include "schoolchoice/simulation.hpp"
#include "schoolchoice/theory.hpp"

namespace sc = schoolchoice;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

// Thrown for argument combinations CLI11 cannot check on its own.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<sc::MechanismKind> parse_mechanisms(
    const std::vector<std::string>& names) {
  std::vector<sc::MechanismKind> out;
  for (const auto& name : names) {
    const auto kind = sc::parse_mechanism(name);
    if (!kind) throw UsageError("unknown mechanism '" + name + "'");
    out.push_back(*kind);
  }
  return out;
}

std::vector<sc::ManipulationKind> parse_kinds(
    const std::vector<std::string>& names) {
  std::vector<sc::ManipulationKind> out;
  for (const auto& name : names) {
    const auto kind = sc::parse_manipulation(name);
    if (!kind) throw UsageError("unknown manipulation '" + name + "'");
    out.push_back(*kind);
  }
  return out;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
}

std::string fmt(double v, const char* spec = "%.10f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

struct ExperimentFlags {
  std::string config_path;
  std::int32_t n = 100;
  std::int32_t reps = 1000;
  std::uint64_t seed = 42;
  std::vector<std::string> mechanisms;
  std::vector<std::string> thresholds;
  std::int32_t threads = 0;
  std::string market;
  std::string out;

  CLI::Option* n_opt = nullptr;
  CLI::Option* reps_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* mech_opt = nullptr;
  CLI::Option* thresh_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* market_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key=value config file");
    n_opt = cmd->add_option("--n", n, "market size");
    reps_opt = cmd->add_option("--reps", reps, "replications");
    seed_opt = cmd->add_option("--seed", seed, "master seed");
    mech_opt = cmd->add_option("--mechanisms", mechanisms,
                               "comma-separated subset of DA,TTC,RSD,RM")
                   ->delimiter(',');
    thresh_opt = cmd->add_option("--thresholds", thresholds,
                                 "rank cutoffs, e.g. 1,2,log,0.1n")
                     ->delimiter(',');
    threads_opt = cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
    market_opt = cmd->add_option("--market", market,
                                 "use this market file in every replication");
    cmd->add_option("--out", out, "output CSV path (default stdout)");
  }

  sc::ExperimentConfig build(sc::ExperimentConfig base) const {
    if (!config_path.empty()) base = sc::load_config(config_path, std::move(base));
    if (n_opt->count()) base.n = n;
    if (reps_opt->count()) base.replications = reps;
    if (seed_opt->count()) base.master_seed = seed;
    if (mech_opt->count()) base.mechanisms = parse_mechanisms(mechanisms);
    if (thresh_opt->count()) {
      base.thresholds.clear();
      for (const auto& t : thresholds) {
        base.thresholds.push_back(sc::Threshold::parse(t));
      }
    }
    if (threads_opt->count()) base.threads = threads;
    if (market_opt->count()) base.market_file = market;
    return base;
  }
};

int run_evaluate(const std::string& market_path,
                 const std::vector<std::string>& mechanisms, std::uint64_t seed,
                 bool balance, const std::string& out_path) {
  sc::Market market = sc::load_market(market_path);
  if (balance) market = sc::balance_capacities(market);
  std::string csv = "mechanism,student,school,rank\n";
  for (const auto kind : parse_mechanisms(mechanisms)) {
    const auto allocation = sc::run_mechanism(kind, market, seed);
    for (sc::StudentId t = 0; t < market.n_students(); ++t) {
      const sc::SchoolId s = allocation[t];
      csv += std::string(sc::to_string(kind)) + "," +
             std::to_string(market.student_label(t)) + "," +
             (s == sc::kUnassigned ? std::string()
                                   : std::to_string(market.schools()[s].label)) +
             "," + std::to_string(sc::rank_of(market, t, s)) + "\n";
    }
  }
  emit(csv, out_path);
  return 0;
}

int run_oracle(const std::string& check, std::int64_t n, std::int64_t k,
               std::int64_t j, const std::string& out_path) {
  namespace th = sc::theory;
  std::string csv = "quantity,n,value\n";
  auto row = [&](const std::string& name, double value) {
    csv += name + "," + std::to_string(n) + "," + fmt(value) + "\n";
  };
  if (check == "rsd_envy") {
    const auto no_envy = th::rsd_no_envy_fraction(n);
    row("rsd_no_envy_fraction", no_envy.value);
    row("rsd_envy_fraction", 1.0 - no_envy.value);
  } else if (check == "rm_envy") {
    row("rm_envy_limit", th::rm_envy_limit().value);
    row("rm_envy_partial", 1.0 - th::rm_no_envy_partial_sum(n));
  } else if (check == "ttc_avg_rank") {
    row("ttc_expected_avg_rank", th::ttc_expected_avg_rank(n).value);
  } else if (check == "rsd_prob") {
    row("rsd_rank_probability_k" + std::to_string(k) + "_j" + std::to_string(j),
        th::rsd_rank_probability(k, j, n));
  } else if (check == "rm_pmf") {
    row("rm_rank_pmf", th::rm_rank_pmf(n));
  } else if (check == "reference") {
    for (const auto& [kind, curve] : th::reference_curves(n)) {
      const std::string name(sc::to_string(kind));
      row(name + "_avg_reference", curve.avg);
      if (curve.avg_lower) row(name + "_avg_lower_bound", *curve.avg_lower);
      row(name + "_max_reference", curve.max);
      if (curve.max_observed) row(name + "_max_observed", *curve.max_observed);
    }
  } else {
    throw UsageError("unknown check '" + check +
                     "' (rsd_envy, rm_envy, ttc_avg_rank, rsd_prob, rm_pmf, "
                     "reference)");
  }
  emit(csv, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"School choice mechanism laboratory"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand(
      "simulate", "Monte Carlo rank statistics on uniform random markets");
  ExperimentFlags sim_flags;
  sim_flags.attach(simulate);

  auto* evaluate =
      app.add_subcommand("evaluate", "Per-student ranks on a market file");
  std::string eval_market;
  std::vector<std::string> eval_mechanisms{"DA", "TTC", "RM"};
  std::uint64_t eval_seed = 42;
  bool eval_balance = false;
  std::string eval_out;
  evaluate->add_option("--market", eval_market, "market file")->required();
  evaluate->add_option("--mechanisms", eval_mechanisms, "mechanisms to run")
      ->delimiter(',');
  evaluate->add_option("--seed", eval_seed, "seed for RSD and RM");
  evaluate->add_flag("--balance", eval_balance,
                     "trim capacities to the number of students first");
  evaluate->add_option("--out", eval_out, "output CSV path (default stdout)");

  auto* manipulate = app.add_subcommand(
      "manipulate", "RM under Drop-Assigned / Drop-First misreporting");
  ExperimentFlags man_flags;
  man_flags.attach(manipulate);
  std::vector<std::string> kinds{"DropAssigned", "DropFirst"};
  std::vector<double> shares{0.0, 0.2, 0.4, 0.6, 0.8};
  auto* kind_opt =
      manipulate->add_option("--kind", kinds, "DropAssigned,DropFirst")
          ->delimiter(',');
  auto* share_opt =
      manipulate->add_option("--shares", shares, "shares of eligible students")
          ->delimiter(',');

  auto* oracle =
      app.add_subcommand("oracle", "Closed-form reference quantities");
  std::string check;
  std::int64_t oracle_n = 100;
  std::int64_t oracle_k = 1;
  std::int64_t oracle_j = 1;
  std::string oracle_out;
  oracle->add_option("--check", check, "quantity to compute")->required();
  oracle->add_option("--n", oracle_n, "market size / term count");
  oracle->add_option("--k", oracle_k, "dictator index for rsd_prob");
  oracle->add_option("--j", oracle_j, "rank for rsd_prob");
  oracle->add_option("--out", oracle_out, "output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (simulate->parsed()) {
      const auto config = sim_flags.build({});
      emit(sc::report_csv(sc::run_experiment(config)), sim_flags.out);
    } else if (evaluate->parsed()) {
      return run_evaluate(eval_market, eval_mechanisms, eval_seed, eval_balance,
                          eval_out);
    } else if (manipulate->parsed()) {
      auto config = man_flags.build({});
      if (kind_opt->count() || share_opt->count() || config.manipulations.empty()) {
        config.manipulations.clear();
        for (const auto kind : parse_kinds(kinds)) {
          for (const double share : shares) {
            config.manipulations.push_back({kind, share});
          }
        }
      }
      emit(sc::report_csv(sc::run_experiment(config)), man_flags.out);
    } else if (oracle->parsed()) {
      return run_oracle(check, oracle_n, oracle_k, oracle_j, oracle_out);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kExitValidation;
  } catch (const sc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const sc::ValidationError& e) {
    std::cerr << "invalid market: " << e.what() << "\n";
    return kExitValidation;
  } catch (const sc::ParseError& e) {
    std::cerr << "market parse error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::out_of_range& e) {
    std::cerr << "out of range: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
