// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.
// Tolerances are fixed here and must not be relaxed to make a run pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "schoolchoice/assignment.hpp"
#include "schoolchoice/mechanisms.hpp"
#include "schoolchoice/metrics.hpp"
#include "schoolchoice/simulation.hpp"
#include "schoolchoice/theory.hpp"
#include "support/oracles.hpp"

namespace sc = schoolchoice;
using sc::MechanismKind;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Accumulates sub-checks of one criterion and a readable trail of values.
class Verdict {
 public:
  void check(bool ok, const std::string& what) {
    pass_ = pass_ && ok;
    if (!detail_.empty()) detail_ += "; ";
    detail_ += what;
    if (!ok) detail_ += " [x]";
  }
  void within(const std::string& name, double value, double target, double tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s=%.4g (%.4g+-%.4g)", name.c_str(), value,
                  target, tol);
    check(std::abs(value - target) <= tol, buf);
  }
  void in_range(const std::string& name, double value, double lo, double hi) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s=%.4g in [%.4g,%.4g]", name.c_str(), value, lo, hi);
    check(value >= lo && value <= hi, buf);
  }
  void at_most(const std::string& name, double value, double limit) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s=%.4g <= %.4g", name.c_str(), value, limit);
    check(value <= limit, buf);
  }
  bool pass() const { return pass_; }
  const std::string& detail() const { return detail_; }

 private:
  bool pass_ = true;
  std::string detail_;
};

sc::ExperimentReport simulate(std::int32_t n, std::int32_t reps, sc::Seed seed,
                              std::vector<MechanismKind> mechanisms,
                              std::vector<sc::ManipulationSetting> manipulations = {}) {
  sc::ExperimentConfig config;
  config.n = n;
  config.replications = reps;
  config.master_seed = seed;
  config.mechanisms = std::move(mechanisms);
  config.manipulations = std::move(manipulations);
  return sc::run_experiment(config);
}

std::int64_t rank_sum(const sc::Market& m, const sc::Allocation& a) {
  std::int64_t s = 0;
  for (const auto r : sc::effective_ranks(m, a)) s += r;
  return s;
}

Verdict solver_exactness() {
  Verdict v;
  std::mt19937_64 gen(0x5eed0001);
  const auto t0 = Clock::now();
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + trial % 7;
    const auto c = sc::testing::random_cost_matrix(n, n, 100, gen);
    if (sc::min_cost_assignment(c).total_cost != sc::brute_force_assignment(c).total_cost) {
      ++mismatches;
    }
  }
  const double elapsed = seconds_since(t0);
  v.check(mismatches == 0, std::to_string(mismatches) + " mismatches in 1000");
  v.at_most("seconds", elapsed, 5.0);
  return v;
}

// Shared between the n = 500 table row, the envy limits and the trend checks.
const sc::ExperimentReport& report_500() {
  static const sc::ExperimentReport report =
      simulate(500, 1000, 0x5eed0500,
               {MechanismKind::kRM, MechanismKind::kTTC, MechanismKind::kDA});
  return report;
}

const sc::ExperimentReport& report_100() {
  static const sc::ExperimentReport report =
      simulate(100, 1000, 0x5eed0100,
               {MechanismKind::kRM, MechanismKind::kTTC, MechanismKind::kDA});
  return report;
}

Verdict table_n100() {
  Verdict v;
  const auto t0 = Clock::now();
  const auto& r = report_100();
  const double elapsed = seconds_since(t0);
  const auto& rm = r.find("RM");
  const auto& ttc = r.find("TTC");
  const auto& da = r.find("DA");
  v.within("RM mean", rm.mean, 1.8, 0.1);
  v.within("TTC mean", ttc.mean, 4.3, 0.2);
  v.within("DA mean", da.mean, 5.0, 0.2);
  v.within("RM max", rm.max_mean, 6.0, 1.0);
  v.within("TTC max", ttc.max_mean, 64.0, 6.0);
  v.within("DA max", da.max_mean, 23.2, 2.0);
  v.within("RM var", rm.variance, 1.3, 0.2);
  v.within("TTC var", ttc.variance, 73.3, 10.0);
  v.within("DA var", da.variance, 18.5, 3.0);
  v.at_most("seconds", elapsed, 120.0);
  return v;
}

Verdict table_n500() {
  Verdict v;
  const auto t0 = Clock::now();
  const auto& r = report_500();
  const double elapsed = seconds_since(t0);
  v.within("RM mean", r.find("RM").mean, 1.8, 0.1);
  v.within("TTC mean", r.find("TTC").mean, 5.8, 0.2);
  v.within("DA mean", r.find("DA").mean, 6.7, 0.2);
  v.within("TTC max", r.find("TTC").max_mean, 315.0, 25.0);
  v.at_most("seconds", elapsed, 1200.0);
  return v;
}

Verdict threshold_table() {
  Verdict v;
  const auto& r = report_100();
  // Default cutoffs: 1, 2, ln n, 0.1n, 0.25n, 0.5n.
  const std::size_t gt1 = 0;
  const std::size_t gt_half = 5;
  v.within("RM >1 %", 100 * r.find("RM").threshold_shares[gt1], 46.0, 2.0);
  v.within("TTC >1 %", 100 * r.find("TTC").threshold_shares[gt1], 50.0, 2.0);
  v.within("DA >1 %", 100 * r.find("DA").threshold_shares[gt1], 96.0, 1.0);
  v.within("TTC >0.5n %", 100 * r.find("TTC").threshold_shares[gt_half], 1.0, 0.5);
  // A target of 0 means under half a percent.
  v.at_most("RM >0.5n %", 100 * r.find("RM").threshold_shares[gt_half], 0.5);
  v.at_most("DA >0.5n %", 100 * r.find("DA").threshold_shares[gt_half], 0.5);
  return v;
}

Verdict envy_limits() {
  Verdict v;
  const auto& r = report_500();
  v.within("RM envy", r.find("RM").envy_share, 1.0 / 3.0, 0.02);
  v.within("TTC envy", r.find("TTC").envy_share, 2.0 * std::log(2.0) - 1.0, 0.02);
  int da_envious_reps = 0;
  for (const auto& rep : r.find("DA").replications) {
    if (rep.envy_share != 0.0) ++da_envious_reps;
  }
  v.check(da_envious_reps == 0,
          "DA reps with envy=" + std::to_string(da_envious_reps) + " of " +
              std::to_string(r.replications));
  return v;
}

Verdict rsd_oracle() {
  Verdict v;
  namespace th = sc::theory;
  v.within("NE(1e4)", th::rsd_no_envy_fraction(10000).value, 0.6137, 0.001);

  double worst = 0.0;
  for (std::int64_t n = 1; n <= 200; ++n) {
    for (std::int64_t k = 1; k <= n; ++k) {
      double total = 0.0;
      for (std::int64_t j = 1; j <= n; ++j) total += th::rsd_rank_probability(k, j, n);
      worst = std::max(worst, std::abs(total - 1.0));
    }
  }
  v.at_most("max |sum_j p - 1|", worst, 1e-12);

  const std::int32_t n = 6;
  const int draws = 100000;
  std::vector<std::vector<double>> counts(n + 1, std::vector<double>(n + 1, 0.0));
  for (int d = 0; d < draws; ++d) {
    const auto market = sc::generate_uniform_market(n, sc::derive_seed(0x5eed0006, d, 1));
    const sc::Seed seed = sc::derive_seed(0x5eed0006, d, 2);
    const auto order = sc::dictator_order(n, seed);
    const auto a = sc::random_serial_dictatorship(market, seed);
    for (std::int32_t k = 0; k < n; ++k) {
      counts[k + 1][sc::rank_of(market, order[k], a[order[k]])] += 1.0;
    }
  }
  double worst_z = 0.0;
  for (std::int32_t k = 1; k <= n; ++k) {
    for (std::int32_t j = 1; j <= n; ++j) {
      const double p = th::rsd_rank_probability(k, j, n);
      const double freq = counts[k][j] / draws;
      if (p == 0.0 || p == 1.0) {
        if (freq != p) worst_z = INFINITY;
        continue;
      }
      worst_z = std::max(worst_z, std::abs(freq - p) / std::sqrt(p * (1 - p) / draws));
    }
  }
  v.at_most("max |z| at n=6", worst_z, 3.0);
  return v;
}

Verdict trends() {
  Verdict v;
  const auto da_2000 = simulate(2000, 100, 0x5eed2000, {MechanismKind::kDA});
  const double da_means[] = {report_100().find("DA").mean, report_500().find("DA").mean,
                             da_2000.find("DA").mean};
  const int ns[] = {100, 500, 2000};
  for (int i = 0; i < 3; ++i) {
    v.in_range("DA mean/ln " + std::to_string(ns[i]), da_means[i] / std::log(ns[i]),
               0.85, 1.25);
  }
  v.in_range("RM max/log2 100", report_100().find("RM").max_mean / std::log2(100.0), 0.8,
             1.3);
  v.in_range("RM max/log2 500", report_500().find("RM").max_mean / std::log2(500.0), 0.8,
             1.3);
  v.check(report_100().find("TTC").max_mean / 100 >= 0.5,
          "TTC max/n at 100=" + std::to_string(report_100().find("TTC").max_mean / 100));
  v.check(report_500().find("TTC").max_mean / 500 >= 0.5,
          "TTC max/n at 500=" + std::to_string(report_500().find("TTC").max_mean / 500));
  return v;
}

Verdict property_suite() {
  Verdict v;
  std::mt19937_64 gen(0x5eed00ff);
  int rm_worse = 0;
  int da_unstable = 0;
  int pareto_disagree = 0;
  int exhaustive_checked = 0;
  const int instances = 10000;
  for (int i = 0; i < instances; ++i) {
    const std::int32_t n = 1 + i % 50;
    const auto m = sc::testing::random_market(n, gen);
    const auto da = sc::deferred_acceptance(m);
    const auto ttc = sc::top_trading_cycles(m);
    const auto rm = sc::rank_minimizing(m, static_cast<sc::Seed>(i));
    const auto rm_sum = rank_sum(m, rm);
    if (rm_sum > rank_sum(m, da) || rm_sum > rank_sum(m, ttc)) ++rm_worse;
    if (!sc::justified_envy(m, da).empty()) ++da_unstable;
    if (n <= 6) {
      ++exhaustive_checked;
      for (const auto* a : {&ttc, &rm}) {
        const bool optimal = !sc::testing::exhaustive_dominator(m, a->assignment);
        if (!optimal || !sc::is_pareto_optimal(m, *a).optimal) ++pareto_disagree;
      }
    }
  }
  v.check(rm_worse == 0, "RM sum above DA/TTC: " + std::to_string(rm_worse));
  v.check(da_unstable == 0, "DA with envy: " + std::to_string(da_unstable));
  v.check(pareto_disagree == 0, "TTC/RM not Pareto optimal: " +
                                    std::to_string(pareto_disagree) + " of " +
                                    std::to_string(2 * exhaustive_checked));
  const auto csv_a = sc::report_csv(simulate(50, 40, 0x5eedc5f, {MechanismKind::kRM,
                                                                  MechanismKind::kTTC,
                                                                  MechanismKind::kDA,
                                                                  MechanismKind::kRSD},
                                             {{sc::ManipulationKind::kDropFirst, 0.4}}));
  const auto csv_b = sc::report_csv(simulate(50, 40, 0x5eedc5f, {MechanismKind::kRM,
                                                                  MechanismKind::kTTC,
                                                                  MechanismKind::kDA,
                                                                  MechanismKind::kRSD},
                                             {{sc::ManipulationKind::kDropFirst, 0.4}}));
  v.check(csv_a == csv_b, "identical CSV for identical seed");
  return v;
}

Verdict manipulation() {
  Verdict v;
  std::vector<sc::ManipulationSetting> settings;
  for (const auto kind : {sc::ManipulationKind::kDropAssigned, sc::ManipulationKind::kDropFirst}) {
    for (const double share : {0.0, 0.2, 0.4, 0.6, 0.8}) settings.push_back({kind, share});
  }
  const auto r = simulate(100, 1000, 0x5eedc000,
                          {MechanismKind::kRM, MechanismKind::kTTC, MechanismKind::kDA},
                          settings);
  const double truthful = r.find("RM").mean;
  const double floor = std::min(r.find("DA").mean, r.find("TTC").mean);
  double worst_shift = 0.0;
  double highest = 0.0;
  for (const auto& s : settings) {
    const double mean = r.find(s.label()).mean;
    worst_shift = std::max(worst_shift, std::abs(mean - truthful));
    highest = std::max(highest, mean);
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "max |shift|=%.4f < 0.2", worst_shift);
  v.check(worst_shift < 0.2, buf);
  std::snprintf(buf, sizeof buf, "max manipulated mean=%.4f < %.4f", highest, floor);
  v.check(highest < floor, buf);
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"solver_exactness", solver_exactness},
      {"table_n100", table_n100},
      {"table_n500", table_n500},
      {"threshold_shares_n100", threshold_table},
      {"envy_limits_n500", envy_limits},
      {"rsd_oracle", rsd_oracle},
      {"asymptotic_trends", trends},
      {"property_suite", property_suite},
      {"manipulation_desk_scale", manipulation},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = Clock::now();
    const Verdict v = run();
    if (!v.pass()) ++failed;
    std::printf("%s %s (%.1fs): %s\n", v.pass() ? "PASS" : "FAIL", name.c_str(),
                seconds_since(t0), v.detail().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
