#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "schoolchoice/market.hpp"
#include "schoolchoice/mechanisms.hpp"
#include "schoolchoice/metrics.hpp"
#include "schoolchoice/random.hpp"

namespace schoolchoice {

/// n students and n unit-capacity schools; every preference list and every
/// priority list is an independent uniform permutation (Fisher-Yates).
Market generate_uniform_market(std::int32_t n, Seed seed);

enum class ManipulationKind {
  kDropAssigned,  // move the assigned school to the end of the list
  kDropFirst,     // move the first choice to the end of the list
};

std::string_view to_string(ManipulationKind kind) noexcept;
std::optional<ManipulationKind> parse_manipulation(std::string_view name);

/// Students who have a reason to use `kind` given the truthful RM outcome.
/// DropAssigned: assigned, but not to their first choice. DropFirst: not
/// assigned to their first or second choice (unassigned included), with at
/// least two schools listed.
std::vector<StudentId> manipulation_eligible(const Market& market,
                                             const Allocation& baseline,
                                             ManipulationKind kind);

/// Picks round(share * |eligible|) eligible students uniformly at random and
/// rewrites their preference lists; everyone else is left untouched.
/// Throws std::invalid_argument for share outside [0, 1].
Market apply_manipulation(const Market& market, const Allocation& baseline,
                          ManipulationKind kind, double share, Seed seed);

/// A rank cutoff, either absolute or relative to the market size.
struct Threshold {
  enum class Kind { kAbsolute, kLogN, kFractionOfN };
  Kind kind = Kind::kAbsolute;
  double value = 1.0;

  double resolve(std::int32_t n) const;
  std::string label() const;

  /// "2", "log", "0.1n".
  static Threshold parse(std::string_view text);
};

/// Default cutoffs: 1, 2, ln n, 0.1n,
/// 0.25n, 0.5n.
std::vector<Threshold> default_thresholds();

struct ManipulationSetting {
  ManipulationKind kind = ManipulationKind::kDropAssigned;
  double share = 0.0;

  /// Report label, e.g. "RM+DropAssigned@0.2".
  std::string label() const;
};

struct ExperimentConfig {
  std::int32_t n = 100;
  std::int32_t replications = 1000;
  Seed master_seed = 42;
  std::vector<MechanismKind> mechanisms = {MechanismKind::kRM,
                                           MechanismKind::kTTC,
                                           MechanismKind::kDA};
  std::vector<Threshold> thresholds = default_thresholds();
  /// Each setting adds a row group: truthful RM baseline, manipulated
  /// market, RM re-run, ranks measured on the true preferences.
  std::vector<ManipulationSetting> manipulations;
  /// When set, every replication uses this market instead of a random one.
  std::optional<std::filesystem::path> market_file;
  /// 0 = hardware concurrency.
  std::int32_t threads = 0;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ConfigError on a bad configuration.
void validate_config(const ExperimentConfig& config);

/// key=value lines (`#` comments). Keys: n, reps, seed, mechanisms,
/// thresholds, kinds, shares, market, threads. `kinds` and `shares` combine
/// into one manipulation setting per (kind, share) pair.
ExperimentConfig parse_config(std::string_view text,
                              ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path,
                             ExperimentConfig base = {});

/// Per-replication summary of one mechanism (or manipulation setting).
struct ReplicationStats {
  double mean = 0.0;
  std::int32_t max = 0;
  double variance = 0.0;
  double envy_share = 0.0;
  std::int32_t unassigned = 0;
  std::int64_t rank_sum = 0;
  std::vector<double> threshold_shares;
};

struct MechanismSummary {
  std::string label;
  std::vector<ReplicationStats> replications;  // in replication order

  double mean = 0.0;
  double se_mean = 0.0;
  double max_mean = 0.0;
  double se_max = 0.0;
  double variance = 0.0;
  double envy_share = 0.0;
  double unassigned = 0.0;
  std::vector<double> threshold_shares;  // mean over replications
};

struct ExperimentReport {
  std::int32_t n = 0;
  std::int32_t replications = 0;
  std::vector<double> thresholds;  // resolved cutoffs
  std::vector<MechanismSummary> rows;

  const MechanismSummary& find(std::string_view label) const;
};

class ExperimentError : public std::runtime_error {
 public:
  ExperimentError(std::int32_t replication, const std::string& what);
  std::int32_t replication() const noexcept { return replication_; }

 private:
  std::int32_t replication_;
};

/// Summary of one allocation in the report's terms.
ReplicationStats summarize(const Market& truth, const Allocation& allocation,
                           std::span<const double> thresholds);

/// Runs every replication (in parallel when threads > 1) and aggregates in
/// replication order, so output never depends on scheduling.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Long-format CSV, one row per mechanism x threshold:
/// mechanism,n,reps,mean,se_mean,max_mean,se_max,variance,envy_share,
/// unassigned,threshold_m,share_gt_m
void write_report_csv(const ExperimentReport& report, std::ostream& out);
std::string report_csv(const ExperimentReport& report);

}  // namespace schoolchoice
