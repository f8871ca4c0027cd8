#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "schoolchoice/market.hpp"

namespace schoolchoice {

struct RankStats {
  std::int32_t n_students = 0;
  double mean = 0.0;
  std::int32_t max = 0;
  double variance = 0.0;  // sample variance (n - 1 denominator)
  std::map<std::int32_t, std::int32_t> histogram;  // effective rank -> count
  std::int32_t unassigned_count = 0;
  double envy_share = 0.0;
};

/// Rank summary of an allocation. The histogram holds every student's
/// effective rank (unassigned = list length + 1). When the market has
/// partial preference lists, mean, max and variance are taken over assigned
/// students only; otherwise over everyone. envy_share is the fraction of all
/// students with justified envy.
RankStats rank_stats(const Market& market, const Allocation& allocation);

/// Students with justified envy, ascending. Student t envies school s when t
/// ranks s above their assignment (any listed school, if unassigned), s lists
/// t, and s either has an empty seat or admitted someone it ranks below t.
/// Admitted students that s does not list count as ranked below everyone
/// it lists.
std::vector<StudentId> justified_envy(const Market& market,
                                      const Allocation& allocation);

struct ParetoCheck {
  bool optimal = true;
  std::optional<Allocation> witness;  // a dominating allocation when !optimal
};

/// Pareto optimality for students in a balanced market with full lists.
/// Builds the graph where each student points to every student holding a
/// school they strictly prefer; a cycle is a Pareto-improving trade and the
/// witness applies it. Throws MarketError for partial lists or an unbalanced
/// market, and when the allocation leaves someone unassigned.
ParetoCheck is_pareto_optimal(const Market& market,
                              const Allocation& allocation);

/// For each cutoff m, the share of students whose effective rank is
/// strictly greater than m.
std::vector<double> threshold_shares(const RankStats& stats,
                                     std::span<const double> thresholds);

}  // namespace schoolchoice
