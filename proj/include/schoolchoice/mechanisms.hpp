#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "schoolchoice/assignment.hpp"
#include "schoolchoice/market.hpp"
#include "schoolchoice/random.hpp"

namespace schoolchoice {

enum class MechanismKind { kDA, kTTC, kRSD, kRM };

inline constexpr std::array<MechanismKind, 4> kAllMechanisms = {
    MechanismKind::kDA, MechanismKind::kTTC, MechanismKind::kRSD,
    MechanismKind::kRM};

std::string_view to_string(MechanismKind kind) noexcept;
std::optional<MechanismKind> parse_mechanism(std::string_view name);

/// RSD and RM draw from the seed; DA and TTC ignore it.
constexpr bool uses_randomness(MechanismKind kind) noexcept {
  return kind == MechanismKind::kRSD || kind == MechanismKind::kRM;
}

/// Student-proposing deferred acceptance. Returns the student-optimal stable
/// allocation. A student missing from a school's priority list is rejected
/// by that school on application; students rejected by every school on their
/// list end unassigned.
Allocation deferred_acceptance(const Market& market);

/// Top trading cycles. Each remaining student points to their best remaining
/// school that still has seats and lists them; each remaining school points
/// to its highest-priority remaining student it lists. Every cycle trades at
/// once; a school leaves when its seats run out.
Allocation top_trading_cycles(const Market& market);

/// Serial dictatorship in the given order (a permutation of students).
Allocation serial_dictatorship(const Market& market,
                               std::span<const StudentId> order);

/// Dictator order used by random_serial_dictatorship for this seed.
std::vector<StudentId> dictator_order(std::int32_t n_students, Seed seed);

Allocation random_serial_dictatorship(const Market& market, Seed seed);

/// Unit-seat cost matrix used by the rank-minimizing mechanism, before tie
/// randomization. Row t is student t. The first columns are seats (one per
/// unit of capacity, schools in index order); when some student ranks fewer
/// schools than exist, or seats are short, one extra column per student is
/// appended that only that student may use, costed at their list length + 1.
struct RankCostModel {
  CostMatrix cost;
  std::vector<SchoolId> column_school;  // kUnassigned for the extra columns
};
RankCostModel build_rank_costs(const Market& market);

/// Rank-minimizing mechanism: an allocation minimizing the sum of effective
/// ranks. Students and seats are shuffled with the seed before solving so
/// that ties between optima are broken at random. Priorities are never read.
Allocation rank_minimizing(const Market& market, Seed seed);

/// Dispatches to one of the mechanisms above.
Allocation run_mechanism(MechanismKind kind, const Market& market, Seed seed);

}  // namespace schoolchoice
