#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "schoolchoice/mechanisms.hpp"

namespace schoolchoice::theory {

/// A closed-form quantity together with where it comes from.
struct TheoryValue {
  double value = 0.0;
  std::string provenance;
};

/// Probability that the k-th dictator in random serial dictatorship over a
/// uniform random one-to-one market of size n lands their j-th choice:
///   p(k, j) = (n + 1 - k) / k * C(k, j) / C(n, j),   1 <= j <= k <= n,
/// and 0 for j > k. Evaluated in log space. Throws std::out_of_range for
/// k or j outside [1, n].
double rsd_rank_probability(std::int64_t k, std::int64_t j, std::int64_t n);

/// Expected fraction of students without justified envy under RSD with
/// uniform random priorities: a student on their j-th choice is envy-free
/// with probability 2^-(j-1). Tends to 2 - 2 ln 2 = 0.6137...
TheoryValue rsd_no_envy_fraction(std::int64_t n);

/// 1 - rsd_no_envy_fraction(n); tends to 0.3863.
TheoryValue rsd_envy_fraction(std::int64_t n);

/// Limiting probability that RM gives a student their i-th choice: 2^-i.
double rm_rank_pmf(std::int64_t i);

/// sum_{i=1}^{terms} 2^-i * 2^-(i-1): the RM envy-free share truncated at
/// `terms` ranks.
double rm_no_envy_partial_sum(std::int64_t terms);

/// Limiting RM envy share 1 - sum_i 2^-(2i-1) = 1/3.
TheoryValue rm_envy_limit();

/// n-th harmonic number.
double harmonic(std::int64_t n);

/// Expected TTC average rank in a uniform random one-to-one market:
/// ((n + 1) H_n - n) / n.
TheoryValue ttc_expected_avg_rank(std::int64_t n);

/// Asymptotic reference values for average and maximum rank. These are
/// limits, not finite-n predictions.
struct ReferenceCurve {
  double avg = 0.0;
  std::optional<double> avg_lower;  // known lower bound, when there is one
  double max = 0.0;
  std::optional<double> max_observed;  // simulation-based constant
  std::string provenance;
};

/// Reference curves for RM, TTC and DA at market size n (n >= 2).
std::map<MechanismKind, ReferenceCurve> reference_curves(std::int64_t n);

}  // namespace schoolchoice::theory
