#include "schoolchoice/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace schoolchoice::theory {

namespace {

// Beyond this many ranks 2^-(j-1) underflows double precision, so the
// envy-free sums can stop there without changing the result.
constexpr std::int64_t kMaxUsefulRank = 1100;

std::vector<double> log_factorials(std::int64_t n) {
  std::vector<double> lf(static_cast<std::size_t>(n) + 1);
  for (std::int64_t i = 0; i <= n; ++i) {
    lf[i] = std::lgamma(static_cast<double>(i) + 1.0);
  }
  return lf;
}

// log p(k, j) given a log-factorial table covering n.
double log_rsd_probability(const std::vector<double>& lf, std::int64_t k,
                           std::int64_t j, std::int64_t n) {
  // (n+1-k)/k * [k! / (j! (k-j)!)] / [n! / (j! (n-j)!)]
  return std::log(static_cast<double>(n + 1 - k)) -
         std::log(static_cast<double>(k)) + lf[k] - lf[k - j] - lf[n] +
         lf[n - j];
}

}  // namespace

double rsd_rank_probability(std::int64_t k, std::int64_t j, std::int64_t n) {
  if (n < 1 || k < 1 || k > n || j < 1 || j > n) {
    throw std::out_of_range("rsd_rank_probability needs 1 <= j, k <= n");
  }
  if (j > k) return 0.0;
  const auto lf = log_factorials(n);
  return std::exp(log_rsd_probability(lf, k, j, n));
}

TheoryValue rsd_no_envy_fraction(std::int64_t n) {
  if (n < 1) throw std::out_of_range("rsd_no_envy_fraction needs n >= 1");
  const auto lf = log_factorials(n);
  double total = 0.0;
  for (std::int64_t k = 1; k <= n; ++k) {
    const std::int64_t top = std::min(k, kMaxUsefulRank);
    double inner = 0.0;
    for (std::int64_t j = 1; j <= top; ++j) {
      inner += std::exp(log_rsd_probability(lf, k, j, n) -
                        static_cast<double>(j - 1) * std::numbers::ln2);
    }
    total += inner;
  }
  return {total / static_cast<double>(n),
          "Knuth (1996) serial dictatorship placement probabilities with "
          "envy-free probability 2^-(j-1); limit 2 - 2 ln 2"};
}

TheoryValue rsd_envy_fraction(std::int64_t n) {
  auto v = rsd_no_envy_fraction(n);
  return {1.0 - v.value, "complement of " + v.provenance};
}

double rm_rank_pmf(std::int64_t i) {
  if (i < 1) throw std::out_of_range("rm_rank_pmf needs i >= 1");
  return std::ldexp(1.0, static_cast<int>(-std::min<std::int64_t>(i, 2000)));
}

double rm_no_envy_partial_sum(std::int64_t terms) {
  double sum = 0.0;
  for (std::int64_t i = 1; i <= std::min(terms, kMaxUsefulRank); ++i) {
    sum += rm_rank_pmf(i) * std::ldexp(1.0, static_cast<int>(-(i - 1)));
  }
  return sum;
}

TheoryValue rm_envy_limit() {
  // sum_{i>=1} 2^-(2i-1) = (1/2) / (1 - 1/4) = 2/3.
  return {1.0 / 3.0,
          "Parviainen (2004) limiting rank law 2^-i with envy-free "
          "probability 2^-(i-1)"};
}

double harmonic(std::int64_t n) {
  double h = 0.0;
  // Summed smallest-first for accuracy.
  for (std::int64_t i = n; i >= 1; --i) h += 1.0 / static_cast<double>(i);
  return h;
}

TheoryValue ttc_expected_avg_rank(std::int64_t n) {
  if (n < 1) throw std::out_of_range("ttc_expected_avg_rank needs n >= 1");
  const double dn = static_cast<double>(n);
  return {((dn + 1.0) * harmonic(n) - dn) / dn,
          "Knuth (1996): expected TTC rank sum (n+1) H_n - n"};
}

std::map<MechanismKind, ReferenceCurve> reference_curves(std::int64_t n) {
  if (n < 2) throw std::out_of_range("reference_curves needs n >= 2");
  const double dn = static_cast<double>(n);
  const double ln = std::log(dn);
  std::map<MechanismKind, ReferenceCurve> curves;
  curves[MechanismKind::kRM] = {
      2.0, std::numbers::pi * std::numbers::pi / 6.0, std::log2(dn),
      std::nullopt,
      "Parviainen (2004) average-rank bounds; max rank log2(n) from the "
      "longest run of a 2^-i rank law"};
  curves[MechanismKind::kTTC] = {
      ln, std::nullopt, 0.5 * dn, 0.63 * dn,
      "Knuth (1996): average ~ ln n, max rank > n/2 (0.63 n observed)"};
  curves[MechanismKind::kDA] = {
      ln, std::nullopt, ln * ln, std::nullopt,
      "Pittel (1989, 1992): average ~ ln n, max ~ ln^2 n"};
  return curves;
}

}  // namespace schoolchoice::theory
