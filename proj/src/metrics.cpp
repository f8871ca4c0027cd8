#include "schoolchoice/metrics.hpp"

#include <algorithm>
#include <limits>

namespace schoolchoice {

RankStats rank_stats(const Market& market, const Allocation& allocation) {
  require_valid_allocation(market, allocation);
  const auto n = market.n_students();
  const bool partial = !market.has_full_preferences();

  RankStats stats;
  stats.n_students = n;
  double sum = 0.0;
  std::int64_t counted = 0;
  for (StudentId t = 0; t < n; ++t) {
    const std::int32_t r = rank_of(market, t, allocation[t]);
    ++stats.histogram[r];
    if (allocation[t] == kUnassigned) {
      ++stats.unassigned_count;
      if (partial) continue;
    }
    sum += r;
    ++counted;
    stats.max = std::max(stats.max, r);
  }
  if (counted > 0) stats.mean = sum / static_cast<double>(counted);

  if (counted > 1) {
    double sq = 0.0;
    for (StudentId t = 0; t < n; ++t) {
      if (partial && allocation[t] == kUnassigned) continue;
      const double d = rank_of(market, t, allocation[t]) - stats.mean;
      sq += d * d;
    }
    stats.variance = sq / static_cast<double>(counted - 1);
  }

  if (n > 0) {
    stats.envy_share = static_cast<double>(justified_envy(market, allocation).size()) /
                       static_cast<double>(n);
  }
  return stats;
}

std::vector<StudentId> justified_envy(const Market& market,
                                      const Allocation& allocation) {
  require_valid_allocation(market, allocation);
  const auto n = market.n_students();
  const auto m = market.n_schools();

  // Weakest admitted priority per school; unlisted admits rank below every
  // listed student. Schools with an empty seat accept any listed student.
  constexpr std::int32_t kOpenSeat = std::numeric_limits<std::int32_t>::max();
  const std::int32_t unlisted = n + 1;
  std::vector<std::int32_t> weakest(m, 0);
  std::vector<std::int32_t> load(m, 0);
  for (StudentId t = 0; t < n; ++t) {
    const SchoolId s = allocation[t];
    if (s == kUnassigned) continue;
    ++load[s];
    const std::int32_t pos = market.priority_position(s, t);
    weakest[s] = std::max(weakest[s], pos == 0 ? unlisted : pos);
  }
  for (SchoolId s = 0; s < m; ++s) {
    if (load[s] < market.capacity(s)) weakest[s] = kOpenSeat;
  }

  std::vector<StudentId> envious;
  for (StudentId t = 0; t < n; ++t) {
    const auto prefs = market.preferences(t);
    const std::size_t better = allocation[t] == kUnassigned
                                   ? prefs.size()
                                   : static_cast<std::size_t>(
                                         market.rank_position(t, allocation[t]) - 1);
    for (std::size_t i = 0; i < better; ++i) {
      const SchoolId s = prefs[i];
      const std::int32_t pos = market.priority_position(s, t);
      if (pos != 0 && pos < weakest[s]) {
        envious.push_back(t);
        break;
      }
    }
  }
  return envious;
}

ParetoCheck is_pareto_optimal(const Market& market,
                              const Allocation& allocation) {
  require_valid(market);
  require_valid_allocation(market, allocation);
  if (!market.has_full_preferences()) {
    throw MarketError("Pareto check requires full lists");
  }
  if (!market.is_balanced()) {
    throw MarketError("Pareto check requires a balanced market");
  }
  const auto n = market.n_students();
  for (StudentId t = 0; t < n; ++t) {
    if (allocation[t] == kUnassigned) {
      throw MarketError("Pareto check requires every student assigned");
    }
  }

  std::vector<std::vector<StudentId>> holders(market.n_schools());
  for (StudentId t = 0; t < n; ++t) holders[allocation[t]].push_back(t);

  // Iterative DFS for a cycle in the "envies the holder of" graph.
  std::vector<std::uint8_t> state(n, 0);  // 0 new, 1 on stack, 2 done
  std::vector<StudentId> parent(n, -1);
  struct Frame {
    StudentId student;
    std::size_t next_pref;
    std::size_t next_holder;
  };
  std::vector<Frame> stack;
  stack.reserve(n);

  for (StudentId root = 0; root < n; ++root) {
    if (state[root] != 0) continue;
    stack.push_back({root, 0, 0});
    state[root] = 1;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto prefs = market.preferences(f.student);
      const auto limit =
          static_cast<std::size_t>(market.rank_position(f.student, allocation[f.student]) - 1);
      bool descended = false;
      while (!descended && f.next_pref < limit) {
        const auto& hs = holders[prefs[f.next_pref]];
        while (f.next_holder < hs.size()) {
          const StudentId next = hs[f.next_holder++];
          if (state[next] == 1) {
            // Cycle: next -> ... -> f.student -> next. Each student on it
            // takes the seat of the one they point to.
            Allocation improved = allocation;
            StudentId cur = f.student;
            SchoolId wanted = prefs[f.next_pref];
            for (;;) {
              improved[cur] = wanted;
              if (cur == next) break;
              const StudentId up = parent[cur];
              wanted = allocation[cur];
              cur = up;
            }
            return {false, std::move(improved)};
          }
          if (state[next] == 0) {
            state[next] = 1;
            parent[next] = f.student;
            stack.push_back({next, 0, 0});
            descended = true;
            break;
          }
        }
        if (!descended) {
          ++f.next_pref;
          f.next_holder = 0;
        }
      }
      if (descended) continue;
      state[stack.back().student] = 2;
      stack.pop_back();
    }
  }
  return {true, std::nullopt};
}

std::vector<double> threshold_shares(const RankStats& stats,
                                     std::span<const double> thresholds) {
  std::vector<double> shares;
  shares.reserve(thresholds.size());
  for (const double cutoff : thresholds) {
    std::int64_t above = 0;
    for (const auto& [rank, count] : stats.histogram) {
      if (rank > cutoff) above += count;
    }
    shares.push_back(stats.n_students > 0
                         ? static_cast<double>(above) / stats.n_students
                         : 0.0);
  }
  return shares;
}

}  // namespace schoolchoice
