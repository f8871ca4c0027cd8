#include <vector>

#include "schoolchoice/mechanisms.hpp"

namespace schoolchoice {

Allocation top_trading_cycles(const Market& market) {
  require_valid(market);
  const auto n = market.n_students();
  const auto m = market.n_schools();

  Allocation allocation(static_cast<std::size_t>(n));
  std::vector<std::int32_t> seats(m);
  for (SchoolId s = 0; s < m; ++s) seats[s] = market.capacity(s);
  std::vector<char> done(n, 0);
  std::vector<std::size_t> student_cursor(n, 0);
  std::vector<std::size_t> school_cursor(m, 0);
  std::vector<SchoolId> target(n, kUnassigned);
  std::vector<StudentId> school_choice(m, -1);
  std::vector<StudentId> active;
  active.reserve(n);
  for (StudentId t = 0; t < n; ++t) active.push_back(t);

  // 0 = unvisited, 1 = on the current path, 2 = finished.
  std::vector<std::uint8_t> mark(n, 0);
  std::vector<StudentId> path;

  while (!active.empty()) {
    // Students point to their best school with seats left that lists them.
    std::size_t kept = 0;
    for (const StudentId t : active) {
      const auto prefs = market.preferences(t);
      auto& cur = student_cursor[t];
      while (cur < prefs.size() &&
             (seats[prefs[cur]] == 0 ||
              market.priority_position(prefs[cur], t) == 0)) {
        ++cur;
      }
      if (cur == prefs.size()) {
        done[t] = 1;  // nothing acceptable left: unassigned
        continue;
      }
      target[t] = prefs[cur];
      active[kept++] = t;
    }
    active.resize(kept);
    if (active.empty()) break;

    // Schools point to their top remaining student, frozen for the round so
    // that cycles found in this round are disjoint. A school that some
    // student points to lists that student, so the cursor always lands.
    for (const StudentId t : active) {
      const SchoolId s = target[t];
      const auto prio = market.priorities(s);
      auto& cur = school_cursor[s];
      while (done[prio[cur]]) ++cur;
      school_choice[s] = prio[cur];
    }

    for (const StudentId t : active) mark[t] = 0;
    for (const StudentId start : active) {
      if (mark[start] != 0) continue;
      path.clear();
      StudentId t = start;
      while (mark[t] == 0) {
        mark[t] = 1;
        path.push_back(t);
        t = school_choice[target[t]];
      }
      if (mark[t] == 1) {
        // t closes a cycle; trade along it.
        auto it = path.end();
        do {
          --it;
          const SchoolId s = target[*it];
          allocation[*it] = s;
          --seats[s];
        } while (*it != t);
        for (auto c = it; c != path.end(); ++c) done[*c] = 1;
      }
      for (const StudentId p : path) mark[p] = 2;
    }

    kept = 0;
    for (const StudentId t : active) {
      if (!done[t]) active[kept++] = t;
    }
    active.resize(kept);
  }
  return allocation;
}

}  // namespace schoolchoice
