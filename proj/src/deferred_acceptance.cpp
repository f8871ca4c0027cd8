#include <queue>
#include <utility>
#include <vector>

#include "schoolchoice/mechanisms.hpp"

namespace schoolchoice {

Allocation deferred_acceptance(const Market& market) {
  require_valid(market);
  const auto n = market.n_students();
  const auto m = market.n_schools();

  // Waiting list per school as a max-heap on priority position, so the
  // weakest held applicant sits on top.
  using Entry = std::pair<std::int32_t, StudentId>;
  std::vector<std::priority_queue<Entry>> held(m);
  std::vector<std::size_t> next_choice(n, 0);
  std::vector<StudentId> free_students;
  free_students.reserve(n);
  for (StudentId t = n - 1; t >= 0; --t) free_students.push_back(t);

  while (!free_students.empty()) {
    const StudentId t = free_students.back();
    free_students.pop_back();
    const auto prefs = market.preferences(t);
    while (next_choice[t] < prefs.size()) {
      const SchoolId s = prefs[next_choice[t]++];
      const std::int32_t pos = market.priority_position(s, t);
      if (pos == 0) continue;  // unacceptable to s
      auto& list = held[s];
      if (static_cast<std::int32_t>(list.size()) < market.capacity(s)) {
        list.emplace(pos, t);
        break;
      }
      if (pos < list.top().first) {
        const StudentId bumped = list.top().second;
        list.pop();
        list.emplace(pos, t);
        free_students.push_back(bumped);
        break;
      }
    }
  }

  Allocation allocation(static_cast<std::size_t>(n));
  for (SchoolId s = 0; s < m; ++s) {
    auto& list = held[s];
    while (!list.empty()) {
      allocation[list.top().second] = s;
      list.pop();
    }
  }
  return allocation;
}

}  // namespace schoolchoice
