#include <stdexcept>
#include <vector>

#include "schoolchoice/mechanisms.hpp"

namespace schoolchoice {

Allocation serial_dictatorship(const Market& market,
                               std::span<const StudentId> order) {
  require_valid(market);
  const auto n = market.n_students();
  if (static_cast<std::int32_t>(order.size()) != n) {
    throw std::invalid_argument("dictator order must list every student once");
  }
  std::vector<char> seen(n, 0);
  std::vector<std::int32_t> seats(market.n_schools());
  for (SchoolId s = 0; s < market.n_schools(); ++s) {
    seats[s] = market.capacity(s);
  }

  Allocation allocation(static_cast<std::size_t>(n));
  for (const StudentId t : order) {
    if (t < 0 || t >= n || seen[t]) {
      throw std::invalid_argument("dictator order is not a permutation");
    }
    seen[t] = 1;
    for (const SchoolId s : market.preferences(t)) {
      if (seats[s] > 0) {
        --seats[s];
        allocation[t] = s;
        break;
      }
    }
  }
  return allocation;
}

std::vector<StudentId> dictator_order(std::int32_t n_students, Seed seed) {
  Rng rng(seed);
  return rng.permutation<StudentId>(static_cast<std::size_t>(n_students));
}

Allocation random_serial_dictatorship(const Market& market, Seed seed) {
  const auto order = dictator_order(market.n_students(), seed);
  return serial_dictatorship(market, order);
}

}  // namespace schoolchoice
