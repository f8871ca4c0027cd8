#include <stdexcept>

#include "schoolchoice/simulation.hpp"

namespace schoolchoice {

Market generate_uniform_market(std::int32_t n, Seed seed) {
  if (n < 1) throw std::invalid_argument("market size must be at least 1");
  Rng rng(seed);
  const auto size = static_cast<std::size_t>(n);
  std::vector<std::vector<SchoolId>> preferences(size);
  for (auto& list : preferences) list = rng.permutation<SchoolId>(size);
  std::vector<std::vector<StudentId>> priorities(size);
  for (auto& list : priorities) list = rng.permutation<StudentId>(size);
  return Market::from_lists(std::vector<std::int32_t>(size, 1),
                            std::move(preferences), std::move(priorities));
}

}  // namespace schoolchoice
