#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "schoolchoice/simulation.hpp"

namespace schoolchoice {

std::string_view to_string(ManipulationKind kind) noexcept {
  switch (kind) {
    case ManipulationKind::kDropAssigned:
      return "DropAssigned";
    case ManipulationKind::kDropFirst:
      return "DropFirst";
  }
  return "?";
}

std::optional<ManipulationKind> parse_manipulation(std::string_view name) {
  for (const auto kind :
       {ManipulationKind::kDropAssigned, ManipulationKind::kDropFirst}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

std::vector<StudentId> manipulation_eligible(const Market& market,
                                             const Allocation& baseline,
                                             ManipulationKind kind) {
  require_valid_allocation(market, baseline);
  std::vector<StudentId> eligible;
  for (StudentId t = 0; t < market.n_students(); ++t) {
    const SchoolId s = baseline[t];
    const auto list_size = market.preferences(t).size();
    switch (kind) {
      case ManipulationKind::kDropAssigned:
        if (s != kUnassigned && market.rank_position(t, s) > 1) {
          eligible.push_back(t);
        }
        break;
      case ManipulationKind::kDropFirst:
        if (list_size >= 2 && rank_of(market, t, s) > 2) eligible.push_back(t);
        break;
    }
  }
  return eligible;
}

Market apply_manipulation(const Market& market, const Allocation& baseline,
                          ManipulationKind kind, double share, Seed seed) {
  if (!(share >= 0.0 && share <= 1.0)) {
    throw std::invalid_argument("manipulation share must lie in [0, 1]");
  }
  auto eligible = manipulation_eligible(market, baseline, kind);
  const auto count = static_cast<std::size_t>(
      std::lround(share * static_cast<double>(eligible.size())));
  if (count == 0) return market;

  Rng rng(seed);
  rng.shuffle(std::span<StudentId>(eligible));
  eligible.resize(count);

  auto preferences = market.all_preferences();
  for (const StudentId t : eligible) {
    auto& list = preferences[t];
    switch (kind) {
      case ManipulationKind::kDropAssigned: {
        auto it = std::find(list.begin(), list.end(), baseline[t]);
        std::rotate(it, it + 1, list.end());
        break;
      }
      case ManipulationKind::kDropFirst:
        std::rotate(list.begin(), list.begin() + 1, list.end());
        break;
    }
  }
  return Market(market.schools(), std::move(preferences),
                market.all_priorities(), market.student_labels());
}

}  // namespace schoolchoice
