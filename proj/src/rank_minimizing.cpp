#include <algorithm>
#include <vector>

#include "schoolchoice/mechanisms.hpp"

namespace schoolchoice {

RankCostModel build_rank_costs(const Market& market) {
  const auto n = static_cast<std::size_t>(market.n_students());
  const auto m = market.n_schools();

  RankCostModel model;
  for (SchoolId s = 0; s < m; ++s) {
    model.column_school.insert(model.column_school.end(),
                               static_cast<std::size_t>(market.capacity(s)), s);
  }
  const std::size_t seats = model.column_school.size();
  const bool needs_outside_option =
      !market.has_full_preferences() ||
      market.total_capacity() < static_cast<std::int64_t>(n);
  const std::size_t cols = seats + (needs_outside_option ? n : 0);
  model.column_school.resize(cols, kUnassigned);

  model.cost = CostMatrix(n, cols, kForbidden);
  for (std::size_t t = 0; t < n; ++t) {
    const auto student = static_cast<StudentId>(t);
    for (std::size_t c = 0; c < seats; ++c) {
      const auto pos = market.rank_position(student, model.column_school[c]);
      if (pos != 0) model.cost(t, c) = pos;
    }
    if (needs_outside_option) {
      model.cost(t, seats + t) =
          static_cast<Cost>(market.preferences(student).size()) + 1;
    }
  }
  return model;
}

Allocation rank_minimizing(const Market& market, Seed seed) {
  require_valid(market);
  const RankCostModel model = build_rank_costs(market);
  const std::size_t n = model.cost.rows();
  const std::size_t cols = model.cost.cols();

  // Shuffle rows and columns so the solver's fixed tie-breaking lands on a
  // seed-dependent optimum.
  Rng rng(seed);
  const auto row_perm = rng.permutation<std::size_t>(n);
  const auto col_perm = rng.permutation<std::size_t>(cols);
  CostMatrix shuffled(n, cols);
  for (std::size_t r = 0; r < n; ++r) {
    const auto src = model.cost.row(row_perm[r]);
    for (std::size_t c = 0; c < cols; ++c) shuffled(r, c) = src[col_perm[c]];
  }

  const AssignmentResult solved = min_cost_assignment(shuffled);

  Allocation allocation(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t column = col_perm[solved.row_to_col[r]];
    allocation[static_cast<StudentId>(row_perm[r])] =
        model.column_school[column];
  }
  return allocation;
}

}  // namespace schoolchoice
