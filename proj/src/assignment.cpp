#include "schoolchoice/assignment.hpp"

#include <algorithm>
#include <stdexcept>

namespace schoolchoice {

InfeasibleAssignmentError::InfeasibleAssignmentError(std::size_t row,
                                                     const std::string& why)
    : std::runtime_error("infeasible row " + std::to_string(row) + ": " + why),
      row_(row) {}

CostMatrix::CostMatrix(std::initializer_list<std::initializer_list<Cost>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("ragged cost matrix");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

namespace {

void check_shape(const CostMatrix& cost) {
  if (cost.rows() > cost.cols()) {
    throw std::invalid_argument("cost matrix has more rows (" +
                                std::to_string(cost.rows()) + ") than columns (" +
                                std::to_string(cost.cols()) + ")");
  }
  for (std::size_t r = 0; r < cost.rows(); ++r) {
    const auto row = cost.row(r);
    if (std::all_of(row.begin(), row.end(), CostMatrix::is_forbidden)) {
      throw InfeasibleAssignmentError(r, "every entry is forbidden");
    }
    if (std::any_of(row.begin(), row.end(), [](Cost c) { return c < 0; })) {
      throw std::invalid_argument("negative cost in row " + std::to_string(r));
    }
  }
}

}  // namespace

AssignmentResult min_cost_assignment(const CostMatrix& cost) {
  check_shape(cost);
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  constexpr Cost kInf = std::numeric_limits<Cost>::max();

  // 1-based: index 0 is the virtual column/row used to start each search.
  std::vector<Cost> row_pot(n + 1, 0);
  std::vector<Cost> col_pot(m + 1, 0);
  std::vector<std::size_t> col_owner(m + 1, 0);
  std::vector<std::size_t> way(m + 1, 0);
  std::vector<Cost> min_slack(m + 1);
  std::vector<char> visited(m + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    col_owner[0] = i;
    std::size_t col = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(visited.begin(), visited.end(), 0);
    do {
      visited[col] = 1;
      const std::size_t row = col_owner[col];
      const auto costs = cost.row(row - 1);
      const Cost row_u = row_pot[row];
      Cost delta = kInf;
      std::size_t next = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (visited[j]) continue;
        const Cost c = costs[j - 1];
        if (!CostMatrix::is_forbidden(c)) {
          const Cost reduced = c - row_u - col_pot[j];
          if (reduced < min_slack[j]) {
            min_slack[j] = reduced;
            way[j] = col;
          }
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          next = j;
        }
      }
      if (delta == kInf) {
        throw InfeasibleAssignmentError(
            i - 1, "no augmenting path through finite entries");
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (visited[j]) {
          row_pot[col_owner[j]] += delta;
          col_pot[j] -= delta;
        } else if (min_slack[j] != kInf) {
          min_slack[j] -= delta;
        }
      }
      col = next;
    } while (col_owner[col] != 0);

    do {
      const std::size_t prev = way[col];
      col_owner[col] = col_owner[prev];
      col = prev;
    } while (col != 0);
  }

  AssignmentResult result;
  result.row_to_col.assign(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (col_owner[j] != 0) result.row_to_col[col_owner[j] - 1] = j - 1;
  }
  for (std::size_t r = 0; r < n; ++r) {
    result.total_cost += cost(r, result.row_to_col[r]);
  }
  return result;
}

namespace {

struct BruteForceSearch {
  const CostMatrix& cost;
  std::vector<std::size_t> current;
  std::vector<char> taken;
  AssignmentResult best;
  bool found = false;

  void run(std::size_t row, Cost partial) {
    if (found && partial >= best.total_cost) return;
    if (row == cost.rows()) {
      best.row_to_col = current;
      best.total_cost = partial;
      found = true;
      return;
    }
    for (std::size_t c = 0; c < cost.cols(); ++c) {
      if (taken[c] || CostMatrix::is_forbidden(cost(row, c))) continue;
      taken[c] = 1;
      current[row] = c;
      run(row + 1, partial + cost(row, c));
      taken[c] = 0;
    }
  }
};

}  // namespace

AssignmentResult brute_force_assignment(const CostMatrix& cost) {
  if (cost.rows() > 8) {
    throw std::invalid_argument("brute_force_assignment supports at most 8 rows");
  }
  check_shape(cost);
  BruteForceSearch search{cost, std::vector<std::size_t>(cost.rows()),
                          std::vector<char>(cost.cols(), 0), {}, false};
  search.run(0, 0);
  if (!search.found) {
    throw InfeasibleAssignmentError(cost.rows() ? cost.rows() - 1 : 0,
                                    "no feasible assignment");
  }
  return search.best;
}

}  // namespace schoolchoice
