#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace schoolchoice {

using Cost = std::int64_t;

// Forbidden (infinite) entry. Far above any achievable finite total: with
// ranks bounded by n and n <= 1e6 rows, a finite total never exceeds 1e12.
inline constexpr Cost kForbidden = std::numeric_limits<Cost>::max() / 4;

class InfeasibleAssignmentError : public std::runtime_error {
 public:
  InfeasibleAssignmentError(std::size_t row, const std::string& why);
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Dense row-major rows x cols matrix of nonnegative integer costs.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, Cost fill = kForbidden)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  CostMatrix(std::initializer_list<std::initializer_list<Cost>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Cost& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  Cost operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  std::span<const Cost> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  static bool is_forbidden(Cost c) noexcept { return c >= kForbidden; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Cost> data_;
};

struct AssignmentResult {
  std::vector<std::size_t> row_to_col;
  Cost total_cost = 0;
};

/// Exact minimum-cost assignment of every row to a distinct column
/// (rows <= cols). Shortest augmenting paths with dual potentials, one row
/// at a time; O(rows^2 * cols). Ties are resolved toward the lowest column
/// index, so the result is a deterministic function of the matrix.
///
/// Throws InfeasibleAssignmentError when some row cannot be matched through
/// finite entries; std::invalid_argument when rows > cols.
AssignmentResult min_cost_assignment(const CostMatrix& cost);

/// Exhaustive search over all injections rows -> cols. Test oracle; refuses
/// more than 8 rows.
AssignmentResult brute_force_assignment(const CostMatrix& cost);

}  // namespace schoolchoice
