#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace schoolchoice {

// Dense 0-based indices. External ids (labels) are kept separately on the
// market and only matter for file I/O and reporting.
using StudentId = std::int32_t;
using SchoolId = std::int32_t;

inline constexpr SchoolId kUnassigned = -1;

struct School {
  std::int64_t label = 0;
  std::int32_t capacity = 1;

  friend bool operator==(const School&, const School&) = default;
};

class MarketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by rank_of when the school is absent from the student's list.
class UnrankedSchoolError : public MarketError {
 public:
  UnrankedSchoolError(StudentId student, SchoolId school);

  StudentId student() const noexcept { return student_; }
  SchoolId school() const noexcept { return school_; }

 private:
  StudentId student_;
  SchoolId school_;
};

class UndersuppliedMarketError : public MarketError {
 public:
  using MarketError::MarketError;
};

struct Violation {
  std::string location;  // e.g. "student 3", "priorities of school 2"
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

class ValidationError : public MarketError {
 public:
  explicit ValidationError(std::vector<Violation> violations);

  const std::vector<Violation>& violations() const noexcept {
    return violations_;
  }

 private:
  std::vector<Violation> violations_;
};

/// A school choice market: students with strict (possibly partial) preference
/// lists over schools, and schools with capacities and strict (possibly
/// partial) priority lists over students.
///
/// The market is immutable once built. Construction never throws on bad ids;
/// out-of-range or duplicate entries are kept in the raw lists (so that
/// validate_market can report them) but ignored by the rank lookup tables.
/// Every mechanism calls require_valid() first.
class Market {
 public:
  Market() = default;

  /// Student labels default to 1..n, school labels must be given through
  /// `schools`.
  Market(std::vector<School> schools,
         std::vector<std::vector<SchoolId>> preferences,
         std::vector<std::vector<StudentId>> priorities,
         std::vector<std::int64_t> student_labels = {});

  /// Convenience: unit or given capacities, labels 1..m.
  static Market from_lists(std::vector<std::int32_t> capacities,
                           std::vector<std::vector<SchoolId>> preferences,
                           std::vector<std::vector<StudentId>> priorities);

  std::int32_t n_students() const noexcept {
    return static_cast<std::int32_t>(preferences_.size());
  }
  std::int32_t n_schools() const noexcept {
    return static_cast<std::int32_t>(schools_.size());
  }

  const std::vector<School>& schools() const noexcept { return schools_; }
  std::int32_t capacity(SchoolId s) const { return schools_[s].capacity; }
  std::int64_t total_capacity() const noexcept;

  std::span<const SchoolId> preferences(StudentId t) const {
    return preferences_[t];
  }
  std::span<const StudentId> priorities(SchoolId s) const {
    return priorities_[s];
  }
  const std::vector<std::vector<SchoolId>>& all_preferences() const noexcept {
    return preferences_;
  }
  const std::vector<std::vector<StudentId>>& all_priorities() const noexcept {
    return priorities_;
  }

  std::int64_t student_label(StudentId t) const { return student_labels_[t]; }
  const std::vector<std::int64_t>& student_labels() const noexcept {
    return student_labels_;
  }

  /// 1-based position of `s` in the preference list of `t`, 0 if unranked.
  std::int32_t rank_position(StudentId t, SchoolId s) const {
    return student_rank_[static_cast<std::size_t>(t) * schools_.size() + s];
  }

  /// 1-based position of `t` in the priority list of `s`, 0 if not listed.
  std::int32_t priority_position(SchoolId s, StudentId t) const {
    return school_rank_[static_cast<std::size_t>(s) * preferences_.size() + t];
  }

  bool is_balanced() const noexcept {
    return total_capacity() == n_students();
  }
  /// True when every student ranks every school.
  bool has_full_preferences() const noexcept;

  friend bool operator==(const Market& a, const Market& b) {
    return a.schools_ == b.schools_ && a.preferences_ == b.preferences_ &&
           a.priorities_ == b.priorities_ &&
           a.student_labels_ == b.student_labels_;
  }

 private:
  std::vector<School> schools_;
  std::vector<std::vector<SchoolId>> preferences_;
  std::vector<std::vector<StudentId>> priorities_;
  std::vector<std::int64_t> student_labels_;
  std::vector<std::int32_t> student_rank_;  // n_students x n_schools
  std::vector<std::int32_t> school_rank_;   // n_schools x n_students
};

/// Per-student assignment; kUnassigned marks the explicit unassigned state.
struct Allocation {
  std::vector<SchoolId> assignment;

  Allocation() = default;
  explicit Allocation(std::size_t n_students)
      : assignment(n_students, kUnassigned) {}
  explicit Allocation(std::vector<SchoolId> a) : assignment(std::move(a)) {}

  std::size_t size() const noexcept { return assignment.size(); }
  SchoolId operator[](StudentId t) const { return assignment[t]; }
  SchoolId& operator[](StudentId t) { return assignment[t]; }

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

/// Effective rank: 1-based list position, or list length + 1 when
/// `school` is kUnassigned. Throws UnrankedSchoolError for a school the
/// student does not rank.
std::int32_t rank_of(const Market& market, StudentId student, SchoolId school);

/// Effective ranks of every student under `allocation`.
std::vector<std::int32_t> effective_ranks(const Market& market,
                                          const Allocation& allocation);

/// Every invariant violation in the market. Empty means valid.
std::vector<Violation> validate_market(const Market& market);

/// Throws ValidationError if validate_market reports anything.
void require_valid(const Market& market);

/// Checks that `allocation` fits `market`: right size, known schools, ranked
/// schools only, capacities respected. Throws MarketError otherwise.
void require_valid_allocation(const Market& market,
                              const Allocation& allocation);

/// Removes surplus seats until total capacity equals the number of students.
/// One seat at a time is taken from the school with the largest remaining
/// capacity, lowest label first among ties. Schools that must drop to zero
/// seats (fewer students than schools) are removed from the market together
/// with their entries in preference lists.
Market balance_capacities(const Market& market);

/// Market file I/O. See README for the format.
class ParseError : public MarketError {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

Market parse_market(std::string_view text);
Market load_market(const std::filesystem::path& path);
std::string format_market(const Market& market);
void save_market(const Market& market, const std::filesystem::path& path);

}  // namespace schoolchoice
