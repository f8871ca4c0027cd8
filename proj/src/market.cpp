#include "schoolchoice/market.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

namespace schoolchoice {

UnrankedSchoolError::UnrankedSchoolError(StudentId student, SchoolId school)
    : MarketError("unranked school: student " + std::to_string(student) +
                  " does not rank school " + std::to_string(school)),
      student_(student),
      school_(school) {}

namespace {

std::string summarize(const std::vector<Violation>& violations) {
  std::string out = "invalid market (" + std::to_string(violations.size()) +
                    " violation" + (violations.size() == 1 ? "" : "s") + ")";
  for (const auto& v : violations) out += "; " + v.location + ": " + v.message;
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : MarketError(summarize(violations)), violations_(std::move(violations)) {}

Market::Market(std::vector<School> schools,
               std::vector<std::vector<SchoolId>> preferences,
               std::vector<std::vector<StudentId>> priorities,
               std::vector<std::int64_t> student_labels)
    : schools_(std::move(schools)),
      preferences_(std::move(preferences)),
      priorities_(std::move(priorities)),
      student_labels_(std::move(student_labels)) {
  const std::size_t n = preferences_.size();
  const std::size_t m = schools_.size();
  if (student_labels_.empty()) {
    student_labels_.resize(n);
    std::iota(student_labels_.begin(), student_labels_.end(), 1);
  }
  priorities_.resize(m);

  student_rank_.assign(n * m, 0);
  for (std::size_t t = 0; t < n; ++t) {
    const auto& list = preferences_[t];
    for (std::size_t pos = 0; pos < list.size(); ++pos) {
      const SchoolId s = list[pos];
      if (s < 0 || static_cast<std::size_t>(s) >= m) continue;
      auto& slot = student_rank_[t * m + s];
      if (slot == 0) slot = static_cast<std::int32_t>(pos + 1);
    }
  }
  school_rank_.assign(m * n, 0);
  for (std::size_t s = 0; s < m; ++s) {
    const auto& list = priorities_[s];
    for (std::size_t pos = 0; pos < list.size(); ++pos) {
      const StudentId t = list[pos];
      if (t < 0 || static_cast<std::size_t>(t) >= n) continue;
      auto& slot = school_rank_[s * n + t];
      if (slot == 0) slot = static_cast<std::int32_t>(pos + 1);
    }
  }
}

Market Market::from_lists(std::vector<std::int32_t> capacities,
                          std::vector<std::vector<SchoolId>> preferences,
                          std::vector<std::vector<StudentId>> priorities) {
  std::vector<School> schools;
  schools.reserve(capacities.size());
  for (std::size_t s = 0; s < capacities.size(); ++s) {
    schools.push_back({static_cast<std::int64_t>(s + 1), capacities[s]});
  }
  return Market(std::move(schools), std::move(preferences),
                std::move(priorities));
}

std::int64_t Market::total_capacity() const noexcept {
  std::int64_t total = 0;
  for (const auto& s : schools_) total += s.capacity;
  return total;
}

bool Market::has_full_preferences() const noexcept {
  return std::all_of(preferences_.begin(), preferences_.end(),
                     [this](const auto& list) {
                       return list.size() == schools_.size();
                     });
}

std::int32_t rank_of(const Market& market, StudentId student,
                     SchoolId school) {
  if (student < 0 || student >= market.n_students()) {
    throw MarketError("unknown student " + std::to_string(student));
  }
  if (school == kUnassigned) {
    return static_cast<std::int32_t>(market.preferences(student).size()) + 1;
  }
  if (school < 0 || school >= market.n_schools()) {
    throw MarketError("unknown school " + std::to_string(school));
  }
  const std::int32_t pos = market.rank_position(student, school);
  if (pos == 0) throw UnrankedSchoolError(student, school);
  return pos;
}

std::vector<std::int32_t> effective_ranks(const Market& market,
                                          const Allocation& allocation) {
  std::vector<std::int32_t> ranks(allocation.size());
  for (StudentId t = 0; t < static_cast<StudentId>(allocation.size()); ++t) {
    ranks[t] = rank_of(market, t, allocation[t]);
  }
  return ranks;
}

std::vector<Violation> validate_market(const Market& market) {
  std::vector<Violation> out;
  const auto n = market.n_students();
  const auto m = market.n_schools();

  if (n == 0) out.push_back({"market", "no students"});

  const auto& schools = market.schools();
  for (SchoolId s = 0; s < m; ++s) {
    const std::string where = "school " + std::to_string(schools[s].label);
    if (schools[s].capacity <= 0) {
      out.push_back({where, "non-positive capacity " +
                                std::to_string(schools[s].capacity)});
    }
    if (s > 0 && schools[s].label <= schools[s - 1].label) {
      out.push_back({where, schools[s].label == schools[s - 1].label
                                ? "duplicate school id"
                                : "school ids not in ascending order"});
    }
  }
  const auto& labels = market.student_labels();
  if (static_cast<std::int32_t>(labels.size()) != n) {
    out.push_back({"market", "student label count does not match students"});
  } else {
    for (StudentId t = 1; t < n; ++t) {
      if (labels[t] <= labels[t - 1]) {
        out.push_back({"student " + std::to_string(labels[t]),
                       labels[t] == labels[t - 1]
                           ? "duplicate student id"
                           : "student ids not in ascending order"});
      }
    }
  }

  auto student_name = [&](StudentId t) {
    return std::to_string(t < static_cast<StudentId>(labels.size()) ? labels[t]
                                                                    : t + 1);
  };

  std::vector<char> seen;
  for (StudentId t = 0; t < n; ++t) {
    const std::string where = "preference list of student " + student_name(t);
    seen.assign(m, 0);
    for (const SchoolId s : market.preferences(t)) {
      if (s < 0 || s >= m) {
        out.push_back({where, "unknown school id " + std::to_string(s)});
        continue;
      }
      if (seen[s]) {
        out.push_back({where, "duplicate in preference list of student " +
                                  student_name(t)});
      }
      seen[s] = 1;
    }
  }
  for (SchoolId s = 0; s < m; ++s) {
    const std::string where =
        "priority list of school " + std::to_string(schools[s].label);
    seen.assign(n, 0);
    for (const StudentId t : market.priorities(s)) {
      if (t < 0 || t >= n) {
        out.push_back({where, "unknown student id " + std::to_string(t)});
        continue;
      }
      if (seen[t]) {
        out.push_back({where, "duplicate in priority list of school " +
                                  std::to_string(schools[s].label)});
      }
      seen[t] = 1;
    }
  }
  return out;
}

void require_valid(const Market& market) {
  auto violations = validate_market(market);
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

void require_valid_allocation(const Market& market,
                              const Allocation& allocation) {
  if (static_cast<std::int32_t>(allocation.size()) != market.n_students()) {
    throw MarketError("allocation covers " + std::to_string(allocation.size()) +
                      " students, market has " +
                      std::to_string(market.n_students()));
  }
  std::vector<std::int32_t> load(market.n_schools(), 0);
  for (StudentId t = 0; t < market.n_students(); ++t) {
    const SchoolId s = allocation[t];
    if (s == kUnassigned) continue;
    if (s < 0 || s >= market.n_schools()) {
      throw MarketError("allocation names unknown school " + std::to_string(s));
    }
    if (market.rank_position(t, s) == 0) throw UnrankedSchoolError(t, s);
    if (++load[s] > market.capacity(s)) {
      throw MarketError("school " + std::to_string(market.schools()[s].label) +
                        " over capacity");
    }
  }
}

Market balance_capacities(const Market& market) {
  const std::int64_t n = market.n_students();
  std::int64_t surplus = market.total_capacity() - n;
  if (surplus < 0) {
    throw UndersuppliedMarketError(
        "undersupplied market: total capacity " +
        std::to_string(market.total_capacity()) + " < " + std::to_string(n) +
        " students");
  }
  if (surplus == 0) return market;

  std::vector<School> schools = market.schools();
  while (surplus > 0) {
    // Largest capacity first; schools are stored in ascending label order, so
    // max_element's first-hit rule gives the lowest label among ties.
    auto it = std::max_element(
        schools.begin(), schools.end(),
        [](const School& a, const School& b) { return a.capacity < b.capacity; });
    --it->capacity;
    --surplus;
  }

  const auto m = market.n_schools();
  std::vector<SchoolId> remap(m, kUnassigned);
  std::vector<School> kept;
  std::vector<std::vector<StudentId>> priorities;
  for (SchoolId s = 0; s < m; ++s) {
    if (schools[s].capacity == 0) continue;
    remap[s] = static_cast<SchoolId>(kept.size());
    kept.push_back(schools[s]);
    priorities.push_back(market.all_priorities()[s]);
  }
  if (static_cast<SchoolId>(kept.size()) == m) {
    return Market(std::move(kept), market.all_preferences(),
                  std::move(priorities), market.student_labels());
  }

  std::vector<std::vector<SchoolId>> preferences;
  preferences.reserve(market.n_students());
  for (const auto& list : market.all_preferences()) {
    std::vector<SchoolId> filtered;
    filtered.reserve(list.size());
    for (const SchoolId s : list) {
      if (s >= 0 && s < m && remap[s] != kUnassigned) {
        filtered.push_back(remap[s]);
      }
    }
    preferences.push_back(std::move(filtered));
  }
  return Market(std::move(kept), std::move(preferences), std::move(priorities),
                market.student_labels());
}

}  // namespace schoolchoice
