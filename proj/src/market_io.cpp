#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "schoolchoice/market.hpp"

namespace schoolchoice {

ParseError::ParseError(std::size_t line, const std::string& what)
    : MarketError("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

enum class Section { kNone, kSchools, kStudents, kPriorities };

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::int64_t parse_int(std::string_view token, std::size_t line,
                       const char* what) {
  token = trim(token);
  std::int64_t value = 0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (token.empty() || ec != std::errc{} || ptr != last) {
    throw ParseError(line, std::string("expected integer ") + what + ", got '" +
                               std::string(token) + "'");
  }
  return value;
}

struct Row {
  std::size_t line;
  std::int64_t id;
  std::vector<std::int64_t> entries;
};

Row parse_list_row(std::string_view text, std::size_t line) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) {
    throw ParseError(line, "expected 'id,item;item;...'");
  }
  Row row{line, parse_int(text.substr(0, comma), line, "id"), {}};
  std::string_view rest = trim(text.substr(comma + 1));
  while (!rest.empty()) {
    const auto semi = rest.find(';');
    row.entries.push_back(parse_int(rest.substr(0, semi), line, "list entry"));
    if (semi == std::string_view::npos) break;
    rest = rest.substr(semi + 1);
    if (trim(rest).empty()) throw ParseError(line, "trailing ';'");
  }
  return row;
}

}  // namespace

Market parse_market(std::string_view text) {
  Section section = Section::kNone;
  std::vector<Row> school_rows;
  std::vector<Row> student_rows;
  std::vector<Row> priority_rows;

  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{}
                                         : text.substr(eol + 1);
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '[') {
      if (line == "[schools]") {
        section = Section::kSchools;
      } else if (line == "[students]") {
        section = Section::kStudents;
      } else if (line == "[priorities]") {
        section = Section::kPriorities;
      } else {
        throw ParseError(line_no, "unknown section " + std::string(line));
      }
      continue;
    }

    switch (section) {
      case Section::kNone:
        throw ParseError(line_no, "data before the first section header");
      case Section::kSchools: {
        const auto comma = line.find(',');
        if (comma == std::string_view::npos) {
          throw ParseError(line_no, "expected 'school_id,capacity'");
        }
        const auto id = parse_int(line.substr(0, comma), line_no, "school id");
        const auto cap =
            parse_int(line.substr(comma + 1), line_no, "capacity");
        school_rows.push_back({line_no, id, {cap}});
        break;
      }
      case Section::kStudents:
        student_rows.push_back(parse_list_row(line, line_no));
        break;
      case Section::kPriorities:
        priority_rows.push_back(parse_list_row(line, line_no));
        break;
    }
  }

  std::vector<Violation> violations;
  const auto by_id = [](const Row& a, const Row& b) { return a.id < b.id; };
  std::stable_sort(school_rows.begin(), school_rows.end(), by_id);
  std::stable_sort(student_rows.begin(), student_rows.end(), by_id);

  std::unordered_map<std::int64_t, SchoolId> school_index;
  std::vector<School> schools;
  for (const auto& row : school_rows) {
    if (school_index.contains(row.id)) {
      violations.push_back({"line " + std::to_string(row.line),
                            "duplicate school row " + std::to_string(row.id)});
      continue;
    }
    if (row.entries[0] > std::numeric_limits<std::int32_t>::max()) {
      throw ParseError(row.line, "capacity out of range");
    }
    school_index.emplace(row.id, static_cast<SchoolId>(schools.size()));
    schools.push_back({row.id, static_cast<std::int32_t>(row.entries[0])});
  }

  std::unordered_map<std::int64_t, StudentId> student_index;
  std::vector<std::int64_t> student_labels;
  std::vector<const Row*> kept_students;
  for (const auto& row : student_rows) {
    if (student_index.contains(row.id)) {
      violations.push_back({"line " + std::to_string(row.line),
                            "duplicate student row " + std::to_string(row.id)});
      continue;
    }
    student_index.emplace(row.id, static_cast<StudentId>(kept_students.size()));
    student_labels.push_back(row.id);
    kept_students.push_back(&row);
  }

  std::vector<std::vector<SchoolId>> preferences;
  preferences.reserve(kept_students.size());
  for (const Row* row : kept_students) {
    std::vector<SchoolId> list;
    for (const auto label : row->entries) {
      auto it = school_index.find(label);
      if (it == school_index.end()) {
        violations.push_back({"line " + std::to_string(row->line),
                              "unknown school id " + std::to_string(label)});
        continue;
      }
      list.push_back(it->second);
    }
    preferences.push_back(std::move(list));
  }

  std::vector<std::vector<StudentId>> priorities(schools.size());
  std::vector<char> has_row(schools.size(), 0);
  for (const auto& row : priority_rows) {
    auto it = school_index.find(row.id);
    if (it == school_index.end()) {
      violations.push_back({"line " + std::to_string(row.line),
                            "unknown school id " + std::to_string(row.id)});
      continue;
    }
    if (has_row[it->second]) {
      violations.push_back({"line " + std::to_string(row.line),
                            "duplicate priority row for school " +
                                std::to_string(row.id)});
      continue;
    }
    has_row[it->second] = 1;
    auto& list = priorities[it->second];
    for (const auto label : row.entries) {
      auto st = student_index.find(label);
      if (st == student_index.end()) {
        violations.push_back({"line " + std::to_string(row.line),
                              "unknown student id " + std::to_string(label)});
        continue;
      }
      list.push_back(st->second);
    }
  }

  Market market(std::move(schools), std::move(preferences),
                std::move(priorities), std::move(student_labels));
  auto structural = validate_market(market);
  violations.insert(violations.end(), structural.begin(), structural.end());
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return market;
}

Market load_market(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MarketError("cannot open market file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_market(buffer.str());
}

std::string format_market(const Market& market) {
  std::string out = "[schools]\n";
  const auto& schools = market.schools();
  for (const auto& s : schools) {
    out += std::to_string(s.label) + "," + std::to_string(s.capacity) + "\n";
  }
  out += "[students]\n";
  for (StudentId t = 0; t < market.n_students(); ++t) {
    out += std::to_string(market.student_label(t)) + ",";
    bool first = true;
    for (const SchoolId s : market.preferences(t)) {
      if (!first) out += ';';
      out += std::to_string(schools[s].label);
      first = false;
    }
    out += '\n';
  }
  out += "[priorities]\n";
  for (SchoolId s = 0; s < market.n_schools(); ++s) {
    out += std::to_string(schools[s].label) + ",";
    bool first = true;
    for (const StudentId t : market.priorities(s)) {
      if (!first) out += ';';
      out += std::to_string(market.student_label(t));
      first = false;
    }
    out += '\n';
  }
  return out;
}

void save_market(const Market& market, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw MarketError("cannot write market file " + path.string());
  out << format_market(market);
}

}  // namespace schoolchoice
