#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>
#include <tuple>

#include "schoolchoice/simulation.hpp"

namespace schoolchoice {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  if (trim(text).empty()) return parts;
  for (;;) {
    const auto pos = text.find(sep);
    parts.push_back(trim(text.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    text = text.substr(pos + 1);
  }
  return parts;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("invalid " + std::string(what) + ": '" +
                      std::string(text) + "'");
  }
  return value;
}

std::string format_number(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

Seed mechanism_seed(Seed master, std::int32_t replication,
                    MechanismKind kind) {
  return derive_seed(master, static_cast<std::uint64_t>(replication),
                     (static_cast<std::uint64_t>(SeedStream::kMechanism) << 32) |
                         static_cast<std::uint64_t>(kind));
}

Seed manipulation_seed(Seed master, std::int32_t replication,
                       std::size_t setting) {
  return derive_seed(
      master, static_cast<std::uint64_t>(replication),
      (static_cast<std::uint64_t>(SeedStream::kManipulation) << 32) | setting);
}

std::pair<double, double> mean_and_se(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return {mean, 0.0};
  double sq = 0.0;
  for (const double x : xs) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / (n - 1.0) / n)};
}

}  // namespace

double Threshold::resolve(std::int32_t n) const {
  switch (kind) {
    case Kind::kAbsolute:
      return value;
    case Kind::kLogN:
      return value * std::log(static_cast<double>(n));
    case Kind::kFractionOfN:
      return value * static_cast<double>(n);
  }
  return value;
}

std::string Threshold::label() const {
  switch (kind) {
    case Kind::kAbsolute:
      return format_number(value, "%g");
    case Kind::kLogN:
      return value == 1.0 ? "log" : format_number(value, "%g") + "log";
    case Kind::kFractionOfN:
      return format_number(value, "%g") + "n";
  }
  return {};
}

Threshold Threshold::parse(std::string_view text) {
  text = trim(text);
  if (text.ends_with("log")) {
    text.remove_suffix(3);
    return {Kind::kLogN, text.empty() ? 1.0 : parse_number<double>(text, "threshold")};
  }
  if (text.ends_with("n")) {
    text.remove_suffix(1);
    return {Kind::kFractionOfN, parse_number<double>(text, "threshold")};
  }
  return {Kind::kAbsolute, parse_number<double>(text, "threshold")};
}

std::vector<Threshold> default_thresholds() {
  using K = Threshold::Kind;
  return {{K::kAbsolute, 1.0},     {K::kAbsolute, 2.0},
          {K::kLogN, 1.0},         {K::kFractionOfN, 0.1},
          {K::kFractionOfN, 0.25}, {K::kFractionOfN, 0.5}};
}

std::string ManipulationSetting::label() const {
  return "RM+" + std::string(to_string(kind)) + "@" + format_number(share, "%g");
}

void validate_config(const ExperimentConfig& config) {
  if (!config.market_file && config.n < 1) {
    throw ConfigError("n must be at least 1");
  }
  if (config.replications < 1) {
    throw ConfigError("reps must be at least 1");
  }
  if (config.mechanisms.empty() && config.manipulations.empty()) {
    throw ConfigError("no mechanisms selected");
  }
  for (const auto& m : config.manipulations) {
    if (!(m.share >= 0.0 && m.share <= 1.0)) {
      throw ConfigError("manipulation share " + format_number(m.share, "%g") +
                        " outside [0, 1]");
    }
  }
  if (config.threads < 0) throw ConfigError("threads must be >= 0");
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::vector<ManipulationKind> kinds;
  std::vector<double> shares;
  bool saw_kinds = false;
  bool saw_shares = false;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "n") {
      base.n = parse_number<std::int32_t>(value, "n");
    } else if (key == "reps") {
      base.replications = parse_number<std::int32_t>(value, "reps");
    } else if (key == "seed") {
      base.master_seed = parse_number<std::uint64_t>(value, "seed");
    } else if (key == "threads") {
      base.threads = parse_number<std::int32_t>(value, "threads");
    } else if (key == "market") {
      base.market_file = std::filesystem::path(std::string(value));
    } else if (key == "mechanisms") {
      base.mechanisms.clear();
      for (const auto name : split(value, ',')) {
        const auto kind = parse_mechanism(name);
        if (!kind) throw ConfigError("unknown mechanism '" + std::string(name) + "'");
        base.mechanisms.push_back(*kind);
      }
    } else if (key == "thresholds") {
      base.thresholds.clear();
      for (const auto t : split(value, ',')) {
        base.thresholds.push_back(Threshold::parse(t));
      }
    } else if (key == "kinds") {
      saw_kinds = true;
      for (const auto name : split(value, ',')) {
        const auto kind = parse_manipulation(name);
        if (!kind) {
          throw ConfigError("unknown manipulation '" + std::string(name) + "'");
        }
        kinds.push_back(*kind);
      }
    } else if (key == "shares") {
      saw_shares = true;
      for (const auto s : split(value, ',')) {
        shares.push_back(parse_number<double>(s, "share"));
      }
    } else {
      throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
  }
  if (saw_kinds != saw_shares) {
    throw ConfigError("'kinds' and 'shares' must be given together");
  }
  if (saw_kinds) {
    base.manipulations.clear();
    for (const auto kind : kinds) {
      for (const double share : shares) base.manipulations.push_back({kind, share});
    }
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::move(base));
}

const MechanismSummary& ExperimentReport::find(std::string_view label) const {
  for (const auto& row : rows) {
    if (row.label == label) return row;
  }
  throw std::out_of_range("no report row '" + std::string(label) + "'");
}

ExperimentError::ExperimentError(std::int32_t replication,
                                 const std::string& what)
    : std::runtime_error("replication " + std::to_string(replication) + ": " +
                         what),
      replication_(replication) {}

ReplicationStats summarize(const Market& truth, const Allocation& allocation,
                           std::span<const double> thresholds) {
  const RankStats stats = rank_stats(truth, allocation);
  ReplicationStats out;
  out.mean = stats.mean;
  out.max = stats.max;
  out.variance = stats.variance;
  out.envy_share = stats.envy_share;
  out.unassigned = stats.unassigned_count;
  for (const auto& [rank, count] : stats.histogram) {
    out.rank_sum += static_cast<std::int64_t>(rank) * count;
  }
  out.threshold_shares = threshold_shares(stats, thresholds);
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  validate_config(config);

  std::optional<Market> fixed;
  if (config.market_file) fixed = load_market(*config.market_file);
  const std::int32_t n = fixed ? fixed->n_students() : config.n;

  ExperimentReport report;
  report.n = n;
  report.replications = config.replications;
  for (const auto& t : config.thresholds) report.thresholds.push_back(t.resolve(n));
  for (const auto kind : config.mechanisms) {
    report.rows.emplace_back().label = std::string(to_string(kind));
  }
  for (const auto& m : config.manipulations) {
    report.rows.emplace_back().label = m.label();
  }
  const std::size_t row_count = report.rows.size();
  const auto reps = static_cast<std::size_t>(config.replications);

  std::vector<std::vector<ReplicationStats>> results(
      reps, std::vector<ReplicationStats>(row_count));
  std::vector<std::string> errors(reps);

  auto run_one = [&](std::int32_t r) {
    const Market generated =
        fixed ? Market{}
              : generate_uniform_market(
                    n, derive_seed(config.master_seed,
                                   static_cast<std::uint64_t>(r),
                                   static_cast<std::uint64_t>(SeedStream::kMarket)));
    const Market& market = fixed ? *fixed : generated;
    auto& out = results[static_cast<std::size_t>(r)];

    std::optional<Allocation> truthful_rm;
    std::size_t row = 0;
    for (const auto kind : config.mechanisms) {
      Allocation a =
          run_mechanism(kind, market, mechanism_seed(config.master_seed, r, kind));
      out[row++] = summarize(market, a, report.thresholds);
      if (kind == MechanismKind::kRM) truthful_rm = std::move(a);
    }
    if (config.manipulations.empty()) return;

    const Seed rm_seed = mechanism_seed(config.master_seed, r, MechanismKind::kRM);
    if (!truthful_rm) truthful_rm = rank_minimizing(market, rm_seed);
    for (std::size_t j = 0; j < config.manipulations.size(); ++j) {
      const auto& setting = config.manipulations[j];
      const Market reported =
          apply_manipulation(market, *truthful_rm, setting.kind, setting.share,
                             manipulation_seed(config.master_seed, r, j));
      const Allocation a = rank_minimizing(reported, rm_seed);
      out[row++] = summarize(market, a, report.thresholds);
    }
  };

  std::int32_t threads = config.threads;
  if (threads == 0) {
    threads = static_cast<std::int32_t>(
        std::max(1u, std::thread::hardware_concurrency()));
  }
  threads = std::min(threads, config.replications);

  std::atomic<std::int32_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::int32_t r = next.fetch_add(1);
      if (r >= config.replications) return;
      try {
        run_one(r);
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(r)] = e.what();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (std::int32_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  for (std::size_t r = 0; r < reps; ++r) {
    if (!errors[r].empty()) {
      throw ExperimentError(static_cast<std::int32_t>(r), errors[r]);
    }
  }

  for (std::size_t row = 0; row < row_count; ++row) {
    auto& summary = report.rows[row];
    summary.replications.reserve(reps);
    std::vector<double> means;
    std::vector<double> maxima;
    double variance = 0.0;
    double envy = 0.0;
    double unassigned = 0.0;
    std::vector<double> shares(report.thresholds.size(), 0.0);
    for (std::size_t r = 0; r < reps; ++r) {
      auto& s = results[r][row];
      means.push_back(s.mean);
      maxima.push_back(static_cast<double>(s.max));
      variance += s.variance;
      envy += s.envy_share;
      unassigned += s.unassigned;
      for (std::size_t k = 0; k < shares.size(); ++k) {
        shares[k] += s.threshold_shares[k];
      }
      summary.replications.push_back(std::move(s));
    }
    const double count = static_cast<double>(reps);
    std::tie(summary.mean, summary.se_mean) = mean_and_se(means);
    std::tie(summary.max_mean, summary.se_max) = mean_and_se(maxima);
    summary.variance = variance / count;
    summary.envy_share = envy / count;
    summary.unassigned = unassigned / count;
    for (auto& s : shares) s /= count;
    summary.threshold_shares = std::move(shares);
  }
  return report;
}

void write_report_csv(const ExperimentReport& report, std::ostream& out) {
  out << "mechanism,n,reps,mean,se_mean,max_mean,se_max,variance,envy_share,"
         "unassigned,threshold_m,share_gt_m\n";
  for (const auto& row : report.rows) {
    const std::string prefix =
        row.label + "," + std::to_string(report.n) + "," +
        std::to_string(report.replications) + "," + format_number(row.mean) +
        "," + format_number(row.se_mean) + "," + format_number(row.max_mean) +
        "," + format_number(row.se_max) + "," + format_number(row.variance) +
        "," + format_number(row.envy_share) + "," +
        format_number(row.unassigned) + ",";
    if (report.thresholds.empty()) {
      out << prefix << ",\n";
      continue;
    }
    for (std::size_t k = 0; k < report.thresholds.size(); ++k) {
      out << prefix << format_number(report.thresholds[k], "%.6g") << ","
          << format_number(row.threshold_shares[k]) << "\n";
    }
  }
}

std::string report_csv(const ExperimentReport& report) {
  std::ostringstream out;
  write_report_csv(report, out);
  return out.str();
}

}  // namespace schoolchoice
