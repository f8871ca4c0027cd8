#include <cmath>
#include <sstream>

#include "doctest.h"
#include "schoolchoice/simulation.hpp"

using namespace schoolchoice;

namespace {

std::vector<SchoolId> list(const Market& m, StudentId t) {
  const auto p = m.preferences(t);
  return {p.begin(), p.end()};
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n = 20;
  c.replications = 30;
  c.master_seed = 7;
  c.threads = 1;
  return c;
}

}  // namespace

TEST_CASE("uniform market generator") {
  SUBCASE("same seed, same market; different seed, different market") {
    CHECK(generate_uniform_market(30, 1) == generate_uniform_market(30, 1));
    CHECK_FALSE(generate_uniform_market(30, 1) == generate_uniform_market(30, 2));
  }
  SUBCASE("n = 1") {
    const Market m = generate_uniform_market(1, 0);
    CHECK(m.n_students() == 1);
    CHECK(list(m, 0) == std::vector<SchoolId>{0});
  }
  SUBCASE("valid, balanced, full lists") {
    const Market m = generate_uniform_market(40, 3);
    CHECK(validate_market(m).empty());
    CHECK(m.is_balanced());
    CHECK(m.has_full_preferences());
  }
  SUBCASE("first choices are uniform (n = 5, 1e5 draws)") {
    const int draws = 100000;
    std::vector<int> counts(5, 0);
    for (int d = 0; d < draws; ++d) {
      ++counts[generate_uniform_market(5, derive_seed(11, d, 0)).preferences(0)[0]];
    }
    const double se = std::sqrt(0.2 * 0.8 / draws);
    for (const int c : counts) CHECK(std::abs(c / double(draws) - 0.2) <= 3 * se);
  }
}

TEST_CASE("manipulation transforms") {
  const Market m = Market::from_lists({1, 1, 1}, {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}},
                                      {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}});
  const Allocation baseline(std::vector<SchoolId>{0, 1, 2});

  SUBCASE("eligibility") {
    CHECK(manipulation_eligible(m, baseline, ManipulationKind::kDropAssigned) ==
          std::vector<StudentId>{1, 2});
    CHECK(manipulation_eligible(m, baseline, ManipulationKind::kDropFirst) ==
          std::vector<StudentId>{2});
  }
  SUBCASE("DropAssigned moves the assigned school last") {
    const Market out =
        apply_manipulation(m, baseline, ManipulationKind::kDropAssigned, 1.0, 3);
    CHECK(list(out, 0) == std::vector<SchoolId>{0, 1, 2});
    CHECK(list(out, 1) == std::vector<SchoolId>{0, 2, 1});
    CHECK(list(out, 2) == std::vector<SchoolId>{0, 1, 2});
    CHECK(out.all_priorities() == m.all_priorities());
  }
  SUBCASE("DropFirst moves the first choice last") {
    const Market out =
        apply_manipulation(m, baseline, ManipulationKind::kDropFirst, 1.0, 3);
    CHECK(list(out, 2) == std::vector<SchoolId>{1, 2, 0});
    CHECK(list(out, 0) == std::vector<SchoolId>{0, 1, 2});
  }
  SUBCASE("share 0 leaves the market untouched") {
    for (const auto kind : {ManipulationKind::kDropAssigned, ManipulationKind::kDropFirst}) {
      CHECK(apply_manipulation(m, baseline, kind, 0.0, 3) == m);
    }
  }
  SUBCASE("count is round(share * eligible)") {
    const Market big = generate_uniform_market(200, 4);
    const Allocation rm = rank_minimizing(big, 4);
    const auto eligible =
        manipulation_eligible(big, rm, ManipulationKind::kDropAssigned);
    const Market out =
        apply_manipulation(big, rm, ManipulationKind::kDropAssigned, 0.4, 9);
    std::int32_t changed = 0;
    for (StudentId t = 0; t < big.n_students(); ++t) {
      if (list(out, t) != list(big, t)) ++changed;
    }
    CHECK(changed == std::lround(0.4 * static_cast<double>(eligible.size())));
  }
  SUBCASE("share outside [0, 1] throws") {
    CHECK_THROWS_AS(apply_manipulation(m, baseline, ManipulationKind::kDropFirst, 1.5, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_manipulation(m, baseline, ManipulationKind::kDropFirst, -0.1, 0),
                    std::invalid_argument);
  }
  SUBCASE("names") {
    CHECK(parse_manipulation("DropAssigned") == ManipulationKind::kDropAssigned);
    CHECK(parse_manipulation(to_string(ManipulationKind::kDropFirst)) ==
          ManipulationKind::kDropFirst);
    CHECK_FALSE(parse_manipulation("DropLast").has_value());
  }
}

TEST_CASE("thresholds") {
  CHECK(Threshold::parse("2").resolve(100) == 2.0);
  CHECK(Threshold::parse("log").resolve(100) == doctest::Approx(std::log(100.0)));
  CHECK(Threshold::parse("0.1n").resolve(100) == doctest::Approx(10.0));
  CHECK(Threshold::parse("0.25n").label() == "0.25n");
  CHECK(Threshold::parse("log").label() == "log");
  CHECK_THROWS_AS(Threshold::parse("lots"), ConfigError);
  CHECK(default_thresholds().size() == 6);
}

TEST_CASE("config parsing") {
  const auto c = parse_config(
      "# comment\n n = 50\nreps=12\nseed=9\nmechanisms=DA,RM\n"
      "thresholds=1,log\nkinds=DropFirst\nshares=0,0.5\nthreads=2\n");
  CHECK(c.n == 50);
  CHECK(c.replications == 12);
  CHECK(c.master_seed == 9);
  CHECK(c.mechanisms == std::vector<MechanismKind>{MechanismKind::kDA, MechanismKind::kRM});
  CHECK(c.thresholds.size() == 2);
  REQUIRE(c.manipulations.size() == 2);
  CHECK(c.manipulations[1].label() == "RM+DropFirst@0.5");
  CHECK(c.threads == 2);
  CHECK_THROWS_AS(parse_config("colour=blue\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("n=ten\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("mechanisms=Boston\n"), ConfigError);
  ExperimentConfig bad = small_config();
  bad.replications = 0;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
}

TEST_CASE("experiments are reproducible") {
  const auto config = small_config();
  const auto a = run_experiment(config);
  const auto b = run_experiment(config);
  CHECK(report_csv(a) == report_csv(b));
  CHECK(a.rows.size() == 3);
  CHECK(a.find("RM").replications.size() == 30);

  ExperimentConfig threaded = config;
  threaded.threads = 4;
  CHECK(report_csv(run_experiment(threaded)) == report_csv(a));

  ExperimentConfig other = config;
  other.master_seed = 8;
  CHECK(report_csv(run_experiment(other)) != report_csv(a));
}

TEST_CASE("experiment rows agree with direct mechanism runs") {
  ExperimentConfig config = small_config();
  config.mechanisms = {MechanismKind::kDA};
  config.manipulations = {{ManipulationKind::kDropAssigned, 0.0}};
  const auto report = run_experiment(config);
  const auto& rm0 = report.find("RM+DropAssigned@0");
  const auto& da = report.find("DA");
  std::vector<double> cuts;
  for (const auto& t : config.thresholds) cuts.push_back(t.resolve(config.n));
  CHECK(report.thresholds == cuts);
  for (std::int32_t r = 0; r < config.replications; ++r) {
    const Market m = generate_uniform_market(
        config.n, derive_seed(config.master_seed, r,
                              static_cast<std::uint64_t>(SeedStream::kMarket)));
    const auto direct_da = summarize(m, deferred_acceptance(m), cuts);
    CHECK(da.replications[r].rank_sum == direct_da.rank_sum);
    CHECK(da.replications[r].max == direct_da.max);
    // With nobody manipulating, the row is the truthful RM outcome, whose
    // rank sum is the optimum and so never above DA.
    CHECK(rm0.replications[r].rank_sum <= direct_da.rank_sum);
    const Seed rm_seed =
        derive_seed(config.master_seed, r,
                    (static_cast<std::uint64_t>(SeedStream::kMechanism) << 32) |
                        static_cast<std::uint64_t>(MechanismKind::kRM));
    CHECK(rm0.replications[r].rank_sum ==
          summarize(m, rank_minimizing(m, rm_seed), cuts).rank_sum);
  }
  CHECK_THROWS(report.find("TTC"));
}

TEST_CASE("manipulation hurts the population average at large shares") {
  ExperimentConfig config = small_config();
  config.n = 60;
  config.replications = 40;
  config.mechanisms = {MechanismKind::kRM};
  config.manipulations = {{ManipulationKind::kDropFirst, 0.8}};
  const auto report = run_experiment(config);
  CHECK(report.find("RM+DropFirst@0.8").mean >= report.find("RM").mean);
}

TEST_CASE("fixed market file") {
  const std::filesystem::path data = SCHOOLCHOICE_TEST_DATA;
  ExperimentConfig config = small_config();
  config.market_file = data / "partial_market.txt";
  config.replications = 5;
  const auto report = run_experiment(config);
  CHECK(report.n == 5);
  // DA is deterministic on a fixed market.
  const auto& da = report.find("DA");
  CHECK(da.se_mean == 0.0);
  CHECK(da.unassigned >= 1.0);
}

TEST_CASE("CSV layout") {
  ExperimentConfig config = small_config();
  config.replications = 3;
  config.mechanisms = {MechanismKind::kTTC};
  config.thresholds = {Threshold::parse("2"), Threshold::parse("0.5n")};
  const auto csv = report_csv(run_experiment(config));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line ==
        "mechanism,n,reps,mean,se_mean,max_mean,se_max,variance,envy_share,"
        "unassigned,threshold_m,share_gt_m");
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(line.rfind("TTC,20,3,", 0) == 0);
    ++rows;
  }
  CHECK(rows == 2);
}
