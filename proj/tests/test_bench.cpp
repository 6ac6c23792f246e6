#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "rrcpsp/rrcpsp.hpp"

using namespace rrcpsp;
namespace fs = std::filesystem;

namespace {

ResultRecord rec(std::string inst, std::string variant, double t, std::string status = "optimal", int gamma = 3) {
  ResultRecord r;
  r.instance = std::move(inst);
  r.set = set_label(r.instance);
  r.gamma = gamma;
  r.variant = std::move(variant);
  r.status = std::move(status);
  r.wall_s = t;
  if (r.status == "optimal") {
    r.objective = 10;
    r.bound = 10;
    r.gap = 0;
  }
  return r;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("rrcpsp-bench-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Profile, ThreeInstanceExample) {
  const std::vector<ResultRecord> records{rec("a", "A", 1), rec("a", "B", 2), rec("b", "A", 2),
                                          rec("b", "B", 2), rec("c", "A", 4), rec("c", "B", 1)};
  const auto p = performance_profile(records, {"A", "B"});
  ASSERT_EQ(p.instances.size(), 3u);
  EXPECT_EQ(p.ratio, (std::vector<std::vector<double>>{{1, 2}, {1, 1}, {4, 1}}));
  EXPECT_DOUBLE_EQ(p.rho_at(0, 1), 2.0 / 3);
  EXPECT_DOUBLE_EQ(p.rho_at(1, 1), 2.0 / 3);
  EXPECT_DOUBLE_EQ(p.rho_at(0, 2), 2.0 / 3);
  EXPECT_DOUBLE_EQ(p.rho_at(1, 2), 1.0);
  EXPECT_DOUBLE_EQ(p.failure_ratio, 8.0);
  EXPECT_EQ(p.taus, (std::vector<double>{1, 2, 4}));
}

TEST(Profile, FailuresAndTinyTimes) {
  const std::vector<ResultRecord> records{rec("a", "A", 0.0), rec("a", "B", 2e-6), rec("b", "A", 3),
                                          rec("b", "B", 60, "timeout")};
  const auto p = performance_profile(records, {"A", "B"});
  EXPECT_DOUBLE_EQ(p.ratio[0][1], 2.0);
  EXPECT_DOUBLE_EQ(p.failure_ratio, 4.0);
  EXPECT_DOUBLE_EQ(p.ratio[1][1], 4.0);
  EXPECT_DOUBLE_EQ(p.rho_at(1, 3.9), 0.5);
}

TEST(Profile, InstancesAreKeyedByBudget) {
  const std::vector<ResultRecord> records{rec("a", "A", 1, "optimal", 3), rec("a", "A", 1, "optimal", 5)};
  EXPECT_EQ(performance_profile(records, {"A"}).instances.size(), 2u);
}

TEST(Profile, DuplicatesAndGapsThrow) {
  EXPECT_THROW(performance_profile({rec("a", "A", 1), rec("a", "A", 2)}, {"A"}), DomainError);
  EXPECT_THROW(performance_profile({rec("a", "A", 1)}, {"A", "B"}), DomainError);
}

TEST(Profile, RhoIsMonotone) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> t(0.001, 10.0);
  std::vector<ResultRecord> records;
  for (int i = 0; i < 40; ++i)
    for (const char* v : {"A", "B", "C"})
      records.push_back(rec("j30" + std::to_string(i % 5 + 1) + "_" + std::to_string(i), v, t(rng),
                            i % 7 == 0 ? "timeout" : "optimal"));
  const auto p = performance_profile(records, {"A", "B", "C"});
  for (const auto& rho : p.rho) {
    ASSERT_EQ(rho.size(), p.taus.size());
    for (std::size_t k = 1; k < rho.size(); ++k) EXPECT_GE(rho[k], rho[k - 1]);
    EXPECT_DOUBLE_EQ(rho.back(), 1.0);
  }
  std::ostringstream csv, svg;
  write_profile_csv(p, csv);
  write_profile_svg(p, svg);
  EXPECT_EQ(csv.str().rfind("tau,A,B,C\n", 0), 0u);
  EXPECT_NE(svg.str().find("</svg>"), std::string::npos);
}

TEST(Summary, MeansPerSetAndVariant) {
  auto unsolved = rec("j302_1", "A", 60, "feasible");
  unsolved.objective = 10;
  unsolved.gap = 20;
  auto unsolved2 = rec("j302_2", "A", 60, "feasible");
  unsolved2.objective = 10;
  unsolved2.gap = 10;
  const std::vector<ResultRecord> records{rec("j3010_1", "A", 5), rec("j302_3", "A", 1), rec("j302_4", "A", 3),
                                          unsolved, unsolved2, rec("j302_1", "B", 60, "timeout")};
  const auto rows = summarize(records);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].set, "J302");
  EXPECT_EQ(rows[0].variant, "A");
  EXPECT_DOUBLE_EQ(*rows[0].mean_time, 2.0);
  EXPECT_DOUBLE_EQ(*rows[0].mean_gap, 15.0);
  EXPECT_EQ(rows[0].solved, 2u);
  EXPECT_EQ(rows[0].total, 4u);
  EXPECT_EQ(rows[1].variant, "B");
  EXPECT_FALSE(rows[1].mean_time);
  EXPECT_EQ(rows[2].set, "J3010");
}

TEST(Results, CsvRoundTrip) {
  auto a = rec("j301_1", "bnb", 0.25);
  auto b = rec("j301_2", "basic", 1.5, "skipped");
  std::ostringstream out;
  write_results_csv({a, b}, out);
  std::istringstream in(out.str());
  const auto back = read_results_csv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].instance, "j301_1");
  EXPECT_EQ(back[0].set, "J301");
  EXPECT_EQ(back[0].objective, 10.0);
  EXPECT_DOUBLE_EQ(back[0].wall_s, 0.25);
  EXPECT_EQ(back[1].status, "skipped");
  EXPECT_FALSE(back[1].objective);
  std::istringstream bad("nope\n");
  EXPECT_THROW(read_results_csv(bad), ParseError);
}

TEST(Config, FromJson) {
  const auto cfg = bench_config_from_json(json::parse(R"({"instances_dir":"j30","gammas":[1],"variants":["bnb","warm"],"workers":0})"),
                                          "/base");
  EXPECT_EQ(cfg.instances_dir, fs::path("/base/j30"));
  EXPECT_EQ(cfg.gammas, std::vector<int>{1});
  EXPECT_EQ(cfg.workers, 1u);
  EXPECT_THROW(bench_config_from_json(json::parse(R"({"instances_dir":"x","variants":["fast"]})")), DomainError);
  EXPECT_EQ(set_label("j3017_4"), "J3017");
  EXPECT_EQ(set_label("other"), "other");
}

TEST(Experiment, SmallCorpus) {
  const auto dir = scratch("corpus");
  std::mt19937_64 rng(1);
  for (int i = 1; i <= 3; ++i) {
    GeneratorOptions g;
    g.real_activities = 5;
    g.resources = 2;
    const auto inst = random_instance(rng, g, "j301_" + std::to_string(i));
    std::ofstream(dir / (inst.meta.name + ".sm")) << write_psplib(inst);
  }
  std::ofstream(dir / "j302_1.sm") << "not a psplib file\n";
  BenchConfig cfg;
  cfg.instances_dir = dir;
  cfg.gammas = {1, 2};
  cfg.variants = {"bnb", "basic"};
  cfg.workers = 3;
  const auto records = run_experiment(cfg);
  ASSERT_EQ(records.size(), 16u);
  EXPECT_EQ(records[0].instance, "j301_1");
  EXPECT_EQ(records[0].gamma, 1);
  EXPECT_EQ(records[0].variant, "bnb");
  EXPECT_EQ(records[0].status, "optimal");
  EXPECT_EQ(records[1].status, "skipped");
  for (std::size_t i = 12; i < 16; ++i) EXPECT_EQ(records[i].status, "error");

  const auto out = scratch("out");
  std::vector<ResultRecord> bnb_only;
  for (const auto& r : records)
    if (r.variant == "bnb") bnb_only.push_back(r);
  write_bench_outputs(bnb_only, {"bnb"}, out);
  for (const char* f : {"results.csv", "profile.csv", "profile.svg", "summary.csv"}) EXPECT_TRUE(fs::exists(out / f)) << f;

  cfg.instances_dir = scratch("empty");
  EXPECT_TRUE(run_experiment(cfg).empty());
  cfg.instances_dir = dir / "missing";
  EXPECT_THROW(run_experiment(cfg), DomainError);
  fs::remove_all(dir);
  fs::remove_all(out);
}
