#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "timoshenko/errors.hpp"
#include "timoshenko/reporting.hpp"

using namespace timoshenko;
namespace fs = std::filesystem;

namespace {

StudyRun synthetic(int steps, double e) {
  StudyRun r;
  r.steps = steps;
  r.modes = 40;
  r.tau = 1.0 / steps;
  r.max_e1 = r.max_e2 = r.max_de1 = r.max_de2 = e;
  return r;
}

BenchmarkProblem zero_problem() {
  BenchmarkProblem p;
  p.id = 99;
  p.name = "zero";
  p.params.steps = 8;
  p.params.modes = 4;
  const SpaceTimeFunction zero = [](double, double) { return 0.0; };
  p.u = p.v = ExactField{zero, zero, zero, zero, zero, zero};
  p.nonlocal = [](double) { return 0.0; };
  p.data = manufacture(p.u, p.v, p.nonlocal, p.params);
  return p;
}

std::vector<ErrorRecord> random_records(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ErrorRecord> out;
  for (int k = 2; k < n + 2; ++k) {
    ErrorRecord r;
    r.k = k;
    r.t = k / 3.0;
    r.e1 = u(rng) * 1e-7;
    r.e2 = std::exp(-40 * u(rng));
    if (k % 3) r.de1 = u(rng);
    if (k % 2) r.de2 = 1.0 / 7.0;
    r.q = 1 + u(rng);
    r.mon_du = u(rng) * 1e300;
    r.mon_dv = 5e-324;
    r.mon_au = std::nextafter(1.0, 2.0);
    r.mon_lv = u(rng);
    out.push_back(r);
  }
  return out;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("tsb_reporting_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("exact second-order sequence") {
  const auto s = estimate_temporal_order({synthetic(64, 3.0), synthetic(128, 0.75), synthetic(256, 0.1875)});
  REQUIRE(s.e1.orders.size() == 2);
  CHECK(s.e1.orders[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s.e1.orders[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s.e1.median == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s.flags.empty());
  CHECK(s.axis == StudyAxis::temporal);
}

TEST_CASE("first-order pair") {
  const auto s = estimate_temporal_order({synthetic(10, 1.0), synthetic(20, 0.5)});
  CHECK(s.de2.orders.at(0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("order estimates are scale invariant") {
  const std::vector<double> grid{16, 32, 64, 128};
  const std::vector<double> e{0.3, 0.07, 0.02, 0.0049};
  const auto base = pairwise_orders(e, grid);
  for (double c : {1e-6, 3.0, 1024.0}) {
    std::vector<double> scaled;
    for (double x : e) scaled.push_back(c * x);
    const auto p = pairwise_orders(scaled, grid);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == doctest::Approx(base[i]).epsilon(1e-13));
  }
  CHECK_THROWS_AS(pairwise_orders(e, std::vector<double>{1, 2, 2, 3}), ArgumentError);
  CHECK_THROWS_AS(pairwise_orders(e, std::vector<double>{1, 2}), ArgumentError);
  CHECK(std::isinf(pairwise_orders(std::vector<double>{1.0, 0.0}, std::vector<double>{1, 2})[0]));
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(std::isnan(median({})));
}

TEST_CASE("temporal study flags") {
  const auto stalled = estimate_temporal_order({synthetic(64, 1.0), synthetic(128, 0.9), synthetic(256, 0.88)});
  CHECK(std::find(stalled.flags.begin(), stalled.flags.end(), "errors not decreasing under tau-halving") !=
        stalled.flags.end());
  const auto jump = estimate_temporal_order({synthetic(64, 30.0), synthetic(128, 1e-5), synthetic(256, 2.5e-6)});
  CHECK(std::any_of(jump.flags.begin(), jump.flags.end(),
                    [](const std::string& f) { return f.rfind("order above 4", 0) == 0; }));
  auto control = synthetic(256, 1e-3);
  const auto dirty = estimate_temporal_order({synthetic(128, 4.2e-3), synthetic(256, 1.05e-3)}, control);
  CHECK(std::any_of(dirty.flags.begin(), dirty.flags.end(),
                    [](const std::string& f) { return f.find("spatial error contamination") != std::string::npos; }));
  const auto clean = estimate_temporal_order({synthetic(128, 4e-3), synthetic(256, 1.005e-3)}, control);
  CHECK(clean.flags.empty());
  CHECK_THROWS_AS(estimate_temporal_order({synthetic(64, 1.0)}), ArgumentError);
}

TEST_CASE("spatial decay and the temporal floor") {
  auto run = [](int modes, double e) {
    StudyRun r = synthetic(256, e);
    r.modes = modes;
    return r;
  };
  const auto decaying = estimate_spatial_decay({run(20, 1e-1), run(25, 1e-3), run(30, 1e-5), run(35, 1e-7)});
  CHECK(decaying.flags.empty());
  CHECK(decaying.slope_e1 < -10.0);
  CHECK(decaying.axis == StudyAxis::spatial);
  const auto floored = estimate_spatial_decay({run(20, 1e-1), run(25, 1e-4), run(30, 2e-6), run(35, 1.9e-6)});
  CHECK(std::find(floored.flags.begin(), floored.flags.end(), "temporal floor reached") != floored.flags.end());
}

TEST_CASE("study CSV has one row per run") {
  const auto s = estimate_temporal_order({synthetic(64, 1.0), synthetic(128, 0.25)});
  const std::string csv = study_to_csv(s);
  CHECK(csv.rfind("n,N,tau,E1,E2,dE1,dE2,p_E1,p_E2,p_dE1,p_dE2\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find(",2,2,2,2\n") != std::string::npos);
}

TEST_CASE("real formatting") {
  CHECK(format_real(0.0) == "0");
  CHECK(format_real(1.0) == "1");
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_real(std::numbers::pi)) == std::numbers::pi);
}

TEST_CASE("one record gives a two-line CSV") {
  ErrorRecord r;
  r.k = 2;
  r.t = 0.5;
  const std::vector<ErrorRecord> one{r};
  const std::string csv = errors_to_csv(one);
  CHECK(csv == std::string(kErrorCsvHeader) + "\n2,0.5,0,0,,,0,0,0,0,0\n");
}

TEST_CASE("property: CSV and JSON round trips are exact") {
  std::mt19937_64 rng(31);
  const auto records = random_records(40, rng);
  CHECK(parse_errors_csv(errors_to_csv(records)) == records);
  CHECK(parse_errors_json(errors_to_json(records)) == records);
  CHECK_THROWS_AS(parse_errors_csv("k,t\n1,2\n"), ArgumentError);
  CHECK_THROWS_AS(parse_errors_json("{\"rows\": []}"), ArgumentError);
}

TEST_CASE("zero solution gives canonical zero columns") {
  const auto p = zero_problem();
  const auto a = run_experiment(p);
  const auto b = run_experiment(p);
  REQUIRE(a.run.completed);
  REQUIRE(a.records.size() == 7);
  const std::string csv = errors_to_csv(a.records);
  CHECK(csv == errors_to_csv(b.records));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string x; std::getline(ls, x, ',');) f.push_back(x);
    if (line.back() == ',') f.push_back("");
    REQUIRE(f.size() == 11);
    CHECK(f[2] == "0");
    CHECK(f[3] == "0");
    if (f[0] != "8") {
      CHECK(f[4] == "0");
      CHECK(f[5] == "0");
    } else {
      CHECK(f[4].empty());
      CHECK(f[5].empty());
    }
  }
}

TEST_CASE("records cover layers 2..n with derivative errors inside") {
  auto p = make_benchmark(3);
  p.params.steps = 64;
  p.params.modes = 10;
  p = make_benchmark(3, p.params);
  const auto r = run_experiment(p);
  REQUIRE(r.records.size() == 63);
  CHECK(r.records.front().k == 2);
  CHECK(r.records.back().k == 64);
  CHECK_FALSE(r.records.back().de1.has_value());
  for (std::size_t i = 0; i + 1 < r.records.size(); ++i) {
    CHECK(r.records[i].de1.has_value());
    CHECK(r.records[i].t == doctest::Approx(r.records[i].k * p.params.tau()).epsilon(1e-15));
    CHECK(r.records[i].e1 >= 0.0);
  }
  CHECK(r.max_e1() > 0.0);
  CHECK(r.wall_seconds >= 0.0);
}

TEST_CASE("Test 1 profile reproduces the exact field") {
  auto params = default_parameters(1);
  params.steps = 32;
  params.modes = 20;
  const auto p = make_benchmark(1, params);
  const auto r = run_experiment(p);
  const auto prof = final_profile(p, r.run.final_state, params.final_time);
  REQUIRE(prof.size() == 512);
  CHECK(prof.front().x == 0.0);
  CHECK(prof.back().x == params.length);
  for (const auto& s : prof)
    CHECK(std::abs(s.u_exact - std::sin(std::numbers::pi / 2 * params.final_time) *
                                   std::sin(14 * std::numbers::pi * s.x / params.length)) <= 1e-12);
  const std::string csv = profile_to_csv(prof);
  CHECK(csv.rfind(std::string(kProfileCsvHeader) + "\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 513);
}

TEST_CASE("writing runs") {
  TempDir dir;
  std::mt19937_64 rng(32);
  const auto records = random_records(3, rng);
  const fs::path target = dir.path / "x.csv";
  write_run(records, OutputFormat::csv, target);
  CHECK(parse_errors_csv(slurp(target)) == records);
  CHECK_THROWS_AS(write_run(std::vector<ErrorRecord>{}, OutputFormat::csv, target), ArgumentError);
  const fs::path bad = dir.path / "missing" / "deeper" / "x.csv";
  try {
    write_run(records, OutputFormat::json, bad);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find(bad.string()) != std::string::npos);
  }

  auto params = default_parameters(1);
  params.steps = 8;
  params.modes = 6;
  const auto p = make_benchmark(1, params);
  const auto result = run_experiment(p);
  CHECK(run_file_stem(p) == "test1_8_6");
  const auto written = write_experiment(p, result, OutputFormat::json, dir.path);
  REQUIRE(written.size() == 2);
  CHECK(written[0].filename() == "test1_8_6_errors.json");
  CHECK(written[1].filename() == "test1_8_6_profile.csv");
  CHECK(parse_errors_json(slurp(written[0])) == result.records);
}
