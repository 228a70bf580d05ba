#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "timoshenko/timoshenko.h"

namespace fs = std::filesystem;

namespace {

tsb_params small_params(int id) {
  tsb_params p;
  REQUIRE(tsb_default_params(id, &p) == TSB_OK);
  p.steps = 32;
  p.modes = 12;
  return p;
}

std::string errors_text(const tsb_run* run, tsb_format fmt) {
  size_t needed = 0;
  REQUIRE(tsb_run_errors_text(run, fmt, nullptr, 0, &needed) == TSB_OK);
  std::string s(needed, '\0');
  REQUIRE(tsb_run_errors_text(run, fmt, s.data(), s.size(), &needed) == TSB_OK);
  s.resize(needed - 1);
  return s;
}

}  // namespace

TEST_CASE("version and defaults") {
  CHECK(std::strlen(tsb_version()) > 0);
  tsb_params p;
  REQUIRE(tsb_default_params(1, &p) == TSB_OK);
  CHECK(p.steps == 256);
  CHECK(p.modes == 35);
  CHECK(p.length == 2.0);
  REQUIRE(tsb_default_params(3, &p) == TSB_OK);
  CHECK(p.final_time == 4.0);
  CHECK(tsb_validate_params(&p) == TSB_OK);
  tsb_options o;
  tsb_default_options(&o);
  CHECK(o.parallel == 0);
  CHECK(o.record_trajectory == 0);
}

TEST_CASE("argument errors set the thread-local message") {
  tsb_params p;
  CHECK(tsb_default_params(7, &p) == TSB_ERR_ARGUMENT);
  CHECK(std::string(tsb_last_error()).find("7") != std::string::npos);
  CHECK(tsb_default_params(1, nullptr) == TSB_ERR_ARGUMENT);
  REQUIRE(tsb_default_params(1, &p) == TSB_OK);
  p.alpha = -1.0;
  CHECK(tsb_validate_params(&p) == TSB_ERR_ARGUMENT);
  CHECK(std::string(tsb_last_error()).find("alpha") != std::string::npos);
  tsb_run* run = nullptr;
  CHECK(tsb_run_execute(1, &p, nullptr, &run) == TSB_ERR_ARGUMENT);
  CHECK(run == nullptr);
  CHECK(tsb_run_execute(1, nullptr, nullptr, nullptr) == TSB_ERR_ARGUMENT);

  // The message belongs to the failing thread only.
  std::string other;
  std::thread([&] { other = tsb_last_error(); }).join();
  CHECK(other.empty());
}

TEST_CASE("a run exposes summary, records and coefficients") {
  const tsb_params p = small_params(3);
  tsb_options o;
  tsb_default_options(&o);
  o.record_trajectory = 1;
  tsb_run* run = nullptr;
  REQUIRE(tsb_run_execute(3, &p, &o, &run) == TSB_OK);
  REQUIRE(run != nullptr);

  tsb_summary s;
  REQUIRE(tsb_run_summary(run, &s) == TSB_OK);
  CHECK(s.completed == 1);
  CHECK(s.layers == 32);
  CHECK(s.max_e1 > 0.0);
  CHECK(s.q0 > p.alpha);
  CHECK(std::string(tsb_run_failure(run)).empty());
  CHECK(tsb_run_warning_count(run) == 0);
  CHECK(tsb_run_warning(run, 0) == nullptr);

  REQUIRE(tsb_run_record_count(run) == 31);
  tsb_record r;
  REQUIRE(tsb_run_record(run, 0, &r) == TSB_OK);
  CHECK(r.k == 2);
  CHECK(r.has_derivative_errors == 1);
  REQUIRE(tsb_run_record(run, 30, &r) == TSB_OK);
  CHECK(r.k == 32);
  CHECK(r.has_derivative_errors == 0);
  CHECK(tsb_run_record(run, 31, &r) == TSB_ERR_ARGUMENT);

  std::vector<double> c(12);
  size_t written = 0;
  REQUIRE(tsb_run_coefficients(run, 0, c.data(), c.size(), &written) == TSB_OK);
  CHECK(written == 12);
  CHECK(tsb_run_coefficients(run, 2, c.data(), c.size(), &written) == TSB_ERR_ARGUMENT);
  CHECK(tsb_run_coefficients(run, 1, c.data(), 3, &written) == TSB_ERR_ARGUMENT);

  REQUIRE(tsb_run_trajectory_length(run) == 32);
  std::vector<double> last(12);
  REQUIRE(tsb_run_trajectory_layer(run, 31, 0, last.data(), last.size(), &written) == TSB_OK);
  CHECK(last == c);
  CHECK(tsb_run_trajectory_layer(run, 32, 0, last.data(), last.size(), &written) == TSB_ERR_ARGUMENT);

  const std::string csv = errors_text(run, TSB_FORMAT_CSV);
  CHECK(csv.rfind("k,t,E1,E2,dE1,dE2,q,mon_du,mon_dv,mon_Au,mon_Lv\n", 0) == 0);
  CHECK(errors_text(run, TSB_FORMAT_JSON).find("\"records\"") != std::string::npos);
  char tiny[4];
  size_t needed = 0;
  CHECK(tsb_run_errors_text(run, TSB_FORMAT_CSV, tiny, sizeof tiny, &needed) == TSB_ERR_ARGUMENT);
  CHECK(needed == csv.size() + 1);
  tsb_run_destroy(run);
  tsb_run_destroy(nullptr);
}

TEST_CASE("error text is identical for serial and parallel runs") {
  const tsb_params p = small_params(2);
  tsb_options serial, parallel;
  tsb_default_options(&serial);
  tsb_default_options(&parallel);
  parallel.parallel = 1;
  tsb_run *a = nullptr, *b = nullptr;
  REQUIRE(tsb_run_execute(2, &p, &serial, &a) == TSB_OK);
  REQUIRE(tsb_run_execute(2, &p, &parallel, &b) == TSB_OK);
  CHECK(errors_text(a, TSB_FORMAT_CSV) == errors_text(b, TSB_FORMAT_CSV));
  CHECK(errors_text(a, TSB_FORMAT_JSON) == errors_text(b, TSB_FORMAT_JSON));
  tsb_run_destroy(a);
  tsb_run_destroy(b);
}

TEST_CASE("machine-precision case through the C interface") {
  tsb_params p;
  REQUIRE(tsb_default_params(TSB_MACHINE_PRECISION_CASE, &p) == TSB_OK);
  tsb_run* run = nullptr;
  REQUIRE(tsb_run_execute(TSB_MACHINE_PRECISION_CASE, &p, nullptr, &run) == TSB_OK);
  tsb_summary s;
  REQUIRE(tsb_run_summary(run, &s) == TSB_OK);
  CHECK(std::max(s.max_e1, s.max_e2) <= 1e-12);
  tsb_run_destroy(run);
}

TEST_CASE("writing files and reporting I/O failures") {
  const tsb_params p = small_params(1);
  tsb_run* run = nullptr;
  REQUIRE(tsb_run_execute(1, &p, nullptr, &run) == TSB_OK);
  const fs::path dir = fs::temp_directory_path() / "tsb_c_api_write";
  fs::remove_all(dir);
  char stem[64];
  REQUIRE(tsb_run_write(run, TSB_FORMAT_CSV, (dir / "nested").c_str(), stem, sizeof stem) == TSB_OK);
  CHECK(std::string(stem) == "test1_32_12");
  CHECK(fs::exists(dir / "nested" / "test1_32_12_errors.csv"));
  CHECK(fs::exists(dir / "nested" / "test1_32_12_profile.csv"));

  // A regular file where the directory should be.
  const fs::path blocker = dir / "file";
  { std::FILE* f = std::fopen(blocker.c_str(), "w"); std::fclose(f); }
  CHECK(tsb_run_write(run, TSB_FORMAT_CSV, (blocker / "sub").c_str(), nullptr, 0) == TSB_ERR_IO);
  CHECK(std::string(tsb_last_error()).find("file") != std::string::npos);
  fs::remove_all(dir);
  tsb_run_destroy(run);
}

TEST_CASE("studies through the C interface") {
  tsb_params p = small_params(3);
  p.modes = 20;
  const int steps[] = {1024, 2048, 4096};
  tsb_study* study = nullptr;
  REQUIRE(tsb_temporal_study(3, &p, steps, 3, 25, nullptr, &study) == TSB_OK);
  CHECK(tsb_study_run_count(study) == 3);
  tsb_study_summary s;
  REQUIRE(tsb_study_summary_get(study, &s) == TSB_OK);
  CHECK(s.temporal == 1);
  CHECK(s.median_e1 == doctest::Approx(2.0).epsilon(0.1));
  double orders[4];
  REQUIRE(tsb_study_orders(study, 0, orders) == TSB_OK);
  CHECK(tsb_study_orders(study, 2, orders) == TSB_ERR_ARGUMENT);
  tsb_study_run r;
  REQUIRE(tsb_study_run_get(study, 2, &r) == TSB_OK);
  CHECK(r.steps == 4096);
  size_t needed = 0;
  REQUIRE(tsb_study_csv(study, nullptr, 0, &needed) == TSB_OK);
  CHECK(needed > 10);
  tsb_study_destroy(study);

  const int bad[] = {512, 256};
  CHECK(tsb_temporal_study(3, &p, bad, 2, 20, nullptr, &study) == TSB_ERR_ARGUMENT);

  const int modes[] = {5, 10, 15, 20};
  p.steps = 1024;
  REQUIRE(tsb_spatial_study(3, &p, modes, 4, nullptr, &study) == TSB_OK);
  REQUIRE(tsb_study_summary_get(study, &s) == TSB_OK);
  CHECK(s.temporal == 0);
  CHECK(s.slope_e1 < 0.0);
  tsb_study_destroy(study);
}

TEST_CASE("abstract boundedness through the C interface") {
  tsb_abstract_config cfg;
  tsb_default_abstract_config(&cfg);
  CHECK(cfg.dimension == 20);
  cfg.dimension = 6;
  cfg.triples = 2;
  const int steps[] = {64, 128};
  std::vector<double> running(2 * 2 * 6), spread(2 * 6);
  REQUIRE(tsb_abstract_boundedness(&cfg, steps, 2, nullptr, running.data(), spread.data()) == TSB_OK);
  for (double x : running) CHECK(std::isfinite(x));
  for (double x : spread) CHECK(x < 0.1);
  cfg.spectrum_min = -1.0;
  CHECK(tsb_abstract_boundedness(&cfg, steps, 2, nullptr, nullptr, nullptr) == TSB_ERR_ARGUMENT);
}
