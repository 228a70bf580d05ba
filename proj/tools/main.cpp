// Command-line driver. Talks to the solver through the C interface only.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "cli_config.hpp"
#include "timoshenko/timoshenko.h"

namespace {

using timoshenko::cli::Mode;
using timoshenko::cli::RunConfig;

constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitIo = 3;

int exit_code(tsb_status s) {
  switch (s) {
    case TSB_OK: return 0;
    case TSB_ERR_ARGUMENT: return kExitUsage;
    case TSB_ERR_IO: return kExitIo;
    default: return kExitNumeric;
  }
}

int report(tsb_status s, const char* what) {
  std::fprintf(stderr, "error: %s: %s\n", what, tsb_last_error());
  return exit_code(s);
}

tsb_options options_of(const RunConfig& c) {
  tsb_options o;
  tsb_default_options(&o);
  o.parallel = c.parallel ? 1 : 0;
  o.record_trajectory = c.record_trajectory ? 1 : 0;
  if (c.tol > 0.0) o.quadrature_tol = c.tol;
  return o;
}

const char* test_name(int id) {
  switch (id) {
    case 1: return "test1";
    case 2: return "test2";
    case 3: return "test3";
    default: return "machine_precision";
  }
}

bool ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::fprintf(stderr, "error: cannot create %s: %s\n", dir.c_str(), ec.message().c_str());
    return false;
  }
  return true;
}

struct RunDeleter {
  void operator()(tsb_run* r) const { tsb_run_destroy(r); }
};
struct StudyDeleter {
  void operator()(tsb_study* s) const { tsb_study_destroy(s); }
};

int single_run(const RunConfig& c) {
  const tsb_options opts = options_of(c);
  tsb_run* raw = nullptr;
  const tsb_status status = tsb_run_execute(c.test, &c.params, &opts, &raw);
  std::unique_ptr<tsb_run, RunDeleter> run(raw);
  if (!run) return report(status, "run");

  for (size_t i = 0; i < tsb_run_warning_count(run.get()); ++i)
    std::fprintf(stderr, "warning: %s\n", tsb_run_warning(run.get(), i));

  tsb_summary s;
  tsb_run_summary(run.get(), &s);
  std::printf("%s n=%d N=%d: max E1 = %.3e, max E2 = %.3e, wall time = %.2f s\n",
              test_name(c.test), c.params.steps, c.params.modes, s.max_e1, s.max_e2,
              s.wall_seconds);
  const bool failed = status != TSB_OK;
  if (failed)
    std::fprintf(stderr, "error: run stopped after layer %d: %s\n", s.layers,
                 tsb_run_failure(run.get()));
  // Layers computed before a failure are still written, they show where it diverged.
  if (failed && tsb_run_record_count(run.get()) == 0) return kExitNumeric;

  char stem[256];
  const tsb_status w = tsb_run_write(run.get(), c.format, c.out_dir.c_str(), stem, sizeof stem);
  if (w != TSB_OK) return failed ? kExitNumeric : report(w, "writing results");
  if (failed) {
    std::printf("wrote partial results to %s/%s_*\n", c.out_dir.c_str(), stem);
    return kExitNumeric;
  }
  std::printf("wrote %s/%s_errors.%s and %s/%s_profile.csv\n", c.out_dir.c_str(), stem,
              c.format == TSB_FORMAT_JSON ? "json" : "csv", c.out_dir.c_str(), stem);
  return 0;
}

void print_order(double p) {
  if (std::isfinite(p)) std::printf(" %7.3f", p);
  else std::printf(" %7s", "inf");
}

int study(const RunConfig& c) {
  const tsb_options opts = options_of(c);
  const bool temporal = c.mode == Mode::temporal_study;
  tsb_study* raw = nullptr;
  const tsb_status status =
      temporal ? tsb_temporal_study(c.test, &c.params, c.grid.data(), c.grid.size(),
                                    c.control_modes, &opts, &raw)
               : tsb_spatial_study(c.test, &c.params, c.grid.data(), c.grid.size(), &opts, &raw);
  std::unique_ptr<tsb_study, StudyDeleter> st(raw);
  if (status != TSB_OK) return report(status, "study");

  std::printf("%s %s study\n", test_name(c.test), temporal ? "temporal" : "spatial");
  std::printf("%6s %4s %12s %11s %11s %11s %11s %7s %7s %7s %7s\n", "n", "N", "tau", "E1", "E2",
              "dE1", "dE2", "p_E1", "p_E2", "p_dE1", "p_dE2");
  const size_t runs = tsb_study_run_count(st.get());
  for (size_t i = 0; i < runs; ++i) {
    tsb_study_run r;
    tsb_study_run_get(st.get(), i, &r);
    std::printf("%6d %4d %12.6e %11.3e %11.3e %11.3e %11.3e", r.steps, r.modes, r.tau, r.max_e1,
                r.max_e2, r.max_de1, r.max_de2);
    double p[4];
    if (i > 0 && tsb_study_orders(st.get(), i - 1, p) == TSB_OK)
      for (double v : p) print_order(v);
    std::printf("%s\n", r.completed ? "" : "  (stopped early)");
  }
  tsb_study_summary sum;
  tsb_study_summary_get(st.get(), &sum);
  if (temporal)
    std::printf("median order: E1 %.3f, E2 %.3f, dE1 %.3f, dE2 %.3f\n", sum.median_e1,
                sum.median_e2, sum.median_de1, sum.median_de2);
  else
    std::printf("log-log slope: E1 %.3f, E2 %.3f\n", sum.slope_e1, sum.slope_e2);
  for (size_t i = 0; i < tsb_study_flag_count(st.get()); ++i)
    std::printf("flag: %s\n", tsb_study_flag(st.get(), i));

  if (!ensure_directory(c.out_dir)) return kExitIo;
  const std::string path = c.out_dir + "/" + test_name(c.test) +
                           (temporal ? "_temporal_study.csv" : "_spatial_study.csv");
  const tsb_status w = tsb_study_write(st.get(), path.c_str());
  if (w != TSB_OK) return report(w, "writing study");
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int abstract_demo(const RunConfig& c) {
  tsb_abstract_config cfg;
  tsb_default_abstract_config(&cfg);
  cfg.seed = c.seed;
  cfg.physics = c.params;
  cfg.final_time = c.params.final_time;
  const tsb_options opts = options_of(c);
  const size_t count = c.grid.size();
  std::vector<double> maxima(static_cast<size_t>(cfg.triples) * count * 6);
  std::vector<double> spread(static_cast<size_t>(cfg.triples) * 6);
  const tsb_status s =
      tsb_abstract_boundedness(&cfg, c.grid.data(), count, &opts, maxima.data(), spread.data());
  if (s != TSB_OK) return report(s, "abstract demo");

  static const char* names[6] = {"du", "dv", "Au", "Lv", "Au_norm", "A_du"};
  std::printf("%d random %d-dimensional triples over [0, %g]; relative spread of running maxima\n",
              cfg.triples, cfg.dimension, cfg.final_time);
  std::printf("%6s", "triple");
  for (const char* n : names) std::printf(" %8s", n);
  std::printf("\n");
  double worst = 0.0;
  for (int t = 0; t < cfg.triples; ++t) {
    std::printf("%6d", t);
    for (int q = 0; q < 6; ++q) {
      const double v = spread[static_cast<size_t>(t) * 6 + q];
      worst = std::max(worst, v);
      std::printf(" %8.4f", v);
    }
    std::printf("\n");
  }
  std::printf("worst spread: %.4f\n", worst);

  if (!ensure_directory(c.out_dir)) return kExitIo;
  const std::string path = c.out_dir + "/abstract_boundedness.csv";
  std::ofstream out(path);
  out << "triple,n,tau";
  for (const char* n : names) out << ',' << n;
  out << '\n';
  char buf[32];
  for (int t = 0; t < cfg.triples; ++t)
    for (size_t i = 0; i < count; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", cfg.final_time / c.grid[i]);
      out << t << ',' << c.grid[i] << ',' << buf;
      for (int q = 0; q < 6; ++q) {
        std::snprintf(buf, sizeof buf, "%.17g", maxima[(static_cast<size_t>(t) * count + i) * 6 + q]);
        out << ',' << buf;
      }
      out << '\n';
    }
  if (!out) {
    std::fprintf(stderr, "error: cannot write %s\n", path.c_str());
    return kExitIo;
  }
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  timoshenko::cli::ParseResult parsed;
  try {
    parsed = timoshenko::cli::parse_config(argc, argv, [](const std::string& name) {
      const char* v = std::getenv(name.c_str());
      return v ? std::optional<std::string>(v) : std::nullopt;
    });
  } catch (const timoshenko::cli::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\nRun with --help for the list of options.\n", e.what());
    return kExitUsage;
  }
  if (parsed.help) {
    std::fputs(parsed.help_text.c_str(), stdout);
    return 0;
  }
  const RunConfig& c = parsed.config;
  switch (c.mode) {
    case Mode::run:
    case Mode::machine_precision: return single_run(c);
    case Mode::temporal_study:
    case Mode::spatial_study: return study(c);
    case Mode::abstract_demo: return abstract_demo(c);
  }
  return kExitUsage;
}
