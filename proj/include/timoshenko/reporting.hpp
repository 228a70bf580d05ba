#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "timoshenko/benchmarks.hpp"
#include "timoshenko/timestepper.hpp"

namespace timoshenko {

/// Errors and monitor values of one time layer k >= 2.
struct ErrorRecord {
  int k = 0;
  double t = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  std::optional<double> de1;  // central-difference time-derivative errors,
  std::optional<double> de2;  // absent on the last layer
  double q = 0.0;
  double mon_du = 0.0;
  double mon_dv = 0.0;
  double mon_au = 0.0;
  double mon_lv = 0.0;

  friend bool operator==(const ErrorRecord&, const ErrorRecord&) = default;
};

/// Observer that turns the layer stream of a run into ErrorRecords.
class ErrorRecorder {
 public:
  ErrorRecorder(const BenchmarkProblem& problem, IntegrationOptions quadrature = error_quadrature());

  void observe(const TimeStepState& state);
  LayerObserver observer() {
    return [this](const TimeStepState& s) { observe(s); };
  }
  const std::vector<ErrorRecord>& records() const { return records_; }

 private:
  const BenchmarkProblem& problem_;
  IntegrationOptions quadrature_;
  GalerkinOperatorSet ops_;
  std::optional<SpectralCoefficients> u_older_, v_older_;
  std::vector<ErrorRecord> records_;
};

struct ExperimentResult {
  RunResult run;
  std::vector<ErrorRecord> records;
  double wall_seconds = 0.0;

  double max_e1() const;
  double max_e2() const;
  double max_de1() const;  // over layers where it is defined
  double max_de2() const;
};

ExperimentResult run_experiment(const BenchmarkProblem& problem, const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Convergence studies

enum class StudyAxis { temporal, spatial };

struct StudyRun {
  int steps = 0;
  int modes = 0;
  double tau = 0.0;
  double max_e1 = 0.0;
  double max_e2 = 0.0;
  double max_de1 = 0.0;
  double max_de2 = 0.0;
  bool completed = true;
};

/// Errors of one quantity across the grid and the observed rates between
/// neighbours (orders.size() == errors.size() - 1).
struct OrderSeries {
  std::vector<double> errors;
  std::vector<double> orders;
  double median = 0.0;
};

struct ConvergenceStudy {
  StudyAxis axis = StudyAxis::temporal;
  std::vector<StudyRun> runs;
  OrderSeries e1, e2, de1, de2;
  /// Spatial axis only: least-squares slope of log(max error) against log N.
  double slope_e1 = 0.0;
  double slope_e2 = 0.0;
  std::vector<std::string> flags;
};

/// p_i = log(e_i / e_{i+1}) / log(h_{i+1} / h_i) for a refinement parameter h
/// (n or N). Zero errors give an infinite order.
std::vector<double> pairwise_orders(std::span<const double> errors, std::span<const double> grid);
double median(std::vector<double> values);

/// Orders under tau-halving. control, when given, is a run at the finest n with
/// more modes; a relative difference above 1% flags spatial contamination.
/// Orders at or below 0.5 and orders above 4 are flagged as well.
ConvergenceStudy estimate_temporal_order(std::vector<StudyRun> runs,
                                         const std::optional<StudyRun>& control = std::nullopt);

/// Decay under increasing N. A last step that fails to halve the error is
/// flagged "temporal floor reached".
ConvergenceStudy estimate_spatial_decay(std::vector<StudyRun> runs);

/// Runs the benchmark at each n (fixed N = base.modes) plus a control run at
/// the finest n with control_modes. Independent runs go to worker threads under
/// Execution::parallel and are merged in grid order.
ConvergenceStudy run_temporal_study(int benchmark_id, const SchemeParameters& base,
                                    const std::vector<int>& steps_grid, int control_modes,
                                    const RunOptions& options = {});

ConvergenceStudy run_spatial_study(int benchmark_id, const SchemeParameters& base,
                                   const std::vector<int>& modes_grid,
                                   const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Serialisation

enum class OutputFormat { csv, json };

/// 17 significant digits; enough to round-trip any double.
std::string format_real(double value);

inline constexpr std::string_view kErrorCsvHeader =
    "k,t,E1,E2,dE1,dE2,q,mon_du,mon_dv,mon_Au,mon_Lv";
inline constexpr std::string_view kProfileCsvHeader = "x,u_exact,u_num,v_exact,v_num";

std::string errors_to_csv(std::span<const ErrorRecord> records);
std::string errors_to_json(std::span<const ErrorRecord> records);
std::vector<ErrorRecord> parse_errors_csv(std::string_view text);
std::vector<ErrorRecord> parse_errors_json(std::string_view text);

struct ProfileSample {
  double x, u_exact, u_num, v_exact, v_num;
};

/// Exact and numerical fields of the current layer on a uniform grid.
std::vector<ProfileSample> final_profile(const BenchmarkProblem& problem,
                                         const TimeStepState& state, double t, int points = 512);
std::string profile_to_csv(std::span<const ProfileSample> samples);

std::string study_to_csv(const ConvergenceStudy& study);

/// "<name>_<n>_<N>", e.g. test1_256_35.
std::string run_file_stem(const BenchmarkProblem& problem);

/// Writes records in the given format to destination. Throws IoError with the
/// path on failure, ArgumentError on an empty record set.
void write_run(std::span<const ErrorRecord> records, OutputFormat format,
               const std::filesystem::path& destination);

/// Writes <stem>_errors.{csv,json} and <stem>_profile.csv into directory and
/// returns the paths written.
std::vector<std::filesystem::path> write_experiment(const BenchmarkProblem& problem,
                                                    const ExperimentResult& result,
                                                    OutputFormat format,
                                                    const std::filesystem::path& directory);

void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace timoshenko
