#include "timoshenko/reporting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "timoshenko/errors.hpp"

namespace timoshenko {

// ---------------------------------------------------------------------------
// Recording

ErrorRecorder::ErrorRecorder(const BenchmarkProblem& problem, IntegrationOptions quadrature)
    : problem_(problem),
      quadrature_(quadrature),
      ops_(assemble_operators(static_cast<std::size_t>(problem.params.modes))) {}

void ErrorRecorder::observe(const TimeStepState& state) {
  const double tau = problem_.params.tau();
  // state holds layers k-1 and k; the record of layer k-1 gets its central
  // difference from layers k-2 (kept from the previous call) and k.
  if (state.k - 1 >= 2 && u_older_ && !records_.empty() && records_.back().k == state.k - 1) {
    const LayerErrors d = derivative_errors(problem_, state.u_curr, *u_older_, state.v_curr,
                                            *v_older_, (state.k - 1) * tau, tau, quadrature_);
    records_.back().de1 = d.e1;
    records_.back().de2 = d.e2;
  }
  u_older_ = state.u_prev;
  v_older_ = state.v_prev;
  if (state.k < 2) return;

  const double t = state.k * tau;
  const LayerErrors e = layer_errors(problem_, state, t, quadrature_);
  const SpectralMonitors mon = spectral_monitors(state, ops_, problem_.params);
  ErrorRecord r;
  r.k = state.k;
  r.t = t;
  r.e1 = e.e1;
  r.e2 = e.e2;
  r.q = state.q;
  r.mon_du = mon.du;
  r.mon_dv = mon.dv;
  r.mon_au = mon.au;
  r.mon_lv = mon.lv;
  records_.push_back(r);
}

namespace {

template <class Get>
double max_over(const std::vector<ErrorRecord>& records, Get get) {
  double m = 0.0;
  for (const auto& r : records) m = std::max(m, get(r));
  return m;
}

}  // namespace

double ExperimentResult::max_e1() const {
  return max_over(records, [](const ErrorRecord& r) { return r.e1; });
}
double ExperimentResult::max_e2() const {
  return max_over(records, [](const ErrorRecord& r) { return r.e2; });
}
double ExperimentResult::max_de1() const {
  return max_over(records, [](const ErrorRecord& r) { return r.de1.value_or(0.0); });
}
double ExperimentResult::max_de2() const {
  return max_over(records, [](const ErrorRecord& r) { return r.de2.value_or(0.0); });
}

ExperimentResult run_experiment(const BenchmarkProblem& problem, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  ErrorRecorder recorder(problem);
  const LayerObserver observers[] = {recorder.observer()};
  ExperimentResult result;
  result.run = run(problem.data, problem.params, observers, options);
  result.records = recorder.records();
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// ---------------------------------------------------------------------------
// Convergence studies

std::vector<double> pairwise_orders(std::span<const double> errors, std::span<const double> grid) {
  if (errors.size() != grid.size()) throw ArgumentError("pairwise_orders: size mismatch");
  std::vector<double> p;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    if (!(grid[i + 1] > grid[i])) throw ArgumentError("study grid must be strictly increasing");
    const double ratio = errors[i] / errors[i + 1];
    p.push_back(std::log(ratio) / std::log(grid[i + 1] / grid[i]));
  }
  return p;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

OrderSeries series(const std::vector<StudyRun>& runs, const std::vector<double>& grid,
                   double StudyRun::*field) {
  OrderSeries s;
  for (const auto& r : runs) s.errors.push_back(r.*field);
  s.orders = pairwise_orders(s.errors, grid);
  s.median = median(s.orders);
  return s;
}

void fill_series(ConvergenceStudy& study, const std::vector<double>& grid) {
  study.e1 = series(study.runs, grid, &StudyRun::max_e1);
  study.e2 = series(study.runs, grid, &StudyRun::max_e2);
  study.de1 = series(study.runs, grid, &StudyRun::max_de1);
  study.de2 = series(study.runs, grid, &StudyRun::max_de2);
  for (const auto& r : study.runs)
    if (!r.completed) {
      std::ostringstream msg;
      msg << "run n=" << r.steps << " N=" << r.modes << " did not complete";
      study.flags.push_back(msg.str());
    }
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

ConvergenceStudy estimate_temporal_order(std::vector<StudyRun> runs,
                                         const std::optional<StudyRun>& control) {
  if (runs.size() < 2) throw ArgumentError("temporal study needs at least two runs");
  ConvergenceStudy study;
  study.axis = StudyAxis::temporal;
  study.runs = std::move(runs);
  std::vector<double> grid;
  for (const auto& r : study.runs) grid.push_back(static_cast<double>(r.steps));
  fill_series(study, grid);

  const auto not_decreasing = [](const OrderSeries& s) {
    return std::any_of(s.orders.begin(), s.orders.end(), [](double p) { return !(p > 0.5); });
  };
  if (not_decreasing(study.e1) || not_decreasing(study.e2))
    study.flags.push_back("errors not decreasing under tau-halving");
  // A second-order scheme cannot gain more than a factor 16 per halving once in
  // its asymptotic range; larger jumps mean a coarse run was unresolved or unstable.
  const auto erratic = [](const OrderSeries& s) {
    return std::any_of(s.orders.begin(), s.orders.end(), [](double p) { return p > 4.0; });
  };
  if (erratic(study.e1) || erratic(study.e2) || erratic(study.de1) || erratic(study.de2))
    study.flags.push_back("order above 4: coarse runs outside the asymptotic range");
  if (control) {
    const StudyRun& finest = study.runs.back();
    const double ref = std::max(control->max_e1, control->max_e2);
    const double here = std::max(finest.max_e1, finest.max_e2);
    if (std::abs(here - ref) > 0.01 * ref) {
      std::ostringstream msg;
      msg << "spatial error contamination: N=" << finest.modes << " gives " << format_real(here)
          << ", N=" << control->modes << " gives " << format_real(ref);
      study.flags.push_back(msg.str());
    }
  }
  return study;
}

ConvergenceStudy estimate_spatial_decay(std::vector<StudyRun> runs) {
  if (runs.size() < 2) throw ArgumentError("spatial study needs at least two runs");
  ConvergenceStudy study;
  study.axis = StudyAxis::spatial;
  study.runs = std::move(runs);
  std::vector<double> grid, logn, log1, log2;
  for (const auto& r : study.runs) {
    grid.push_back(static_cast<double>(r.modes));
    logn.push_back(std::log(static_cast<double>(r.modes)));
    log1.push_back(std::log(r.max_e1));
    log2.push_back(std::log(r.max_e2));
  }
  fill_series(study, grid);
  study.slope_e1 = lsq_slope(logn, log1);
  study.slope_e2 = lsq_slope(logn, log2);
  const std::size_t n = study.runs.size();
  const double last = std::max(study.runs[n - 1].max_e1, study.runs[n - 1].max_e2);
  const double before = std::max(study.runs[n - 2].max_e1, study.runs[n - 2].max_e2);
  if (last > 0.5 * before) study.flags.push_back("temporal floor reached");
  return study;
}

namespace {

StudyRun study_run(int id, const SchemeParameters& params, const RunOptions& options) {
  const BenchmarkProblem problem = make_benchmark(id, params);
  const ExperimentResult r = run_experiment(problem, options);
  StudyRun s;
  s.steps = params.steps;
  s.modes = params.modes;
  s.tau = params.tau();
  s.max_e1 = r.max_e1();
  s.max_e2 = r.max_e2();
  s.max_de1 = r.max_de1();
  s.max_de2 = r.max_de2();
  s.completed = r.run.completed;
  return s;
}

std::vector<StudyRun> run_all(int id, const std::vector<SchemeParameters>& configs,
                              const RunOptions& options) {
  std::vector<StudyRun> out(configs.size());
  if (options.execution == Execution::parallel) {
    std::vector<std::future<StudyRun>> futures;
    for (const auto& c : configs)
      futures.push_back(std::async(std::launch::async, [&, c] { return study_run(id, c, options); }));
    for (std::size_t i = 0; i < futures.size(); ++i) out[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < configs.size(); ++i) out[i] = study_run(id, configs[i], options);
  }
  return out;
}

}  // namespace

ConvergenceStudy run_temporal_study(int benchmark_id, const SchemeParameters& base,
                                    const std::vector<int>& steps_grid, int control_modes,
                                    const RunOptions& options) {
  if (steps_grid.size() < 3) throw ArgumentError("temporal study needs at least three values of n");
  std::vector<SchemeParameters> configs;
  for (int n : steps_grid) {
    SchemeParameters p = base;
    p.steps = n;
    configs.push_back(p);
  }
  SchemeParameters control = configs.back();
  control.modes = control_modes;
  configs.push_back(control);
  std::vector<StudyRun> runs = run_all(benchmark_id, configs, options);
  const StudyRun control_run = runs.back();
  runs.pop_back();
  return estimate_temporal_order(std::move(runs), control_run);
}

ConvergenceStudy run_spatial_study(int benchmark_id, const SchemeParameters& base,
                                   const std::vector<int>& modes_grid, const RunOptions& options) {
  if (modes_grid.size() < 4) throw ArgumentError("spatial study needs at least four values of N");
  std::vector<SchemeParameters> configs;
  for (int m : modes_grid) {
    SchemeParameters p = base;
    p.modes = m;
    configs.push_back(p);
  }
  return estimate_spatial_decay(run_all(benchmark_id, configs, options));
}

// ---------------------------------------------------------------------------
// Serialisation

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

std::string optional_real(const std::optional<double>& v) { return v ? format_real(*v) : ""; }

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_real(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw ArgumentError("malformed number in CSV: '" + s + "'");
  return v;
}

}  // namespace

std::string errors_to_csv(std::span<const ErrorRecord> records) {
  std::string out(kErrorCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.k);
    for (const std::string& field :
         {format_real(r.t), format_real(r.e1), format_real(r.e2), optional_real(r.de1),
          optional_real(r.de2), format_real(r.q), format_real(r.mon_du), format_real(r.mon_dv),
          format_real(r.mon_au), format_real(r.mon_lv)}) {
      out += ',';
      out += field;
    }
    out += '\n';
  }
  return out;
}

std::vector<ErrorRecord> parse_errors_csv(std::string_view text) {
  std::vector<ErrorRecord> records;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kErrorCsvHeader)
    throw ArgumentError("error CSV header mismatch");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 11) throw ArgumentError("error CSV row must have 11 fields: " + line);
    ErrorRecord r;
    r.k = std::stoi(f[0]);
    r.t = parse_real(f[1]);
    r.e1 = parse_real(f[2]);
    r.e2 = parse_real(f[3]);
    if (!f[4].empty()) r.de1 = parse_real(f[4]);
    if (!f[5].empty()) r.de2 = parse_real(f[5]);
    r.q = parse_real(f[6]);
    r.mon_du = parse_real(f[7]);
    r.mon_dv = parse_real(f[8]);
    r.mon_au = parse_real(f[9]);
    r.mon_lv = parse_real(f[10]);
    records.push_back(r);
  }
  return records;
}

std::string errors_to_json(std::span<const ErrorRecord> records) {
  using nlohmann::json;
  json rows = json::array();
  for (const auto& r : records) {
    json row;
    row["k"] = r.k;
    row["t"] = r.t;
    row["E1"] = r.e1;
    row["E2"] = r.e2;
    row["dE1"] = r.de1 ? json(*r.de1) : json(nullptr);
    row["dE2"] = r.de2 ? json(*r.de2) : json(nullptr);
    row["q"] = r.q;
    row["mon_du"] = r.mon_du;
    row["mon_dv"] = r.mon_dv;
    row["mon_Au"] = r.mon_au;
    row["mon_Lv"] = r.mon_lv;
    rows.push_back(std::move(row));
  }
  json doc;
  doc["records"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::vector<ErrorRecord> parse_errors_json(std::string_view text) {
  using nlohmann::json;
  std::vector<ErrorRecord> records;
  try {
    const json doc = json::parse(text);
    for (const auto& row : doc.at("records")) {
      ErrorRecord r;
      r.k = row.at("k").get<int>();
      r.t = row.at("t").get<double>();
      r.e1 = row.at("E1").get<double>();
      r.e2 = row.at("E2").get<double>();
      if (!row.at("dE1").is_null()) r.de1 = row.at("dE1").get<double>();
      if (!row.at("dE2").is_null()) r.de2 = row.at("dE2").get<double>();
      r.q = row.at("q").get<double>();
      r.mon_du = row.at("mon_du").get<double>();
      r.mon_dv = row.at("mon_dv").get<double>();
      r.mon_au = row.at("mon_Au").get<double>();
      r.mon_lv = row.at("mon_Lv").get<double>();
      records.push_back(r);
    }
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("malformed error JSON: ") + e.what());
  }
  return records;
}

std::vector<ProfileSample> final_profile(const BenchmarkProblem& problem,
                                         const TimeStepState& state, double t, int points) {
  if (points < 2) throw ArgumentError("profile needs at least two points");
  const double l = problem.params.length;
  std::vector<ProfileSample> out;
  out.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double x = (i + 1 == points) ? l : l * i / (points - 1);
    out.push_back({x, problem.u.value(x, t), eval_expansion(state.u_curr, x),
                   problem.v.value(x, t), eval_expansion(state.v_curr, x)});
  }
  return out;
}

std::string profile_to_csv(std::span<const ProfileSample> samples) {
  std::string out(kProfileCsvHeader);
  out += '\n';
  for (const auto& s : samples) {
    out += format_real(s.x) + ',' + format_real(s.u_exact) + ',' + format_real(s.u_num) + ',' +
           format_real(s.v_exact) + ',' + format_real(s.v_num) + '\n';
  }
  return out;
}

std::string study_to_csv(const ConvergenceStudy& study) {
  std::string out = "n,N,tau,E1,E2,dE1,dE2,p_E1,p_E2,p_dE1,p_dE2\n";
  for (std::size_t i = 0; i < study.runs.size(); ++i) {
    const StudyRun& r = study.runs[i];
    out += std::to_string(r.steps) + ',' + std::to_string(r.modes) + ',' + format_real(r.tau) +
           ',' + format_real(r.max_e1) + ',' + format_real(r.max_e2) + ',' +
           format_real(r.max_de1) + ',' + format_real(r.max_de2);
    for (const OrderSeries* s : {&study.e1, &study.e2, &study.de1, &study.de2}) {
      out += ',';
      if (i > 0) out += format_real(s->orders[i - 1]);
    }
    out += '\n';
  }
  return out;
}

std::string run_file_stem(const BenchmarkProblem& problem) {
  return problem.name + '_' + std::to_string(problem.params.steps) + '_' +
         std::to_string(problem.params.modes);
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_run(std::span<const ErrorRecord> records, OutputFormat format,
               const std::filesystem::path& destination) {
  if (records.empty()) throw ArgumentError("write_run: no records to write");
  write_text_file(destination,
                  format == OutputFormat::csv ? errors_to_csv(records) : errors_to_json(records));
}

std::vector<std::filesystem::path> write_experiment(const BenchmarkProblem& problem,
                                                    const ExperimentResult& result,
                                                    OutputFormat format,
                                                    const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create directory '" + directory.string() + "': " + ec.message());
  const std::string stem = run_file_stem(problem);
  std::vector<std::filesystem::path> written;
  const auto errors_path =
      directory / (stem + (format == OutputFormat::csv ? "_errors.csv" : "_errors.json"));
  write_run(result.records, format, errors_path);
  written.push_back(errors_path);

  const TimeStepState& last = result.run.final_state;
  const auto profile = final_profile(problem, last, last.k * problem.params.tau());
  const auto profile_path = directory / (stem + "_profile.csv");
  write_text_file(profile_path, profile_to_csv(profile));
  written.push_back(profile_path);
  return written;
}

}  // namespace timoshenko
