#include "timoshenko/timoshenko.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <random>
#include <string>
#include <vector>

#include "timoshenko/abstract_scheme.hpp"
#include "timoshenko/errors.hpp"
#include "timoshenko/reporting.hpp"

namespace ts = timoshenko;

struct tsb_run {
  ts::BenchmarkProblem problem;
  ts::ExperimentResult result;
};

struct tsb_study {
  ts::ConvergenceStudy study;
};

namespace {

thread_local std::string last_error;

tsb_status fail(tsb_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Maps the exception currently being handled onto a status code.
tsb_status translate() {
  try {
    throw;
  } catch (const ts::ArgumentError& e) {
    return fail(TSB_ERR_ARGUMENT, e.what());
  } catch (const ts::NumericalError& e) {
    return fail(TSB_ERR_NUMERIC, e.what());
  } catch (const ts::IoError& e) {
    return fail(TSB_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(TSB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TSB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(TSB_ERR_INTERNAL, "unknown exception");
  }
}

template <class F>
tsb_status guarded(F&& f) {
  last_error.clear();
  try {
    return f();
  } catch (...) {
    return translate();
  }
}

ts::SchemeParameters to_params(const tsb_params& p) {
  ts::SchemeParameters s;
  s.alpha = p.alpha;
  s.beta = p.beta;
  s.gamma = p.gamma;
  s.delta = p.delta;
  s.a1 = p.a1;
  s.a2 = p.a2;
  s.length = p.length;
  s.final_time = p.final_time;
  s.steps = p.steps;
  s.modes = p.modes;
  return s;
}

tsb_params from_params(const ts::SchemeParameters& s) {
  return {s.alpha, s.beta, s.gamma, s.delta, s.a1, s.a2, s.length, s.final_time, s.steps, s.modes};
}

ts::RunOptions to_options(const tsb_options* o) {
  ts::RunOptions r;
  if (!o) return r;
  r.execution = o->parallel ? ts::Execution::parallel : ts::Execution::serial;
  r.record_trajectory = o->record_trajectory != 0;
  if (o->quadrature_tol > 0.0) r.quadrature.tol = o->quadrature_tol;
  else if (o->quadrature_tol < 0.0) throw ts::ArgumentError("quadrature tolerance must be positive");
  return r;
}

ts::BenchmarkProblem make_problem(int id, const ts::SchemeParameters& p) {
  return id == ts::kMachinePrecisionCase ? ts::make_machine_precision_case(p)
                                         : ts::make_benchmark(id, p);
}

tsb_status copy_text(const std::string& text, char* buffer, size_t capacity, size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (capacity == 0) return TSB_OK;
  if (!buffer) return fail(TSB_ERR_ARGUMENT, "null buffer with non-zero capacity");
  if (capacity < text.size() + 1) return fail(TSB_ERR_ARGUMENT, "buffer too small");
  std::memcpy(buffer, text.c_str(), text.size() + 1);
  return TSB_OK;
}

tsb_status copy_coefficients(const ts::SpectralCoefficients& c, double* out, size_t capacity,
                             size_t* written) {
  if (written) *written = c.size();
  if (capacity == 0) return TSB_OK;
  if (!out) return fail(TSB_ERR_ARGUMENT, "null output array");
  if (capacity < c.size()) return fail(TSB_ERR_ARGUMENT, "output array too small");
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i];
  return TSB_OK;
}

ts::OutputFormat to_format(tsb_format f) {
  switch (f) {
    case TSB_FORMAT_CSV: return ts::OutputFormat::csv;
    case TSB_FORMAT_JSON: return ts::OutputFormat::json;
  }
  throw ts::ArgumentError("unknown output format");
}

}  // namespace

extern "C" {

const char* tsb_version(void) { return "1.0.0"; }

const char* tsb_last_error(void) { return last_error.c_str(); }

tsb_status tsb_default_params(int test_id, tsb_params* out) {
  return guarded([&] {
    if (!out) return fail(TSB_ERR_ARGUMENT, "null output");
    *out = from_params(ts::default_parameters(test_id));
    return TSB_OK;
  });
}

void tsb_default_options(tsb_options* out) {
  if (!out) return;
  const ts::IntegrationOptions q;
  *out = tsb_options{0, 0, q.tol};
}

tsb_status tsb_validate_params(const tsb_params* params) {
  return guarded([&] {
    if (!params) return fail(TSB_ERR_ARGUMENT, "null parameters");
    to_params(*params).validate();
    return TSB_OK;
  });
}

tsb_status tsb_run_execute(int test_id, const tsb_params* params, const tsb_options* options,
                           tsb_run** out) {
  return guarded([&] {
    if (!out) return fail(TSB_ERR_ARGUMENT, "null output handle");
    *out = nullptr;
    ts::SchemeParameters p =
        params ? to_params(*params) : ts::default_parameters(test_id);
    p.validate();
    const ts::RunOptions opts = to_options(options);
    auto handle = std::make_unique<tsb_run>();
    handle->problem = make_problem(test_id, p);
    handle->result = ts::run_experiment(handle->problem, opts);
    const bool ok = handle->result.run.completed;
    const std::string failure = handle->result.run.failure;
    *out = handle.release();
    return ok ? TSB_OK : fail(TSB_ERR_NUMERIC, failure);
  });
}

void tsb_run_destroy(tsb_run* run) { delete run; }

tsb_status tsb_run_summary(const tsb_run* run, tsb_summary* out) {
  return guarded([&] {
    if (!run || !out) return fail(TSB_ERR_ARGUMENT, "null argument");
    const auto& r = run->result;
    out->completed = r.run.completed ? 1 : 0;
    out->layers = r.run.final_state.k;
    out->max_e1 = r.max_e1();
    out->max_e2 = r.max_e2();
    out->max_de1 = r.max_de1();
    out->max_de2 = r.max_de2();
    out->q0 = r.run.q0;
    out->wall_seconds = r.wall_seconds;
    return TSB_OK;
  });
}

const char* tsb_run_failure(const tsb_run* run) {
  return run ? run->result.run.failure.c_str() : "";
}

size_t tsb_run_warning_count(const tsb_run* run) {
  return run ? run->result.run.warnings.size() : 0;
}

const char* tsb_run_warning(const tsb_run* run, size_t index) {
  if (!run || index >= run->result.run.warnings.size()) return nullptr;
  return run->result.run.warnings[index].c_str();
}

size_t tsb_run_record_count(const tsb_run* run) { return run ? run->result.records.size() : 0; }

tsb_status tsb_run_record(const tsb_run* run, size_t index, tsb_record* out) {
  return guarded([&] {
    if (!run || !out) return fail(TSB_ERR_ARGUMENT, "null argument");
    if (index >= run->result.records.size()) return fail(TSB_ERR_ARGUMENT, "record index out of range");
    const auto& r = run->result.records[index];
    out->k = r.k;
    out->t = r.t;
    out->e1 = r.e1;
    out->e2 = r.e2;
    out->has_derivative_errors = r.de1.has_value() ? 1 : 0;
    out->de1 = r.de1.value_or(0.0);
    out->de2 = r.de2.value_or(0.0);
    out->q = r.q;
    out->mon_du = r.mon_du;
    out->mon_dv = r.mon_dv;
    out->mon_au = r.mon_au;
    out->mon_lv = r.mon_lv;
    return TSB_OK;
  });
}

tsb_status tsb_run_coefficients(const tsb_run* run, int which, double* out, size_t capacity,
                                size_t* written) {
  return guarded([&] {
    if (!run) return fail(TSB_ERR_ARGUMENT, "null run");
    if (which != 0 && which != 1) return fail(TSB_ERR_ARGUMENT, "which must be 0 (u) or 1 (v)");
    const auto& s = run->result.run.final_state;
    return copy_coefficients(which == 0 ? s.u_curr : s.v_curr, out, capacity, written);
  });
}

size_t tsb_run_trajectory_length(const tsb_run* run) {
  return run ? run->result.run.trajectory.size() : 0;
}

tsb_status tsb_run_trajectory_layer(const tsb_run* run, size_t layer, int which, double* out,
                                    size_t capacity, size_t* written) {
  return guarded([&] {
    if (!run) return fail(TSB_ERR_ARGUMENT, "null run");
    if (which != 0 && which != 1) return fail(TSB_ERR_ARGUMENT, "which must be 0 (u) or 1 (v)");
    const auto& traj = run->result.run.trajectory;
    if (layer >= traj.size()) return fail(TSB_ERR_ARGUMENT, "trajectory layer out of range");
    return copy_coefficients(which == 0 ? traj[layer].u_curr : traj[layer].v_curr, out, capacity,
                             written);
  });
}

tsb_status tsb_run_errors_text(const tsb_run* run, tsb_format format, char* buffer,
                               size_t capacity, size_t* needed) {
  return guarded([&] {
    if (!run) return fail(TSB_ERR_ARGUMENT, "null run");
    const auto& records = run->result.records;
    const std::string text = to_format(format) == ts::OutputFormat::csv
                                 ? ts::errors_to_csv(records)
                                 : ts::errors_to_json(records);
    return copy_text(text, buffer, capacity, needed);
  });
}

tsb_status tsb_run_write(const tsb_run* run, tsb_format format, const char* directory,
                         char* stem_buffer, size_t stem_capacity) {
  return guarded([&] {
    if (!run || !directory) return fail(TSB_ERR_ARGUMENT, "null argument");
    ts::write_experiment(run->problem, run->result, to_format(format), directory);
    if (stem_buffer)
      return copy_text(ts::run_file_stem(run->problem), stem_buffer, stem_capacity, nullptr);
    return TSB_OK;
  });
}

tsb_status tsb_temporal_study(int test_id, const tsb_params* base, const int* steps, size_t count,
                              int control_modes, const tsb_options* options, tsb_study** out) {
  return guarded([&] {
    if (!out || (!steps && count > 0)) return fail(TSB_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    const ts::SchemeParameters p = base ? to_params(*base) : ts::default_parameters(test_id);
    p.validate();
    auto handle = std::make_unique<tsb_study>();
    handle->study = ts::run_temporal_study(test_id, p, std::vector<int>(steps, steps + count),
                                           control_modes, to_options(options));
    *out = handle.release();
    return TSB_OK;
  });
}

tsb_status tsb_spatial_study(int test_id, const tsb_params* base, const int* modes, size_t count,
                             const tsb_options* options, tsb_study** out) {
  return guarded([&] {
    if (!out || (!modes && count > 0)) return fail(TSB_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    const ts::SchemeParameters p = base ? to_params(*base) : ts::default_parameters(test_id);
    p.validate();
    auto handle = std::make_unique<tsb_study>();
    handle->study = ts::run_spatial_study(test_id, p, std::vector<int>(modes, modes + count),
                                          to_options(options));
    *out = handle.release();
    return TSB_OK;
  });
}

void tsb_study_destroy(tsb_study* study) { delete study; }

tsb_status tsb_study_summary_get(const tsb_study* study, tsb_study_summary* out) {
  return guarded([&] {
    if (!study || !out) return fail(TSB_ERR_ARGUMENT, "null argument");
    const auto& s = study->study;
    out->temporal = s.axis == ts::StudyAxis::temporal ? 1 : 0;
    out->median_e1 = s.e1.median;
    out->median_e2 = s.e2.median;
    out->median_de1 = s.de1.median;
    out->median_de2 = s.de2.median;
    out->slope_e1 = s.slope_e1;
    out->slope_e2 = s.slope_e2;
    return TSB_OK;
  });
}

size_t tsb_study_run_count(const tsb_study* study) { return study ? study->study.runs.size() : 0; }

tsb_status tsb_study_run_get(const tsb_study* study, size_t index, tsb_study_run* out) {
  return guarded([&] {
    if (!study || !out) return fail(TSB_ERR_ARGUMENT, "null argument");
    if (index >= study->study.runs.size()) return fail(TSB_ERR_ARGUMENT, "run index out of range");
    const auto& r = study->study.runs[index];
    *out = tsb_study_run{r.steps, r.modes, r.tau, r.max_e1, r.max_e2,
                         r.max_de1, r.max_de2, r.completed ? 1 : 0};
    return TSB_OK;
  });
}

tsb_status tsb_study_orders(const tsb_study* study, size_t index, double out[4]) {
  return guarded([&] {
    if (!study || !out) return fail(TSB_ERR_ARGUMENT, "null argument");
    const auto& s = study->study;
    if (index >= s.e1.orders.size()) return fail(TSB_ERR_ARGUMENT, "order index out of range");
    out[0] = s.e1.orders[index];
    out[1] = s.e2.orders[index];
    out[2] = s.de1.orders[index];
    out[3] = s.de2.orders[index];
    return TSB_OK;
  });
}

size_t tsb_study_flag_count(const tsb_study* study) { return study ? study->study.flags.size() : 0; }

const char* tsb_study_flag(const tsb_study* study, size_t index) {
  if (!study || index >= study->study.flags.size()) return nullptr;
  return study->study.flags[index].c_str();
}

tsb_status tsb_study_csv(const tsb_study* study, char* buffer, size_t capacity, size_t* needed) {
  return guarded([&] {
    if (!study) return fail(TSB_ERR_ARGUMENT, "null study");
    return copy_text(ts::study_to_csv(study->study), buffer, capacity, needed);
  });
}

tsb_status tsb_study_write(const tsb_study* study, const char* path) {
  return guarded([&] {
    if (!study || !path) return fail(TSB_ERR_ARGUMENT, "null argument");
    ts::write_text_file(path, ts::study_to_csv(study->study));
    return TSB_OK;
  });
}

void tsb_default_abstract_config(tsb_abstract_config* out) {
  if (!out) return;
  const ts::TripleSpec spec;
  tsb_params physics = from_params(ts::SchemeParameters{});
  *out = tsb_abstract_config{20,
                             20,
                             20240601u,
                             1.0,
                             spec.spectrum_min,
                             spec.spectrum_max,
                             spec.subordination,
                             spec.c_norm,
                             physics};
}

tsb_status tsb_abstract_boundedness(const tsb_abstract_config* config, const int* steps,
                                    size_t count, const tsb_options* options, double* running_max,
                                    double* spread) {
  return guarded([&] {
    if (!config || !steps || count == 0) return fail(TSB_ERR_ARGUMENT, "null or empty argument");
    if (config->dimension < 1 || config->triples < 1)
      return fail(TSB_ERR_ARGUMENT, "dimension and triple count must be positive");
    for (size_t i = 0; i < count; ++i)
      if (steps[i] < 2) return fail(TSB_ERR_ARGUMENT, "every n must be at least 2");
    const ts::RunOptions opts = to_options(options);
    ts::TripleSpec spec;
    spec.spectrum_min = config->spectrum_min;
    spec.spectrum_max = config->spectrum_max;
    spec.subordination = config->subordination;
    spec.c_norm = config->c_norm;
    ts::AbstractParameters params;
    params.alpha = config->physics.alpha;
    params.beta = config->physics.beta;
    params.gamma = config->physics.gamma;
    params.delta = config->physics.delta;
    params.a1 = config->physics.a1;
    params.a2 = config->physics.a2;
    params.tau = config->final_time / steps[0];
    params.validate();

    std::mt19937_64 rng(config->seed);
    const std::vector<int> grid(steps, steps + count);
    for (int t = 0; t < config->triples; ++t) {
      const ts::OperatorTriple triple =
          ts::random_triple(static_cast<std::size_t>(config->dimension), spec, rng);
      const ts::AbstractInitialData data = ts::random_initial_data(triple, rng);
      const ts::BoundednessStudy s =
          ts::boundedness_study(triple, data, params, config->final_time, grid, opts.execution);
      for (size_t i = 0; i < count; ++i)
        for (size_t q = 0; q < 6; ++q)
          if (running_max) running_max[(static_cast<size_t>(t) * count + i) * 6 + q] = s.running_max[i][q];
      for (size_t q = 0; q < 6; ++q)
        if (spread) spread[static_cast<size_t>(t) * 6 + q] = s.spread[q];
    }
    return TSB_OK;
  });
}

}  // extern "C"
