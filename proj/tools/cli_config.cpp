#include "cli_config.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

namespace timoshenko::cli {

namespace {

using json = nlohmann::json;

const std::map<std::string, Mode> kModes = {
    {"run", Mode::run},
    {"temporal-study", Mode::temporal_study},
    {"spatial-study", Mode::spatial_study},
    {"abstract-demo", Mode::abstract_demo},
    {"machine-precision", Mode::machine_precision},
};

// Raw settings from one source; unset fields defer to the next source down.
struct Layer {
  std::optional<std::string> mode;
  std::optional<int> test;
  std::optional<int> n, N;
  std::optional<double> T, alpha, beta, gamma, delta, a1, a2, tol;
  std::optional<std::string> out, format, parallel;
  std::optional<bool> record_trajectory;
  std::optional<std::vector<int>> grid;
  std::optional<int> control_N;
  std::optional<unsigned long long> seed;
};

template <class T>
void overlay(std::optional<T>& base, const std::optional<T>& top) {
  if (top) base = top;
}

Layer merge(Layer base, const Layer& top) {
  overlay(base.mode, top.mode);
  overlay(base.test, top.test);
  overlay(base.n, top.n);
  overlay(base.N, top.N);
  overlay(base.T, top.T);
  overlay(base.alpha, top.alpha);
  overlay(base.beta, top.beta);
  overlay(base.gamma, top.gamma);
  overlay(base.delta, top.delta);
  overlay(base.a1, top.a1);
  overlay(base.a2, top.a2);
  overlay(base.tol, top.tol);
  overlay(base.out, top.out);
  overlay(base.format, top.format);
  overlay(base.parallel, top.parallel);
  overlay(base.record_trajectory, top.record_trajectory);
  overlay(base.grid, top.grid);
  overlay(base.control_N, top.control_N);
  overlay(base.seed, top.seed);
  return base;
}

template <class T>
std::optional<T> field(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("config file: field '") + key + "' has the wrong type");
  }
}

Layer read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file " + path + " must hold a JSON object");

  static const std::vector<std::string> known = {
      "mode", "test", "n", "N", "T", "alpha", "beta", "gamma", "delta", "a1", "a2", "tol",
      "out", "format", "parallel", "record-trajectory", "grid", "control-N", "seed"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw UsageError("config file: unknown field '" + key + "'");

  Layer l;
  l.mode = field<std::string>(j, "mode");
  l.test = field<int>(j, "test");
  l.n = field<int>(j, "n");
  l.N = field<int>(j, "N");
  l.T = field<double>(j, "T");
  l.alpha = field<double>(j, "alpha");
  l.beta = field<double>(j, "beta");
  l.gamma = field<double>(j, "gamma");
  l.delta = field<double>(j, "delta");
  l.a1 = field<double>(j, "a1");
  l.a2 = field<double>(j, "a2");
  l.tol = field<double>(j, "tol");
  l.out = field<std::string>(j, "out");
  l.format = field<std::string>(j, "format");
  if (j.contains("parallel") && j.at("parallel").is_boolean())
    l.parallel = j.at("parallel").get<bool>() ? "on" : "off";
  else
    l.parallel = field<std::string>(j, "parallel");
  l.record_trajectory = field<bool>(j, "record-trajectory");
  l.grid = field<std::vector<int>>(j, "grid");
  l.control_N = field<int>(j, "control-N");
  l.seed = field<unsigned long long>(j, "seed");
  return l;
}

std::vector<int> parse_grid(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--grid: '" + item + "' is not an integer");
    }
  }
  return out;
}

}  // namespace

const char* mode_name(Mode mode) {
  for (const auto& [name, m] : kModes)
    if (m == mode) return name.c_str();
  return "?";
}

std::vector<int> default_temporal_grid(const tsb_params& d) {
  return {d.steps / 4, d.steps / 2, d.steps, 2 * d.steps};
}

int default_temporal_modes(const tsb_params& d) { return d.modes + 5; }

std::vector<int> default_spatial_grid(const tsb_params& d) {
  std::vector<int> grid;
  for (int m = d.modes - 15; m <= d.modes + 5; m += 5) {
    const int v = std::max(2, m);
    if (grid.empty() || v > grid.back()) grid.push_back(v);
  }
  return grid;
}

ParseResult parse_config(int argc, const char* const* argv, const EnvLookup& env) {
  CLI::App app{"Legendre-Galerkin solver for the nonlinear Timoshenko beam system"};
  app.set_help_flag("-h,--help", "Print this help and exit");

  Layer flags;
  std::optional<std::string> config_path, grid_text;
  bool record = false;
  app.add_option("--config", config_path, "JSON file with the same field names as the flags");
  app.add_option("--mode", flags.mode,
                 "run | temporal-study | spatial-study | abstract-demo | machine-precision");
  app.add_option("--test", flags.test, "Benchmark id 1, 2 or 3");
  app.add_option("--n", flags.n, "Number of time steps");
  app.add_option("--N", flags.N, "Number of trial functions");
  app.add_option("--T", flags.T, "Final time");
  app.add_option("--alpha", flags.alpha);
  app.add_option("--beta", flags.beta);
  app.add_option("--gamma", flags.gamma);
  app.add_option("--delta", flags.delta);
  app.add_option("--a1", flags.a1);
  app.add_option("--a2", flags.a2);
  app.add_option("--tol", flags.tol, "Relative tolerance of the projection quadrature");
  app.add_option("--out", flags.out, "Output directory (default $TIMOSHENKO_OUT_DIR or results)");
  app.add_option("--format", flags.format, "csv | json");
  app.add_option("--parallel", flags.parallel, "on | off");
  app.add_flag("--record-trajectory", record, "Keep the coefficients of every layer");
  app.add_option("--grid", grid_text,
                 "Comma-separated n values (temporal study, abstract demo) or N values (spatial study)");
  app.add_option("--control-N", flags.control_N, "Temporal study: N of the contamination check");
  app.add_option("--seed", flags.seed, "Abstract demo: random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    ParseResult r;
    r.help = true;
    r.help_text = app.help();
    return r;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  if (record) flags.record_trajectory = true;
  if (grid_text) flags.grid = parse_grid(*grid_text);

  Layer env_layer;
  if (env) env_layer.out = env("TIMOSHENKO_OUT_DIR");
  Layer file_layer;
  if (config_path) file_layer = read_config_file(*config_path);
  const Layer s = merge(merge(env_layer, file_layer), flags);

  RunConfig c;
  if (s.mode) {
    const auto it = kModes.find(*s.mode);
    if (it == kModes.end()) throw UsageError("unknown mode '" + *s.mode + "'");
    c.mode = it->second;
  }

  if (c.mode == Mode::machine_precision) {
    if (s.test && *s.test != TSB_MACHINE_PRECISION_CASE)
      throw UsageError("machine-precision mode does not take a test id");
    c.test = TSB_MACHINE_PRECISION_CASE;
  } else if (c.mode == Mode::abstract_demo) {
    c.test = s.test.value_or(1);
  } else {
    if (!s.test) throw UsageError(std::string(mode_name(c.mode)) + " mode needs --test");
    if (*s.test < 1 || *s.test > 3) throw UsageError("--test must be 1, 2 or 3");
    c.test = *s.test;
  }

  if (tsb_default_params(c.test, &c.params) != TSB_OK) throw UsageError(tsb_last_error());
  const tsb_params defaults = c.params;
  if (s.n) c.params.steps = *s.n;
  if (s.N) c.params.modes = *s.N;
  if (s.T) c.params.final_time = *s.T;
  if (s.alpha) c.params.alpha = *s.alpha;
  if (s.beta) c.params.beta = *s.beta;
  if (s.gamma) c.params.gamma = *s.gamma;
  if (s.delta) c.params.delta = *s.delta;
  if (s.a1) c.params.a1 = *s.a1;
  if (s.a2) c.params.a2 = *s.a2;

  if (s.tol) {
    if (!(*s.tol > 0.0)) throw UsageError("--tol must be positive");
    c.tol = *s.tol;
  }
  if (s.out) {
    if (s.out->empty()) throw UsageError("--out must not be empty");
    c.out_dir = *s.out;
  }
  if (s.format) {
    if (*s.format == "csv") c.format = TSB_FORMAT_CSV;
    else if (*s.format == "json") c.format = TSB_FORMAT_JSON;
    else throw UsageError("--format must be csv or json");
  }
  if (s.parallel) {
    if (*s.parallel == "on") c.parallel = true;
    else if (*s.parallel == "off") c.parallel = false;
    else throw UsageError("--parallel must be on or off");
  }
  c.record_trajectory = s.record_trajectory.value_or(false);
  if (s.seed) c.seed = *s.seed;

  switch (c.mode) {
    case Mode::temporal_study:
      // The time grid replaces n; N defaults a little above the test's value so
      // the spatial error stays below the temporal one.
      if (!s.N) c.params.modes = default_temporal_modes(defaults);
      c.grid = s.grid.value_or(default_temporal_grid(defaults));
      c.control_modes = s.control_N.value_or(c.params.modes + 10);
      if (c.grid.size() < 3) throw UsageError("temporal study needs at least three n values");
      break;
    case Mode::spatial_study:
      c.grid = s.grid.value_or(default_spatial_grid(defaults));
      if (c.grid.size() < 4) throw UsageError("spatial study needs at least four N values");
      break;
    case Mode::abstract_demo:
      c.grid = s.grid.value_or(std::vector<int>{64, 128, 256});
      if (c.grid.empty()) throw UsageError("abstract demo needs at least one n value");
      break;
    default:
      if (s.grid) throw UsageError("--grid only applies to study and demo modes");
      break;
  }
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    if (c.grid[i] < 2) throw UsageError("grid values must be at least 2");
    if (i > 0 && c.grid[i] <= c.grid[i - 1]) throw UsageError("grid must be strictly increasing");
  }

  // Validate every configuration that will actually run.
  auto check = [](const tsb_params& p) {
    if (tsb_validate_params(&p) != TSB_OK) throw UsageError(tsb_last_error());
  };
  if (c.mode == Mode::abstract_demo) {
    tsb_params p = c.params;
    p.steps = c.grid.front();
    check(p);
  } else {
    check(c.params);
    for (int g : c.grid) {
      tsb_params p = c.params;
      (c.mode == Mode::temporal_study ? p.steps : p.modes) = g;
      check(p);
    }
    if (c.mode == Mode::temporal_study) {
      tsb_params p = c.params;
      p.modes = c.control_modes;
      check(p);
    }
  }
  return {c, false, {}};
}

}  // namespace timoshenko::cli
