#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "timoshenko/timoshenko.h"

namespace timoshenko::cli {

enum class Mode { run, temporal_study, spatial_study, abstract_demo, machine_precision };

const char* mode_name(Mode mode);

/// Bad flag, bad value or missing test id. Maps to exit status 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Mode mode = Mode::run;
  int test = 1;
  tsb_params params{};  // test defaults with overrides applied
  double tol = 0.0;     // 0: library default
  std::string out_dir = "results";
  tsb_format format = TSB_FORMAT_CSV;
  bool parallel = false;
  bool record_trajectory = false;
  std::vector<int> grid;  // n values (temporal) or N values (spatial / abstract n values)
  int control_modes = 0;  // temporal study: N of the contamination check
  unsigned long long seed = 20240601ULL;
};

/// Result of parsing; help requests carry the text to print instead of a config.
struct ParseResult {
  RunConfig config;
  bool help = false;
  std::string help_text;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Precedence: flags over config file over environment over per-test defaults.
/// Everything is validated before returning. Throws UsageError.
ParseResult parse_config(int argc, const char* const* argv, const EnvLookup& env = {});

/// Defaults of the study grids for a test.
std::vector<int> default_temporal_grid(const tsb_params& defaults);
int default_temporal_modes(const tsb_params& defaults);
std::vector<int> default_spatial_grid(const tsb_params& defaults);

}  // namespace timoshenko::cli
