#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "subheat/samplers.hpp"

namespace subheat::cli {

enum ExitCode : int {
  kOk = 0,
  kSuiteFailed = 1,
  kConfigError = 2,
  kUnsupported = 3,
  kRuntimeError = 4,
};

enum class OutputFormat { Csv, Json };

/// Which contents `estimate` reports. Auto means both on intervals and the
/// spectral content alone on disks.
enum class Quantity { Auto, Spectral, Regular, Both };

struct RunConfig {
  std::string exponent;
  std::string domain = "interval:0,1";
  TimeChangeKind time_change = TimeChangeKind::Subordinator;
  std::vector<double> t_ladder;
  std::uint64_t n_paths = 100000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  OutputFormat format = OutputFormat::Csv;
  std::string out_path;
  Quantity quantity = Quantity::Auto;
  /// When positive, double the path count until stderr <= this fraction of
  /// the decaying quantity, up to max_paths.
  double target_rel_stderr = 0.0;
  std::uint64_t max_paths = std::uint64_t{1} << 24;
  double grid_step = 1e-3;
  std::uint64_t max_grid_steps = 1'000'000'000ULL;
  bool quick = false;
};

struct EstimateRow {
  double t;
  std::string quantity;  // "spectral" or "regular"
  double value;
  double std_error;
  double rate_value;
  double ratio;
  std::uint64_t n_paths;
  std::uint64_t seed;
};

/// Comma-separated positive times, strictly decreasing.
std::vector<double> parse_ladder(std::string_view text);

/// Flat `key=value` lines; blank lines and lines starting with '#' are skipped.
std::map<std::string, std::string> parse_config_text(std::string_view text);

/// %.17g.
std::string format_number(double x);

std::vector<EstimateRow> run_estimate(const RunConfig& config);
std::string render_estimate(const std::vector<EstimateRow>& rows, OutputFormat format);
std::string render_predict(const RunConfig& config);

/// Runs one command line (without the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace subheat::cli
