#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isospec/error.hpp"
#include "isospec/json_io.hpp"

namespace isospec {

/// Expected bound on a named residual: value < limit or value > limit.
struct Bound {
  enum class Op { Less, Greater };
  std::string residual;
  Op op = Op::Less;
  double limit = 0.0;
};

struct BoundResult {
  Bound bound;  ///< limit already scaled by the tolerance factor
  std::optional<double> value;
  bool pass = false;
};

/// Rectangular numeric table, emitted as a CSV block.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ErrorRecord {
  ErrorKind kind = ErrorKind::Config;
  std::string message;
  std::optional<double> measured;
};

enum class ExitCode : int { Pass = 0, ResidualFailure = 1, ConfigError = 2, Refusal = 3 };

/// Exit code a run-level error maps to. Refusals and out-of-domain parameters
/// give 3, configuration and I/O problems 2, everything else 1.
ExitCode exit_code_for(ErrorKind kind);

struct RunReport {
  std::string scenario;
  json config = json::object();
  std::map<std::string, double> residuals;
  std::map<std::string, std::string> labels;
  std::map<std::string, std::size_t> dims;
  std::map<std::string, Table> tables;
  std::vector<BoundResult> bounds;
  std::optional<ErrorRecord> error;
  double wall_seconds = 0.0;

  void set(const std::string& name, double value) { residuals[name] = value; }
  void label(const std::string& name, std::string value) { labels[name] = std::move(value); }

  /// Evaluates `expected` (limits multiplied, for Less, or divided, for
  /// Greater, by tol_scale) against the residual map.
  void evaluate(const std::vector<Bound>& expected, double tol_scale);

  bool all_pass() const;
  ExitCode exit_code() const;

  /// Wall time is left out unless asked for, so reports stay byte-stable.
  json to_json(bool with_timing = false) const;
  std::string to_csv() const;
};

enum class ReportFormat { Json, Csv };

ReportFormat parse_format(const std::string& name);

/// Several reports ordered by scenario name.
json aggregate_json(const std::vector<RunReport>& reports, bool with_timing = false);
std::string aggregate_csv(const std::vector<RunReport>& reports);
ExitCode aggregate_exit_code(const std::vector<RunReport>& reports);

std::string render(const std::vector<RunReport>& reports, ReportFormat format, bool with_timing);

/// Writes the rendered text to `path`; I/O failures name the path.
void write_text(const std::filesystem::path& path, const std::string& text);

/// %.17g, the format used for every float in emitted reports.
std::string format_double(double v);

}  // namespace isospec
