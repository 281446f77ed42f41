#include "isospec/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace isospec {

ExitCode exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::HypothesisFailure:
    case ErrorKind::IllConditioned:
    case ErrorKind::Degenerate:
    case ErrorKind::InvalidParameter:
    case ErrorKind::NotHermitian:
    case ErrorKind::Domain:
      return ExitCode::Refusal;
    case ErrorKind::Config:
    case ErrorKind::Io:
      return ExitCode::ConfigError;
    case ErrorKind::DimensionMismatch:
    case ErrorKind::Quadrature:
      return ExitCode::ResidualFailure;
  }
  return ExitCode::ResidualFailure;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void RunReport::evaluate(const std::vector<Bound>& expected, double tol_scale) {
  bounds.clear();
  for (const auto& b : expected) {
    BoundResult r;
    r.bound = b;
    r.bound.limit = b.op == Bound::Op::Less ? b.limit * tol_scale : b.limit / tol_scale;
    auto it = residuals.find(b.residual);
    if (it != residuals.end()) {
      r.value = it->second;
      const double v = it->second;
      r.pass = b.op == Bound::Op::Less ? v < r.bound.limit : v > r.bound.limit;
    }
    bounds.push_back(r);
  }
}

bool RunReport::all_pass() const {
  if (error) return false;
  return std::all_of(bounds.begin(), bounds.end(), [](const BoundResult& b) { return b.pass; });
}

ExitCode RunReport::exit_code() const {
  if (error) return exit_code_for(error->kind);
  return all_pass() ? ExitCode::Pass : ExitCode::ResidualFailure;
}

json RunReport::to_json(bool with_timing) const {
  json out;
  out["scenario"] = scenario;
  out["config"] = config;
  out["residuals"] = json::object();
  for (const auto& [k, v] : residuals) out["residuals"][k] = v;
  out["labels"] = json::object();
  for (const auto& [k, v] : labels) out["labels"][k] = v;
  out["dims"] = json::object();
  for (const auto& [k, v] : dims) out["dims"][k] = v;
  json b = json::array();
  for (const auto& r : bounds) {
    b.push_back({{"residual", r.bound.residual},
                 {"op", r.bound.op == Bound::Op::Less ? "<" : ">"},
                 {"limit", r.bound.limit},
                 {"value", r.value ? json(*r.value) : json(nullptr)},
                 {"pass", r.pass}});
  }
  out["bounds"] = std::move(b);
  json t = json::object();
  for (const auto& [name, table] : tables) {
    json rows = json::array();
    for (const auto& row : table.rows) rows.push_back(row);
    t[name] = {{"columns", table.columns}, {"rows", std::move(rows)}};
  }
  out["tables"] = std::move(t);
  if (error) {
    out["error"] = {{"kind", std::string(to_string(error->kind))},
                    {"message", error->message},
                    {"measured", error->measured ? json(*error->measured) : json(nullptr)}};
  } else {
    out["error"] = nullptr;
  }
  out["pass"] = all_pass();
  out["exit_code"] = static_cast<int>(exit_code());
  if (with_timing) out["wall_seconds"] = wall_seconds;
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

std::string RunReport::to_csv() const {
  std::ostringstream out;
  out << "# scenario: " << scenario << "\n";
  out << "# exit_code: " << static_cast<int>(exit_code()) << "\n";
  if (error) {
    out << "# error: " << to_string(error->kind) << ": " << error->message << "\n";
  }
  out << "# table: residuals\nname,value,op,limit,pass\n";
  std::map<std::string, const BoundResult*> by_name;
  for (const auto& b : bounds) by_name[b.bound.residual] = &b;
  for (const auto& [name, value] : residuals) {
    out << csv_field(name) << ',' << format_double(value);
    auto it = by_name.find(name);
    if (it != by_name.end()) {
      const auto& b = *it->second;
      out << ',' << (b.bound.op == Bound::Op::Less ? "<" : ">") << ',' << format_double(b.bound.limit)
          << ',' << (b.pass ? "true" : "false");
    } else {
      out << ",,,";
    }
    out << "\n";
  }
  for (const auto& b : bounds) {
    if (!b.value) {
      out << csv_field(b.bound.residual) << ",," << (b.bound.op == Bound::Op::Less ? "<" : ">")
          << ',' << format_double(b.bound.limit) << ",false\n";
    }
  }
  if (!labels.empty()) {
    out << "# table: labels\nname,value\n";
    for (const auto& [k, v] : labels) out << csv_field(k) << ',' << csv_field(v) << "\n";
  }
  for (const auto& [name, table] : tables) {
    out << "# table: " << name << "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out << (c ? "," : "") << csv_field(table.columns[c]);
    }
    out << "\n";
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
      out << "\n";
    }
  }
  return out.str();
}

ReportFormat parse_format(const std::string& name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  throw Error(ErrorKind::Config, "unknown report format '" + name + "' (json or csv)");
}

namespace {

std::vector<const RunReport*> sorted(const std::vector<RunReport>& reports) {
  std::vector<const RunReport*> v;
  for (const auto& r : reports) v.push_back(&r);
  std::sort(v.begin(), v.end(),
            [](const RunReport* a, const RunReport* b) { return a->scenario < b->scenario; });
  return v;
}

}  // namespace

json aggregate_json(const std::vector<RunReport>& reports, bool with_timing) {
  json out;
  json all = json::object();
  for (const auto* r : sorted(reports)) all[r->scenario] = r->to_json(with_timing);
  out["reports"] = std::move(all);
  out["exit_code"] = static_cast<int>(aggregate_exit_code(reports));
  return out;
}

std::string aggregate_csv(const std::vector<RunReport>& reports) {
  std::string out;
  for (const auto* r : sorted(reports)) out += r->to_csv();
  return out;
}

ExitCode aggregate_exit_code(const std::vector<RunReport>& reports) {
  bool config = false, residual = false, refusal = false;
  for (const auto& r : reports) {
    switch (r.exit_code()) {
      case ExitCode::ConfigError: config = true; break;
      case ExitCode::ResidualFailure: residual = true; break;
      case ExitCode::Refusal: refusal = true; break;
      case ExitCode::Pass: break;
    }
  }
  if (config) return ExitCode::ConfigError;
  if (residual) return ExitCode::ResidualFailure;
  if (refusal) return ExitCode::Refusal;
  return ExitCode::Pass;
}

std::string render(const std::vector<RunReport>& reports, ReportFormat format, bool with_timing) {
  if (format == ReportFormat::Csv) {
    return reports.size() == 1 ? reports.front().to_csv() : aggregate_csv(reports);
  }
  const json j = reports.size() == 1 ? reports.front().to_json(with_timing)
                                     : aggregate_json(reports, with_timing);
  return dump_json(j) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open report file " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed for report file " + path.string());
}

}  // namespace isospec
