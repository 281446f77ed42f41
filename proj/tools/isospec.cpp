#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "isospec/report.hpp"
#include "isospec/scenario.hpp"

namespace {

using namespace isospec;

void print_summary(const std::vector<RunReport>& reports, double wall) {
  for (const auto& r : reports) {
    std::size_t passed = 0;
    for (const auto& b : r.bounds) passed += b.pass ? 1 : 0;
    std::fprintf(stderr, "%-14s exit %d  bounds %zu/%zu  %.3fs", r.scenario.c_str(),
                 static_cast<int>(r.exit_code()), passed, r.bounds.size(), r.wall_seconds);
    if (r.error) {
      std::fprintf(stderr, "  %s: %s", std::string(to_string(r.error->kind)).c_str(),
                   r.error->message.c_str());
    }
    std::fputc('\n', stderr);
    for (const auto& b : r.bounds) {
      if (b.pass || r.error) continue;
      std::fprintf(stderr, "    failed %s = %s (want %s %s)\n", b.bound.residual.c_str(),
                   b.value ? format_double(*b.value).c_str() : "missing",
                   b.bound.op == Bound::Op::Less ? "<" : ">",
                   format_double(b.bound.limit).c_str());
    }
  }
  std::fprintf(stderr, "wall time %.3fs\n", wall);
}

int emit(const std::vector<RunReport>& reports, const std::string& format, const std::string& out,
         bool with_timing, double wall) {
  const std::string text = render(reports, parse_format(format), with_timing);
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text(out, text);
  }
  print_summary(reports, wall);
  return static_cast<int>(aggregate_exit_code(reports));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isospectral partner Hamiltonians and vector coherent states"};
  app.require_subcommand(1);

  std::string scenario;
  std::vector<std::string> sets;
  std::optional<std::string> dim, q, J1, J2, gamma, delta;
  std::string out;
  std::string format = "json";
  bool with_timing = false;

  auto* run = app.add_subcommand("run", "run a scenario, or 'all'");
  run->add_option("scenario", scenario, "scenario name or 'all'")->required();
  run->add_option("--dim", dim, "Fock truncation");
  run->add_option("--q", q, "quon deformation");
  run->add_option("--J1", J1, "b-sector action variable");
  run->add_option("--J2", J2, "f-sector action variable");
  run->add_option("--gamma", gamma, "angle variable");
  run->add_option("--delta", delta, "sector phase offset");
  run->add_option("--set", sets, "override any parameter, key=value (repeatable)");
  run->add_option("--out", out, "report file (default stdout)");
  run->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  run->add_flag("--with-timing", with_timing, "include wall time in the report");

  auto* list = app.add_subcommand("list", "list scenarios and their parameters");

  std::string h1_path, x1_path;
  std::optional<std::size_t> margin;
  bool allow_kernel = false;
  auto* verify = app.add_subcommand("verify", "construct and check the partner of a given pair");
  verify->add_option("--h1", h1_path, "h1 matrix file (JSON)")->required();
  verify->add_option("--x1", x1_path, "x1 matrix file (JSON)")->required();
  verify->add_option("--margin", margin, "interior margin (default: sum of bands)");
  verify->add_flag("--allow-kernel", allow_kernel, "accept an interior kernel of N1");
  verify->add_option("--out", out, "report file (default stdout)");
  verify->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  verify->add_flag("--with-timing", with_timing, "include wall time in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::ConfigError);
  }

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  try {
    if (list->parsed()) {
      std::cout << list_scenarios();
      return 0;
    }
    const double tol_scale = tolerance_scale_from_env();
    if (verify->parsed()) {
      const RunReport r = verify_pair(h1_path, x1_path, margin, allow_kernel, tol_scale);
      return emit({r}, format, out, with_timing, elapsed());
    }

    Overrides overrides;
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorKind::Config, "--set expects key=value, got '" + kv + "'");
      }
      overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    const std::pair<const char*, const std::optional<std::string>*> named[] = {
        {"dim", &dim}, {"q", &q}, {"J1", &J1}, {"J2", &J2}, {"gamma", &gamma}, {"delta", &delta}};
    for (const auto& [key, value] : named) {
      if (*value) overrides[key] = **value;
    }

    std::vector<RunReport> reports;
    if (scenario == "all") {
      reports = run_all(overrides, tol_scale);
    } else {
      reports.push_back(run_scenario(scenario, overrides, tol_scale));
    }
    return emit(reports, format, out, with_timing, elapsed());
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", std::string(to_string(e.kind())).c_str(), e.what());
    return static_cast<int>(exit_code_for(e.kind()));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(ExitCode::ResidualFailure);
  }
}
