#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "isospec/report.hpp"
#include "isospec/scenario.hpp"

using namespace isospec;

namespace {

const std::filesystem::path kData = ISOSPEC_TEST_DATA_DIR;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("registry: 13 unique scenarios, sorted, with typed defaults") {
  const auto& reg = scenario_registry();
  CHECK(reg.size() == 13);
  std::set<std::string> names;
  for (const auto& s : reg) names.insert(s.name);
  CHECK(names.size() == 13);
  for (const char* n : {"ex1", "ex2", "ex2-cubed", "ex3-shift", "ex4-diag", "ex4-phase", "ex5-angular",
                        "quon-chain", "unitary-chain", "gk-boson", "gk-quon", "gk-frame",
                        "susy-algebra"}) {
    CHECK(names.count(n) == 1);
  }
  for (std::size_t k = 1; k < reg.size(); ++k) CHECK(reg[k - 1].name < reg[k].name);
  CHECK_THROWS_AS(find_scenario("ex9"), Error);
}

TEST_CASE("list output names every scenario and counts them") {
  const std::string out = list_scenarios();
  for (const auto& s : scenario_registry()) CHECK(out.find(s.name + " -> ") != std::string::npos);
  CHECK(out.find("13 scenarios") != std::string::npos);
}

TEST_CASE("overrides are type-checked") {
  const Scenario& s = find_scenario("ex3-shift");
  const json c = resolve_config(s, {{"dim", "12"}, {"backend", "quon"}, {"q", "0.25"}});
  CHECK(c["dim"] == 12);
  CHECK(c["backend"] == "quon");
  CHECK(c["q"] == 0.25);
  CHECK(c["step"] == 1);
  auto kind = [&](const Overrides& o) {
    try {
      resolve_config(s, o);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  CHECK(kind({{"dim", "twelve"}}) == ErrorKind::Config);
  CHECK(kind({{"dim", "-3"}}) == ErrorKind::Config);
  CHECK(kind({{"q", "0.5x"}}) == ErrorKind::Config);
  CHECK(kind({{"backend", "fermion"}}) == ErrorKind::Config);
  CHECK(kind({{"J1", "1"}}) == ErrorKind::Config);
  CHECK_THROWS_AS(run_all({{"no_such_key", "1"}}), Error);
}

TEST_CASE("module errors become structured report failures") {
  const RunReport bad = run_scenario("ex4-phase", {{"beta_im", "2"}});
  REQUIRE(bad.error.has_value());
  CHECK(bad.error->kind == ErrorKind::InvalidParameter);
  CHECK(bad.exit_code() == ExitCode::Refusal);
  CHECK(bad.residuals.count("r_commutant_raw") == 1);
  CHECK(bad.residuals.at("r_commutant_raw") > 0.0);

  const RunReport zero = run_scenario("ex4-diag", {{"alpha_re", "0"}});
  CHECK(zero.exit_code() == ExitCode::Refusal);

  const RunReport quon = run_scenario("gk-quon", {{"J1", "2.5"}});
  REQUIRE(quon.error.has_value());
  CHECK(quon.error->kind == ErrorKind::Domain);
  CHECK(quon.exit_code() == ExitCode::Refusal);

  const RunReport tight = run_scenario("ex1", {}, 1e-30);
  CHECK_FALSE(tight.error.has_value());
  CHECK(tight.exit_code() == ExitCode::ResidualFailure);
}

TEST_CASE("exit-code mapping and aggregation") {
  CHECK(exit_code_for(ErrorKind::HypothesisFailure) == ExitCode::Refusal);
  CHECK(exit_code_for(ErrorKind::IllConditioned) == ExitCode::Refusal);
  CHECK(exit_code_for(ErrorKind::Config) == ExitCode::ConfigError);
  CHECK(exit_code_for(ErrorKind::Io) == ExitCode::ConfigError);
  CHECK(exit_code_for(ErrorKind::Quadrature) == ExitCode::ResidualFailure);
  RunReport pass, fail, refused, config;
  fail.set("x", 1.0);
  fail.evaluate({{"x", Bound::Op::Less, 0.5}}, 1.0);
  refused.error = ErrorRecord{ErrorKind::HypothesisFailure, "no", std::nullopt};
  config.error = ErrorRecord{ErrorKind::Config, "bad", std::nullopt};
  CHECK(aggregate_exit_code({pass}) == ExitCode::Pass);
  CHECK(aggregate_exit_code({pass, refused}) == ExitCode::Refusal);
  CHECK(aggregate_exit_code({refused, fail}) == ExitCode::ResidualFailure);
  CHECK(aggregate_exit_code({fail, config, refused}) == ExitCode::ConfigError);
}

TEST_CASE("bounds scale with the tolerance factor and flag missing residuals") {
  RunReport r;
  r.set("small", 5e-12);
  r.set("big", 0.5);
  r.evaluate({{"small", Bound::Op::Less, 1e-12}, {"big", Bound::Op::Greater, 10.0},
              {"absent", Bound::Op::Less, 1.0}},
             10.0);
  CHECK(r.bounds[0].pass);
  CHECK(r.bounds[0].bound.limit == doctest::Approx(1e-11 * 1.0000001));
  CHECK_FALSE(r.bounds[1].pass);
  CHECK(r.bounds[1].bound.limit == doctest::Approx(1.0));
  CHECK_FALSE(r.bounds[2].pass);
  CHECK_FALSE(r.bounds[2].value.has_value());
}

TEST_CASE("tolerance scale comes from the environment") {
  ::setenv("ISOSPEC_TOL_SCALE", "4", 1);
  CHECK(tolerance_scale_from_env() == 4.0);
  ::setenv("ISOSPEC_TOL_SCALE", "-1", 1);
  CHECK_THROWS_AS(tolerance_scale_from_env(), Error);
  ::setenv("ISOSPEC_TOL_SCALE", "abc", 1);
  CHECK_THROWS_AS(tolerance_scale_from_env(), Error);
  ::unsetenv("ISOSPEC_TOL_SCALE");
  CHECK(tolerance_scale_from_env() == 1.0);
}

TEST_CASE("golden report for the diagonal two-level scenario") {
  const RunReport r = run_scenario("ex4-diag");
  const std::string text = render({r}, ReportFormat::Json, false);
  CHECK(text == slurp(kData / ".." / "golden" / "ex4-diag.json"));
  CHECK(text.find("wall_seconds") == std::string::npos);
  CHECK(render({r}, ReportFormat::Json, true).find("wall_seconds") != std::string::npos);
}

TEST_CASE("same report twice gives identical bytes, JSON and CSV") {
  const RunReport a = run_scenario("quon-chain");
  const RunReport b = run_scenario("quon-chain");
  CHECK(render({a}, ReportFormat::Json, false) == render({b}, ReportFormat::Json, false));
  CHECK(render({a}, ReportFormat::Csv, false) == render({b}, ReportFormat::Csv, false));
  const auto tmp = std::filesystem::temp_directory_path() / "isospec_report_twice.json";
  write_text(tmp, render({a}, ReportFormat::Json, false));
  const std::string first = slurp(tmp);
  write_text(tmp, render({b}, ReportFormat::Json, false));
  CHECK(first == slurp(tmp));
  std::filesystem::remove(tmp);
  CHECK_THROWS_AS(write_text("/nonexistent/dir/report.json", "x"), Error);
}

TEST_CASE("CSV gamma table has one row per surviving eigenvector") {
  const RunReport r = run_scenario("ex2");
  const std::string csv = r.to_csv();
  const auto start = csv.find("# table: gamma\n");
  REQUIRE(start != std::string::npos);
  std::istringstream in(csv.substr(start));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line == "n,eps,mu,interior_weight,residual,rel_residual");
  std::size_t rows = 0;
  while (std::getline(in, line) && line.rfind("#", 0) != 0) ++rows;
  CHECK(rows == static_cast<std::size_t>(r.residuals.at("gamma_records")));
  CHECK(rows > 0);
}

TEST_CASE("report JSON parses back and keeps the Operator format usable") {
  const RunReport r = run_scenario("ex5-angular");
  const json j = json::parse(render({r}, ReportFormat::Json, false));
  CHECK(j["scenario"] == "ex5-angular");
  CHECK(j["exit_code"] == 0);
  CHECK(j["pass"] == true);
  CHECK(j["config"]["tol_scale"] == 1.0);
  CHECK(j["residuals"].size() == r.residuals.size());
  const Operator h1 = load_operator(kData / "two_level_h1.json");
  CHECK(operator_from_json(json::parse(dump_json(operator_to_json(h1)))) == h1);
}

TEST_CASE("verify runs the construction on matrix files") {
  const RunReport ok =
      verify_pair(kData / "two_level_h1.json", kData / "two_level_x1.json", std::nullopt, false, 1.0);
  CHECK(ok.exit_code() == ExitCode::Pass);
  CHECK(ok.tables.at("h2").rows.size() == 4);
  const RunReport refused = verify_pair(kData / "two_level_h1.json", kData / "noncommuting_x1.json",
                                        std::nullopt, false, 1.0);
  CHECK(refused.exit_code() == ExitCode::Refusal);
  const RunReport missing =
      verify_pair(kData / "absent.json", kData / "two_level_x1.json", std::nullopt, false, 1.0);
  CHECK(missing.exit_code() == ExitCode::ConfigError);
  const RunReport malformed =
      verify_pair(kData / "malformed.json", kData / "two_level_x1.json", std::nullopt, false, 1.0);
  CHECK(malformed.exit_code() == ExitCode::ConfigError);
  const RunReport margin =
      verify_pair(kData / "two_level_h1.json", kData / "two_level_x1.json", 2, false, 1.0);
  CHECK(margin.exit_code() == ExitCode::ConfigError);
}

TEST_CASE("every expected bound refers to a residual its scenario computes") {
  // unitary-chain is exercised at a smaller size here; its bound names do not depend on dim
  for (const auto& s : scenario_registry()) {
    Overrides o;
    if (s.name == "unitary-chain") o["dim"] = "60";
    const RunReport r = run_scenario(s.name, o);
    INFO(s.name);
    CHECK_FALSE(r.error.has_value());
    for (const auto& b : s.expected) {
      INFO(b.residual);
      CHECK(r.residuals.count(b.residual) == 1);
    }
  }
}
