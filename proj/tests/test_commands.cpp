#include "lagstab/commands.hpp"
#include "lagstab/error.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>

using namespace lagstab;
using nlohmann::json;

namespace {

ErrorCode config_error(const char* text) {
  try {
    (void)parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::invalid_argument;
}

} // namespace

TEST_CASE("empty config carries every default") {
  const RunConfig c = parse_config("{}");
  CHECK(c.chart.name == "grim_reaper");
  CHECK(c.cells == 40);
  CHECK(c.points_per_cell == 8);
  CHECK(c.sample == 50);
  CHECK(c.variation.count == 20);
  CHECK(c.workers == 1);
  CHECK(c.tolerances.agreement == 1e-6);
  CHECK(c.section4.dirichlet_n == 2000);
  const Chart gr = c.chart.build();
  CHECK(c.translation(gr) == std::vector<double>{1, 0, 0, 0});
  CHECK(parse_config("").chart.name == "grim_reaper");
}

TEST_CASE("overrides are merged over the config") {
  const RunConfig c = parse_config(R"({"variation": {"seed": 3, "count": 5}})",
                                   R"({"variation": {"count": 2}, "workers": 2})");
  CHECK(c.variation.seed == 3);
  CHECK(c.variation.count == 2);
  CHECK(c.workers == 2);
}

TEST_CASE("invalid configs are configuration errors") {
  CHECK(config_error("{") == ErrorCode::config);
  CHECK(config_error(R"({"chartt": "grim_reaper"})") == ErrorCode::config);
  CHECK(config_error(R"({"tolerances": {"agreement": -1}})") == ErrorCode::config);
  CHECK(config_error(R"({"tolerances": {"agreement": 0}})") == ErrorCode::config);
  CHECK(config_error(R"({"grid": {"cells": 0}})") == ErrorCode::config);
  CHECK(config_error(R"({"variation": {"mode": "bogus"}})") == ErrorCode::config);
  CHECK(config_error(R"({"variation": {"seed": -4}})") == ErrorCode::config);
  CHECK(config_error(R"({"variation": {"mode": "potential"}})") == ErrorCode::config);
  CHECK(config_error(R"({"support_fraction": 0.7})") == ErrorCode::config);
  CHECK(config_error(R"({"workers": "many"})") == ErrorCode::config);
  CHECK(config_error(R"({"chart": {"name": "c", "variables": ["x"]}})") == ErrorCode::config);
  CHECK(config_error(R"({"output": {"format": "xml"}})") == ErrorCode::config);
}

TEST_CASE("expression charts from config") {
  const RunConfig c = parse_config(R"j({
    "chart": {"name": "gr_expr", "variables": ["x", "y"],
              "domain": [[-1.4, 1.4], [-2, 2]],
              "components": ["-log(cos(x))", "x", "y", "0"]}})j");
  const CommandResult r = cmd_verify_soliton(c);
  CHECK(r.exit_code == exit_pass);
  CHECK(json::parse(r.report)["diagnostics"]["chart"] == "gr_expr");
}

TEST_CASE("verify-soliton exit codes and report fields") {
  const CommandResult ok = run_command("verify-soliton", "{}");
  CHECK(ok.exit_code == exit_pass);
  const json j = json::parse(ok.report);
  for (const char* key : {"chart", "grid", "max_soliton_residual", "max_lagrangian_defect"})
    CHECK(j["diagnostics"].contains(key));

  CHECK(run_command("verify-soliton", R"({"chart": "flat_plane"})").exit_code == exit_pass);

  const CommandResult bad = run_command("verify-soliton", R"({"chart": "perturbed_grim_reaper"})");
  CHECK(bad.exit_code == exit_check_failed);
  CHECK(json::parse(bad.report)["diagnostics"]["max_soliton_residual"].get<double>() > 1e-3);

  CHECK(run_command("verify-soliton", R"({"chart": "non_lagrangian"})").exit_code ==
        exit_check_failed);
  CHECK(run_command("verify-soliton", R"({"chart": "nope"})").exit_code == exit_config_error);
  CHECK(run_command("verify-soliton", R"({"T": [1, 0]})").exit_code == exit_config_error);
  CHECK(run_command("bogus-command", "{}").exit_code == exit_config_error);
}

TEST_CASE("second-variation command") {
  const CommandResult r = run_command("second-variation", R"({"variation": {"count": 3}})");
  CHECK(r.exit_code == exit_pass);
  const json j = json::parse(r.report);
  REQUIRE(j["reports"].size() == 3);
  for (const auto& rep : j["reports"]) {
    CHECK(rep["Fpp_square"].get<double>() >= 0.0);
    CHECK(rep["passed"].get<bool>());
  }
  CHECK(j["reports"][0]["seed"] == 1);

  const CommandResult z = run_command("second-variation", R"({"variation": {"mode": "zero"}})");
  CHECK(z.exit_code == exit_pass);
  const json zj = json::parse(z.report)["reports"][0];
  for (const char* key : {"Fpp_operator", "Fpp_divergence", "Fpp_square", "Fpp_fd"})
    CHECK(zj[key].get<double>() == 0.0);

  // a non-closed variation in the standard mode fails the agreement check
  const CommandResult g = run_command(
      "second-variation", R"({"variation": {"kind": "generic", "count": 1, "seed": 7}})");
  CHECK(g.exit_code == exit_check_failed);

  const CommandResult demo =
      run_command("second-variation", R"({"demonstrate_failure": true,
                                          "variation": {"count": 1, "seed": 7}})");
  CHECK(demo.exit_code == exit_pass);
  CHECK(json::parse(demo.report)["reports"][0]["square_gap"].get<double>() > 1e-2);

  const CommandResult pre =
      run_command("second-variation", R"({"chart": "perturbed_grim_reaper",
                                          "variation": {"count": 1}})");
  CHECK(pre.exit_code == exit_precondition);
  CHECK(json::parse(pre.report)["error"]["code"] == "precondition");

  const CommandResult pot = run_command(
      "second-variation", R"j({"variation": {"mode": "potential", "potential": "x*y + sin(y)"}})j");
  CHECK(pot.exit_code == exit_pass);
}

TEST_CASE("CSV output") {
  const CommandResult r = run_command("second-variation",
                                      R"({"variation": {"count": 2}, "output": {"format": "csv"}})");
  CHECK(r.exit_code == exit_pass);
  CHECK(r.report.rfind(
            "chart,seed,defect,Fpp_operator,Fpp_divergence,Fpp_square,Fpp_fd,"
            "max_pairwise_rel_diff\n",
            0) == 0);
  CHECK(std::count(r.report.begin(), r.report.end(), '\n') == 3);
}

TEST_CASE("identical runs are byte-identical") {
  const char* cfg = R"({"variation": {"count": 2, "seed": 42}})";
  CHECK(run_command("second-variation", cfg).report ==
        run_command("second-variation", cfg).report);
}

TEST_CASE("section4 command") {
  const char* quick = R"({"section4": {"pairs": 2, "dirichlet_n": 400}, "tolerances": {"dirichlet": 1e-2}})";
  const CommandResult ok = run_command("section4", quick);
  CHECK(ok.exit_code == exit_pass);
  const json j = json::parse(ok.report);
  CHECK(j["passed"].get<bool>());
  CHECK(j["pairs"].size() == 2);

  // a 1e-14 budget is below the discretization error of the eigenvalue
  const CommandResult tight = run_command(
      "section4", R"({"section4": {"pairs": 1}, "tolerances": {"geometry": 1e-14, "dirichlet": 1e-14}})");
  CHECK(tight.exit_code == exit_check_failed);
  CHECK_FALSE(json::parse(tight.report)["checks"]["dirichlet_gap"]["pass"].get<bool>());

  CHECK(run_command("section4", R"({"chart": "flat_plane"})").exit_code == exit_config_error);
}
