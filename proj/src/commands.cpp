#include "lagstab/commands.hpp"

#include "lagstab/error.hpp"
#include "lagstab/section4.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <charconv>
#include <cmath>
#include <numbers>

namespace lagstab {

using ojson = nlohmann::ordered_json;

namespace {

ojson box_json(const Box& b) {
  ojson out = ojson::array();
  for (int i = 0; i < b.dim; ++i) out.push_back({b.axes[i].lo, b.axes[i].hi});
  return out;
}

// JSON has no infinities or NaN; keep them visible as strings.
ojson number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

ojson diagnostics_object(const DiagnosticsReport& r) {
  ojson out;
  out["chart"] = r.chart;
  out["grid"] = r.grid.describe();
  out["max_soliton_residual"] = number(r.max_soliton_residual);
  out["max_lagrangian_defect"] = number(r.max_lagrangian_defect);
  return out;
}

ojson variation_object(const VariationReport& r) {
  ojson out;
  out["chart"] = r.chart;
  out["description"] = r.description;
  out["kind"] = to_string(r.kind);
  out["seed"] = r.seed ? ojson(*r.seed) : ojson(nullptr);
  out["support"] = box_json(r.box);
  out["cells"] = r.cells;
  out["points_per_cell"] = r.points_per_cell;
  out["F"] = number(r.F_value);
  out["first_variation"] = number(r.first_var);
  out["Fpp_operator"] = number(r.Fpp_operator);
  out["Fpp_divergence"] = number(r.Fpp_divergence);
  out["Fpp_square"] = number(r.Fpp_square);
  out["Fpp_fd"] = number(r.Fpp_fd);
  out["Fpp_fd_level1"] = number(r.Fpp_fd_level1);
  out["fd_unstable"] = r.fd_unstable;
  out["scale"] = number(r.scale);
  out["lagrangian_defect"] = number(r.lagrangian_defect);
  out["ibp_div_lhs"] = number(r.terms.lhs36);
  out["ibp_div_rhs"] = number(r.terms.rhs36);
  out["ibp_drift_lhs"] = number(r.terms.lhs37);
  out["ibp_drift_rhs"] = number(r.terms.rhs37);
  out["max_pairwise_rel_diff"] = number(r.max_pairwise_rel_diff);
  out["fd_rel_diff"] = number(r.fd_rel_diff);
  out["closedness_warning"] = r.closedness_warning;
  return out;
}

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

ojson check(bool pass, double value, double limit) {
  ojson c;
  c["value"] = number(value);
  c["limit"] = number(limit);
  c["pass"] = pass;
  return c;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

const AmbientStructure structure_for(const RunConfig& cfg, const Chart& chart) {
  const auto T = cfg.translation(chart);
  return AmbientStructure::standard(chart.ambient_dim(), T);
}

ojson tolerances_json(const Tolerances& t) {
  ojson j;
  j["soliton"] = t.soliton;
  j["lagrangian"] = t.lagrangian;
  j["geometry"] = t.geometry;
  j["precondition"] = t.precondition;
  j["agreement"] = t.agreement;
  j["fd_agreement"] = t.fd_agreement;
  j["positivity"] = t.positivity;
  j["failure_gap"] = t.failure_gap;
  j["closedness"] = t.closedness;
  j["dirichlet"] = t.dirichlet;
  return j;
}

std::vector<OneFormField> build_variations(const RunConfig& cfg, const Chart& chart,
                                           const Box& support) {
  const auto& v = cfg.variation;
  std::vector<OneFormField> out;
  switch (v.mode) {
  case VariationMode::zero:
    check_support(support, chart.domain(), cfg.cells);
    out.push_back(zero_variation(support));
    break;
  case VariationMode::potential: {
    if (cfg.demonstrate_failure)
      throw Error(ErrorCode::config, "demonstrate_failure needs random generic variations");
    std::vector<std::string> vars = cfg.chart.variables;
    if (vars.empty()) vars = {"x", "y", "z"};
    vars.resize(static_cast<std::size_t>(chart.dim()));
    out.push_back(hamiltonian_variation(expression_potential(v.potential, vars, support),
                                        chart.domain(), cfg.cells));
    break;
  }
  case VariationMode::components: {
    std::vector<std::string> vars = cfg.chart.variables;
    if (vars.empty()) vars = {"x", "y", "z"};
    vars.resize(static_cast<std::size_t>(chart.dim()));
    out.push_back(expression_variation(v.components, vars, support, chart.domain(), cfg.cells));
    break;
  }
  case VariationMode::random: {
    const bool generic = cfg.demonstrate_failure || v.kind == FormKind::generic;
    for (int i = 0; i < v.count; ++i) {
      const std::uint64_t seed = v.seed + static_cast<std::uint64_t>(i);
      out.push_back(generic ? random_generic_variation(support, chart.domain(), seed, cfg.cells)
                            : hamiltonian_variation(random_potential(support, seed),
                                                    chart.domain(), cfg.cells)
                                  .with_seed(seed));
    }
    break;
  }
  }
  return out;
}

CommandResult error_result(std::string_view command, const Error& e, int exit_code) {
  ojson j;
  j["command"] = std::string(command);
  j["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
  return {exit_code, dump(j)};
}

} // namespace

std::string to_json(const DiagnosticsReport& report) { return dump(diagnostics_object(report)); }
std::string to_json(const VariationReport& report) { return dump(variation_object(report)); }

std::string to_csv(std::span<const VariationReport> reports) {
  std::string out =
      "chart,seed,defect,Fpp_operator,Fpp_divergence,Fpp_square,Fpp_fd,max_pairwise_rel_diff\n";
  for (const auto& r : reports) {
    out += r.chart + "," + (r.seed ? std::to_string(*r.seed) : std::string()) + "," +
           shortest(r.lagrangian_defect) + "," + shortest(r.Fpp_operator) + "," +
           shortest(r.Fpp_divergence) + "," + shortest(r.Fpp_square) + "," +
           shortest(r.Fpp_fd) + "," + shortest(r.max_pairwise_rel_diff) + "\n";
  }
  return out;
}

CommandResult cmd_verify_soliton(const RunConfig& cfg) {
  const Chart chart = cfg.chart.build();
  const AmbientStructure s = structure_for(cfg, chart);
  const SampleGrid grid{chart.domain(), cfg.sample};
  const DiagnosticsReport d = soliton_residual(chart, s, grid);
  const auto& t = cfg.tolerances;
  const bool residual_ok = d.max_soliton_residual <= t.soliton;
  const bool defect_ok = d.max_lagrangian_defect <= t.lagrangian;

  if (cfg.format == OutputFormat::csv) {
    std::string out = "chart,grid,max_soliton_residual,max_lagrangian_defect,passed\n";
    out += d.chart + ",\"" + grid.describe() + "\"," + shortest(d.max_soliton_residual) + "," +
           shortest(d.max_lagrangian_defect) + "," + (residual_ok && defect_ok ? "1" : "0") + "\n";
    return {residual_ok && defect_ok ? exit_pass : exit_check_failed, out};
  }
  ojson j;
  j["command"] = "verify-soliton";
  j["T"] = cfg.translation(chart);
  j["diagnostics"] = diagnostics_object(d);
  j["checks"]["soliton_residual"] = check(residual_ok, d.max_soliton_residual, t.soliton);
  j["checks"]["lagrangian_defect"] = check(defect_ok, d.max_lagrangian_defect, t.lagrangian);
  j["passed"] = residual_ok && defect_ok;
  return {residual_ok && defect_ok ? exit_pass : exit_check_failed, dump(j)};
}

CommandResult cmd_second_variation(const RunConfig& cfg) {
  const Chart chart = cfg.chart.build();
  const AmbientStructure s = structure_for(cfg, chart);
  const Box support = cfg.support_box(chart);
  const auto variations = build_variations(cfg, chart, support);
  const QuadratureGrid grid(support, cfg.cells, cfg.points_per_cell);

  StabilityOptions opts;
  opts.workers = cfg.workers;
  opts.soliton_tolerance = cfg.tolerances.precondition;
  opts.closedness_tolerance = cfg.tolerances.closedness;
  opts.fd_step = cfg.fd_step;
  opts.fd_tolerance = cfg.tolerances.fd_agreement;

  const auto& t = cfg.tolerances;
  std::vector<VariationReport> reports;
  ojson rows = ojson::array();
  int failures = 0;
  for (const auto& theta : variations) {
    VariationReport r = analyze_variation(chart, s, theta, grid, opts);
    ojson row = variation_object(r);
    ojson checks;
    bool ok = true;
    auto add = [&](const char* name, bool pass, double value, double limit) {
      checks[name] = check(pass, value, limit);
      ok = ok && pass;
    };
    const double square_gap = relative_difference(r.Fpp_square, r.Fpp_operator, r.scale);
    row["square_gap"] = number(square_gap);
    if (cfg.demonstrate_failure) {
      // operator, divergence and the oracle still agree; only the square
      // route, which needs d(theta) = 0, may break away
      add("operator_vs_divergence",
          relative_difference(r.Fpp_operator, r.Fpp_divergence, r.scale) <= t.agreement,
          relative_difference(r.Fpp_operator, r.Fpp_divergence, r.scale), t.agreement);
      add("operator_vs_fd",
          !r.fd_unstable &&
              relative_difference(r.Fpp_operator, r.Fpp_fd, r.scale) <= t.fd_agreement,
          relative_difference(r.Fpp_operator, r.Fpp_fd, r.scale), t.fd_agreement);
      add("square_gap", square_gap > t.failure_gap, square_gap, t.failure_gap);
    } else {
      add("pairwise_agreement", r.max_pairwise_rel_diff <= t.agreement, r.max_pairwise_rel_diff,
          t.agreement);
      add("fd_agreement", !r.fd_unstable && r.fd_rel_diff <= t.fd_agreement, r.fd_rel_diff,
          t.fd_agreement);
      add("operator_positivity", r.Fpp_operator >= -t.positivity * r.scale, r.Fpp_operator,
          -t.positivity * r.scale);
      add("square_nonnegative", r.Fpp_square >= 0.0, r.Fpp_square, 0.0);
    }
    row["checks"] = checks;
    row["passed"] = ok;
    if (!ok) ++failures;
    rows.push_back(std::move(row));
    reports.push_back(std::move(r));
  }

  const int code = failures == 0 ? exit_pass : exit_check_failed;
  if (cfg.format == OutputFormat::csv) return {code, to_csv(reports)};

  ojson j;
  j["command"] = "second-variation";
  j["chart"] = chart.name();
  j["T"] = cfg.translation(chart);
  j["mode"] = cfg.demonstrate_failure ? "demonstrate-failure" : "standard";
  j["grid"] = {{"cells", cfg.cells}, {"points_per_cell", cfg.points_per_cell}};
  j["support"] = box_json(support);
  j["tolerances"] = tolerances_json(t);
  j["reports"] = std::move(rows);
  j["summary"] = {{"count", static_cast<int>(reports.size())},
                  {"failures", failures},
                  {"passed", failures == 0}};
  return {code, dump(j)};
}

CommandResult cmd_section4(const RunConfig& cfg) {
  if (cfg.chart.domain || (cfg.chart.name != "grim_reaper" &&
                           cfg.chart.name != "grim_reaper_cylinder"))
    throw Error(ErrorCode::config, "section4 runs on the grim_reaper chart only");
  const Chart chart = builtin_chart("grim_reaper", cfg.chart.params);
  const AmbientStructure s = structure_for(cfg, chart);
  if (s.T[0] != 1.0 || s.T[1] != 0.0 || s.T[2] != 0.0 || s.T[3] != 0.0)
    throw Error(ErrorCode::config, "section4 uses T = (1, 0, 0, 0)");
  const auto& t = cfg.tolerances;
  const SampleGrid sample{chart.domain(), cfg.sample};

  ojson checks;
  bool ok = true;
  auto add = [&](const std::string& name, bool pass, double value, double limit) {
    checks[name] = check(pass, value, limit);
    ok = ok && pass;
  };

  const ClosedFormErrors cf = grim_reaper_closed_form_errors(chart, sample);
  ojson closed;
  closed["metric"] = cf.metric;
  closed["metric_inverse"] = cf.metric_inverse;
  closed["area_density"] = cf.area_density;
  closed["second_fundamental_form"] = cf.second_fundamental_form;
  closed["mean_curvature_norm"] = cf.mean_curvature_norm;
  closed["mean_curvature_vector"] = cf.mean_curvature_vector;
  closed["weight"] = cf.weight;
  closed["normal_frame"] = cf.normal_frame;
  add("closed_forms", cf.max() <= t.geometry, cf.max(), t.geometry);

  const DiagnosticsReport d = soliton_residual(chart, s, sample);
  add("soliton_residual", d.max_soliton_residual <= t.soliton, d.max_soliton_residual,
      t.soliton);
  add("lagrangian_defect", d.max_lagrangian_defect <= t.lagrangian, d.max_lagrangian_defect,
      t.lagrangian);

  const Box support = cfg.support_box(chart);
  Box strip = chart.domain();
  strip.axes[0] = {-std::numbers::pi / 2, std::numbers::pi / 2};
  ojson pairs = ojson::array();
  std::size_t violations = 0;
  double worst_gap = std::numeric_limits<double>::infinity();
  double worst_route = 0.0;
  const QuadratureGrid grid(support, cfg.cells, cfg.points_per_cell);
  StabilityOptions opts;
  opts.workers = cfg.workers;
  opts.soliton_tolerance = t.precondition;
  for (int i = 0; i < cfg.section4.pairs; ++i) {
    const std::uint64_t seed = cfg.section4.seed + static_cast<std::uint64_t>(i);
    const RandomPair p = random_section4_pair(support, seed);
    const Section4Integrals r =
        grim_reaper_section4_suite(p.v3, p.v4, strip, cfg.cells, cfg.points_per_cell);
    ojson row;
    row["seed"] = seed;
    row["curvature_integral"] = r.curvature_integral;
    row["gradient_integral"] = r.gradient_integral;
    row["wirtinger_lhs"] = r.wirtinger_lhs;
    row["wirtinger_rhs"] = r.wirtinger_rhs;
    row["slices"] = r.slices;
    row["slice_violations"] = r.slice_violations;
    row["min_slice_margin"] = r.min_slice_margin;
    // the same quadratic form through the general second-variation code
    const OneFormField theta = grim_reaper_form_from_components(p.v3, p.v4);
    const double fpp = second_variation_divergence(chart, s, theta, grid, opts);
    const double expected = r.gradient_integral - r.curvature_integral;
    const double rel = relative_difference(fpp, expected, r.gradient_integral + r.curvature_integral);
    row["Fpp_divergence"] = fpp;
    row["route_rel_diff"] = rel;
    worst_route = std::max(worst_route, rel);
    pairs.push_back(std::move(row));
    violations += r.slice_violations;
    worst_gap = std::min(worst_gap, r.gradient_integral - r.curvature_integral);
  }
  add("curvature_le_gradient", worst_gap >= 0.0, worst_gap, 0.0);
  add("wirtinger_slices", violations == 0, static_cast<double>(violations), 0.0);
  add("divergence_route_matches", worst_route <= t.agreement, worst_route, t.agreement);

  const DirichletGap gap = dirichlet_gap(cfg.section4.dirichlet_n, cfg.section4.dirichlet_shift);
  add("dirichlet_gap", std::abs(gap.eigenvalue - 1.0) <= t.dirichlet,
      std::abs(gap.eigenvalue - 1.0), t.dirichlet);

  if (cfg.format == OutputFormat::csv) {
    std::string out = "check,value,limit,pass\n";
    for (const auto& [name, c] : checks.items())
      out += name + "," + shortest(c["value"].get<double>()) + "," +
             shortest(c["limit"].get<double>()) + "," + (c["pass"].get<bool>() ? "1" : "0") +
             "\n";
    return {ok ? exit_pass : exit_check_failed, out};
  }

  ojson j;
  j["command"] = "section4";
  j["chart"] = chart.name();
  j["closed_form_errors"] = closed;
  j["diagnostics"] = diagnostics_object(d);
  j["support"] = box_json(support);
  j["pairs"] = std::move(pairs);
  j["dirichlet"] = {{"n", cfg.section4.dirichlet_n},
                    {"eigenvalue", gap.eigenvalue},
                    {"iterations", gap.iterations},
                    {"eigenvector_angle", gap.eigenvector_angle}};
  j["tolerances"] = tolerances_json(t);
  j["checks"] = checks;
  j["passed"] = ok;
  return {ok ? exit_pass : exit_check_failed, dump(j)};
}

CommandResult run_command(std::string_view command, std::string_view config_text,
                          std::string_view overrides) {
  init_logging();
  try {
    const RunConfig cfg = parse_config(config_text, overrides);
    if (command == "verify-soliton") return cmd_verify_soliton(cfg);
    if (command == "second-variation") return cmd_second_variation(cfg);
    if (command == "section4") return cmd_section4(cfg);
    throw Error(ErrorCode::config, "unknown command '" + std::string(command) + "'");
  } catch (const Error& e) {
    spdlog::error("{}: {}", to_string(e.code()), e.what());
    switch (e.code()) {
    case ErrorCode::config:
    case ErrorCode::support:
    case ErrorCode::domain:
    case ErrorCode::invalid_argument:
      return error_result(command, e, exit_config_error);
    case ErrorCode::precondition:
      return error_result(command, e, exit_precondition);
    default:
      return error_result(command, e, exit_check_failed);
    }
  }
}

} // namespace lagstab
