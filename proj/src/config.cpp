#include "lagstab/config.hpp"

#include "lagstab/error.hpp"

#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <initializer_list>
#include <mutex>

namespace lagstab {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::config, msg); }

void only_keys(const json& obj, const std::string& where,
               std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) fail("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    fail(where + "." + key + " has the wrong type");
  }
}

void read_seed(const json& obj, const char* key, std::uint64_t& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0))
    fail(where + "." + key + " must be a non-negative integer");
  out = it->get<std::uint64_t>();
}

Box read_box(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || j.size() > static_cast<std::size_t>(kMaxDim))
    fail(where + " must be a list of 1.." + std::to_string(kMaxDim) + " [lo, hi] pairs");
  std::vector<Interval> axes;
  for (const auto& a : j) {
    if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
      fail(where + " entries must be [lo, hi] number pairs");
    const Interval iv{a[0].get<double>(), a[1].get<double>()};
    if (!(iv.lo < iv.hi)) fail(where + " needs lo < hi on every axis");
    axes.push_back(iv);
  }
  return Box::make(axes);
}

void positive(double v, const std::string& name) {
  if (!(v > 0.0)) fail(name + " must be positive");
}

void at_least_one(int v, const std::string& name) {
  if (v < 1) fail(name + " must be >= 1");
}

void read_chart(const json& j, ChartSpec& spec) {
  if (j.is_string()) {
    spec.name = j.get<std::string>();
    return;
  }
  only_keys(j, "chart", {"name", "variables", "domain", "components"});
  read(j, "name", spec.name, "chart");
  read(j, "variables", spec.variables, "chart");
  read(j, "components", spec.components, "chart");
  if (auto it = j.find("domain"); it != j.end()) spec.domain = read_box(*it, "chart.domain");
  if (!spec.domain || spec.variables.empty() || spec.components.empty())
    fail("expression chart needs variables, domain and components");
  if (spec.variables.size() != static_cast<std::size_t>(spec.domain->dim))
    fail("expression chart: one domain interval per variable");
}

} // namespace

Chart ChartSpec::build() const {
  if (domain) return expression_chart(name, variables, *domain, components);
  return builtin_chart(name, params);
}

std::vector<double> RunConfig::translation(const Chart& chart) const {
  const auto n = static_cast<std::size_t>(chart.ambient_dim());
  if (T.empty()) {
    std::vector<double> t(n, 0.0);
    t[0] = 1.0;
    return t;
  }
  if (T.size() != n)
    fail("T has " + std::to_string(T.size()) + " components but the chart lives in R^" +
         std::to_string(n));
  return T;
}

Box RunConfig::support_box(const Chart& chart) const {
  if (support) {
    if (support->dim != chart.dim()) fail("support dimension differs from the chart");
    return *support;
  }
  return default_support(chart.domain(), support_fraction);
}

RunConfig parse_config(std::string_view text, std::string_view overrides) {
  json j;
  try {
    j = text.empty() ? json::object() : json::parse(text);
    if (!overrides.empty()) j.merge_patch(json::parse(overrides));
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  only_keys(j, "config",
            {"chart", "chart_params", "T", "grid", "support", "support_fraction", "variation",
             "tolerances", "section4", "fd_step", "workers", "demonstrate_failure", "output"});

  RunConfig c;
  if (auto it = j.find("chart"); it != j.end()) read_chart(*it, c.chart);
  if (auto it = j.find("chart_params"); it != j.end()) {
    only_keys(*it, "chart_params", {"delta", "y_extent", "epsilon", "flat_extent"});
    auto& p = c.chart.params;
    read(*it, "delta", p.grim_reaper.delta, "chart_params");
    read(*it, "y_extent", p.grim_reaper.y_extent, "chart_params");
    read(*it, "epsilon", p.epsilon, "chart_params");
    read(*it, "flat_extent", p.flat_extent, "chart_params");
    positive(p.grim_reaper.delta, "chart_params.delta");
    positive(p.grim_reaper.y_extent, "chart_params.y_extent");
    positive(p.flat_extent, "chart_params.flat_extent");
  }
  read(j, "T", c.T, "config");
  if (auto it = j.find("grid"); it != j.end()) {
    only_keys(*it, "grid", {"cells", "points_per_cell", "sample"});
    read(*it, "cells", c.cells, "grid");
    read(*it, "points_per_cell", c.points_per_cell, "grid");
    read(*it, "sample", c.sample, "grid");
  }
  at_least_one(c.cells, "grid.cells");
  at_least_one(c.points_per_cell, "grid.points_per_cell");
  at_least_one(c.sample, "grid.sample");
  if (auto it = j.find("support"); it != j.end()) c.support = read_box(*it, "support");
  read(j, "support_fraction", c.support_fraction, "config");
  if (!(c.support_fraction > 0.0 && c.support_fraction < 0.5))
    fail("support_fraction must lie in (0, 1/2)");

  if (auto it = j.find("variation"); it != j.end()) {
    only_keys(*it, "variation", {"mode", "kind", "count", "seed", "potential", "components"});
    auto& v = c.variation;
    std::string mode = "random", kind = "hamiltonian";
    read(*it, "mode", mode, "variation");
    read(*it, "kind", kind, "variation");
    read(*it, "count", v.count, "variation");
    read_seed(*it, "seed", v.seed, "variation");
    read(*it, "potential", v.potential, "variation");
    read(*it, "components", v.components, "variation");
    if (mode == "random") v.mode = VariationMode::random;
    else if (mode == "potential") v.mode = VariationMode::potential;
    else if (mode == "components") v.mode = VariationMode::components;
    else if (mode == "zero") v.mode = VariationMode::zero;
    else fail("variation.mode must be random, potential, components or zero");
    if (kind == "hamiltonian") v.kind = FormKind::hamiltonian;
    else if (kind == "generic") v.kind = FormKind::generic;
    else fail("variation.kind must be hamiltonian or generic");
    if (v.mode == VariationMode::potential && v.potential.empty())
      fail("variation.potential is required in potential mode");
    if (v.mode == VariationMode::components && v.components.empty())
      fail("variation.components is required in components mode");
  }
  at_least_one(c.variation.count, "variation.count");

  if (auto it = j.find("tolerances"); it != j.end()) {
    only_keys(*it, "tolerances",
              {"soliton", "lagrangian", "geometry", "precondition", "agreement", "fd_agreement",
               "positivity", "failure_gap", "closedness", "dirichlet"});
    auto& t = c.tolerances;
    read(*it, "soliton", t.soliton, "tolerances");
    read(*it, "lagrangian", t.lagrangian, "tolerances");
    read(*it, "geometry", t.geometry, "tolerances");
    read(*it, "precondition", t.precondition, "tolerances");
    read(*it, "agreement", t.agreement, "tolerances");
    read(*it, "fd_agreement", t.fd_agreement, "tolerances");
    read(*it, "positivity", t.positivity, "tolerances");
    read(*it, "failure_gap", t.failure_gap, "tolerances");
    read(*it, "closedness", t.closedness, "tolerances");
    read(*it, "dirichlet", t.dirichlet, "tolerances");
  }
  {
    const auto& t = c.tolerances;
    for (auto [v, name] : {std::pair{t.soliton, "soliton"}, {t.lagrangian, "lagrangian"},
                           {t.geometry, "geometry"}, {t.precondition, "precondition"},
                           {t.agreement, "agreement"}, {t.fd_agreement, "fd_agreement"},
                           {t.positivity, "positivity"}, {t.failure_gap, "failure_gap"},
                           {t.closedness, "closedness"}, {t.dirichlet, "dirichlet"}})
      positive(v, std::string("tolerances.") + name);
  }

  if (auto it = j.find("section4"); it != j.end()) {
    only_keys(*it, "section4", {"dirichlet_n", "dirichlet_shift", "pairs", "seed"});
    read(*it, "dirichlet_n", c.section4.dirichlet_n, "section4");
    read(*it, "dirichlet_shift", c.section4.dirichlet_shift, "section4");
    read(*it, "pairs", c.section4.pairs, "section4");
    read_seed(*it, "seed", c.section4.seed, "section4");
  }
  if (c.section4.dirichlet_n < 100) fail("section4.dirichlet_n must be >= 100");
  at_least_one(c.section4.pairs, "section4.pairs");

  read(j, "fd_step", c.fd_step, "config");
  positive(c.fd_step, "fd_step");
  read(j, "workers", c.workers, "config");
  at_least_one(c.workers, "workers");
  read(j, "demonstrate_failure", c.demonstrate_failure, "config");

  if (auto it = j.find("output"); it != j.end()) {
    only_keys(*it, "output", {"path", "format"});
    std::string format = "json";
    read(*it, "path", c.output_path, "output");
    read(*it, "format", format, "output");
    if (format == "json") c.format = OutputFormat::json;
    else if (format == "csv") c.format = OutputFormat::csv;
    else fail("output.format must be json or csv");
  }
  return c;
}

void init_logging() {
  static std::once_flag once;
  std::call_once(once, [] {
    auto logger = spdlog::stderr_color_mt("lagstab");
    spdlog::set_default_logger(logger);
    spdlog::level::level_enum level = spdlog::level::warn;
    if (const char* env = std::getenv("SOLITON_STABILITY_LOG"); env && *env) {
      level = spdlog::level::from_str(env);
      // from_str maps unknown names to off; keep the default instead
      if (level == spdlog::level::off && std::string(env) != "off") level = spdlog::level::warn;
    }
    spdlog::set_level(level);
  });
}

} // namespace lagstab
