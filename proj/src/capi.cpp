#include "lagstab/lagstab.h"

#include "lagstab/commands.hpp"
#include "lagstab/error.hpp"
#include "lagstab/section4.hpp"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <optional>
#include <string>

struct lagstab_chart {
  lagstab::Chart chart;
};

struct lagstab_variation {
  lagstab::OneFormField theta;
};

namespace {

thread_local std::string last_error;

lagstab_status to_status(lagstab::ErrorCode code) {
  using lagstab::ErrorCode;
  switch (code) {
  case ErrorCode::invalid_argument: return LAGSTAB_E_INVALID_ARGUMENT;
  case ErrorCode::config: return LAGSTAB_E_CONFIG;
  case ErrorCode::domain: return LAGSTAB_E_DOMAIN;
  case ErrorCode::evaluation: return LAGSTAB_E_EVALUATION;
  case ErrorCode::immersion: return LAGSTAB_E_IMMERSION;
  case ErrorCode::precondition: return LAGSTAB_E_PRECONDITION;
  case ErrorCode::unsupported: return LAGSTAB_E_UNSUPPORTED;
  case ErrorCode::support: return LAGSTAB_E_SUPPORT;
  case ErrorCode::convergence: return LAGSTAB_E_CONVERGENCE;
  }
  return LAGSTAB_E_INTERNAL;
}

template <class F>
lagstab_status guarded(F&& f) {
  last_error.clear();
  try {
    lagstab::init_logging();
    f();
    return LAGSTAB_OK;
  } catch (const lagstab::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return LAGSTAB_E_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return LAGSTAB_E_INTERNAL;
  }
}

void require(bool cond, const char* msg) {
  if (!cond) throw lagstab::Error(lagstab::ErrorCode::invalid_argument, msg);
}

lagstab::AmbientStructure structure(const lagstab::Chart& chart, const double* T, size_t n) {
  require(T != nullptr, "T is null");
  require(n == static_cast<size_t>(chart.ambient_dim()), "T length differs from the ambient dimension");
  return lagstab::AmbientStructure::standard(chart.ambient_dim(), std::span<const double>(T, n));
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

} // namespace

extern "C" {

const char* lagstab_last_error(void) { return last_error.c_str(); }

const char* lagstab_status_name(lagstab_status status) {
  switch (status) {
  case LAGSTAB_OK: return "ok";
  case LAGSTAB_E_INVALID_ARGUMENT: return "invalid_argument";
  case LAGSTAB_E_CONFIG: return "config";
  case LAGSTAB_E_DOMAIN: return "domain";
  case LAGSTAB_E_EVALUATION: return "evaluation";
  case LAGSTAB_E_IMMERSION: return "immersion";
  case LAGSTAB_E_PRECONDITION: return "precondition";
  case LAGSTAB_E_UNSUPPORTED: return "unsupported";
  case LAGSTAB_E_SUPPORT: return "support";
  case LAGSTAB_E_CONVERGENCE: return "convergence";
  case LAGSTAB_E_INTERNAL: return "internal";
  }
  return "unknown";
}

lagstab_status lagstab_chart_builtin(const char* name, lagstab_chart** out) {
  return guarded([&] {
    require(name && out, "null argument");
    *out = new lagstab_chart{lagstab::builtin_chart(name)};
  });
}

lagstab_status lagstab_chart_from_config(const char* config_json, lagstab_chart** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    const auto cfg = lagstab::parse_config(config_json ? config_json : "");
    *out = new lagstab_chart{cfg.chart.build()};
  });
}

void lagstab_chart_free(lagstab_chart* chart) { delete chart; }

int lagstab_chart_dim(const lagstab_chart* chart) { return chart ? chart->chart.dim() : 0; }

int lagstab_chart_ambient_dim(const lagstab_chart* chart) {
  return chart ? chart->chart.ambient_dim() : 0;
}

lagstab_status lagstab_chart_eval(const lagstab_chart* chart, const double* u, size_t n,
                                  double* position, size_t capacity) {
  return guarded([&] {
    require(chart && u && position, "null argument");
    require(n == static_cast<size_t>(chart->chart.dim()), "point dimension differs from the chart");
    require(capacity >= static_cast<size_t>(chart->chart.ambient_dim()), "output too small");
    const auto p = chart->chart.position(std::span<const double>(u, n));
    for (int k = 0; k < chart->chart.ambient_dim(); ++k) position[k] = p[k];
  });
}

lagstab_status lagstab_soliton_residual(const lagstab_chart* chart, const double* T, size_t t_len,
                                        int per_axis, double* residual, double* defect) {
  return guarded([&] {
    require(chart && residual && defect, "null argument");
    require(per_axis >= 1, "per_axis must be >= 1");
    const auto s = structure(chart->chart, T, t_len);
    const auto d = lagstab::soliton_residual(chart->chart, s,
                                             lagstab::SampleGrid{chart->chart.domain(), per_axis});
    *residual = d.max_soliton_residual;
    *defect = d.max_lagrangian_defect;
  });
}

lagstab_status lagstab_variation_random(const lagstab_chart* chart, uint64_t seed, int hamiltonian,
                                        int cells, lagstab_variation** out) {
  return guarded([&] {
    require(chart && out, "null argument");
    require(cells >= 1, "cells must be >= 1");
    const auto& domain = chart->chart.domain();
    const auto support = lagstab::default_support(domain);
    *out = new lagstab_variation{
        hamiltonian
            ? lagstab::hamiltonian_variation(lagstab::random_potential(support, seed), domain, cells)
                  .with_seed(seed)
            : lagstab::random_generic_variation(support, domain, seed, cells)};
  });
}

void lagstab_variation_free(lagstab_variation* variation) { delete variation; }

lagstab_status lagstab_second_variation(const lagstab_chart* chart, const double* T, size_t t_len,
                                        const lagstab_variation* variation, int cells,
                                        int points_per_cell, int workers,
                                        lagstab_second_variation_report* out) {
  return guarded([&] {
    require(chart && variation && out, "null argument");
    require(cells >= 1 && points_per_cell >= 1 && workers >= 1, "grid sizes must be >= 1");
    const auto s = structure(chart->chart, T, t_len);
    const lagstab::QuadratureGrid grid(variation->theta.support(), cells, points_per_cell);
    lagstab::StabilityOptions opts;
    opts.workers = workers;
    const auto r = lagstab::analyze_variation(chart->chart, s, variation->theta, grid, opts);
    *out = {r.F_value,        r.first_var,  r.Fpp_operator,      r.Fpp_divergence,
            r.Fpp_square,     r.Fpp_fd,     r.scale,             r.lagrangian_defect,
            r.max_pairwise_rel_diff, r.fd_rel_diff, r.fd_unstable ? 1 : 0,
            r.closedness_warning ? 1 : 0};
  });
}

lagstab_status lagstab_dirichlet_gap(int n, double* eigenvalue, int* iterations) {
  return guarded([&] {
    require(eigenvalue && iterations, "null argument");
    const auto g = lagstab::dirichlet_gap(n);
    *eigenvalue = g.eigenvalue;
    *iterations = g.iterations;
  });
}

lagstab_status lagstab_run_command(const char* command, const char* config_json,
                                   const char* overrides_json, int* exit_code, char** report) {
  return guarded([&] {
    require(command && exit_code && report, "null argument");
    const auto r = lagstab::run_command(command, config_json ? config_json : "",
                                        overrides_json ? overrides_json : "");
    *report = copy_string(r.report);
    *exit_code = r.exit_code;
  });
}

void lagstab_string_free(char* s) { std::free(s); }

} // extern "C"
