#ifndef LAGSTAB_CONFIG_HPP
#define LAGSTAB_CONFIG_HPP

#include "lagstab/chart.hpp"
#include "lagstab/variations.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lagstab {

// Run configuration. Every field has a default, so "{}" is a valid config.
// JSON schema (all keys optional):
//
//   {
//     "chart": "grim_reaper" | "flat_plane" | "perturbed_grim_reaper" | "non_lagrangian"
//            | {"name": str, "variables": [str, ...],
//               "domain": [[lo, hi], ...], "components": [expr, ...]},
//     "chart_params": {"delta": 0.1, "y_extent": 3.0, "epsilon": 0.05, "flat_extent": 2.0},
//     "T": [1, 0, 0, 0],                       // length = ambient dimension
//     "grid": {"cells": 40, "points_per_cell": 8, "sample": 50},
//     "support": [[lo, hi], ...],              // default: domain inset by support_fraction
//     "support_fraction": 0.075,
//     "variation": {"mode": "random" | "potential" | "components" | "zero",
//                   "kind": "hamiltonian" | "generic",   // random mode only
//                   "count": 20, "seed": 1,
//                   "potential": expr, "components": [expr, ...]},
//     "tolerances": {"soliton": 1e-10, "lagrangian": 1e-12, "geometry": 1e-10,
//                    "precondition": 1e-8, "agreement": 1e-6, "fd_agreement": 1e-4,
//                    "positivity": 1e-6, "failure_gap": 1e-2, "closedness": 1e-9,
//                    "dirichlet": 1e-3},
//     "section4": {"dirichlet_n": 2000, "dirichlet_shift": 0.5, "pairs": 10, "seed": 1},
//     "fd_step": 1e-3,
//     "workers": 1,
//     "demonstrate_failure": false,
//     "output": {"path": "", "format": "json" | "csv"}
//   }
//
// Expressions use the grammar of expression.hpp over the chart variables
// (builtin charts: x, y).

struct ChartSpec {
  std::string name = "grim_reaper";
  // set for expression charts
  std::vector<std::string> variables;
  std::vector<std::string> components;
  std::optional<Box> domain;
  BuiltinOptions params{};

  Chart build() const;
};

enum class VariationMode { random, potential, components, zero };

struct VariationSpec {
  VariationMode mode = VariationMode::random;
  FormKind kind = FormKind::hamiltonian;
  int count = 20;
  std::uint64_t seed = 1;
  std::string potential;
  std::vector<std::string> components;
};

struct Tolerances {
  double soliton = 1e-10;
  double lagrangian = 1e-12;
  double geometry = 1e-10;
  double precondition = 1e-8;
  double agreement = 1e-6;
  double fd_agreement = 1e-4;
  double positivity = 1e-6;
  double failure_gap = 1e-2;
  double closedness = 1e-9;
  double dirichlet = 1e-3;
};

struct Section4Spec {
  int dirichlet_n = 2000;
  double dirichlet_shift = 0.5;
  int pairs = 10;
  std::uint64_t seed = 1;
};

enum class OutputFormat { json, csv };

struct RunConfig {
  ChartSpec chart;
  std::vector<double> T; // empty: (1, 0, ..., 0)
  int cells = 40;
  int points_per_cell = 8;
  int sample = 50;
  std::optional<Box> support;
  double support_fraction = 0.075;
  VariationSpec variation;
  Tolerances tolerances;
  Section4Spec section4;
  double fd_step = 1e-3;
  int workers = 1;
  bool demonstrate_failure = false;
  std::string output_path;
  OutputFormat format = OutputFormat::json;

  // T padded to the ambient dimension of `chart`; ErrorCode::config on a
  // length mismatch.
  std::vector<double> translation(const Chart& chart) const;
  Box support_box(const Chart& chart) const;
};

// Parses `text`, then applies `overrides` (both JSON objects; overrides are an
// RFC 7386 merge patch). Throws ErrorCode::config on malformed input, unknown
// keys or values violating the invariants (positive tolerances, sizes >= 1).
RunConfig parse_config(std::string_view text, std::string_view overrides = {});

// Reads SOLITON_STABILITY_LOG (trace, debug, info, warn, error, off) once and
// routes log output to stderr. Default level: warn.
void init_logging();

} // namespace lagstab

#endif
