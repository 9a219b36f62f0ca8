#ifndef LAGSTAB_STABILITY_HPP
#define LAGSTAB_STABILITY_HPP

#include "lagstab/quadrature.hpp"
#include "lagstab/variations.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace lagstab {

struct StabilityOptions {
  int workers = 1;
  // second-variation routes refuse charts whose residual |T^perp - H| on the
  // support exceeds this
  double soliton_tolerance = 1e-8;
  int precondition_samples = 8;
  // square route warns above this d(theta) defect
  double closedness_tolerance = 1e-9;
  // finite-difference oracle steps h and 2h
  double fd_step = 1e-3;
  double fd_tolerance = 1e-4;
};

// Central-difference estimate with one Richardson level.
struct FdEstimate {
  double value = 0.0;   // Richardson-extrapolated
  double level1 = 0.0;  // plain central difference at step h
  bool unstable = false;
};

struct Theorem33Terms {
  double lhs36 = 0.0; // -int <theta, d div theta> e^f
  double rhs36 = 0.0; // int [(div)^2 + div * theta(T^top)] e^f
  double lhs37 = 0.0; // -int (nabla_{T^top} theta)(theta^sharp) e^f
  double rhs37 = 0.0; // int [div * theta(T^top) + H_p h_pij V_i V_j + theta(T^top)^2] e^f
};

struct VariationReport {
  std::string chart;
  std::string description;
  FormKind kind = FormKind::generic;
  std::optional<std::uint64_t> seed;
  Box box;
  int cells = 0;
  int points_per_cell = 0;

  double F_value = 0.0;
  double first_var = 0.0;
  double Fpp_operator = 0.0;
  double Fpp_divergence = 0.0;
  double Fpp_square = 0.0;
  double Fpp_fd = 0.0;
  double Fpp_fd_level1 = 0.0;
  bool fd_unstable = false;
  double scale = 0.0;
  double lagrangian_defect = 0.0;
  Theorem33Terms terms;

  // max pairwise |a - b| / scale over {operator, divergence, square}
  double max_pairwise_rel_diff = 0.0;
  // max |route - fd| / scale over the analytic routes
  double fd_rel_diff = 0.0;
  bool closedness_warning = false;
};

// |a - b| / scale, with 0/0 = 0.
double relative_difference(double a, double b, double scale);

// Box-local weighted area int e^{<T, Phi>} sqrt(det g) du.
double functional_value(const Chart& chart, const AmbientStructure& s,
                        const QuadratureGrid& grid, int workers = 1);

// Throws ErrorCode::precondition when |T^perp - H| exceeds the tolerance
// somewhere on a sample of the box.
void require_soliton(const Chart& chart, const AmbientStructure& s, const Box& box,
                     const StabilityOptions& options);

double first_variation(const Chart& chart, const AmbientStructure& s,
                       const OneFormField& theta, const QuadratureGrid& grid,
                       const StabilityOptions& options = {});
// d/ds of the box-local F along Phi + s V; valid on any Lagrangian chart.
FdEstimate first_variation_fd(const Chart& chart, const AmbientStructure& s,
                              const OneFormField& theta, const QuadratureGrid& grid,
                              const StabilityOptions& options = {});

double second_variation_operator(const Chart& chart, const AmbientStructure& s,
                                 const OneFormField& theta, const QuadratureGrid& grid,
                                 const StabilityOptions& options = {});
double second_variation_divergence(const Chart& chart, const AmbientStructure& s,
                                   const OneFormField& theta, const QuadratureGrid& grid,
                                   const StabilityOptions& options = {});

struct SquareRoute {
  double value = 0.0;
  double lagrangian_defect = 0.0;
  bool closedness_warning = false;
};
SquareRoute second_variation_square(const Chart& chart, const AmbientStructure& s,
                                    const OneFormField& theta, const QuadratureGrid& grid,
                                    const StabilityOptions& options = {});

// Second difference of s -> F(Phi + s V), valid only at critical points.
FdEstimate second_variation_fd_oracle(const Chart& chart, const AmbientStructure& s,
                                      const OneFormField& theta, const QuadratureGrid& grid,
                                      const StabilityOptions& options = {});

Theorem33Terms theorem33_term_report(const Chart& chart, const AmbientStructure& s,
                                     const OneFormField& theta, const QuadratureGrid& grid,
                                     const StabilityOptions& options = {});

// Every route in one sweep over the grid. Enforces the soliton precondition.
VariationReport analyze_variation(const Chart& chart, const AmbientStructure& s,
                                  const OneFormField& theta, const QuadratureGrid& grid,
                                  const StabilityOptions& options = {});

// int (Delta v + <T, grad v>) w e^f dmu and -int <grad v, grad w> e^f dmu for
// compactly supported scalars v, w.
struct DriftPair {
  double lhs = 0.0;
  double rhs = 0.0;
  double scale = 0.0; // int (v^2 + |grad v|^2 + w^2 + |grad w|^2) e^f dmu
};
DriftPair drift_divergence_identity(const Chart& chart, const AmbientStructure& s,
                                    const ScalarField& v, const ScalarField& w,
                                    const QuadratureGrid& grid, int workers = 1);

} // namespace lagstab

#endif
