#ifndef LAGSTAB_SECTION4_HPP
#define LAGSTAB_SECTION4_HPP

#include "lagstab/stability.hpp"

#include <cstdint>

namespace lagstab {

// Largest absolute deviation of the numeric Grim Reaper geometry from its
// closed forms, over a sample grid (T = (1, 0, 0, 0)):
//   g = diag(1/cos^2 x, 1), g^-1 = diag(cos^2 x, 1), sqrt(det g) = 1/cos x,
//   <d_xx Phi, nu_1> = 1/cos x with every other normal component zero,
//   H = cos x (cos x, -sin x, 0, 0), e^{<T, x>} = 1/cos x.
struct ClosedFormErrors {
  double metric = 0.0;
  double metric_inverse = 0.0;
  double area_density = 0.0;
  double second_fundamental_form = 0.0;
  double mean_curvature_norm = 0.0;
  double mean_curvature_vector = 0.0;
  double weight = 0.0;
  double normal_frame = 0.0; // nu_1 = (cos x, -sin x, 0, 0), nu_2 = (0, 0, 0, -1)

  double max() const;
};

ClosedFormErrors grim_reaper_closed_form_errors(const Chart& chart, const SampleGrid& grid);

// Integrals over the (x, y) box for normal components V3 (along nu_1) and V4
// (along nu_2) of the Grim Reaper cylinder:
//   curvature = int (V3)^2 dx dy
//   gradient  = int [(d_x V3)^2 + (d_x V4)^2] + int [(d_y V3)^2 + (d_y V4)^2] / cos^2 x
//   wirtinger_lhs/rhs = int (V3)^2 and int (d_x V3)^2, accumulated slice by slice
struct Section4Integrals {
  double curvature_integral = 0.0;
  double gradient_integral = 0.0;
  double wirtinger_lhs = 0.0;
  double wirtinger_rhs = 0.0;
  std::size_t slices = 0;
  std::size_t slice_violations = 0;
  double min_slice_margin = 0.0; // min over y-nodes of rhs(y) - lhs(y)
};

// The box must lie within [-pi/2, pi/2] x R (ErrorCode::support otherwise).
Section4Integrals grim_reaper_section4_suite(const ScalarField& v3, const ScalarField& v4,
                                             const Box& box, int cells = 40,
                                             int points_per_cell = 8);

// The 1-form theta with frame components (V3, V4) on the Grim Reaper:
// theta_x = V3 / cos x, theta_y = V4.
OneFormField grim_reaper_form_from_components(const ScalarField& v3, const ScalarField& v4);

struct RandomPair {
  ScalarField v3;
  ScalarField v4;
};
RandomPair random_section4_pair(const Box& support, std::uint64_t seed);

struct DirichletGap {
  double eigenvalue = 0.0;
  int iterations = 0;
  // angle between the discrete eigenvector and cos x sampled on the grid
  double eigenvector_angle = 0.0;
};

// Smallest eigenvalue of -d^2/dx^2 on (-pi/2, pi/2) with Dirichlet ends: N
// interior points, second-order differences, shifted inverse iteration.
DirichletGap dirichlet_gap(int n, double shift = 0.5, int max_iterations = 500);

} // namespace lagstab

#endif
