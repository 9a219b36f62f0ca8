#ifndef LAGSTAB_GEOMETRY_HPP
#define LAGSTAB_GEOMETRY_HPP

#include "lagstab/chart.hpp"

#include <string>
#include <vector>

namespace lagstab {

// Everything the variational routes need at one parameter point.
//
// Index conventions: coordinate indices i, j, k, l run over [0, dim); frame
// indices a, b, c over [0, dim) for the tangent frame and [0, codim) for the
// normal frame. The tangent frame is Gram-Schmidt on the coordinate tangents
// in index order, e_a = frame[a][i] * tangent[i]. For Lagrangian points the
// normal frame is nu_a = J e_a; otherwise it is a greedy Gram-Schmidt
// completion from the ambient standard basis. Frame components (h3, H_frame,
// T_tan, T_norm) depend on this gauge, scalars built from them do not.
struct PointGeometry {
  int dim = 0;
  int ambient = 0;
  int codim = 0;
  bool lagrangian = false;

  AmbientVec position{};
  std::array<AmbientVec, kMaxDim> tangent{};                  // d_i Phi
  std::array<std::array<AmbientVec, kMaxDim>, kMaxDim> hessian{}; // d_ij Phi

  Mat g{};
  Mat g_inv{};
  Ten3 g_inv_partial{}; // [m][i][j] = d_m g^{ij}
  double sqrt_det_g = 0.0;
  Ten3 gamma{};         // [k][i][j] = Gamma^k_ij
  Ten4 gamma_partial{}; // [m][k][i][j] = d_m Gamma^k_ij

  // [i][j] = normal part of d_ij Phi
  std::array<std::array<AmbientVec, kMaxDim>, kMaxDim> h_coord{};

  Mat frame{};
  std::array<AmbientVec, kMaxDim> e{};
  std::array<AmbientVec, kMaxAmbient> nu{};

  // [a][b][c] = <d_{e_a} e_b, nu_c>
  std::array<std::array<std::array<double, kMaxAmbient>, kMaxDim>, kMaxDim> h3{};
  std::array<double, kMaxAmbient> H_frame{};

  double weight = 0.0;                   // e^{<T, x>}
  Vec T_tan{};                           // <T, e_a>
  std::array<double, kMaxAmbient> T_norm{}; // <T, nu_c>
  Vec T_tan_coord{};                     // coordinates of T^top in d_i
};

// Throws ErrorCode::immersion when the Jacobian is rank deficient.
PointGeometry point_geometry(const Chart& chart, const AmbientStructure& structure,
                             std::span<const double> u);

// g^{ij} (d_ij Phi)^perp
AmbientVec mean_curvature_vector(const PointGeometry& pg);
// T - sum <T, e_a> e_a
AmbientVec tangential_complement(const PointGeometry& pg, const AmbientStructure& s);
// |T^perp - H| at one point.
double soliton_residual_at(const PointGeometry& pg, const AmbientStructure& s);

// Cell-centred sample points, `per_axis` along every axis of `box`.
struct SampleGrid {
  Box box;
  int per_axis = 50;

  std::vector<Vec> points() const;
  std::string describe() const;
};

struct DiagnosticsReport {
  std::string chart;
  SampleGrid grid;
  double max_soliton_residual = 0.0;
  double max_lagrangian_defect = 0.0;
};

DiagnosticsReport soliton_residual(const Chart& chart, const AmbientStructure& s,
                                   const SampleGrid& grid);
// max |omega(d_i Phi, d_j Phi)| over i < j and grid points
double lagrangian_defect_omega(const Chart& chart, const AmbientStructure& s,
                               const SampleGrid& grid);

struct CurvatureTensors {
  int dim = 0;
  Ten4 R_coord{}; // intrinsic, from Gamma and dGamma, orthonormal frame
  Ten4 R_gauss{}; // from the second fundamental form
  Mat ricci{};    // H_p h_pik - h_pji h_pjk
};

// R_{ijkl} = <R(e_i, e_j) e_l, e_k>, so R_{ijij} is the sectional curvature.
CurvatureTensors curvature_tensor(const PointGeometry& pg);
CurvatureTensors curvature_tensor(const Chart& chart, const AmbientStructure& s,
                                  std::span<const double> u);

} // namespace lagstab

#endif
