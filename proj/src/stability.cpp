#include "lagstab/stability.hpp"

#include "lagstab/error.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace lagstab {

namespace {

enum Channel : int {
  kArea,       // e^f dmu
  kFirst,      // <T^perp - H, V> e^f dmu
  kOperator,   // -(V.Delta V + V.nabla_T V + h h V V) e^f dmu
  kDivergence, // (|nabla theta|^2 - h h V V) e^f dmu
  kSquare,     // (div + theta(T^top))^2 e^f dmu
  kScale,      // (|theta|^2 + |nabla theta|^2) e^f dmu
  kFd2,        // Richardson second difference of the density
  kFd2Level1,
  kFd1,        // Richardson first difference of the density
  kFd1Level1,
  kLhs36,
  kRhs36,
  kLhs37,
  kRhs37,
  kDefect,     // max |d_i theta_j - d_j theta_i| (max-reduced)
  kChannels
};

double small_det(const Mat& a, int d) {
  switch (d) {
  case 1: return a[0][0];
  case 2: return a[0][0] * a[1][1] - a[0][1] * a[1][0];
  case 3:
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  default: return 0.0;
  }
}

// Weighted area density of Phi + s V at one node, given V and d_i V.
struct DensityPath {
  const PointGeometry& pg;
  const AmbientStructure& s;
  AmbientVec V{};
  std::array<AmbientVec, kMaxDim> dV{};

  double operator()(double step) const {
    const int d = pg.dim, m = pg.ambient;
    std::array<AmbientVec, kMaxDim> t{};
    for (int i = 0; i < d; ++i)
      for (int x = 0; x < m; ++x) t[i][x] = pg.tangent[i][x] + step * dV[i][x];
    Mat g{};
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double v = 0.0;
        for (int x = 0; x < m; ++x) v += t[i][x] * t[j][x];
        g[i][j] = v;
      }
    double tx = 0.0;
    for (int x = 0; x < m; ++x) tx += s.T[x] * (pg.position[x] + step * V[x]);
    return std::exp(tx) * std::sqrt(small_det(g, d));
  }
};

DensityPath density_path(const PointGeometry& pg, const AmbientStructure& s,
                         const FormJet& theta) {
  const int d = pg.dim, m = pg.ambient;
  DensityPath path{pg, s};
  // theta^sharp = c^i d_i Phi with c^i = g^{ij} theta_j
  Vec c{};
  Mat dc{}; // [k][i] = d_k c^i
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      c[i] += pg.g_inv[i][j] * theta.comp[j].value;
      for (int k = 0; k < d; ++k)
        dc[k][i] += pg.g_inv_partial[k][i][j] * theta.comp[j].value +
                    pg.g_inv[i][j] * theta.comp[j].first[k];
    }
  AmbientVec sharp{};
  std::array<AmbientVec, kMaxDim> d_sharp{};
  for (int i = 0; i < d; ++i)
    for (int x = 0; x < m; ++x) {
      sharp[x] += c[i] * pg.tangent[i][x];
      for (int k = 0; k < d; ++k)
        d_sharp[k][x] += dc[k][i] * pg.tangent[i][x] + c[i] * pg.hessian[i][k][x];
    }
  path.V = s.apply_J(sharp);
  for (int k = 0; k < d; ++k) path.dV[k] = s.apply_J(d_sharp[k]);
  return path;
}

void node_terms(const Chart& chart, const AmbientStructure& s, const OneFormField& field,
                const StabilityOptions& options, const Vec& u, double w,
                std::span<double> out) {
  const int d = chart.dim();
  const std::span<const double> point(u.data(), static_cast<std::size_t>(d));
  const PointGeometry pg = point_geometry(chart, s, point);
  if (!pg.lagrangian)
    throw Error(ErrorCode::unsupported,
                "chart '" + chart.name() + "' is not Lagrangian; variations are 1-forms");
  const double measure = w * pg.sqrt_det_g * pg.weight;
  out[kArea] = measure;

  const FormJet theta = field(point);
  const Vec values = theta.values();
  const Vec V = frame_components(values, pg);
  const CovariantData cov = covariant_calculus(theta, pg);

  double defect = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      defect = std::max(defect, std::abs(theta.comp[j].first[i] - theta.comp[i].first[j]));
  out[kDefect] = defect;

  // theta(T^top), nabla_{T^top} theta, |theta|^2, |nabla theta|^2
  double theta_T = 0.0;
  Vec drift{};
  for (int i = 0; i < d; ++i) {
    theta_T += pg.T_tan_coord[i] * values[i];
    for (int j = 0; j < d; ++j) drift[j] += pg.T_tan_coord[i] * cov.nabla[i][j];
  }
  const Vec drift_frame = frame_components(drift, pg);
  const Vec lap_frame = frame_components(cov.rough_laplacian, pg);

  double theta_sq = 0.0, nabla_sq = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      theta_sq += pg.g_inv[i][j] * values[i] * values[j];
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          nabla_sq += pg.g_inv[i][k] * pg.g_inv[j][l] * cov.nabla[i][j] * cov.nabla[k][l];
    }

  // sum_{k,l} (h_kli V_i)^2 and H_p h_pij V_i V_j
  double hhVV = 0.0, HhVV = 0.0;
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      double hv = 0.0;
      for (int i = 0; i < d; ++i) hv += pg.h3[k][l][i] * V[i];
      hhVV += hv * hv;
    }
  for (int p = 0; p < d; ++p)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) HhVV += pg.H_frame[p] * pg.h3[i][j][p] * V[i] * V[j];

  double v_lap = 0.0, v_drift = 0.0;
  for (int a = 0; a < d; ++a) {
    v_lap += V[a] * lap_frame[a];
    v_drift += V[a] * drift_frame[a];
  }

  double theta_grad_div = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) theta_grad_div += pg.g_inv[i][j] * values[i] * cov.grad_div[j];

  out[kOperator] = -(v_lap + v_drift + hhVV) * measure;
  out[kDivergence] = (nabla_sq - hhVV) * measure;
  const double sq = cov.div + theta_T;
  out[kSquare] = sq * sq * measure;
  out[kScale] = (theta_sq + nabla_sq) * measure;
  out[kLhs36] = -theta_grad_div * measure;
  out[kRhs36] = (cov.div * cov.div + cov.div * theta_T) * measure;
  out[kLhs37] = -v_drift * measure;
  out[kRhs37] = (cov.div * theta_T + HhVV + theta_T * theta_T) * measure;

  const DensityPath path = density_path(pg, s, theta);
  const AmbientVec residual = [&] {
    AmbientVec r = tangential_complement(pg, s);
    const AmbientVec H = mean_curvature_vector(pg);
    for (int x = 0; x < pg.ambient; ++x) r[x] -= H[x];
    return r;
  }();
  double first = 0.0;
  for (int x = 0; x < pg.ambient; ++x) first += residual[x] * path.V[x];
  out[kFirst] = first * measure;

  const double h = options.fd_step;
  const double f0 = path(0.0);
  const double fp1 = path(h), fm1 = path(-h);
  const double fp2 = path(2.0 * h), fm2 = path(-2.0 * h);
  const double d2_h = (fp1 - 2.0 * f0 + fm1) / (h * h);
  const double d2_2h = (fp2 - 2.0 * f0 + fm2) / (4.0 * h * h);
  const double d1_h = (fp1 - fm1) / (2.0 * h);
  const double d1_2h = (fp2 - fm2) / (4.0 * h);
  out[kFd2Level1] = d2_h * w;
  out[kFd2] = (4.0 * d2_h - d2_2h) / 3.0 * w;
  out[kFd1Level1] = d1_h * w;
  out[kFd1] = (4.0 * d1_h - d1_2h) / 3.0 * w;
}

NodeValues sweep(const Chart& chart, const AmbientStructure& s, const OneFormField& theta,
                 const QuadratureGrid& grid, const StabilityOptions& options) {
  if (theta.support().dim != chart.dim())
    throw Error(ErrorCode::invalid_argument, "variation and chart dimensions differ");
  if (!chart.domain().contains(grid.box()))
    throw Error(ErrorCode::support, "quadrature box leaves the chart domain");
  return evaluate_nodes(grid, kChannels, options.workers,
                        [&](const Vec& u, double w, std::span<double> out) {
                          node_terms(chart, s, theta, options, u, w, out);
                        });
}

FdEstimate fd_estimate(const NodeValues& v, int value_channel, int level1_channel,
                       double scale, double tolerance) {
  FdEstimate e;
  e.value = v.sum(value_channel);
  e.level1 = v.sum(level1_channel);
  const double ref = std::max(std::abs(e.value), scale);
  e.unstable = std::abs(e.value - e.level1) > 10.0 * tolerance * ref;
  return e;
}

} // namespace

double relative_difference(double a, double b, double scale) {
  const double diff = std::abs(a - b);
  if (diff == 0.0) return 0.0;
  if (!(scale > 0.0)) return std::numeric_limits<double>::infinity();
  return diff / scale;
}

double functional_value(const Chart& chart, const AmbientStructure& s,
                        const QuadratureGrid& grid, int workers) {
  if (!chart.domain().contains(grid.box()))
    throw Error(ErrorCode::support, "quadrature box leaves the chart domain");
  const int d = chart.dim();
  const NodeValues v = evaluate_nodes(grid, 1, workers,
                                      [&](const Vec& u, double w, std::span<double> out) {
                                        const PointGeometry pg = point_geometry(
                                            chart, s, std::span<const double>(u.data(), static_cast<std::size_t>(d)));
                                        out[0] = w * pg.sqrt_det_g * pg.weight;
                                      });
  return v.sum(0);
}

void require_soliton(const Chart& chart, const AmbientStructure& s, const Box& box,
                     const StabilityOptions& options) {
  const SampleGrid sample{box, options.precondition_samples};
  const double residual = soliton_residual(chart, s, sample).max_soliton_residual;
  if (residual > options.soliton_tolerance)
    throw Error(ErrorCode::precondition,
                "chart '" + chart.name() + "' is not a translating soliton on the support "
                "(max |T^perp - H| = " + std::to_string(residual) +
                "); the second variation formula holds only at critical points");
}

double first_variation(const Chart& chart, const AmbientStructure& s,
                       const OneFormField& theta, const QuadratureGrid& grid,
                       const StabilityOptions& options) {
  return sweep(chart, s, theta, grid, options).sum(kFirst);
}

FdEstimate first_variation_fd(const Chart& chart, const AmbientStructure& s,
                              const OneFormField& theta, const QuadratureGrid& grid,
                              const StabilityOptions& options) {
  const NodeValues v = sweep(chart, s, theta, grid, options);
  return fd_estimate(v, kFd1, kFd1Level1, v.sum(kScale), options.fd_tolerance);
}

double second_variation_operator(const Chart& chart, const AmbientStructure& s,
                                 const OneFormField& theta, const QuadratureGrid& grid,
                                 const StabilityOptions& options) {
  require_soliton(chart, s, grid.box(), options);
  return sweep(chart, s, theta, grid, options).sum(kOperator);
}

double second_variation_divergence(const Chart& chart, const AmbientStructure& s,
                                   const OneFormField& theta, const QuadratureGrid& grid,
                                   const StabilityOptions& options) {
  require_soliton(chart, s, grid.box(), options);
  return sweep(chart, s, theta, grid, options).sum(kDivergence);
}

SquareRoute second_variation_square(const Chart& chart, const AmbientStructure& s,
                                    const OneFormField& theta, const QuadratureGrid& grid,
                                    const StabilityOptions& options) {
  require_soliton(chart, s, grid.box(), options);
  const NodeValues v = sweep(chart, s, theta, grid, options);
  SquareRoute r;
  r.value = v.sum(kSquare);
  r.lagrangian_defect = v.max(kDefect);
  r.closedness_warning = r.lagrangian_defect > options.closedness_tolerance;
  if (r.closedness_warning)
    spdlog::warn("square route on a non-closed 1-form (defect {:.3e}); the perfect-square "
                 "form is not the second variation here",
                 r.lagrangian_defect);
  return r;
}

FdEstimate second_variation_fd_oracle(const Chart& chart, const AmbientStructure& s,
                                      const OneFormField& theta, const QuadratureGrid& grid,
                                      const StabilityOptions& options) {
  require_soliton(chart, s, grid.box(), options);
  const NodeValues v = sweep(chart, s, theta, grid, options);
  return fd_estimate(v, kFd2, kFd2Level1, v.sum(kScale), options.fd_tolerance);
}

Theorem33Terms theorem33_term_report(const Chart& chart, const AmbientStructure& s,
                                     const OneFormField& theta, const QuadratureGrid& grid,
                                     const StabilityOptions& options) {
  const NodeValues v = sweep(chart, s, theta, grid, options);
  return {v.sum(kLhs36), v.sum(kRhs36), v.sum(kLhs37), v.sum(kRhs37)};
}

VariationReport analyze_variation(const Chart& chart, const AmbientStructure& s,
                                  const OneFormField& theta, const QuadratureGrid& grid,
                                  const StabilityOptions& options) {
  require_soliton(chart, s, grid.box(), options);
  const NodeValues v = sweep(chart, s, theta, grid, options);

  VariationReport r;
  r.chart = chart.name();
  r.description = theta.description();
  r.kind = theta.kind();
  r.seed = theta.seed();
  r.box = grid.box();
  r.cells = grid.cells();
  r.points_per_cell = grid.points_per_cell();

  r.F_value = v.sum(kArea);
  r.first_var = v.sum(kFirst);
  r.Fpp_operator = v.sum(kOperator);
  r.Fpp_divergence = v.sum(kDivergence);
  r.Fpp_square = v.sum(kSquare);
  r.scale = v.sum(kScale);
  const FdEstimate fd = fd_estimate(v, kFd2, kFd2Level1, r.scale, options.fd_tolerance);
  r.Fpp_fd = fd.value;
  r.Fpp_fd_level1 = fd.level1;
  r.fd_unstable = fd.unstable;
  r.lagrangian_defect = v.max(kDefect);
  r.terms = {v.sum(kLhs36), v.sum(kRhs36), v.sum(kLhs37), v.sum(kRhs37)};
  r.closedness_warning = r.lagrangian_defect > options.closedness_tolerance;

  const double routes[] = {r.Fpp_operator, r.Fpp_divergence, r.Fpp_square};
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b)
      r.max_pairwise_rel_diff = std::max(
          r.max_pairwise_rel_diff, relative_difference(routes[a], routes[b], r.scale));
    r.fd_rel_diff = std::max(r.fd_rel_diff, relative_difference(routes[a], r.Fpp_fd, r.scale));
  }
  if (r.fd_unstable) spdlog::warn("finite-difference oracle levels disagree for '{}'", r.description);
  if (r.closedness_warning)
    spdlog::info("variation '{}' is not closed (defect {:.3e})", r.description, r.lagrangian_defect);
  return r;
}

DriftPair drift_divergence_identity(const Chart& chart, const AmbientStructure& s,
                                    const ScalarField& v, const ScalarField& w,
                                    const QuadratureGrid& grid, int workers) {
  const int d = chart.dim();
  const NodeValues values = evaluate_nodes(
      grid, 3, workers, [&](const Vec& u, double q, std::span<double> out) {
        const std::span<const double> p(u.data(), static_cast<std::size_t>(d));
        const PointGeometry pg = point_geometry(chart, s, p);
        const double measure = q * pg.sqrt_det_g * pg.weight;
        const Jet3 vj = v(p);
        const Jet3 wj = w(p);
        double lap = 0.0, drift = 0.0, grad_pair = 0.0, gv = 0.0, gw = 0.0;
        for (int i = 0; i < d; ++i) {
          drift += pg.T_tan_coord[i] * vj.first[i];
          for (int j = 0; j < d; ++j) {
            double hess = vj.second[i][j];
            for (int k = 0; k < d; ++k) hess -= pg.gamma[k][i][j] * vj.first[k];
            lap += pg.g_inv[i][j] * hess;
            grad_pair += pg.g_inv[i][j] * vj.first[i] * wj.first[j];
            gv += pg.g_inv[i][j] * vj.first[i] * vj.first[j];
            gw += pg.g_inv[i][j] * wj.first[i] * wj.first[j];
          }
        }
        out[0] = (lap + drift) * wj.value * measure;
        out[1] = -grad_pair * measure;
        out[2] = (vj.value * vj.value + gv + wj.value * wj.value + gw) * measure;
      });
  return {values.sum(0), values.sum(1), values.sum(2)};
}

} // namespace lagstab
