#include "lagstab/geometry.hpp"

#include "lagstab/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lagstab {

namespace {

using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

constexpr double kRankTolerance = 1e-8;
constexpr double kLagrangianTolerance = 1e-9;

double dot(const AmbientVec& a, const AmbientVec& b, int m) {
  double s = 0.0;
  for (int i = 0; i < m; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const AmbientVec& x, AmbientVec& y, int m) {
  for (int i = 0; i < m; ++i) y[i] += alpha * x[i];
}

double norm(const AmbientVec& a, int m) { return std::sqrt(dot(a, a, m)); }

} // namespace

PointGeometry point_geometry(const Chart& chart, const AmbientStructure& structure,
                             std::span<const double> u) {
  const ChartJet jet = chart.eval_jet3(u);
  const int d = jet.dim;
  const int m = jet.ambient;
  if (structure.ambient != m)
    throw Error(ErrorCode::config, "ambient structure dimension does not match chart");

  PointGeometry pg;
  pg.dim = d;
  pg.ambient = m;
  pg.codim = m - d;

  std::array<std::array<std::array<AmbientVec, kMaxDim>, kMaxDim>, kMaxDim> third{};
  for (int a = 0; a < m; ++a) {
    const Jet3& c = jet.comp[a];
    pg.position[a] = c.value;
    for (int i = 0; i < d; ++i) {
      pg.tangent[i][a] = c.first[i];
      for (int j = 0; j < d; ++j) {
        pg.hessian[i][j][a] = c.second[i][j];
        for (int k = 0; k < d; ++k) third[i][j][k][a] = c.third[i][j][k];
      }
    }
  }

  SmallMat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      pg.g[i][j] = dot(pg.tangent[i], pg.tangent[j], m);
      g(i, j) = pg.g[i][j];
    }
  Eigen::SelfAdjointEigenSolver<SmallMat> eig(g, Eigen::EigenvaluesOnly);
  const double smallest_singular = std::sqrt(std::max(0.0, eig.eigenvalues()(0)));
  if (!(smallest_singular > kRankTolerance))
    throw Error(ErrorCode::immersion,
                "chart '" + chart.name() + "' is not immersed at the requested point");
  const SmallMat g_inv = g.inverse();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) pg.g_inv[i][j] = g_inv(i, j);
  pg.sqrt_det_g = std::sqrt(g.determinant());

  // dg[k][i][j] = d_k g_ij
  Ten3 dg{};
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        dg[k][i][j] = dot(pg.hessian[i][k], pg.tangent[j], m) +
                      dot(pg.tangent[i], pg.hessian[j][k], m);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int p = 0; p < d; ++p)
          for (int q = 0; q < d; ++q) s -= pg.g_inv[i][p] * dg[k][p][q] * pg.g_inv[q][j];
        pg.g_inv_partial[k][i][j] = s;
      }

  // first kind: c[i][j][l] = <d_ij Phi, d_l Phi>, and its derivatives
  Ten3 c{};
  Ten4 dc{}; // [k][i][j][l]
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int l = 0; l < d; ++l) {
        c[i][j][l] = dot(pg.hessian[i][j], pg.tangent[l], m);
        for (int k = 0; k < d; ++k)
          dc[k][i][j][l] = dot(third[i][j][k], pg.tangent[l], m) +
                           dot(pg.hessian[i][j], pg.hessian[l][k], m);
      }
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int l = 0; l < d; ++l) s += pg.g_inv[k][l] * c[i][j][l];
        pg.gamma[k][i][j] = s;
      }
  for (int q = 0; q < d; ++q)
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          double s = 0.0;
          for (int l = 0; l < d; ++l)
            s += pg.g_inv_partial[q][k][l] * c[i][j][l] + pg.g_inv[k][l] * dc[q][i][j][l];
          pg.gamma_partial[q][k][i][j] = s;
        }

  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      AmbientVec h = pg.hessian[i][j];
      for (int k = 0; k < d; ++k) axpy(-pg.gamma[k][i][j], pg.tangent[k], h, m);
      pg.h_coord[i][j] = h;
    }

  // Tangent frame by Gram-Schmidt in coordinate order.
  for (int a = 0; a < d; ++a) {
    Vec coeff{};
    coeff[a] = 1.0;
    AmbientVec v = pg.tangent[a];
    for (int b = 0; b < a; ++b) {
      const double p = dot(pg.tangent[a], pg.e[b], m);
      axpy(-p, pg.e[b], v, m);
      for (int i = 0; i < d; ++i) coeff[i] -= p * pg.frame[b][i];
    }
    const double n = norm(v, m);
    for (int x = 0; x < m; ++x) pg.e[a][x] = v[x] / n;
    for (int i = 0; i < d; ++i) pg.frame[a][i] = coeff[i] / n;
  }

  double omega_defect = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      omega_defect = std::max(omega_defect, std::abs(structure.omega_bar(pg.e[a], pg.e[b])));
  pg.lagrangian = 2 * d == m && omega_defect <= kLagrangianTolerance;

  if (pg.lagrangian) {
    for (int a = 0; a < d; ++a) pg.nu[a] = structure.apply_J(pg.e[a]);
  } else {
    std::array<bool, kMaxAmbient> used{};
    for (int c_idx = 0; c_idx < pg.codim; ++c_idx) {
      int best = -1;
      double best_norm = -1.0;
      AmbientVec best_v{};
      for (int x = 0; x < m; ++x) {
        if (used[x]) continue;
        AmbientVec v{};
        v[x] = 1.0;
        for (int a = 0; a < d; ++a) axpy(-pg.e[a][x], pg.e[a], v, m);
        for (int b = 0; b < c_idx; ++b) axpy(-pg.nu[b][x], pg.nu[b], v, m);
        const double n = norm(v, m);
        if (n > best_norm + 1e-12) {
          best = x;
          best_norm = n;
          best_v = v;
        }
      }
      used[best] = true;
      for (int x = 0; x < m; ++x) pg.nu[c_idx][x] = best_v[x] / best_norm;
    }
  }

  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c_idx = 0; c_idx < pg.codim; ++c_idx) {
        double s = 0.0;
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            s += pg.frame[a][i] * pg.frame[b][j] * dot(pg.hessian[i][j], pg.nu[c_idx], m);
        pg.h3[a][b][c_idx] = s;
      }
  for (int c_idx = 0; c_idx < pg.codim; ++c_idx) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += pg.h3[a][a][c_idx];
    pg.H_frame[c_idx] = s;
  }

  pg.weight = std::exp(dot(structure.T, pg.position, m));
  for (int a = 0; a < d; ++a) pg.T_tan[a] = dot(structure.T, pg.e[a], m);
  for (int c_idx = 0; c_idx < pg.codim; ++c_idx)
    pg.T_norm[c_idx] = dot(structure.T, pg.nu[c_idx], m);
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += pg.g_inv[i][j] * dot(structure.T, pg.tangent[j], m);
    pg.T_tan_coord[i] = s;
  }
  return pg;
}

AmbientVec mean_curvature_vector(const PointGeometry& pg) {
  AmbientVec H{};
  for (int i = 0; i < pg.dim; ++i)
    for (int j = 0; j < pg.dim; ++j) axpy(pg.g_inv[i][j], pg.h_coord[i][j], H, pg.ambient);
  return H;
}

AmbientVec tangential_complement(const PointGeometry& pg, const AmbientStructure& s) {
  AmbientVec t = s.T;
  for (int a = 0; a < pg.dim; ++a) axpy(-pg.T_tan[a], pg.e[a], t, pg.ambient);
  return t;
}

double soliton_residual_at(const PointGeometry& pg, const AmbientStructure& s) {
  AmbientVec r = tangential_complement(pg, s);
  axpy(-1.0, mean_curvature_vector(pg), r, pg.ambient);
  return norm(r, pg.ambient);
}

std::vector<Vec> SampleGrid::points() const {
  if (per_axis <= 0) throw Error(ErrorCode::invalid_argument, "sample grid needs points");
  std::size_t total = 1;
  for (int i = 0; i < box.dim; ++i) total *= static_cast<std::size_t>(per_axis);
  std::vector<Vec> pts;
  pts.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Vec p{};
    std::size_t rest = flat;
    for (int i = box.dim - 1; i >= 0; --i) {
      const auto idx = static_cast<double>(rest % static_cast<std::size_t>(per_axis));
      rest /= static_cast<std::size_t>(per_axis);
      p[i] = box.axes[i].lo + (idx + 0.5) * box.axes[i].width() / per_axis;
    }
    pts.push_back(p);
  }
  return pts;
}

std::string SampleGrid::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << per_axis << "^" << box.dim << " cell-centred points over ";
  for (int i = 0; i < box.dim; ++i)
    os << (i ? "x" : "") << "[" << box.axes[i].lo << ", " << box.axes[i].hi << "]";
  return os.str();
}

DiagnosticsReport soliton_residual(const Chart& chart, const AmbientStructure& s,
                                   const SampleGrid& grid) {
  DiagnosticsReport r;
  r.chart = chart.name();
  r.grid = grid;
  const int d = chart.dim();
  for (const Vec& p : grid.points()) {
    const std::span<const double> u(p.data(), static_cast<std::size_t>(d));
    const PointGeometry pg = point_geometry(chart, s, u);
    r.max_soliton_residual = std::max(r.max_soliton_residual, soliton_residual_at(pg, s));
  }
  r.max_lagrangian_defect = lagrangian_defect_omega(chart, s, grid);
  return r;
}

double lagrangian_defect_omega(const Chart& chart, const AmbientStructure& s,
                               const SampleGrid& grid) {
  const int d = chart.dim();
  const int m = chart.ambient_dim();
  double worst = 0.0;
  for (const Vec& p : grid.points()) {
    const ChartJet jet = chart.eval_jet3(std::span<const double>(p.data(), static_cast<std::size_t>(d)));
    std::array<AmbientVec, kMaxDim> t{};
    for (int a = 0; a < m; ++a)
      for (int i = 0; i < d; ++i) t[i][a] = jet.comp[a].first[i];
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        worst = std::max(worst, std::abs(s.omega_bar(t[i], t[j])));
  }
  return worst;
}

CurvatureTensors curvature_tensor(const PointGeometry& pg) {
  const int d = pg.dim;
  CurvatureTensors out;
  out.dim = d;

  // R^q_{ijl} for R(d_i, d_j) d_l = R^q_{ijl} d_q
  Ten4 up{};
  for (int q = 0; q < d; ++q)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) {
          double s = pg.gamma_partial[i][q][j][l] - pg.gamma_partial[j][q][i][l];
          for (int p = 0; p < d; ++p)
            s += pg.gamma[q][i][p] * pg.gamma[p][j][l] - pg.gamma[q][j][p] * pg.gamma[p][i][l];
          up[q][i][j][l] = s;
        }
  // coordinate R_{ijkl} = g_{kq} R^q_{ijl}
  Ten4 low{};
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double s = 0.0;
          for (int q = 0; q < d; ++q) s += pg.g[k][q] * up[q][i][j][l];
          low[i][j][k][l] = s;
        }
  // to the orthonormal frame, one index at a time
  Ten4 tmp = low;
  for (int slot = 0; slot < 4; ++slot) {
    Ten4 next{};
    for (int a0 = 0; a0 < d; ++a0)
      for (int a1 = 0; a1 < d; ++a1)
        for (int a2 = 0; a2 < d; ++a2)
          for (int a3 = 0; a3 < d; ++a3) {
            const std::array<int, 4> idx{a0, a1, a2, a3};
            double s = 0.0;
            for (int r = 0; r < d; ++r) {
              std::array<int, 4> src = idx;
              src[slot] = r;
              s += pg.frame[idx[slot]][r] * tmp[src[0]][src[1]][src[2]][src[3]];
            }
            next[a0][a1][a2][a3] = s;
          }
    tmp = next;
  }
  out.R_coord = tmp;

  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double s = 0.0;
          for (int p = 0; p < pg.codim; ++p)
            s += pg.h3[i][k][p] * pg.h3[j][l][p] - pg.h3[i][l][p] * pg.h3[j][k][p];
          out.R_gauss[i][j][k][l] = s;
        }

  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      double s = 0.0;
      for (int p = 0; p < pg.codim; ++p) {
        s += pg.H_frame[p] * pg.h3[i][k][p];
        for (int j = 0; j < d; ++j) s -= pg.h3[j][i][p] * pg.h3[j][k][p];
      }
      out.ricci[i][k] = s;
    }
  return out;
}

CurvatureTensors curvature_tensor(const Chart& chart, const AmbientStructure& s,
                                  std::span<const double> u) {
  return curvature_tensor(point_geometry(chart, s, u));
}

} // namespace lagstab
