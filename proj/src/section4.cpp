#include "lagstab/section4.hpp"

#include "lagstab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace lagstab {

double ClosedFormErrors::max() const {
  return std::max({metric, metric_inverse, area_density, second_fundamental_form,
                   mean_curvature_norm, mean_curvature_vector, weight, normal_frame});
}

ClosedFormErrors grim_reaper_closed_form_errors(const Chart& chart, const SampleGrid& grid) {
  if (chart.ambient_dim() != 4 || chart.dim() != 2)
    throw Error(ErrorCode::invalid_argument, "closed forms apply to the Grim Reaper cylinder");
  const double T[] = {1.0, 0.0, 0.0, 0.0};
  const AmbientStructure s = AmbientStructure::standard(4, T);

  ClosedFormErrors err;
  auto track = [](double& slot, double v) { slot = std::max(slot, std::abs(v)); };
  for (const Vec& p : grid.points()) {
    const PointGeometry pg = point_geometry(chart, s, std::span<const double>(p.data(), 2));
    const double x = p[0];
    const double c = std::cos(x), sn = std::sin(x);

    track(err.metric, pg.g[0][0] - 1.0 / (c * c));
    track(err.metric, pg.g[0][1]);
    track(err.metric, pg.g[1][0]);
    track(err.metric, pg.g[1][1] - 1.0);
    track(err.metric_inverse, pg.g_inv[0][0] - c * c);
    track(err.metric_inverse, pg.g_inv[0][1]);
    track(err.metric_inverse, pg.g_inv[1][1] - 1.0);
    track(err.area_density, pg.sqrt_det_g - 1.0 / c);
    track(err.weight, pg.weight - 1.0 / c);

    // h^alpha_ij = <d_ij Phi, nu_alpha>
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int a = 0; a < 2; ++a) {
          double h = 0.0;
          for (int k = 0; k < 4; ++k) h += pg.h_coord[i][j][k] * pg.nu[a][k];
          const double expected = (i == 0 && j == 0 && a == 0) ? 1.0 / c : 0.0;
          track(err.second_fundamental_form, h - expected);
        }

    const AmbientVec H = mean_curvature_vector(pg);
    double norm = 0.0;
    for (int k = 0; k < 4; ++k) norm += H[k] * H[k];
    track(err.mean_curvature_norm, std::sqrt(norm) - c);
    const double expected_H[] = {c * c, -c * sn, 0.0, 0.0};
    for (int k = 0; k < 4; ++k) track(err.mean_curvature_vector, H[k] - expected_H[k]);

    const double nu1[] = {c, -sn, 0.0, 0.0};
    const double nu2[] = {0.0, 0.0, 0.0, -1.0};
    for (int k = 0; k < 4; ++k) {
      track(err.normal_frame, pg.nu[0][k] - nu1[k]);
      track(err.normal_frame, pg.nu[1][k] - nu2[k]);
    }
  }
  return err;
}

Section4Integrals grim_reaper_section4_suite(const ScalarField& v3, const ScalarField& v4,
                                             const Box& box, int cells, int points_per_cell) {
  constexpr double half_pi = std::numbers::pi / 2;
  if (box.dim != 2 || box.axes[0].lo < -half_pi || box.axes[0].hi > half_pi)
    throw Error(ErrorCode::support,
                "section-4 integrals need a box inside [-pi/2, pi/2] x R");

  const AxisRule xs = composite_gauss_legendre(box.axes[0], cells, points_per_cell);
  const AxisRule ys = composite_gauss_legendre(box.axes[1], cells, points_per_cell);
  const std::size_t nx = xs.nodes.size(), ny = ys.nodes.size();

  std::vector<double> curvature(ny), gradient(ny), lhs(ny), rhs(ny);
  std::vector<double> row_c(nx), row_g(nx), row_l(nx), row_r(nx);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const double u[] = {xs.nodes[i], ys.nodes[j]};
      const Jet3 a = v3(u);
      const Jet3 b = v4(u);
      const double c = std::cos(u[0]);
      const double wx = xs.weights[i];
      row_c[i] = a.value * a.value * wx;
      row_g[i] = (a.first[0] * a.first[0] + b.first[0] * b.first[0] +
                  (a.first[1] * a.first[1] + b.first[1] * b.first[1]) / (c * c)) * wx;
      row_l[i] = a.value * a.value * wx;
      row_r[i] = a.first[0] * a.first[0] * wx;
    }
    curvature[j] = pairwise_sum(row_c);
    gradient[j] = pairwise_sum(row_g);
    lhs[j] = pairwise_sum(row_l);
    rhs[j] = pairwise_sum(row_r);
  }

  Section4Integrals out;
  out.slices = ny;
  out.min_slice_margin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < ny; ++j) {
    const double margin = rhs[j] - lhs[j];
    out.min_slice_margin = std::min(out.min_slice_margin, margin);
    if (margin < 0.0) ++out.slice_violations;
    curvature[j] *= ys.weights[j];
    gradient[j] *= ys.weights[j];
    lhs[j] *= ys.weights[j];
    rhs[j] *= ys.weights[j];
  }
  out.curvature_integral = pairwise_sum(curvature);
  out.gradient_integral = pairwise_sum(gradient);
  out.wirtinger_lhs = pairwise_sum(lhs);
  out.wirtinger_rhs = pairwise_sum(rhs);
  return out;
}

OneFormField grim_reaper_form_from_components(const ScalarField& v3, const ScalarField& v4) {
  const Box support = v3.support();
  auto point_of = [](std::span<const Jet3> coords) {
    return std::array<double, 2>{coords[0].value, coords[1].value};
  };
  std::vector<ScalarField> comps;
  comps.push_back(ScalarField::raw(
      support,
      [v3, point_of](std::span<const Jet3> coords) {
        const auto u = point_of(coords);
        return v3(u) / cos(coords[0]);
      },
      "V3 / cos x"));
  comps.push_back(ScalarField::raw(
      support,
      [v4, point_of](std::span<const Jet3> coords) {
        const auto u = point_of(coords);
        return v4(u);
      },
      "V4"));
  return form_from_fields(comps, FormKind::generic,
                          "normal field V3 nu_1 + V4 nu_2 (" + v3.description() + "; " +
                              v4.description() + ")");
}

RandomPair random_section4_pair(const Box& support, std::uint64_t seed) {
  return {random_potential(support, 2 * seed + 1), random_potential(support, 2 * seed + 2)};
}

DirichletGap dirichlet_gap(int n, double shift, int max_iterations) {
  if (n < 100) throw Error(ErrorCode::invalid_argument, "Dirichlet grid needs N >= 100");
  const auto N = static_cast<std::size_t>(n);
  const double h = std::numbers::pi / (n + 1);
  const double diag = 2.0 / (h * h), off = -1.0 / (h * h);

  // Thomas factorization of A - shift I, reused every iteration.
  std::vector<double> c_prime(N), denom(N);
  {
    double prev = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      denom[i] = (diag - shift) - (i ? off * prev : 0.0);
      prev = off / denom[i];
      c_prime[i] = prev;
    }
  }
  auto solve = [&](const std::vector<double>& rhs, std::vector<double>& x) {
    std::vector<double> d(N);
    for (std::size_t i = 0; i < N; ++i) d[i] = (rhs[i] - (i ? off * d[i - 1] : 0.0)) / denom[i];
    x[N - 1] = d[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) x[i] = d[i] - c_prime[i] * x[i + 1];
  };
  auto rayleigh = [&](const std::vector<double>& x) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double ax = diag * x[i];
      if (i > 0) ax += off * x[i - 1];
      if (i + 1 < N) ax += off * x[i + 1];
      num += x[i] * ax;
      den += x[i] * x[i];
    }
    return num / den;
  };

  std::vector<double> x(N, 1.0), y(N);
  double lambda = rayleigh(x);
  DirichletGap out;
  for (int it = 1; it <= max_iterations; ++it) {
    solve(x, y);
    double norm = 0.0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < N; ++i) x[i] = y[i] / norm;
    const double next = rayleigh(x);
    const bool converged = std::abs(next - lambda) <= 1e-14 * std::abs(next);
    lambda = next;
    if (converged && it > 1) {
      out.eigenvalue = lambda;
      out.iterations = it;
      double dot = 0.0, cc = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double c = std::cos(-std::numbers::pi / 2 + static_cast<double>(i + 1) * h);
        dot += x[i] * c;
        cc += c * c;
      }
      // x has unit norm; residual of x against its projection on cos
      double resid = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double c = std::cos(-std::numbers::pi / 2 + static_cast<double>(i + 1) * h);
        const double r = x[i] - dot / cc * c;
        resid += r * r;
      }
      out.eigenvector_angle = std::atan2(std::sqrt(resid), std::abs(dot) / std::sqrt(cc));
      return out;
    }
  }
  throw Error(ErrorCode::convergence, "inverse iteration did not converge in " +
                                          std::to_string(max_iterations) + " iterations");
}

} // namespace lagstab
