#include "lagstab/chart.hpp"

#include "lagstab/error.hpp"
#include "lagstab/expression.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lagstab {

Box Box::make(std::span<const Interval> axes) {
  if (axes.empty() || axes.size() > static_cast<std::size_t>(kMaxDim))
    throw Error(ErrorCode::invalid_argument, "box dimension out of range");
  Box b;
  b.dim = static_cast<int>(axes.size());
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (!(axes[i].lo < axes[i].hi))
      throw Error(ErrorCode::invalid_argument, "box axis must satisfy lo < hi");
    b.axes[i] = axes[i];
  }
  return b;
}

bool Box::contains(std::span<const double> u) const {
  if (static_cast<int>(u.size()) < dim) return false;
  for (int i = 0; i < dim; ++i)
    if (!(u[i] >= axes[i].lo && u[i] <= axes[i].hi)) return false;
  return true;
}

bool Box::contains(const Box& inner, double margin) const {
  if (inner.dim != dim) return false;
  for (int i = 0; i < dim; ++i)
    if (inner.axes[i].lo < axes[i].lo + margin ||
        inner.axes[i].hi > axes[i].hi - margin)
      return false;
  return true;
}

Box Box::inset(double margin) const {
  Box b = *this;
  for (int i = 0; i < dim; ++i) {
    b.axes[i].lo += margin;
    b.axes[i].hi -= margin;
    if (!(b.axes[i].lo < b.axes[i].hi))
      throw Error(ErrorCode::invalid_argument, "inset margin empties the box");
  }
  return b;
}

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim; ++i) v *= axes[i].width();
  return v;
}

Chart::Chart(std::string name, Box domain, int ambient_dim, Map map)
    : name_(std::move(name)), domain_(domain), ambient_(ambient_dim),
      map_(std::move(map)) {
  if (ambient_ <= 0 || ambient_ > kMaxAmbient || ambient_ % 2 != 0)
    throw Error(ErrorCode::config, "chart '" + name_ +
                                       "': ambient dimension must be even and <= " +
                                       std::to_string(kMaxAmbient));
  if (domain_.dim <= 0 || domain_.dim >= ambient_)
    throw Error(ErrorCode::config,
                "chart '" + name_ + "': need 0 < dim < ambient dimension");
}

ChartJet Chart::eval_jet3(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != dim() || !domain_.contains(u))
    throw Error(ErrorCode::domain, "chart '" + name_ + "': point outside domain");
  std::array<Jet3, kMaxDim> coords{};
  for (int i = 0; i < dim(); ++i) coords[i] = Jet3::variable(dim(), i, u[i]);
  ChartJet out;
  out.dim = dim();
  out.ambient = ambient_;
  map_(std::span<const Jet3>(coords.data(), static_cast<std::size_t>(dim())),
       std::span<Jet3>(out.comp.data(), static_cast<std::size_t>(ambient_)));
  for (int a = 0; a < ambient_; ++a)
    if (!out.comp[a].all_finite())
      throw Error(ErrorCode::evaluation,
                  "chart '" + name_ + "': map is not smooth at the requested point");
  return out;
}

AmbientVec Chart::position(std::span<const double> u) const {
  const ChartJet j = eval_jet3(u);
  AmbientVec x{};
  for (int a = 0; a < ambient_; ++a) x[a] = j.comp[a].value;
  return x;
}

ChartJet eval_jet3(const Chart& chart, std::span<const double> u) {
  return chart.eval_jet3(u);
}

namespace {

struct Stencil {
  const Chart& chart;
  Vec base{};

  AmbientVec at(std::initializer_list<std::pair<int, double>> shifts) const {
    Vec p = base;
    for (const auto& [axis, s] : shifts) p[axis] += s;
    return chart.position(std::span<const double>(p.data(),
                                                  static_cast<std::size_t>(chart.dim())));
  }
};

// First and second derivative estimates of every component at step h.
struct Differences {
  std::array<Vec, kMaxAmbient> first{};
  std::array<Mat, kMaxAmbient> second{};
};

Differences differences(const Stencil& s, double h, int dim, int ambient) {
  Differences out;
  const AmbientVec f0 = s.at({});
  for (int i = 0; i < dim; ++i) {
    const AmbientVec fp = s.at({{i, h}});
    const AmbientVec fm = s.at({{i, -h}});
    for (int a = 0; a < ambient; ++a) {
      out.first[a][i] = (fp[a] - fm[a]) / (2.0 * h);
      out.second[a][i][i] = (fp[a] - 2.0 * f0[a] + fm[a]) / (h * h);
    }
    for (int j = i + 1; j < dim; ++j) {
      const AmbientVec fpp = s.at({{i, h}, {j, h}});
      const AmbientVec fpm = s.at({{i, h}, {j, -h}});
      const AmbientVec fmp = s.at({{i, -h}, {j, h}});
      const AmbientVec fmm = s.at({{i, -h}, {j, -h}});
      for (int a = 0; a < ambient; ++a) {
        const double v = (fpp[a] - fpm[a] - fmp[a] + fmm[a]) / (4.0 * h * h);
        out.second[a][i][j] = v;
        out.second[a][j][i] = v;
      }
    }
  }
  return out;
}

} // namespace

FiniteDifferenceJet finite_difference_jet(const Chart& chart,
                                          std::span<const double> u, double h,
                                          double flag_threshold) {
  const int d = chart.dim();
  const int m = chart.ambient_dim();
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "step must be positive");
  if (static_cast<int>(u.size()) != d ||
      !chart.domain().contains(u) ||
      [&] {
        for (int i = 0; i < d; ++i)
          if (u[i] - 4.0 * h <= chart.domain().axes[i].lo ||
              u[i] + 4.0 * h >= chart.domain().axes[i].hi)
            return true;
        return false;
      }())
    throw Error(ErrorCode::domain,
                "finite-difference stencil leaves the chart domain");

  Stencil s{chart};
  for (int i = 0; i < d; ++i) s.base[i] = u[i];

  const Differences fine = differences(s, h, d, m);
  const Differences coarse = differences(s, 2.0 * h, d, m);

  FiniteDifferenceJet out;
  out.jet.dim = d;
  out.jet.ambient = m;
  const AmbientVec f0 = s.at({});
  for (int a = 0; a < m; ++a) {
    Jet3& c = out.jet.comp[a];
    c = Jet3::constant(d, f0[a]);
    c.first = fine.first[a];
    c.second = fine.second[a];
  }

  for (int k = 0; k < d; ++k) {
    Stencil up = s, down = s;
    up.base[k] += h;
    down.base[k] -= h;
    const Differences dp = differences(up, h, d, m);
    const Differences dm = differences(down, h, d, m);
    for (int a = 0; a < m; ++a)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          out.jet.comp[a].third[k][i][j] =
              (dp.second[a][i][j] - dm.second[a][i][j]) / (2.0 * h);
  }
  // Symmetrize the third-order estimate; the raw stencils differ by O(h^2).
  for (int a = 0; a < m; ++a) {
    Ten3& t = out.jet.comp[a].third;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j)
        for (int k = j; k < d; ++k) {
          const double avg = (t[i][j][k] + t[i][k][j] + t[j][i][k] + t[j][k][i] +
                              t[k][i][j] + t[k][j][i]) / 6.0;
          t[i][j][k] = t[i][k][j] = t[j][i][k] = t[j][k][i] = t[k][i][j] =
              t[k][j][i] = avg;
        }
  }

  for (int a = 0; a < m; ++a)
    for (int i = 0; i < d; ++i) {
      out.discrepancy = std::max(out.discrepancy,
                                 std::abs(fine.first[a][i] - coarse.first[a][i]));
      for (int j = 0; j < d; ++j)
        out.discrepancy = std::max(
            out.discrepancy, std::abs(fine.second[a][i][j] - coarse.second[a][i][j]));
    }
  out.flagged = out.discrepancy > flag_threshold;
  return out;
}

AmbientVec taylor3(const ChartJet& jet, std::span<const double> v) {
  AmbientVec x{};
  const int d = jet.dim;
  for (int a = 0; a < jet.ambient; ++a) {
    const Jet3& c = jet.comp[a];
    double s = c.value;
    for (int i = 0; i < d; ++i) {
      s += c.first[i] * v[i];
      for (int j = 0; j < d; ++j) {
        s += 0.5 * c.second[i][j] * v[i] * v[j];
        for (int k = 0; k < d; ++k)
          s += c.third[i][j][k] * v[i] * v[j] * v[k] / 6.0;
      }
    }
    x[a] = s;
  }
  return x;
}

AmbientStructure AmbientStructure::standard(int ambient_dim,
                                            std::span<const double> T) {
  if (ambient_dim <= 0 || ambient_dim > kMaxAmbient || ambient_dim % 2 != 0)
    throw Error(ErrorCode::config, "ambient dimension must be even and <= " +
                                       std::to_string(kMaxAmbient));
  if (static_cast<int>(T.size()) != ambient_dim)
    throw Error(ErrorCode::config, "translation vector has " +
                                       std::to_string(T.size()) +
                                       " components, expected " +
                                       std::to_string(ambient_dim));
  AmbientStructure s;
  s.ambient = ambient_dim;
  for (int a = 0; a < ambient_dim; ++a) s.T[a] = T[a];
  for (int b = 0; b < ambient_dim; b += 2) {
    s.J[b][b + 1] = 1.0;
    s.J[b + 1][b] = -1.0;
  }
  // omega(u, v) = <J u, v> = u^T J^T v
  for (int a = 0; a < ambient_dim; ++a)
    for (int b = 0; b < ambient_dim; ++b) s.omega[a][b] = s.J[b][a];
  return s;
}

AmbientVec AmbientStructure::apply_J(std::span<const double> v) const {
  AmbientVec r{};
  for (int a = 0; a < ambient; ++a)
    for (int b = 0; b < ambient; ++b) r[a] += J[a][b] * v[b];
  return r;
}

double AmbientStructure::omega_bar(std::span<const double> u,
                                   std::span<const double> v) const {
  double s = 0.0;
  for (int a = 0; a < ambient; ++a)
    for (int b = 0; b < ambient; ++b) s += u[a] * omega[a][b] * v[b];
  return s;
}

double AmbientStructure::invariant_defect() const {
  double worst = 0.0;
  for (int a = 0; a < ambient; ++a)
    for (int b = 0; b < ambient; ++b) {
      double jj = 0.0, jtj = 0.0;
      for (int c = 0; c < ambient; ++c) {
        jj += J[a][c] * J[c][b];
        jtj += J[c][a] * J[c][b];
      }
      const double id = a == b ? 1.0 : 0.0;
      worst = std::max({worst, std::abs(jj + id), std::abs(jtj - id),
                        std::abs(omega[a][b] + omega[b][a])});
      // <e_a, e_b> = omega(e_a, J e_b)
      AmbientVec ea{}, eb{};
      ea[a] = 1.0;
      eb[b] = 1.0;
      const AmbientVec jeb = apply_J(eb);
      worst = std::max(worst, std::abs(omega_bar(ea, jeb) - id));
    }
  return worst;
}

namespace {

Box grim_reaper_domain(const GrimReaperParams& p) {
  if (!(p.delta > 0.0 && p.delta < std::numbers::pi / 2) || !(p.y_extent > 0.0))
    throw Error(ErrorCode::config, "grim reaper truncation parameters out of range");
  const double half = std::numbers::pi / 2 - p.delta;
  const Interval axes[] = {{-half, half}, {-p.y_extent, p.y_extent}};
  return Box::make(axes);
}

} // namespace

Chart grim_reaper_chart(const GrimReaperParams& params) {
  return Chart("grim_reaper", grim_reaper_domain(params), 4,
               [](std::span<const Jet3> u, std::span<Jet3> out) {
                 const int d = u[0].dim;
                 out[0] = -log(cos(u[0]));
                 out[1] = u[0];
                 out[2] = u[1];
                 out[3] = Jet3::constant(d, 0.0);
               });
}

Chart flat_plane_chart(double extent) {
  if (!(extent > 0.0)) throw Error(ErrorCode::config, "flat plane extent must be positive");
  const Interval axes[] = {{-extent, extent}, {-extent, extent}};
  return Chart("flat_plane", Box::make(axes), 4,
               [](std::span<const Jet3> u, std::span<Jet3> out) {
                 const int d = u[0].dim;
                 out[0] = u[0];
                 out[1] = Jet3::constant(d, 0.0);
                 out[2] = u[1];
                 out[3] = Jet3::constant(d, 0.0);
               });
}

Chart perturbed_grim_reaper_chart(double epsilon, const GrimReaperParams& params) {
  return Chart("perturbed_grim_reaper", grim_reaper_domain(params), 4,
               [epsilon](std::span<const Jet3> u, std::span<Jet3> out) {
                 const Jet3& x = u[0];
                 const Jet3& y = u[1];
                 out[0] = -log(cos(x)) + epsilon * cos(x) * sin(y);
                 out[1] = x;
                 out[2] = y;
                 out[3] = -epsilon * sin(x) * cos(y);
               });
}

Chart non_lagrangian_chart() {
  const Interval axes[] = {{-1.0, 1.0}, {-1.0, 1.0}};
  return Chart("non_lagrangian", Box::make(axes), 4,
               [](std::span<const Jet3> u, std::span<Jet3> out) {
                 const int d = u[0].dim;
                 out[0] = u[0];
                 out[1] = u[1];
                 out[2] = u[0] * u[0];
                 out[3] = Jet3::constant(d, 0.0);
               });
}

std::vector<std::string> builtin_chart_names() {
  return {"grim_reaper", "flat_plane", "perturbed_grim_reaper", "non_lagrangian"};
}

Chart builtin_chart(const std::string& name, const BuiltinOptions& options) {
  if (name == "grim_reaper" || name == "grim_reaper_cylinder")
    return grim_reaper_chart(options.grim_reaper);
  if (name == "flat_plane") return flat_plane_chart(options.flat_extent);
  if (name == "perturbed_grim_reaper")
    return perturbed_grim_reaper_chart(options.epsilon, options.grim_reaper);
  if (name == "non_lagrangian") return non_lagrangian_chart();
  throw Error(ErrorCode::config, "unknown builtin chart '" + name + "'");
}

Chart expression_chart(std::string name, const std::vector<std::string>& variables,
                       const Box& domain, const std::vector<std::string>& components) {
  if (static_cast<int>(variables.size()) != domain.dim)
    throw Error(ErrorCode::config, "chart '" + name +
                                       "': variable count does not match domain");
  std::vector<Expression> exprs;
  exprs.reserve(components.size());
  for (const auto& c : components) exprs.push_back(Expression::parse(c, variables));
  const int ambient = static_cast<int>(exprs.size());
  return Chart(std::move(name), domain, ambient,
               [exprs = std::move(exprs)](std::span<const Jet3> u, std::span<Jet3> out) {
                 for (std::size_t a = 0; a < exprs.size(); ++a)
                   out[a] = exprs[a].evaluate(u);
               });
}

} // namespace lagstab
