#include "lagstab/variations.hpp"

#include "lagstab/error.hpp"
#include "lagstab/expression.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace lagstab {

const char* to_string(FormKind kind) {
  switch (kind) {
  case FormKind::hamiltonian: return "hamiltonian";
  case FormKind::closed: return "closed";
  case FormKind::generic: return "generic";
  }
  return "unknown";
}

FormJet FormJet::zero(int dim) {
  FormJet f;
  f.dim = dim;
  for (int i = 0; i < dim; ++i) f.comp[i] = Jet2::zero(dim);
  return f;
}

Vec FormJet::values() const {
  Vec v{};
  for (int i = 0; i < dim; ++i) v[i] = comp[i].value;
  return v;
}

namespace {

std::array<Jet3, kMaxDim> seed_coords(std::span<const double> u, int dim) {
  std::array<Jet3, kMaxDim> c{};
  for (int i = 0; i < dim; ++i) c[i] = Jet3::variable(dim, i, u[i]);
  return c;
}

std::span<const Jet3> as_span(const std::array<Jet3, kMaxDim>& c, int dim) {
  return {c.data(), static_cast<std::size_t>(dim)};
}

// Uniform on [-1, 1] from the top 53 bits; identical on every platform.
double uniform_pm1(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

void multi_indices(int dim, int degree, std::vector<std::array<int, kMaxDim>>& out) {
  for (int total = 0; total <= degree; ++total) {
    std::array<int, kMaxDim> alpha{};
    // distribute `total` over `dim` slots, first slot descending
    std::function<void(int, int)> rec = [&](int slot, int left) {
      if (slot == dim - 1) {
        alpha[slot] = left;
        out.push_back(alpha);
        return;
      }
      for (int k = left; k >= 0; --k) {
        alpha[slot] = k;
        rec(slot + 1, left - k);
      }
    };
    rec(0, total);
  }
}

ScalarBody random_polynomial_body(const Box& support, std::uint64_t seed, int degree) {
  const int d = support.dim;
  std::vector<std::array<int, kMaxDim>> alphas;
  multi_indices(d, degree, alphas);
  std::mt19937_64 rng(seed);
  std::vector<double> coeffs(alphas.size());
  for (double& c : coeffs) c = uniform_pm1(rng);
  return [support, alphas, coeffs, degree](std::span<const Jet3> u) {
    const int dim = support.dim;
    // powers[i][p] = s_i^p with s_i the normalized coordinate
    std::array<std::array<Jet3, 9>, kMaxDim> powers{};
    for (int i = 0; i < dim; ++i) {
      const Jet3 s = (u[i] - support.axes[i].mid()) / (0.5 * support.axes[i].width());
      powers[i][0] = Jet3::constant(dim, 1.0);
      for (int p = 1; p <= std::min(degree, 8); ++p) powers[i][p] = powers[i][p - 1] * s;
    }
    Jet3 total = Jet3::constant(dim, 0.0);
    for (std::size_t m = 0; m < alphas.size(); ++m) {
      Jet3 term = Jet3::constant(dim, coeffs[m]);
      for (int i = 0; i < dim; ++i)
        if (alphas[m][i] > 0) term = term * powers[i][alphas[m][i]];
      total += term;
    }
    return total;
  };
}

std::string box_string(const Box& b) {
  std::ostringstream os;
  os.precision(6);
  for (int i = 0; i < b.dim; ++i)
    os << (i ? "x" : "") << "[" << b.axes[i].lo << "," << b.axes[i].hi << "]";
  return os.str();
}

} // namespace

Jet3 bump_factor(const Box& box, std::span<const Jet3> coords) {
  const int d = box.dim;
  Jet3 r = Jet3::constant(d, 1.0);
  for (int i = 0; i < d; ++i)
    r = r * bump((coords[i] - box.axes[i].mid()) / (0.5 * box.axes[i].width()));
  return r;
}

ScalarField ScalarField::bumped(const Box& support, ScalarBody body, std::string description) {
  ScalarField f;
  f.support_ = support;
  f.description_ = std::move(description);
  f.body_ = [support, body = std::move(body)](std::span<const Jet3> u) {
    return body(u) * bump_factor(support, u);
  };
  return f;
}

ScalarField ScalarField::raw(const Box& support, ScalarBody body, std::string description) {
  ScalarField f;
  f.support_ = support;
  f.body_ = std::move(body);
  f.description_ = std::move(description);
  return f;
}

Jet3 ScalarField::operator()(std::span<const double> u) const {
  const int d = support_.dim;
  if (!support_.contains(u)) return Jet3::constant(d, 0.0);
  const auto coords = seed_coords(u, d);
  return body_(as_span(coords, d));
}

Potential expression_potential(const std::string& expression,
                               const std::vector<std::string>& variables,
                               const Box& support) {
  if (static_cast<int>(variables.size()) != support.dim)
    throw Error(ErrorCode::config, "potential variables do not match the support box");
  const Expression e = Expression::parse(expression, variables);
  return ScalarField::bumped(
      support, [e](std::span<const Jet3> u) { return e.evaluate(u); },
      "(" + expression + ") * bump on " + box_string(support));
}

Potential random_potential(const Box& support, std::uint64_t seed, int degree) {
  if (degree < 0 || degree > 8)
    throw Error(ErrorCode::invalid_argument, "random polynomial degree must lie in [0, 8]");
  return ScalarField::bumped(support, random_polynomial_body(support, seed, degree),
                             "random degree-" + std::to_string(degree) +
                                 " polynomial * bump, seed " + std::to_string(seed));
}

OneFormField::OneFormField(Box support, FormKind kind, Evaluator eval,
                           std::string description, std::optional<std::uint64_t> seed)
    : support_(support), kind_(kind), eval_(std::move(eval)),
      description_(std::move(description)), seed_(seed) {}

FormJet OneFormField::operator()(std::span<const double> u) const {
  if (!support_.contains(u)) return FormJet::zero(support_.dim);
  return eval_(u);
}

OneFormField OneFormField::with_seed(std::uint64_t seed) const {
  OneFormField out = *this;
  out.seed_ = seed;
  return out;
}

OneFormField OneFormField::scaled(double factor) const {
  auto inner = eval_;
  return OneFormField(
      support_, kind_,
      [inner, factor](std::span<const double> u) {
        FormJet f = inner(u);
        for (int i = 0; i < f.dim; ++i) {
          Jet2& c = f.comp[i];
          c.value *= factor;
          for (int j = 0; j < f.dim; ++j) {
            c.first[j] *= factor;
            for (int k = 0; k < f.dim; ++k) c.second[j][k] *= factor;
          }
        }
        return f;
      },
      description_ + " scaled by " + std::to_string(factor), seed_);
}

void check_support(const Box& support, const Box& domain, int cells) {
  if (support.dim != domain.dim)
    throw Error(ErrorCode::support, "support and domain dimensions differ");
  for (int i = 0; i < support.dim; ++i) {
    const double margin = 2.0 * support.axes[i].width() / cells;
    if (support.axes[i].lo < domain.axes[i].lo + margin ||
        support.axes[i].hi > domain.axes[i].hi - margin)
      throw Error(ErrorCode::support,
                  "variation support " + box_string(support) +
                      " must sit inside the domain " + box_string(domain) +
                      " with a margin of two quadrature cells");
  }
}

Box default_support(const Box& domain, double fraction) {
  if (!(fraction > 0.0 && fraction < 0.5))
    throw Error(ErrorCode::invalid_argument, "support fraction must lie in (0, 1/2)");
  Box out = domain;
  for (int i = 0; i < domain.dim; ++i) {
    const double m = fraction * domain.axes[i].width();
    out.axes[i] = {domain.axes[i].lo + m, domain.axes[i].hi - m};
  }
  return out;
}

OneFormField hamiltonian_variation(const Potential& phi, const Box& domain, int cells) {
  check_support(phi.support(), domain, cells);
  const int d = phi.support().dim;
  return OneFormField(
      phi.support(), FormKind::hamiltonian,
      [phi, d](std::span<const double> u) {
        const Jet3 p = phi(u);
        FormJet f;
        f.dim = d;
        for (int i = 0; i < d; ++i) f.comp[i] = partial(p, i);
        return f;
      },
      "d(" + phi.description() + ")");
}

OneFormField form_from_fields(const std::vector<ScalarField>& components, FormKind kind,
                              std::string description) {
  if (components.empty()) throw Error(ErrorCode::invalid_argument, "no components");
  const Box support = components.front().support();
  const int d = support.dim;
  if (static_cast<int>(components.size()) != d)
    throw Error(ErrorCode::config, "1-form needs one component per coordinate");
  return OneFormField(
      support, kind,
      [components, d](std::span<const double> u) {
        FormJet f;
        f.dim = d;
        for (int i = 0; i < d; ++i) f.comp[i] = truncate(components[i](u));
        return f;
      },
      std::move(description));
}

OneFormField generic_variation(const std::vector<ScalarBody>& components,
                               const Box& support, const Box& domain, int cells,
                               std::string description) {
  check_support(support, domain, cells);
  std::vector<ScalarField> fields;
  for (const auto& body : components)
    fields.push_back(ScalarField::bumped(support, body, description));
  return form_from_fields(fields, FormKind::generic, std::move(description));
}

OneFormField expression_variation(const std::vector<std::string>& components,
                                  const std::vector<std::string>& variables,
                                  const Box& support, const Box& domain, int cells) {
  std::vector<ScalarBody> bodies;
  std::string description = "(";
  for (const auto& c : components) {
    const Expression e = Expression::parse(c, variables);
    bodies.push_back([e](std::span<const Jet3> u) { return e.evaluate(u); });
    description += (description.size() > 1 ? ", " : "") + c;
  }
  description += ") * bump on " + box_string(support);
  return generic_variation(bodies, support, domain, cells, description);
}

OneFormField random_generic_variation(const Box& support, const Box& domain,
                                      std::uint64_t seed, int cells) {
  check_support(support, domain, cells);
  std::vector<ScalarField> fields;
  for (int i = 0; i < support.dim; ++i)
    fields.push_back(ScalarField::bumped(
        support, random_polynomial_body(support, seed * 1000003ULL + static_cast<std::uint64_t>(i), 4),
        ""));
  OneFormField f = form_from_fields(fields, FormKind::generic,
                                    "random generic 1-form, seed " + std::to_string(seed));
  return OneFormField(
      support, FormKind::generic, [f](std::span<const double> u) { return f(u); },
      f.description(), seed);
}

OneFormField zero_variation(const Box& support) {
  const int d = support.dim;
  return OneFormField(
      support, FormKind::hamiltonian,
      [d](std::span<const double>) { return FormJet::zero(d); }, "zero");
}

double lagrangian_defect(const OneFormField& theta, std::span<const Vec> points) {
  double worst = 0.0;
  const int d = theta.support().dim;
  for (const Vec& p : points) {
    const FormJet f = theta(std::span<const double>(p.data(), static_cast<std::size_t>(d)));
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        worst = std::max(worst, std::abs(f.comp[j].first[i] - f.comp[i].first[j]));
  }
  return worst;
}

double lagrangian_defect(const OneFormField& theta, const SampleGrid& grid) {
  const std::vector<Vec> pts = grid.points();
  return lagrangian_defect(theta, pts);
}

CovariantData covariant_calculus(const FormJet& theta, const PointGeometry& pg) {
  const int d = pg.dim;
  CovariantData out;

  // nabla_i theta_j and its coordinate derivative d_m(nabla_i theta_j)
  Ten3 d_nabla{}; // [m][i][j]
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double v = theta.comp[j].first[i];
      for (int k = 0; k < d; ++k) v -= pg.gamma[k][i][j] * theta.comp[k].value;
      out.nabla[i][j] = v;
      for (int m = 0; m < d; ++m) {
        double w = theta.comp[j].second[m][i];
        for (int k = 0; k < d; ++k)
          w -= pg.gamma_partial[m][k][i][j] * theta.comp[k].value +
               pg.gamma[k][i][j] * theta.comp[k].first[m];
        d_nabla[m][i][j] = w;
      }
    }

  for (int m = 0; m < d; ++m)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double v = d_nabla[m][i][j];
        for (int l = 0; l < d; ++l)
          v -= pg.gamma[l][m][i] * out.nabla[l][j] + pg.gamma[l][m][j] * out.nabla[i][l];
        out.nabla2[m][i][j] = v;
      }

  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out.div += pg.g_inv[i][j] * out.nabla[i][j];

  for (int k = 0; k < d; ++k) {
    double lap = 0.0;
    double gd = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        lap += pg.g_inv[i][j] * out.nabla2[i][j][k];
        gd += pg.g_inv_partial[k][i][j] * out.nabla[i][j] + pg.g_inv[i][j] * d_nabla[k][i][j];
      }
    out.rough_laplacian[k] = lap;
    out.grad_div[k] = gd;
  }
  return out;
}

double ricci_identity_residual(const FormJet& theta, const PointGeometry& pg) {
  const CovariantData cd = covariant_calculus(theta, pg);
  const Mat ric = curvature_tensor(pg).ricci;
  const Vec lap = frame_components(cd.rough_laplacian, pg);
  const Vec grad_div = frame_components(cd.grad_div, pg);
  const Vec v = frame_components(theta.values(), pg);
  double worst = 0.0;
  for (int a = 0; a < pg.dim; ++a) {
    double r = lap[a] - grad_div[a];
    for (int b = 0; b < pg.dim; ++b) r -= ric[a][b] * v[b];
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

Vec frame_components(const Vec& theta, const PointGeometry& pg) {
  Vec v{};
  for (int a = 0; a < pg.dim; ++a)
    for (int i = 0; i < pg.dim; ++i) v[a] += pg.frame[a][i] * theta[i];
  return v;
}

AmbientVec normal_field_from_form(const Vec& theta, const PointGeometry& pg) {
  if (!pg.lagrangian)
    throw Error(ErrorCode::unsupported,
                "the form/normal-field correspondence needs a Lagrangian chart");
  const Vec v = frame_components(theta, pg);
  AmbientVec V{};
  for (int a = 0; a < pg.dim; ++a)
    for (int x = 0; x < pg.ambient; ++x) V[x] += v[a] * pg.nu[a][x];
  return V;
}

Vec form_from_normal_field(const AmbientVec& V, const PointGeometry& pg,
                           const AmbientStructure& structure) {
  Vec theta{};
  for (int i = 0; i < pg.dim; ++i) theta[i] = -structure.omega_bar(V, pg.tangent[i]);
  return theta;
}

} // namespace lagstab
