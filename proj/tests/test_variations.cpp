#include "lagstab/error.hpp"
#include "lagstab/variations.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

using namespace lagstab;

namespace {

const std::array<double, 4> kT{1.0, 0.0, 0.0, 0.0};

Box box2(double x0, double x1, double y0, double y1) {
  return Box::make(std::array{Interval{x0, x1}, Interval{y0, y1}});
}

double bump_value(double t) { return std::abs(t) < 1 ? std::pow(1 - t * t, 4) : 0.0; }
double bump_slope(double t) { return std::abs(t) < 1 ? -8 * t * std::pow(1 - t * t, 3) : 0.0; }

} // namespace

TEST_CASE("random potentials are seeded and compactly supported") {
  const Box sup = box2(-1, 1, -2, 2);
  const Potential a = random_potential(sup, 5), b = random_potential(sup, 5),
                  c = random_potential(sup, 6);
  const auto u = std::array{0.2, 0.3};
  CHECK(a(u).value == b(u).value);
  CHECK(a(u).value != c(u).value);
  CHECK(a(std::array{1.5, 0.0}).value == 0.0);
  CHECK(a(std::array{0.0, 2.0}).value == 0.0);
}

TEST_CASE("Hamiltonian variations are closed") {
  const Chart gr = grim_reaper_chart();
  const Box sup = default_support(gr.domain());
  const SampleGrid grid{sup, 25};
  const auto phi = expression_potential("1", {"x", "y"}, sup); // pure bump(x) bump(y)
  CHECK(lagrangian_defect(hamiltonian_variation(phi, gr.domain()), grid) <= 1e-12);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto theta = hamiltonian_variation(random_potential(sup, seed), gr.domain());
    CHECK(theta.kind() == FormKind::hamiltonian);
    CHECK(lagrangian_defect(theta, grid) <= 1e-12);
  }
  const auto g = random_generic_variation(sup, gr.domain(), 7);
  CHECK(g.kind() == FormKind::generic);
  CHECK(lagrangian_defect(g, grid) > 1e-2);
}

TEST_CASE("zero potential gives the zero form") {
  const Chart gr = grim_reaper_chart();
  const Box sup = default_support(gr.domain());
  const auto theta = hamiltonian_variation(expression_potential("0", {"x", "y"}, sup), gr.domain());
  const FormJet f = theta(std::array{0.1, 0.2});
  for (int i = 0; i < 2; ++i) {
    CHECK(f.comp[i].value == 0.0);
    CHECK(f.comp[i].first[0] == 0.0);
  }
}

TEST_CASE("theta = d phi matches differentiation by hand") {
  // phi = cos(x) bump(y / 2): theta_x = -sin x bump(y/2), theta_y = cos x bump'(y/2) / 2
  const Box sup = box2(-1, 1, -2, 2);
  const Potential phi = ScalarField::raw(
      sup, [](std::span<const Jet3> c) { return cos(c[0]) * bump(c[1] * 0.5); }, "cos x taper");
  const auto theta = hamiltonian_variation(phi, box2(-2, 2, -3, 3));
  for (auto [x, y] : {std::pair{0.3, 0.5}, {-0.8, -1.1}, {0.0, 1.9}}) {
    const FormJet f = theta(std::array{x, y});
    CHECK(f.comp[0].value == doctest::Approx(-std::sin(x) * bump_value(y / 2)).epsilon(1e-14));
    CHECK(f.comp[1].value ==
          doctest::Approx(std::cos(x) * bump_slope(y / 2) / 2).epsilon(1e-14));
    // d_y theta_x = d_x theta_y
    CHECK(f.comp[0].first[1] == doctest::Approx(f.comp[1].first[0]).epsilon(1e-14));
  }
}

TEST_CASE("supports must keep two cells of margin") {
  const Box domain = box2(-1, 1, -1, 1);
  const auto phi = expression_potential("x", {"x", "y"}, box2(-0.99, 0.5, -0.5, 0.5));
  try {
    (void)hamiltonian_variation(phi, domain, 40);
    FAIL("expected a support error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::support);
  }
  CHECK_NOTHROW((void)hamiltonian_variation(
      expression_potential("x", {"x", "y"}, default_support(domain)), domain, 40));
}

TEST_CASE("expression variations evaluate their components") {
  const Box domain = box2(-2, 2, -2, 2), sup = box2(-1, 1, -1, 1);
  const auto theta = expression_variation({"x*y", "sin(x)"}, {"x", "y"}, sup, domain, 40);
  const double x = 0.3, y = -0.4, b = bump_value(x) * bump_value(y);
  const FormJet f = theta(std::array{x, y});
  CHECK(f.comp[0].value == doctest::Approx(x * y * b).epsilon(1e-14));
  CHECK(f.comp[1].value == doctest::Approx(std::sin(x) * b).epsilon(1e-14));
  CHECK(theta(std::array{1.5, 0.0}).comp[0].value == 0.0);
}

TEST_CASE("form / normal-field correspondence") {
  const Chart gr = grim_reaper_chart();
  const auto s = AmbientStructure::standard(4, kT);
  const double x = 0.6;
  const PointGeometry pg = point_geometry(gr, s, std::array{x, 0.2});

  // V = nu_1 = (cos x, -sin x, 0, 0) has theta_x = 1 / cos x > 0
  AmbientVec V{};
  V[0] = std::cos(x);
  V[1] = -std::sin(x);
  const Vec theta = form_from_normal_field(V, pg, s);
  CHECK(theta[0] == doctest::Approx(1.0 / std::cos(x)).epsilon(1e-14));
  CHECK(std::abs(theta[1]) < 1e-15);

  const Vec t{0.7, -1.3, 0.0};
  const AmbientVec W = normal_field_from_form(t, pg);
  const Vec back = form_from_normal_field(W, pg, s);
  CHECK(back[0] == doctest::Approx(t[0]).epsilon(1e-14));
  CHECK(back[1] == doctest::Approx(t[1]).epsilon(1e-14));
  for (int a = 0; a < 2; ++a) {
    double tangential = 0.0;
    for (int k = 0; k < 4; ++k) tangential += W[k] * pg.e[a][k];
    CHECK(std::abs(tangential) < 1e-14);
  }

  const PointGeometry nl = point_geometry(non_lagrangian_chart(), s, std::array{0.1, 0.1});
  CHECK_THROWS_AS((void)normal_field_from_form(t, nl), Error);
}

TEST_CASE("covariant calculus on the flat plane reduces to partial derivatives") {
  const Chart flat = flat_plane_chart();
  const auto s = AmbientStructure::standard(4, kT);
  const PointGeometry pg = point_geometry(flat, s, std::array{0.2, -0.3});
  const auto theta = expression_variation({"x^2 * y", "exp(x) * y"}, {"x", "y"},
                                          default_support(flat.domain()), flat.domain(), 40);
  const FormJet f = theta(std::array{0.2, -0.3});
  const CovariantData cd = covariant_calculus(f, pg);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(cd.nabla[i][j] == doctest::Approx(f.comp[j].first[i]));
  CHECK(cd.div == doctest::Approx(f.comp[0].first[0] + f.comp[1].first[1]));
  for (int k = 0; k < 2; ++k) {
    CHECK(cd.rough_laplacian[k] ==
          doctest::Approx(f.comp[k].second[0][0] + f.comp[k].second[1][1]));
    CHECK(cd.grad_div[k] ==
          doctest::Approx(f.comp[0].second[k][0] + f.comp[1].second[k][1]));
  }
}

TEST_CASE("Ricci identity for closed forms") {
  const auto s = AmbientStructure::standard(4, kT);
  for (const char* name : {"grim_reaper", "perturbed_grim_reaper"}) {
    const Chart c = builtin_chart(name);
    const Box sup = default_support(c.domain());
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto theta = hamiltonian_variation(random_potential(sup, seed), c.domain());
      double worst = 0.0;
      for (const Vec& u : SampleGrid{sup, 12}.points()) {
        const auto uu = std::span<const double>(u.data(), 2);
        worst = std::max(worst, ricci_identity_residual(theta(uu), point_geometry(c, s, uu)));
      }
      CHECK(worst <= 1e-7);
    }
  }
  // a non-closed form breaks it on a curved chart
  const Chart pert = perturbed_grim_reaper_chart();
  const Box sup = default_support(pert.domain());
  const auto g = random_generic_variation(sup, pert.domain(), 3);
  double worst = 0.0;
  for (const Vec& u : SampleGrid{sup, 12}.points()) {
    const auto uu = std::span<const double>(u.data(), 2);
    worst = std::max(worst, ricci_identity_residual(g(uu), point_geometry(pert, s, uu)));
  }
  CHECK(worst > 1e-3);
}

TEST_CASE("scaling a form scales its jets") {
  const Chart gr = grim_reaper_chart();
  const Box sup = default_support(gr.domain());
  const auto theta = hamiltonian_variation(random_potential(sup, 2), gr.domain());
  const auto twice = theta.scaled(2.0);
  const auto u = std::array{0.1, 0.4};
  CHECK(twice(u).comp[1].second[0][1] == doctest::Approx(2 * theta(u).comp[1].second[0][1]));
  CHECK(twice.kind() == theta.kind());
}
