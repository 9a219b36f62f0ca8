#include "lagstab/error.hpp"
#include "lagstab/section4.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

using namespace lagstab;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

Box box2(double x0, double x1, double y0, double y1) {
  return Box::make(std::array{Interval{x0, x1}, Interval{y0, y1}});
}

Box strip() { return box2(-kHalfPi, kHalfPi, -3, 3); }

} // namespace

TEST_CASE("closed-form geometry of the Grim Reaper") {
  const Chart gr = grim_reaper_chart();
  const ClosedFormErrors e = grim_reaper_closed_form_errors(gr, SampleGrid{gr.domain(), 50});
  CHECK(e.max() <= 1e-10);
  CHECK_THROWS_AS((void)grim_reaper_closed_form_errors(
                      builtin_chart("grim_reaper"), SampleGrid{box2(-3, 3, 0, 1), 3}),
                  Error);
}

TEST_CASE("cos x saturates the slice inequality") {
  // int cos^2 = int sin^2 = pi/2 on every slice
  const Box sup = box2(-kHalfPi, kHalfPi, -2, 2);
  const ScalarField v3 = ScalarField::raw(
      sup, [](std::span<const Jet3> c) { return cos(c[0]) * bump(c[1] * 0.5); }, "cos x taper");
  const ScalarField v4 = ScalarField::raw(
      sup, [](std::span<const Jet3> c) { return Jet3::constant(2, 0.0) * c[0]; }, "zero");
  const Section4Integrals r = grim_reaper_section4_suite(v3, v4, strip());
  CHECK(r.wirtinger_lhs > 0.1);
  CHECK(std::abs(r.wirtinger_lhs - r.wirtinger_rhs) <= 1e-12 * r.wirtinger_lhs);
  // taper integral: int bump(y/2)^2 dy = 2 int (1-t^2)^8 dt = 4 * 32768/109395
  CHECK(r.curvature_integral ==
        doctest::Approx(kHalfPi * 4 * 32768.0 / 109395.0).epsilon(1e-12));
}

TEST_CASE("zero fields give zero integrals") {
  const Box sup = box2(-1, 1, -1, 1);
  const ScalarField z = ScalarField::raw(
      sup, [](std::span<const Jet3> c) { return c[0] * 0.0; }, "zero");
  const Section4Integrals r = grim_reaper_section4_suite(z, z, strip(), 10, 4);
  CHECK(r.curvature_integral == 0.0);
  CHECK(r.gradient_integral == 0.0);
  CHECK(r.wirtinger_lhs == 0.0);
  CHECK(r.wirtinger_rhs == 0.0);
  CHECK(r.slice_violations == 0);
}

TEST_CASE("random pairs: curvature integral below gradient integral, slices hold") {
  const Box sup = default_support(grim_reaper_chart().domain());
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const RandomPair p = random_section4_pair(sup, seed);
    const Section4Integrals r = grim_reaper_section4_suite(p.v3, p.v4, strip());
    CHECK(r.curvature_integral > 0.0);
    CHECK(r.curvature_integral <= r.gradient_integral);
    CHECK(r.slice_violations == 0);
    CHECK(r.min_slice_margin >= 0.0);
    CHECK(r.slices == 320u);
  }
}

TEST_CASE("boxes leaving the strip are rejected") {
  const Box sup = box2(-1, 1, -1, 1);
  const RandomPair p = random_section4_pair(sup, 1);
  try {
    (void)grim_reaper_section4_suite(p.v3, p.v4, box2(-1.6, 1.6, -1, 1));
    FAIL("expected a support error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::support);
  }
}

TEST_CASE("general second-variation code reproduces the closed-form pipeline") {
  const Chart gr = grim_reaper_chart();
  const auto s = AmbientStructure::standard(4, std::array{1.0, 0.0, 0.0, 0.0});
  const Box sup = default_support(gr.domain());
  // V3 = bump, V4 = 0
  const ScalarField v3 = expression_potential("1", {"x", "y"}, sup);
  const ScalarField v4 = expression_potential("0", {"x", "y"}, sup);
  const Section4Integrals r = grim_reaper_section4_suite(v3, v4, strip());
  const OneFormField theta = grim_reaper_form_from_components(v3, v4);
  const double fpp = second_variation_divergence(gr, s, theta, QuadratureGrid(sup, 40, 8));
  const double expected = r.gradient_integral - r.curvature_integral;
  CHECK(std::abs(fpp - expected) <= 1e-8 * std::abs(expected));

  // and with both components random
  const RandomPair p = random_section4_pair(sup, 4);
  const Section4Integrals q = grim_reaper_section4_suite(p.v3, p.v4, strip());
  const double f2 = second_variation_divergence(gr, s, grim_reaper_form_from_components(p.v3, p.v4),
                                                QuadratureGrid(sup, 40, 8));
  CHECK(std::abs(f2 - (q.gradient_integral - q.curvature_integral)) <=
        1e-8 * (q.gradient_integral + q.curvature_integral));
}

TEST_CASE("discrete Dirichlet gap") {
  const DirichletGap big = dirichlet_gap(2000);
  CHECK(std::abs(big.eigenvalue - 1.0) <= 1e-3);
  CHECK(big.eigenvector_angle < 1e-2);
  const DirichletGap small = dirichlet_gap(200);
  CHECK(std::abs(small.eigenvalue - 1.0) <= 1e-2);
  CHECK(small.eigenvalue < 1.0); // second-order differences underestimate
  // second-order convergence: halving h divides the error by ~4
  const DirichletGap mid = dirichlet_gap(401);
  CHECK((1 - small.eigenvalue) / (1 - mid.eigenvalue) == doctest::Approx(4.0).epsilon(0.02));
  CHECK_THROWS_AS((void)dirichlet_gap(50), Error);
  try {
    (void)dirichlet_gap(2000, 0.5, 1);
    FAIL("expected non-convergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::convergence);
  }
}
