// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include "lagstab/commands.hpp"
#include "lagstab/config.hpp"
#include "lagstab/section4.hpp"
#include "lagstab/stability.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace lagstab;

namespace {

const std::array<double, 4> kT{1.0, 0.0, 0.0, 0.0};
const AmbientStructure kS = AmbientStructure::standard(4, kT);

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

OneFormField hamiltonian(const Chart& c, std::uint64_t seed) {
  return hamiltonian_variation(random_potential(default_support(c.domain()), seed), c.domain());
}

VariationReport analyze(const Chart& c, const OneFormField& theta) {
  return analyze_variation(c, kS, theta, QuadratureGrid(theta.support(), 40, 8));
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// shared between criteria 3, 4, 5 and 7
std::vector<VariationReport> g_hamiltonian;

Outcome geometry_oracle() {
  const auto t0 = Clock::now();
  const Chart gr = grim_reaper_chart();
  const double err = grim_reaper_closed_form_errors(gr, SampleGrid{gr.domain(), 50}).max();
  const double t = seconds_since(t0);
  return {err <= 1e-10 && t < 5.0, fmt("max closed-form error %.3g on 50x50, %.2f s", err, t)};
}

Outcome soliton_certificate() {
  const auto gr = soliton_residual(grim_reaper_chart(), kS, SampleGrid{grim_reaper_chart().domain(), 50});
  const auto flat = soliton_residual(flat_plane_chart(), kS, SampleGrid{flat_plane_chart().domain(), 50});
  const bool ok = gr.max_soliton_residual <= 1e-10 && gr.max_lagrangian_defect <= 1e-12 &&
                  flat.max_soliton_residual <= 1e-12 && flat.max_lagrangian_defect <= 1e-12;
  return {ok, fmt("grim reaper residual %.3g defect %.3g; flat plane residual %.3g",
                  gr.max_soliton_residual, gr.max_lagrangian_defect, flat.max_soliton_residual)};
}

Outcome hamiltonian_suite() {
  const auto t0 = Clock::now();
  const Chart gr = grim_reaper_chart();
  g_hamiltonian.clear();
  double pair = 0.0, fd = 0.0, op_margin = INFINITY, sq_min = INFINITY;
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const VariationReport r = analyze(gr, hamiltonian(gr, seed));
    pair = std::max(pair, r.max_pairwise_rel_diff);
    fd = std::max(fd, r.fd_rel_diff);
    op_margin = std::min(op_margin, r.Fpp_operator / r.scale);
    sq_min = std::min(sq_min, r.Fpp_square);
    ok = ok && r.max_pairwise_rel_diff <= 1e-6 && r.fd_rel_diff <= 1e-4 && !r.fd_unstable &&
         r.Fpp_operator >= -1e-6 * r.scale && r.Fpp_square >= 0.0;
    g_hamiltonian.push_back(r);
  }
  const double t = seconds_since(t0);
  return {ok && t < 60.0,
          fmt("20 variations: pairwise %.3g, vs FD %.3g, min Fpp_operator/scale %.3g, "
              "min Fpp_square %.3g, %.1f s",
              pair, fd, op_margin, sq_min, t)};
}

Outcome lagrangian_hypothesis() {
  const Chart gr = grim_reaper_chart();
  const Box sup = default_support(gr.domain());
  double best = 0.0;
  std::uint64_t best_seed = 0;
  for (std::uint64_t seed = 1; seed <= 10 && best <= 1e-2; ++seed) {
    const VariationReport r = analyze(gr, random_generic_variation(sup, gr.domain(), seed));
    const double gap = relative_difference(r.Fpp_square, r.Fpp_operator, r.scale);
    if (gap > best) best = gap, best_seed = seed;
  }
  double closed = 0.0;
  for (const auto& r : g_hamiltonian)
    closed = std::max(closed, relative_difference(r.Fpp_square, r.Fpp_operator, r.scale));
  const bool ok = best > 1e-2 && !g_hamiltonian.empty() && closed <= 1e-6;
  return {ok, fmt("non-closed seed %llu gap %.3g; closed variations max gap %.3g",
                  static_cast<unsigned long long>(best_seed), best, closed)};
}

Outcome proof_steps() {
  double ricci = 0.0, gauss = 0.0, ibp = 0.0;
  for (const char* name : {"grim_reaper", "perturbed_grim_reaper", "flat_plane"}) {
    const Chart c = builtin_chart(name);
    for (const Vec& u : SampleGrid{c.domain(), 20}.points()) {
      const auto t = curvature_tensor(c, kS, std::span<const double>(u.data(), 2));
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
              gauss = std::max(gauss, std::abs(t.R_coord[i][j][k][l] - t.R_gauss[i][j][k][l]));
    }
    const Box sup = default_support(c.domain());
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto theta = hamiltonian(c, seed);
      for (const Vec& u : SampleGrid{sup, 12}.points()) {
        const auto uu = std::span<const double>(u.data(), 2);
        ricci = std::max(ricci, ricci_identity_residual(theta(uu), point_geometry(c, kS, uu)));
      }
    }
  }
  bool ok = g_hamiltonian.size() >= 10;
  for (std::size_t i = 0; i < 10 && i < g_hamiltonian.size(); ++i) {
    const auto& r = g_hamiltonian[i];
    const double d = std::max(std::abs(r.terms.lhs36 - r.terms.rhs36),
                              std::abs(r.terms.lhs37 - r.terms.rhs37)) / r.scale;
    ibp = std::max(ibp, d);
  }
  ok = ok && ricci <= 1e-7 && gauss <= 1e-8 && ibp <= 1e-6;
  return {ok, fmt("Ricci identity %.3g, Gauss equation %.3g, integration by parts %.3g (rel.)",
                  ricci, gauss, ibp)};
}

Outcome stability_pipeline() {
  const Chart gr = grim_reaper_chart();
  const Box sup = default_support(gr.domain());
  const Box strip = Box::make(std::array{Interval{-std::numbers::pi / 2, std::numbers::pi / 2},
                                         gr.domain().axes[1]});
  double margin = INFINITY;
  std::size_t violations = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const RandomPair p = random_section4_pair(sup, seed);
    const Section4Integrals r = grim_reaper_section4_suite(p.v3, p.v4, strip);
    margin = std::min(margin, (r.gradient_integral - r.curvature_integral) / r.gradient_integral);
    violations += r.slice_violations;
  }
  const DirichletGap d = dirichlet_gap(2000);
  const bool ok = margin >= 0.0 && violations == 0 && std::abs(d.eigenvalue - 1.0) <= 1e-3;
  return {ok, fmt("min (gradient - curvature)/gradient %.3g, slice violations %zu, "
                  "Dirichlet gap %.10f",
                  margin, violations, d.eigenvalue)};
}

Outcome criticality() {
  double worst = 0.0;
  for (const auto& r : g_hamiltonian) worst = std::max(worst, std::abs(r.first_var) / r.scale);
  const Chart flat = flat_plane_chart();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const VariationReport r = analyze(flat, hamiltonian(flat, seed));
    worst = std::max(worst, std::abs(r.first_var) / r.scale);
  }
  const Chart pert = perturbed_grim_reaper_chart();
  double fd_rel = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto theta = hamiltonian(pert, seed);
    const QuadratureGrid g(theta.support(), 40, 8);
    const double a = first_variation(pert, kS, theta, g);
    const FdEstimate fd = first_variation_fd(pert, kS, theta, g);
    fd_rel = std::max(fd_rel, std::abs(a - fd.value) / std::abs(a));
  }
  const bool ok = !g_hamiltonian.empty() && worst <= 1e-9 && fd_rel <= 1e-6;
  return {ok, fmt("solitons max |F'|/scale %.3g; perturbed chart F' vs FD %.3g (rel.)", worst,
                  fd_rel)};
}

Outcome determinism() {
  const char* cfg = R"({"variation": {"seed": 11, "count": 3}, "workers": 1})";
  const CommandResult a = run_command("second-variation", cfg);
  const CommandResult b = run_command("second-variation", cfg);
  return {a.exit_code == exit_pass && a.report == b.report,
          fmt("two runs, %zu bytes each, identical: %s", a.report.size(),
              a.report == b.report ? "yes" : "no")};
}

} // namespace

int main() {
  init_logging();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"geometry oracle", geometry_oracle},
      {"soliton certificate", soliton_certificate},
      {"Hamiltonian suite", hamiltonian_suite},
      {"Lagrangian hypothesis", lagrangian_hypothesis},
      {"proof-step identities", proof_steps},
      {"Grim Reaper stability pipeline", stability_pipeline},
      {"criticality", criticality},
      {"determinism", determinism},
  };
  int failed = 0, index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed ? 1 : 0;
}
