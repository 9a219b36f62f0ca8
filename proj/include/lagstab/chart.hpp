#ifndef LAGSTAB_CHART_HPP
#define LAGSTAB_CHART_HPP

#include "lagstab/jet.hpp"

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lagstab {

using AmbientVec = std::array<double, kMaxAmbient>;
using AmbientMat = std::array<AmbientVec, kMaxAmbient>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
};

// Closed axis-aligned box in parameter space.
struct Box {
  int dim = 0;
  std::array<Interval, kMaxDim> axes{};

  static Box make(std::span<const Interval> axes);

  bool contains(std::span<const double> u) const;
  // True when `inner` sits inside this box at distance >= margin per side.
  bool contains(const Box& inner, double margin = 0.0) const;
  Box inset(double margin) const;
  double volume() const;
};

struct ChartJet {
  int dim = 0;
  int ambient = 0;
  std::array<Jet3, kMaxAmbient> comp{};
};

// An analytic parametrized patch u -> Phi(u) of a d-dimensional submanifold
// of R^{2n}. The map is written once in Jet3 arithmetic and therefore yields
// exact derivatives up to order three.
class Chart {
public:
  using Map = std::function<void(std::span<const Jet3> coords,
                                 std::span<Jet3> out)>;

  Chart(std::string name, Box domain, int ambient_dim, Map map);

  const std::string& name() const { return name_; }
  const Box& domain() const { return domain_; }
  int dim() const { return domain_.dim; }
  int ambient_dim() const { return ambient_; }

  // Throws ErrorCode::domain outside the closed domain and
  // ErrorCode::evaluation when the map is not smooth at u.
  ChartJet eval_jet3(std::span<const double> u) const;
  AmbientVec position(std::span<const double> u) const;

private:
  std::string name_;
  Box domain_;
  int ambient_ = 0;
  Map map_;
};

ChartJet eval_jet3(const Chart& chart, std::span<const double> u);

struct FiniteDifferenceJet {
  ChartJet jet;
  // max |D_h - D_2h| over first and second derivatives of all components
  double discrepancy = 0.0;
  bool flagged = false;
};

// Central-difference jets from map values only (test oracle). Third
// derivatives are differences of second-derivative stencils and are not part
// of the discrepancy monitor.
FiniteDifferenceJet finite_difference_jet(const Chart& chart,
                                          std::span<const double> u, double h,
                                          double flag_threshold = 1e-6);

// Third-order Taylor polynomial of every component at u, evaluated at u + v.
AmbientVec taylor3(const ChartJet& jet, std::span<const double> v);

// Flat C^n with translation vector T, the standard complex structure (2x2
// blocks [[0, 1], [-1, 0]]) and Kaehler form omega(u, v) = <J u, v>.
struct AmbientStructure {
  int ambient = 0;
  AmbientVec T{};
  AmbientMat J{};
  AmbientMat omega{};

  static AmbientStructure standard(int ambient_dim, std::span<const double> T);

  AmbientVec apply_J(std::span<const double> v) const;
  double omega_bar(std::span<const double> u, std::span<const double> v) const;
  // Largest violation of J^2 = -I, J^T J = I, omega antisymmetric and
  // <u, v> = omega(u, J v) over basis pairs.
  double invariant_defect() const;
};

struct GrimReaperParams {
  double delta = 0.1;    // x in [-pi/2 + delta, pi/2 - delta]
  double y_extent = 3.0; // y in [-Y, Y]
};

// (-log cos x, x, y, 0)
Chart grim_reaper_chart(const GrimReaperParams& params = {});
// (x, 0, y, 0) on [-2, 2]^2
Chart flat_plane_chart(double extent = 2.0);
// Lagrangian graph of the gradient of G(x) + eps sin x sin y with G' = -log cos:
// (-log cos x + eps cos x sin y, x, y, -eps sin x cos y). Not a soliton.
Chart perturbed_grim_reaper_chart(double epsilon = 0.05,
                                  const GrimReaperParams& params = {});
// (x, y, x^2, 0) on [-1, 1]^2
Chart non_lagrangian_chart();

struct BuiltinOptions {
  GrimReaperParams grim_reaper{};
  double epsilon = 0.05;
  double flat_extent = 2.0;
};

std::vector<std::string> builtin_chart_names();
// Throws ErrorCode::config for an unknown name.
Chart builtin_chart(const std::string& name, const BuiltinOptions& options = {});

// Chart whose components are expressions (see expression.hpp).
Chart expression_chart(std::string name, const std::vector<std::string>& variables,
                       const Box& domain, const std::vector<std::string>& components);

} // namespace lagstab

#endif
