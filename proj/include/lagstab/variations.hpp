#ifndef LAGSTAB_VARIATIONS_HPP
#define LAGSTAB_VARIATIONS_HPP

#include "lagstab/geometry.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lagstab {

// hamiltonian: theta = d phi. closed: d theta = 0. generic: anything.
// On a box every closed form is exact, so the first two coincide in practice;
// the distinction is kept because the stability statement is about the
// strictly larger closed class.
enum class FormKind { hamiltonian, closed, generic };

const char* to_string(FormKind kind);

// Coordinate components theta_i of a 1-form with their first and second
// partial derivatives.
struct FormJet {
  int dim = 0;
  std::array<Jet2, kMaxDim> comp{};

  static FormJet zero(int dim);
  Vec values() const;
};

// A scalar body written in jet arithmetic over seeded coordinate jets.
using ScalarBody = std::function<Jet3(std::span<const Jet3> coords)>;

// prod_i bump((u_i - mid_i) / half_width_i)
Jet3 bump_factor(const Box& box, std::span<const Jet3> coords);

// Compactly supported scalar field: evaluates to zero outside `support`.
class ScalarField {
public:
  // The field is body * bump_factor(support).
  static ScalarField bumped(const Box& support, ScalarBody body, std::string description);
  // The body is trusted to vanish outside `support` to third order.
  static ScalarField raw(const Box& support, ScalarBody body, std::string description);

  Jet3 operator()(std::span<const double> u) const;
  const Box& support() const { return support_; }
  const std::string& description() const { return description_; }

private:
  Box support_;
  ScalarBody body_;
  std::string description_;
};

using Potential = ScalarField;

Potential expression_potential(const std::string& expression,
                               const std::vector<std::string>& variables,
                               const Box& support);
// Degree <= `degree` polynomial in the support-normalized coordinates with
// coefficients uniform in [-1, 1] drawn from `seed`, times the bump.
Potential random_potential(const Box& support, std::uint64_t seed, int degree = 4);

class OneFormField {
public:
  using Evaluator = std::function<FormJet(std::span<const double> u)>;

  OneFormField(Box support, FormKind kind, Evaluator eval, std::string description,
               std::optional<std::uint64_t> seed = std::nullopt);

  // Zero outside the support box.
  FormJet operator()(std::span<const double> u) const;

  const Box& support() const { return support_; }
  FormKind kind() const { return kind_; }
  const std::string& description() const { return description_; }
  std::optional<std::uint64_t> seed() const { return seed_; }

  OneFormField scaled(double factor) const;
  OneFormField with_seed(std::uint64_t seed) const;

private:
  Box support_;
  FormKind kind_;
  Evaluator eval_;
  std::string description_;
  std::optional<std::uint64_t> seed_;
};

// Throws ErrorCode::support unless the support sits inside `domain` with a
// margin of at least two quadrature cells per side.
void check_support(const Box& support, const Box& domain, int cells);
// Domain shrunk by `fraction` of its width on each side of every axis; any
// fraction >= 2 / (cells + 4) passes check_support.
Box default_support(const Box& domain, double fraction = 0.075);

OneFormField hamiltonian_variation(const Potential& phi, const Box& domain, int cells = 40);
// Each component is bumped to the support box.
OneFormField generic_variation(const std::vector<ScalarBody>& components,
                               const Box& support, const Box& domain, int cells,
                               std::string description);
OneFormField expression_variation(const std::vector<std::string>& components,
                                  const std::vector<std::string>& variables,
                                  const Box& support, const Box& domain, int cells);
OneFormField random_generic_variation(const Box& support, const Box& domain,
                                      std::uint64_t seed, int cells = 40);
// Components given directly as compactly supported scalar fields.
OneFormField form_from_fields(const std::vector<ScalarField>& components, FormKind kind,
                              std::string description);
OneFormField zero_variation(const Box& support);

// max |d_i theta_j - d_j theta_i| over the points.
double lagrangian_defect(const OneFormField& theta, std::span<const Vec> points);
double lagrangian_defect(const OneFormField& theta, const SampleGrid& grid);

struct CovariantData {
  Mat nabla{};          // [i][j] = nabla_i theta_j
  Ten3 nabla2{};        // [i][j][k] = nabla_i nabla_j theta_k
  double div = 0.0;     // g^{ij} nabla_i theta_j
  Vec rough_laplacian{};// [k] = g^{ij} nabla_i nabla_j theta_k
  Vec grad_div{};       // [k] = d_k div, by direct differentiation of div
};

CovariantData covariant_calculus(const FormJet& theta, const PointGeometry& pg);

// max_a |(Delta theta)_a - (d div theta)_a - Ric_ab theta_b| in the orthonormal
// frame, with Ric from the second fundamental form. Vanishes for closed theta.
double ricci_identity_residual(const FormJet& theta, const PointGeometry& pg);

// V_a = theta(e_a)
Vec frame_components(const Vec& theta, const PointGeometry& pg);
// V = sum_a theta(e_a) nu_a = J theta^sharp. Throws ErrorCode::unsupported at
// non-Lagrangian points.
AmbientVec normal_field_from_form(const Vec& theta, const PointGeometry& pg);
// theta_i = -omega(V, d_i Phi)
Vec form_from_normal_field(const AmbientVec& V, const PointGeometry& pg,
                           const AmbientStructure& structure);

} // namespace lagstab

#endif
