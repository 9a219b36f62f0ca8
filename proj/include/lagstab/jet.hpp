#ifndef LAGSTAB_JET_HPP
#define LAGSTAB_JET_HPP

#include <array>
#include <cstddef>

namespace lagstab {

inline constexpr int kMaxDim = 3;
inline constexpr int kMaxAmbient = 2 * kMaxDim;

using Vec = std::array<double, kMaxDim>;
using Mat = std::array<Vec, kMaxDim>;
using Ten3 = std::array<Mat, kMaxDim>;
using Ten4 = std::array<Ten3, kMaxDim>;

// Truncated multivariate Taylor expansion to third order in `dim` variables:
// value, gradient, Hessian and third-derivative tensor. Second and third
// arrays are kept fully symmetric; every operation computes the sorted
// index combinations once and mirrors them.
struct Jet3 {
  int dim = 0;
  double value = 0.0;
  Vec first{};
  Mat second{};
  Ten3 third{};

  static Jet3 constant(int dim, double c);
  static Jet3 variable(int dim, int index, double at);

  // Largest deviation from index-permutation symmetry in second/third.
  double symmetry_defect() const;
  bool all_finite() const;

  Jet3& operator+=(const Jet3& o);
  Jet3& operator-=(const Jet3& o);
  Jet3& operator*=(const Jet3& o);
  Jet3& operator*=(double c);
};

// Value, gradient and Hessian; the data carried by 1-form components.
struct Jet2 {
  int dim = 0;
  double value = 0.0;
  Vec first{};
  Mat second{};

  static Jet2 zero(int dim) { return Jet2{dim}; }
};

Jet2 truncate(const Jet3& f);
// Partial derivative along `index`, dropping one order.
Jet2 partial(const Jet3& f, int index);

Jet3 operator+(Jet3 a, const Jet3& b);
Jet3 operator-(Jet3 a, const Jet3& b);
Jet3 operator-(Jet3 a);
Jet3 operator*(const Jet3& a, const Jet3& b);
Jet3 operator/(const Jet3& a, const Jet3& b);
Jet3 operator+(Jet3 a, double c);
Jet3 operator+(double c, Jet3 a);
Jet3 operator-(Jet3 a, double c);
Jet3 operator-(double c, const Jet3& a);
Jet3 operator*(Jet3 a, double c);
Jet3 operator*(double c, Jet3 a);
Jet3 operator/(Jet3 a, double c);
Jet3 operator/(double c, const Jet3& a);

// f∘a given the outer derivatives d0..d3 of f at a.value.
Jet3 compose(const Jet3& a, double d0, double d1, double d2, double d3);

Jet3 reciprocal(const Jet3& a);
Jet3 sin(const Jet3& a);
Jet3 cos(const Jet3& a);
Jet3 tan(const Jet3& a);
Jet3 exp(const Jet3& a);
Jet3 log(const Jet3& a);
Jet3 sqrt(const Jet3& a);
Jet3 pow(const Jet3& a, double p);
Jet3 pow(const Jet3& a, const Jet3& b);
// (1 - t^2)^4 on |t| < 1, zero elsewhere; C^3 across |t| = 1.
Jet3 bump(const Jet3& a);

} // namespace lagstab

#endif
