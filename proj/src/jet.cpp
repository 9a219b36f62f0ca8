#include "lagstab/jet.hpp"

#include "lagstab/error.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

namespace lagstab {

namespace {

void mirror(Jet3& a) {
  const int d = a.dim;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      a.second[j][i] = a.second[i][j];
      for (int k = j; k < d; ++k) {
        const double t = a.third[i][j][k];
        a.third[i][k][j] = t;
        a.third[j][i][k] = t;
        a.third[j][k][i] = t;
        a.third[k][i][j] = t;
        a.third[k][j][i] = t;
      }
    }
}

[[noreturn]] void fail(const std::string& what) {
  throw Error(ErrorCode::evaluation, what);
}

bool is_small_integer(double p) {
  return p == std::floor(p) && p >= 0.0 && p <= 16.0;
}

} // namespace

const char* to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::invalid_argument: return "invalid_argument";
  case ErrorCode::config: return "config";
  case ErrorCode::domain: return "domain";
  case ErrorCode::evaluation: return "evaluation";
  case ErrorCode::immersion: return "immersion";
  case ErrorCode::precondition: return "precondition";
  case ErrorCode::unsupported: return "unsupported";
  case ErrorCode::support: return "support";
  case ErrorCode::convergence: return "convergence";
  }
  return "unknown";
}

Jet3 Jet3::constant(int dim, double c) {
  Jet3 j;
  j.dim = dim;
  j.value = c;
  return j;
}

Jet3 Jet3::variable(int dim, int index, double at) {
  assert(index >= 0 && index < dim && dim <= kMaxDim);
  Jet3 j = constant(dim, at);
  j.first[index] = 1.0;
  return j;
}

double Jet3::symmetry_defect() const {
  double worst = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      worst = std::max(worst, std::abs(second[i][j] - second[j][i]));
      for (int k = 0; k < dim; ++k) {
        const double t = third[i][j][k];
        worst = std::max({worst, std::abs(t - third[i][k][j]),
                          std::abs(t - third[j][i][k]),
                          std::abs(t - third[k][j][i])});
      }
    }
  return worst;
}

bool Jet3::all_finite() const {
  if (!std::isfinite(value)) return false;
  for (int i = 0; i < dim; ++i) {
    if (!std::isfinite(first[i])) return false;
    for (int j = 0; j < dim; ++j) {
      if (!std::isfinite(second[i][j])) return false;
      for (int k = 0; k < dim; ++k)
        if (!std::isfinite(third[i][j][k])) return false;
    }
  }
  return true;
}

Jet3& Jet3::operator+=(const Jet3& o) {
  assert(dim == o.dim);
  value += o.value;
  for (int i = 0; i < dim; ++i) {
    first[i] += o.first[i];
    for (int j = 0; j < dim; ++j) {
      second[i][j] += o.second[i][j];
      for (int k = 0; k < dim; ++k) third[i][j][k] += o.third[i][j][k];
    }
  }
  return *this;
}

Jet3& Jet3::operator-=(const Jet3& o) {
  assert(dim == o.dim);
  value -= o.value;
  for (int i = 0; i < dim; ++i) {
    first[i] -= o.first[i];
    for (int j = 0; j < dim; ++j) {
      second[i][j] -= o.second[i][j];
      for (int k = 0; k < dim; ++k) third[i][j][k] -= o.third[i][j][k];
    }
  }
  return *this;
}

Jet3& Jet3::operator*=(double c) {
  value *= c;
  for (int i = 0; i < dim; ++i) {
    first[i] *= c;
    for (int j = 0; j < dim; ++j) {
      second[i][j] *= c;
      for (int k = 0; k < dim; ++k) third[i][j][k] *= c;
    }
  }
  return *this;
}

Jet3& Jet3::operator*=(const Jet3& o) {
  *this = *this * o;
  return *this;
}

Jet3 operator*(const Jet3& a, const Jet3& b) {
  assert(a.dim == b.dim);
  const int d = a.dim;
  Jet3 r = Jet3::constant(d, a.value * b.value);
  for (int i = 0; i < d; ++i) {
    r.first[i] = a.first[i] * b.value + a.value * b.first[i];
    for (int j = i; j < d; ++j) {
      r.second[i][j] = a.second[i][j] * b.value + a.first[i] * b.first[j] +
                       a.first[j] * b.first[i] + a.value * b.second[i][j];
      for (int k = j; k < d; ++k) {
        r.third[i][j][k] =
            a.third[i][j][k] * b.value + a.value * b.third[i][j][k] +
            a.second[i][j] * b.first[k] + a.second[i][k] * b.first[j] +
            a.second[j][k] * b.first[i] + a.first[i] * b.second[j][k] +
            a.first[j] * b.second[i][k] + a.first[k] * b.second[i][j];
      }
    }
  }
  mirror(r);
  return r;
}

Jet3 compose(const Jet3& a, double d0, double d1, double d2, double d3) {
  const int d = a.dim;
  Jet3 r = Jet3::constant(d, d0);
  for (int i = 0; i < d; ++i) {
    r.first[i] = d1 * a.first[i];
    for (int j = i; j < d; ++j) {
      r.second[i][j] = d2 * a.first[i] * a.first[j] + d1 * a.second[i][j];
      for (int k = j; k < d; ++k) {
        r.third[i][j][k] =
            d3 * a.first[i] * a.first[j] * a.first[k] +
            d2 * (a.second[i][j] * a.first[k] + a.second[i][k] * a.first[j] +
                  a.second[j][k] * a.first[i]) +
            d1 * a.third[i][j][k];
      }
    }
  }
  mirror(r);
  return r;
}

Jet3 operator+(Jet3 a, const Jet3& b) { return a += b; }
Jet3 operator-(Jet3 a, const Jet3& b) { return a -= b; }
Jet3 operator-(Jet3 a) { return a *= -1.0; }
Jet3 operator/(const Jet3& a, const Jet3& b) { return a * reciprocal(b); }
Jet3 operator+(Jet3 a, double c) {
  a.value += c;
  return a;
}
Jet3 operator+(double c, Jet3 a) { return std::move(a) + c; }
Jet3 operator-(Jet3 a, double c) {
  a.value -= c;
  return a;
}
Jet3 operator-(double c, const Jet3& a) { return -a + c; }
Jet3 operator*(Jet3 a, double c) { return a *= c; }
Jet3 operator*(double c, Jet3 a) { return a *= c; }
Jet3 operator/(Jet3 a, double c) {
  if (c == 0.0) fail("division by zero");
  return a *= 1.0 / c;
}
Jet3 operator/(double c, const Jet3& a) { return reciprocal(a) * c; }

Jet3 reciprocal(const Jet3& a) {
  const double x = a.value;
  if (x == 0.0) fail("division by zero");
  const double r = 1.0 / x;
  return compose(a, r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r);
}

Jet3 sin(const Jet3& a) {
  const double s = std::sin(a.value), c = std::cos(a.value);
  return compose(a, s, c, -s, -c);
}

Jet3 cos(const Jet3& a) {
  const double s = std::sin(a.value), c = std::cos(a.value);
  return compose(a, c, -s, -c, s);
}

Jet3 tan(const Jet3& a) {
  const double c = std::cos(a.value);
  if (std::abs(c) < 1e-12) fail("tan evaluated at a pole");
  const double t = std::tan(a.value);
  const double sec2 = 1.0 + t * t;
  // (tan)' = sec^2, (tan)'' = 2 sec^2 tan, (tan)''' = 2 sec^2 (1 + 3 tan^2)
  return compose(a, t, sec2, 2.0 * sec2 * t, 2.0 * sec2 * (1.0 + 3.0 * t * t));
}

Jet3 exp(const Jet3& a) {
  const double e = std::exp(a.value);
  if (!std::isfinite(e)) fail("exp overflow");
  return compose(a, e, e, e, e);
}

Jet3 log(const Jet3& a) {
  const double x = a.value;
  if (!(x > 0.0)) fail("log of a non-positive argument");
  const double r = 1.0 / x;
  return compose(a, std::log(x), r, -r * r, 2.0 * r * r * r);
}

Jet3 sqrt(const Jet3& a) {
  const double x = a.value;
  if (!(x > 0.0)) fail("sqrt is not differentiable at a non-positive argument");
  const double s = std::sqrt(x);
  return compose(a, s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x));
}

Jet3 pow(const Jet3& a, double p) {
  if (is_small_integer(p)) {
    Jet3 r = Jet3::constant(a.dim, 1.0);
    Jet3 base = a;
    for (unsigned n = static_cast<unsigned>(p); n != 0; n >>= 1) {
      if (n & 1u) r = r * base;
      if (n > 1) base = base * base;
    }
    return r;
  }
  const double x = a.value;
  const bool integral = p == std::floor(p);
  if (x == 0.0 || (!integral && x < 0.0))
    fail("power with exponent " + std::to_string(p) + " is not smooth at " +
         std::to_string(x));
  const double v = std::pow(x, p);
  return compose(a, v, p * v / x, p * (p - 1.0) * v / (x * x),
                 p * (p - 1.0) * (p - 2.0) * v / (x * x * x));
}

Jet3 pow(const Jet3& a, const Jet3& b) {
  bool constant_exponent = true;
  for (int i = 0; i < b.dim && constant_exponent; ++i) {
    if (b.first[i] != 0.0) constant_exponent = false;
    for (int j = 0; j < b.dim && constant_exponent; ++j) {
      if (b.second[i][j] != 0.0) constant_exponent = false;
      for (int k = 0; k < b.dim && constant_exponent; ++k)
        if (b.third[i][j][k] != 0.0) constant_exponent = false;
    }
  }
  if (constant_exponent) return pow(a, b.value);
  return exp(b * log(a));
}

Jet3 bump(const Jet3& a) {
  const double t = a.value;
  if (std::abs(t) >= 1.0) return Jet3::constant(a.dim, 0.0);
  const double q = 1.0 - t * t;
  const double q2 = q * q;
  // f = q^4, f' = -8 t q^3, f'' = -8 q^3 + 48 t^2 q^2,
  // f''' = 48 t q^2 + 96 t q^2 - 192 t^3 q
  return compose(a, q2 * q2, -8.0 * t * q2 * q,
                 -8.0 * q2 * q + 48.0 * t * t * q2,
                 144.0 * t * q2 - 192.0 * t * t * t * q);
}

Jet2 truncate(const Jet3& f) {
  Jet2 r{f.dim, f.value, f.first, f.second};
  return r;
}

Jet2 partial(const Jet3& f, int index) {
  if (index < 0 || index >= f.dim || f.dim > kMaxDim)
    throw Error(ErrorCode::invalid_argument, "partial: index out of range");
  Jet2 r;
  r.dim = f.dim;
  r.value = f.first[index];
  for (int i = 0; i < f.dim; ++i) {
    r.first[i] = f.second[index][i];
    for (int j = 0; j < f.dim; ++j) r.second[i][j] = f.third[index][i][j];
  }
  return r;
}

} // namespace lagstab
