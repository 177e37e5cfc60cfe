#pragma once

// Second-order forward-mode jets over the two disc coordinates (x, y).
//
// A jet carries the value of a scalar expression together with its first and
// second partials with respect to the disc coordinates:
//
//   v; gx = d/dx, gy = d/dy; hxx, hxy, hyy   (symmetric Hessian, packed).
//
// Propagation is the exact chain rule, so a jet evaluated at a point equals
// the analytic derivatives of the composite expression there.
//
// Error policy: true domain violations (division by zero, log/sqrt outside
// their domain, negative powers of zero) throw JetDomainError at the site of
// the offending operation. Non-finite values arising from overflow are not
// checked per-op; consumers that need the guarantee call is_finite() on the
// result (the loss evaluators do).

#include <cmath>
#include <stdexcept>
#include <string>

namespace plateau {

class JetDomainError : public std::domain_error {
 public:
  JetDomainError(const char* op, double value)
      : std::domain_error(std::string("jet op '") + op +
                          "' outside its domain at value " +
                          std::to_string(value)) {}
};

template <class S>
struct BasicJet {
  S v{}, gx{}, gy{}, hxx{}, hxy{}, hyy{};
};

using Jet2 = BasicJet<double>;

constexpr Jet2 jet_const(double c) { return {c, 0, 0, 0, 0, 0}; }
constexpr Jet2 jet_x(double x) { return {x, 1, 0, 0, 0, 0}; }
constexpr Jet2 jet_y(double y) { return {y, 0, 1, 0, 0, 0}; }

inline bool is_finite(const Jet2& a) {
  return std::isfinite(a.v) && std::isfinite(a.gx) && std::isfinite(a.gy) &&
         std::isfinite(a.hxx) && std::isfinite(a.hxy) && std::isfinite(a.hyy);
}

// ---- linear ops ----

constexpr Jet2 operator+(const Jet2& a, const Jet2& b) {
  return {a.v + b.v,     a.gx + b.gx,   a.gy + b.gy,
          a.hxx + b.hxx, a.hxy + b.hxy, a.hyy + b.hyy};
}

constexpr Jet2 operator-(const Jet2& a, const Jet2& b) {
  return {a.v - b.v,     a.gx - b.gx,   a.gy - b.gy,
          a.hxx - b.hxx, a.hxy - b.hxy, a.hyy - b.hyy};
}

constexpr Jet2 operator-(const Jet2& a) {
  return {-a.v, -a.gx, -a.gy, -a.hxx, -a.hxy, -a.hyy};
}

constexpr Jet2 operator+(const Jet2& a, double c) {
  Jet2 r = a;
  r.v += c;
  return r;
}
constexpr Jet2 operator+(double c, const Jet2& a) { return a + c; }
constexpr Jet2 operator-(const Jet2& a, double c) { return a + (-c); }
constexpr Jet2 operator-(double c, const Jet2& a) { return (-a) + c; }

constexpr Jet2 operator*(const Jet2& a, double c) {
  return {a.v * c, a.gx * c, a.gy * c, a.hxx * c, a.hxy * c, a.hyy * c};
}
constexpr Jet2 operator*(double c, const Jet2& a) { return a * c; }
constexpr Jet2 operator/(const Jet2& a, double c) { return a * (1.0 / c); }

// ---- products and quotients ----

constexpr Jet2 operator*(const Jet2& a, const Jet2& b) {
  return {a.v * b.v,
          a.gx * b.v + a.v * b.gx,
          a.gy * b.v + a.v * b.gy,
          a.hxx * b.v + 2.0 * a.gx * b.gx + a.v * b.hxx,
          a.hxy * b.v + a.gx * b.gy + a.gy * b.gx + a.v * b.hxy,
          a.hyy * b.v + 2.0 * a.gy * b.gy + a.v * b.hyy};
}

// Composition with a scalar function given f(a.v), f'(a.v), f''(a.v).
constexpr Jet2 jet_compose(const Jet2& a, double f0, double f1, double f2) {
  return {f0,
          f1 * a.gx,
          f1 * a.gy,
          f2 * a.gx * a.gx + f1 * a.hxx,
          f2 * a.gx * a.gy + f1 * a.hxy,
          f2 * a.gy * a.gy + f1 * a.hyy};
}

inline Jet2 recip(const Jet2& a) {
  if (a.v == 0.0) throw JetDomainError("recip", a.v);
  const double r = 1.0 / a.v;
  return jet_compose(a, r, -r * r, 2.0 * r * r * r);
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * recip(b); }
inline Jet2 operator/(double c, const Jet2& b) { return recip(b) * c; }

// ---- transcendental ops ----

inline Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.v);
  return jet_compose(a, e, e, e);
}

inline Jet2 log(const Jet2& a) {
  if (!(a.v > 0.0)) throw JetDomainError("log", a.v);
  const double r = 1.0 / a.v;
  return jet_compose(a, std::log(a.v), r, -r * r);
}

inline Jet2 tanh(const Jet2& a) {
  const double t = std::tanh(a.v);
  const double s = 1.0 - t * t;
  return jet_compose(a, t, s, -2.0 * t * s);
}

inline Jet2 sin(const Jet2& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return jet_compose(a, s, c, -s);
}

inline Jet2 cos(const Jet2& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return jet_compose(a, c, -s, -c);
}

inline Jet2 sqrt(const Jet2& a) {
  // The derivative blows up at zero, so zero is outside the jet domain even
  // though sqrt(0) itself is fine.
  if (!(a.v > 0.0)) throw JetDomainError("sqrt", a.v);
  const double s = std::sqrt(a.v);
  const double f1 = 0.5 / s;
  return jet_compose(a, s, f1, -0.5 * f1 / a.v);
}

// Exact integer power by repeated multiplication; keeps small powers exact.
inline double ipow(double x, int n) {
  if (n < 0) {
    if (x == 0.0) throw JetDomainError("ipow", x);
    return 1.0 / ipow(x, -n);
  }
  double r = 1.0, base = x;
  for (; n > 0; n >>= 1, base *= base)
    if (n & 1) r *= base;
  return r;
}

inline Jet2 powi(const Jet2& a, int n) {
  if (n < 0 && a.v == 0.0) throw JetDomainError("powi", a.v);
  const double f0 = ipow(a.v, n);
  const double c1 = static_cast<double>(n);
  const double c2 = static_cast<double>(n) * (n - 1);
  const double f1 = (c1 == 0.0) ? 0.0 : c1 * ipow(a.v, n - 1);
  const double f2 = (c2 == 0.0) ? 0.0 : c2 * ipow(a.v, n - 2);
  return jet_compose(a, f0, f1, f2);
}

}  // namespace plateau
