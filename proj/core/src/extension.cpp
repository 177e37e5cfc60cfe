#include "plateau/extension.hpp"

#include <cmath>
#include <stdexcept>

namespace plateau {

std::string to_string(RhoKind k) {
  switch (k) {
    case RhoKind::kStereographic: return "stereographic";
    case RhoKind::kOneMinusR2: return "one_minus_r2";
  }
  return "?";
}

std::string to_string(ExtKind k) {
  switch (k) {
    case ExtKind::kStereoHarmonic: return "stereoharmonic";
    case ExtKind::kStereoBiharmonic: return "stereobiharmonic";
    case ExtKind::kStereographic: return "stereographic";
  }
  return "?";
}

RhoKind rho_from_string(const std::string& s) {
  if (s == "stereographic") return RhoKind::kStereographic;
  if (s == "one_minus_r2") return RhoKind::kOneMinusR2;
  throw std::invalid_argument("unknown rho kind '" + s + "'");
}

ExtKind ext_from_string(const std::string& s) {
  if (s == "stereoharmonic") return ExtKind::kStereoHarmonic;
  if (s == "stereobiharmonic") return ExtKind::kStereoBiharmonic;
  if (s == "stereographic") return ExtKind::kStereographic;
  throw std::invalid_argument("unknown extension kind '" + s + "'");
}

Jet2 rho_st(double x, double y) {
  const Jet2 r2{x * x + y * y, 2 * x, 2 * y, 2, 0, 2};
  return (1.0 - r2) / (1.0 + r2);
}

Jet2 rho_one_minus_r2(double x, double y) {
  return {1.0 - x * x - y * y, -2 * x, -2 * y, -2, 0, -2};
}

Jet2 rho_jet(RhoKind kind, double x, double y) {
  return kind == RhoKind::kStereographic ? rho_st(x, y)
                                         : rho_one_minus_r2(x, y);
}

ExtensionField build_extension(const KnotCurve& curve, ExtKind kind) {
  ExtensionField f;
  f.ambient_dim = curve.ambient_dim;
  f.kind = kind;
  const size_t n = curve.comps.size();
  f.a.resize(n);
  f.b.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const auto& c = curve.comps[i];
    f.a[i].assign(std::max<size_t>(c.size(), 1), 0.0);
    f.b[i].assign(std::max<size_t>(c.size(), 1), 0.0);
    for (size_t m = 0; m < c.size(); ++m) {
      switch (kind) {
        case ExtKind::kStereoHarmonic:
          f.a[i][m] = c[m];
          break;
        case ExtKind::kStereoBiharmonic:
          // Dirichlet a+b = c and Neumann |m| a + (|m|+2) b = c; the same c
          // on both sides because the prescribed radial derivative of Gamma
          // is gamma itself.
          f.b[i][m] = c[m] * (1.0 - static_cast<double>(m)) * 0.5;
          f.a[i][m] = c[m] - f.b[i][m];
          break;
        case ExtKind::kStereographic:
          f.a[i][m] = c[m];
          break;
      }
    }
  }
  return f;
}

namespace {

// Gamma for the smooth kinds: polynomial in (x, y) via the (x+iy)^m
// recurrence. Re((alpha + i beta)(zr + i zi)) = alpha zr - beta zi.
void eval_gamma_poly(const ExtensionField& f, const Jet2& zx, const Jet2& zy,
                     const Jet2& r2, std::span<Jet2> gamma) {
  const int n = f.ambient_dim;
  for (int i = 0; i < n; ++i) {
    gamma[i] = jet_const(f.a[i][0].real()) + r2 * f.b[i][0].real();
  }
  Jet2 zr = jet_const(1.0), zi = jet_const(0.0);
  int top = 0;
  for (int i = 0; i < n; ++i)
    top = std::max(top, static_cast<int>(f.a[i].size()) - 1);
  for (int m = 1; m <= top; ++m) {
    const Jet2 nzr = zr * zx - zi * zy;
    const Jet2 nzi = zr * zy + zi * zx;
    zr = nzr;
    zi = nzi;
    for (int i = 0; i < n; ++i) {
      if (static_cast<size_t>(m) >= f.a[i].size()) continue;
      const std::complex<double> am = f.a[i][m], bm = f.b[i][m];
      const Jet2 alpha = jet_const(am.real()) + r2 * bm.real();
      const Jet2 beta = jet_const(am.imag()) + r2 * bm.imag();
      gamma[i] = gamma[i] + 2.0 * (alpha * zr - beta * zi);
    }
  }
}

// Gamma = r * gamma(theta): mode m contributes c_m r^{1-m} z^m. Exact away
// from the origin, C^0 only at it.
void eval_gamma_stereo(const ExtensionField& f, const Jet2& zx, const Jet2& zy,
                       const Jet2& r2, std::span<Jet2> gamma) {
  const int n = f.ambient_dim;
  const Jet2 r = sqrt(r2);
  for (int i = 0; i < n; ++i) gamma[i] = r * f.a[i][0].real();
  int top = 0;
  for (int i = 0; i < n; ++i)
    top = std::max(top, static_cast<int>(f.a[i].size()) - 1);
  Jet2 zr = jet_const(1.0), zi = jet_const(0.0);
  Jet2 rpow = jet_const(1.0);  // r^{m-1}
  for (int m = 1; m <= top; ++m) {
    const Jet2 nzr = zr * zx - zi * zy;
    const Jet2 nzi = zr * zy + zi * zx;
    zr = nzr;
    zi = nzi;
    if (m > 1) rpow = rpow * r;
    const Jet2 radial = recip(rpow);  // r^{1-m}
    for (int i = 0; i < n; ++i) {
      if (static_cast<size_t>(m) >= f.a[i].size()) continue;
      const std::complex<double> cm = f.a[i][m];
      const Jet2 re_part = zr * cm.real() - zi * cm.imag();
      gamma[i] = gamma[i] + 2.0 * (radial * re_part);
    }
  }
}

}  // namespace

void ExtensionField::eval(double x, double y, std::span<Jet2> out) const {
  if (static_cast<int>(out.size()) != ambient_dim)
    throw std::invalid_argument("ExtensionField::eval: span size mismatch");
  const Jet2 zx = jet_x(x), zy = jet_y(y);
  const Jet2 r2{x * x + y * y, 2 * x, 2 * y, 2, 0, 2};

  if (kind == ExtKind::kStereographic && r2.v < 1e-30) {
    // Limit value at the origin; derivatives of r*gamma do not exist there.
    for (auto& j : out) j = jet_const(0.0);
    return;
  }

  if (kind == ExtKind::kStereographic)
    eval_gamma_stereo(*this, zx, zy, r2, out);
  else
    eval_gamma_poly(*this, zx, zy, r2, out);

  const Jet2 pref = 2.0 / (1.0 + r2);
  for (auto& j : out) j = j * pref;
}

std::vector<double> ExtensionField::boundary_value(double theta) const {
  std::vector<Jet2> jets(ambient_dim);
  eval(std::cos(theta), std::sin(theta), jets);
  std::vector<double> v(ambient_dim);
  for (int i = 0; i < ambient_dim; ++i) v[i] = jets[i].v;
  return v;
}

}  // namespace plateau
