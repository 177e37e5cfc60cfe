#include "plateau/curve.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "plateau/io_util.hpp"
#include "plateau/rng.hpp"

namespace plateau {

int KnotCurve::max_mode() const {
  size_t n = 0;
  for (const auto& comp : comps) n = std::max(n, comp.size());
  return n == 0 ? 0 : static_cast<int>(n) - 1;
}

void KnotCurve::add_cos(int i, int k, double amp, double phase) {
  if (k < 0) {
    add_cos(i, -k, amp, -phase);
    return;
  }
  auto& comp = comps.at(static_cast<size_t>(i));
  if (static_cast<size_t>(k) >= comp.size()) comp.resize(k + 1);
  if (k == 0) {
    comp[0] += amp * std::cos(phase);
  } else {
    comp[k] += 0.5 * amp * std::polar(1.0, phase);
  }
}

void KnotCurve::add_sin(int i, int k, double amp, double phase) {
  if (k < 0) {
    add_sin(i, -k, -amp, -phase);
    return;
  }
  auto& comp = comps.at(static_cast<size_t>(i));
  if (static_cast<size_t>(k) >= comp.size()) comp.resize(k + 1);
  if (k == 0) {
    comp[0] += amp * std::sin(phase);
  } else {
    // sin(k t + p) = Re(-i e^{ip} e^{ikt})
    comp[k] += 0.5 * amp * std::complex<double>(0.0, -1.0) *
               std::polar(1.0, phase);
  }
}

std::vector<double> KnotCurve::evaluate(double theta) const {
  std::vector<double> out(comps.size(), 0.0);
  for (size_t i = 0; i < comps.size(); ++i) {
    double v = comps[i].empty() ? 0.0 : comps[i][0].real();
    for (size_t m = 1; m < comps[i].size(); ++m) {
      const double c = std::cos(m * theta), s = std::sin(m * theta);
      v += 2.0 * (comps[i][m].real() * c - comps[i][m].imag() * s);
    }
    out[i] = v;
  }
  return out;
}

std::array<double, 3> KnotCurve::evaluate3(double theta) const {
  if (ambient_dim != 3)
    throw std::logic_error("evaluate3 requires a curve in R^3");
  const std::vector<double> v = evaluate(theta);
  return {v[0], v[1], v[2]};
}

std::vector<double> KnotCurve::derivative(double theta) const {
  std::vector<double> out(comps.size(), 0.0);
  for (size_t i = 0; i < comps.size(); ++i) {
    double v = 0.0;
    for (size_t m = 1; m < comps[i].size(); ++m) {
      const double c = std::cos(m * theta), s = std::sin(m * theta);
      v += 2.0 * m * (-comps[i][m].real() * s - comps[i][m].imag() * c);
    }
    out[i] = v;
  }
  return out;
}

void KnotCurve::check_injective() const {
  constexpr int kSamples = 512;
  constexpr int kWindow = 4;
  std::vector<std::vector<double>> pts(kSamples);
  double scale = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    pts[i] = evaluate(2.0 * std::numbers::pi * i / kSamples);
    for (double v : pts[i]) scale = std::max(scale, std::abs(v));
  }
  const double floor = 1e-9 * std::max(scale, 1.0);
  for (int i = 0; i < kSamples; ++i) {
    for (int j = i + 1; j < kSamples; ++j) {
      const int sep = std::min(j - i, kSamples - (j - i));
      if (sep <= kWindow) continue;
      double d2 = 0.0;
      for (size_t k = 0; k < pts[i].size(); ++k) {
        const double d = pts[i][k] - pts[j][k];
        d2 += d * d;
      }
      if (d2 < floor * floor)
        throw std::runtime_error(
            "boundary curve fails the self-distance screen (samples " +
            std::to_string(i) + ", " + std::to_string(j) + ")");
    }
  }
}

KnotCurve torus_knot(int p, int q, double R, double r) {
  if (p == 0 || q == 0 || std::gcd(std::abs(p), std::abs(q)) != 1)
    throw std::invalid_argument("torus_knot: p, q must be nonzero coprime");
  if (!(R > r && r > 0.0))
    throw std::invalid_argument("torus_knot: need R > r > 0");
  KnotCurve c;
  c.ambient_dim = 3;
  c.comps.resize(3);
  c.add_cos(0, p, R, 0.0);
  c.add_cos(0, p + q, 0.5 * r, 0.0);
  c.add_cos(0, p - q, 0.5 * r, 0.0);
  c.add_sin(1, p, R, 0.0);
  c.add_sin(1, p + q, 0.5 * r, 0.0);
  c.add_sin(1, p - q, 0.5 * r, 0.0);
  c.add_sin(2, q, r, 0.0);

  const int a = std::min(std::abs(p), std::abs(q));
  const int b = std::max(std::abs(p), std::abs(q));
  if (a == 2 && b == 3) c.label = "3_1";
  else if (a == 2 && b == 5) c.label = "5_1";
  else if (a == 3 && b == 4) c.label = "8_19";
  else if (a == 3 && b == 5) c.label = "10_124";
  else c.label = "torus(" + std::to_string(p) + "," + std::to_string(q) + ")";
  c.check_injective();
  return c;
}

KnotCurve preset_curve(CurvePreset which) {
  KnotCurve c;
  c.ambient_dim = 3;
  c.comps.resize(3);
  switch (which) {
    case CurvePreset::kUnknot:
      c.add_cos(0, 1, 1.0, 0.0);
      c.add_sin(1, 1, 1.0, 0.0);
      c.label = "unknot";
      break;
    case CurvePreset::kFigureEight:
      // (1 + cos(2t)/2) cos(3t) = cos 3t + (cos 5t + cos t)/4, same for sin.
      c.add_cos(0, 3, 1.0, 0.0);
      c.add_cos(0, 5, 0.25, 0.0);
      c.add_cos(0, 1, 0.25, 0.0);
      c.add_sin(1, 3, 1.0, 0.0);
      c.add_sin(1, 5, 0.25, 0.0);
      c.add_sin(1, 1, 0.25, 0.0);
      c.add_sin(2, 4, 0.5, 0.0);
      c.label = "4_1";
      break;
    case CurvePreset::kThreeTwist:
      c.add_cos(0, 3, -1.0, 0.7);
      c.add_cos(1, 2, -1.0, 0.2);
      c.add_cos(2, 7, -1.0, 0.0);
      c.label = "5_2";
      break;
    case CurvePreset::kStevedore:
      c.add_cos(0, 3, -1.0, 1.5);
      c.add_cos(1, 2, -1.0, 0.2);
      c.add_cos(2, 5, -1.0, 0.0);
      c.label = "6_1";
      break;
    case CurvePreset::kSquare:
      c.add_cos(0, 3, 1.0, 0.7);
      c.add_cos(1, 5, 1.0, 1.0);
      c.add_cos(2, 7, 1.0, 0.0);
      c.label = "square";
      break;
  }
  c.check_injective();
  return c;
}

CurvePreset preset_from_string(const std::string& s) {
  if (s == "unknot") return CurvePreset::kUnknot;
  if (s == "figure8") return CurvePreset::kFigureEight;
  if (s == "three_twist") return CurvePreset::kThreeTwist;
  if (s == "stevedore") return CurvePreset::kStevedore;
  if (s == "square") return CurvePreset::kSquare;
  throw std::invalid_argument("unknown curve preset '" + s + "'");
}

std::string to_string(CurvePreset p) {
  switch (p) {
    case CurvePreset::kUnknot: return "unknot";
    case CurvePreset::kFigureEight: return "figure8";
    case CurvePreset::kThreeTwist: return "three_twist";
    case CurvePreset::kStevedore: return "stevedore";
    case CurvePreset::kSquare: return "square";
  }
  return "?";
}

KnotCurve mirror_curve(const KnotCurve& c) {
  if (c.ambient_dim < 3)
    throw std::invalid_argument("mirror_curve needs a third component");
  KnotCurve m = c;
  for (auto& coef : m.comps[2]) coef = -coef;
  if (!m.label.empty()) {
    if (m.label.back() == '*')
      m.label.pop_back();
    else
      m.label += '*';
  }
  return m;
}

KnotCurve perturb(const KnotCurve& c, double sigma, int max_mode,
                  uint64_t seed) {
  if (sigma < 0.0 || max_mode < 1)
    throw std::invalid_argument("perturb: need sigma >= 0, max_mode >= 1");
  KnotCurve out = c;
  Rng rng(seed);
  const int n = out.ambient_dim;
  for (int m = 1; m <= max_mode; ++m) {
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) a[i] = rng.uniform();
    for (int i = 0; i < n; ++i) b[i] = rng.uniform();
    for (int i = 0; i < n; ++i) {
      out.add_cos(i, m, sigma * a[i], 0.0);
      out.add_sin(i, m, sigma * b[i], 0.0);
    }
  }
  out.check_injective();
  return out;
}

void write_curve(std::ostream& os, const KnotCurve& c) {
  os << "curve " << c.ambient_dim << ' ' << c.max_mode() << ' '
     << (c.label.empty() ? "-" : c.label) << '\n';
  for (int m = 0; m <= c.max_mode(); ++m) {
    os << m;
    for (const auto& comp : c.comps) {
      const std::complex<double> v =
          static_cast<size_t>(m) < comp.size() ? comp[m] : 0.0;
      os << ' ' << fmt17(v.real()) << ' ' << fmt17(v.imag());
    }
    os << '\n';
  }
}

KnotCurve read_curve(std::istream& is) {
  std::string tag;
  int n = 0, maxm = 0;
  std::string label;
  if (!(is >> tag >> n >> maxm >> label) || tag != "curve")
    throw std::runtime_error("bad curve header");
  KnotCurve c;
  c.ambient_dim = n;
  c.label = (label == "-") ? "" : label;
  c.comps.assign(n, std::vector<std::complex<double>>(maxm + 1));
  for (int row = 0; row <= maxm; ++row) {
    int m = -1;
    if (!(is >> m) || m != row)
      throw std::runtime_error("bad curve row " + std::to_string(row));
    for (int i = 0; i < n; ++i) {
      std::string re, im;
      if (!(is >> re >> im)) throw std::runtime_error("short curve row");
      c.comps[i][m] = {parse17(re), parse17(im)};
    }
  }
  return c;
}

}  // namespace plateau
