#pragma once

// Boundary curves at infinity, stored as trigonometric polynomials.
//
// A component is sum_{m in Z} c_m e^{i m theta} with c_{-m} = conj(c_m)
// (real curves), so only modes m >= 0 are stored; c_0 is real. All preset
// constructions are exact in the coefficients: products of cosines are
// expanded by hand into single modes, never sampled and refit.

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace plateau {

struct KnotCurve {
  int ambient_dim = 3;
  // comps[i][m] is the mode-m coefficient of component i, m >= 0.
  std::vector<std::vector<std::complex<double>>> comps;
  // Knot identity used for invariant lookups ("3_1", "4_1*", ...). Empty for
  // curves with no table entry.
  std::string label;

  int max_mode() const;
  // Adds amp * cos(k theta + phase) / amp * sin(k theta + phase) to
  // component i; any integer k, folding handled internally.
  void add_cos(int i, int k, double amp, double phase);
  void add_sin(int i, int k, double amp, double phase);

  std::array<double, 3> evaluate3(double theta) const;  // ambient_dim == 3
  std::vector<double> evaluate(double theta) const;
  std::vector<double> derivative(double theta) const;

  // Fails (throws std::runtime_error) if a 512-point grid finds two samples
  // with circular index separation > 4 closer than 1e-9 times the curve
  // scale; a plain sanity screen against self-intersecting boundary data.
  void check_injective() const;
};

KnotCurve torus_knot(int p, int q, double R = 2.0, double r = 0.5);

enum class CurvePreset { kUnknot, kFigureEight, kThreeTwist, kStevedore, kSquare };

KnotCurve preset_curve(CurvePreset which);
CurvePreset preset_from_string(const std::string& s);
std::string to_string(CurvePreset p);

// Reflects the curve in the z = 0 plane (negates the third component),
// which mirrors the knot; the label gains or loses a trailing '*'.
KnotCurve mirror_curve(const KnotCurve& c);

// Adds sigma * sum_{m=1..max_mode} (A_m cos m theta + B_m sin m theta) per
// component, with every A/B entry uniform in [0, 1]. Draw order: for each
// m, the A entries component by component, then the B entries. Re-checks
// injectivity afterwards.
KnotCurve perturb(const KnotCurve& c, double sigma, int max_mode,
                  uint64_t seed);

// Plain-text coefficient table: header then one row per mode
// ("m re_0 im_0 ... re_{n-1} im_{n-1}"), 17 significant digits.
void write_curve(std::ostream& os, const KnotCurve& c);
KnotCurve read_curve(std::istream& is);

}  // namespace plateau
