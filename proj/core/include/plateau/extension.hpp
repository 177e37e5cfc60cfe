#pragma once

// Boundary-data extensions into the disc, and the boundary-defining function
// rho. These are the analytic layer of the surface model: with all network
// parameters zero the surface is exactly (rho, ext(gamma)).
//
// For a mode-m boundary coefficient c_m the radial profile is
//   a_m r^|m| + b_m r^{|m|+2}
// with (a_m, b_m) chosen per extension kind:
//   harmonic:    a_m = c_m, b_m = 0
//   biharmonic:  a_m = c_m (1+|m|)/2, b_m = c_m (1-|m|)/2, which enforces
//                both the Dirichlet value and unit radial derivative at r=1;
//                the full field 2 Gamma / (1+r^2) then has vanishing radial
//                derivative at the boundary.
// Cartesian evaluation uses r^m e^{i m theta} = (x+iy)^m, so both kinds are
// polynomial in (x, y) and exactly smooth across the origin.
//
// The stereographic rule Gamma = r * gamma(theta) is kept separately; it is
// only C^0 at the origin. Evaluation at r^2 < 1e-30 returns the limit value
// (zero) with zeroed derivative slots; derivative slots within a few ulps of
// the origin are not to be trusted. Away from the origin it is exact.

#include <complex>
#include <span>
#include <vector>

#include "plateau/curve.hpp"
#include "plateau/jet.hpp"

namespace plateau {

enum class RhoKind { kStereographic, kOneMinusR2 };
enum class ExtKind { kStereoHarmonic, kStereoBiharmonic, kStereographic };

std::string to_string(RhoKind k);
std::string to_string(ExtKind k);
RhoKind rho_from_string(const std::string& s);
ExtKind ext_from_string(const std::string& s);

// rho_st = (1 - r^2) / (1 + r^2): the stereographic boundary-defining
// function; equals the height of the standard hyperbolic disc over the
// equatorial plane.
Jet2 rho_st(double x, double y);
// rho = 1 - r^2, the polynomial alternative.
Jet2 rho_one_minus_r2(double x, double y);
Jet2 rho_jet(RhoKind kind, double x, double y);

struct ExtensionField {
  int ambient_dim = 0;
  ExtKind kind = ExtKind::kStereoBiharmonic;
  // Radial coefficients per component and mode (m >= 0); for the
  // stereographic kind `a` holds the raw curve coefficients instead.
  std::vector<std::vector<std::complex<double>>> a, b;

  // Evaluates all components of ext(gamma) = 2 Gamma / (1 + r^2) as jets;
  // out.size() must equal ambient_dim.
  void eval(double x, double y, std::span<Jet2> out) const;

  // Boundary trace at angle theta (must reproduce gamma exactly).
  std::vector<double> boundary_value(double theta) const;
};

ExtensionField build_extension(const KnotCurve& curve, ExtKind kind);

}  // namespace plateau
