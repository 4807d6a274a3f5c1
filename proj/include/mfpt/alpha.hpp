#pragma once

// Decay constant alpha(Gamma, tau) of the first-occurrence probability for
// the question "is M_z != 1?", its critical manifold and the closed-form
// slope discontinuities across it.

#include <optional>
#include <string_view>

#include "mfpt/chain_spec.hpp"

namespace mfpt {

enum class AlphaMethod { integral, finite_n_product, oracle_fit, failed };

std::string_view to_string(AlphaMethod method);

struct AlphaSample {
  double gamma = 0.0;
  double tau = 0.0;
  double alpha = 0.0;
  AlphaMethod method = AlphaMethod::integral;
  double error_estimate = 0.0;
};

struct AlphaIntegralOptions {
  double rel_tol = 1e-10;
  /// The panel containing k0 = arccos(-Gamma) is pre-split there when
  /// tau sqrt(1 - Gamma^2) is within this distance of pi/4 + m pi/2.
  double split_neighborhood = 1e-2;
  int max_panels = 4000;
};

/// alpha = -(1 / (2 pi tau^2)) int_0^pi log(1 - g_k^2) dk.
///
/// Throws QuadratureError (carrying the best estimate and its error bound)
/// when the panel budget is exhausted, or when 1 - g_k^2 drops below 1e-300
/// at a quadrature node.
AlphaSample alpha_integral(double gamma, double tau, const AlphaIntegralOptions& opts);
AlphaSample alpha_integral(double gamma, double tau, double rel_tol = 1e-10);

/// -(1 / (N tau^2)) sum_k log(1 - g_k^2) over the antiperiodic grid.
/// Throws SingularSampleError if some grid mode has g_k^2 = 1.
AlphaSample alpha_finite_n(const ChainSpec& spec);

/// Decay constant for "is M_z != +-1?":
///   alpha_1 = alpha - (1 / (N tau^2)) log(1 + prod_k g_k^2 / (1 - g_k^2)).
double alpha_pm1_finite_n(const ChainSpec& spec);

/// Which parameter was held fixed when locating a critical point.
enum class HeldFixed { tau, gamma };

/// A point of the critical manifold tau0 sqrt(1 - gamma0^2) = pi/4 with its
/// singular momentum k0 = arccos(-gamma0).
struct CriticalPoint {
  double gamma0 = 0.0;
  double tau0 = 0.0;
  double k0 = 0.0;
  HeldFixed held = HeldFixed::tau;
};

/// Critical field at fixed tau; none for tau <= pi/4.
std::optional<CriticalPoint> critical_gamma(double tau);

/// Critical interval at fixed gamma >= 0; none for gamma >= 1.
std::optional<CriticalPoint> critical_tau(double gamma);

/// (d alpha / d Gamma)(Gamma0+) - (d alpha / d Gamma)(Gamma0-) at fixed tau.
/// Zero on the boundary tau = pi/4, NoCriticalPointError below it.
double slope_jump_gamma(double tau);

/// (d alpha / d tau)(tau0+) - (d alpha / d tau)(tau0-) at fixed gamma in
/// [0, 1); NoCriticalPointError otherwise.
double slope_jump_tau(double gamma);

/// Local quadratic model of 1 - g_k near a critical point with tau held
/// fixed, as a function of (gamma - gamma0, k - k0).
double gap_quadratic_fixed_tau(const CriticalPoint& cp, double gamma, double k);

/// Same with gamma held fixed, as a function of (tau - tau0, k - k0).
double gap_quadratic_fixed_gamma(const CriticalPoint& cp, double tau, double k);

}  // namespace mfpt
