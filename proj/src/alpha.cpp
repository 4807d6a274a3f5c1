#include "mfpt/alpha.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "mfpt/errors.hpp"
#include "mfpt/modes.hpp"
#include "mfpt/quadrature.hpp"

namespace mfpt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGapFloor = 1e-300;

// Distance of tau sqrt(1 - gamma^2) from the nearest pi/4 + m pi/2, m >= 0.
double manifold_distance(double gamma, double tau) {
  const double r = tau * std::sqrt(1.0 - gamma * gamma);
  const double m = std::max(0.0, std::round((r - kPi / 4.0) / (kPi / 2.0)));
  return std::abs(r - (kPi / 4.0 + m * kPi / 2.0));
}

}  // namespace

std::string_view to_string(AlphaMethod method) {
  switch (method) {
    case AlphaMethod::integral: return "integral";
    case AlphaMethod::finite_n_product: return "finite_n_product";
    case AlphaMethod::oracle_fit: return "oracle_fit";
    case AlphaMethod::failed: return "failed";
  }
  return "failed";
}

AlphaSample alpha_integral(double gamma, double tau, const AlphaIntegralOptions& opts) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidSpecError("alpha_integral: tau must be > 0");
  if (!std::isfinite(gamma)) throw InvalidSpecError("alpha_integral: gamma must be finite");
  if (!(opts.rel_tol > 1e-14 && opts.rel_tol < 1e-2)) {
    throw InvalidSpecError("alpha_integral: rel_tol must lie in (1e-14, 1e-2)");
  }

  std::vector<double> breaks;
  if (std::abs(gamma) < 1.0 && manifold_distance(gamma, tau) <= opts.split_neighborhood) {
    breaks.push_back(std::acos(-gamma));
  }

  bool hit_floor = false;
  auto integrand = [&](double k) {
    const double f = one_minus_coupling_sq(gamma, tau, k);
    if (f < kGapFloor) {
      hit_floor = true;
      return -std::log(kGapFloor);
    }
    return -std::log(f);
  };

  quad::Options qopts;
  qopts.rel_tol = opts.rel_tol;
  qopts.max_panels = opts.max_panels;
  // Keeps the revival set (integrand identically ~0) from chasing rounding.
  qopts.abs_tol = 1e-15;
  const quad::Result r = quad::integrate(integrand, 0.0, kPi, breaks, qopts);

  const double scale = 1.0 / (2.0 * kPi * tau * tau);
  const double alpha = r.value * scale;
  const double err = r.error * scale;
  if (hit_floor) {
    throw QuadratureError("alpha_integral: 1 - g^2 underflowed at a node (critical mode)", alpha, err);
  }
  if (!r.converged) {
    throw QuadratureError("alpha_integral: panel budget exhausted before reaching tolerance", alpha, err);
  }
  return {gamma, tau, std::max(alpha, 0.0), AlphaMethod::integral, err};
}

AlphaSample alpha_integral(double gamma, double tau, double rel_tol) {
  AlphaIntegralOptions opts;
  opts.rel_tol = rel_tol;
  return alpha_integral(gamma, tau, opts);
}

AlphaSample alpha_finite_n(const ChainSpec& spec) {
  spec.validate();
  double sum = 0.0;
  for (double k : momenta(spec.n_sites)) {
    const double f = one_minus_coupling_sq(spec.gamma, spec.tau, k);
    if (f <= 0.0) {
      throw SingularSampleError("alpha_finite_n: a grid mode sits exactly on the critical manifold");
    }
    sum += std::log(f);
  }
  const double scale = 1.0 / (spec.n_sites * spec.tau * spec.tau);
  const double err = spec.n_sites * std::numeric_limits<double>::epsilon() * std::abs(sum) * scale;
  return {spec.gamma, spec.tau, -sum * scale, AlphaMethod::finite_n_product, err};
}

double alpha_pm1_finite_n(const ChainSpec& spec) {
  const AlphaSample base = alpha_finite_n(spec);
  double log_odds = 0.0;
  for (double k : momenta(spec.n_sites)) {
    const double g = coupling(spec.gamma, spec.tau, k);
    if (g == 0.0) return base.alpha;
    log_odds += 2.0 * std::log(std::abs(g)) - std::log(one_minus_coupling_sq(spec.gamma, spec.tau, k));
  }
  return base.alpha - std::log1p(std::exp(log_odds)) / (spec.n_sites * spec.tau * spec.tau);
}

std::optional<CriticalPoint> critical_gamma(double tau) {
  if (!(tau > kPi / 4.0)) {
    if (tau == kPi / 4.0) return CriticalPoint{0.0, tau, kPi / 2.0, HeldFixed::tau};
    return std::nullopt;
  }
  const double ratio = kPi / (4.0 * tau);
  const double gamma0 = std::sqrt(1.0 - ratio * ratio);
  return CriticalPoint{gamma0, tau, std::acos(-gamma0), HeldFixed::tau};
}

std::optional<CriticalPoint> critical_tau(double gamma) {
  if (!(gamma >= 0.0) || gamma >= 1.0) return std::nullopt;
  const double tau0 = kPi / (4.0 * std::sqrt(1.0 - gamma * gamma));
  return CriticalPoint{gamma, tau0, std::acos(-gamma), HeldFixed::gamma};
}

double slope_jump_gamma(double tau) {
  const double s = 16.0 * tau * tau - kPi * kPi;
  // Accept rounding-level undershoot so the boundary tau = pi/4 maps to 0.
  if (s < -64.0 * std::numeric_limits<double>::epsilon() * kPi * kPi) {
    throw NoCriticalPointError("slope_jump_gamma: no critical field for tau < pi/4");
  }
  const double root = std::sqrt(std::max(s, 0.0));
  return -16.0 * root / (kPi * tau * (4.0 - kPi * kPi + 16.0 * tau * tau));
}

double slope_jump_tau(double gamma) {
  if (!(gamma >= 0.0) || gamma >= 1.0) {
    throw NoCriticalPointError("slope_jump_tau: critical interval exists only for 0 <= gamma < 1");
  }
  const double one_minus = 1.0 - gamma * gamma;
  return -256.0 * std::pow(one_minus, 2.5) / ((4.0 + (kPi * kPi - 4.0) * gamma * gamma) * kPi * kPi);
}

double gap_quadratic_fixed_tau(const CriticalPoint& cp, double gamma, double k) {
  const double dk = k - cp.k0;
  const double dg = gamma - cp.gamma0;
  const double s = std::sin(cp.k0);
  const double cot = std::cos(cp.k0) / s;
  return 0.5 * (1.0 + kPi * kPi / 4.0 * cot * cot) * dk * dk - dk * dg / s + dg * dg / (2.0 * s * s);
}

double gap_quadratic_fixed_gamma(const CriticalPoint& cp, double tau, double k) {
  const double dk = k - cp.k0;
  const double dt = tau - cp.tau0;
  const double s = std::sin(cp.k0);
  const double c = std::cos(cp.k0);
  const double cot = c / s;
  return 0.5 * (1.0 + kPi * kPi / 4.0 * cot * cot) * dk * dk + kPi * c * dk * dt + 2.0 * s * s * dt * dt;
}

}  // namespace mfpt
