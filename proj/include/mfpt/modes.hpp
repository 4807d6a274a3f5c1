#pragma once

// Per-momentum quantities of the transverse Ising ring in its even fermion
// parity sector. Each pair (k, -k) is an independent two-level system spanned
// by |00_k> and |11_k>; everything below is a closed-form scalar of (gamma,
// tau, k). The scalar formulas are templates so they can be evaluated in
// long double for reference checks.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "mfpt/chain_spec.hpp"
#include "mfpt/errors.hpp"

namespace mfpt {

/// Antiperiodic momenta k = (2l + 1) pi / N, l = 0 .. N/2 - 1.
std::vector<double> momenta(int n_sites);

/// Excitation energy lambda_k = 2 sqrt(gamma^2 + 1 + 2 gamma cos k).
///
/// Evaluated as 2 hypot(gamma + cos k, sin k), which is the same quantity
/// written as a sum of squares and stays accurate near the gapless point.
template <typename Scalar>
Scalar mode_energy(Scalar gamma, Scalar k) {
  using std::cos;
  using std::hypot;
  using std::sin;
  return Scalar(2) * hypot(gamma + cos(k), sin(k));
}

/// sin(lambda tau) / lambda, continued to tau at lambda = 0.
template <typename Scalar>
Scalar sinc_tau(Scalar lambda, Scalar tau) {
  using std::sin;
  if (lambda == Scalar(0)) return tau;
  return sin(lambda * tau) / lambda;
}

/// Bogoliubov angle of the mode ground state,
///   tan(theta_k) = -sin k / (gamma + cos k + lambda_k / 2),
/// principal branch. The denominator is positive for k in (0, pi), so
/// theta_k lies in (-pi/2, 0]. Throws SingularModeError when lambda_k is
/// zero to working precision (gamma = 1, k = pi).
template <typename Scalar>
Scalar bogoliubov_angle(Scalar gamma, Scalar k) {
  using std::abs;
  using std::atan;
  using std::cos;
  using std::sin;
  const Scalar lambda = mode_energy(gamma, k);
  const Scalar gap_floor = Scalar(8) * std::numeric_limits<Scalar>::epsilon() * (Scalar(1) + abs(gamma));
  if (!(lambda > gap_floor)) {
    throw SingularModeError("Bogoliubov angle undefined at the gapless point");
  }
  return atan(-sin(k) / (gamma + cos(k) + lambda / Scalar(2)));
}

/// Coupling g_k = 2 sin k sin(lambda_k tau) / lambda_k. At lambda_k = 0 the
/// continuous extension 2 sin k tau is returned.
template <typename Scalar>
Scalar coupling(Scalar gamma, Scalar tau, Scalar k) {
  using std::sin;
  return Scalar(2) * sin(k) * sinc_tau(mode_energy(gamma, k), tau);
}

/// 1 - g_k^2 = |A_k|^2 written as
///   cos^2(lambda tau) + 4 (gamma + cos k)^2 (sin(lambda tau) / lambda)^2,
/// a sum of two nonnegative terms. Unlike 1 - g*g it keeps full relative
/// precision where g_k^2 -> 1.
template <typename Scalar>
Scalar one_minus_coupling_sq(Scalar gamma, Scalar tau, Scalar k) {
  using std::cos;
  const Scalar lambda = mode_energy(gamma, k);
  const Scalar c = cos(lambda * tau);
  const Scalar d = Scalar(2) * (gamma + cos(k)) * sinc_tau(lambda, tau);
  return c * c + d * d;
}

template <typename Scalar>
struct EvolutionAmplitudes {
  std::complex<Scalar> a;  ///< <11_k| U(tau) |11_k>
  Scalar b;                ///< <00_k| U(tau) |11_k>
};

/// Two-level propagator column for |11_k>:
///   A_k = e^{-i lambda tau} sin^2 theta + e^{i lambda tau} cos^2 theta
///   B_k = -sin(lambda tau) sin(2 theta)
template <typename Scalar>
EvolutionAmplitudes<Scalar> evolution_amplitudes(Scalar gamma, Scalar tau, Scalar k) {
  using std::cos;
  using std::sin;
  const Scalar theta = bogoliubov_angle(gamma, k);
  const Scalar phase = mode_energy(gamma, k) * tau;
  const Scalar s = sin(phase);
  return {std::complex<Scalar>(cos(phase), s * cos(Scalar(2) * theta)), -s * sin(Scalar(2) * theta)};
}

struct ModeRecord {
  double k = 0.0;
  double lambda = 0.0;
  double theta = 0.0;
  std::complex<double> a{1.0, 0.0};
  double b = 0.0;
  double g = 0.0;
  double one_minus_g_sq = 1.0;  // |a|^2, accurate near g^2 = 1
};

/// Mode records of a chain, one per antiperiodic momentum, ordered by k.
struct ModeTable {
  ChainSpec spec;
  std::vector<ModeRecord> records;

  static ModeTable build(const ChainSpec& spec);
};

/// sum_k log(1 - g_k^2) over the antiperiodic grid; -inf if a factor is zero.
double log_survival_ratio(const ChainSpec& spec);

/// prod_k |A_k|^2 = prod_k (1 - g_k^2): ratio of successive first-occurrence
/// probabilities for the question "is M_z != 1?".
double survival_ratio(const ChainSpec& spec);

/// prod_k cos^2(theta_k) = |<all up|GS>|^2 for the global ground state.
double ground_state_overlap(const ChainSpec& spec);

/// prod_k (1 - g_k^2) + prod_k g_k^2, the two-product ratio for the question
/// "is M_z != +-1?".
double ratio_pm1(const ChainSpec& spec);

}  // namespace mfpt
