#pragma once

// Computational basis of an N-spin ring, state vectors over it, and the
// magnetization-sector questions asked by the repeated measurement.
//
// Bit convention: bit j of a basis index is set iff s^z_j = -1. Index 0 is
// the all-up state (M_z = 1), index 2^N - 1 the all-down state (M_z = -1).

#include <bit>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfpt/errors.hpp"

namespace mfpt {

inline constexpr int kMaxSites = 16;

using BasisIndex = std::uint32_t;

/// Total magnetization m = sum_j s^z_j = N - 2 popcount(index).
inline int magnetization(int n_sites, BasisIndex index) {
  return n_sites - 2 * std::popcount(index);
}

struct SpinBasisState {
  BasisIndex index = 0;
  int magnetization = 0;

  static SpinBasisState at(int n_sites, BasisIndex index) {
    return {index, mfpt::magnetization(n_sites, index)};
  }
};

/// Single-spin orientation on the Bloch sphere:
///   cos(polar/2) |up> + e^{i azimuth} sin(polar/2) |down>.
struct BlochAngles {
  double polar = 0.0;
  double azimuth = 0.0;
};

/// Deterministic angles from a fixed-seed mt19937_64 stream (raw draws only,
/// so the sequence is the same on every standard library).
std::vector<BlochAngles> seeded_bloch_angles(int n_sites, std::uint64_t seed);

/// Amplitudes over the 2^N spin basis with a cached squared norm. After a
/// projection the vector is a sub-normalized branch.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(Eigen::VectorXcd amplitudes);

  static StateVector basis(int n_sites, BasisIndex index);
  static StateVector all_up(int n_sites) { return basis(n_sites, 0); }
  /// Equal-weight superposition of every basis state, unit norm.
  static StateVector uniform(int n_sites);
  static StateVector product(std::span<const BlochAngles> spins);

  const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
  double norm_sq() const noexcept { return norm_sq_; }
  int n_sites() const noexcept { return n_sites_; }
  Eigen::Index dimension() const noexcept { return amplitudes_.size(); }

  std::complex<double> operator[](BasisIndex i) const { return amplitudes_[static_cast<Eigen::Index>(i)]; }

 private:
  Eigen::VectorXcd amplitudes_;
  double norm_sq_ = 0.0;
  int n_sites_ = 0;
};

/// Binary projective measurement on total magnetization. A "yes" answer
/// ends the first-passage run; the "no" branch is kept.
class MeasurementQuestion {
 public:
  enum class Kind { mz_not_one, mz_not_pm_one, mz_equals_q };

  /// Is M_z != 1?  The no-set is the single all-up state.
  static MeasurementQuestion not_one() { return MeasurementQuestion(Kind::mz_not_one, 0.0); }
  /// Is M_z != +-1?  The no-set is {all up, all down}.
  static MeasurementQuestion not_pm_one() { return MeasurementQuestion(Kind::mz_not_pm_one, 0.0); }
  /// Is M_z = q?  q must lie in [-1, 1].
  static MeasurementQuestion equals(double q);

  Kind kind() const noexcept { return kind_; }
  double q() const noexcept { return q_; }

  /// Throws InvalidQuestionError if q N is not an integer with the parity
  /// of N (the yes-set would be empty).
  void check_compatible(int n_sites) const;

  bool answers_yes(int n_sites, int magnetization) const;

  /// Per-basis-index yes flags for a chain of n_sites.
  std::vector<std::uint8_t> yes_mask(int n_sites) const;

  std::string name() const;

  friend bool operator==(const MeasurementQuestion&, const MeasurementQuestion&) = default;

 private:
  MeasurementQuestion(Kind kind, double q) : kind_(kind), q_(q) {}

  Kind kind_;
  double q_;
};

/// Parses "mz_not_one", "mz_not_pm_one" or "mz_equals_q" (the latter takes q).
MeasurementQuestion parse_question(const std::string& name, double q = 0.0);

}  // namespace mfpt
