#pragma once

// Repeated-measurement protocol on the exact state vector: evolve for tau,
// ask the question, keep the unnormalized "no" branch, repeat.

#include <iosfwd>
#include <vector>

#include "mfpt/chain_spec.hpp"
#include "mfpt/hamiltonian.hpp"
#include "mfpt/spin_basis.hpp"

namespace mfpt {

struct Projection {
  StateVector branch;            ///< amplitudes of the yes-set zeroed
  double yes_probability = 0.0;  ///< removed probability mass
};

Projection project_no_branch(const StateVector& state, const MeasurementQuestion& question);

/// First-occurrence probabilities p_1..p_nmax and survival weights
/// S_0..S_nmax (S_n = squared norm of the branch that answered "no" at every
/// measurement up to n). p_n = S_{n-1} - S_n.
struct DecayCurve {
  ChainSpec spec;
  MeasurementQuestion question = MeasurementQuestion::not_one();
  std::vector<double> p;
  std::vector<double> survival;
  /// Set when the run stopped early because S_n fell below 1e-280.
  bool truncated = false;
};

struct FirstPassageOptions {
  EvolutionBackend backend = EvolutionBackend::automatic;
  double underflow_floor = 1e-280;
};

DecayCurve first_passage(const ChainSpec& spec, const MeasurementQuestion& question, const StateVector& psi0,
                         int n_max, const FirstPassageOptions& opts = {});

/// Same protocol with a caller-supplied propagator (reused across runs).
DecayCurve first_passage(const Propagator& propagator, const ChainSpec& spec, const MeasurementQuestion& question,
                         const StateVector& psi0, int n_max, const FirstPassageOptions& opts = {});

/// Header `n,p_n,survival`, one row per measurement, 17 significant digits.
void write_csv(std::ostream& out, const DecayCurve& curve);

}  // namespace mfpt
