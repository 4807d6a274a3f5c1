#include "mfpt/first_passage.hpp"

#include <ostream>

#include "mfpt/format.hpp"

namespace mfpt {

namespace {

Projection project_with_mask(const StateVector& state, const std::vector<std::uint8_t>& mask) {
  Eigen::VectorXcd amps = state.amplitudes();
  double removed = 0.0;
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    if (mask[static_cast<std::size_t>(i)]) {
      removed += std::norm(amps[i]);
      amps[i] = 0.0;
    }
  }
  return {StateVector(std::move(amps)), removed};
}

}  // namespace

Projection project_no_branch(const StateVector& state, const MeasurementQuestion& question) {
  return project_with_mask(state, question.yes_mask(state.n_sites()));
}

DecayCurve first_passage(const Propagator& propagator, const ChainSpec& spec, const MeasurementQuestion& question,
                         const StateVector& psi0, int n_max, const FirstPassageOptions& opts) {
  spec.validate();
  if (n_max < 2) throw InvalidSpecError("first_passage: n_max must be >= 2");
  if (psi0.n_sites() != spec.n_sites) throw InvalidSpecError("first_passage: psi0 does not match the chain size");
  const auto mask = question.yes_mask(spec.n_sites);

  DecayCurve curve{spec, question, {}, {psi0.norm_sq()}, false};
  curve.p.reserve(static_cast<std::size_t>(n_max));
  curve.survival.reserve(static_cast<std::size_t>(n_max) + 1);

  StateVector psi = psi0;
  for (int n = 1; n <= n_max; ++n) {
    Projection step = project_with_mask(propagator.apply(psi), mask);
    curve.p.push_back(step.yes_probability);
    curve.survival.push_back(step.branch.norm_sq());
    psi = std::move(step.branch);
    if (psi.norm_sq() < opts.underflow_floor && n < n_max) {
      curve.truncated = true;
      break;
    }
  }
  return curve;
}

DecayCurve first_passage(const ChainSpec& spec, const MeasurementQuestion& question, const StateVector& psi0,
                         int n_max, const FirstPassageOptions& opts) {
  spec.validate();
  const SpinHamiltonian h = build_hamiltonian(spec.n_sites, spec.gamma);
  const Propagator propagator(h, spec.tau, opts.backend);
  return first_passage(propagator, spec, question, psi0, n_max, opts);
}

void write_csv(std::ostream& out, const DecayCurve& curve) {
  out << "n,p_n,survival\n";
  for (std::size_t i = 0; i < curve.p.size(); ++i) {
    out << (i + 1) << ',' << format_double(curve.p[i]) << ',' << format_double(curve.survival[i + 1]) << '\n';
  }
}

}  // namespace mfpt
