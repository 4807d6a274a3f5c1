#include "mfpt/modes.hpp"

#include <limits>

namespace mfpt {

std::vector<double> momenta(int n_sites) {
  if (n_sites < 4 || n_sites % 2 != 0) {
    throw InvalidSpecError("momenta: n_sites must be even and >= 4, got " + std::to_string(n_sites));
  }
  std::vector<double> ks(static_cast<std::size_t>(n_sites / 2));
  for (int l = 0; l < n_sites / 2; ++l) {
    ks[static_cast<std::size_t>(l)] = (2.0 * l + 1.0) * std::numbers::pi / n_sites;
  }
  return ks;
}

ModeTable ModeTable::build(const ChainSpec& spec) {
  spec.validate();
  ModeTable table{spec, {}};
  for (double k : momenta(spec.n_sites)) {
    ModeRecord r;
    r.k = k;
    r.lambda = mode_energy(spec.gamma, k);
    r.theta = bogoliubov_angle(spec.gamma, k);
    const auto amp = evolution_amplitudes(spec.gamma, spec.tau, k);
    r.a = amp.a;
    r.b = amp.b;
    r.g = coupling(spec.gamma, spec.tau, k);
    r.one_minus_g_sq = one_minus_coupling_sq(spec.gamma, spec.tau, k);
    table.records.push_back(r);
  }
  return table;
}

double log_survival_ratio(const ChainSpec& spec) {
  spec.validate();
  double sum = 0.0;
  for (double k : momenta(spec.n_sites)) {
    const double f = one_minus_coupling_sq(spec.gamma, spec.tau, k);
    if (f == 0.0) return -std::numeric_limits<double>::infinity();
    sum += std::log(f);
  }
  return sum;
}

double survival_ratio(const ChainSpec& spec) { return std::exp(log_survival_ratio(spec)); }

double ground_state_overlap(const ChainSpec& spec) {
  spec.validate();
  double log_sum = 0.0;
  for (double k : momenta(spec.n_sites)) {
    const double c = std::cos(bogoliubov_angle(spec.gamma, k));
    log_sum += 2.0 * std::log(c);
  }
  return std::exp(log_sum);
}

double ratio_pm1(const ChainSpec& spec) {
  spec.validate();
  double log_keep = 0.0;
  double log_flip = 0.0;
  bool keep_zero = false;
  bool flip_zero = false;
  for (double k : momenta(spec.n_sites)) {
    const double f = one_minus_coupling_sq(spec.gamma, spec.tau, k);
    const double g = coupling(spec.gamma, spec.tau, k);
    if (f == 0.0) keep_zero = true; else log_keep += std::log(f);
    if (g == 0.0) flip_zero = true; else log_flip += 2.0 * std::log(std::abs(g));
  }
  return (keep_zero ? 0.0 : std::exp(log_keep)) + (flip_zero ? 0.0 : std::exp(log_flip));
}

}  // namespace mfpt
