#include "mfpt/spin_basis.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace mfpt {

namespace {

void check_sites(int n_sites) {
  if (n_sites < 1 || n_sites > kMaxSites) {
    throw ResourceError("spin basis supports 1.." + std::to_string(kMaxSites) + " sites, got " +
                        std::to_string(n_sites));
  }
}

int sites_for_dimension(Eigen::Index dim) {
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim) throw InvalidSpecError("state dimension is not a power of two");
  return n;
}

}  // namespace

std::vector<BlochAngles> seeded_bloch_angles(int n_sites, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  constexpr double kScale = 1.0 / 18446744073709551616.0;  // 2^-64
  std::vector<BlochAngles> out(static_cast<std::size_t>(n_sites));
  for (auto& a : out) {
    a.polar = std::numbers::pi * static_cast<double>(rng()) * kScale;
    a.azimuth = 2.0 * std::numbers::pi * static_cast<double>(rng()) * kScale;
  }
  return out;
}

StateVector::StateVector(Eigen::VectorXcd amplitudes)
    : amplitudes_(std::move(amplitudes)),
      norm_sq_(amplitudes_.squaredNorm()),
      n_sites_(sites_for_dimension(amplitudes_.size())) {}

StateVector StateVector::basis(int n_sites, BasisIndex index) {
  check_sites(n_sites);
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  if (static_cast<Eigen::Index>(index) >= dim) throw InvalidSpecError("basis index out of range");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return StateVector(std::move(v));
}

StateVector StateVector::uniform(int n_sites) {
  check_sites(n_sites);
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  return StateVector(Eigen::VectorXcd::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim))));
}

StateVector StateVector::product(std::span<const BlochAngles> spins) {
  const int n_sites = static_cast<int>(spins.size());
  check_sites(n_sites);
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    std::complex<double> amp = 1.0;
    for (int j = 0; j < n_sites; ++j) {
      const BlochAngles& s = spins[static_cast<std::size_t>(j)];
      if ((i >> j) & 1) {
        amp *= std::polar(std::sin(0.5 * s.polar), s.azimuth);
      } else {
        amp *= std::cos(0.5 * s.polar);
      }
    }
    v[i] = amp;
  }
  return StateVector(std::move(v));
}

MeasurementQuestion MeasurementQuestion::equals(double q) {
  if (!(q >= -1.0 && q <= 1.0)) throw InvalidQuestionError("mz_equals_q: q must lie in [-1, 1]");
  return MeasurementQuestion(Kind::mz_equals_q, q);
}

void MeasurementQuestion::check_compatible(int n_sites) const {
  if (kind_ != Kind::mz_equals_q) return;
  const double m = q_ * n_sites;
  const double rounded = std::round(m);
  if (std::abs(m - rounded) > 1e-9) {
    throw InvalidQuestionError("mz_equals_q: q N is not an integer for N = " + std::to_string(n_sites));
  }
  if ((static_cast<long long>(rounded) - n_sites) % 2 != 0) {
    throw InvalidQuestionError("mz_equals_q: q N must have the parity of N = " + std::to_string(n_sites));
  }
}

bool MeasurementQuestion::answers_yes(int n_sites, int m) const {
  switch (kind_) {
    case Kind::mz_not_one: return m != n_sites;
    case Kind::mz_not_pm_one: return m != n_sites && m != -n_sites;
    case Kind::mz_equals_q: return m == static_cast<int>(std::lround(q_ * n_sites));
  }
  return false;
}

std::vector<std::uint8_t> MeasurementQuestion::yes_mask(int n_sites) const {
  check_sites(n_sites);
  check_compatible(n_sites);
  const std::size_t dim = std::size_t{1} << n_sites;
  std::vector<std::uint8_t> mask(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    mask[i] = answers_yes(n_sites, magnetization(n_sites, static_cast<BasisIndex>(i))) ? 1 : 0;
  }
  return mask;
}

std::string MeasurementQuestion::name() const {
  switch (kind_) {
    case Kind::mz_not_one: return "mz_not_one";
    case Kind::mz_not_pm_one: return "mz_not_pm_one";
    case Kind::mz_equals_q: {
      std::ostringstream os;
      os.imbue(std::locale::classic());
      os << "mz_equals_q(" << q_ << ")";
      return os.str();
    }
  }
  return "unknown";
}

MeasurementQuestion parse_question(const std::string& name, double q) {
  if (name == "mz_not_one") return MeasurementQuestion::not_one();
  if (name == "mz_not_pm_one") return MeasurementQuestion::not_pm_one();
  if (name == "mz_equals_q") return MeasurementQuestion::equals(q);
  throw InvalidQuestionError("unknown measurement question '" + name + "'");
}

}  // namespace mfpt
