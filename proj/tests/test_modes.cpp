#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "mfpt/modes.hpp"

using namespace mfpt;
using std::numbers::pi;

namespace {

// Reference propagator of one (k, -k) pair: the 2x2 block
//   h = 2 [(gamma + cos k) sz + sin k sx]
// exponentiated through a numerical eigendecomposition. Its diagonal entry
// is the stay amplitude and its off-diagonal the transfer amplitude, up to
// phases, so only moduli are compared.
Eigen::Matrix2cd pair_propagator(double gamma, double tau, double k) {
  Eigen::Matrix2d h;
  h << 2.0 * (gamma + std::cos(k)), 2.0 * std::sin(k), 2.0 * std::sin(k), -2.0 * (gamma + std::cos(k));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
  Eigen::Vector2cd phase;
  for (int i = 0; i < 2; ++i) phase[i] = std::exp(std::complex<double>(0.0, -es.eigenvalues()[i] * tau));
  const Eigen::Matrix2cd v = es.eigenvectors().cast<std::complex<double>>();
  return v * phase.asDiagonal() * v.adjoint();
}

struct Sample {
  double gamma;
  double tau;
  double k;
};

std::vector<Sample> random_samples(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> g(0.0, 3.0);
  std::uniform_real_distribution<double> t(1e-6, 4.0);
  std::uniform_real_distribution<double> kk(1e-9, pi - 1e-9);
  std::vector<Sample> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back({g(rng), t(rng), kk(rng)});
  return out;
}

}  // namespace

TEST_SUITE("momenta") {
  TEST_CASE("antiperiodic grids of small rings") {
    const auto k4 = momenta(4);
    REQUIRE(k4.size() == 2);
    CHECK(k4[0] == doctest::Approx(pi / 4).epsilon(1e-15));
    CHECK(k4[1] == doctest::Approx(3 * pi / 4).epsilon(1e-15));

    const auto k6 = momenta(6);
    REQUIRE(k6.size() == 3);
    CHECK(k6[0] == doctest::Approx(pi / 6).epsilon(1e-15));
    CHECK(k6[1] == doctest::Approx(pi / 2).epsilon(1e-15));
    CHECK(k6[2] == doctest::Approx(5 * pi / 6).epsilon(1e-15));

    const auto k8 = momenta(8);
    REQUIRE(k8.size() == 4);
    for (int l = 0; l < 4; ++l) CHECK(k8[l] == doctest::Approx((2 * l + 1) * pi / 8).epsilon(1e-15));
  }

  TEST_CASE("odd or too small rings are rejected") {
    CHECK_THROWS_AS(momenta(5), InvalidSpecError);
    CHECK_THROWS_AS(momenta(2), InvalidSpecError);
    CHECK_THROWS_AS(momenta(0), InvalidSpecError);
    CHECK_THROWS_AS(ChainSpec::make(7, 0.5, 1.0), InvalidSpecError);
    CHECK_THROWS_AS(ChainSpec::make(8, 0.5, 0.0), InvalidSpecError);
    CHECK_THROWS_AS(ChainSpec::make(8, std::nan(""), 1.0), InvalidSpecError);
  }

  TEST_CASE("grids are strictly increasing inside (0, pi)") {
    for (int n = 4; n <= 64; n += 2) {
      const auto ks = momenta(n);
      CHECK(ks.size() == static_cast<std::size_t>(n / 2));
      CHECK(ks.front() > 0.0);
      CHECK(ks.back() < pi);
      for (std::size_t i = 1; i < ks.size(); ++i) CHECK(ks[i] > ks[i - 1]);
    }
  }
}

TEST_SUITE("mode scalars") {
  TEST_CASE("excitation energy") {
    CHECK(mode_energy(0.0, pi / 2) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(mode_energy(1.0, pi) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(std::abs(mode_energy(1.0, pi)) < 1e-15);
    CHECK(mode_energy(0.5, 2 * pi / 3) == doctest::Approx(2.0 * std::sqrt(0.75)).epsilon(1e-14));
  }

  TEST_CASE("Bogoliubov angle") {
    CHECK(std::abs(bogoliubov_angle(2.0, 1e-9)) < 1e-9);
    CHECK(bogoliubov_angle(0.0, pi / 2) == doctest::Approx(-pi / 4).epsilon(1e-15));
    const double theta = bogoliubov_angle(0.5, 2 * pi / 3);
    CHECK(std::sin(2 * theta) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK_THROWS_AS(bogoliubov_angle(1.0, pi), SingularModeError);
  }

  TEST_CASE("evolution amplitudes") {
    for (double k : momenta(16)) {
      const auto amp = evolution_amplitudes(0.0, pi / 2, k);
      CHECK(std::abs(amp.a - std::complex<double>(-1.0, 0.0)) < 1e-12);
      CHECK(std::abs(amp.b) < 1e-12);
    }
    for (double gamma : {0.0, 0.5, 1.7}) {
      const auto amp = evolution_amplitudes(gamma, 1e-12, 1.1);
      CHECK(std::abs(amp.a - 1.0) < 1e-11);
      CHECK(std::abs(amp.b) < 1e-11);
    }
    const auto crit = evolution_amplitudes(0.0, pi / 4, pi / 2);
    CHECK(std::norm(crit.a) < 1e-24);
    CHECK(crit.b * crit.b == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(coupling(0.0, pi / 4, pi / 2) == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("coupling") {
    for (double k : momenta(32)) CHECK(std::abs(coupling(0.0, pi / 2, k)) < 1e-15);
    CHECK(std::abs(coupling(1.0, 1.0, pi)) < 1e-12);
    CHECK(coupling(1.0, 1.0, pi - 1e-7) == doctest::Approx(2.0 * std::sin(pi - 1e-7)).epsilon(1e-6));
    CHECK(sinc_tau(0.0, 0.7) == 0.7);
  }
}

TEST_SUITE("mode identities on random inputs") {
  TEST_CASE("two-level unitarity and the coupling identity") {
    for (const auto& s : random_samples(4000, 0xA11CE)) {
      const double lambda = mode_energy(s.gamma, s.k);
      if (!(lambda > 1e-8)) continue;
      const auto amp = evolution_amplitudes(s.gamma, s.tau, s.k);
      const double g = coupling(s.gamma, s.tau, s.k);
      const double f = one_minus_coupling_sq(s.gamma, s.tau, s.k);
      CHECK(std::abs(std::norm(amp.a) + amp.b * amp.b - 1.0) < 1e-12);
      CHECK(std::abs(1.0 - std::norm(amp.a) - g * g) < 1e-12);
      CHECK(std::abs(f - std::norm(amp.a)) < 1e-12);
      CHECK(std::abs(amp.b * amp.b - g * g) < 1e-12);
      CHECK(g * g <= 1.0 + 1e-15);
      CHECK(f >= 0.0);
    }
  }

  TEST_CASE("sin 2 theta times lambda equals -2 sin k") {
    for (const auto& s : random_samples(4000, 0xB0B)) {
      const double lambda = mode_energy(s.gamma, s.k);
      if (!(lambda > 1e-8)) continue;
      const double theta = bogoliubov_angle(s.gamma, s.k);
      CHECK(std::abs(std::sin(2 * theta) * lambda + 2 * std::sin(s.k)) < 1e-10);
      CHECK(theta <= 0.0);
      CHECK(theta > -pi / 2);
    }
  }

  TEST_CASE("moduli agree with a numerically exponentiated two-level block") {
    for (const auto& s : random_samples(2000, 0xC0FFEE)) {
      const Eigen::Matrix2cd u = pair_propagator(s.gamma, s.tau, s.k);
      const double g = coupling(s.gamma, s.tau, s.k);
      CHECK(std::abs(std::norm(u(0, 1)) - g * g) < 1e-12);
      CHECK(std::abs(std::norm(u(0, 0)) - one_minus_coupling_sq(s.gamma, s.tau, s.k)) < 1e-12);
      if (mode_energy(s.gamma, s.k) > 1e-8) {
        const auto amp = evolution_amplitudes(s.gamma, s.tau, s.k);
        CHECK(std::abs(std::abs(u(0, 0)) - std::abs(amp.a)) < 1e-12);
      }
    }
  }

  TEST_CASE("one minus g squared keeps relative precision where g approaches 1") {
    // Along the critical manifold the direct 1 - g*g loses all digits; the
    // long-double product (1 - g)(1 + g) is the reference. What remains is the
    // conditioning of cos(lambda tau) near pi/2 in its double argument.
    std::mt19937_64 rng(0xD1CE);
    std::uniform_real_distribution<double> gam(0.0, 0.95);
    std::uniform_real_distribution<double> dk(-1e-4, 1e-4);
    for (int i = 0; i < 1000; ++i) {
      const double gamma = gam(rng);
      const double tau = pi / (4.0 * std::sqrt(1.0 - gamma * gamma));
      const double k = std::clamp(std::acos(-gamma) + dk(rng), 1e-6, pi - 1e-6);
      const long double gl = coupling<long double>(gamma, tau, k);
      const long double ref = (1.0L - gl) * (1.0L + gl);
      const double f = one_minus_coupling_sq(gamma, tau, k);
      CHECK(std::abs(static_cast<long double>(f) - ref) <= 1e-4L * ref + 1e-30L);
    }
  }
}

TEST_SUITE("mode products") {
  TEST_CASE("survival ratio examples") {
    CHECK(survival_ratio(ChainSpec::make(8, 0.0, pi / 2)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(survival_ratio(ChainSpec::make(4, 0.0, pi / 4)) == doctest::Approx(0.25).epsilon(1e-14));
    const double r = survival_ratio(ChainSpec::make(8, 0.5, 1.0));
    CHECK(r > 0.0);
    CHECK(r < 1.0);
  }

  TEST_CASE("ground-state overlap examples") {
    CHECK(ground_state_overlap(ChainSpec::make(4, 0.0, 1.0)) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(ground_state_overlap(ChainSpec::make(8, 1e6, 1.0)) == doctest::Approx(1.0).epsilon(1e-10));
    const double ref = std::pow(std::cos(pi / 8), 2) * std::pow(std::cos(3 * pi / 8), 2);
    CHECK(ground_state_overlap(ChainSpec::make(4, 0.0, 1.0)) == doctest::Approx(ref).epsilon(1e-14));
  }

  TEST_CASE("two-product ratio examples") {
    CHECK(ratio_pm1(ChainSpec::make(8, 0.0, pi / 2)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ratio_pm1(ChainSpec::make(4, 0.0, pi / 4)) == doctest::Approx(0.5).epsilon(1e-14));
    const auto spec = ChainSpec::make(16, 0.5, 1.0);
    const double correction = ratio_pm1(spec) - survival_ratio(spec);
    CHECK(correction >= 0.0);
    CHECK(correction < 1e-6);
  }

  TEST_CASE("mode table records") {
    const auto table = ModeTable::build(ChainSpec::make(12, 0.7, 1.3));
    REQUIRE(table.records.size() == 6);
    for (std::size_t i = 0; i < table.records.size(); ++i) {
      const auto& r = table.records[i];
      if (i > 0) CHECK(r.k > table.records[i - 1].k);
      CHECK(r.k > 0.0);
      CHECK(r.k < pi);
      CHECK(std::abs(std::norm(r.a) + r.b * r.b - 1.0) < 1e-12);
      CHECK(std::abs(r.one_minus_g_sq - (1.0 - r.g * r.g)) < 1e-12);
      CHECK(std::abs(std::sin(2 * r.theta) + 2 * std::sin(r.k) / r.lambda) < 1e-12);
    }
  }

  TEST_CASE("products are even in gamma and the two-product ratio dominates") {
    std::mt19937_64 rng(0xE7E7);
    std::uniform_int_distribution<int> half(2, 32);
    std::uniform_real_distribution<double> gam(0.0, 3.0);
    std::uniform_real_distribution<double> tt(0.01, 4.0);
    for (int i = 0; i < 1000; ++i) {
      const auto spec = ChainSpec::make(2 * half(rng), gam(rng), tt(rng));
      const auto mirror = ChainSpec::make(spec.n_sites, -spec.gamma, spec.tau);
      const double r = survival_ratio(spec);
      CHECK(std::abs(r - survival_ratio(mirror)) < 1e-12);
      CHECK(ratio_pm1(spec) >= r);
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
    }
  }
}
