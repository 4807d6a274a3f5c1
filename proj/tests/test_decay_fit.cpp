#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mfpt/alpha.hpp"
#include "mfpt/decay_fit.hpp"
#include "mfpt/modes.hpp"

using namespace mfpt;
using std::numbers::pi;

namespace {

std::vector<double> geometric(double beta, double scale, int count) {
  std::vector<double> p;
  for (int n = 1; n <= count; ++n) p.push_back(scale * std::exp(-beta * n));
  return p;
}

struct Sweep {
  std::vector<double> params;
  std::vector<double> alphas;
};

Sweep alpha_sweep(double tau, double from, double to, double step) {
  Sweep s;
  const int count = static_cast<int>(std::round((to - from) / step)) + 1;
  for (int i = 0; i < count; ++i) {
    const double g = from + i * step;
    s.params.push_back(g);
    s.alphas.push_back(alpha_integral(g, tau).alpha);
  }
  return s;
}

}  // namespace

TEST_SUITE("fit_decay") {
  TEST_CASE("exact geometric input") {
    const auto fit = fit_decay(geometric(0.3, 1.0, 30), 8, 1.0);
    CHECK(fit.beta == doctest::Approx(0.3).epsilon(1e-13));
    CHECK(fit.alpha_hat == doctest::Approx(0.0375).epsilon(1e-13));
    CHECK(fit.alpha_hat == fit.beta / 8.0);
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(fit.intercept == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fit.window == std::pair{2, 30});
  }

  TEST_CASE("skip_head moves the window") {
    auto p = geometric(0.2, 1.0, 20);
    p[0] = 0.9;  // transient first point
    const auto fit = fit_decay(p, 4, 0.5, 1);
    CHECK(fit.beta == doctest::Approx(0.2).epsilon(1e-13));
    CHECK(fit.alpha_hat == doctest::Approx(0.2 / (4 * 0.25)).epsilon(1e-13));
    const auto skip3 = fit_decay(p, 4, 0.5, 3);
    CHECK(skip3.window == std::pair{4, 20});
    CHECK(fit_decay(p, 4, 0.5, 0).r_squared < 1.0);
  }

  TEST_CASE("oracle curve reproduces the finite-N decay constant") {
    const auto spec = ChainSpec::make(8, 0.5, 1.0);
    const auto h = build_hamiltonian(8, 0.5);
    const auto curve = first_passage(spec, MeasurementQuestion::not_one(), ground_state(h).state, 40);
    const auto fit = fit_decay(curve);
    CHECK(std::abs(fit.alpha_hat - alpha_finite_n(spec).alpha) < 1e-6);
    CHECK(fit.r_squared > 1.0 - 1e-10);
  }

  TEST_CASE("revival curves and short curves are rejected distinctly") {
    const auto spec = ChainSpec::make(6, 0.0, pi / 2);
    const auto curve = first_passage(spec, MeasurementQuestion::not_one(), StateVector::all_up(6), 10);
    try {
      fit_decay(curve);
      FAIL("expected a fit error");
    } catch (const FitError& e) {
      CHECK(e.reason() == FitError::Reason::nonpositive_probability);
    }
    try {
      fit_decay(geometric(0.1, 1.0, 3), 4, 1.0, 1);
      FAIL("expected a fit error");
    } catch (const FitError& e) {
      CHECK(e.reason() == FitError::Reason::too_few_points);
    }
    CHECK_THROWS_AS(fit_decay(geometric(0.1, 1.0, 10), 4, 1.0, -1), FitError);
  }

  TEST_CASE("scale equivariance") {
    auto base = geometric(0.17, 1.0, 25);
    for (int i = 0; i < 25; ++i) base[static_cast<std::size_t>(i)] *= 1.0 + 0.01 * std::sin(3.0 * i);
    const auto ref = fit_decay(base, 10, 1.0);
    for (double c : {0.25, 2.0, 1024.0, std::ldexp(1.0, -300)}) {
      std::vector<double> scaled = base;
      for (double& x : scaled) x *= c;
      const auto fit = fit_decay(scaled, 10, 1.0);
      CHECK(fit.beta == ref.beta);
      CHECK(fit.r_squared == ref.r_squared);
      CHECK(fit.intercept == doctest::Approx(ref.intercept + std::log(c)).epsilon(1e-13));
    }
    for (double c : {0.3, 7.0, 1e-100}) {
      std::vector<double> scaled = base;
      for (double& x : scaled) x *= c;
      const auto fit = fit_decay(scaled, 10, 1.0);
      CHECK(std::abs(fit.beta - ref.beta) < 1e-13);
      CHECK(fit.intercept == doctest::Approx(ref.intercept + std::log(c)).epsilon(1e-12));
    }
  }

  TEST_CASE("serialization") {
    const auto fit = fit_decay(geometric(0.5, 1.0, 10), 4, 1.0);
    CHECK(fit_csv_header() == "beta,alpha_hat,intercept,r_squared,first_n,last_n");
    const std::string row = to_csv_row(fit);
    CHECK(std::count(row.begin(), row.end(), ',') == 5);
    CHECK(row.ends_with(",2,10"));
    CHECK(summary(fit).rfind("fit: beta=", 0) == 0);
  }
}

TEST_SUITE("detect_kink") {
  TEST_CASE("finds the critical field at tau = 1") {
    const auto s = alpha_sweep(1.0, 0.4, 0.8, 1e-3);
    const auto kink = detect_kink(s.params, s.alphas);
    CHECK(kink.detected);
    CHECK(std::abs(kink.location - critical_gamma(1.0)->gamma0) <= 0.01);
    CHECK(kink.jump == doctest::Approx(slope_jump_gamma(1.0)).epsilon(0.05));
    CHECK(kink.jump == doctest::Approx(kink.right_slope - kink.left_slope));
    CHECK(kink.threshold == kDefaultKinkThreshold);
  }

  TEST_CASE("smooth subcritical curve has no kink") {
    const auto s = alpha_sweep(0.5, 0.0, 1.5, 1e-3);
    CHECK_FALSE(detect_kink(s.params, s.alphas).detected);
  }

  TEST_CASE("invariant under offsets, equivariant under affine regridding") {
    const auto s = alpha_sweep(1.0, 0.5, 0.75, 1e-3);
    const auto ref = detect_kink(s.params, s.alphas);
    REQUIRE(ref.detected);

    std::vector<double> shifted = s.alphas;
    for (double& a : shifted) a += 3.0;
    const auto off = detect_kink(s.params, shifted);
    CHECK(off.detected == ref.detected);
    CHECK(off.location == ref.location);
    CHECK(off.jump == doctest::Approx(ref.jump).epsilon(1e-9));

    const double scale = 4.0;
    const double shift = -1.5;
    std::vector<double> regrid;
    for (double p : s.params) regrid.push_back(scale * p + shift);
    const auto aff = detect_kink(regrid, s.alphas);
    CHECK(aff.detected == ref.detected);
    CHECK(aff.location == doctest::Approx(scale * ref.location + shift).epsilon(1e-12));
    CHECK(aff.left_slope == doctest::Approx(ref.left_slope / scale).epsilon(1e-9));
    CHECK(aff.right_slope == doctest::Approx(ref.right_slope / scale).epsilon(1e-9));
  }

  TEST_CASE("input errors") {
    const std::vector<double> few{0, 1, 2, 3, 4, 5};
    CHECK_THROWS_AS(detect_kink(few, few), InputError);
    const std::vector<double> uneven{0, 1, 2, 3, 4, 5, 6.5, 7};
    CHECK_THROWS_AS(detect_kink(uneven, uneven), InputError);
    const std::vector<double> grid{0, 1, 2, 3, 4, 5, 6, 7};
    const std::vector<double> short_values{0, 1, 2};
    CHECK_THROWS_AS(detect_kink(grid, short_values), InputError);
  }

  TEST_CASE("a synthetic corner is located exactly") {
    std::vector<double> x;
    std::vector<double> y;
    for (int i = 0; i <= 100; ++i) {
      x.push_back(0.01 * i);
      y.push_back(x.back() < 0.37 ? 2.0 * x.back() : 2.0 * 0.37 - 1.0 * (x.back() - 0.37));
    }
    y[37] = 0.74;
    const auto kink = detect_kink(x, y);
    CHECK(kink.detected);
    CHECK(kink.location == doctest::Approx(0.37).epsilon(1e-12));
    CHECK(kink.jump == doctest::Approx(-3.0).epsilon(1e-9));
    CHECK(kink_csv_header() == "location,left_slope,right_slope,jump,detected,threshold");
    CHECK(to_csv_row(kink).find(",1,") != std::string::npos);
    CHECK(summary(kink).rfind("kink: detected=yes", 0) == 0);
  }
}
