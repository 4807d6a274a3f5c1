#pragma once

// Decay-constant extraction from first-occurrence curves, and slope-break
// detection on alpha-vs-parameter samples.

#include <span>
#include <string>
#include <utility>

#include "mfpt/first_passage.hpp"

namespace mfpt {

struct FitResult {
  double beta = 0.0;       ///< -slope of log p_n per measurement
  double alpha_hat = 0.0;  ///< beta / (N tau^2)
  double intercept = 0.0;  ///< log p at n = 0
  double r_squared = 0.0;
  std::pair<int, int> window{0, 0};  ///< first and last n used
};

/// Least-squares line through (n, log p_n) for skip_head < n <= size.
/// p[0] is p_1. Throws FitError when fewer than 3 points remain or any
/// p_n in the window is <= 0.
///
/// Logs are taken relative to the first point of the window, so scaling
/// every p_n by a power of two leaves beta bit-identical.
FitResult fit_decay(std::span<const double> p, int n_sites, double tau, int skip_head = 1);
/// As above; additionally rejects p_n that are zero to rounding relative to
/// the surviving branch (exact revivals) with Reason::nonpositive_probability.
FitResult fit_decay(const DecayCurve& curve, int skip_head = 1);

struct KinkReport {
  double location = 0.0;
  double left_slope = 0.0;
  double right_slope = 0.0;
  double jump = 0.0;  ///< right_slope - left_slope
  bool detected = false;
  double threshold = 0.0;
};

inline constexpr double kDefaultKinkThreshold = 20.0;

/// Scans centered second differences of values over a uniform grid. The
/// candidate is the interior point with the largest |second difference| / h;
/// it is reported as a kink when that statistic exceeds threshold times the
/// median of the same statistic over the grid. One-sided slopes come from
/// least-squares lines through up to 5 samples on each side, excluding the
/// candidate. Throws InputError on fewer than 7 samples or a non-uniform grid.
KinkReport detect_kink(std::span<const double> parameters, std::span<const double> values,
                       double threshold = kDefaultKinkThreshold);

std::string summary(const FitResult& fit);
std::string summary(const KinkReport& kink);

/// CSV header and row renderings (17 significant digits).
std::string fit_csv_header();
std::string to_csv_row(const FitResult& fit);
std::string kink_csv_header();
std::string to_csv_row(const KinkReport& kink);

}  // namespace mfpt
