#include "mfpt/decay_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "mfpt/errors.hpp"
#include "mfpt/format.hpp"

namespace mfpt {

namespace {

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

// Ordinary least squares on centered abscissae.
Line fit_line(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  Line line;
  line.slope = sxy / sxx;
  line.intercept = my - line.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (line.intercept + line.slope * x[i]);
    ss_res += r * r;
  }
  line.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return line;
}

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

FitResult fit_decay(std::span<const double> p, int n_sites, double tau, int skip_head) {
  if (skip_head < 0) throw FitError("fit_decay: skip_head must be >= 0", FitError::Reason::too_few_points);
  const int size = static_cast<int>(p.size());
  if (size - skip_head < 3) {
    throw FitError("fit_decay: need at least 3 points after skipping " + std::to_string(skip_head),
                   FitError::Reason::too_few_points);
  }
  const double ref = p[static_cast<std::size_t>(skip_head)];
  std::vector<double> xs;
  std::vector<double> ys;
  for (int n = skip_head + 1; n <= size; ++n) {
    const double pn = p[static_cast<std::size_t>(n - 1)];
    if (!(pn > 0.0) || !(ref > 0.0)) {
      throw FitError("fit_decay: p_" + std::to_string(n) + " <= 0 inside the fit window",
                     FitError::Reason::nonpositive_probability);
    }
    xs.push_back(static_cast<double>(n));
    ys.push_back(std::log(pn / ref));
  }
  const Line line = fit_line(xs, ys);
  FitResult fit;
  fit.beta = -line.slope;
  fit.alpha_hat = fit.beta / (n_sites * tau * tau);
  fit.intercept = line.intercept + std::log(ref);
  fit.r_squared = line.r_squared;
  fit.window = {skip_head + 1, size};
  return fit;
}

FitResult fit_decay(const DecayCurve& curve, int skip_head) {
  // A yes-mass built from 2^N amplitudes that are each exact only to a few
  // hundred ulps of the branch norm cannot be told apart from zero below
  // 2^N (64 eps)^2 S_{n-1}; such points (exact revivals) are rejected.
  const double dim = std::ldexp(1.0, curve.spec.n_sites);
  const double noise = dim * std::pow(64.0 * std::numeric_limits<double>::epsilon(), 2);
  const std::size_t last = std::min(curve.p.size(), curve.survival.size());
  for (std::size_t i = static_cast<std::size_t>(std::max(skip_head, 0)); i < last; ++i) {
    if (curve.p[i] <= noise * curve.survival[i]) {
      throw FitError("fit_decay: p_" + std::to_string(i + 1) + " is zero to rounding inside the fit window",
                     FitError::Reason::nonpositive_probability);
    }
  }
  return fit_decay(curve.p, curve.spec.n_sites, curve.spec.tau, skip_head);
}

KinkReport detect_kink(std::span<const double> parameters, std::span<const double> values, double threshold) {
  const std::size_t n = parameters.size();
  if (n != values.size()) throw InputError("detect_kink: parameter and value counts differ");
  if (n < 7) throw InputError("detect_kink: need at least 7 samples");
  const double h = (parameters[n - 1] - parameters[0]) / static_cast<double>(n - 1);
  if (!(h != 0.0) || !std::isfinite(h)) throw InputError("detect_kink: degenerate grid");
  for (std::size_t i = 1; i < n; ++i) {
    const double step = parameters[i] - parameters[i - 1];
    if (std::abs(step - h) > 1e-6 * std::abs(h)) throw InputError("detect_kink: grid is not uniformly spaced");
  }

  std::vector<double> stat(n - 2);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    stat[i - 1] = std::abs(values[i + 1] - 2.0 * values[i] + values[i - 1]) / std::abs(h);
  }
  const auto peak = static_cast<std::size_t>(std::max_element(stat.begin(), stat.end()) - stat.begin());
  const std::size_t k = peak + 1;

  KinkReport report;
  report.threshold = threshold;
  report.location = parameters[k];
  report.detected = stat[peak] > threshold * median(stat);

  // Up to five samples per side, excluding the candidate; a side with a
  // single sample borrows the candidate to form a line.
  auto side_slope = [&](std::size_t first, std::size_t last) {
    return fit_line(parameters.subspan(first, last - first + 1), values.subspan(first, last - first + 1)).slope;
  };
  const std::size_t left_first = k >= 5 ? k - 5 : 0;
  const std::size_t left_last = k - 1 > left_first ? k - 1 : k;
  const std::size_t right_last = std::min(n - 1, k + 5);
  const std::size_t right_first = right_last > k + 1 ? k + 1 : k;
  report.left_slope = side_slope(left_first, left_last);
  report.right_slope = side_slope(right_first, right_last);
  report.jump = report.right_slope - report.left_slope;
  return report;
}

std::string summary(const FitResult& fit) {
  std::ostringstream os;
  os << "fit: beta=" << format_double(fit.beta) << " alpha_hat=" << format_double(fit.alpha_hat)
     << " intercept=" << format_double(fit.intercept) << " r2=" << format_double(fit.r_squared) << " window=["
     << fit.window.first << "," << fit.window.second << "]";
  return os.str();
}

std::string summary(const KinkReport& kink) {
  std::ostringstream os;
  os << "kink: detected=" << (kink.detected ? "yes" : "no") << " location=" << format_double(kink.location)
     << " left_slope=" << format_double(kink.left_slope) << " right_slope=" << format_double(kink.right_slope)
     << " jump=" << format_double(kink.jump) << " threshold=" << format_double(kink.threshold);
  return os.str();
}

std::string fit_csv_header() { return "beta,alpha_hat,intercept,r_squared,first_n,last_n"; }

std::string to_csv_row(const FitResult& fit) {
  return format_double(fit.beta) + ',' + format_double(fit.alpha_hat) + ',' + format_double(fit.intercept) + ',' +
         format_double(fit.r_squared) + ',' + std::to_string(fit.window.first) + ',' +
         std::to_string(fit.window.second);
}

std::string kink_csv_header() { return "location,left_slope,right_slope,jump,detected,threshold"; }

std::string to_csv_row(const KinkReport& kink) {
  return format_double(kink.location) + ',' + format_double(kink.left_slope) + ',' +
         format_double(kink.right_slope) + ',' + format_double(kink.jump) + ',' + (kink.detected ? "1" : "0") +
         ',' + format_double(kink.threshold);
}

}  // namespace mfpt
