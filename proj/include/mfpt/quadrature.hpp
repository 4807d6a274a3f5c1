#pragma once

// Globally adaptive Gauss-Kronrod (7, 15) integration over a finite interval
// with optional interior breakpoints. Nodes never touch panel endpoints, so
// integrable endpoint singularities (e.g. a logarithm vanishing at a known
// breakpoint) are handled by repeated bisection of the offending panel.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <vector>

namespace mfpt::quad {

struct Panel {
  double left = 0.0;
  double right = 0.0;
  double value = 0.0;
  double error = 0.0;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
  bool converged = false;
};

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_panels = 4000;
  /// Panels narrower than this relative to the interval are not split.
  double min_width = 64.0 * std::numeric_limits<double>::epsilon();
};

namespace detail {

// Abscissae of the 15-point Kronrod rule (positive half, descending) with
// the Kronrod weights; every odd entry is also a 7-point Gauss node.
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
Panel gauss_kronrod_15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  std::array<double, 15> fv;
  fv[7] = f(center);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kronrod_nodes[j];
    fv[j] = f(center - dx);
    fv[14 - j] = f(center + dx);
  }

  double kronrod = kronrod_weights[7] * fv[7];
  double gauss = gauss_weights[3] * fv[7];
  for (int j = 0; j < 7; ++j) {
    const double pair = fv[j] + fv[14 - j];
    kronrod += kronrod_weights[j] * pair;
    if (j % 2 == 1) gauss += gauss_weights[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = kronrod_weights[7] * std::abs(fv[7] - mean);
  for (int j = 0; j < 7; ++j) {
    asc += kronrod_weights[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
  }

  const double value = kronrod * half;
  asc *= std::abs(half);
  double error = std::abs((kronrod - gauss) * half);
  // QUADPACK-style sharpening of the raw |K - G| difference.
  if (asc != 0.0 && error != 0.0) error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
  error = std::max(error, 50.0 * std::numeric_limits<double>::epsilon() * std::abs(value));
  return {a, b, value, error};
}

struct ByError {
  bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

}  // namespace detail

/// Integrates f over [a, b]. Breakpoints strictly inside (a, b) seed the
/// initial panel split. Panels are refined by bisection in order of
/// decreasing error estimate until the total error satisfies
/// max(abs_tol, rel_tol |I|) or the panel budget runs out.
///
/// The final sum is accumulated in order of panel left edge, so a given
/// subdivision always yields the same bits.
template <typename F>
Result integrate(F&& f, double a, double b, std::span<const double> breakpoints = {},
                 const Options& opts = {}) {
  std::vector<double> edges{a};
  for (double x : breakpoints) {
    if (x > a && x < b) edges.push_back(x);
  }
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::priority_queue<Panel, std::vector<Panel>, detail::ByError> work;
  std::vector<Panel> frozen;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    Panel p = detail::gauss_kronrod_15(f, edges[i], edges[i + 1]);
    total += p.value;
    total_err += p.error;
    work.push(p);
  }

  const double min_width = opts.min_width * (b - a);
  int panels = static_cast<int>(work.size());
  auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };

  while (total_err > target() && panels < opts.max_panels && !work.empty()) {
    Panel worst = work.top();
    work.pop();
    if (worst.right - worst.left <= min_width) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.left + worst.right);
    Panel lo = detail::gauss_kronrod_15(f, worst.left, mid);
    Panel hi = detail::gauss_kronrod_15(f, mid, worst.right);
    total += lo.value + hi.value - worst.value;
    total_err += lo.error + hi.error - worst.error;
    work.push(lo);
    work.push(hi);
    ++panels;
  }

  std::vector<Panel> all = std::move(frozen);
  while (!work.empty()) {
    all.push_back(work.top());
    work.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.left < y.left; });

  Result r;
  for (const Panel& p : all) {
    r.value += p.value;
    r.error += p.error;
  }
  r.panels = static_cast<int>(all.size());
  r.converged = r.error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(r.value));
  return r;
}

}  // namespace mfpt::quad
