#include "mfpt/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <thread>

#include "mfpt/first_passage.hpp"
#include "mfpt/format.hpp"
#include "mfpt/modes.hpp"

namespace mfpt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs task(i) for i in [0, count) on up to `workers` threads. Each index is
// claimed by exactly one worker; results go to caller-owned slots.
template <typename Task>
void parallel_for(std::size_t count, int workers, Task&& task) {
  const auto n_threads = static_cast<std::size_t>(std::max(1, workers));
  if (n_threads == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < std::min(n_threads, count); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  }
}

double fit_error(const FitResult& fit) {
  const int points = fit.window.second - fit.window.first + 1;
  if (points <= 2 || fit.r_squared <= 0.0) return kNaN;
  return std::abs(fit.alpha_hat) * std::sqrt((1.0 / fit.r_squared - 1.0) / (points - 2));
}

}  // namespace

void Grid::validate(const std::string& what) const {
  if (!std::isfinite(start) || !std::isfinite(stop) || !(start < stop)) {
    throw UsageError(what + ": start must be < stop");
  }
  if (!(step > 0.0) || !std::isfinite(step)) throw UsageError(what + ": step must be > 0");
  if ((stop - start) / step > 1e6) throw UsageError(what + ": more than 10^6 grid intervals");
}

std::vector<double> Grid::values() const {
  const double intervals = (stop - start) / step;
  const auto count = static_cast<std::size_t>(std::floor(intervals * (1.0 + 1e-12) + 1e-9)) + 1;
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = start + static_cast<double>(i) * step;
  return v;
}

void SweepConfig::validate() const {
  if (workers < 1) throw UsageError("workers: must be >= 1");
  if (!(rel_tol > 1e-14 && rel_tol < 1e-2)) throw UsageError("rel-tol: must lie in (1e-14, 1e-2)");
  if (!std::isfinite(gamma)) throw UsageError("gamma: must be finite");
  const bool needs_tau = mode == SweepMode::alpha_point || mode == SweepMode::alpha_gamma_sweep ||
                         mode == SweepMode::simulate || mode == SweepMode::validate;
  if (needs_tau && !(tau > 0.0 && std::isfinite(tau))) throw UsageError("tau: must be > 0");

  switch (mode) {
    case SweepMode::alpha_gamma_sweep: grid.validate("gamma grid"); break;
    case SweepMode::alpha_tau_sweep:
      grid.validate("tau grid");
      if (!(grid.start > 0.0)) throw UsageError("tau grid: start must be > 0");
      break;
    case SweepMode::alpha_surface:
      grid.validate("gamma grid");
      tau_grid.validate("tau grid");
      if (!(tau_grid.start > 0.0)) throw UsageError("tau grid: start must be > 0");
      break;
    case SweepMode::critical_line:
      grid.validate("gamma grid");
      if (grid.start < 0.0 || grid.values().back() >= 1.0) {
        throw UsageError("gamma grid: critical line exists only for 0 <= gamma < 1");
      }
      break;
    default: break;
  }

  const bool uses_chain = source != AlphaSource::integral || mode == SweepMode::simulate ||
                          mode == SweepMode::validate;
  if (uses_chain) {
    if (n_sites < 4 || n_sites % 2 != 0) throw UsageError("n: chain size must be even and >= 4");
    const bool oracle = source == AlphaSource::oracle || mode == SweepMode::simulate || mode == SweepMode::validate;
    if (oracle && n_sites > kMaxSites) throw UsageError("n: state-vector engine is capped at 16 sites");
    if (oracle && n_max < 2) throw UsageError("nmax: must be >= 2");
    if (oracle && (skip_head < 0 || n_max - skip_head < 3)) throw UsageError("skip-head: leaves fewer than 3 points");
    try {
      question.check_compatible(n_sites);
    } catch (const InvalidQuestionError& e) {
      throw UsageError(std::string("q: ") + e.what());
    }
  }
  if (mode == SweepMode::validate && question.kind() == MeasurementQuestion::Kind::mz_equals_q) {
    throw UsageError("question: validate supports mz_not_one and mz_not_pm_one only");
  }
}

int default_workers() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<double> SweepResult::parameters() const {
  std::vector<double> v;
  v.reserve(samples.size());
  const bool tau_axis = config.mode == SweepMode::alpha_tau_sweep;
  for (const auto& s : samples) v.push_back(tau_axis ? s.tau : s.gamma);
  return v;
}

std::vector<double> SweepResult::alphas() const {
  std::vector<double> v;
  v.reserve(samples.size());
  for (const auto& s : samples) v.push_back(s.alpha);
  return v;
}

StateVector initial_state(const SweepConfig& config, const SpinHamiltonian& h) {
  switch (config.initial) {
    case InitialState::ground: return ground_state(h, config.backend).state;
    case InitialState::all_up: return StateVector::all_up(h.n_sites);
    case InitialState::product: {
      const auto angles = seeded_bloch_angles(h.n_sites, config.seed);
      return StateVector::product(angles);
    }
  }
  return StateVector::all_up(h.n_sites);
}

SweepSample compute_alpha(const SweepConfig& config, double gamma, double tau) {
  SweepSample s{gamma, tau, kNaN, AlphaMethod::failed, kNaN};
  try {
    switch (config.source) {
      case AlphaSource::integral: {
        const AlphaSample a = alpha_integral(gamma, tau, config.rel_tol);
        s.alpha = a.alpha;
        s.method = a.method;
        s.error_estimate = a.error_estimate;
        break;
      }
      case AlphaSource::finite_n: {
        const AlphaSample a = alpha_finite_n(ChainSpec::make(config.n_sites, gamma, tau));
        s.alpha = a.alpha;
        s.method = a.method;
        s.error_estimate = a.error_estimate;
        break;
      }
      case AlphaSource::oracle: {
        const ChainSpec spec = ChainSpec::make(config.n_sites, gamma, tau);
        const SpinHamiltonian h = build_hamiltonian(spec.n_sites, spec.gamma);
        StateVector psi0;
        std::optional<Propagator> prop;
        if (h.n_sites <= kDenseMaxSites && config.backend != EvolutionBackend::krylov) {
          auto spectrum = std::make_shared<const BlockSpectrum>(diagonalize(h));
          psi0 = config.initial == InitialState::ground ? ground_state(*spectrum).state : initial_state(config, h);
          prop.emplace(spectrum, tau);
        } else {
          psi0 = initial_state(config, h);
          prop.emplace(h, tau, config.backend);
        }
        const DecayCurve curve = first_passage(*prop, spec, config.question, psi0, config.n_max);
        const FitResult fit = fit_decay(curve, config.skip_head);
        s.alpha = fit.alpha_hat;
        s.method = AlphaMethod::oracle_fit;
        s.error_estimate = fit_error(fit);
        break;
      }
    }
  } catch (const Error&) {
    s.alpha = kNaN;
    s.method = AlphaMethod::failed;
    s.error_estimate = kNaN;
  }
  return s;
}

SweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<std::pair<double, double>> points;  // (gamma, tau)
  switch (config.mode) {
    case SweepMode::alpha_gamma_sweep:
      for (double g : config.grid.values()) points.emplace_back(g, config.tau);
      break;
    case SweepMode::alpha_tau_sweep:
      for (double t : config.grid.values()) points.emplace_back(config.gamma, t);
      break;
    case SweepMode::alpha_surface:
      for (double g : config.grid.values()) {
        for (double t : config.tau_grid.values()) points.emplace_back(g, t);
      }
      break;
    case SweepMode::alpha_point: points.emplace_back(config.gamma, config.tau); break;
    default: throw UsageError("run_sweep: mode does not produce an alpha sweep");
  }

  SweepResult result;
  result.config = config;
  result.samples.resize(points.size());
  result.workers_used = std::max(1, std::min<int>(config.workers, static_cast<int>(points.size())));
  parallel_for(points.size(), config.workers, [&](std::size_t i) {
    result.samples[i] = compute_alpha(config, points[i].first, points[i].second);
  });
  result.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

KinkReport detect_kink(const SweepResult& sweep, double threshold) {
  return detect_kink(sweep.parameters(), sweep.alphas(), threshold);
}

std::vector<CriticalRow> critical_line(const Grid& gamma_grid) {
  std::vector<CriticalRow> rows;
  for (double g : gamma_grid.values()) {
    const auto cp = critical_tau(g);
    if (!cp) throw NoCriticalPointError("critical_line: no critical point at gamma = " + format_double(g));
    rows.push_back({cp->gamma0, cp->tau0, cp->k0, slope_jump_gamma(cp->tau0), slope_jump_tau(cp->gamma0)});
  }
  return rows;
}

ValidationReport validate_chain(const SweepConfig& config) {
  config.validate();
  const ChainSpec spec = ChainSpec::make(config.n_sites, config.gamma, config.tau);
  const SpinHamiltonian h = build_hamiltonian(spec.n_sites, spec.gamma);
  const StateVector psi0 = initial_state(config, h);
  const DecayCurve curve = first_passage(spec, config.question, psi0, config.n_max, {config.backend});

  const bool pm1 = config.question.kind() == MeasurementQuestion::Kind::mz_not_pm_one;
  ValidationReport report;
  report.predicted_ratio = pm1 ? ratio_pm1(spec) : survival_ratio(spec);
  report.predicted_alpha = pm1 ? alpha_pm1_finite_n(spec) : alpha_finite_n(spec).alpha;
  // p_1 carries the initial-state transient; the ratio is constant from p_2 on.
  for (std::size_t n = 1; n + 1 < curve.p.size(); ++n) {
    const double r = curve.p[n + 1] / curve.p[n];
    report.oracle_ratios.push_back(r);
    report.max_ratio_error = std::max(report.max_ratio_error, std::abs(r - report.predicted_ratio));
  }
  report.fitted_alpha = fit_decay(curve, config.skip_head).alpha_hat;
  report.passed = report.max_ratio_error < kRatioTolerance &&
                  std::abs(report.fitted_alpha - report.predicted_alpha) < kAlphaTolerance;
  return report;
}

std::string sweep_csv_header() { return "gamma,tau,alpha,method,err"; }

void write_csv(std::ostream& out, const SweepResult& result) {
  out << sweep_csv_header() << '\n';
  for (const auto& s : result.samples) {
    out << format_double(s.gamma) << ',' << format_double(s.tau) << ',' << format_double(s.alpha) << ','
        << to_string(s.method) << ',' << format_double(s.error_estimate) << '\n';
  }
}

void write_csv(std::ostream& out, const std::vector<CriticalRow>& rows) {
  out << "gamma0,tau0,k0,delta_gamma,delta_tau\n";
  for (const auto& r : rows) {
    out << format_double(r.gamma0) << ',' << format_double(r.tau0) << ',' << format_double(r.k0) << ','
        << format_double(r.delta_gamma) << ',' << format_double(r.delta_tau) << '\n';
  }
}

int run(const SweepConfig& config, std::ostream& out, std::ostream& log) {
  config.validate();
  std::ofstream file;
  if (!config.output_path.empty()) {
    file.open(config.output_path, std::ios::binary);
    if (!file) {
      log << "error: cannot open " << config.output_path << " for writing\n";
      return 2;
    }
  }
  std::ostream& sink = config.output_path.empty() ? out : file;

  switch (config.mode) {
    case SweepMode::alpha_point:
    case SweepMode::alpha_gamma_sweep:
    case SweepMode::alpha_tau_sweep:
    case SweepMode::alpha_surface: {
      const SweepResult result = run_sweep(config);
      write_csv(sink, result);
      const auto failed = std::count_if(result.samples.begin(), result.samples.end(),
                                        [](const SweepSample& s) { return s.method == AlphaMethod::failed; });
      log << result.samples.size() << " samples (" << failed << " failed) in " << result.elapsed_seconds
          << " s on " << result.workers_used << " worker(s)\n";
      if (config.report_kink && config.mode != SweepMode::alpha_surface && config.mode != SweepMode::alpha_point) {
        try {
          log << summary(detect_kink(result, config.kink_threshold)) << '\n';
        } catch (const InputError& e) {
          log << "kink: " << e.what() << '\n';
        }
      }
      return 0;
    }
    case SweepMode::simulate: {
      const ChainSpec spec = ChainSpec::make(config.n_sites, config.gamma, config.tau);
      const SpinHamiltonian h = build_hamiltonian(spec.n_sites, spec.gamma);
      const DecayCurve curve = first_passage(spec, config.question, initial_state(config, h), config.n_max,
                                             {config.backend});
      write_csv(sink, curve);
      if (curve.truncated) log << "survival underflow: curve truncated at n = " << curve.p.size() << '\n';
      try {
        log << summary(fit_decay(curve, config.skip_head)) << '\n';
      } catch (const FitError& e) {
        log << "fit: " << e.what() << '\n';
      }
      return 0;
    }
    case SweepMode::critical_line: {
      write_csv(sink, critical_line(config.grid));
      return 0;
    }
    case SweepMode::validate: {
      const ValidationReport rep = validate_chain(config);
      sink << "question " << config.question.name() << " N=" << config.n_sites << " gamma=" << format_double(config.gamma)
           << " tau=" << format_double(config.tau) << '\n'
           << "predicted ratio " << format_double(rep.predicted_ratio) << '\n'
           << "max |oracle ratio - mode-core ratio| " << format_double(rep.max_ratio_error) << " (tol "
           << format_double(kRatioTolerance) << ")\n"
           << "fitted alpha " << format_double(rep.fitted_alpha) << " predicted alpha "
           << format_double(rep.predicted_alpha) << " (tol " << format_double(kAlphaTolerance) << ")\n"
           << (rep.passed ? "PASS" : "FAIL") << '\n';
      return rep.passed ? 0 : 1;
    }
  }
  return 0;
}

}  // namespace mfpt
