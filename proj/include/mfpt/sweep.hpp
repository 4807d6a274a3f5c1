#pragma once

// Parameter sweeps, cross-engine validation and critical-line tabulation,
// driven by a validated SweepConfig. Grid points are computed in parallel;
// output order and bytes do not depend on the worker count.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mfpt/alpha.hpp"
#include "mfpt/decay_fit.hpp"
#include "mfpt/spin_basis.hpp"

namespace mfpt {

/// Thrown by parse_config for --help; carries the rendered help text.
class HelpRequested : public Error {
 public:
  using Error::Error;
};

enum class SweepMode { alpha_point, alpha_gamma_sweep, alpha_tau_sweep, alpha_surface, simulate, critical_line, validate };

/// How alpha is obtained at each grid point.
enum class AlphaSource { integral, finite_n, oracle };

enum class InitialState { ground, all_up, product };

/// Inclusive grid start, start + step, ..., up to stop (with rounding slack).
struct Grid {
  double start = 0.0;
  double stop = 1.0;
  double step = 0.1;

  /// Throws UsageError naming `what` unless start < stop, step > 0 and the
  /// grid has at most 10^6 + 1 points.
  void validate(const std::string& what) const;
  std::vector<double> values() const;
};

struct SweepConfig {
  SweepMode mode = SweepMode::alpha_point;
  double gamma = 0.5;
  double tau = 1.0;
  Grid grid;      ///< gamma axis (sweep-gamma, surface, critical-line) or tau axis (sweep-tau)
  Grid tau_grid;  ///< second axis of a surface
  AlphaSource source = AlphaSource::integral;
  double rel_tol = 1e-10;

  int n_sites = 8;
  MeasurementQuestion question = MeasurementQuestion::not_one();
  int n_max = 40;
  int skip_head = 1;
  InitialState initial = InitialState::ground;
  std::uint64_t seed = 20240613;
  EvolutionBackend backend = EvolutionBackend::automatic;

  bool report_kink = false;
  double kink_threshold = kDefaultKinkThreshold;

  std::string output_path;  ///< empty: standard output
  int workers = 1;

  /// Throws UsageError on any violated constraint.
  void validate() const;
};

/// Environment variable consulted for the default worker count.
inline constexpr const char* kWorkersEnv = "MFPT_WORKERS";

int default_workers();

/// Builds a config from command-line arguments (program name excluded).
/// `--config FILE` reads flat key=value lines (`#` comments); keys are the
/// long option names of the chosen subcommand and command-line flags win.
/// Throws UsageError (or HelpRequested) on bad input.
SweepConfig parse_config(const std::vector<std::string>& args);

struct SweepSample {
  double gamma = 0.0;
  double tau = 0.0;
  double alpha = 0.0;
  AlphaMethod method = AlphaMethod::integral;
  double error_estimate = 0.0;
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepSample> samples;  ///< grid order
  double elapsed_seconds = 0.0;
  int workers_used = 1;

  /// The swept parameter of each sample (gamma or tau).
  std::vector<double> parameters() const;
  std::vector<double> alphas() const;
};

/// Computes alpha over the config's grid (sweep and surface modes, or a
/// single point). Per-sample failures are recorded with method failed.
SweepResult run_sweep(const SweepConfig& config);

/// alpha at one (gamma, tau) by the configured source.
SweepSample compute_alpha(const SweepConfig& config, double gamma, double tau);

KinkReport detect_kink(const SweepResult& sweep, double threshold = kDefaultKinkThreshold);

struct CriticalRow {
  double gamma0 = 0.0;
  double tau0 = 0.0;
  double k0 = 0.0;
  double delta_gamma = 0.0;
  double delta_tau = 0.0;
};

std::vector<CriticalRow> critical_line(const Grid& gamma_grid);

struct ValidationReport {
  std::vector<double> oracle_ratios;  ///< p_{n+1}/p_n for n >= 2
  double predicted_ratio = 0.0;
  double max_ratio_error = 0.0;
  double fitted_alpha = 0.0;
  double predicted_alpha = 0.0;
  bool passed = false;
};

inline constexpr double kRatioTolerance = 1e-8;
inline constexpr double kAlphaTolerance = 1e-6;

/// Oracle vs closed-form ratio comparison for mz_not_one / mz_not_pm_one.
ValidationReport validate_chain(const SweepConfig& config);

/// Initial state named by the config.
StateVector initial_state(const SweepConfig& config, const SpinHamiltonian& h);

std::string sweep_csv_header();
void write_csv(std::ostream& out, const SweepResult& result);
void write_csv(std::ostream& out, const std::vector<CriticalRow>& rows);

/// Executes the configured mode, writes CSV to the output path (or `out`),
/// logs summaries to `log`. Returns the process exit status.
int run(const SweepConfig& config, std::ostream& out, std::ostream& log);

}  // namespace mfpt
