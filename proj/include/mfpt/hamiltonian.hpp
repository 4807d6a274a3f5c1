#pragma once

// Exact finite-N treatment of
//   H = - sum_j s^x_j s^x_{j+1} - Gamma sum_j s^z_j,   s_{N+1} = s_1,
// on the full 2^N spin basis: sparse construction, ground state and the
// propagator exp(-i H tau).
//
// H commutes with the spin-flip parity prod_j s^z_j, so the dense backend
// diagonalizes the two parity blocks separately.

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "mfpt/spin_basis.hpp"

namespace mfpt {

/// Largest chain diagonalized densely; larger chains use Krylov methods.
inline constexpr int kDenseMaxSites = 12;

struct SpinHamiltonian {
  int n_sites = 0;
  double gamma = 0.0;
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;

  Eigen::Index dimension() const { return matrix.rows(); }
};

/// Throws InvalidSpecError for odd or n_sites < 4, ResourceError above max_sites.
SpinHamiltonian build_hamiltonian(int n_sites, double gamma, int max_sites = kMaxSites);

/// Dense eigendecomposition of one parity block.
struct ParityBlock {
  int parity = 0;                      ///< popcount(index) mod 2
  std::vector<BasisIndex> indices;     ///< basis indices of the block, ascending
  Eigen::VectorXd energies;            ///< ascending
  Eigen::MatrixXd vectors;             ///< real orthonormal columns
};

/// Full spectrum of H as two parity blocks (even first).
struct BlockSpectrum {
  int n_sites = 0;
  std::vector<ParityBlock> blocks;
};

/// Requires n_sites <= kDenseMaxSites.
BlockSpectrum diagonalize(const SpinHamiltonian& h);

struct GroundState {
  StateVector state;
  double energy = 0.0;
  double gap = 0.0;         ///< E_1 - E_0 over the whole spectrum
  bool degenerate = false;  ///< gap < 1e-10
};

/// Unit-norm lowest eigenvector, phase fixed so that the largest-magnitude
/// amplitude (first such index) is real and positive. When the two lowest
/// levels are degenerate the even-parity vector is returned.
enum class EvolutionBackend { automatic, dense, krylov };

/// Dense diagonalization up to kDenseMaxSites unless `method` is krylov;
/// Lanczos in each parity sector otherwise.
GroundState ground_state(const SpinHamiltonian& h, EvolutionBackend method = EvolutionBackend::automatic);
GroundState ground_state(const BlockSpectrum& spectrum);

struct KrylovOptions {
  int max_dimension = 60;
  double tolerance = 1e-12;
  int max_substeps = 100000;
};

/// exp(-i H tau) with the decomposition or Krylov workspace set up once and
/// reused across applications. Immutable after construction; apply() may be
/// called concurrently.
class Propagator {
 public:
  Propagator(const SpinHamiltonian& h, double tau, EvolutionBackend backend = EvolutionBackend::automatic,
             KrylovOptions krylov = {});
  Propagator(std::shared_ptr<const BlockSpectrum> spectrum, double tau);

  StateVector apply(const StateVector& state) const;

  EvolutionBackend backend() const noexcept { return backend_; }
  double tau() const noexcept { return tau_; }

 private:
  Eigen::VectorXcd apply_dense(const Eigen::VectorXcd& v) const;
  Eigen::VectorXcd apply_krylov(const Eigen::VectorXcd& v) const;

  EvolutionBackend backend_;
  double tau_;
  std::shared_ptr<const BlockSpectrum> spectrum_;
  std::vector<Eigen::VectorXcd> phases_;  // per block, exp(-i E tau)
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix_;  // Krylov backend only
  KrylovOptions krylov_;
};

/// One-shot exp(-i H tau) |state>. Dense below kDenseMaxSites + 1 sites,
/// Krylov above, unless a backend is forced.
StateVector evolve(const StateVector& state, const SpinHamiltonian& h, double tau,
                   EvolutionBackend backend = EvolutionBackend::automatic);

}  // namespace mfpt
