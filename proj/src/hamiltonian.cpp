#include "mfpt/hamiltonian.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

namespace mfpt {

namespace {

constexpr double kDegeneracyGap = 1e-10;

// Phase convention: largest |amplitude| (first on ties) made real positive.
Eigen::VectorXcd fix_phase(Eigen::VectorXcd v) {
  Eigen::Index best = 0;
  double best_mag = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    if (mag > best_mag * (1.0 + 1e-12)) {
      best = i;
      best_mag = mag;
    }
  }
  if (best_mag > 0.0) v *= std::conj(v[best]) / best_mag;
  return v;
}

struct LanczosResult {
  double e0 = 0.0;
  double e1 = 0.0;
  Eigen::VectorXd vector;
};

// Lowest eigenpair of a real symmetric operator restricted to the invariant
// subspace containing `start`. Full reorthogonalization; restarts from the
// current Ritz vector until the residual drops below tol.
LanczosResult lanczos_lowest(const Eigen::SparseMatrix<double, Eigen::RowMajor>& h, Eigen::VectorXd start,
                             double tol = 1e-11, int max_basis = 160, int max_restarts = 50) {
  const Eigen::Index dim = h.rows();
  LanczosResult out;
  start.normalize();
  for (int restart = 0; restart < max_restarts; ++restart) {
    const int m_cap = static_cast<int>(std::min<Eigen::Index>(max_basis, dim));
    Eigen::MatrixXd basis(dim, m_cap);
    std::vector<double> diag;
    std::vector<double> off;
    basis.col(0) = start;
    int m = 0;
    for (; m < m_cap; ++m) {
      Eigen::VectorXd w = h * basis.col(m);
      diag.push_back(basis.col(m).dot(w));
      // Two passes of classical Gram-Schmidt against the whole basis.
      for (int pass = 0; pass < 2; ++pass) {
        w -= basis.leftCols(m + 1) * (basis.leftCols(m + 1).transpose() * w);
      }
      const double beta = w.norm();
      if (m + 1 == m_cap || beta < 1e-13 * std::max(1.0, std::abs(diag.back()))) {
        ++m;
        break;
      }
      off.push_back(beta);
      basis.col(m + 1) = w / beta;
    }
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) t(i, i) = diag[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = off[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    out.e0 = es.eigenvalues()[0];
    out.e1 = m > 1 ? es.eigenvalues()[1] : std::numeric_limits<double>::infinity();
    out.vector = basis.leftCols(m) * es.eigenvectors().col(0);
    out.vector.normalize();
    const double residual = (h * out.vector - out.e0 * out.vector).norm();
    if (residual < tol * std::max(1.0, std::abs(out.e0)) || m == dim) return out;
    start = out.vector;
  }
  return out;
}

Eigen::VectorXd sector_start_vector(int n_sites, int parity, std::uint64_t seed) {
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  std::mt19937_64 rng(seed);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double r = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (std::popcount(static_cast<std::uint64_t>(i)) % 2 == parity) v[i] = r - 0.5;
  }
  return v;
}

}  // namespace

SpinHamiltonian build_hamiltonian(int n_sites, double gamma, int max_sites) {
  if (n_sites < 4 || n_sites % 2 != 0) {
    throw InvalidSpecError("build_hamiltonian: n_sites must be even and >= 4, got " + std::to_string(n_sites));
  }
  if (n_sites > std::min(max_sites, kMaxSites)) {
    throw ResourceError("build_hamiltonian: n_sites = " + std::to_string(n_sites) + " exceeds the cap of " +
                        std::to_string(std::min(max_sites, kMaxSites)));
  }
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(dim) * static_cast<std::size_t>(n_sites + 1));
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto idx = static_cast<BasisIndex>(i);
    const double diag = -gamma * magnetization(n_sites, idx);
    if (diag != 0.0) entries.emplace_back(i, i, diag);
    for (int j = 0; j < n_sites; ++j) {
      const BasisIndex bond = (BasisIndex{1} << j) | (BasisIndex{1} << ((j + 1) % n_sites));
      entries.emplace_back(i, static_cast<Eigen::Index>(idx ^ bond), -1.0);
    }
  }
  SpinHamiltonian h{n_sites, gamma, Eigen::SparseMatrix<double, Eigen::RowMajor>(dim, dim)};
  h.matrix.setFromTriplets(entries.begin(), entries.end());
  h.matrix.makeCompressed();
  return h;
}

BlockSpectrum diagonalize(const SpinHamiltonian& h) {
  if (h.n_sites > kDenseMaxSites) {
    throw ResourceError("diagonalize: dense spectrum limited to " + std::to_string(kDenseMaxSites) + " sites");
  }
  BlockSpectrum spectrum{h.n_sites, {}};
  const Eigen::Index dim = h.dimension();
  for (int parity = 0; parity < 2; ++parity) {
    ParityBlock block;
    block.parity = parity;
    std::vector<Eigen::Index> position(static_cast<std::size_t>(dim), -1);
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (std::popcount(static_cast<std::uint64_t>(i)) % 2 == parity) {
        position[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(block.indices.size());
        block.indices.push_back(static_cast<BasisIndex>(i));
      }
    }
    const auto n = static_cast<Eigen::Index>(block.indices.size());
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const Eigen::Index row = block.indices[static_cast<std::size_t>(r)];
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(h.matrix, row); it; ++it) {
        dense(r, position[static_cast<std::size_t>(it.col())]) += it.value();
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    if (es.info() != Eigen::Success) throw EvolutionError("diagonalize: eigensolver failed", 0.0);
    block.energies = es.eigenvalues();
    block.vectors = es.eigenvectors();
    spectrum.blocks.push_back(std::move(block));
  }
  return spectrum;
}

GroundState ground_state(const BlockSpectrum& spectrum) {
  const ParityBlock& even = spectrum.blocks[0];
  const ParityBlock& odd = spectrum.blocks[1];
  const bool pick_odd = odd.energies[0] < even.energies[0] - kDegeneracyGap;
  const ParityBlock& chosen = pick_odd ? odd : even;
  const ParityBlock& other = pick_odd ? even : odd;

  const Eigen::Index dim = Eigen::Index{1} << spectrum.n_sites;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  for (std::size_t r = 0; r < chosen.indices.size(); ++r) {
    v[chosen.indices[r]] = chosen.vectors(static_cast<Eigen::Index>(r), 0);
  }

  GroundState gs;
  gs.energy = chosen.energies[0];
  const double next_same = chosen.energies.size() > 1 ? chosen.energies[1] : std::numeric_limits<double>::infinity();
  gs.gap = std::min(next_same, other.energies[0]) - gs.energy;
  gs.gap = std::abs(gs.gap);
  gs.degenerate = gs.gap < kDegeneracyGap;
  gs.state = StateVector(fix_phase(std::move(v)).normalized());
  return gs;
}

GroundState ground_state(const SpinHamiltonian& h, EvolutionBackend method) {
  const bool dense = method == EvolutionBackend::dense ||
                     (method == EvolutionBackend::automatic && h.n_sites <= kDenseMaxSites);
  if (dense) return ground_state(diagonalize(h));

  const LanczosResult even = lanczos_lowest(h.matrix, sector_start_vector(h.n_sites, 0, 0x5eed0));
  const LanczosResult odd = lanczos_lowest(h.matrix, sector_start_vector(h.n_sites, 1, 0x5eed1));
  const bool pick_odd = odd.e0 < even.e0 - kDegeneracyGap;
  const LanczosResult& chosen = pick_odd ? odd : even;
  const LanczosResult& other = pick_odd ? even : odd;

  GroundState gs;
  gs.energy = chosen.e0;
  gs.gap = std::abs(std::min(chosen.e1, other.e0) - chosen.e0);
  gs.degenerate = gs.gap < kDegeneracyGap;
  gs.state = StateVector(fix_phase(chosen.vector.cast<std::complex<double>>()).normalized());
  return gs;
}

Propagator::Propagator(const SpinHamiltonian& h, double tau, EvolutionBackend backend, KrylovOptions krylov)
    : backend_(backend), tau_(tau), krylov_(krylov) {
  if (backend_ == EvolutionBackend::automatic) {
    backend_ = h.n_sites <= kDenseMaxSites ? EvolutionBackend::dense : EvolutionBackend::krylov;
  }
  if (backend_ == EvolutionBackend::dense) {
    spectrum_ = std::make_shared<const BlockSpectrum>(diagonalize(h));
    for (const ParityBlock& b : spectrum_->blocks) {
      phases_.push_back((std::complex<double>(0.0, -tau) * b.energies.cast<std::complex<double>>()).array().exp());
    }
  } else {
    matrix_ = h.matrix;
  }
}

Propagator::Propagator(std::shared_ptr<const BlockSpectrum> spectrum, double tau)
    : backend_(EvolutionBackend::dense), tau_(tau), spectrum_(std::move(spectrum)) {
  for (const ParityBlock& b : spectrum_->blocks) {
    phases_.push_back((std::complex<double>(0.0, -tau) * b.energies.cast<std::complex<double>>()).array().exp());
  }
}

StateVector Propagator::apply(const StateVector& state) const {
  if (backend_ == EvolutionBackend::dense) return StateVector(apply_dense(state.amplitudes()));
  return StateVector(apply_krylov(state.amplitudes()));
}

Eigen::VectorXcd Propagator::apply_dense(const Eigen::VectorXcd& v) const {
  if (v.size() != (Eigen::Index{1} << spectrum_->n_sites)) {
    throw InvalidSpecError("Propagator: state dimension does not match the Hamiltonian");
  }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  for (std::size_t b = 0; b < spectrum_->blocks.size(); ++b) {
    const ParityBlock& block = spectrum_->blocks[b];
    const auto n = static_cast<Eigen::Index>(block.indices.size());
    // Real and imaginary parts as two columns so both products stay real.
    Eigen::MatrixXd x(n, 2);
    bool any = false;
    for (Eigen::Index r = 0; r < n; ++r) {
      const std::complex<double> a = v[block.indices[static_cast<std::size_t>(r)]];
      x(r, 0) = a.real();
      x(r, 1) = a.imag();
      any = any || a != 0.0;
    }
    if (!any) continue;
    Eigen::MatrixXd coeff = block.vectors.transpose() * x;
    const Eigen::VectorXcd& ph = phases_[b];
    for (Eigen::Index r = 0; r < n; ++r) {
      const std::complex<double> c = ph[r] * std::complex<double>(coeff(r, 0), coeff(r, 1));
      coeff(r, 0) = c.real();
      coeff(r, 1) = c.imag();
    }
    const Eigen::MatrixXd y = block.vectors * coeff;
    for (Eigen::Index r = 0; r < n; ++r) {
      out[block.indices[static_cast<std::size_t>(r)]] = std::complex<double>(y(r, 0), y(r, 1));
    }
  }
  return out;
}

// Lanczos approximation exp(-i H dt) w ~ |w| V_m exp(-i T_m dt) e_1. The
// basis does not depend on dt, so each substep builds one basis and then
// takes the longest dt (halving from the remaining time) whose a posteriori
// error |w| beta_m |e_m^T exp(-i T_m dt) e_1| meets the per-unit-time budget.
Eigen::VectorXcd Propagator::apply_krylov(const Eigen::VectorXcd& v) const {
  if (v.size() != matrix_.rows()) throw InvalidSpecError("Propagator: state dimension does not match the Hamiltonian");
  const Eigen::Index dim = v.size();
  Eigen::VectorXcd w = v;
  const double norm0 = v.norm();
  if (norm0 == 0.0 || tau_ == 0.0) return w;

  double remaining = tau_;
  int substeps = 0;
  while (remaining > 0.0) {
    if (++substeps > krylov_.max_substeps) {
      throw EvolutionError("Krylov evolution exceeded the substep cap", remaining);
    }
    const double beta0 = w.norm();
    if (beta0 == 0.0) break;
    const int m_cap = static_cast<int>(std::min<Eigen::Index>(krylov_.max_dimension, dim));
    Eigen::MatrixXcd basis(dim, m_cap);
    std::vector<double> diag;
    std::vector<double> off;
    basis.col(0) = w / beta0;
    double tail = 0.0;  // beta_m of the first neglected direction
    int m = 0;
    for (; m < m_cap; ++m) {
      Eigen::VectorXcd q = matrix_ * basis.col(m);
      diag.push_back(basis.col(m).dot(q).real());
      for (int pass = 0; pass < 2; ++pass) {
        q -= basis.leftCols(m + 1) * (basis.leftCols(m + 1).adjoint() * q);
      }
      const double beta = q.norm();
      if (beta < 1e-14 * std::max(1.0, std::abs(diag.back()))) {
        tail = 0.0;  // invariant subspace: the projection is exact
        ++m;
        break;
      }
      if (m + 1 == m_cap) {
        tail = beta;
        ++m;
        break;
      }
      off.push_back(beta);
      basis.col(m + 1) = q / beta;
    }

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) t(i, i) = diag[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = off[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::VectorXd first_row = es.eigenvectors().row(0).transpose();

    auto small_exp = [&](double dt) {
      Eigen::VectorXcd c(m);
      for (int i = 0; i < m; ++i) c[i] = std::polar(first_row[i], -es.eigenvalues()[i] * dt);
      return Eigen::VectorXcd(es.eigenvectors().cast<std::complex<double>>() * c);
    };

    double dt = remaining;
    Eigen::VectorXcd y = small_exp(dt);
    double err = beta0 * tail * std::abs(y[m - 1]);
    while (err > krylov_.tolerance * norm0 * (dt / tau_) && dt > tau_ * 1e-12) {
      dt *= 0.5;
      y = small_exp(dt);
      err = beta0 * tail * std::abs(y[m - 1]);
    }
    if (err > krylov_.tolerance * norm0 * (dt / tau_)) {
      throw EvolutionError("Krylov evolution failed to reach tolerance", err);
    }
    w = beta0 * (basis.leftCols(m) * y);
    remaining -= dt;
    if (remaining < tau_ * 1e-15) remaining = 0.0;
  }
  return w;
}

StateVector evolve(const StateVector& state, const SpinHamiltonian& h, double tau, EvolutionBackend backend) {
  if (tau == 0.0) return state;
  return Propagator(h, tau, backend).apply(state);
}

}  // namespace mfpt
