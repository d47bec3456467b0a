#pragma once

#include <cstddef>
#include <vector>

#include "fwm/fock.hpp"

namespace fwm {

enum class Integrator {
  Spectral,  ///< exact exponential, block by block
  Rk4,       ///< fixed-step classical RK4 with step-halving error control
};

struct EvolveOptions {
  Integrator method = Integrator::Spectral;
  /// RK4 only: accepted Richardson estimate of the state error (2-norm).
  double tolerance = 1e-11;
  /// RK4 only: initial step is step_factor / rho(H).
  double step_factor = 0.05;
  /// RK4 only: largest step count tried before giving up.
  std::size_t max_steps = 1u << 22;
};

struct EvolveDiagnostics {
  std::size_t steps = 0;
  double error_estimate = 0.0;
  double spectral_radius_bound = 0.0;
};

/// Exact propagator exp(-iHt).  H is split into the connected components of
/// its sparsity graph; for the mixing Hamiltonian these are the sectors of
/// fixed (n_a + 2 n_b, n_b - n_c), each a short tridiagonal chain.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const Hamiltonian& h);

  FockStateVector apply(const FockStateVector& psi, double t) const;

  std::size_t block_count() const { return blocks_.size(); }
  std::size_t largest_block() const;

 private:
  struct Block {
    std::vector<Eigen::Index> indices;
    Eigen::MatrixXcd vectors;
    Eigen::VectorXd values;  ///< relative to shift
    double shift = 0.0;
  };
  std::shared_ptr<const FockBasis> basis_;
  std::vector<Block> blocks_;
};

/// Gershgorin bound on the spectral radius.
double spectral_radius_bound(const SparseOp& m);

/// psi(t) for i dpsi/dt = H psi.  Throws ConvergenceError when RK4 cannot
/// meet the tolerance within max_steps.
FockStateVector evolve(const Hamiltonian& h, const FockStateVector& psi0, double t,
                       const EvolveOptions& options = {}, EvolveDiagnostics* diagnostics = nullptr);

}  // namespace fwm
