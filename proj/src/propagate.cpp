#include "fwm/propagate.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "fwm/error.hpp"

namespace fwm {

SpectralPropagator::SpectralPropagator(const Hamiltonian& h) : basis_(h.basis) {
  const SparseOp& m = h.matrix;
  const Eigen::Index dim = m.rows();
  std::vector<int> seen(static_cast<std::size_t>(dim), 0);
  std::vector<Eigen::Index> stack;

  for (Eigen::Index root = 0; root < dim; ++root) {
    if (seen[static_cast<std::size_t>(root)]) continue;
    Block block;
    stack.push_back(root);
    seen[static_cast<std::size_t>(root)] = 1;
    while (!stack.empty()) {
      const Eigen::Index i = stack.back();
      stack.pop_back();
      block.indices.push_back(i);
      for (SparseOp::InnerIterator it(m, i); it; ++it) {
        const auto j = static_cast<std::size_t>(it.col());
        if (!seen[j]) {
          seen[j] = 1;
          stack.push_back(it.col());
        }
      }
    }
    std::sort(block.indices.begin(), block.indices.end());

    const auto k = static_cast<Eigen::Index>(block.indices.size());
    Eigen::MatrixXcd hb = Eigen::MatrixXcd::Zero(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
      for (SparseOp::InnerIterator it(m, block.indices[static_cast<std::size_t>(r)]); it; ++it) {
        const auto pos = std::lower_bound(block.indices.begin(), block.indices.end(), it.col());
        hb(r, pos - block.indices.begin()) = it.value();
      }
    }
    // Pull the largest common diagonal part out so that huge free
    // frequencies do not swamp the coupling in the eigensolver.
    block.shift = hb(0, 0).real();
    hb.diagonal().array() -= block.shift;
    if (k == 1) {
      block.vectors = Eigen::MatrixXcd::Identity(1, 1);
      block.values = Eigen::VectorXd::Constant(1, hb(0, 0).real());
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hb);
      block.vectors = es.eigenvectors();
      block.values = es.eigenvalues();
    }
    blocks_.push_back(std::move(block));
  }
}

std::size_t SpectralPropagator::largest_block() const {
  std::size_t n = 0;
  for (const Block& b : blocks_) n = std::max(n, b.indices.size());
  return n;
}

FockStateVector SpectralPropagator::apply(const FockStateVector& psi, double t) const {
  FockStateVector out = psi;
  if (t == 0.0) return out;
  for (const Block& b : blocks_) {
    const auto k = static_cast<Eigen::Index>(b.indices.size());
    Eigen::VectorXcd x(k);
    for (Eigen::Index r = 0; r < k; ++r) x[r] = psi.amplitudes[b.indices[static_cast<std::size_t>(r)]];
    Eigen::VectorXcd c = b.vectors.adjoint() * x;
    const cplx common = std::polar(1.0, -b.shift * t);
    for (Eigen::Index j = 0; j < k; ++j) c[j] *= common * std::polar(1.0, -b.values[j] * t);
    x = b.vectors * c;
    for (Eigen::Index r = 0; r < k; ++r) out.amplitudes[b.indices[static_cast<std::size_t>(r)]] = x[r];
  }
  return out;
}

double spectral_radius_bound(const SparseOp& m) {
  double bound = 0.0;
  for (Eigen::Index i = 0; i < m.outerSize(); ++i) {
    double row = 0.0;
    for (SparseOp::InnerIterator it(m, i); it; ++it) row += std::abs(it.value());
    bound = std::max(bound, row);
  }
  return bound;
}

namespace {

Eigen::VectorXcd rk4(const SparseOp& h, const Eigen::VectorXcd& psi0, double t, std::size_t steps) {
  const cplx minus_i{0.0, -1.0};
  const double dt = t / static_cast<double>(steps);
  Eigen::VectorXcd psi = psi0;
  Eigen::VectorXcd k1, k2, k3, k4;
  for (std::size_t s = 0; s < steps; ++s) {
    k1 = minus_i * (h * psi);
    k2 = minus_i * (h * (psi + 0.5 * dt * k1));
    k3 = minus_i * (h * (psi + 0.5 * dt * k2));
    k4 = minus_i * (h * (psi + dt * k3));
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return psi;
}

}  // namespace

FockStateVector evolve(const Hamiltonian& h, const FockStateVector& psi0, double t,
                       const EvolveOptions& options, EvolveDiagnostics* diagnostics) {
  if (t < 0.0 || !std::isfinite(t)) throw ConfigError("evolution time must be finite and >= 0");
  EvolveDiagnostics diag;
  FockStateVector out = psi0;
  if (t == 0.0) {
    if (diagnostics) *diagnostics = diag;
    return out;
  }
  if (options.method == Integrator::Spectral) {
    out = SpectralPropagator(h).apply(psi0, t);
    if (diagnostics) *diagnostics = diag;
    return out;
  }

  const double rho = spectral_radius_bound(h.matrix);
  diag.spectral_radius_bound = rho;
  auto steps = static_cast<std::size_t>(std::ceil(rho * t / options.step_factor));
  steps = std::max<std::size_t>(steps, 1);
  Eigen::VectorXcd coarse = rk4(h.matrix, psi0.amplitudes, t, steps);
  for (;;) {
    if (2 * steps > options.max_steps) {
      std::ostringstream msg;
      msg << "RK4 did not converge: " << steps << " steps, error estimate " << diag.error_estimate
          << " > tolerance " << options.tolerance << " (budget " << options.max_steps << ")";
      throw ConvergenceError(msg.str());
    }
    Eigen::VectorXcd fine = rk4(h.matrix, psi0.amplitudes, t, 2 * steps);
    diag.error_estimate = (fine - coarse).norm() / 15.0;
    steps *= 2;
    diag.steps = steps;
    coarse = std::move(fine);
    if (diag.error_estimate <= options.tolerance) break;
  }
  out.amplitudes = std::move(coarse);
  if (diagnostics) *diagnostics = diag;
  return out;
}

}  // namespace fwm
