#pragma once

#include "fwm/fock.hpp"
#include "fwm/model.hpp"

namespace fwm {

/// Ansatz operators a(t), b(t), c(t) materialized on `basis` from exact
/// ladder-word matrix elements.
struct AnsatzOperators {
  SparseOp a, b, c;
};

AnsatzOperators ansatz_operators(const PerturbativeCoefficients& coeffs, const FockBasis& basis);

/// max over modes of || [x(t), x(t)^dag] - 1 || on the block with every
/// occupation <= cutoff - 3.  Cutoffs below 4 raise ConfigError.
double etcr_residual(const ModelParams& params, double t, const Occupations& cutoffs);

/// max over modes of the Heisenberg-equation defect, e.g.
///   da/dt + i (omega_a a(t) + 2 g a(t)^dag b(t) c(t)),
/// on the same block, with the time derivative taken analytically.
double eom_residual(const ModelParams& params, double t, const Occupations& cutoffs);

/// t * eom_residual divided by the largest second-order part of the ansatz
/// (the f3..f5 style terms) on the same block.  Dimensionless; roughly 30 g t
/// at cutoffs 10/8/8 because the defect carries one more power of occupation.
/// Zero when the residual is zero.
double eom_relative_residual(const ModelParams& params, double t, const Occupations& cutoffs);

}  // namespace fwm
