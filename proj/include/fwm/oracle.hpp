#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fwm/fock.hpp"
#include "fwm/propagate.hpp"
#include "fwm/witness.hpp"

namespace fwm {

/// Witness value assembled from raw moments of psi(t).  `params` only
/// matters for the Duan witness, whose quadratures use the co-rotated
/// operators a exp(i omega_a t) etc.
WitnessValue oracle_witness(const WitnessId& id, const FockStateVector& psi_t, const ModelParams& params,
                            double t, double phi = 0.0);

struct OracleOptions {
  CutoffPolicy cutoffs;
  /// Explicit cutoffs override the policy.
  std::optional<Occupations> fixed_cutoffs;
  EvolveOptions evolve;
  double max_tail = 1e-12;
};

struct OracleTrajectory {
  std::shared_ptr<const FockBasis> basis;
  std::size_t truncated_couplings = 0;
  std::vector<double> times;
  /// values[w][k]: witness w at times[k]
  std::vector<std::vector<WitnessValue>> values;
  std::vector<double> norm_error;    ///< | ||psi(t)|| - 1 |
  std::vector<double> q1, q2;        ///< <n_a + 2 n_b>, <n_b - n_c>
  std::vector<double> edge_population;
};

/// Evolves the coherent input under `params` and evaluates every id at every
/// time.  Propagation errors (ConvergenceError, CutoffError) propagate.
OracleTrajectory run_oracle(const std::vector<WitnessId>& ids, const ModelParams& params,
                            const CoherentInput& input, const std::vector<double>& times,
                            const OracleOptions& options = {});

using PerturbativeFn =
    std::function<double(const WitnessId&, const PerturbativeCoefficients&, const CoherentInput&)>;

struct CompareOptions {
  OracleOptions oracle;
  Formulation formulation = Formulation::Corrected;
  /// Replaces the witness engine, e.g. to inject a corrupted closed form.
  PerturbativeFn perturbative;
  double exponent_threshold = 2.5;
  double roundoff_factor = 100.0;
  unsigned workers = 1;
};

struct ComparisonPoint {
  double t = 0.0;
  std::vector<double> perturbative;  ///< per ladder rung
  std::vector<double> oracle;
  std::vector<double> abs_error;
  std::vector<double> rel_error;  ///< abs_error / max(|oracle|, (g t)^2)
  std::optional<double> exponent;
};

struct ComparisonReport {
  WitnessId id;
  double phi = 0.0;
  std::vector<double> ladder;  ///< g per rung
  std::vector<ComparisonPoint> points;
  /// Slope of log(max_t |error|) against log(g); set only when the error
  /// clears round-off at every rung.
  std::optional<double> exponent;
  /// Largest rel_error over the grid at the smallest rung.
  double agreement = 0.0;
  bool suspect = false;
  /// "certified", "suspect", "at round-off", "degenerate, skipped" or "failed: ...".
  std::string status;
};

/// Ladder must have at least 3 rungs at a common delta_omega1 (ConfigError
/// otherwise).  Times are shared by all rungs.
std::vector<ComparisonReport> compare(const std::vector<WitnessId>& ids, const std::vector<ModelParams>& ladder,
                                      const CoherentInput& input, const std::vector<double>& times,
                                      const CompareOptions& options = {});

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fwm
