#pragma once

#include <array>
#include <complex>

namespace fwm {

using cplx = std::complex<double>;

/// Mode frequencies (angular, s^-1) and the four-wave-mixing coupling g.
struct ModelParams {
  double omega_a = 0.0;
  double omega_b = 0.0;
  double omega_c = 0.0;
  double g = 0.0;

  /// Synthetic frame (delta/2, 0, 0); witnesses only see delta and g.
  static ModelParams from_detuning(double delta, double g);

  /// Throws ConfigError on non-finite fields.
  void validate() const;

  bool operator==(const ModelParams&) const = default;
};

/// 2 omega_a - omega_b - omega_c, sign preserved.
double delta_omega1(const ModelParams& params);

/// Coherent amplitudes of pump (alpha), signal (beta) and idler (gamma).
struct CoherentInput {
  cplx alpha{0.0, 0.0};
  cplx beta{0.0, 0.0};
  cplx gamma{0.0, 0.0};

  /// alpha = alpha_abs * exp(i phi).
  static CoherentInput with_pump_phase(double alpha_abs, double phi, cplx beta, cplx gamma);

  void validate() const;

  bool operator==(const CoherentInput&) const = default;
};

/// Coefficients of the second-order operator solution
///   a(t) = f1 a + f2 a^dag b c + f3 a + f4 a^dag a^2 ... etc.
///
/// Each family is stored as a pure free phase (f1, g1, h1) times a
/// rotating-frame envelope, so that f_k = f1 * a_env[k-1].  The envelopes
/// depend on the frequencies only through delta_omega1.
struct PerturbativeCoefficients {
  double t = 0.0;
  bool perturbative_valid = true;

  cplx free_a{1.0, 0.0};  ///< f1 = exp(-i omega_a t)
  cplx free_b{1.0, 0.0};  ///< g1
  cplx free_c{1.0, 0.0};  ///< h1

  std::array<cplx, 5> a_env{cplx{1.0, 0.0}};  ///< f_k / f1
  std::array<cplx, 5> b_env{cplx{1.0, 0.0}};  ///< g_k / g1
  std::array<cplx, 5> c_env{cplx{1.0, 0.0}};  ///< h_k / h1

  /// k in 1..5.
  cplx f(int k) const { return free_a * a_env.at(k - 1); }
  cplx g(int k) const { return free_b * b_env.at(k - 1); }
  cplx h(int k) const { return free_c * c_env.at(k - 1); }
};

/// Time derivatives of the envelopes, d/dt a_env[k] etc.  With these,
///   da/dt + i omega_a a(t) = f1 * sum_k a_env_dot[k] * M_k.
struct EnvelopeRates {
  std::array<cplx, 5> a_env_dot{};
  std::array<cplx, 5> b_env_dot{};
  std::array<cplx, 5> c_env_dot{};
};

/// |delta t| below this uses the Taylor branch.
inline constexpr double kSeriesThreshold = 1e-4;
/// g t above this clears perturbative_valid.
inline constexpr double kValidityLimit = 0.1;

PerturbativeCoefficients coefficients(const ModelParams& params, double t);
EnvelopeRates envelope_rates(const ModelParams& params, double t);

namespace detail {
// Both branches exposed for continuity checks at the threshold.
PerturbativeCoefficients coefficients_closed_form(const ModelParams& params, double t);
PerturbativeCoefficients coefficients_series(const ModelParams& params, double t);
}  // namespace detail

}  // namespace fwm
