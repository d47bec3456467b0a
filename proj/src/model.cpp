#include "fwm/model.hpp"

#include <cmath>
#include <string>

#include "fwm/error.hpp"

namespace fwm {

namespace {

constexpr cplx I{0.0, 1.0};

// 1 - exp(i x) without cancellation in the real part.
cplx one_minus_expi(double x) {
  const double s = std::sin(0.5 * x);
  return {2.0 * s * s, -std::sin(x)};
}

// S(x) = (1 - e^{ix}) / x
cplx s_series(double x) {
  const double x2 = x * x;
  return {0.5 * x - x2 * x / 24.0, -1.0 + x2 / 6.0};
}

// T(x) = (S(x) + i) / x = (1 - e^{ix} + ix) / x^2
cplx t_series(double x) {
  const double x2 = x * x;
  return {0.5 - x2 / 24.0, x / 6.0 - x2 * x / 120.0};
}

cplx s_any(double x) {
  if (std::abs(x) < kSeriesThreshold) return s_series(x);
  return one_minus_expi(x) / x;
}

void check_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ConfigError(std::string(name) + " must be finite");
}

PerturbativeCoefficients phases_only(const ModelParams& p, double t) {
  PerturbativeCoefficients c;
  c.t = t;
  c.perturbative_valid = std::abs(p.g) * t <= kValidityLimit;
  c.free_a = std::polar(1.0, -p.omega_a * t);
  c.free_b = std::polar(1.0, -p.omega_b * t);
  c.free_c = std::polar(1.0, -p.omega_c * t);
  return c;
}

void fill_derived(PerturbativeCoefficients& c) {
  c.a_env[0] = c.b_env[0] = c.c_env[0] = cplx{1.0, 0.0};
  c.a_env[3] = c.a_env[4] = -0.5 * c.a_env[2];
  c.b_env[3] = c.b_env[4] = -2.0 * c.b_env[2];
  c.c_env[3] = c.c_env[4] = -2.0 * c.c_env[2];
}

}  // namespace

ModelParams ModelParams::from_detuning(double delta, double g) {
  return ModelParams{0.5 * delta, 0.0, 0.0, g};
}

void ModelParams::validate() const {
  check_finite(omega_a, "params.omega_a");
  check_finite(omega_b, "params.omega_b");
  check_finite(omega_c, "params.omega_c");
  check_finite(g, "params.g");
  if (g < 0.0) throw ConfigError("params.g must be >= 0");
}

double delta_omega1(const ModelParams& params) {
  return 2.0 * params.omega_a - params.omega_b - params.omega_c;
}

CoherentInput CoherentInput::with_pump_phase(double alpha_abs, double phi, cplx beta, cplx gamma) {
  return CoherentInput{std::polar(alpha_abs, phi), beta, gamma};
}

void CoherentInput::validate() const {
  for (const cplx& z : {alpha, beta, gamma}) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw ConfigError("input amplitudes must be finite");
  }
}

namespace detail {

PerturbativeCoefficients coefficients_closed_form(const ModelParams& p, double t) {
  const double d = delta_omega1(p);
  const double x = d * t;
  const double g = p.g;
  PerturbativeCoefficients c = phases_only(p, t);

  c.a_env[1] = (2.0 * g / d) * one_minus_expi(x);
  c.a_env[2] = (2.0 * g / d) * (c.a_env[1] + 2.0 * I * g * t);

  c.b_env[1] = -(g / d) * one_minus_expi(-x);
  c.b_env[2] = -(g / d) * (c.b_env[1] + I * g * t);
  c.c_env[1] = c.b_env[1];
  c.c_env[2] = c.b_env[2];

  fill_derived(c);
  return c;
}

PerturbativeCoefficients coefficients_series(const ModelParams& p, double t) {
  const double x = delta_omega1(p) * t;
  const double gt = p.g * t;
  PerturbativeCoefficients c = phases_only(p, t);

  c.a_env[1] = 2.0 * gt * s_series(x);
  c.a_env[2] = 4.0 * gt * gt * t_series(x);

  c.b_env[1] = gt * s_series(-x);
  c.b_env[2] = gt * gt * t_series(-x);
  c.c_env[1] = c.b_env[1];
  c.c_env[2] = c.b_env[2];

  fill_derived(c);
  return c;
}

}  // namespace detail

PerturbativeCoefficients coefficients(const ModelParams& params, double t) {
  if (std::abs(delta_omega1(params) * t) < kSeriesThreshold)
    return detail::coefficients_series(params, t);
  return detail::coefficients_closed_form(params, t);
}

EnvelopeRates envelope_rates(const ModelParams& p, double t) {
  const double x = delta_omega1(p) * t;
  const double g = p.g;
  EnvelopeRates r;

  r.a_env_dot[1] = -2.0 * I * g * std::polar(1.0, x);
  r.a_env_dot[2] = 4.0 * I * g * g * t * s_any(x);
  r.a_env_dot[3] = r.a_env_dot[4] = -0.5 * r.a_env_dot[2];

  r.b_env_dot[1] = -I * g * std::polar(1.0, -x);
  r.b_env_dot[2] = I * g * g * t * s_any(-x);
  r.b_env_dot[3] = r.b_env_dot[4] = -2.0 * r.b_env_dot[2];
  r.c_env_dot = r.b_env_dot;
  return r;
}

}  // namespace fwm
