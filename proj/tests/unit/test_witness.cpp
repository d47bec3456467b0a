#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "../oracles/printed_polynomials.hpp"
#include "fwm/error.hpp"
#include "fwm/witness.hpp"

using namespace fwm;

namespace {

constexpr double kPi = std::numbers::pi;

// Coefficients with f2 envelope 1 and every other interaction term 0, so a
// witness returns its |f2|^2 bracket directly.
PerturbativeCoefficients unit_f2() {
  PerturbativeCoefficients c;
  c.t = 1.0;
  c.a_env[1] = 1.0;
  return c;
}

PerturbativeCoefficients unit_g2() {
  PerturbativeCoefficients c;
  c.t = 1.0;
  c.b_env[1] = 1.0;
  return c;
}

std::vector<WitnessId> all_ids() {
  std::vector<WitnessId> ids = lower_order_ids();
  for (Criterion crit : {Criterion::HZ1, Criterion::HZ2}) {
    for (const char* p : {"ab", "bc", "ac"}) {
      for (auto [m, n] : {std::pair{2, 1}, {3, 1}, {1, 2}, {2, 2}, {3, 2}, {1, 3}}) ids.push_back({crit, p, m, n});
    }
  }
  return ids;
}

cplx random_amp(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> r(lo, hi), ph(-kPi, kPi);
  return std::polar(r(rng), ph(rng));
}

struct Sample {
  ModelParams p;
  double t;
  CoherentInput in;
};

Sample random_sample(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Sample s;
  s.p = ModelParams{4.0 * u(rng) - 2.0, 4.0 * u(rng) - 2.0, 4.0 * u(rng) - 2.0, 0.05 * u(rng)};
  s.t = 0.1 + 3.0 * u(rng);
  s.in = {random_amp(rng, 0.2, 3.0), random_amp(rng, 0.2, 2.5), random_amp(rng, 0.2, 2.5)};
  return s;
}

}  // namespace

TEST_CASE("hand values at alpha = 5, beta = 4, gamma = 2") {
  const printed::In x(5.0, 4.0, 2.0);
  // Frozen from term-by-term arithmetic; the oracle must reproduce them.
  CHECK(printed::hz1_ab(x) == doctest::Approx(-1669.75).epsilon(1e-14));
  CHECK(printed::hz1_ac(x) == doctest::Approx(1312.25).epsilon(1e-14));
  CHECK(printed::hz2_ab(x) == doctest::Approx(11530.25).epsilon(1e-14));
  CHECK(printed::duan_ab(x) == doctest::Approx(440.5).epsilon(1e-14));
  CHECK(printed::duan_bc(x) == doctest::Approx(625.0).epsilon(1e-14));
  CHECK(printed::hz1_ab_mn(5.0, 2.0, 4.0, 2, 1, true) == doctest::Approx(-23757.75).epsilon(1e-14));
  CHECK(printed::hz1_ab_mn(5.0, 2.0, 4.0, 2, 1, false) == doctest::Approx(-20493.75).epsilon(1e-14));
  CHECK(printed::tri_bca(x) == doctest::Approx(8621.0).epsilon(1e-14));

  const auto c = unit_f2();
  for (double phi : {0.0, kPi / 2, kPi, 1.234}) {
    const CoherentInput in = CoherentInput::with_pump_phase(5.0, phi, 4.0, 2.0);
    CHECK(hz1_pair("ab", c, in).value == doctest::Approx(-1669.75).epsilon(1e-14));
    CHECK(hz1_pair("ab", c, in).entangled);
    CHECK(hz1_pair("ac", c, in).value == doctest::Approx(1312.25).epsilon(1e-14));
    CHECK_FALSE(hz1_pair("ac", c, in).entangled);
    CHECK(hz2_pair("ab", c, in).value == doctest::Approx(11530.25).epsilon(1e-14));
    CHECK(duan_pair("ab", c, in).value == doctest::Approx(440.5).epsilon(1e-14));
    CHECK(duan_pair("ac", c, in).value == doctest::Approx(440.5).epsilon(1e-14));
    CHECK(duan_pair("bc", c, in).value == doctest::Approx(625.0).epsilon(1e-14));
    CHECK(hz1_higher("ac", 2, 1, c, in, Formulation::Published).value == doctest::Approx(-23757.75).epsilon(1e-14));
    CHECK(hz1_higher("ac", 2, 1, c, in).value == doctest::Approx(-20493.75).epsilon(1e-14));
    CHECK(trimodal_hz("bca", c, in).value == doctest::Approx(8621.0).epsilon(1e-14));
  }
  // (b,c) bracket: 625 * (1 + 48 + 12) - 2 * 64 * 51 = 31597.
  const CoherentInput in{5.0, 4.0, 2.0};
  CHECK(hz1_pair("bc", unit_g2(), in).value == doctest::Approx(31597.0).epsilon(1e-14));
  // Primed (b,c) bracket: 2 * 16 * 4 * 51 - 625 * 21 = -6597.
  CHECK(hz2_pair("bc", unit_g2(), in).value == doctest::Approx(-6597.0).epsilon(1e-14));
}

TEST_CASE("closed forms agree with the literal printed expressions") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 300; ++i) {
    const Sample s = random_sample(rng);
    const auto c = coefficients(s.p, s.t);
    const printed::In x(s.in.alpha, s.in.beta, s.in.gamma);
    const printed::Co k(c);
    const double F = k.F(), G = k.G();
    const double big = 1.0 + x.a * x.a + x.b * x.b + x.c * x.c;
    auto near = [&](double lib, double ref, int order) {
      const double scale = (F + G + std::abs(k.h2)) * std::pow(big, order);
      return std::abs(lib - ref) <= 1e-12 * scale;
    };

    CHECK(near(hz1_pair("ab", c, s.in).value, F * printed::hz1_ab(x), 3));
    CHECK(near(hz1_pair("ac", c, s.in).value, F * printed::hz1_ac(x), 3));
    CHECK(near(hz2_pair("ab", c, s.in).value, F * printed::hz2_ab(x), 3));
    CHECK(near(hz2_pair("ac", c, s.in).value, F * printed::hz2_ac(x), 3));
    CHECK(near(duan_pair("ab", c, s.in).value, F * printed::duan_ab(x), 2));
    CHECK(near(duan_pair("bc", c, s.in).value, F * printed::duan_bc(x), 2));
    CHECK(near(hz1_pair("bc", c, s.in).value, printed::hz1_bc(k, x), 3));
    CHECK(near(hz2_pair("bc", c, s.in).value, printed::hz2_bc(k, x), 3));
    CHECK(near(trimodal_hz("abc", c, s.in).value, printed::tri_abc(k, x, false), 4));
    CHECK(near(trimodal_hz("acb", c, s.in).value, printed::tri_abc(k, x, true), 4));
    CHECK(near(trimodal_hz("bca", c, s.in).value, F * printed::tri_bca(x), 4));
    CHECK(near(trimodal_symmetric(c, s.in).value, printed::tri_sym(k, x), 4));

    for (auto [m, n] : {std::pair{2, 1}, {3, 1}, {1, 2}, {2, 2}, {3, 2}, {2, 3}}) {
      const int ord = m + n + 2;
      const double ab_pub = F * printed::hz1_ab_mn(x.a, x.b, x.c, m, n, true);
      const double ab_cor = F * printed::hz1_ab_mn(x.a, x.b, x.c, m, n, false);
      const double ac_pub = F * printed::hz1_ab_mn(x.a, x.c, x.b, m, n, true);
      const double ac_cor = F * printed::hz1_ab_mn(x.a, x.c, x.b, m, n, false);
      CHECK(near(hz1_higher("ab", m, n, c, s.in, Formulation::Published).value, ab_pub, ord));
      CHECK(near(hz1_higher("ab", m, n, c, s.in).value, ab_cor, ord));
      CHECK(near(hz1_higher("ac", m, n, c, s.in, Formulation::Published).value, ac_pub, ord));
      CHECK(near(hz1_higher("ac", m, n, c, s.in).value, ac_cor, ord));
      CHECK(near(hz1_higher("bc", m, n, c, s.in, Formulation::Published).value,
                 printed::hz1_bc_mn(k, x, m, n, m - 1.0), ord));
      CHECK(near(hz1_higher("bc", m, n, c, s.in).value, printed::hz1_bc_mn(k, x, m, n, n - 1.0), ord));
      CHECK(near(hz2_higher("ab", m, n, c, s.in).value, F * printed::hz2_ab_mn(x.a, x.b, x.c, m, n), ord));
      CHECK(near(hz2_higher("ac", m, n, c, s.in).value, F * printed::hz2_ab_mn(x.a, x.c, x.b, m, n), ord));
      CHECK(near(hz2_higher("bc", m, n, c, s.in).value, printed::hz2_bc_mn(k, x, m, n), ord));
    }
  }
}

TEST_CASE("printed (m, n) forms reduce to the pair forms at m = n = 1") {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 200; ++i) {
    const Sample s = random_sample(rng);
    const auto c = coefficients(s.p, s.t);
    const printed::In x(s.in.alpha, s.in.beta, s.in.gamma);
    const printed::Co k(c);
    const double scale = std::pow(1.0 + x.a * x.a + x.b * x.b + x.c * x.c, 3);
    CHECK(std::abs(printed::hz1_ab_mn(x.a, x.b, x.c, 1, 1, true) - printed::hz1_ab(x)) <= 1e-13 * scale);
    CHECK(std::abs(printed::hz1_ab_mn(x.a, x.c, x.b, 1, 1, true) - printed::hz1_ac(x)) <= 1e-13 * scale);
    CHECK(std::abs(printed::hz2_ab_mn(x.a, x.b, x.c, 1, 1) - printed::hz2_ab(x)) <= 1e-13 * scale);
    const double g = k.G() + std::abs(k.h2);
    CHECK(std::abs(printed::hz1_bc_mn(k, x, 1, 1, 0.0) - printed::hz1_bc(k, x)) <= 1e-13 * g * scale);
    CHECK(std::abs(printed::hz2_bc_mn(k, x, 1, 1) - printed::hz2_bc(k, x)) <= 1e-13 * g * scale);
  }
}

TEST_CASE("order reduction is bit exact") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 1000; ++i) {
    const Sample s = random_sample(rng);
    const auto c = coefficients(s.p, s.t);
    for (const char* p : {"ab", "bc", "ac"}) {
      CHECK(hz1_higher(p, 1, 1, c, s.in).value == hz1_pair(p, c, s.in).value);
      CHECK(hz1_higher(p, 1, 1, c, s.in, Formulation::Published).value == hz1_pair(p, c, s.in).value);
      CHECK(hz2_higher(p, 1, 1, c, s.in).value == hz2_pair(p, c, s.in).value);
    }
  }
}

TEST_CASE("every witness vanishes at t = 0") {
  const ModelParams p{1.1, 0.4, -0.7, 0.03};
  const auto c = coefficients(p, 0.0);
  const CoherentInput in{cplx(1.3, 0.4), cplx(0.8, -0.2), 0.6};
  for (const WitnessId& id : all_ids()) {
    const WitnessValue w = evaluate(id, c, in);
    CHECK(w.value == 0.0);
    CHECK_FALSE(w.entangled);
    CHECK(evaluate(id, c, in, Formulation::Published).value == 0.0);
  }
}

TEST_CASE("pump phase shift by pi leaves every value unchanged") {
  std::mt19937_64 rng(24);
  for (int i = 0; i < 200; ++i) {
    const Sample s = random_sample(rng);
    const auto c = coefficients(s.p, s.t);
    CoherentInput flipped = s.in;
    flipped.alpha = -flipped.alpha;
    for (const WitnessId& id : all_ids()) {
      CHECK(evaluate(id, c, s.in).value == evaluate(id, c, flipped).value);
      CHECK(evaluate(id, c, s.in, Formulation::Published).value ==
            evaluate(id, c, flipped, Formulation::Published).value);
    }
  }
}

// Joint conjugation: envelopes at (-delta, -g) are the conjugates of those at
// (delta, g), and a real witness of conjugated coefficients and inputs is
// unchanged.
TEST_CASE("joint conjugation of coefficients and input") {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double delta = 4.0 * u(rng) - 2.0, g = 0.05 * u(rng), t = 0.1 + 3.0 * u(rng);
    const CoherentInput in{random_amp(rng, 0.2, 3.0), random_amp(rng, 0.2, 2.0), random_amp(rng, 0.2, 2.0)};
    const CoherentInput conj{std::conj(in.alpha), std::conj(in.beta), std::conj(in.gamma)};
    const auto c = coefficients(ModelParams::from_detuning(delta, g), t);
    const auto d = coefficients(ModelParams::from_detuning(-delta, -g), t);
    for (int k = 0; k < 5; ++k) {
      CHECK(std::abs(d.a_env[k] - std::conj(c.a_env[k])) <= 1e-15 * std::abs(c.a_env[k]));
      CHECK(std::abs(d.b_env[k] - std::conj(c.b_env[k])) <= 1e-15 * std::abs(c.b_env[k]));
    }
    PerturbativeCoefficients e = c;
    for (auto* env : {&e.a_env, &e.b_env, &e.c_env})
      for (cplx& z : *env) z = std::conj(z);
    for (const WitnessId& id : all_ids()) {
      const double v = evaluate(id, c, in).value;
      const double w = evaluate(id, e, conj).value;
      CHECK(std::abs(v - w) <= 1e-13 * (std::abs(v) + g * g * t * t * 1e3));
    }
  }
}

TEST_CASE("witnesses see the frequencies only through the detuning") {
  std::mt19937_64 rng(26);
  std::uniform_int_distribution<int> w(-40, 40);
  for (int i = 0; i < 50; ++i) {
    const ModelParams p{double(w(rng)), double(w(rng)), double(w(rng)), 0.01};
    const double shift = double(w(rng));
    const ModelParams q{p.omega_a + shift, p.omega_b + shift, p.omega_c + shift, p.g};
    const CoherentInput in{random_amp(rng, 0.5, 2.0), random_amp(rng, 0.5, 2.0), random_amp(rng, 0.5, 2.0)};
    for (const WitnessId& id : all_ids()) {
      CHECK(evaluate(id, coefficients(p, 1.7), in).value == evaluate(id, coefficients(q, 1.7), in).value);
    }
  }
}

TEST_CASE("Duan is never negative") {
  std::mt19937_64 rng(27);
  for (int i = 0; i < 1000; ++i) {
    const Sample s = random_sample(rng);
    const auto c = coefficients(s.p, s.t);
    for (const char* p : {"ab", "bc", "ac"}) {
      const WitnessValue d = duan_pair(p, c, s.in);
      CHECK(d.value >= 0.0);
      CHECK_FALSE(d.entangled);
    }
  }
}

TEST_CASE("vacuum signal and idler") {
  const auto c = coefficients(ModelParams::from_detuning(-1.0, 0.02), 1.3);
  const CoherentInput in{cplx(1.5, 0.5), 0.0, 0.0};
  const double A = std::norm(in.alpha);
  CHECK(hz1_pair("bc", c, in).value == doctest::Approx(std::norm(c.g(2)) * A * A).epsilon(1e-14));
  CHECK(hz2_pair("bc", c, in).value == doctest::Approx(-std::norm(c.g(2)) * A * A).epsilon(1e-14));
  for (const WitnessId& id : all_ids()) CHECK(std::isfinite(evaluate(id, c, in).value));
  // The printed (b,c) form with n = 1 and m >= 2 divides by |gamma|^2.
  CHECK_THROWS_AS(hz1_higher("bc", 2, 1, c, in, Formulation::Published), std::domain_error);
  const CoherentInput no_idler{1.0, 0.7, 0.0};
  CHECK_THROWS_AS(hz1_higher("bc", 3, 1, c, no_idler, Formulation::Published), std::domain_error);
  CHECK(std::isfinite(hz1_higher("bc", 2, 1, c, no_idler).value));
  CHECK(std::isfinite(hz1_higher("bc", 2, 2, c, no_idler, Formulation::Published).value));
}

TEST_CASE("invalid ids and orders") {
  const auto c = coefficients(ModelParams::from_detuning(-1.0, 0.01), 1.0);
  const CoherentInput in{1.0, 1.0, 1.0};
  CHECK_THROWS_AS(hz1_pair("aa", c, in), InvalidWitness);
  CHECK_THROWS_AS(hz2_pair("ba", c, in), InvalidWitness);
  CHECK_THROWS_AS(duan_pair("abc", c, in), InvalidWitness);
  CHECK_THROWS_AS(trimodal_hz("cab", c, in), InvalidWitness);
  CHECK_THROWS_AS(hz1_higher("ab", 0, 1, c, in), InvalidWitness);
  CHECK_THROWS_AS(hz2_higher("ab", 2, -1, c, in), InvalidWitness);
  CHECK_THROWS_AS(evaluate({Criterion::Duan, "ab", 2, 1}, c, in), InvalidWitness);
  CHECK_THROWS_AS(evaluate({Criterion::TriHZ1, "abc", 1, 2}, c, in), InvalidWitness);
  CHECK_THROWS_AS(evaluate({Criterion::TriSym, "bca", 1, 1}, c, in), InvalidWitness);
  CHECK_THROWS_AS(parse_criterion("HZ3"), InvalidWitness);
}

TEST_CASE("names and labels") {
  CHECK(parse_criterion("tri_hz1") == Criterion::TriHZ1);
  CHECK(parse_criterion("Duan") == Criterion::Duan);
  for (Criterion k : {Criterion::HZ1, Criterion::HZ2, Criterion::Duan, Criterion::TriHZ1, Criterion::TriSym})
    CHECK(parse_criterion(to_string(k)) == k);
  CHECK(WitnessId{Criterion::HZ1, "ac", 2, 1}.label() == "HZ1(ac)^{2,1}");
  CHECK(WitnessId{Criterion::Duan, "bc", 1, 1}.label() == "DUAN(bc)");
  CHECK(WitnessId{Criterion::HZ2, "ab", 1, 2}.higher_order());
  CHECK_FALSE(WitnessId{Criterion::HZ2, "ab", 1, 1}.higher_order());
  CHECK(lower_order_ids().size() == 13);
}

TEST_CASE("value metadata") {
  const auto c = coefficients(ModelParams::from_detuning(-1.0, 0.01), 2.5);
  const CoherentInput in = CoherentInput::with_pump_phase(2.0, 0.7, 1.0, 0.5);
  const WitnessValue w = hz1_pair("ab", c, in);
  CHECK(w.t == 2.5);
  CHECK(w.phi == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(w.entangled == (w.value < 0.0));
}
