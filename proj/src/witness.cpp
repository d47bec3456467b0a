#include "fwm/witness.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "fwm/error.hpp"

namespace fwm {

namespace {

enum class Pair { ab, bc, ac };

Pair parse_pair(std::string_view s) {
  if (s == "ab") return Pair::ab;
  if (s == "bc") return Pair::bc;
  if (s == "ac") return Pair::ac;
  throw InvalidWitness("mode pair must be one of ab, bc, ac (got '" + std::string(s) + "')");
}

void check_order(int m, int n) {
  if (m < 1 || n < 1) throw InvalidWitness("witness order (m, n) must satisfy m, n >= 1");
}

// Moduli and phase-carrying monomials of the input.
struct Amps {
  double A, B, C;  // |alpha|^2, |beta|^2, |gamma|^2
  cplx s1;         // alpha*^2 beta gamma
  cplx s2;         // alpha^4 beta*^2 gamma*^2
  explicit Amps(const CoherentInput& in)
      : A(std::norm(in.alpha)), B(std::norm(in.beta)), C(std::norm(in.gamma)) {
    const cplx ac = std::conj(in.alpha);
    s1 = ac * ac * in.beta * in.gamma;
    const cplx a2 = in.alpha * in.alpha;
    const cplx bc = std::conj(in.beta) * std::conj(in.gamma);
    s2 = a2 * a2 * bc * bc;
  }
  Amps swapped() const {  // beta <-> gamma; s1 and s2 are symmetric
    Amps out = *this;
    std::swap(out.B, out.C);
    return out;
  }
};

// Products of coefficients, written through the envelopes so that they
// depend on the frequencies only through delta_omega1.
struct Coeffs {
  double F;    // |f2|^2
  double G;    // |g2|^2
  cplx hh;     // h1 h2*
  cplx r;      // (h2 / h1)^2
  cplx fg;     // f1* f2 g1 g2*
  cplx fh;     // f1 f2* h1* h2
  explicit Coeffs(const PerturbativeCoefficients& c)
      : F(std::norm(c.a_env[1])),
        G(std::norm(c.b_env[1])),
        hh(std::conj(c.c_env[1])),
        r(c.c_env[1] * c.c_env[1]),
        fg(c.a_env[1] * std::conj(c.b_env[1])),
        fh(std::conj(c.a_env[1]) * c.c_env[1]) {}
};

double ipow(double x, int k) {
  if (k < 0) throw std::logic_error("negative exponent in witness monomial");
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= x;
  return out;
}

// coef * A^ea B^eb C^ec, skipping terms whose coefficient vanishes (these
// are the only ones that could carry a negative exponent).
double mono(double coef, const Amps& x, int ea, int eb, int ec) {
  if (coef == 0.0) return 0.0;
  return coef * ipow(x.A, ea) * ipow(x.B, eb) * ipow(x.C, ec);
}

WitnessValue make(Criterion crit, std::string_view modes, int m, int n, double value,
                  const PerturbativeCoefficients& c, const CoherentInput& in) {
  WitnessValue w;
  w.id = WitnessId{crit, std::string(modes), m, n};
  w.value = value;
  w.entangled = value < 0.0;
  w.t = c.t;
  w.phi = std::arg(in.alpha);
  return w;
}

// (a,b) forms; (a,c) is the same with beta <-> gamma.
double hz1_ab(const Coeffs& k, const Amps& x) {
  const double A = x.A, B = x.B, C = x.C;
  return k.F * (0.25 * A * A * A + B * B * C - 0.5 * A * A * B - A * B * C);
}

double hz2_ab(const Coeffs& k, const Amps& x) {
  const double A = x.A, B = x.B, C = x.C;
  return k.F * (0.25 * A * A * A + B * B * C + 0.5 * A * A * B + A * B * C);
}

double hz1_bc(const Coeffs& k, const Amps& x) {
  const double A = x.A, B = x.B, C = x.C;
  return k.G * (A * A * (1.0 + 3.0 * B + 3.0 * C) - 2.0 * B * C * (1.0 + 2.0 * A)) +
         2.0 * std::real(k.hh * x.s1);
}

double hz2_bc(const Coeffs& k, const Amps& x) {
  const double A = x.A, B = x.B, C = x.C;
  return k.G * (2.0 * B * C * (1.0 + 2.0 * A) - A * A * (1.0 + B + C)) - 2.0 * std::real(k.hh * x.s1);
}

double hz1_ab_mn(const Coeffs& k, const Amps& x, int mi, int ni, Formulation f) {
  const double m = mi, n = ni;
  double sum = mono(n * n / 4.0, x, mi + 2, ni - 1, 0) - mono(m * n / 2.0, x, mi + 1, ni, 0) -
               mono(m * n, x, mi, ni, 1) - mono(m * n * (m - 1.0) / 4.0, x, mi, ni, 0) +
               mono(m * m, x, mi - 1, ni + 1, 1);
  if (f == Formulation::Published) {
    // Cancel at m = 1 only.
    sum += mono(m * m * n, x, mi - 1, ni, 1) - mono(m * m * n * (m + 1.0) / 2.0, x, mi - 1, ni, 1) -
           mono(m * m * n * (m - 1.0) * (m - 1.0) / 4.0, x, mi - 2, ni, 1);
  }
  return k.F * sum;
}

double hz2_ab_mn(const Coeffs& k, const Amps& x, int mi, int ni) {
  const double m = mi, n = ni;
  return k.F * (mono(m * m, x, mi - 1, ni + 1, 1) + mono(m * n * (m - 1.0) / 4.0, x, mi, ni, 0) +
                mono(m * n / 2.0, x, mi + 1, ni, 0) + mono(n * n / 4.0, x, mi + 2, ni - 1, 0) +
                mono(m * n, x, mi, ni, 1));
}

// Cross terms of the (b,c) higher-order forms.  Each printed quotient times
// |beta|^2m |gamma|^2n is rewritten as a monomial:
//   alpha*^2/(beta* gamma*)      -> s1 B^{m-1} C^{n-1}
//   alpha^4 beta*/(beta gamma^2) -> s2 B^{m-1} C^{n-2}
//   alpha^4 gamma*/(beta^2 gamma)-> s2 B^{m-2} C^{n-1}
//   alpha^4/(beta^2 gamma^2)     -> s2 B^{m-2} C^{n-2}
// c_bc2 is the coefficient of the s2 B^{m-1} C^{n-2} term.
cplx bc_cross(const Coeffs& k, const Amps& x, int mi, int ni, double c_bc2) {
  const double m = mi, n = ni;
  cplx out = m * n * k.hh * x.s1 * (ipow(x.B, mi - 1) * ipow(x.C, ni - 1));
  cplx s2_part{0.0, 0.0};
  if (c_bc2 != 0.0) {
    if (ni >= 2) {
      s2_part += c_bc2 * ipow(x.B, mi - 1) * ipow(x.C, ni - 2);
    } else {
      // Only the printed HZ1 form reaches here (m >= 2, n = 1); the term
      // then carries a gamma*/gamma phase and is undefined at gamma = 0.
      if (x.C == 0.0) throw std::domain_error("printed (b,c) higher-order form is singular at gamma = 0");
      s2_part += c_bc2 * ipow(x.B, mi - 1) / x.C;
    }
  }
  s2_part += mono(m * n * (m - 1.0), x, 0, mi - 2, ni - 1);
  s2_part += mono(m * n * (m - 1.0) * (n - 1.0) / 2.0, x, 0, mi - 2, ni - 2);
  return out + k.r * x.s2 * s2_part;
}

double hz1_bc_mn(const Coeffs& k, const Amps& x, int mi, int ni, Formulation f) {
  const double m = mi, n = ni;
  const double poly = mono(2.0 * m * n * n + n * n, x, 2, mi, ni - 1) + mono(m * m * n * n, x, 2, mi - 1, ni - 1) +
                      mono(2.0 * m * m * n + m * m, x, 2, mi - 1, ni) -
                      2.0 * m * n * (1.0 + 2.0 * x.A) * ipow(x.B, mi) * ipow(x.C, ni);
  const double c_bc2 = f == Formulation::Published ? m * n * (m - 1.0) : m * n * (n - 1.0);
  return k.G * poly + 2.0 * std::real(bc_cross(k, x, mi, ni, c_bc2));
}

double hz2_bc_mn(const Coeffs& k, const Amps& x, int mi, int ni) {
  const double m = mi, n = ni;
  const double poly = mono(m * m - 2.0 * m * m * n, x, 2, mi - 1, ni) - mono(m * m * n * n, x, 2, mi - 1, ni - 1) +
                      mono((1.0 - 2.0 * m) * n * n, x, 2, mi, ni - 1) +
                      2.0 * m * n * (1.0 + 2.0 * x.A) * ipow(x.B, mi) * ipow(x.C, ni);
  return k.G * poly - 2.0 * std::real(bc_cross(k, x, mi, ni, m * n * (n - 1.0)));
}

}  // namespace

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::HZ1: return "HZ1";
    case Criterion::HZ2: return "HZ2";
    case Criterion::Duan: return "DUAN";
    case Criterion::TriHZ1: return "TRI_HZ1";
    case Criterion::TriSym: return "TRI_SYM";
  }
  throw std::logic_error("unknown criterion");
}

Criterion parse_criterion(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char ch) { return std::toupper(ch); });
  for (Criterion c : {Criterion::HZ1, Criterion::HZ2, Criterion::Duan, Criterion::TriHZ1, Criterion::TriSym}) {
    if (up == to_string(c)) return c;
  }
  throw InvalidWitness("unknown criterion '" + std::string(name) + "'");
}

void WitnessId::validate() const {
  check_order(m, n);
  switch (criterion) {
    case Criterion::HZ1:
    case Criterion::HZ2:
      parse_pair(modes);
      return;
    case Criterion::Duan:
      parse_pair(modes);
      break;
    case Criterion::TriHZ1:
      if (modes != "abc" && modes != "bca" && modes != "acb")
        throw InvalidWitness("trimodal cut must be one of abc, bca, acb (got '" + modes + "')");
      break;
    case Criterion::TriSym:
      if (modes != "abc") throw InvalidWitness("symmetric trimodal witness takes modes 'abc'");
      break;
  }
  if (m != 1 || n != 1) throw InvalidWitness(to_string(criterion) + " is only defined for m = n = 1");
}

std::string WitnessId::label() const {
  std::string s = to_string(criterion) + "(" + modes + ")";
  if (higher_order()) s += "^{" + std::to_string(m) + "," + std::to_string(n) + "}";
  return s;
}

WitnessValue hz1_pair(std::string_view pair, const PerturbativeCoefficients& c, const CoherentInput& in) {
  const Pair p = parse_pair(pair);
  const Coeffs k(c);
  const Amps x(in);
  const double v = p == Pair::ab ? hz1_ab(k, x) : p == Pair::ac ? hz1_ab(k, x.swapped()) : hz1_bc(k, x);
  return make(Criterion::HZ1, pair, 1, 1, v, c, in);
}

WitnessValue hz2_pair(std::string_view pair, const PerturbativeCoefficients& c, const CoherentInput& in) {
  const Pair p = parse_pair(pair);
  const Coeffs k(c);
  const Amps x(in);
  const double v = p == Pair::ab ? hz2_ab(k, x) : p == Pair::ac ? hz2_ab(k, x.swapped()) : hz2_bc(k, x);
  return make(Criterion::HZ2, pair, 1, 1, v, c, in);
}

WitnessValue duan_pair(std::string_view pair, const PerturbativeCoefficients& c, const CoherentInput& in) {
  const Pair p = parse_pair(pair);
  const Coeffs k(c);
  const Amps x(in);
  const double v = p == Pair::bc ? k.F * x.A * x.A : k.F * (0.5 * x.A * x.A + 2.0 * x.B * x.C);
  return make(Criterion::Duan, pair, 1, 1, v, c, in);
}

WitnessValue hz1_higher(std::string_view pair, int m, int n, const PerturbativeCoefficients& c,
                        const CoherentInput& in, Formulation f) {
  check_order(m, n);
  if (m == 1 && n == 1) return hz1_pair(pair, c, in);
  const Pair p = parse_pair(pair);
  const Coeffs k(c);
  const Amps x(in);
  const double v = p == Pair::ab   ? hz1_ab_mn(k, x, m, n, f)
                   : p == Pair::ac ? hz1_ab_mn(k, x.swapped(), m, n, f)
                                   : hz1_bc_mn(k, x, m, n, f);
  return make(Criterion::HZ1, pair, m, n, v, c, in);
}

WitnessValue hz2_higher(std::string_view pair, int m, int n, const PerturbativeCoefficients& c,
                        const CoherentInput& in, Formulation) {
  check_order(m, n);
  if (m == 1 && n == 1) return hz2_pair(pair, c, in);
  const Pair p = parse_pair(pair);
  const Coeffs k(c);
  const Amps x(in);
  const double v = p == Pair::ab   ? hz2_ab_mn(k, x, m, n)
                   : p == Pair::ac ? hz2_ab_mn(k, x.swapped(), m, n)
                                   : hz2_bc_mn(k, x, m, n);
  return make(Criterion::HZ2, pair, m, n, v, c, in);
}

WitnessValue trimodal_hz(std::string_view cut, const PerturbativeCoefficients& c, const CoherentInput& in) {
  const Coeffs k(c);
  const Amps x(in);
  const double A = x.A, B = x.B, C = x.C;
  double v;
  if (cut == "abc" || cut == "acb") {
    const double side = cut == "abc" ? B : C;
    v = k.F * (0.25 * A * A * A * (1.0 + 3.0 * B + 3.0 * C) - 0.5 * A * B * C * (5.0 * A + 2.0 * side + 3.0) +
               B * B * C * C) +
        2.0 * std::real(k.hh * A * x.s1 + k.fg * std::conj(x.s2));
  } else if (cut == "bca") {
    v = k.F * (0.25 * A * A * A * (B + C) - (1.0 + A + B + C) * A * B * C + B * B * C * C);
  } else {
    throw InvalidWitness("trimodal cut must be one of abc, bca, acb (got '" + std::string(cut) + "')");
  }
  return make(Criterion::TriHZ1, cut, 1, 1, v, c, in);
}

WitnessValue trimodal_symmetric(const PerturbativeCoefficients& c, const CoherentInput& in) {
  const Coeffs k(c);
  const Amps x(in);
  const double A = x.A, B = x.B, C = x.C;
  const double v = k.F * (-0.25 * A * A * A * (1.0 + B + C) + A * B * C * (3.0 * A + B + C + 1.5) + B * B * C * C) -
                   2.0 * std::real(k.hh * A * x.s1 + k.fh * x.s2);
  return make(Criterion::TriSym, "abc", 1, 1, v, c, in);
}

WitnessValue evaluate(const WitnessId& id, const PerturbativeCoefficients& c, const CoherentInput& in,
                      Formulation f) {
  id.validate();
  switch (id.criterion) {
    case Criterion::HZ1: return hz1_higher(id.modes, id.m, id.n, c, in, f);
    case Criterion::HZ2: return hz2_higher(id.modes, id.m, id.n, c, in, f);
    case Criterion::Duan: return duan_pair(id.modes, c, in);
    case Criterion::TriHZ1: return trimodal_hz(id.modes, c, in);
    case Criterion::TriSym: return trimodal_symmetric(c, in);
  }
  throw std::logic_error("unknown criterion");
}

std::vector<WitnessId> lower_order_ids() {
  std::vector<WitnessId> ids;
  for (Criterion crit : {Criterion::HZ1, Criterion::HZ2, Criterion::Duan}) {
    for (const char* p : {"ab", "bc", "ac"}) ids.push_back({crit, p, 1, 1});
  }
  for (const char* cut : {"abc", "bca", "acb"}) ids.push_back({Criterion::TriHZ1, cut, 1, 1});
  ids.push_back({Criterion::TriSym, "abc", 1, 1});
  return ids;
}

}  // namespace fwm
