#include "fwm/residuals.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>

#include "fwm/error.hpp"

namespace fwm {

namespace {

constexpr cplx I{0.0, 1.0};

// Operator monomials of the ansatz, per mode word (a, b, c).
//   a(t) = f1 a + f2 a^dag b c + f3 a b^dag b c^dag c + f4 a^dag a^2 c^dag c + f5 a^dag a^2 b b^dag
//   b(t) = g1 b + g2 a^2 c^dag + g3 a^2 a^dag2 b + g4 a^dag a b c c^dag + g5 a a^dag b c c^dag
//   c(t) = h1 c + h2 a^2 b^dag + h3 a^2 a^dag2 c + h4 a^dag a c b b^dag + h5 a a^dag c b b^dag
const std::array<std::array<LadderWord, 3>, 5> kModeA{{
    {"-", "", ""},
    {"+", "-", "-"},
    {"-", "+-", "+-"},
    {"+--", "", "+-"},
    {"+--", "-+", ""},
}};
const std::array<std::array<LadderWord, 3>, 5> kModeB{{
    {"", "-", ""},
    {"--", "", "+"},
    {"--++", "-", ""},
    {"+-", "-", "-+"},
    {"-+", "-", "-+"},
}};
const std::array<std::array<LadderWord, 3>, 5> kModeC{{
    {"", "", "-"},
    {"--", "+", ""},
    {"--++", "", "-"},
    {"+-", "-+", "-"},
    {"-+", "-+", "-"},
}};

SparseOp combine(const FockBasis& basis, const std::array<std::array<LadderWord, 3>, 5>& words,
                 cplx phase, const std::array<cplx, 5>& env) {
  std::vector<OperatorTerm> terms;
  for (std::size_t k = 0; k < 5; ++k) {
    const cplx coeff = phase * env[k];
    if (coeff != cplx{0.0, 0.0}) terms.push_back({coeff, words[k]});
  }
  return materialize(basis, terms);
}

void check_cutoffs(const Occupations& cutoffs) {
  for (int c : cutoffs) {
    if (c < 4) throw ConfigError("residual cutoffs must be >= 4 per mode");
  }
}

std::vector<Eigen::Index> low_block(const FockBasis& basis) {
  std::vector<Eigen::Index> idx;
  const Occupations& n = basis.cutoffs();
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    const Occupations o = basis.occupations(i);
    if (o[0] <= n[0] - 3 && o[1] <= n[1] - 3 && o[2] <= n[2] - 3)
      idx.push_back(static_cast<Eigen::Index>(i));
  }
  return idx;
}

Eigen::MatrixXcd restrict_to(const SparseOp& m, const std::vector<Eigen::Index>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  std::vector<Eigen::Index> pos(static_cast<std::size_t>(m.cols()), -1);
  for (Eigen::Index j = 0; j < k; ++j) pos[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])] = j;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (SparseOp::InnerIterator it(m, idx[static_cast<std::size_t>(r)]); it; ++it) {
      const Eigen::Index c = pos[static_cast<std::size_t>(it.col())];
      if (c >= 0) out(r, c) = it.value();
    }
  }
  return out;
}

double hermitian_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double operator_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

// Rotating-frame operators x(t) / x1; commutators and defect norms are
// unchanged by the free phases.
AnsatzOperators envelope_operators(const PerturbativeCoefficients& c, const FockBasis& basis) {
  const cplx one{1.0, 0.0};
  return {combine(basis, kModeA, one, c.a_env), combine(basis, kModeB, one, c.b_env),
          combine(basis, kModeC, one, c.c_env)};
}

}  // namespace

AnsatzOperators ansatz_operators(const PerturbativeCoefficients& c, const FockBasis& basis) {
  return {combine(basis, kModeA, c.free_a, c.a_env), combine(basis, kModeB, c.free_b, c.b_env),
          combine(basis, kModeC, c.free_c, c.c_env)};
}

double etcr_residual(const ModelParams& params, double t, const Occupations& cutoffs) {
  check_cutoffs(cutoffs);
  params.validate();
  const FockBasis basis(cutoffs);
  const AnsatzOperators ops = envelope_operators(coefficients(params, t), basis);
  const auto idx = low_block(basis);

  // [x, x^dag] - 1 = [x1, d^dag] + [d, x1^dag] + [d, d^dag] with d = x - x1;
  // the bare commutator is 1 identically, so it is never formed in floating point.
  double worst = 0.0;
  const std::array<std::pair<const SparseOp*, std::array<LadderWord, 3>>, 3> modes{
      {{&ops.a, kModeA[0]}, {&ops.b, kModeB[0]}, {&ops.c, kModeC[0]}}};
  for (const auto& [x, word] : modes) {
    const SparseOp bare = materialize(basis, {{cplx{1.0, 0.0}, word}});
    const SparseOp d = *x - bare;
    const SparseOp dd = d.adjoint();
    const SparseOp bd = bare.adjoint();
    const SparseOp comm = SparseOp(bare * dd) - SparseOp(dd * bare) + SparseOp(d * bd) -
                          SparseOp(bd * d) + SparseOp(d * dd) - SparseOp(dd * d);
    worst = std::max(worst, hermitian_norm(restrict_to(comm, idx)));
  }
  return worst;
}

double eom_residual(const ModelParams& params, double t, const Occupations& cutoffs) {
  check_cutoffs(cutoffs);
  params.validate();
  const FockBasis basis(cutoffs);
  const PerturbativeCoefficients c = coefficients(params, t);
  const EnvelopeRates r = envelope_rates(params, t);
  const AnsatzOperators ops = envelope_operators(c, basis);
  const auto idx = low_block(basis);
  const double g = params.g;
  // Free phases of the three terms relative to the mode's own free phase.
  const double x = delta_omega1(params) * t;
  const cplx up = std::polar(1.0, x);
  const cplx down = std::conj(up);

  // Nonlinear terms as exact ladder word plus (product - bare product), so the
  // O(1) piece cancels against the envelope rate without sqrt round-off.
  const cplx one{1.0, 0.0};
  const SparseOp a1 = materialize(basis, {{one, kModeA[0]}});
  const SparseOp b1 = materialize(basis, {{one, kModeB[0]}});
  const SparseOp c1 = materialize(basis, {{one, kModeC[0]}});
  auto nonlinear = [&](const SparseOp& x, const SparseOp& y, const SparseOp& z, const SparseOp& x0,
                       const SparseOp& y0, const SparseOp& z0, const std::array<LadderWord, 3>& word) {
    const SparseOp full = x * SparseOp(y * z);
    const SparseOp bare = x0 * SparseOp(y0 * z0);
    return SparseOp(materialize(basis, {{one, word}}) + SparseOp(full - bare));
  };
  const SparseOp ad = ops.a.adjoint(), bd = ops.b.adjoint(), cd = ops.c.adjoint();
  const SparseOp a1d = a1.adjoint(), b1d = b1.adjoint(), c1d = c1.adjoint();

  // Each defect divided by the mode's free phase; dx/dt + i omega_x x(t)
  // then only sees the envelope derivatives.
  const SparseOp ra = combine(basis, kModeA, one, r.a_env_dot) +
                      SparseOp((2.0 * I * g * up) * nonlinear(ad, ops.b, ops.c, a1d, b1, c1, kModeA[1]));
  const SparseOp rb = combine(basis, kModeB, one, r.b_env_dot) +
                      SparseOp((I * g * down) * nonlinear(ops.a, ops.a, cd, a1, a1, c1d, kModeB[1]));
  const SparseOp rc = combine(basis, kModeC, one, r.c_env_dot) +
                      SparseOp((I * g * down) * nonlinear(ops.a, ops.a, bd, a1, a1, b1d, kModeC[1]));

  double worst = 0.0;
  for (const SparseOp* m : {&ra, &rb, &rc}) worst = std::max(worst, operator_norm(restrict_to(*m, idx)));
  return worst;
}

double eom_relative_residual(const ModelParams& params, double t, const Occupations& cutoffs) {
  const double res = eom_residual(params, t, cutoffs);
  if (res == 0.0) return 0.0;
  const FockBasis basis(cutoffs);
  const PerturbativeCoefficients c = coefficients(params, t);
  const auto idx = low_block(basis);
  const cplx one{1.0, 0.0};
  auto second = [](std::array<cplx, 5> env) {
    env[0] = env[1] = cplx{0.0, 0.0};
    return env;
  };
  double scale = 0.0;
  for (const auto& [words, env] : {std::pair{&kModeA, c.a_env}, std::pair{&kModeB, c.b_env},
                                   std::pair{&kModeC, c.c_env}}) {
    scale = std::max(scale, operator_norm(restrict_to(combine(basis, *words, one, second(env)), idx)));
  }
  return t * res / scale;
}

}  // namespace fwm
