#include "fwm/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fwm/error.hpp"

namespace fwm {

double poisson_tail(double mean, int cutoff, int order) {
  if (cutoff < 0 && order == 0) return 1.0;
  if (mean <= 0.0) return 0.0;
  const double log_mean = std::log(mean);
  double sum = 0.0;
  for (int n = std::max(cutoff + 1, order > 0 ? 1 : 0);; ++n) {
    const double p = std::exp(-mean + n * log_mean - std::lgamma(n + 1.0) + order * std::log(double(n)));
    sum += p;
    if (n > mean && (p == 0.0 || p < sum * 1e-17)) break;
  }
  return sum;
}

int poisson_cutoff(double mean, double tail, int order) {
  int n = 0;
  while (poisson_tail(mean, n, order) >= tail) ++n;
  return n;
}

FockBasis::FockBasis(Occupations cutoffs) : cutoffs_(cutoffs) {
  for (int c : cutoffs_) {
    if (c < 0) throw ConfigError("cutoffs must be non-negative");
  }
  dim_ = static_cast<std::size_t>(cutoffs_[0] + 1) * static_cast<std::size_t>(cutoffs_[1] + 1) *
         static_cast<std::size_t>(cutoffs_[2] + 1);
}

FockBasis FockBasis::for_input(const CoherentInput& input, const CutoffPolicy& policy) {
  const std::array<double, 3> means{std::norm(input.alpha), std::norm(input.beta),
                                    std::norm(input.gamma)};
  Occupations n{};
  for (int k = 0; k < 3; ++k) n[k] = poisson_cutoff(means[k], policy.tail, policy.moment_order) + policy.headroom[k];
  return FockBasis(n);
}

bool FockBasis::contains(const Occupations& n) const {
  for (int k = 0; k < 3; ++k) {
    if (n[k] < 0 || n[k] > cutoffs_[k]) return false;
  }
  return true;
}

std::size_t FockBasis::index(const Occupations& n) const {
  const auto nb = static_cast<std::size_t>(cutoffs_[1] + 1);
  const auto nc = static_cast<std::size_t>(cutoffs_[2] + 1);
  return (static_cast<std::size_t>(n[0]) * nb + static_cast<std::size_t>(n[1])) * nc +
         static_cast<std::size_t>(n[2]);
}

Occupations FockBasis::occupations(std::size_t index) const {
  const auto nb = static_cast<std::size_t>(cutoffs_[1] + 1);
  const auto nc = static_cast<std::size_t>(cutoffs_[2] + 1);
  Occupations n{};
  n[2] = static_cast<int>(index % nc);
  index /= nc;
  n[1] = static_cast<int>(index % nb);
  n[0] = static_cast<int>(index / nb);
  return n;
}

std::optional<std::pair<int, double>> apply_word(const LadderWord& word, int n) {
  double amp = 1.0;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    if (*it == '-') {
      if (n == 0) return std::nullopt;
      amp *= std::sqrt(static_cast<double>(n));
      --n;
    } else if (*it == '+') {
      ++n;
      amp *= std::sqrt(static_cast<double>(n));
    } else {
      throw std::invalid_argument("ladder word may only contain '+' and '-'");
    }
  }
  return std::make_pair(n, amp);
}

SparseOp materialize(const FockBasis& basis, const std::vector<OperatorTerm>& terms,
                     std::size_t* dropped) {
  std::vector<Eigen::Triplet<cplx>> triplets;
  std::size_t lost = 0;
  const std::size_t dim = basis.dimension();
  for (std::size_t col = 0; col < dim; ++col) {
    const Occupations n = basis.occupations(col);
    for (const OperatorTerm& term : terms) {
      Occupations out{};
      double amp = 1.0;
      bool alive = true;
      for (int k = 0; k < 3 && alive; ++k) {
        const auto r = apply_word(term.words[k], n[k]);
        if (!r) {
          alive = false;
        } else {
          out[k] = r->first;
          amp *= r->second;
        }
      }
      if (!alive) continue;
      if (!basis.contains(out)) {
        ++lost;
        continue;
      }
      triplets.emplace_back(static_cast<int>(basis.index(out)), static_cast<int>(col),
                            term.coefficient * amp);
    }
  }
  SparseOp m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(triplets.begin(), triplets.end());
  if (dropped) *dropped = lost;
  return m;
}

Hamiltonian build_hamiltonian(const ModelParams& params, std::shared_ptr<const FockBasis> basis) {
  params.validate();
  Hamiltonian h;
  h.params = params;
  h.basis = basis;
  std::vector<OperatorTerm> terms{
      {cplx{params.omega_a}, {"+-", "", ""}},
      {cplx{params.omega_b}, {"", "+-", ""}},
      {cplx{params.omega_c}, {"", "", "+-"}},
  };
  // Count projected couplings from the interaction alone.
  std::vector<OperatorTerm> interaction{
      {cplx{params.g}, {"--", "+", "+"}},
      {cplx{params.g}, {"++", "-", "-"}},
  };
  SparseOp free = materialize(*basis, terms);
  SparseOp coupling = materialize(*basis, interaction, &h.truncated_couplings);
  if (params.g == 0.0) h.truncated_couplings = 0;
  h.matrix = free + coupling;
  h.matrix.prune(cplx{0.0, 0.0});
  h.matrix.makeCompressed();
  return h;
}

namespace {

Eigen::VectorXcd coherent_amplitudes(cplx z, int cutoff) {
  Eigen::VectorXcd c(cutoff + 1);
  c[0] = std::exp(-0.5 * std::norm(z));
  for (int n = 1; n <= cutoff; ++n) c[n] = c[n - 1] * z / std::sqrt(static_cast<double>(n));
  const double nrm = c.norm();
  if (nrm > 0.0) c /= nrm;
  return c;
}

}  // namespace

FockStateVector coherent_state(std::shared_ptr<const FockBasis> basis, const CoherentInput& input,
                               double max_tail) {
  input.validate();
  const std::array<cplx, 3> z{input.alpha, input.beta, input.gamma};
  const Occupations& n = basis->cutoffs();
  FockStateVector psi;
  psi.basis = basis;
  std::array<Eigen::VectorXcd, 3> modes;
  for (int k = 0; k < 3; ++k) {
    psi.tail_mass[k] = poisson_tail(std::norm(z[k]), n[k]);
    if (psi.tail_mass[k] > max_tail) {
      std::ostringstream msg;
      msg << "cutoff too small: mode " << "abc"[k] << " cutoff " << n[k] << " leaves tail mass "
          << psi.tail_mass[k] << " > " << max_tail;
      throw CutoffError(msg.str());
    }
    modes[k] = coherent_amplitudes(z[k], n[k]);
  }
  psi.amplitudes.resize(static_cast<Eigen::Index>(basis->dimension()));
  Eigen::Index i = 0;
  for (int a = 0; a <= n[0]; ++a)
    for (int b = 0; b <= n[1]; ++b) {
      const cplx ab = modes[0][a] * modes[1][b];
      for (int c = 0; c <= n[2]; ++c) psi.amplitudes[i++] = ab * modes[2][c];
    }
  psi.amplitudes /= psi.amplitudes.norm();
  return psi;
}

Eigen::VectorXcd lower(const FockStateVector& psi, const Occupations& q) {
  const FockBasis& basis = *psi.basis;
  const std::size_t dim = basis.dimension();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  if (q == Occupations{0, 0, 0}) return psi.amplitudes;
  for (std::size_t i = 0; i < dim; ++i) {
    const cplx x = psi.amplitudes[static_cast<Eigen::Index>(i)];
    if (x == cplx{0.0, 0.0}) continue;
    Occupations n = basis.occupations(i);
    double amp = 1.0;
    bool alive = true;
    for (int k = 0; k < 3; ++k) {
      if (n[k] < q[k]) {
        alive = false;
        break;
      }
      for (int j = 0; j < q[k]; ++j) amp *= std::sqrt(static_cast<double>(n[k] - j));
      n[k] -= q[k];
    }
    if (alive) out[static_cast<Eigen::Index>(basis.index(n))] = amp * x;
  }
  return out;
}

cplx moment(const FockStateVector& psi, const MomentSpec& spec, int max_order) {
  for (int e : {spec.p, spec.q, spec.r, spec.s, spec.u, spec.v}) {
    if (e < 0) throw InvalidMomentSpec("moment exponents must be non-negative");
  }
  if (spec.order() > max_order) {
    throw InvalidMomentSpec("moment order " + std::to_string(spec.order()) +
                            " exceeds maximum " + std::to_string(max_order));
  }
  const Eigen::VectorXcd bra = lower(psi, {spec.p, spec.r, spec.u});
  const Eigen::VectorXcd ket = lower(psi, {spec.q, spec.s, spec.v});
  return bra.dot(ket);  // conjugates the first argument
}

double edge_population(const FockStateVector& psi) {
  const FockBasis& basis = *psi.basis;
  double mass = 0.0;
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    const Occupations n = basis.occupations(i);
    if (n[0] == basis.cutoffs()[0] || n[1] == basis.cutoffs()[1] || n[2] == basis.cutoffs()[2])
      mass += std::norm(psi.amplitudes[static_cast<Eigen::Index>(i)]);
  }
  return mass;
}

}  // namespace fwm
