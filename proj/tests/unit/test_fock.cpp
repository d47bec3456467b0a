#include <doctest.h>

#include <cmath>
#include <Eigen/Eigenvalues>
#include <memory>
#include <set>

#include "fwm/error.hpp"
#include "fwm/fock.hpp"
#include "fwm/propagate.hpp"

using namespace fwm;

namespace {

std::shared_ptr<const FockBasis> make_basis(Occupations n) { return std::make_shared<const FockBasis>(n); }

// Poisson tail by forward summation of the terms above the cutoff.
double tail_sum(double mean, int cutoff) {
  double term = std::exp(-mean);
  for (int k = 1; k <= cutoff + 1; ++k) term *= mean / k;
  double sum = 0.0;
  for (int k = cutoff + 1; k < cutoff + 200; ++k) {
    sum += term;
    term *= mean / (k + 1);
  }
  return sum;
}

SparseOp diagonal(const FockBasis& b, auto&& f) {
  SparseOp d(static_cast<Eigen::Index>(b.dimension()), static_cast<Eigen::Index>(b.dimension()));
  for (std::size_t i = 0; i < b.dimension(); ++i) d.insert(Eigen::Index(i), Eigen::Index(i)) = f(b.occupations(i));
  return d;
}

}  // namespace

TEST_CASE("basis index map") {
  const FockBasis b({3, 2, 4});
  CHECK(b.dimension() == 4 * 3 * 5);
  for (std::size_t i = 0; i < b.dimension(); ++i) CHECK(b.index(b.occupations(i)) == i);
  CHECK(b.index({0, 0, 1}) == 1);  // mode c fastest
  CHECK(b.index({1, 0, 0}) == 15);
  CHECK(b.contains({3, 2, 4}));
  CHECK_FALSE(b.contains({4, 0, 0}));
  CHECK_FALSE(b.contains({0, -1, 0}));
}

TEST_CASE("ladder words") {
  CHECK(apply_word("", 5) == std::pair{5, 1.0});
  CHECK(apply_word("-", 3)->first == 2);
  CHECK(apply_word("-", 3)->second == doctest::Approx(std::sqrt(3.0)));
  CHECK(apply_word("+", 0) == std::pair{1, 1.0});
  CHECK_FALSE(apply_word("-", 0).has_value());
  CHECK_FALSE(apply_word("--", 1).has_value());
  // a^dag a^2 |2> = sqrt(2) |1>
  CHECK(apply_word("+--", 2)->first == 1);
  CHECK(apply_word("+--", 2)->second == doctest::Approx(std::sqrt(2.0)));
  // a a^dag |n> = (n + 1) |n>
  CHECK(apply_word("-+", 4)->second == doctest::Approx(5.0));
}

TEST_CASE("hamiltonian structure") {
  const ModelParams p{0.7, -0.3, 1.1, 0.05};
  const auto basis = make_basis({6, 4, 4});
  const Hamiltonian h = build_hamiltonian(p, basis);
  CHECK(SparseOp(h.matrix - SparseOp(h.matrix.adjoint())).norm() == 0.0);
  CHECK(h.truncated_couplings > 0);

  for (int na = 2; na <= 6; ++na) {
    for (int nb = 0; nb < 4; ++nb) {
      for (int nc = 0; nc < 4; ++nc) {
        const auto from = Eigen::Index(basis->index({na, nb, nc}));
        const auto to = Eigen::Index(basis->index({na - 2, nb + 1, nc + 1}));
        CHECK(std::abs(h.matrix.coeff(to, from) - 0.05 * std::sqrt(double(na * (na - 1) * (nb + 1) * (nc + 1)))) <
              1e-15);
      }
    }
  }
  const auto q1 = diagonal(*basis, [](Occupations n) { return cplx(n[0] + 2 * n[1]); });
  const auto q2 = diagonal(*basis, [](Occupations n) { return cplx(n[1] - n[2]); });
  CHECK(SparseOp(SparseOp(h.matrix * q1) - SparseOp(q1 * h.matrix)).norm() == 0.0);
  CHECK(SparseOp(SparseOp(h.matrix * q2) - SparseOp(q2 * h.matrix)).norm() == 0.0);
}

TEST_CASE("free hamiltonian is diagonal") {
  const ModelParams p{0.7, -0.3, 1.1, 0.0};
  const auto basis = make_basis({4, 3, 3});
  const Hamiltonian h = build_hamiltonian(p, basis);
  for (int k = 0; k < h.matrix.outerSize(); ++k) {
    for (SparseOp::InnerIterator it(h.matrix, k); it; ++it) {
      CHECK(it.row() == it.col());
      const Occupations n = basis->occupations(std::size_t(it.row()));
      CHECK(std::abs(it.value() - (0.7 * n[0] - 0.3 * n[1] + 1.1 * n[2])) < 1e-15);
    }
  }
  CHECK(h.truncated_couplings == 0);
}

TEST_CASE("poisson tail") {
  for (double mean : {0.36, 0.81, 1.0, 1.44, 4.0}) {
    for (int n : {3, 8, 12, 14, 20}) {
      const double want = tail_sum(mean, n);
      CHECK(poisson_tail(mean, n) == doctest::Approx(want).epsilon(1e-9));
    }
  }
  // |alpha|^2 = 1: the tail above 12 is 6.4e-11, above 14 it is 2.9e-13.
  CHECK(poisson_tail(1.0, 12) == doctest::Approx(6.3962e-11).epsilon(1e-4));
  CHECK(poisson_tail(1.0, 14) < 1e-12);
  CHECK(poisson_tail(1.0, 13) > 1e-12);
  CHECK(poisson_cutoff(1.0, 1e-12) == 14);
  CHECK(poisson_cutoff(0.0, 1e-12) == 0);

  // Weighted tail against a forward sum of n^k p(n).
  for (int k : {2, 6}) {
    double want = 0.0;
    for (int n = 13; n < 200; ++n) want += std::pow(n, k) * std::exp(-1.44 + n * std::log(1.44) - std::lgamma(n + 1.0));
    CHECK(poisson_tail(1.44, 12, k) == doctest::Approx(want).epsilon(1e-9));
  }
  CHECK(poisson_tail(1.44, -1, 1) == doctest::Approx(1.44).epsilon(1e-12));
  CHECK(poisson_cutoff(1.0, 1e-12, 6) > poisson_cutoff(1.0, 1e-12, 2));
  CHECK(poisson_cutoff(1.0, 1e-12, 2) > poisson_cutoff(1.0, 1e-12));
}

TEST_CASE("coherent states") {
  const auto basis = make_basis({14, 10, 8});
  const auto vac = coherent_state(basis, {0.0, 0.0, 0.0});
  CHECK(vac.amplitudes(0) == cplx(1.0, 0.0));
  CHECK(vac.amplitudes.tail(Eigen::Index(basis->dimension() - 1)).norm() == 0.0);

  const CoherentInput in{cplx(0.6, 0.8), 0.5, cplx(0.0, 0.3)};
  const auto psi = coherent_state(basis, in);
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(psi.tail_mass[0] == doctest::Approx(tail_sum(1.0, 14)).epsilon(1e-6));
  // |alpha|^2 = 1 does not fit below 1e-12 at cutoff 12.
  CHECK_THROWS_AS(coherent_state(make_basis({12, 10, 8}), in), CutoffError);
  CHECK_NOTHROW(coherent_state(make_basis({12, 10, 8}), in, 1e-10));
  const auto fit = FockBasis::for_input(in);
  CHECK(fit.cutoffs()[0] == poisson_cutoff(1.0, 1e-12) + 4);
  CHECK(fit.cutoffs()[1] == poisson_cutoff(0.25, 1e-12) + 2);
  CutoffPolicy sixth;
  sixth.moment_order = 6;
  CHECK(FockBasis::for_input(in, sixth).cutoffs()[0] == poisson_cutoff(1.0, 1e-12, 6) + 4);
}

TEST_CASE("moments") {
  const auto basis = make_basis({20, 14, 14});
  const auto vac = coherent_state(basis, {0.0, 0.0, 0.0});
  CHECK(moment(vac, {0, 1, 0, 0, 0, 0}) == cplx(0.0, 0.0));
  CHECK(moment(vac, {2, 0, 0, 1, 0, 3}) == cplx(0.0, 0.0));
  CHECK(moment(vac, {}) == cplx(1.0, 0.0));

  const CoherentInput in{cplx(1.0, 0.7), 0.9, cplx(0.2, -0.5)};
  const auto psi = coherent_state(basis, in);
  const double A = std::norm(in.alpha);
  CHECK(std::abs(moment(psi, {1, 1, 0, 0, 0, 0}) - A) < 1e-10);
  CHECK(std::abs(moment(psi, {2, 2, 0, 0, 0, 0}) - A * A) < 1e-10);
  CHECK(std::abs(moment(psi, {0, 1, 0, 0, 0, 0}) - in.alpha) < 1e-10);
  const cplx want = std::conj(in.alpha) * in.alpha * in.alpha * std::conj(in.beta) * in.gamma;
  CHECK(std::abs(moment(psi, {1, 2, 1, 0, 0, 1}) - want) < 1e-10);
  CHECK_THROWS_AS(moment(psi, {4, 4, 2, 2, 1, 0}), InvalidMomentSpec);
  CHECK_NOTHROW(moment(psi, {4, 4, 2, 2, 1, 0}, 13));
  CHECK_THROWS_AS(moment(psi, {-1, 0, 0, 0, 0, 0}), InvalidMomentSpec);
}

TEST_CASE("evolution basics") {
  const ModelParams p{0.4, 0.1, -0.2, 0.03};
  const auto basis = make_basis({12, 7, 7});
  const Hamiltonian h = build_hamiltonian(p, basis);
  const auto psi0 = coherent_state(basis, {cplx(1.0, 0.2), 0.7, 0.5}, 1e-6);

  const auto same = evolve(h, psi0, 0.0);
  CHECK((same.amplitudes - psi0.amplitudes).norm() == 0.0);

  for (double t : {0.5, 3.0, 20.0}) {
    const auto s = evolve(h, psi0, t);
    CHECK(std::abs(s.norm() - 1.0) < 1e-12);
    EvolveOptions rk;
    rk.method = Integrator::Rk4;
    EvolveDiagnostics diag;
    const auto r = evolve(h, psi0, t, rk, &diag);
    CHECK((s.amplitudes - r.amplitudes).norm() < 1e-9);
    CHECK(std::abs(r.norm() - 1.0) < 1e-9);
    CHECK(diag.steps > 0);
    CHECK(diag.error_estimate <= rk.tolerance);
  }
}

TEST_CASE("free evolution acquires exact phases") {
  const ModelParams p{0.4, 0.1, -0.2, 0.0};
  const auto basis = make_basis({10, 6, 6});
  const Hamiltonian h = build_hamiltonian(p, basis);
  const auto psi0 = coherent_state(basis, {0.8, 0.6, 0.4}, 1e-6);
  const double t = 7.3;
  const auto s = evolve(h, psi0, t);
  for (std::size_t i = 0; i < basis->dimension(); ++i) {
    const Occupations n = basis->occupations(i);
    const double e = 0.4 * n[0] + 0.1 * n[1] - 0.2 * n[2];
    const auto k = Eigen::Index(i);
    CHECK(std::abs(s.amplitudes(k) - std::polar(1.0, -e * t) * psi0.amplitudes(k)) < 1e-14);
  }
}

TEST_CASE("spectral blocks are the conserved sectors") {
  const auto basis = make_basis({6, 3, 3});
  const SpectralPropagator prop(build_hamiltonian(ModelParams::from_detuning(-1.0, 0.1), basis));
  std::set<std::pair<int, int>> sectors;
  for (std::size_t i = 0; i < basis->dimension(); ++i) {
    const Occupations n = basis->occupations(i);
    sectors.insert({n[0] + 2 * n[1], n[1] - n[2]});
  }
  CHECK(prop.block_count() == sectors.size());
  CHECK(prop.largest_block() <= 4);
}

TEST_CASE("rk4 step refinement and budget") {
  const ModelParams p = ModelParams::from_detuning(-1.0, 0.05);
  const auto basis = make_basis({10, 6, 6});
  const Hamiltonian h = build_hamiltonian(p, basis);
  const auto psi0 = coherent_state(basis, {1.0, 0.6, 0.5}, 1e-6);
  EvolveOptions coarse;
  coarse.method = Integrator::Rk4;
  EvolveOptions fine = coarse;
  fine.step_factor = 0.5 * coarse.step_factor;
  const auto a = evolve(h, psi0, 15.0, coarse);
  const auto b = evolve(h, psi0, 15.0, fine);
  CHECK((a.amplitudes - b.amplitudes).norm() < 1e-10);

  EvolveOptions tight = coarse;
  tight.max_steps = 8;
  CHECK_THROWS_AS(evolve(h, psi0, 15.0, tight), ConvergenceError);
}

TEST_CASE("gershgorin bound") {
  const auto basis = make_basis({8, 5, 5});
  const Hamiltonian h = build_hamiltonian(ModelParams{0.5, -0.2, 0.3, 0.2}, basis);
  const Eigen::MatrixXcd dense(h.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense, Eigen::EigenvaluesOnly);
  CHECK(spectral_radius_bound(h.matrix) >= es.eigenvalues().cwiseAbs().maxCoeff());
}

TEST_CASE("edge population") {
  const auto basis = make_basis({3, 3, 3});
  FockStateVector psi{basis, Eigen::VectorXcd::Zero(Eigen::Index(basis->dimension())), {}};
  psi.amplitudes(Eigen::Index(basis->index({1, 1, 1}))) = std::sqrt(0.75);
  psi.amplitudes(Eigen::Index(basis->index({3, 0, 0}))) = std::sqrt(0.25);
  CHECK(edge_population(psi) == doctest::Approx(0.25));
}
