#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fwm/model.hpp"

namespace fwm {

using Occupations = std::array<int, 3>;
using SparseOp = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// Per-mode cutoff rule: smallest N whose coherent tail is below `tail`,
/// plus headroom for the quanta the interaction moves around.
struct CutoffPolicy {
  double tail = 1e-12;
  Occupations headroom{4, 2, 2};
  /// Tail is weighted by n^moment_order, so high moments see the same bound.
  int moment_order = 0;
};

/// Sum of n^order p(n) over n > cutoff, p Poisson with the given mean.
double poisson_tail(double mean, int cutoff, int order = 0);
/// Smallest N with poisson_tail(mean, N, order) < tail.
int poisson_cutoff(double mean, double tail, int order = 0);

/// Product basis |n_a, n_b, n_c> with 0 <= n_x <= N_x, mode c fastest.
class FockBasis {
 public:
  explicit FockBasis(Occupations cutoffs);

  static FockBasis for_input(const CoherentInput& input, const CutoffPolicy& policy = {});

  const Occupations& cutoffs() const { return cutoffs_; }
  std::size_t dimension() const { return dim_; }

  bool contains(const Occupations& n) const;
  std::size_t index(const Occupations& n) const;
  Occupations occupations(std::size_t index) const;

  bool operator==(const FockBasis& other) const { return cutoffs_ == other.cutoffs_; }

 private:
  Occupations cutoffs_;
  std::size_t dim_;
};

/// Product of ladder operators on one mode, written left to right with
/// '+' for a creation and '-' for an annihilation operator; "" is identity.
/// Example: a^dag a^2 is "+--".
using LadderWord = std::string;

/// Exact action of a word on |n>: returns (n', amplitude) or nothing when the
/// amplitude vanishes.  Intermediate occupations are not truncated.
std::optional<std::pair<int, double>> apply_word(const LadderWord& word, int n);

/// coefficient * word_a (x) word_b (x) word_c
struct OperatorTerm {
  cplx coefficient{1.0, 0.0};
  std::array<LadderWord, 3> words;
};

/// Sum of terms as a sparse matrix on `basis`; matrix elements whose target
/// falls outside the basis are dropped.  `dropped` counts them if non-null.
SparseOp materialize(const FockBasis& basis, const std::vector<OperatorTerm>& terms,
                     std::size_t* dropped = nullptr);

struct Hamiltonian {
  ModelParams params;
  std::shared_ptr<const FockBasis> basis;
  SparseOp matrix;
  /// Interaction couplings that would leave the basis and were projected out.
  std::size_t truncated_couplings = 0;
};

Hamiltonian build_hamiltonian(const ModelParams& params, std::shared_ptr<const FockBasis> basis);

struct FockStateVector {
  std::shared_ptr<const FockBasis> basis;
  Eigen::VectorXcd amplitudes;
  /// Per-mode Poisson mass discarded when the state was built.
  std::array<double, 3> tail_mass{0.0, 0.0, 0.0};

  double norm() const { return amplitudes.norm(); }
};

/// Truncated, renormalized product of coherent states.  Throws CutoffError
/// when any mode's tail mass exceeds `max_tail`.
FockStateVector coherent_state(std::shared_ptr<const FockBasis> basis, const CoherentInput& input,
                               double max_tail = 1e-12);

/// <a^dag^p a^q b^dag^r b^s c^dag^u c^v>
struct MomentSpec {
  int p = 0, q = 0, r = 0, s = 0, u = 0, v = 0;
  int order() const { return p + q + r + s + u + v; }
};

inline constexpr int kDefaultMaxMomentOrder = 12;

/// Evaluated as <(a^p b^r c^u) psi, (a^q b^s c^v) psi> using lowering
/// operators only, so the result is exact on the truncated space.
cplx moment(const FockStateVector& psi, const MomentSpec& spec,
            int max_order = kDefaultMaxMomentOrder);

/// a^qa b^qb c^qc psi
Eigen::VectorXcd lower(const FockStateVector& psi, const Occupations& q);

/// Total probability on states with any occupation equal to its cutoff.
double edge_population(const FockStateVector& psi);

}  // namespace fwm
