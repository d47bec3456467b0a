#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fwm/model.hpp"

namespace fwm {

enum class Criterion {
  HZ1,     ///< <N_i N_j> - |<i j^dag>|^2, and its (m, n) generalization
  HZ2,     ///< <N_i><N_j> - |<i j>|^2, and its (m, n) generalization
  Duan,    ///< (Δu)^2 + (Δv)^2 - 2
  TriHZ1,  ///< <N_a N_b N_c> - |<i j k^dag>|^2 for the cut (i j | k)
  TriSym,  ///< <N_a><N_b><N_c> - |<abc>|^2
};

std::string to_string(Criterion c);
/// Accepts "HZ1", "HZ2", "DUAN", "TRI_HZ1", "TRI_SYM" (case-insensitive).
Criterion parse_criterion(std::string_view name);

/// Which closed forms to use for the higher-order HZ1 witnesses.
enum class Formulation {
  /// Oracle-certified forms (default).
  Corrected,
  /// Higher-order HZ1 forms exactly as printed, including the terms that
  /// fail oracle certification for m >= 2.
  Published,
};

struct WitnessId {
  Criterion criterion = Criterion::HZ1;
  /// "ab", "bc", "ac" for pair witnesses; "abc", "bca", "acb" for TriHZ1
  /// (the first two modes sit on one side of the cut); "abc" for TriSym.
  std::string modes = "ab";
  int m = 1;
  int n = 1;

  bool higher_order() const { return m + n >= 3; }
  /// Throws InvalidWitness.
  void validate() const;
  std::string label() const;

  bool operator==(const WitnessId&) const = default;
};

struct WitnessValue {
  WitnessId id;
  double value = 0.0;
  bool entangled = false;  ///< value < 0
  double t = 0.0;
  double phi = 0.0;  ///< arg(alpha)
};

WitnessValue hz1_pair(std::string_view pair, const PerturbativeCoefficients& c, const CoherentInput& in);
WitnessValue hz2_pair(std::string_view pair, const PerturbativeCoefficients& c, const CoherentInput& in);
WitnessValue duan_pair(std::string_view pair, const PerturbativeCoefficients& c, const CoherentInput& in);
WitnessValue hz1_higher(std::string_view pair, int m, int n, const PerturbativeCoefficients& c,
                        const CoherentInput& in, Formulation f = Formulation::Corrected);
WitnessValue hz2_higher(std::string_view pair, int m, int n, const PerturbativeCoefficients& c,
                        const CoherentInput& in, Formulation f = Formulation::Corrected);
WitnessValue trimodal_hz(std::string_view cut, const PerturbativeCoefficients& c, const CoherentInput& in);
WitnessValue trimodal_symmetric(const PerturbativeCoefficients& c, const CoherentInput& in);

/// Dispatch on id.  (m, n) = (1, 1) always routes to the pair forms.
WitnessValue evaluate(const WitnessId& id, const PerturbativeCoefficients& c, const CoherentInput& in,
                      Formulation f = Formulation::Corrected);

/// Every pair and trimodal witness at (m, n) = (1, 1), in a fixed order.
std::vector<WitnessId> lower_order_ids();

}  // namespace fwm
