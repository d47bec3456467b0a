#include "fwm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fwm/error.hpp"
#include "fwm/parallel.hpp"

namespace fwm {

namespace {

int mode_index(char m) { return m - 'a'; }

// Sets the (dagger, plain) exponents of one mode in a moment spec.
void put(MomentSpec& s, char mode, int dag, int plain) {
  switch (mode) {
    case 'a': s.p += dag; s.q += plain; break;
    case 'b': s.r += dag; s.s += plain; break;
    case 'c': s.u += dag; s.v += plain; break;
    default: throw InvalidWitness(std::string("unknown mode '") + mode + "'");
  }
}

double number(const FockStateVector& psi, char mode) {
  MomentSpec s;
  put(s, mode, 1, 1);
  return moment(psi, s).real();
}

double pair_oracle(const WitnessId& id, const FockStateVector& psi, const ModelParams& params, double t) {
  const char i = id.modes[0];
  const char j = id.modes[1];
  switch (id.criterion) {
    case Criterion::HZ1: {
      MomentSpec full, cross;
      put(full, i, id.m, id.m);
      put(full, j, id.n, id.n);
      put(cross, i, 0, id.m);
      put(cross, j, id.n, 0);
      return moment(psi, full).real() - std::norm(moment(psi, cross));
    }
    case Criterion::HZ2: {
      MomentSpec ni, nj, cross;
      put(ni, i, id.m, id.m);
      put(nj, j, id.n, id.n);
      put(cross, i, 0, id.m);
      put(cross, j, 0, id.n);
      return moment(psi, ni).real() * moment(psi, nj).real() - std::norm(moment(psi, cross));
    }
    case Criterion::Duan: {
      // X = i e^{i w_i t} + j e^{i w_j t};  D = 2 (<X^dag X> - |<X>|^2).
      const std::array<double, 3> w{params.omega_a, params.omega_b, params.omega_c};
      const cplx ri = std::polar(1.0, w[mode_index(i)] * t);
      const cplx rj = std::polar(1.0, w[mode_index(j)] * t);
      MomentSpec li, lj, hop;
      put(li, i, 0, 1);
      put(lj, j, 0, 1);
      put(hop, i, 1, 0);
      put(hop, j, 0, 1);
      const double xx = number(psi, i) + number(psi, j) + 2.0 * std::real(std::conj(ri) * rj * moment(psi, hop));
      const cplx x = ri * moment(psi, li) + rj * moment(psi, lj);
      return 2.0 * (xx - std::norm(x));
    }
    default: break;
  }
  throw std::logic_error("not a pair witness");
}

}  // namespace

WitnessValue oracle_witness(const WitnessId& id, const FockStateVector& psi, const ModelParams& params, double t,
                            double phi) {
  id.validate();
  double v = 0.0;
  if (id.criterion == Criterion::TriHZ1 || id.criterion == Criterion::TriSym) {
    const double nnn = moment(psi, MomentSpec{1, 1, 1, 1, 1, 1}).real();
    if (id.criterion == Criterion::TriSym) {
      v = number(psi, 'a') * number(psi, 'b') * number(psi, 'c') - std::norm(moment(psi, MomentSpec{0, 1, 0, 1, 0, 1}));
    } else {
      MomentSpec cross;
      put(cross, id.modes[0], 0, 1);
      put(cross, id.modes[1], 0, 1);
      put(cross, id.modes[2], 1, 0);
      v = nnn - std::norm(moment(psi, cross));
    }
  } else {
    v = pair_oracle(id, psi, params, t);
  }
  WitnessValue w;
  w.id = id;
  w.value = v;
  w.entangled = v < 0.0;
  w.t = t;
  w.phi = phi;
  return w;
}

OracleTrajectory run_oracle(const std::vector<WitnessId>& ids, const ModelParams& params, const CoherentInput& input,
                            const std::vector<double>& times, const OracleOptions& options) {
  // A witness of order (m, n) reads moments up to n_x^(2 max(m, n)); the
  // plain probability tail lets the sixth moments of (1,3) drift by 3e-8.
  CutoffPolicy policy = options.cutoffs;
  for (const WitnessId& id : ids) {
    id.validate();
    policy.moment_order = std::max(policy.moment_order, 2 * std::max(id.m, id.n));
  }
  OracleTrajectory out;
  out.basis = std::make_shared<const FockBasis>(options.fixed_cutoffs ? FockBasis(*options.fixed_cutoffs)
                                                                      : FockBasis::for_input(input, policy));
  const FockStateVector psi0 = coherent_state(out.basis, input, options.max_tail);
  const Hamiltonian h = build_hamiltonian(params, out.basis);
  out.truncated_couplings = h.truncated_couplings;
  out.times = times;
  out.values.assign(ids.size(), {});

  std::optional<SpectralPropagator> spectral;
  if (options.evolve.method == Integrator::Spectral) spectral.emplace(h);

  // Diagonal observables for the conservation checks.
  const FockBasis& basis = *out.basis;
  Eigen::VectorXd q1(static_cast<Eigen::Index>(basis.dimension())), q2(q1.size());
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    const Occupations n = basis.occupations(i);
    q1[static_cast<Eigen::Index>(i)] = n[0] + 2.0 * n[1];
    q2[static_cast<Eigen::Index>(i)] = n[1] - n[2];
  }

  const double phi = std::arg(input.alpha);
  for (double t : times) {
    const FockStateVector psi = spectral ? spectral->apply(psi0, t) : evolve(h, psi0, t, options.evolve);
    const Eigen::VectorXd prob = psi.amplitudes.cwiseAbs2();
    out.norm_error.push_back(std::abs(psi.norm() - 1.0));
    out.q1.push_back(prob.dot(q1));
    out.q2.push_back(prob.dot(q2));
    out.edge_population.push_back(edge_population(psi));
    for (std::size_t w = 0; w < ids.size(); ++w) out.values[w].push_back(oracle_witness(ids[w], psi, params, t, phi));
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::vector<ComparisonReport> compare(const std::vector<WitnessId>& ids, const std::vector<ModelParams>& ladder,
                                      const CoherentInput& input, const std::vector<double>& times,
                                      const CompareOptions& options) {
  if (ladder.size() < 3) throw ConfigError("ladder needs ≥ 3 rungs");
  const double delta = delta_omega1(ladder.front());
  for (const ModelParams& p : ladder) {
    if (delta_omega1(p) != delta) throw ConfigError("ladder rungs must share delta_omega1");
  }
  for (const WitnessId& id : ids) id.validate();

  const PerturbativeFn perturbative =
      options.perturbative ? options.perturbative
                           : PerturbativeFn([f = options.formulation](const WitnessId& id, const PerturbativeCoefficients& c,
                                                                      const CoherentInput& in) {
                               return evaluate(id, c, in, f).value;
                             });

  const std::size_t rungs = ladder.size();
  std::vector<double> gs;
  for (const ModelParams& p : ladder) gs.push_back(std::abs(p.g));

  std::vector<ComparisonReport> reports(ids.size());
  for (std::size_t w = 0; w < ids.size(); ++w) {
    reports[w].id = ids[w];
    reports[w].phi = std::arg(input.alpha);
    reports[w].ladder = gs;
    reports[w].points.resize(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
      ComparisonPoint& pt = reports[w].points[k];
      pt.t = times[k];
      pt.perturbative.assign(rungs, 0.0);
      pt.oracle.assign(rungs, 0.0);
      pt.abs_error.assign(rungs, 0.0);
      pt.rel_error.assign(rungs, 0.0);
    }
  }

  if (std::all_of(gs.begin(), gs.end(), [](double g) { return g == 0.0; })) {
    for (auto& r : reports) r.status = "degenerate, skipped";
    return reports;
  }

  std::vector<std::string> failures(rungs);
  parallel_for(rungs, options.workers, [&](std::size_t r) {
    try {
      const OracleTrajectory traj = run_oracle(ids, ladder[r], input, times, options.oracle);
      for (std::size_t k = 0; k < times.size(); ++k) {
        const PerturbativeCoefficients c = coefficients(ladder[r], times[k]);
        const double floor = (gs[r] * times[k]) * (gs[r] * times[k]);
        for (std::size_t w = 0; w < ids.size(); ++w) {
          ComparisonPoint& pt = reports[w].points[k];
          pt.perturbative[r] = perturbative(ids[w], c, input);
          pt.oracle[r] = traj.values[w][k].value;
          pt.abs_error[r] = std::abs(pt.oracle[r] - pt.perturbative[r]);
          const double scale = std::max(std::abs(pt.oracle[r]), floor);
          pt.rel_error[r] = scale > 0.0 ? pt.abs_error[r] / scale : 0.0;
        }
      }
    } catch (const std::exception& e) {
      failures[r] = e.what();
    }
  });

  for (std::size_t r = 0; r < rungs; ++r) {
    if (!failures[r].empty()) {
      for (auto& rep : reports) rep.status = "failed: rung " + std::to_string(r) + ": " + failures[r];
      return reports;
    }
  }

  // Smallest rung by |g|.
  const std::size_t smallest =
      static_cast<std::size_t>(std::min_element(gs.begin(), gs.end()) - gs.begin());
  const double eps = std::numeric_limits<double>::epsilon();

  for (ComparisonReport& rep : reports) {
    std::vector<double> worst(rungs, 0.0);
    std::vector<double> noise(rungs, 0.0);
    for (ComparisonPoint& pt : rep.points) {
      bool resolved = true;
      for (std::size_t r = 0; r < rungs; ++r) {
        const double floor_r = options.roundoff_factor * eps * std::max(1.0, std::abs(pt.oracle[r]));
        worst[r] = std::max(worst[r], pt.abs_error[r]);
        noise[r] = std::max(noise[r], floor_r);
        if (pt.abs_error[r] <= floor_r || gs[r] == 0.0) resolved = false;
      }
      if (resolved) pt.exponent = loglog_slope(gs, pt.abs_error);
      rep.agreement = std::max(rep.agreement, pt.rel_error[smallest]);
    }
    bool resolved = true;
    for (std::size_t r = 0; r < rungs; ++r) {
      if (worst[r] <= noise[r] || gs[r] == 0.0) resolved = false;
    }
    if (resolved) {
      rep.exponent = loglog_slope(gs, worst);
      rep.suspect = *rep.exponent < options.exponent_threshold;
      rep.status = rep.suspect ? "suspect" : "certified";
    } else {
      rep.status = "at round-off";
    }
  }
  return reports;
}

}  // namespace fwm
