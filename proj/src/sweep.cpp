#include "fwm/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "fwm/error.hpp"
#include "fwm/parallel.hpp"

namespace fwm {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string formulation_name(Formulation f) { return f == Formulation::Published ? "published" : "corrected"; }

Formulation parse_formulation(const std::string& s) {
  if (s == "corrected") return Formulation::Corrected;
  if (s == "published") return Formulation::Published;
  throw ConfigError("formulation: expected 'corrected' or 'published', got '" + s + "'");
}

std::string integrator_name(Integrator i) { return i == Integrator::Rk4 ? "rk4" : "spectral"; }

Integrator parse_integrator(const std::string& s) {
  if (s == "spectral") return Integrator::Spectral;
  if (s == "rk4") return Integrator::Rk4;
  throw ConfigError("oracle.integrator: expected 'spectral' or 'rk4', got '" + s + "'");
}

json complex_to_json(cplx z) {
  if (z.imag() == 0.0) return z.real();
  return json::array({z.real(), z.imag()});
}

template <class T>
T read(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

cplx read_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError(path + ": expected a number or [re, im]");
}

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

WitnessValue failed_value(const WitnessId& id) {
  WitnessValue w;
  w.id = id;
  w.value = std::numeric_limits<double>::quiet_NaN();
  return w;
}

void summarize(SweepResult& res, const WitnessId& id, double phi, const std::string& source,
               const std::vector<double>& gt, const std::vector<double>& v) {
  SummaryEntry e;
  e.id = id;
  e.phi = phi;
  e.source = source;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] < 0.0) ++e.negative_points;
  }
  if (!v.empty() && v[0] < 0.0) e.negative_at_start = true;
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k - 1] >= 0.0 && v[k] < 0.0) {
      e.onset = gt[k - 1] + (gt[k] - gt[k - 1]) * v[k - 1] / (v[k - 1] - v[k]);
      break;
    }
  }
  res.summary.push_back(e);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> GtGrid::values() const {
  std::vector<double> out(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = start + (stop - start) * k / (count - 1);
  if (count >= 2) out.back() = stop;
  return out;
}

void RunConfig::validate() const {
  params.validate();
  if (!std::isfinite(alpha_abs) || alpha_abs < 0.0) throw ConfigError("input.alpha_abs must be finite and >= 0");
  for (std::size_t i = 0; i < phis.size(); ++i) {
    if (!(phis[i] >= 0.0 && phis[i] < kTwoPi))
      throw ConfigError("input.phi[" + std::to_string(i) + "] must lie in [0, 2 pi)");
  }
  input(0.0).validate();
  if (grid.count < 2) throw ConfigError("grid.count must be >= 2");
  if (!std::isfinite(grid.start) || !std::isfinite(grid.stop) || grid.start < 0.0 || !(grid.start < grid.stop))
    throw ConfigError("grid: need 0 <= start < stop");
  for (std::size_t i = 0; i < witnesses.size(); ++i) {
    const WitnessGroup& wg = witnesses[i];
    const std::string path = "witnesses[" + std::to_string(i) + "]";
    if (wg.modes.empty()) throw ConfigError(path + ".modes must not be empty");
    if (wg.orders.empty()) throw ConfigError(path + ".orders must not be empty");
    for (const std::string& m : wg.modes) {
      for (const auto& [mm, nn] : wg.orders) {
        try {
          WitnessId{wg.criterion, m, mm, nn}.validate();
        } catch (const InvalidWitness& e) {
          throw ConfigError(path + ": " + e.what());
        }
      }
    }
  }
  if (oracle.cutoffs) {
    for (int c : *oracle.cutoffs) {
      if (c < 0) throw ConfigError("oracle.cutoffs must be >= 0");
    }
  }
  if (!(oracle.tolerance > 0.0)) throw ConfigError("oracle.tolerance must be > 0");
  for (double g : oracle.ladder) {
    if (!std::isfinite(g)) throw ConfigError("oracle.ladder entries must be finite");
  }
  if (format != "csv" && format != "json") throw ConfigError("output.format must be 'csv' or 'json'");
}

std::vector<WitnessId> RunConfig::witness_ids() const {
  std::vector<WitnessId> ids;
  for (const WitnessGroup& wg : witnesses)
    for (const std::string& m : wg.modes)
      for (const auto& [mm, nn] : wg.orders) ids.push_back({wg.criterion, m, mm, nn});
  return ids;
}

CoherentInput RunConfig::input(double phi) const { return CoherentInput::with_pump_phase(alpha_abs, phi, beta, gamma); }

json to_json(const RunConfig& c) {
  json witnesses = json::array();
  for (const WitnessGroup& wg : c.witnesses) {
    json orders = json::array();
    for (const auto& [m, n] : wg.orders) orders.push_back({m, n});
    witnesses.push_back({{"criterion", to_string(wg.criterion)}, {"modes", wg.modes}, {"orders", orders}});
  }
  json oracle = {{"enabled", c.oracle.enabled},
                 {"integrator", integrator_name(c.oracle.integrator)},
                 {"tolerance", c.oracle.tolerance},
                 {"ladder", c.oracle.ladder}};
  oracle["cutoffs"] = c.oracle.cutoffs ? json(*c.oracle.cutoffs) : json(nullptr);
  return {
      {"name", c.name},
      {"params", {{"omega_a", c.params.omega_a}, {"omega_b", c.params.omega_b}, {"omega_c", c.params.omega_c}, {"g", c.params.g}}},
      {"input", {{"alpha_abs", c.alpha_abs}, {"phi", c.phis}, {"beta", complex_to_json(c.beta)}, {"gamma", complex_to_json(c.gamma)}}},
      {"grid", {{"start", c.grid.start}, {"stop", c.grid.stop}, {"count", c.grid.count}}},
      {"witnesses", witnesses},
      {"formulation", formulation_name(c.formulation)},
      {"oracle", oracle},
      {"output", {{"path", c.out_path}, {"format", c.format}}},
  };
}

RunConfig config_from_json(const json& j) {
  require_object(j, "config");
  RunConfig c;
  if (const json* v = find(j, "name")) c.name = read<std::string>(*v, "name");

  const json* p = find(j, "params");
  if (!p) throw ConfigError("params: required");
  require_object(*p, "params");
  const json* g = find(*p, "g");
  if (!g) throw ConfigError("params.g: required");
  const double coupling = read<double>(*g, "params.g");
  if (const json* d = find(*p, "delta")) {
    if (find(*p, "omega_a") || find(*p, "omega_b") || find(*p, "omega_c"))
      throw ConfigError("params: give either delta or omega_a/omega_b/omega_c, not both");
    c.params = ModelParams::from_detuning(read<double>(*d, "params.delta"), coupling);
  } else {
    for (const char* k : {"omega_a", "omega_b", "omega_c"}) {
      if (!find(*p, k)) throw ConfigError(std::string("params.") + k + ": required (or use params.delta)");
    }
    c.params = ModelParams{read<double>(p->at("omega_a"), "params.omega_a"), read<double>(p->at("omega_b"), "params.omega_b"),
                           read<double>(p->at("omega_c"), "params.omega_c"), coupling};
  }

  if (const json* in = find(j, "input")) {
    require_object(*in, "input");
    if (const json* v = find(*in, "alpha_abs")) c.alpha_abs = read<double>(*v, "input.alpha_abs");
    if (const json* v = find(*in, "phi")) {
      c.phis = v->is_array() ? read<std::vector<double>>(*v, "input.phi") : std::vector<double>{read<double>(*v, "input.phi")};
    }
    if (const json* v = find(*in, "beta")) c.beta = read_complex(*v, "input.beta");
    if (const json* v = find(*in, "gamma")) c.gamma = read_complex(*v, "input.gamma");
  }
  if (const json* gr = find(j, "grid")) {
    require_object(*gr, "grid");
    if (const json* v = find(*gr, "start")) c.grid.start = read<double>(*v, "grid.start");
    if (const json* v = find(*gr, "stop")) c.grid.stop = read<double>(*v, "grid.stop");
    if (const json* v = find(*gr, "count")) c.grid.count = read<int>(*v, "grid.count");
  }
  if (const json* ws = find(j, "witnesses")) {
    if (!ws->is_array()) throw ConfigError("witnesses: expected an array");
    for (std::size_t i = 0; i < ws->size(); ++i) {
      const json& w = (*ws)[i];
      const std::string path = "witnesses[" + std::to_string(i) + "]";
      require_object(w, path);
      WitnessGroup wg;
      const json* crit = find(w, "criterion");
      if (!crit) throw ConfigError(path + ".criterion: required");
      try {
        wg.criterion = parse_criterion(read<std::string>(*crit, path + ".criterion"));
      } catch (const InvalidWitness& e) {
        throw ConfigError(path + ".criterion: " + e.what());
      }
      const json* modes = find(w, "modes");
      if (!modes) throw ConfigError(path + ".modes: required");
      wg.modes = modes->is_array() ? read<std::vector<std::string>>(*modes, path + ".modes")
                                   : std::vector<std::string>{read<std::string>(*modes, path + ".modes")};
      if (const json* o = find(w, "orders")) {
        wg.orders.clear();
        for (const auto& [mm, nn] : read<std::vector<std::array<int, 2>>>(*o, path + ".orders"))
          wg.orders.emplace_back(mm, nn);
      }
      c.witnesses.push_back(wg);
    }
  }
  if (const json* f = find(j, "formulation")) c.formulation = parse_formulation(read<std::string>(*f, "formulation"));
  if (const json* o = find(j, "oracle")) {
    require_object(*o, "oracle");
    if (const json* v = find(*o, "enabled")) c.oracle.enabled = read<bool>(*v, "oracle.enabled");
    if (const json* v = find(*o, "cutoffs")) c.oracle.cutoffs = read<Occupations>(*v, "oracle.cutoffs");
    if (const json* v = find(*o, "integrator")) c.oracle.integrator = parse_integrator(read<std::string>(*v, "oracle.integrator"));
    if (const json* v = find(*o, "tolerance")) c.oracle.tolerance = read<double>(*v, "oracle.tolerance");
    if (const json* v = find(*o, "ladder")) c.oracle.ladder = read<std::vector<double>>(*v, "oracle.ladder");
  }
  if (const json* out = find(j, "output")) {
    require_object(*out, "output");
    if (const json* v = find(*out, "path")) c.out_path = read<std::string>(*v, "output.path");
    if (const json* v = find(*out, "format")) c.format = read<std::string>(*v, "output.format");
  }
  c.validate();
  return c;
}

void apply_override(json& doc, const std::string& dotted_path, const std::string& value) {
  if (dotted_path.empty()) throw ConfigError("empty override path");
  json* node = &doc;
  std::size_t begin = 0;
  for (;;) {
    const std::size_t dot = dotted_path.find('.', begin);
    const std::string key = dotted_path.substr(begin, dot == std::string::npos ? std::string::npos : dot - begin);
    if (key.empty()) throw ConfigError("malformed override path '" + dotted_path + "'");
    if (!node->is_object()) {
      if (!node->is_null()) throw ConfigError("override '" + dotted_path + "': '" + key + "' is not inside an object");
      *node = json::object();
    }
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    begin = dot + 1;
  }
  json parsed = json::parse(value, nullptr, false);
  *node = parsed.is_discarded() ? json(value) : parsed;
}

std::vector<RunConfig> presets() {
  RunConfig base;
  base.params = ModelParams{242.38e13, 36.05e13, 448.98e13, 0.0};
  base.params.g = std::abs(delta_omega1(base.params)) * 1e-3;
  base.alpha_abs = 5.0;
  base.beta = 4.0;
  base.gamma = 2.0;
  base.phis = {0.0, std::numbers::pi / 2.0, std::numbers::pi};
  base.grid = GtGrid{0.1 / 400.0, 0.1, 400};

  const std::vector<std::string> pairs{"ab", "bc", "ac"};
  std::vector<RunConfig> out;

  RunConfig fig2 = base;
  fig2.name = "fig2";
  fig2.witnesses = {{Criterion::HZ1, pairs, {{1, 1}}}, {Criterion::HZ2, pairs, {{1, 1}}}, {Criterion::Duan, pairs, {{1, 1}}}};
  out.push_back(fig2);

  RunConfig fig3 = base;
  fig3.name = "fig3";
  fig3.witnesses = {{Criterion::HZ1, pairs, {{1, 1}, {2, 1}, {3, 1}}}};
  out.push_back(fig3);

  RunConfig fig4 = base;
  fig4.name = "fig4";
  fig4.witnesses = {{Criterion::HZ2, pairs, {{1, 1}, {1, 2}, {1, 3}}}};
  out.push_back(fig4);

  RunConfig fig5 = base;
  fig5.name = "fig5";
  fig5.witnesses = {{Criterion::TriHZ1, {"abc", "bca", "acb"}, {{1, 1}}}, {Criterion::TriSym, {"abc"}, {{1, 1}}}};
  out.push_back(fig5);
  return out;
}

RunConfig preset(const std::string& name) {
  for (RunConfig& c : presets()) {
    if (c.name == name) return c;
  }
  throw ConfigError("unknown preset '" + name + "' (available: fig2, fig3, fig4, fig5)");
}

SweepResult run_sweep(const RunConfig& config, unsigned workers) {
  config.validate();
  SweepResult res;
  const std::vector<WitnessId> ids = config.witness_ids();
  res.witnesses_evaluated = ids.size();
  if (ids.empty()) return res;
  if (config.params.g == 0.0) throw ConfigError("params.g must be non-zero for a gt sweep");

  const std::vector<double> gt = config.grid.values();
  std::vector<double> times;
  for (double x : gt) times.push_back(x / std::abs(config.params.g));
  const std::size_t nphi = config.phis.size();
  const std::size_t nt = times.size();

  // pert[(phi * nt + k) * nw + w]
  const std::size_t nw = ids.size();
  std::vector<WitnessValue> pert(nphi * nt * nw);
  parallel_for(nphi * nt, workers, [&](std::size_t task) {
    const std::size_t ip = task / nt, k = task % nt;
    const CoherentInput in = config.input(config.phis[ip]);
    const PerturbativeCoefficients c = coefficients(config.params, times[k]);
    for (std::size_t w = 0; w < nw; ++w) pert[task * nw + w] = evaluate(ids[w], c, in, config.formulation);
  });

  std::vector<std::vector<std::vector<WitnessValue>>> orc(nphi);  // [phi][w][k]
  std::vector<std::string> failure(nphi);
  if (config.oracle.enabled) {
    OracleOptions opts;
    opts.fixed_cutoffs = config.oracle.cutoffs;
    opts.evolve.method = config.oracle.integrator;
    opts.evolve.tolerance = config.oracle.tolerance;
    const ModelParams synthetic = ModelParams::from_detuning(delta_omega1(config.params), config.params.g);
    parallel_for(nphi, workers, [&](std::size_t ip) {
      try {
        orc[ip] = run_oracle(ids, synthetic, config.input(config.phis[ip]), times, opts).values;
      } catch (const std::exception& e) {
        failure[ip] = e.what();
        orc[ip].assign(nw, std::vector<WitnessValue>(nt));
        for (std::size_t w = 0; w < nw; ++w)
          for (auto& v : orc[ip][w]) v = failed_value(ids[w]);
      }
    });
    for (std::size_t ip = 0; ip < nphi; ++ip) {
      if (!failure[ip].empty()) res.failures.push_back("oracle at phi=" + format_double(config.phis[ip]) + ": " + failure[ip]);
    }
  }

  for (std::size_t w = 0; w < nw; ++w) {
    for (std::size_t ip = 0; ip < nphi; ++ip) {
      const double phi = config.phis[ip];
      std::vector<double> pv(nt), ov(nt);
      for (std::size_t k = 0; k < nt; ++k) {
        const WitnessValue& p = pert[(ip * nt + k) * nw + w];
        pv[k] = p.value;
        res.rows.push_back({gt[k], phi, ids[w], p.value, p.entangled, "perturbative"});
        if (config.oracle.enabled) {
          const WitnessValue& o = orc[ip][w][k];
          ov[k] = o.value;
          const bool failed = !failure[ip].empty();
          res.rows.push_back({gt[k], phi, ids[w], o.value, failed ? false : o.value < 0.0, failed ? "oracle-failed" : "oracle"});
        }
      }
      summarize(res, ids[w], phi, "perturbative", gt, pv);
      if (config.oracle.enabled && failure[ip].empty()) summarize(res, ids[w], phi, "oracle", gt, ov);
    }
  }
  return res;
}

CompareResult run_compare(const RunConfig& config, unsigned workers) {
  config.validate();
  if (!config.oracle.enabled) throw ConfigError("compare requires oracle");
  std::vector<double> ladder = config.oracle.ladder;
  if (ladder.empty()) {
    const double g = config.params.g;
    ladder = {g, g / 2.0, g / 4.0};
  }
  if (ladder.size() < 3) throw ConfigError("ladder needs ≥ 3 rungs");

  const double delta = delta_omega1(config.params);
  std::vector<ModelParams> rungs;
  for (double g : ladder) rungs.push_back(ModelParams::from_detuning(delta, g));
  const double g0 = std::abs(ladder.front());
  std::vector<double> times = config.grid.values();
  if (g0 > 0.0) {
    for (double& t : times) t /= g0;
  }

  CompareOptions opts;
  opts.oracle.fixed_cutoffs = config.oracle.cutoffs;
  opts.oracle.evolve.method = config.oracle.integrator;
  opts.oracle.evolve.tolerance = config.oracle.tolerance;
  opts.formulation = config.formulation;
  opts.workers = workers;

  CompareResult res;
  res.all_passed = true;
  for (double phi : config.phis) {
    for (ComparisonReport& r : compare(config.witness_ids(), rungs, config.input(phi), times, opts)) {
      if (r.suspect || r.status.rfind("failed", 0) == 0) res.all_passed = false;
      res.reports.push_back(std::move(r));
    }
  }
  return res;
}

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "gt,phi,criterion,modes,m,n,value,entangled,source\n";
  for (const SweepRow& r : rows) {
    os << format_double(r.gt) << ',' << format_double(r.phi) << ',' << to_string(r.id.criterion) << ',' << r.id.modes
       << ',' << r.id.m << ',' << r.id.n << ',' << format_double(r.value) << ',' << (r.entangled ? "true" : "false")
       << ',' << r.source << '\n';
  }
}

namespace {

json id_json(const WitnessId& id) {
  return {{"criterion", to_string(id.criterion)}, {"modes", id.modes}, {"m", id.m}, {"n", id.n}};
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string phi_label(double phi) {
  std::ostringstream os;
  os.precision(6);
  os << phi;
  return os.str();
}

}  // namespace

json sweep_to_json(const SweepResult& result) {
  json rows = json::array();
  for (const SweepRow& r : result.rows) {
    json row = id_json(r.id);
    row["gt"] = r.gt;
    row["phi"] = r.phi;
    row["value"] = finite_or_null(r.value);
    row["entangled"] = r.entangled;
    row["source"] = r.source;
    rows.push_back(row);
  }
  json summary = json::array();
  for (const SummaryEntry& e : result.summary) {
    json s = id_json(e.id);
    s["phi"] = e.phi;
    s["source"] = e.source;
    s["onset_gt"] = e.onset ? json(*e.onset) : json("none");
    s["negative_at_start"] = e.negative_at_start;
    s["negative_points"] = e.negative_points;
    summary.push_back(s);
  }
  return {{"rows", rows}, {"summary", summary}, {"witnesses_evaluated", result.witnesses_evaluated},
          {"failures", result.failures}};
}

std::string summary_text(const SweepResult& result) {
  std::ostringstream os;
  os << result.witnesses_evaluated << " witnesses evaluated\n";
  for (const SummaryEntry& e : result.summary) {
    os << e.id.label() << " phi=" << phi_label(e.phi) << " [" << e.source << "]: ";
    if (e.onset) {
      os << "onset gt*=" << format_double(*e.onset);
      if (e.negative_at_start) os << " (also negative at grid start)";
    } else if (e.negative_at_start) {
      os << "negative from grid start";
    } else {
      os << "none";
    }
    os << " (" << e.negative_points << " negative points)\n";
  }
  for (const std::string& f : result.failures) os << "FAILED " << f << '\n';
  return os.str();
}

json compare_to_json(const CompareResult& result) {
  json reports = json::array();
  for (const ComparisonReport& r : result.reports) {
    json points = json::array();
    for (const ComparisonPoint& p : r.points) {
      json pj = {{"t", p.t}, {"perturbative", p.perturbative}, {"oracle", p.oracle}, {"abs_error", p.abs_error},
                 {"rel_error", p.rel_error}};
      pj["exponent"] = p.exponent ? json(*p.exponent) : json(nullptr);
      points.push_back(pj);
    }
    json rj = id_json(r.id);
    rj["phi"] = r.phi;
    rj["ladder"] = r.ladder;
    rj["exponent"] = r.exponent ? json(*r.exponent) : json(nullptr);
    rj["agreement"] = r.agreement;
    rj["suspect"] = r.suspect;
    rj["status"] = r.status;
    rj["points"] = points;
    reports.push_back(rj);
  }
  return {{"all_passed", result.all_passed}, {"reports", reports}};
}

void write_compare_csv(std::ostream& os, const CompareResult& result) {
  os << "phi,criterion,modes,m,n,t,g,perturbative,oracle,abs_error,rel_error\n";
  for (const ComparisonReport& r : result.reports) {
    for (const ComparisonPoint& p : r.points) {
      for (std::size_t k = 0; k < r.ladder.size(); ++k) {
        os << format_double(r.phi) << ',' << to_string(r.id.criterion) << ',' << r.id.modes << ',' << r.id.m << ','
           << r.id.n << ',' << format_double(p.t) << ',' << format_double(r.ladder[k]) << ','
           << format_double(p.perturbative[k]) << ',' << format_double(p.oracle[k]) << ','
           << format_double(p.abs_error[k]) << ',' << format_double(p.rel_error[k]) << '\n';
      }
    }
  }
}

std::string compare_summary_text(const CompareResult& result) {
  std::ostringstream os;
  for (const ComparisonReport& r : result.reports) {
    const bool pass = !r.suspect && r.status.rfind("failed", 0) != 0;
    os << (pass ? "PASS " : "FAIL ") << r.id.label() << " phi=" << phi_label(r.phi) << ": " << r.status;
    if (r.exponent) os << ", exponent " << phi_label(*r.exponent);
    os << ", agreement " << phi_label(r.agreement) << '\n';
  }
  os << (result.all_passed ? "all witnesses passed\n" : "some witnesses failed\n");
  return os.str();
}

}  // namespace fwm
