// fwm: sweeps, oracle certification and diagnostics for the three-mode
// four-wave-mixing witnesses.

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "fwm/error.hpp"
#include "fwm/residuals.hpp"
#include "fwm/sweep.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

const char* kUnitsNote =
    "Frequencies are angular (s^-1) even where quoted in Hz; only delta*t and g*t "
    "enter any witness.  Oracle runs always use the synthetic frame (delta/2, 0, 0), which "
    "leaves every witness unchanged.";

struct Common {
  std::string config_path;
  std::string preset_name;
  std::string out;
  std::string format;
  bool oracle = false;
  int workers = 0;
  std::uint64_t seed = 20240601;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "JSON run configuration");
  sub->add_option("--preset", c.preset_name, "start from a named preset (fig2..fig5)");
  sub->add_option("--out", c.out, "output path (default: stdout)");
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("--oracle", c.oracle, "also run the truncated Fock-space oracle");
  sub->add_option("--workers", c.workers, "worker threads (fallback: FWM_WORKERS)")->check(CLI::NonNegativeNumber);
  sub->add_option("--seed", c.seed, "seed for randomized checks");
  sub->allow_extras();
  sub->footer("Any config field can be overridden by its dotted path, e.g. --input.alpha_abs 5 "
              "--input.phi 1.5707963.\n" +
              std::string(kUnitsNote));
}

unsigned resolve_workers(int flag) {
  if (flag > 0) return static_cast<unsigned>(flag);
  if (const char* env = std::getenv("FWM_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    throw fwm::ConfigError("FWM_WORKERS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Pairs of "--a.b value" or "--a.b=value" left over by the parser.
std::vector<std::pair<std::string, std::string>> overrides(const std::vector<std::string>& extras) {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& tok = extras[i];
    if (tok.rfind("--", 0) != 0 || tok.find('.') == std::string::npos)
      throw fwm::ConfigError("unknown argument '" + tok + "'");
    const std::string body = tok.substr(2);
    const auto eq = body.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(body.substr(0, eq), body.substr(eq + 1));
    } else {
      if (i + 1 >= extras.size()) throw fwm::ConfigError("override '" + tok + "' needs a value");
      out.emplace_back(body, extras[++i]);
    }
  }
  return out;
}

nlohmann::json load_document(const Common& c, bool required) {
  nlohmann::json doc;
  if (!c.config_path.empty() && !c.preset_name.empty())
    throw fwm::ConfigError("give either --config or --preset, not both");
  if (!c.preset_name.empty()) {
    doc = fwm::to_json(fwm::preset(c.preset_name));
  } else if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    if (!in) throw fwm::ConfigError("cannot read config file '" + c.config_path + "'");
    doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw fwm::ConfigError("config file '" + c.config_path + "' is not valid JSON");
  } else if (required) {
    throw fwm::ConfigError("need --config <path> or --preset <name>");
  }
  return doc;
}

fwm::RunConfig resolve_config(const Common& c, const std::vector<std::string>& extras) {
  nlohmann::json doc = load_document(c, true);
  for (const auto& [path, value] : overrides(extras)) fwm::apply_override(doc, path, value);
  if (c.oracle) doc["oracle"]["enabled"] = true;
  if (!c.format.empty()) doc["output"]["format"] = c.format;
  if (!c.out.empty()) doc["output"]["path"] = c.out;
  return fwm::config_from_json(doc);
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fwm::ConfigError("cannot write '" + path + "'");
  out << text;
}

int cmd_sweep(const Common& c, const std::vector<std::string>& extras) {
  const fwm::RunConfig cfg = resolve_config(c, extras);
  const fwm::SweepResult res = fwm::run_sweep(cfg, resolve_workers(c.workers));
  std::ostringstream body;
  if (cfg.format == "json") {
    body << fwm::sweep_to_json(res).dump(2) << '\n';
  } else {
    fwm::write_csv(body, res.rows);
  }
  emit(cfg.out_path, body.str());
  std::cerr << fwm::summary_text(res);
  return res.failures.empty() ? 0 : kExitNumerical;
}

int cmd_compare(const Common& c, const std::vector<std::string>& extras) {
  const fwm::RunConfig cfg = resolve_config(c, extras);
  const fwm::CompareResult res = fwm::run_compare(cfg, resolve_workers(c.workers));
  std::ostringstream body;
  if (cfg.format == "csv") {
    fwm::write_compare_csv(body, res);
  } else {
    body << fwm::compare_to_json(res).dump(2) << '\n';
  }
  emit(cfg.out_path, body.str());
  std::cerr << fwm::compare_summary_text(res);
  for (const auto& r : res.reports) {
    if (r.status.rfind("failed", 0) == 0) return kExitNumerical;
  }
  return res.all_passed ? 0 : kExitNumerical;
}

int cmd_presets(const Common& c) {
  if (!c.preset_name.empty()) {
    emit(c.out, fwm::to_json(fwm::preset(c.preset_name)).dump(2) + "\n");
    return 0;
  }
  std::ostringstream os;
  for (const fwm::RunConfig& p : fwm::presets()) {
    os << p.name << ":";
    for (const fwm::WitnessId& id : p.witness_ids()) os << ' ' << id.label();
    os << '\n';
  }
  emit(c.out, os.str());
  return 0;
}

// Residual scaling plus a randomized coefficient-identity sweep.
int cmd_check(const Common& c, const std::vector<std::string>& extras, double gt, std::vector<int> cutoffs) {
  double delta = -1.0, ratio = -100.0;
  nlohmann::json doc = load_document(c, false);
  if (!doc.is_null()) {
    for (const auto& [path, value] : overrides(extras)) fwm::apply_override(doc, path, value);
    const fwm::RunConfig cfg = fwm::config_from_json(doc);
    delta = fwm::delta_omega1(cfg.params);
    if (cfg.params.g == 0.0 || delta == 0.0) throw fwm::ConfigError("check needs non-zero params.g and detuning");
    ratio = delta / cfg.params.g;
  } else if (!extras.empty()) {
    throw fwm::ConfigError("overrides need --config or --preset");
  }
  if (cutoffs.size() != 3) throw fwm::ConfigError("--cutoffs takes three integers");
  const fwm::Occupations n{cutoffs[0], cutoffs[1], cutoffs[2]};

  const double g0 = std::abs(delta / ratio);
  const double t = gt / g0;
  std::vector<double> gs{g0, g0 / 2.0, g0 / 4.0}, etcr, eom;
  for (double g : gs) {
    const fwm::ModelParams p = fwm::ModelParams::from_detuning(delta, g);
    etcr.push_back(fwm::etcr_residual(p, t, n));
    eom.push_back(fwm::eom_residual(p, t, n));
  }
  const double s_etcr = fwm::loglog_slope(gs, etcr);
  const double s_eom = fwm::loglog_slope(gs, eom);
  bool ok = s_etcr >= 2.5 && s_eom >= 2.5;
  std::cout << "residuals at delta/g0=" << ratio << ", g0*t=" << gt << ", cutoffs " << n[0] << '/' << n[1] << '/'
            << n[2] << '\n';
  for (std::size_t i = 0; i < gs.size(); ++i)
    std::cout << "  g=" << fwm::format_double(gs[i]) << "  etcr=" << fwm::format_double(etcr[i])
              << "  eom=" << fwm::format_double(eom[i]) << '\n';
  std::cout << "  slope etcr=" << s_etcr << "  eom=" << s_eom << (ok ? "  ok" : "  BELOW 2.5") << '\n';

  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> w(-50.0, 50.0), coupling(0.0, 1.0), time(0.0, 10.0);
  std::size_t identity_failures = 0;
  double worst_phase = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const fwm::ModelParams p{w(rng), w(rng), w(rng), coupling(rng)};
    const fwm::PerturbativeCoefficients k = fwm::coefficients(p, time(rng));
    if (k.f(4) != -k.f(3) / 2.0 || k.f(5) != k.f(4) || k.g(4) != -2.0 * k.g(3) || k.g(5) != k.g(4) ||
        k.h(4) != -2.0 * k.h(3) || k.h(5) != k.h(4))
      ++identity_failures;
    for (const fwm::cplx z : {k.f(1), k.g(1), k.h(1)}) worst_phase = std::max(worst_phase, std::abs(std::abs(z) - 1.0));
  }
  const bool ids_ok = identity_failures == 0 && worst_phase <= 1e-14;
  std::cout << "coefficient identities (seed " << c.seed << ", 1000 draws): " << identity_failures
            << " failures, max ||f1|-1| = " << worst_phase << (ids_ok ? "  ok" : "  FAILED") << '\n';
  return ok && ids_ok ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement witnesses for three-mode four-wave mixing: closed forms and a Fock-space oracle"};
  app.require_subcommand(1);
  app.footer(kUnitsNote);

  Common sweep_opts, compare_opts, preset_opts, check_opts;
  CLI::App* sweep = app.add_subcommand("sweep", "evaluate witnesses over a gt grid");
  add_common(sweep, sweep_opts);
  CLI::App* compare = app.add_subcommand("compare", "certify closed forms against the oracle on a g ladder");
  add_common(compare, compare_opts);
  CLI::App* presets = app.add_subcommand("presets", "list presets, or print one with --preset");
  presets->add_option("--preset", preset_opts.preset_name, "preset to print as JSON");
  presets->add_option("--out", preset_opts.out, "output path (default: stdout)");
  CLI::App* check = app.add_subcommand("check", "ETCR/EOM residual scaling and coefficient identities");
  add_common(check, check_opts);
  double check_gt = 0.05;
  std::vector<int> check_cutoffs{10, 8, 8};
  check->add_option("--gt", check_gt, "g0*t for the residual ladder");
  check->add_option("--cutoffs", check_cutoffs, "per-mode cutoffs")->expected(3);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (*sweep) return cmd_sweep(sweep_opts, sweep->remaining());
    if (*compare) return cmd_compare(compare_opts, compare->remaining());
    if (*presets) return cmd_presets(preset_opts);
    if (*check) return cmd_check(check_opts, check->remaining(), check_gt, check_cutoffs);
  } catch (const fwm::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fwm::InvalidWitness& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
