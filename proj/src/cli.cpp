#include "ou_irrev/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "ou_irrev/error.hpp"
#include "ou_irrev/estimators.hpp"
#include "ou_irrev/io.hpp"
#include "ou_irrev/sampler.hpp"
#include "ou_irrev/stationary.hpp"
#include "ou_irrev/transient.hpp"

namespace ouirr::cli {

namespace {

using nlohmann::json;

constexpr double kFdrTol = 1e-9;
constexpr double kHdrRelTol = 0.05;

json spectrum_json(const Spectrum& s) {
  auto arr = json::array();
  for (const auto& l : s.eigenvalues) arr.push_back({l.real(), l.imag()});
  return arr;
}

json tau_map(std::span<const double> taus, const auto& fn) {
  json m = json::object();
  for (double t : taus) m[format_shortest(t)] = fn(t);
  return m;
}

Vec start_or_default(const RunConfig& cfg, std::size_t n, double fill) {
  if (cfg.x0.empty()) return Vec(n, fill);
  if (cfg.x0.size() != n) {
    throw ArgumentError("--x0 has " + std::to_string(cfg.x0.size()) + " entries, model has dimension " +
                        std::to_string(n));
  }
  return cfg.x0;
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ArgumentError(std::string(name) + " must be > 0");
}

void write_output(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.out_path, std::ios::binary);
  if (!f) throw IoError("cannot open " + cfg.out_path + " for writing");
  f << text;
  if (!f) throw IoError("failed writing " + cfg.out_path);
}

json skipped(const std::string& reason) { return {{"skipped", true}, {"reason", reason}, {"pass", true}}; }

}  // namespace

std::size_t RunConfig::resolved_steps() const {
  if (steps) return *steps;
  check_positive(dt, "dt");
  check_positive(t_max, "t-max");
  const double s = std::round(t_max / dt);
  if (s < 1.0) throw ArgumentError("t-max must be at least one dt");
  return static_cast<std::size_t>(s);
}

// ---------------------------------------------------------------------------

json classify_report(const LinearModel& model) {
  const Classification c = classify(model);
  return {{"verdict", std::string(to_string(c.verdict))},
          {"eigenvalues", spectrum_json(c.spectrum_B)},
          {"min_real_part", c.spectrum_B.min_real_part},
          {"sym_defect_AinvB", c.symmetry_defect_AinvB},
          {"marginal", c.marginal}};
}

int cmd_classify(const RunConfig& cfg, std::ostream& out) {
  const LinearModel model = read_model_file(cfg.model_path);
  const json rep = classify_report(model);
  if (cfg.json) {
    out << canonical_json(rep) << '\n';
    return kOk;
  }
  out << rep["verdict"].get<std::string>() << '\n';
  out << "eigenvalues of B:\n";
  for (const auto& e : rep["eigenvalues"]) {
    const double re = e[0].get<double>();
    const double im = e[1].get<double>();
    out << "  " << format_shortest(re) << (im < 0 ? " - " : " + ") << format_shortest(std::abs(im))
        << "i\n";
  }
  out << "sym_defect(A^-1 B): " << format_shortest(rep["sym_defect_AinvB"].get<double>()) << '\n';
  out << "marginal: " << (rep["marginal"].get<bool>() ? "true" : "false") << '\n';
  return kOk;
}

json analyze_report(const LinearModel& model, std::span<const double> taus) {
  const StationaryLaw law(model);
  return {{"xi", matrix_to_json(law.Xi())},
          {"epr", entropy_production_rate(law)},
          {"hdr", heat_dissipation_rate_stationary(law)},
          {"fdr_standard", law.fdr().standard},
          {"fdr_strong", law.fdr().strong},
          {"r_tau", tau_map(taus, [&](double t) { return matrix_to_json(two_time_covariance(law, t)); })}};
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  const LinearModel model = read_model_file(cfg.model_path);
  write_output(cfg, out, canonical_json(analyze_report(model, cfg.tau_list)) + "\n");
  return kOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const LinearModel model = read_model_file(cfg.model_path);
  if (cfg.out_path.empty()) throw ArgumentError("simulate: --out is required");
  check_positive(cfg.dt, "dt");
  BatchSpec spec;
  spec.dt = cfg.dt;
  spec.steps = cfg.resolved_steps();
  spec.paths = cfg.paths;
  spec.seed = cfg.seed;
  if (cfg.scheme == "euler") {
    spec.scheme = Scheme::EulerMaruyama;
  } else if (cfg.scheme != "exact") {
    throw ArgumentError("unknown scheme " + cfg.scheme);
  }
  if (!cfg.x0.empty()) {
    spec.x0 = start_or_default(cfg, model.dim(), 0.0);
  } else if (classify(model).verdict == Verdict::Sweeping) {
    spec.x0 = Vec(model.dim(), 0.0);
  }
  const TrajectoryBatch batch = sample_batch(model, spec, cfg.threads);
  for (std::size_t k = 0; k < batch.paths.size(); ++k) {
    const std::string path = cfg.out_path + "_p" + std::to_string(k) + ".csv";
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path + " for writing");
    write_trajectory_csv(f, batch.paths[k]);
    if (!f) throw IoError("failed writing " + path);
  }
  out << "wrote " << batch.paths.size() << " trajectories to " << cfg.out_path << "_p*.csv\n";
  return kOk;
}

std::string transient_csv(const LinearModel& model, std::span<const double> x0,
                          std::span<const double> t_grid) {
  const std::size_t n = model.dim();
  const bool reversible = classify(model).verdict == Verdict::Reversible;
  const bool wide = n >= 10;
  std::ostringstream os;
  os << 't';
  for (std::size_t i = 1; i <= n; ++i) os << ",mean_" << i;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j) os << ",cov_" << i << (wide ? "_" : "") << j;
  os << ",entropy,epr_t,hdr_t,entropy_rate";
  if (reversible) os << ",free_energy";
  os << '\n';
  for (double t : t_grid) {
    const GaussianState s = propagate(model, x0, t);
    os << format_shortest(t);
    for (double v : s.mean) os << ',' << format_shortest(v);
    for (double v : s.cov.data()) os << ',' << format_shortest(v);
    if (is_spd(s.cov)) {
      const ThermoSnapshot snap = instantaneous_rates(model, s);
      os << ',' << format_shortest(snap.entropy) << ',' << format_shortest(snap.epr_t) << ','
         << format_shortest(snap.hdr_t) << ',' << format_shortest(snap.entropy_rate);
      if (reversible) os << ',' << format_shortest(*snap.free_energy);
    } else {
      os << ",,,,";
      if (reversible) os << ',';
    }
    os << '\n';
  }
  return os.str();
}

int cmd_transient(const RunConfig& cfg, std::ostream& out) {
  const LinearModel model = read_model_file(cfg.model_path);
  if (cfg.x0.empty()) throw ArgumentError("transient: --x0 is required");
  const Vec x0 = start_or_default(cfg, model.dim(), 0.0);
  std::vector<double> grid = cfg.t_grid;
  if (grid.empty()) {
    check_positive(cfg.t_max, "t-max");
    if (cfg.points < 2) throw ArgumentError("transient: --points must be >= 2");
    for (std::size_t k = 0; k < cfg.points; ++k) {
      grid.push_back(cfg.t_max * static_cast<double>(k) / static_cast<double>(cfg.points - 1));
    }
  }
  write_output(cfg, out, transient_csv(model, x0, grid));
  return kOk;
}

json verify_report(const LinearModel& model, const RunConfig& cfg) {
  json rep = json::object();
  const Classification c = classify(model);
  json cls = classify_report(model);

  if (c.verdict == Verdict::Sweeping) {
    cls["pass"] = true;
    rep["classification"] = cls;
    const std::string why = "model is sweeping: no stationary law";
    for (const char* s : {"fdr", "epr_vs_hdr_mc", "two_time_symmetry", "green_kubo"}) {
      rep[s] = skipped(why);
    }
    rep["pass"] = true;
    return rep;
  }

  if (cfg.tau_list.size() < 2) throw ArgumentError("verify: --tau needs at least two lags");
  check_positive(cfg.dt, "dt");
  const StationaryLaw law(model);
  const bool reversible = c.verdict == Verdict::Reversible;
  const double epr = entropy_production_rate(law);
  const double hdr = heat_dissipation_rate_stationary(law);

  cls["epr_consistent"] = (epr <= kEprZero) == reversible;
  cls["pass"] = cls["epr_consistent"];
  rep["classification"] = cls;

  const FdrResiduals fdr = law.fdr();
  rep["fdr"] = {{"standard", fdr.standard},
                {"strong", fdr.strong},
                {"tol", kFdrTol},
                {"pass", fdr.standard <= kFdrTol && (fdr.strong <= kFdrTol) == reversible}};

  BatchSpec st;
  st.dt = cfg.dt;
  st.steps = cfg.resolved_steps();
  st.paths = cfg.paths;
  st.seed = cfg.seed;
  const TrajectoryBatch stationary = sample_batch(model, st, cfg.threads);

  const double max_tau = *std::max_element(cfg.tau_list.begin(), cfg.tau_list.end());
  BatchSpec cond;
  cond.dt = cfg.dt;
  cond.steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(max_tau / cfg.dt - 1e-9)));
  cond.paths = cfg.paths;
  cond.seed = cfg.seed + 1;
  cond.x0 = start_or_default(cfg, model.dim(), 1.0);
  const TrajectoryBatch conditional = sample_batch(model, cond, cfg.threads);

  const EstimateReport est =
      estimate_report(model, stationary, conditional, cfg.tau_list, cfg.burn_in);

  json ehdr = {{"epr", epr},
               {"hdr_closed_form", hdr},
               {"hdr_mc", est.hdr.value},
               {"hdr_se", est.hdr.se},
               {"paths", est.hdr.paths}};
  bool ehdr_pass = std::abs(epr - hdr) <= 1e-9 * (1.0 + epr);
  if (epr > kEprZero) {
    const double rel = std::abs(est.hdr.value - epr) / epr;
    ehdr["relative_error"] = rel;
    ehdr["tol"] = kHdrRelTol;
    ehdr_pass = ehdr_pass && rel < kHdrRelTol;
  } else {
    const double z = est.hdr.se > 0 ? std::abs(est.hdr.value) / est.hdr.se : 0.0;
    ehdr["z"] = z;
    ehdr["z_limit"] = 3.0;
    ehdr_pass = ehdr_pass && z <= 3.0;
  }
  ehdr["pass"] = ehdr_pass;
  rep["epr_vs_hdr_mc"] = ehdr;

  double analytic_defect = 0.0;
  for (double t : cfg.tau_list) analytic_defect = std::max(analytic_defect, sym_defect(two_time_covariance(law, t)));
  json per_lag = json::object();
  for (std::size_t i = 0; i < est.asymmetry.lags.size(); ++i) {
    per_lag[format_shortest(est.asymmetry.lags[i])] = est.asymmetry.per_lag[i];
  }
  rep["two_time_symmetry"] = {{"statistic", est.asymmetry.statistic},
                              {"threshold", est.asymmetry.threshold},
                              {"per_lag", per_lag},
                              {"verdict_reversible", est.asymmetry.reversible},
                              {"expected_reversible", reversible},
                              {"analytic_max_sym_defect", analytic_defect},
                              {"note", est.confidence_note},
                              {"pass", est.asymmetry.reversible == reversible}};

  const GreenKuboResult& gk = est.green_kubo;
  rep["green_kubo"] = {{"checkpoints", gk.checkpoints},
                       {"max_deviation", gk.max_deviation},
                       {"max_z", gk.max_z},
                       {"stationary_max_z", gk.stationary_max_z},
                       {"z_limit", gk.z_limit},
                       {"pass", gk.pass}};

  rep["xi_hat"] = matrix_to_json(est.moments.xi_hat);
  rep["config"] = {{"seed", cfg.seed},
                   {"dt", cfg.dt},
                   {"steps", st.steps},
                   {"paths", cfg.paths},
                   {"burn_in", cfg.burn_in},
                   {"tau", cfg.tau_list}};

  bool all = true;
  for (const char* s : {"classification", "fdr", "epr_vs_hdr_mc", "two_time_symmetry", "green_kubo"}) {
    all = all && rep[s]["pass"].get<bool>();
  }
  rep["pass"] = all;
  return rep;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const LinearModel model = read_model_file(cfg.model_path);
  const json rep = verify_report(model, cfg);
  write_output(cfg, out, canonical_json(rep) + "\n");
  return rep["pass"].get<bool>() ? kOk : kVerificationFailed;
}

// ---------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linear stochastic systems dx/dt = -Bx + Gamma xi(t): classification, stationary "
               "thermodynamics, simulation and Monte Carlo verification.",
               "ou_irrev"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  auto add_model = [](CLI::App* sub, RunConfig& cfg) {
    sub->add_option("model", cfg.model_path, "Model JSON file {\"B\": [[..]], \"Gamma\": [[..]]}")
        ->required();
  };
  auto add_sim = [](CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--seed", cfg.seed, "Master RNG seed");
    sub->add_option("--dt", cfg.dt, "Time step");
    sub->add_option("--t-max", cfg.t_max, "Simulated time span T");
    sub->add_option("--steps", cfg.steps, "Number of steps (overrides --t-max)");
  };

  RunConfig classify_cfg;
  auto* classify_cmd = app.add_subcommand("classify", "Sweeping / reversible / irreversible verdict");
  add_model(classify_cmd, classify_cfg);
  classify_cmd->add_flag("--json", classify_cfg.json, "Emit JSON");

  RunConfig analyze_cfg;
  auto* analyze_cmd = app.add_subcommand("analyze", "Stationary covariance, epr, hdr, FDR residuals, R(tau)");
  add_model(analyze_cmd, analyze_cfg);
  analyze_cmd->add_option("--tau", analyze_cfg.tau_list, "Lags for R(tau)")->delimiter(',');
  analyze_cmd->add_option("--out", analyze_cfg.out_path, "Output file (default: stdout)");

  RunConfig simulate_cfg;
  simulate_cfg.paths = 1;
  auto* simulate_cmd = app.add_subcommand("simulate", "Write trajectory CSVs <out>_p<k>.csv");
  add_model(simulate_cmd, simulate_cfg);
  add_sim(simulate_cmd, simulate_cfg);
  simulate_cmd->add_option("--paths", simulate_cfg.paths, "Number of paths");
  simulate_cmd->add_option("--x0", simulate_cfg.x0,
                           "Start state (default: stationary draw, or 0 if sweeping)")
      ->delimiter(',')
      ->default_str("");
  simulate_cmd->add_option("--scheme", simulate_cfg.scheme, "Integration scheme")
      ->check(CLI::IsMember({"exact", "euler"}));
  simulate_cmd->add_option("--out", simulate_cfg.out_path, "Output path prefix")->required();

  RunConfig transient_cfg;
  transient_cfg.t_max = 10.0;
  auto* transient_cmd = app.add_subcommand("transient", "Time series of the Gaussian law from a point start");
  add_model(transient_cmd, transient_cfg);
  transient_cmd->add_option("--x0", transient_cfg.x0, "Start state")->delimiter(',')->default_str("")->required();
  transient_cmd->add_option("--t-max", transient_cfg.t_max, "Last time of the uniform grid");
  transient_cmd->add_option("--points", transient_cfg.points, "Grid points including t = 0");
  transient_cmd->add_option("--t-grid", transient_cfg.t_grid, "Explicit time grid (overrides --t-max/--points)")
      ->delimiter(',')
      ->default_str("");
  transient_cmd->add_option("--out", transient_cfg.out_path, "Output file (default: stdout)");

  RunConfig verify_cfg;
  auto* verify_cmd = app.add_subcommand("verify", "Monte Carlo vs analytic verification suite");
  add_model(verify_cmd, verify_cfg);
  add_sim(verify_cmd, verify_cfg);
  verify_cmd->add_option("--paths", verify_cfg.paths, "Number of paths per ensemble");
  verify_cmd->add_option("--burn-in", verify_cfg.burn_in, "Burn-in time discarded by estimators");
  verify_cmd->add_option("--tau", verify_cfg.tau_list, "Lags / Green-Kubo checkpoints")->delimiter(',');
  verify_cmd->add_option("--x0", verify_cfg.x0, "Start of the conditional ensemble (default: all ones)")
      ->delimiter(',')
      ->default_str("");
  verify_cmd->add_option("--out", verify_cfg.out_path, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*classify_cmd) return cmd_classify(classify_cfg, out);
    if (*analyze_cmd) return cmd_analyze(analyze_cfg, out);
    if (*simulate_cmd) return cmd_simulate(simulate_cfg, out);
    if (*transient_cmd) return cmd_transient(transient_cfg, out);
    if (*verify_cmd) return cmd_verify(verify_cfg, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const InsufficientDataError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const UndefinedEntropyError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kValidation;
}

}  // namespace ouirr::cli
