#include "toomlab/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "toomlab/bounds.hpp"
#include "toomlab/engine.hpp"
#include "toomlab/error.hpp"
#include "toomlab/eroder.hpp"
#include "toomlab/exact.hpp"
#include "toomlab/stats.hpp"

namespace toomlab::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

const std::map<std::string, std::set<std::string>>& allowed_fields() {
  static const std::map<std::string, std::set<std::string>> fields = {
      {"check", {"command", "rule", "noise", "eps", "alpha", "eps_prime", "K"}},
      {"erode", {"command", "rule", "island", "cutoff", "frames"}},
      {"simulate",
       {"command", "rule", "noise", "dims", "seed", "steps", "burn_in", "replicas",
        "snapshot_every", "threads"}},
      {"exact", {"command", "rule", "noise", "dims", "window", "tv_steps", "tol"}},
      {"correlate",
       {"command", "rule", "noise", "dims", "seed", "distances", "lags", "replicas", "burn_in",
        "threads"}},
      {"scan",
       {"command", "rule", "noise_family", "eps_grid", "dims", "steps", "burn_in", "seed",
        "threads"}},
      {"divergence", {"command", "rule", "noise", "dims", "steps", "burn_in", "seed", "threads"}},
  };
  return fields;
}

// Schema-checked view of a run config.
class Config {
 public:
  Config(std::string command, Json j) : command_(std::move(command)), j_(std::move(j)) {
    if (!j_.is_object()) throw ConfigError("config must be a JSON object");
    const auto it = allowed_fields().find(command_);
    if (it == allowed_fields().end()) throw ConfigError("unknown command '" + command_ + "'");
    for (auto f = j_.begin(); f != j_.end(); ++f)
      if (!it->second.count(f.key()))
        throw ConfigError("unknown field '" + f.key() + "' for command " + command_);
    if (j_.contains("command") && j_["command"] != command_)
      throw ConfigError("config is for command '" + j_["command"].get<std::string>() + "'");
  }

  bool has(const char* key) const { return j_.contains(key); }
  const Json& raw() const { return j_; }
  Json& raw() { return j_; }

  template <class T>
  T get(const char* key) const {
    if (!has(key)) throw ConfigError("config is missing '" + std::string(key) + "'");
    try {
      return j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config field '" + std::string(key) + "' has the wrong type");
    }
  }
  template <class T>
  T get(const char* key, T fallback) const {
    return has(key) ? get<T>(key) : fallback;
  }

  RuleSpec rule() const {
    if (!has("rule")) throw ConfigError("config is missing 'rule'");
    const Json& r = j_.at("rule");
    if (r.is_string()) return io::resolve_rule(r.get<std::string>());
    return io::parse_rule(r);
  }
  NoiseModel noise() const {
    if (!has("noise")) throw ConfigError("config is missing 'noise'");
    return io::parse_noise(j_.at("noise"));
  }
  Torus torus() const { return Torus(get<std::vector<int>>("dims")); }

 private:
  std::string command_;
  Json j_;
};

// Artifacts embed everything that determines their content; thread counts
// do not, so they are left out.
Json embedded(const Config& cfg, const std::string& command) {
  Json j = cfg.raw();
  j.erase("threads");
  j["command"] = command;
  return j;
}

void log_sidecar(const fs::path& dir, const std::string& command) {
  fs::create_directories(dir);
  std::ofstream log(dir / "run.log", std::ios::app);
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  log << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ") << " " << command << "\n";
}

Json null_or(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }

Json spins_json(LocalConfig c, int r) {
  Json a = Json::array();
  for (int i = 0; i < r; ++i) a.push_back((c >> i & 1u) ? 1 : -1);
  return a;
}

// ---------------------------------------------------------------- check

Json bounds_report(const RuleSpec& rule, const CertificateConstants& k, double eps, double alpha,
                   double eps_prime, double K) {
  bounds::BoundParams p{rule.size(), k.q, k.r.get_d(), alpha, eps, eps_prime, K};
  bounds::validate(p);
  Json j;
  j["q"] = k.q;
  j["r"] = io::rational_json(k.r);
  j["R"] = rule.size();
  j["eps"] = eps;
  j["alpha"] = alpha;
  j["eps_prime"] = eps_prime;
  j["K"] = K;
  j["alpha_star"] = bounds::alpha_star(rule.size());
  std::optional<double> eps_star;
  if (alpha < bounds::alpha_star(rule.size()))
    eps_star = bounds::epsilon_star(rule.size(), k.q, p.r, alpha);
  j["epsilon_star"] = null_or(eps_star);
  const double sigma = bounds::sigma(p);
  j["sigma"] = sigma;
  j["admissible"] = p.admissible();
  std::optional<double> c, c_inv, c_prime, eta;
  if (p.admissible()) {
    const auto cc = bounds::constants_C(p);
    c = cc.C;
    c_inv = cc.C_inv;
  }
  const int v = rule.max_l1();
  if (c && sigma > 0 && sigma < 1) {
    const auto dc = bounds::decay_constants(*c + *c_inv, sigma, rule);
    c_prime = dc.C_prime;
    eta = dc.eta;
  }
  j["C"] = null_or(c);
  j["C_inv"] = null_or(c_inv);
  j["C_prime"] = null_or(c_prime);
  j["eta"] = null_or(eta);
  j["v"] = v;
  return j;
}

int cmd_check(const Config& cfg, const fs::path& out_dir, std::ostream& out) {
  const RuleSpec rule = cfg.rule();
  const auto verdict = check_monotone(rule);
  if (!verdict.pass()) {
    Json err;
    err["kind"] = "validation";
    err["message"] = !verdict.monotone ? "rule is not monotone" : "rule is constant";
    if (verdict.witness) {
      err["witness"]["lo"] = spins_json(verdict.witness->lo, rule.size());
      err["witness"]["hi"] = spins_json(verdict.witness->hi, rule.size());
    }
    out << Json{{"error", err}}.dump(2) << "\n";
    return kExitError;
  }
  const auto family = minimal_plus_sets(rule);
  const auto hulls = hull_family(rule, family);
  const auto cert = check_eroder(hulls);
  const bool verified = verify_certificate(hulls, cert);

  double eps = cfg.get<double>("eps", 0.0), alpha = cfg.get<double>("alpha", 0.0);
  if (cfg.has("noise")) {
    if (cfg.has("eps") || cfg.has("alpha"))
      throw ConfigError("give either 'noise' or explicit 'eps'/'alpha', not both");
    const auto k = check_assumptions(cfg.noise(), rule);
    eps = k.eps;
    alpha = k.alpha;
  }
  const double eps_prime = cfg.get<double>("eps_prime", 0.0), K = cfg.get<double>("K", 1.0);

  Json report;
  report["config"] = embedded(cfg, "check");
  report["rule"] = io::rule_to_json(rule);
  report["plus_sets"] = family.sets;
  report["verdict"] = cert.verdict == Verdict::Eroder ? "ERODER" : "NON_ERODER";
  report["certificate_verified"] = verified;
  Json cert_json = io::certificate_to_json(cert);
  Json cert_file;
  cert_file["config"] = report["config"];
  cert_file["certificate"] = cert_json;
  io::write_atomic(out_dir / "certificate.json", cert_file.dump(2) + "\n");
  report["certificate"] = cert_json;
  if (cert.verdict == Verdict::Eroder) {
    Json b = bounds_report(rule, certificate_constants(cert), eps, alpha, eps_prime, K);
    Json bounds_file;
    bounds_file["config"] = report["config"];
    bounds_file["bounds"] = b;
    io::write_atomic(out_dir / "bounds.json", bounds_file.dump(2) + "\n");
    report["bounds"] = b;
  } else {
    report["bounds"] = nullptr;
  }
  out << report.dump(2) << "\n";
  if (!verified) throw NumericalError("emitted certificate failed independent verification");
  return cert.verdict == Verdict::Eroder ? kExitOk : kExitNonEroder;
}

// ---------------------------------------------------------------- erode

std::vector<Offset> parse_island(const Json& j, int dimension) {
  std::vector<Offset> island;
  if (j.is_array()) {
    island = j.get<std::vector<Offset>>();
  } else if (j.is_object() && j.contains("box") && j.size() == 1) {
    const auto box = j["box"].get<std::vector<int>>();
    if (static_cast<int>(box.size()) != dimension) throw ConfigError("island box has wrong dimension");
    std::uint64_t total = 1;
    for (int b : box) {
      if (b < 1) throw ConfigError("island box sides must be positive");
      total *= b;
    }
    for (std::uint64_t k = 0; k < total; ++k) {
      Offset p(dimension);
      std::uint64_t rem = k;
      for (int a = dimension - 1; a >= 0; --a) {
        p[a] = static_cast<int>(rem % box[a]);
        rem /= box[a];
      }
      island.push_back(p);
    }
  } else {
    throw ConfigError("island must be a list of sites or {\"box\": [sides]}");
  }
  for (const auto& p : island)
    if (static_cast<int>(p.size()) != dimension) throw ConfigError("island site has wrong dimension");
  if (island.empty()) throw ConfigError("island is empty");
  return island;
}

int cmd_erode(const Config& cfg, const fs::path& out_dir, std::ostream& out) {
  const RuleSpec rule = cfg.rule();
  const auto island = parse_island(cfg.get<Json>("island"), rule.dimension());
  const std::uint64_t cutoff = cfg.get<std::uint64_t>("cutoff", default_erosion_cutoff(island));
  const Torus torus = erosion_torus(rule, island, cutoff);
  const auto result = erosion_time(rule, island, torus, cutoff);

  for (std::size_t n = 0; n < result.minus_counts.size(); ++n)
    out << "step " << n << " minus " << result.minus_counts[n] << "\n";

  if (cfg.get<bool>("frames", false)) {
    // Replay the trajectory for the frames.
    Engine engine(rule, torus);
    LatticeState s = LatticeState::all_plus(torus);
    for (const auto& p : island) s.set(torus.index(p), Spin::Minus);
    std::vector<LatticeState> history{s};
    for (std::size_t n = 1; n < result.minus_counts.size(); ++n) history.push_back(engine.step(history.back()));
    if (rule.dimension() == 1) {
      io::write_atomic(out_dir / "erode_strip.ppm", io::ppm_strip(history));
    } else if (rule.dimension() == 2) {
      for (std::size_t n = 0; n < history.size(); ++n) {
        std::ostringstream name;
        name << "erode_" << std::setw(5) << std::setfill('0') << n << ".ppm";
        io::write_atomic(out_dir / "frames" / name.str(), io::ppm_frame(history[n]));
      }
    }
  }

  Json report;
  report["config"] = embedded(cfg, "erode");
  report["result"] = result.erased ? "ERASED" : "PERSISTS";
  report["steps"] = result.steps;
  report["cutoff"] = cutoff;
  report["torus"] = torus.dims();
  report["minus_counts"] = result.minus_counts;
  io::write_atomic(out_dir / "erosion.json", report.dump(2) + "\n");
  Json brief{{"result", report["result"]}, {"steps", result.steps}};
  out << brief.dump() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const Config& cfg, const fs::path& out_dir, std::ostream& out, int threads) {
  const stats::SimSetup setup{cfg.rule(), cfg.noise(), cfg.torus(), cfg.get<std::uint64_t>("seed"),
                              threads};
  const auto steps = cfg.get<std::uint64_t>("steps");
  const auto burn_in = cfg.get<std::uint64_t>("burn_in", steps / 2);
  const auto replicas = cfg.get<std::uint64_t>("replicas", 1);
  const auto run = stats::minus_density_run(setup, steps, burn_in, replicas);
  const Json conf = embedded(cfg, "simulate");

  io::CsvWriter csv(conf, {"step", "density"});
  for (std::size_t t = 0; t < run.density.size(); ++t) csv.row({std::to_string(t), io::format_double(run.density[t])});
  io::write_atomic(out_dir / "density.csv", csv.str());

  const auto every = cfg.get<std::uint64_t>("snapshot_every", 0);
  if (every > 0) {
    Engine engine(setup.rule, setup.torus, setup.noise);
    engine.set_threads(threads);
    const RngKey key = replicas == 1 ? RngKey{setup.seed} : replica_key(setup.seed, 0);
    LatticeState cur = LatticeState::all_plus(setup.torus), next(setup.torus, false);
    std::vector<LatticeState> strip;
    for (std::uint64_t t = 0;; ++t) {
      if (t % every == 0) {
        if (setup.torus.dimension() == 2) {
          std::ostringstream name;
          name << "frame_" << std::setw(6) << std::setfill('0') << t << ".ppm";
          io::write_atomic(out_dir / "frames" / name.str(), io::ppm_frame(cur));
        } else if (setup.torus.dimension() == 1) {
          strip.push_back(cur);
        }
      }
      if (t == steps) break;
      engine.step_into(cur, next, key, t);
      std::swap(cur, next);
    }
    if (!strip.empty()) io::write_atomic(out_dir / "strip.ppm", io::ppm_strip(strip));
  }

  Json report;
  report["config"] = conf;
  report["stationary_density"] = {{"mean", run.stationary_density.mean},
                                  {"stderr", run.stationary_density.se},
                                  {"n", run.stationary_density.n}};
  report["final_density"] = run.density.back();
  io::write_atomic(out_dir / "simulate.json", report.dump(2) + "\n");
  out << report.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- exact

int cmd_exact(const Config& cfg, const fs::path& out_dir, std::ostream& out) {
  const RuleSpec rule = cfg.rule();
  const NoiseModel noise = cfg.noise();
  const Torus torus = cfg.torus();
  std::vector<Offset> window = cfg.get<std::vector<Offset>>("window", {Offset(torus.dimension(), 0)});
  const int tv_steps = cfg.get<int>("tv_steps", 50);
  exact::StationaryOptions opts;
  opts.tol = cfg.get<double>("tol", opts.tol);

  const exact::TransferOperator op(rule, noise, torus);
  const auto stat = exact::stationary_distribution(rule, noise, torus, opts);
  const auto& pi = stat.distribution;
  const auto curve = exact::tv_curve(op, pi, tv_steps);
  // Points within reach of the accuracy of pi are left out of the fit.
  const auto fit = stats::fit_tv_curve(curve, 5, 100 * opts.tol);
  const auto marginal = exact::window_marginal(pi, window);

  // Duality residual: <T pi, f> against <pi, T* f> for the window spin product.
  const auto f = exact::CylinderFunction::spin_product(window);
  const auto full = exact::expand(f, torus);
  std::vector<double> dual(full.size());
  op.apply_dual(full, dual);
  double paired = 0;
  for (std::size_t i = 0; i < dual.size(); ++i) paired += pi[i] * dual[i];
  const double duality = std::abs(exact::cylinder_expectation(op(pi), f) - paired);

  Json report;
  report["config"] = embedded(cfg, "exact");
  report["sites"] = torus.sites();
  report["stationary"] = {{"iterations", stat.iterations},
                          {"cesaro", stat.cesaro},
                          {"residual_tv", stat.residual},
                          {"minus_density", exact::stationary_minus_density(pi)},
                          {"all_minus_mass", pi[0]},
                          {"all_plus_mass", pi[pi.states() - 1]}};
  report["window"] = window;
  report["window_marginal"] = marginal;
  report["tv_curve"] = curve;
  report["fitted_rate"] = {{"rate", fit.rate},
                           {"r_squared", fit.r_squared},
                           {"points", fit.points},
                           {"valid", fit.valid}};
  report["duality_residual"] = duality;
  io::write_atomic(out_dir / "exact.json", report.dump(2) + "\n");
  out << report.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- correlate

std::string correlation_csv(const Json& conf, const std::vector<stats::CorrelationPoint>& pts) {
  io::CsvWriter csv(conf, {"distance_or_lag", "estimate", "stderr", "n"});
  for (const auto& p : pts)
    csv.row({std::to_string(p.separation), io::format_double(p.estimate), io::format_double(p.se),
             std::to_string(p.n)});
  return csv.str();
}

Json fit_json(const stats::FitResult& f) {
  return {{"rate", f.rate}, {"intercept", f.intercept}, {"residual", f.residual},
          {"r_squared", f.r_squared}, {"points", f.points}, {"valid", f.valid}};
}

int cmd_correlate(const Config& cfg, const fs::path& out_dir, std::ostream& out, int threads) {
  const stats::SimSetup setup{cfg.rule(), cfg.noise(), cfg.torus(), cfg.get<std::uint64_t>("seed"),
                              threads};
  const auto replicas = cfg.get<std::uint64_t>("replicas", 1000);
  const auto burn_in = cfg.get<std::uint64_t>("burn_in", 100);
  const Json conf = embedded(cfg, "correlate");
  Json report;
  report["config"] = conf;
  if (cfg.has("distances")) {
    const auto sp = stats::spatial_correlation(setup, cfg.get<std::vector<int>>("distances"), replicas, burn_in);
    io::write_atomic(out_dir / "spatial.csv", correlation_csv(conf, sp.summary.correlations));
    report["spatial_fit"] = fit_json(sp.fit);
    if (sp.fit.valid) report["spatial_fit"]["eta_hat"] = sp.fit.rate;
  }
  if (cfg.has("lags")) {
    const auto tp = stats::temporal_autocorrelation(setup, cfg.get<std::vector<int>>("lags"), replicas, burn_in);
    io::write_atomic(out_dir / "temporal.csv", correlation_csv(conf, tp.summary.correlations));
    report["temporal_fit"] = fit_json(tp.fit);
  }
  if (!cfg.has("distances") && !cfg.has("lags"))
    throw ConfigError("correlate needs 'distances' and/or 'lags'");
  io::write_atomic(out_dir / "correlate.json", report.dump(2) + "\n");
  out << report.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- scan

int cmd_scan(const Config& cfg, const fs::path& out_dir, std::ostream& out, int threads) {
  const std::string fam = cfg.get<std::string>("noise_family", "symmetric");
  stats::NoiseFamily family;
  if (fam == "symmetric")
    family = stats::NoiseFamily::Symmetric;
  else if (fam == "biased_plus")
    family = stats::NoiseFamily::BiasedPlus;
  else if (fam == "biased_minus")
    family = stats::NoiseFamily::BiasedMinus;
  else
    throw ConfigError("noise_family must be symmetric, biased_plus or biased_minus");
  const auto steps = cfg.get<std::uint64_t>("steps");
  const auto rows = stats::density_vs_epsilon_scan(
      cfg.rule(), family, cfg.get<std::vector<double>>("eps_grid"), cfg.torus(), steps,
      cfg.get<std::uint64_t>("burn_in", steps / 2), cfg.get<std::uint64_t>("seed"), threads);
  const Json conf = embedded(cfg, "scan");
  io::CsvWriter csv(conf, {"eps", "density", "stderr", "n"});
  for (const auto& r : rows)
    csv.row({io::format_double(r.eps), io::format_double(r.density.mean),
             io::format_double(r.density.se), std::to_string(r.density.n)});
  io::write_atomic(out_dir / "scan.csv", csv.str());
  Json report;
  report["config"] = conf;
  report["monotone_within_3se"] = stats::scan_monotone(rows);
  io::write_atomic(out_dir / "scan.json", report.dump(2) + "\n");
  out << report.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- divergence

int cmd_divergence(const Config& cfg, const fs::path& out_dir, std::ostream& out, int threads) {
  const stats::SimSetup setup{cfg.rule(), cfg.noise(), cfg.torus(), cfg.get<std::uint64_t>("seed"),
                              threads};
  const auto steps = cfg.get<std::uint64_t>("steps");
  const auto run = stats::two_phase_divergence(setup, steps, cfg.get<std::uint64_t>("burn_in", steps / 2));
  const Json conf = embedded(cfg, "divergence");
  io::CsvWriter csv(conf, {"step", "mag_plus", "mag_minus", "gap"});
  for (std::size_t t = 0; t < run.gap.size(); ++t)
    csv.row({std::to_string(t), io::format_double(run.mag_plus[t]), io::format_double(run.mag_minus[t]),
             io::format_double(run.gap[t])});
  io::write_atomic(out_dir / "divergence.csv", csv.str());
  Json report;
  report["config"] = conf;
  report["verdict"] = stats::to_string(run.verdict);
  report["gap"] = {{"mean", run.post_burn_in_gap.mean}, {"stderr", run.post_burn_in_gap.se}};
  report["coalesced_at"] = run.coalesced_at;
  io::write_atomic(out_dir / "divergence.json", report.dump(2) + "\n");
  out << report.dump(2) << "\n";
  return kExitOk;
}

Json load_config(const Invocation& inv) {
  if (inv.config_path) {
    std::ifstream in(*inv.config_path);
    if (!in) throw ConfigError("cannot open config " + inv.config_path->string());
    try {
      return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
  }
  if (inv.config) return *inv.config;
  return Json::object();
}

}  // namespace

int run(const Invocation& inv, std::ostream& out) {
  try {
    Json raw = load_config(inv);
    if (!raw.is_object()) throw ConfigError("config must be a JSON object");
    if (inv.rule) raw["rule"] = *inv.rule;
    // Seed precedence: --seed, then TOOMLAB_SEED, then the config.
    if (const char* env = std::getenv("TOOMLAB_SEED"); env && *env) {
      try {
        raw["seed"] = std::stoull(env);
      } catch (const std::exception&) {
        throw ConfigError("TOOMLAB_SEED must be an unsigned integer");
      }
    }
    if (inv.seed) raw["seed"] = *inv.seed;
    const bool wants_seed = inv.command == "simulate" || inv.command == "correlate" ||
                            inv.command == "scan" || inv.command == "divergence";
    if (!wants_seed) raw.erase("seed");
    else if (!raw.contains("seed")) raw["seed"] = 0;

    Config cfg(inv.command, raw);
    int threads = cfg.get<int>("threads", 1);
    if (inv.threads) threads = *inv.threads;
    if (threads < 1) throw ConfigError("threads must be >= 1");

    log_sidecar(inv.out_dir, inv.command);
    if (inv.command == "check") return cmd_check(cfg, inv.out_dir, out);
    if (inv.command == "erode") return cmd_erode(cfg, inv.out_dir, out);
    if (inv.command == "simulate") return cmd_simulate(cfg, inv.out_dir, out, threads);
    if (inv.command == "exact") return cmd_exact(cfg, inv.out_dir, out);
    if (inv.command == "correlate") return cmd_correlate(cfg, inv.out_dir, out, threads);
    if (inv.command == "scan") return cmd_scan(cfg, inv.out_dir, out, threads);
    if (inv.command == "divergence") return cmd_divergence(cfg, inv.out_dir, out, threads);
    throw ConfigError("unknown command '" + inv.command + "'");
  } catch (const Error& e) {
    out << Json{{"error", {{"kind", e.kind()}, {"message", e.what()}}}}.dump(2) << "\n";
  } catch (const std::exception& e) {
    out << Json{{"error", {{"kind", "internal"}, {"message", e.what()}}}}.dump(2) << "\n";
  }
  return kExitError;
}

int main(int argc, char** argv) {
  CLI::App app{"toomlab: noisy monotone binary cellular automata laboratory"};
  app.require_subcommand(1);
  Invocation inv;
  std::string config_path, out_dir = "toomlab_out", rule;
  std::uint64_t seed = 0;
  int threads = 1;
  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"check", "certify erosion and evaluate the low-noise bounds"},
           {"erode", "measure the erosion time of a finite island"},
           {"simulate", "Monte Carlo minus-density run"},
           {"exact", "exact transfer-operator computation on a tiny torus"},
           {"correlate", "spatial and temporal covariance estimates"},
           {"scan", "stationary density across a noise grid"},
           {"divergence", "coupled runs from all-plus and all-minus"}}) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run config")->check(CLI::ExistingFile);
    sub->add_option("--rule", rule, "builtin rule name or rule file (overrides the config)");
    sub->add_option("--seed", seed, "seed (overrides TOOMLAB_SEED and the config)");
    sub->add_option("--threads", threads, "worker threads; results do not depend on it");
    sub->add_option("--out", out_dir, "output directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }
  const auto* sub = app.get_subcommands().front();
  inv.command = sub->get_name();
  if (!config_path.empty()) inv.config_path = config_path;
  if (!rule.empty()) inv.rule = rule;
  if (sub->count("--seed")) inv.seed = seed;
  if (sub->count("--threads")) inv.threads = threads;
  inv.out_dir = out_dir;
  return run(inv, std::cout);
}

}  // namespace toomlab::cli
