#include "rotorwave/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "rotorwave/analysis.hpp"
#include "rotorwave/constants.hpp"
#include "rotorwave/csv.hpp"
#include "rotorwave/errors.hpp"
#include "rotorwave/manifest.hpp"
#include "rotorwave/rng.hpp"
#include "rotorwave/rpwf.hpp"

namespace rotorwave {

namespace {

namespace fs = std::filesystem;

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

double realized_peak_field(const Pulse& pulse) {
  const double dt = 2e-4;
  double peak = 0.0;
  for (double t = pulse.start_ps(); t <= pulse.end_ps(); t += dt)
    peak = std::max(peak, std::abs(pulse.field_MV_cm(t)));
  return peak;
}

ThermalEnsemble ensemble_at(const RunConfig& cfg, double temperature_K) {
  ThermalConfig tc = cfg.thermal_config();
  tc.temperature_K = temperature_K;
  return build_thermal_ensemble(cfg.rotor_constants(), tc);
}

RunManifest start_manifest(const std::string& command, const RunConfig& cfg,
                           const RunOptions& opt) {
  RunManifest m;
  m.command = command;
  // the hash identifies the physics and seed, not the destination
  RunConfig canon = cfg;
  canon.output.directory = ".";
  m.config_hash = hash_hex(fnv1a64(serialize_config(canon)));
  m.master_seed = cfg.rpwf.master_seed;
  m.threads = std::max(1, opt.threads);
  return m;
}

void finish_manifest(RunManifest& m, const Stopwatch& total, const fs::path& dir) {
  m.wall_time_s = total.seconds();
  write_manifest((dir / "manifest.json").string(), m);
}

void write_trace(const fs::path& path, const std::string& hash,
                 const ObservableTrace& tr) {
  CsvWriter w(path.string(), hash);
  w.row({"time_ps", "orientation", "alignment"});
  for (std::size_t i = 0; i < tr.t.size(); ++i)
    w.row({fmt_g17(tr.t[i]), fmt_g17(tr.orientation[i]), fmt_g17(tr.alignment[i])});
}

// largest sample time usable as the epsilon upper limit; 0 when unusable
double epsilon_t_rev(const ObservableTrace& tr, std::vector<std::string>& warnings) {
  bool has_zero = false;
  for (double t : tr.t)
    if (std::abs(t) <= 1e-6) has_zero = true;
  if (!has_zero) {
    warnings.push_back("epsilon skipped: sample grid does not contain t = 0");
    return 0.0;
  }
  double best = 0.0;
  for (double t : tr.t)
    if (t <= 120.0 + 1e-6) best = std::max(best, t);
  if (best <= 1e-6) {
    warnings.push_back("epsilon skipped: no samples after t = 0");
    return 0.0;
  }
  return best;
}

std::vector<double> default_levels_grid() {
  std::vector<double> t;
  for (double v = 20.0; v <= 200.0; v += 20.0) t.push_back(v);
  return t;
}

void run_levels(const RunConfig& cfg, const RunOptions& opt, std::ostream& log) {
  Stopwatch total;
  RunManifest m = start_manifest("levels", cfg, opt);

  std::vector<double> grid =
      cfg.scan.temperatures_K.empty() ? default_levels_grid() : cfg.scan.temperatures_K;

  struct Row {
    double T, Z, kept, mean_e, mean_e_full, delta;
    int n_levels, n_states;
  };
  Stopwatch stage;
  std::vector<Row> rows;
  for (double T : grid) {
    ThermalEnsemble ens = ensemble_at(cfg, T);
    Row r;
    r.T = T;
    r.n_levels = ens.level_count();
    r.n_states = ens.state_count();
    r.Z = ens.partition_function;
    r.kept = ens.kept_population;
    r.mean_e = ens.mean_energy;
    r.mean_e_full = ens.mean_energy_full;
    r.delta = 1.5 * constants::kBoltzmann_cm1_per_K * T - ens.mean_energy_full;
    rows.push_back(r);
  }
  m.stages.push_back({"ensembles", stage.seconds()});

  nlohmann::json extra;
  if (rows.size() >= 3) {
    std::vector<double> ts, ns, invt, deltas;
    for (const Row& r : rows) {
      ts.push_back(r.T);
      ns.push_back(static_cast<double>(r.n_states));
      invt.push_back(1.0 / r.T);
      deltas.push_back(r.delta);
    }
    ScalingFit nf = loglog_fit(ts, ns);
    ScalingFit df = linear_fit(invt, deltas);
    extra["states_vs_T_slope"] = nf.slope;
    extra["states_vs_T_r_squared"] = nf.r_squared;
    extra["delta_vs_invT_slope"] = df.slope;
    extra["delta_vs_invT_intercept"] = df.intercept;
    extra["delta_vs_invT_r_squared"] = df.r_squared;
    log << "levels: N_states ~ T^" << nf.slope << " (R^2 " << nf.r_squared << ")\n";
  } else {
    m.warnings.push_back("fits skipped: fewer than 3 temperatures");
  }
  m.extra = extra;

  fs::path dir(cfg.output.directory);
  fs::create_directories(dir);
  CsvWriter w((dir / "levels.csv").string(), m.config_hash);
  w.row({"temperature_K", "n_levels", "n_states", "partition_function",
         "kept_population", "mean_energy_cm1", "mean_energy_full_cm1", "delta_cm1"});
  for (const Row& r : rows)
    w.row({fmt_g17(r.T), std::to_string(r.n_levels), std::to_string(r.n_states),
           fmt_g17(r.Z), fmt_g17(r.kept), fmt_g17(r.mean_e), fmt_g17(r.mean_e_full),
           fmt_g17(r.delta)});
  finish_manifest(m, total, dir);
  log << "levels: wrote " << rows.size() << " rows\n";
}

void run_static(const RunConfig& cfg, const RunOptions& opt, std::ostream& log) {
  Stopwatch total;
  RunManifest m = start_manifest("static", cfg, opt);
  const RotorConstants rc = cfg.rotor_constants();
  const std::uint64_t seed = cfg.rpwf.master_seed;
  const int nr = cfg.rpwf.n_realizations;

  Stopwatch stage;
  ThermalEnsemble ens = ensemble_at(cfg, cfg.ensemble.temperature_K);
  StaticEvaluator ev(rc, ens);
  StaticMoments exact = ev.exact();
  m.stages.push_back({"ensemble", stage.seconds()});

  // per-state energies in enumeration order (level-major)
  std::vector<double> state_energy;
  for (const ThermalLevel& l : ens.levels)
    state_energy.insert(state_energy.end(), 2 * l.J + 1, l.energy);

  struct Row {
    int batch;
    StaticMoments mom;
    double energy;
  };
  Stopwatch rpwf_stage;
  std::vector<Row> rows;
  for (int b = 0; b < cfg.rpwf.batches; ++b) {
    Row r;
    r.batch = b;
    r.mom = ev.batch_mean(seed, b * nr, nr);
    double e = 0.0;
    for (int k = b * nr; k < (b + 1) * nr; ++k) {
      RpwfState st = sample_rpwf(ens, seed, k);
      for (int i = 0; i < st.amplitudes.size(); ++i)
        e += std::norm(st.amplitudes[i]) * state_energy[i];
    }
    r.energy = e / nr;
    rows.push_back(r);
  }
  m.stages.push_back({"rpwf_batches", rpwf_stage.seconds()});

  m.extra["exact_orientation"] = exact.orientation;
  m.extra["exact_alignment"] = exact.alignment;
  m.extra["exact_mean_energy_cm1"] = ens.mean_energy;

  fs::path dir(cfg.output.directory);
  fs::create_directories(dir);
  {
    CsvWriter w((dir / "static_exact.csv").string(), m.config_hash);
    w.row({"temperature_K", "n_levels", "n_states", "orientation", "alignment",
           "mean_energy_cm1"});
    w.row({fmt_g17(cfg.ensemble.temperature_K), std::to_string(ens.level_count()),
           std::to_string(ens.state_count()), fmt_g17(exact.orientation),
           fmt_g17(exact.alignment), fmt_g17(ens.mean_energy)});
  }
  {
    CsvWriter w((dir / "static_batches.csv").string(), m.config_hash);
    w.row({"batch", "first_realization", "n_realizations", "orientation",
           "alignment", "mean_energy_cm1"});
    for (const Row& r : rows)
      w.row({std::to_string(r.batch), std::to_string(r.batch * nr),
             std::to_string(nr), fmt_g17(r.mom.orientation),
             fmt_g17(r.mom.alignment), fmt_g17(r.energy)});
  }
  finish_manifest(m, total, dir);
  log << "static: " << rows.size() << " batches of " << nr << " realizations\n";
}

void run_dynamics(const RunConfig& cfg, const RunOptions& opt, std::ostream& log) {
  Stopwatch total;
  RunManifest m = start_manifest("dynamics", cfg, opt);
  const RotorConstants rc = cfg.rotor_constants();
  const PropagationConfig pcfg = cfg.propagation_config();
  const Pulse pulse(cfg.pulse_config());
  const bool want_exact = cfg.dynamics.mode != "rpwf";
  const bool want_rpwf = cfg.dynamics.mode != "exact";
  const bool gram = cfg.rpwf.synthesis == "gram";

  ThermalEnsemble ens = ensemble_at(cfg, cfg.ensemble.temperature_K);
  log << "dynamics: T = " << cfg.ensemble.temperature_K << " K, "
      << ens.state_count() << " states, peak field "
      << pulse.peak_field_MV_cm() << " MV/cm\n";

  m.extra["peak_field_MV_cm"] = pulse.peak_field_MV_cm();
  m.extra["realized_peak_field_MV_cm"] = realized_peak_field(pulse);
  m.extra["n_states"] = ens.state_count();

  ObservableTrace tr_exact, tr_rpwf;
  if (gram && want_rpwf) {
    Stopwatch stage;
    SynthesisResult g = rpwf_gram_run(rc, ens, pulse, pcfg, cfg.rpwf.master_seed,
                                      {{0, cfg.rpwf.n_realizations}});
    m.stages.push_back({"gram", stage.seconds()});
    tr_rpwf = g.batches[0];
    if (want_exact) tr_exact = g.exact;
  } else {
    if (want_exact) {
      Stopwatch stage;
      tr_exact = exact_ensemble_run(rc, ens, pulse, pcfg);
      m.stages.push_back({"exact", stage.seconds()});
    }
    if (want_rpwf) {
      Stopwatch stage;
      RpwfRunResult rr = rpwf_ensemble_run(rc, ens, pulse, pcfg,
                                           cfg.rpwf.master_seed,
                                           cfg.rpwf.n_realizations);
      m.stages.push_back({"rpwf", stage.seconds()});
      tr_rpwf = rr.mean;
    }
  }

  if (want_exact && want_rpwf) {
    double t_rev = epsilon_t_rev(tr_exact, m.warnings);
    if (t_rev > 0.0) {
      double eps = error_epsilon(tr_rpwf, tr_exact, t_rev);
      m.extra["epsilon"] = eps;
      m.extra["epsilon_t_rev_ps"] = t_rev;
      log << "dynamics: epsilon = " << eps << " over [0, " << t_rev << "] ps\n";
    }
  }

  fs::path dir(cfg.output.directory);
  fs::create_directories(dir);
  if (want_exact) write_trace(dir / "trace_exact.csv", m.config_hash, tr_exact);
  if (want_rpwf) write_trace(dir / "trace_rpwf.csv", m.config_hash, tr_rpwf);
  finish_manifest(m, total, dir);
}

void run_scaling(const RunConfig& cfg, const RunOptions& opt, std::ostream& log) {
  Stopwatch total;
  RunManifest m = start_manifest("scaling", cfg, opt);
  const RotorConstants rc = cfg.rotor_constants();

  StaticScanConfig sc;
  sc.temperatures_K = cfg.scan.temperatures_K.empty()
                          ? std::vector<double>{5.0, 10.0, 20.0, 50.0, 100.0}
                          : cfg.scan.temperatures_K;
  sc.realization_counts = cfg.scan.realization_counts.empty()
                              ? std::vector<int>{16, 64, 256, 1024}
                              : cfg.scan.realization_counts;
  sc.batches = cfg.rpwf.batches;
  sc.master_seed = cfg.rpwf.master_seed;
  sc.thermal = cfg.thermal_config();

  Stopwatch stage;
  std::vector<StaticScanRow> rows = static_error_scan(rc, sc);
  m.stages.push_back({"static_scan", stage.seconds()});
  log << "scaling: static scan " << rows.size() << " grid points\n";

  struct FitRow {
    std::string kind;
    std::string T;  // empty for cross-temperature rows
    ScalingFit fit;
  };
  std::vector<FitRow> fits;
  std::vector<double> alpha1, alpha2, fit_ts;
  if (sc.realization_counts.size() >= 2) {
    for (double T : sc.temperatures_K) {
      std::vector<double> x, y1, y2;
      for (const StaticScanRow& r : rows) {
        if (r.temperature_K != T) continue;
        x.push_back(static_cast<double>(r.n_realizations));
        y1.push_back(1.0 / r.mean_sq_orientation);
        y2.push_back(1.0 / r.mean_sq_alignment);
      }
      ScalingFit f1 = linear_fit(x, y1);
      ScalingFit f2 = linear_fit(x, y2);
      fits.push_back({"orientation_invsq_vs_nr", fmt_g17(T), f1});
      fits.push_back({"alignment_invsq_vs_nr", fmt_g17(T), f2});
      fit_ts.push_back(T);
      alpha1.push_back(f1.slope);
      alpha2.push_back(f2.slope);
    }
  }
  if (fit_ts.size() >= 3) {
    bool pos = true;
    for (std::size_t i = 0; i < fit_ts.size(); ++i)
      if (alpha1[i] <= 0.0 || alpha2[i] <= 0.0) pos = false;
    if (pos) {
      ScalingFit c1 = loglog_fit(fit_ts, alpha1);
      ScalingFit c2 = loglog_fit(fit_ts, alpha2);
      fits.push_back({"orientation_alpha_vs_T", "", c1});
      fits.push_back({"alignment_alpha_vs_T", "", c2});
      m.extra["orientation_alpha_slope"] = c1.slope;
      m.extra["alignment_alpha_slope"] = c2.slope;
      log << "scaling: alpha1 ~ T^" << c1.slope << ", alpha2 ~ T^" << c2.slope
          << "\n";
    } else {
      m.warnings.push_back("cross-T fit skipped: non-positive slope");
    }
  }

  // dynamic part: one eigenstate propagation per temperature, batch means
  // over realization prefixes
  struct DynRow {
    double T;
    int nr;
    double eps;
  };
  std::vector<DynRow> dyn_rows;
  std::vector<FitRow> dyn_fits;
  if (cfg.scan.dynamic) {
    const Pulse pulse(cfg.pulse_config());
    const PropagationConfig pcfg = cfg.propagation_config();
    std::vector<double> temps = cfg.scan.dynamic_temperatures_K.empty()
                                    ? std::vector<double>{10.0, 30.0, 75.0}
                                    : cfg.scan.dynamic_temperatures_K;
    std::vector<int> counts = cfg.scan.dynamic_realization_counts.empty()
                                  ? std::vector<int>{25, 100, 400, 1600}
                                  : cfg.scan.dynamic_realization_counts;
    std::vector<BatchSpec> specs;
    for (int n : counts) specs.push_back({0, n});

    Stopwatch dstage;
    for (double T : temps) {
      ThermalEnsemble ens = ensemble_at(cfg, T);
      std::uint64_t seed = derive_seed(cfg.rpwf.master_seed,
                                       0xDD00u + static_cast<std::uint64_t>(
                                                     std::llround(T * 4096.0)));
      SynthesisResult g =
          rpwf_gram_run(rc, ens, pulse, pcfg, seed, specs, false);
      double t_rev = epsilon_t_rev(g.exact, m.warnings);
      if (t_rev <= 0.0) continue;
      std::vector<double> xs, ys;
      for (std::size_t i = 0; i < counts.size(); ++i) {
        double eps = error_epsilon(g.batches[i], g.exact, t_rev);
        dyn_rows.push_back({T, counts[i], eps});
        xs.push_back(static_cast<double>(counts[i]));
        ys.push_back(eps);
      }
      if (xs.size() >= 3) {
        bool pos = true;
        for (double v : ys)
          if (v <= 0.0) pos = false;
        if (pos)
          dyn_fits.push_back({"epsilon_vs_nr", fmt_g17(T), loglog_fit(xs, ys)});
      }
      log << "scaling: dynamic T = " << T << " K done\n";
    }
    m.stages.push_back({"dynamic_scan", dstage.seconds()});

    if (temps.size() >= 3) {
      for (int n : counts) {
        std::vector<double> ts, es;
        for (const DynRow& r : dyn_rows)
          if (r.nr == n && r.eps > 0.0) {
            ts.push_back(r.T);
            es.push_back(r.eps);
          }
        if (ts.size() >= 3) {
          ScalingFit f = loglog_fit(ts, es);
          FitRow fr{"epsilon_vs_T", "", f};
          fr.T = "";
          dyn_fits.push_back(fr);
          m.extra["epsilon_vs_T_slope_nr_" + std::to_string(n)] = f.slope;
        }
      }
    }
  }

  fs::path dir(cfg.output.directory);
  fs::create_directories(dir);
  {
    CsvWriter w((dir / "static_scan.csv").string(), m.config_hash);
    w.row({"temperature_K", "n_realizations", "mean_sq_orientation",
           "mean_invsq_orientation", "mean_sq_alignment", "mean_invsq_alignment"});
    for (const StaticScanRow& r : rows)
      w.row({fmt_g17(r.temperature_K), std::to_string(r.n_realizations),
             fmt_g17(r.mean_sq_orientation), fmt_g17(r.mean_invsq_orientation),
             fmt_g17(r.mean_sq_alignment), fmt_g17(r.mean_invsq_alignment)});
  }
  {
    CsvWriter w((dir / "static_fits.csv").string(), m.config_hash);
    w.row({"kind", "temperature_K", "slope", "intercept", "r_squared"});
    for (const FitRow& f : fits)
      w.row({f.kind, f.T, fmt_g17(f.fit.slope), fmt_g17(f.fit.intercept),
             fmt_g17(f.fit.r_squared)});
  }
  if (cfg.scan.dynamic) {
    CsvWriter w((dir / "dynamic_scan.csv").string(), m.config_hash);
    w.row({"temperature_K", "n_realizations", "epsilon"});
    for (const DynRow& r : dyn_rows)
      w.row({fmt_g17(r.T), std::to_string(r.nr), fmt_g17(r.eps)});
    CsvWriter wf((dir / "dynamic_fits.csv").string(), m.config_hash);
    wf.row({"kind", "temperature_K", "slope", "intercept", "r_squared"});
    for (const FitRow& f : dyn_fits)
      wf.row({f.kind, f.T, fmt_g17(f.fit.slope), fmt_g17(f.fit.intercept),
              fmt_g17(f.fit.r_squared)});
  }
  finish_manifest(m, total, dir);
}

}  // namespace

void run_command(const std::string& command, RunConfig cfg, const RunOptions& opt,
                 std::ostream& log) {
  if (opt.seed) cfg.rpwf.master_seed = *opt.seed;
  if (opt.out_dir) cfg.output.directory = *opt.out_dir;
  cfg.validate();
  if (command == "levels")
    run_levels(cfg, opt, log);
  else if (command == "static")
    run_static(cfg, opt, log);
  else if (command == "dynamics")
    run_dynamics(cfg, opt, log);
  else if (command == "scaling")
    run_scaling(cfg, opt, log);
  else
    throw ConfigError("unknown command '" + command + "'");
}

int execute_command(const std::string& command, const std::string& config_path,
                    const RunOptions& opt, std::ostream& log, std::ostream& err) {
  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = parse_config_file(config_path);
    run_command(command, cfg, opt, log);
    return 0;
  } catch (const GuardExceeded& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const NumericalAbort& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace rotorwave
