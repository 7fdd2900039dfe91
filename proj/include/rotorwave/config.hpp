#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rotorwave/angular.hpp"
#include "rotorwave/propagate.hpp"
#include "rotorwave/pulse.hpp"
#include "rotorwave/thermal.hpp"

namespace rotorwave {

// Run configuration, read from a flat key = value text file with dotted key
// names and '#' comments.  Unknown or duplicate keys are rejected.  Defaults
// describe SO2 driven by the weak single-cycle pulse.
struct RunConfig {
  struct Molecule {
    double A_cm1 = 2.028;
    double B_cm1 = 0.3442;
    double C_cm1 = 0.2935;
    double mu_debye = 1.62;
  } molecule;

  struct Ensemble {
    double temperature_K = 10.0;
    std::string truncation_rule = "cumulative";  // cumulative | floor
    double population_cutoff = -1.0;             // <0: rule default
    int jmax_ceiling = 120;
  } ensemble;

  struct PulseSection {
    bool has_peak_field = false;
    double peak_field_MV_cm = 0.0;
    bool has_intensity = false;
    double intensity_W_cm2 = 0.0;  // defaulted to 2e9 when neither is given
    double carrier_THz = 0.5;
    double fwhm_ps = 1.0;
    double center_ps = -6.5;
  } pulse;

  struct Propagation {
    double dt_ps = 0.002;
    double t_start_ps = -13.0;
    double t_end_ps = 121.0;
    std::string method = "split";  // split | rk4
    double sample_every_ps = 0.05;
    int j_buffer = 20;
  } propagation;

  struct Rpwf {
    int n_realizations = 100;
    std::uint64_t master_seed = 1;
    int batches = 100;
    std::string synthesis = "direct";  // direct | gram
  } rpwf;

  struct Output {
    std::string directory = "out";
    std::string format = "csv";
  } output;

  struct Dynamics {
    std::string mode = "both";  // exact | rpwf | both
  } dynamics;

  // Grid inputs for the levels and scaling subcommands; empty lists fall back
  // to per-command defaults.
  struct Scan {
    std::vector<double> temperatures_K;
    std::vector<int> realization_counts;
    bool dynamic = false;
    std::vector<double> dynamic_temperatures_K;
    std::vector<int> dynamic_realization_counts;
  } scan;

  void validate() const;  // throws ConfigError naming the offending key

  RotorConstants rotor_constants() const;
  ThermalConfig thermal_config() const;
  PulseConfig pulse_config() const;
  PropagationConfig propagation_config() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Canonical serialization: every key once, 17 significant digits, stable
// order.  parse_config_text(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const RunConfig& cfg);

double field_to_intensity_W_cm2(double field_MV_cm);

}  // namespace rotorwave
