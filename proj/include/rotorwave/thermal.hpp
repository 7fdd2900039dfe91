#pragma once

#include <vector>

#include "rotorwave/angular.hpp"

namespace rotorwave {

// How the Boltzmann-weighted level set is truncated.  Truncation is level
// granular: a (J, tau) level is kept or dropped with its whole 2J+1
// M multiplet, which keeps the field-free thermal averages <cos(theta)> = 0
// and <cos^2(theta)> = 1/3 exact.
enum class TruncationRule {
  CumulativePopulation,  // keep the lowest levels until >= 1 - cutoff of Z
  WeightFloor,           // keep levels with exp(-(E - E0)/kT) >= floor
};

struct ThermalConfig {
  double temperature_K = 40.0;
  TruncationRule rule = TruncationRule::CumulativePopulation;
  double cumulative_cutoff = 1e-3;
  double weight_floor = 1.0 / 3.0;
  int jmax_step = 5;      // enumeration grows in steps of this
  int jmax_ceiling = 120; // GuardExceeded beyond this
  void validate() const;
};

// one rotational level; weight is the population of the whole M multiplet,
// renormalized so kept weights sum to 1
struct ThermalLevel {
  int J = 0;
  int tau = 1;
  double energy = 0.0;  // cm^-1, shifted so the ground level sits at 0
  double weight = 0.0;
};

struct ThermalEnsemble {
  double temperature_K = 0.0;
  double partition_function = 0.0;  // over the converged enumeration
  double kept_population = 0.0;     // kept fraction of the partition function
  double mean_energy = 0.0;         // cm^-1 over the kept, renormalized set
  double mean_energy_full = 0.0;    // cm^-1 over the whole converged enumeration
  int jmax_used = 0;                // enumeration went up to this J
  std::vector<ThermalLevel> levels; // ascending energy, ties by (J, tau)

  int level_count() const { return static_cast<int>(levels.size()); }
  int state_count() const;          // sum of 2J+1 over kept levels
  int max_kept_j() const;
};

// Enumerates levels by growing Jmax in steps until the thermal tail is
// negligible, then applies the truncation rule.  Throws GuardExceeded if the
// enumeration would pass the ceiling.
ThermalEnsemble build_thermal_ensemble(const RotorConstants& rc,
                                       const ThermalConfig& cfg);

// one thermally populated |J tau M> with its per-state weight
struct EnsembleState {
  int J = 0;
  int tau = 1;
  int M = 0;
  double weight = 0.0;
};

// flattened kept states, level order preserved, M = -J..J inside a level;
// per-state weight is the level weight / (2J+1)
std::vector<EnsembleState> enumerate_states(const ThermalEnsemble& ens);

}  // namespace rotorwave
