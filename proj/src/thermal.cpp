#include "rotorwave/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rotorwave/constants.hpp"
#include "rotorwave/errors.hpp"

namespace rotorwave {

namespace {

struct RawLevel {
  int J, tau;
  double energy;  // already shifted
  double pop;     // (2J+1) exp(-E/kT)
};

}  // namespace

void ThermalConfig::validate() const {
  if (!(temperature_K > 0.0))
    throw ConfigError("thermal: temperature must be positive");
  if (!(cumulative_cutoff > 0.0 && cumulative_cutoff < 1.0))
    throw ConfigError("thermal: cumulative_cutoff must lie in (0, 1)");
  if (!(weight_floor > 0.0 && weight_floor <= 1.0))
    throw ConfigError("thermal: weight_floor must lie in (0, 1]");
  if (jmax_step < 1) throw ConfigError("thermal: jmax_step must be >= 1");
  if (jmax_ceiling < jmax_step)
    throw ConfigError("thermal: jmax_ceiling must be >= jmax_step");
}

int ThermalEnsemble::state_count() const {
  int n = 0;
  for (const ThermalLevel& l : levels) n += 2 * l.J + 1;
  return n;
}

int ThermalEnsemble::max_kept_j() const {
  int j = 0;
  for (const ThermalLevel& l : levels) j = std::max(j, l.J);
  return j;
}

ThermalEnsemble build_thermal_ensemble(const RotorConstants& rc,
                                       const ThermalConfig& cfg) {
  rc.validate();
  cfg.validate();
  const double kT = constants::kBoltzmann_cm1_per_K * cfg.temperature_K;

  std::vector<JBlockEigen> blocks;
  auto ensure = [&](int jmax) {
    for (int J = static_cast<int>(blocks.size()); J <= jmax; ++J)
      blocks.push_back(diagonalize_jblock(J, rc));
  };

  int jmax = 0;
  for (;;) {
    if (jmax >= cfg.jmax_ceiling)
      throw GuardExceeded("thermal: enumeration Jmax would exceed ceiling " +
                          std::to_string(cfg.jmax_ceiling));
    jmax = std::min(jmax + cfg.jmax_step, cfg.jmax_ceiling);
    ensure(jmax);
    // the ground level is J=0 at exactly 0 for a physical rotor; shift anyway
    double e0 = blocks[0].energies[0];
    for (int J = 1; J <= jmax; ++J) e0 = std::min(e0, blocks[J].energies[0]);

    double z = 0.0, tail = 0.0;
    for (int J = 0; J <= jmax; ++J)
      for (int t = 0; t < 2 * J + 1; ++t) {
        double pop = (2 * J + 1) * std::exp(-(blocks[J].energies[t] - e0) / kT);
        z += pop;
        if (J == jmax) tail += pop;
      }
    if (tail > 1e-12 * z) continue;

    std::vector<RawLevel> raw;
    for (int J = 0; J <= jmax; ++J)
      for (int t = 0; t < 2 * J + 1; ++t) {
        double e = blocks[J].energies[t] - e0;
        raw.push_back({J, t + 1, e, (2 * J + 1) * std::exp(-e / kT)});
      }
    std::sort(raw.begin(), raw.end(), [](const RawLevel& a, const RawLevel& b) {
      if (a.energy != b.energy) return a.energy < b.energy;
      if (a.J != b.J) return a.J < b.J;
      return a.tau < b.tau;
    });

    std::size_t keep = 0;
    if (cfg.rule == TruncationRule::WeightFloor) {
      double ecut = -kT * std::log(cfg.weight_floor);
      while (keep < raw.size() && raw[keep].energy <= ecut) ++keep;
    } else {
      double target = (1.0 - cfg.cumulative_cutoff) * z;
      double cum = 0.0;
      while (keep < raw.size() && cum < target) cum += raw[keep++].pop;
    }
    if (keep == 0) keep = 1;

    // if truncation still wants the boundary shell, the enumeration is
    // not complete yet; grow (or give up at the ceiling)
    int max_kept_j = 0;
    for (std::size_t i = 0; i < keep; ++i) max_kept_j = std::max(max_kept_j, raw[i].J);
    if (max_kept_j >= jmax) {
      if (jmax >= cfg.jmax_ceiling)
        throw GuardExceeded("thermal: kept levels reach the Jmax ceiling " +
                            std::to_string(cfg.jmax_ceiling));
      continue;
    }

    ThermalEnsemble out;
    out.temperature_K = cfg.temperature_K;
    out.partition_function = z;
    out.jmax_used = jmax;
    for (const RawLevel& l : raw) out.mean_energy_full += l.pop * l.energy;
    out.mean_energy_full /= z;
    double kept_pop = 0.0;
    for (std::size_t i = 0; i < keep; ++i) kept_pop += raw[i].pop;
    out.kept_population = kept_pop / z;
    out.levels.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
      ThermalLevel l;
      l.J = raw[i].J;
      l.tau = raw[i].tau;
      l.energy = raw[i].energy;
      l.weight = raw[i].pop / kept_pop;
      out.mean_energy += l.weight * l.energy;
      out.levels.push_back(l);
    }
    return out;
  }
}

std::vector<EnsembleState> enumerate_states(const ThermalEnsemble& ens) {
  std::vector<EnsembleState> out;
  out.reserve(ens.state_count());
  for (const ThermalLevel& l : ens.levels) {
    double w = l.weight / (2 * l.J + 1);
    for (int M = -l.J; M <= l.J; ++M) out.push_back({l.J, l.tau, M, w});
  }
  return out;
}

}  // namespace rotorwave
