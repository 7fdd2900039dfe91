#include "rotorwave/pulse.hpp"

#include <cmath>

#include "rotorwave/constants.hpp"
#include "rotorwave/errors.hpp"

namespace rotorwave {

void PulseConfig::validate() const {
  if (peak_intensity_W_cm2 < 0.0)
    throw ConfigError("pulse: peak intensity must be non-negative");
  if (!(fwhm_ps > 0.0)) throw ConfigError("pulse: fwhm must be positive");
  if (carrier_THz < 0.0) throw ConfigError("pulse: carrier must be non-negative");
  if (!(cutoff_sigmas > 0.0))
    throw ConfigError("pulse: cutoff_sigmas must be positive");
}

double intensity_to_field_MV_cm(double intensity_W_cm2) {
  double i_W_m2 = intensity_W_cm2 * 1e4;
  double e_V_m =
      std::sqrt(2.0 * i_W_m2 / (constants::kEps0_F_per_m * constants::kC_m_per_s));
  return e_V_m * 1e-8;
}

Pulse::Pulse(const PulseConfig& cfg) : cfg_(cfg) {
  cfg.validate();
  sigma_ = cfg.fwhm_ps / (2.0 * std::sqrt(std::log(2.0)));
  peak_ = intensity_to_field_MV_cm(cfg.peak_intensity_W_cm2);
  cut_ = cfg.cutoff_sigmas * sigma_;
}

bool Pulse::off_at(double t_ps) const {
  return std::abs(t_ps - cfg_.center_ps) > cut_;
}

double Pulse::envelope_MV_cm(double t_ps) const {
  if (off_at(t_ps)) return 0.0;
  double u = (t_ps - cfg_.center_ps) / sigma_;
  return peak_ * std::exp(-u * u);
}

double Pulse::field_MV_cm(double t_ps) const {
  if (off_at(t_ps)) return 0.0;
  double u = t_ps - cfg_.center_ps;
  return envelope_MV_cm(t_ps) *
         std::sin(constants::kTwoPi * cfg_.carrier_THz * u);
}

}  // namespace rotorwave
