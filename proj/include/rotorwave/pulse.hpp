#pragma once

namespace rotorwave {

// Single-cycle THz pulse: Gaussian envelope times a sine carrier, specified
// by peak intensity.  fwhm refers to the field envelope; the field is
// exactly zero outside center +- cutoff_sigmas * sigma.
struct PulseConfig {
  double peak_intensity_W_cm2 = 2e9;
  double fwhm_ps = 1.0;
  double carrier_THz = 0.5;
  double center_ps = -6.5;
  double cutoff_sigmas = 10.0;
  void validate() const;
};

// peak field E0 = sqrt(2 I / (eps0 c)) in MV/cm
double intensity_to_field_MV_cm(double intensity_W_cm2);

class Pulse {
 public:
  explicit Pulse(const PulseConfig& cfg);

  double envelope_MV_cm(double t_ps) const;
  double field_MV_cm(double t_ps) const;
  bool off_at(double t_ps) const;

  double start_ps() const { return cfg_.center_ps - cut_; }
  double end_ps() const { return cfg_.center_ps + cut_; }
  double sigma_ps() const { return sigma_; }
  double peak_field_MV_cm() const { return peak_; }
  const PulseConfig& config() const { return cfg_; }

 private:
  PulseConfig cfg_;
  double sigma_ = 0.0;
  double peak_ = 0.0;
  double cut_ = 0.0;  // cutoff_sigmas * sigma
};

}  // namespace rotorwave
