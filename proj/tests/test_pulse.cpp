#include <cmath>

#include "doctest.h"
#include "rotorwave/errors.hpp"
#include "rotorwave/pulse.hpp"

using namespace rotorwave;

TEST_CASE("intensity to field conversion") {
  CHECK(intensity_to_field_MV_cm(2e9) == doctest::Approx(1.22762).epsilon(1e-4));
  CHECK(intensity_to_field_MV_cm(1e11) == doctest::Approx(8.68057).epsilon(1e-4));
  CHECK(intensity_to_field_MV_cm(0.0) == 0.0);
  // quadratic scaling
  CHECK(intensity_to_field_MV_cm(4e9) ==
        doctest::Approx(2.0 * intensity_to_field_MV_cm(1e9)).epsilon(1e-12));
}

TEST_CASE("pulse shape") {
  PulseConfig cfg;
  Pulse p(cfg);
  CHECK(p.sigma_ps() == doctest::Approx(0.6005612043932249).epsilon(1e-12));
  CHECK(p.peak_field_MV_cm() == doctest::Approx(1.22762).epsilon(1e-4));

  // envelope: peak at center, half maximum at +- fwhm/2
  CHECK(p.envelope_MV_cm(cfg.center_ps) == doctest::Approx(p.peak_field_MV_cm()));
  CHECK(p.envelope_MV_cm(cfg.center_ps + 0.5) ==
        doctest::Approx(0.5 * p.peak_field_MV_cm()).epsilon(1e-12));
  CHECK(p.envelope_MV_cm(cfg.center_ps - 0.5) ==
        doctest::Approx(0.5 * p.peak_field_MV_cm()).epsilon(1e-12));

  // carrier: node at center, crest a quarter period later
  CHECK(p.field_MV_cm(cfg.center_ps) == 0.0);
  double quarter = 0.25 / cfg.carrier_THz;
  CHECK(p.field_MV_cm(cfg.center_ps + quarter) ==
        doctest::Approx(p.envelope_MV_cm(cfg.center_ps + quarter)).epsilon(1e-12));

  // odd about the center
  for (double dt : {0.2, 0.7, 1.9, 3.3})
    CHECK(p.field_MV_cm(cfg.center_ps + dt) ==
          doctest::Approx(-p.field_MV_cm(cfg.center_ps - dt)).epsilon(1e-12));
}

TEST_CASE("pulse cutoff window") {
  PulseConfig cfg;
  Pulse p(cfg);
  double cut = cfg.cutoff_sigmas * p.sigma_ps();
  CHECK(p.start_ps() == doctest::Approx(cfg.center_ps - cut).epsilon(1e-14));
  CHECK(p.end_ps() == doctest::Approx(cfg.center_ps + cut).epsilon(1e-14));
  CHECK(p.field_MV_cm(p.end_ps() + 1e-9) == 0.0);
  CHECK(p.field_MV_cm(p.start_ps() - 1e-9) == 0.0);
  CHECK(p.envelope_MV_cm(p.end_ps() + 5.0) == 0.0);
  CHECK(!p.off_at(cfg.center_ps));
  CHECK(p.off_at(p.end_ps() + 1e-9));
  // the pulse used by the dynamics scenarios is fully over before t = 0
  CHECK(p.end_ps() < 0.0);
}

TEST_CASE("pulse config validation") {
  PulseConfig bad;
  bad.fwhm_ps = 0.0;
  CHECK_THROWS_AS(Pulse{bad}, ConfigError);
  bad = PulseConfig{};
  bad.peak_intensity_W_cm2 = -1.0;
  CHECK_THROWS_AS(Pulse{bad}, ConfigError);
  bad = PulseConfig{};
  bad.cutoff_sigmas = -2.0;
  CHECK_THROWS_AS(Pulse{bad}, ConfigError);
}
