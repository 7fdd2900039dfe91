#pragma once

// Pinned physical constants and unit conversions.  Energies are in cm^-1,
// times in ps, fields in MV/cm, dipoles in Debye throughout the code base.

namespace rotorwave::constants {

inline constexpr const char* kConstantsVersion = "codata2018/v1";
inline constexpr const char* kToolVersion = "0.1.0";

// speed of light
inline constexpr double kC_cm_per_ps = 0.0299792458;
inline constexpr double kC_m_per_s = 2.99792458e8;

// Boltzmann constant in spectroscopic units
inline constexpr double kBoltzmann_cm1_per_K = 0.695034800;

// vacuum permittivity, F/m
inline constexpr double kEps0_F_per_m = 8.8541878128e-12;

// Planck constant, J s
inline constexpr double kPlanck_J_s = 6.62607015e-34;

// 1 Debye in C m:  1 D = 1e-21 / c  (c in m/s)
inline constexpr double kDebye_C_m = 1e-21 / kC_m_per_s;

// h*c in J cm: converts cm^-1 to J
inline constexpr double kHc_J_cm = kPlanck_J_s * kC_m_per_s * 1e2;

// interaction energy of 1 Debye in a 1 MV/cm field, expressed in cm^-1
// (evaluates to 16.792 cm^-1)
inline constexpr double kDebyeMVcm_to_cm1 = kDebye_C_m * 1e8 / kHc_J_cm;

// phase advance: omega[rad/ps] = kPhase_rad_ps_per_cm1 * E[cm^-1]
inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPhase_rad_ps_per_cm1 = kTwoPi * kC_cm_per_ps;

}  // namespace rotorwave::constants
