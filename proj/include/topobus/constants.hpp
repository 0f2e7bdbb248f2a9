#pragma once

namespace topobus::constants {

// CODATA 2018.
inline constexpr double kBohrMagnetonMeVPerTesla = 5.7883818060e-2;
inline constexpr double kPlanckMeVPerGHz = 4.135667696e-3;  // h * 1 GHz in meV
inline constexpr double kHbar2Over2MeMeVnm2 = 38.099821;    // hbar^2 / (2 m_e)

}  // namespace topobus::constants
