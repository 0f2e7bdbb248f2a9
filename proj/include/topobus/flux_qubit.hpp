#pragma once

#include <utility>

namespace topobus::flux {

/// Three-junction flux qubit with left-right symmetric outer junctions
/// (E_J1 = E_J3 = ej). Energies may be in any common unit; only the ratios
/// ej2/ej and ej/ec enter the landscape and the tunneling action. The
/// attempt frequency is in GHz, so tunneling amplitudes come out in meV.
struct FluxQubitParameters {
  double ej = 1.0;
  double ej2 = 1.25;              ///< middle junction, > ej/2 for a double well
  double ec = 0.1;                ///< island charging energy
  double external_flux = 0.5;     ///< in units of Phi_0 = h/2e
  double attempt_frequency = 1.0; ///< GHz

  void validate() const;  ///< throws std::invalid_argument naming the field
};

/// Charge enclosed by the interfering fluxon paths: q = e n_p + q_ext.
struct ChargeConfiguration {
  int n_p = 0;        ///< fermion parity bit, 0 or 1
  double q_ext = 0.0; ///< induced gate charge in units of e
};

struct TunnelingResult {
  double delta0 = 0.0;    ///< bare amplitude h nu_a exp(-S), meV for nu_a in GHz
  double phi_star = 0.0;  ///< arccos(ej / (2 ej2)), radians
  double action = 0.0;    ///< dimensionless WKB exponent S
};

/// Total Josephson energy in units of E_J:
/// -[cos p1 + cos p2 + (ej2/ej) cos(2 pi flux - p1 - p2)].
double josephson_potential(double phi1, double phi2, const FluxQubitParameters& p);

struct PotentialMinima {
  std::pair<double, double> minimum_a;  ///< (+phi*, +phi*)
  std::pair<double, double> minimum_b;  ///< (-phi*, -phi*)
  double phi_star = 0.0;
  double value = 0.0;  ///< common potential value in units of E_J
};

/// Degenerate current-carrying minima at the flux degeneracy point
/// (external_flux = 1/2). Throws when ej2 <= ej/2 (single well) or away from
/// the degeneracy point (use the landscape raster for general flux).
PotentialMinima find_minima(const FluxQubitParameters& p);

/// 1-D WKB amplitude for a single outer-junction phase slip between adjacent
/// minima, with effective mass 1/(8 ec) per unit phase along the straight
/// path. Left-right junction symmetry makes the two slip paths equivalent.
TunnelingResult wkb_tunneling_amplitude(const FluxQubitParameters& p);

/// Aharonov-Casher phase pi * q / e = pi * (n_p + q_ext / e), radians.
double aharonov_casher_phase(const ChargeConfiguration& c);

/// Interference-modulated splitting Delta = Delta_0 cos(phi_AC / 2).
/// Signed; |Delta| is the observable gap between the |+-> states. Exactly
/// zero when n_p + q_ext/e is an odd integer.
double flux_qubit_splitting(const TunnelingResult& t, const ChargeConfiguration& c);

/// Infers the parity whose predicted splitting is closest to the measured
/// one. Requires the two candidates to differ by more than 4 * noise_sigma;
/// throws std::runtime_error when they are indistinguishable.
int parity_readout(double measured_splitting, const TunnelingResult& t, double q_ext,
                   double noise_sigma);

}  // namespace topobus::flux
