#include "topobus/flux_qubit.hpp"

#include "topobus/constants.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace topobus::flux {

namespace {

constexpr double kPi = std::numbers::pi;

// cos(pi x / 2) with exact zeros at odd integer x and exact +-1 at even x,
// so the parity dependence of the splitting is bit-exact and 4e-periodic.
double half_pi_cos(double x) {
  double r = std::fmod(x, 4.0);
  if (r < 0) r += 4.0;
  if (r == 0.0) return 1.0;
  if (r == 1.0 || r == 3.0) return 0.0;
  if (r == 2.0) return -1.0;
  return std::cos(kPi * r / 2.0);
}

double potential_gradient_norm(double phi1, double phi2, const FluxQubitParameters& p) {
  const double h = 1e-6;
  const double g1 = (josephson_potential(phi1 + h, phi2, p) -
                     josephson_potential(phi1 - h, phi2, p)) / (2 * h);
  const double g2 = (josephson_potential(phi1, phi2 + h, p) -
                     josephson_potential(phi1, phi2 - h, p)) / (2 * h);
  return std::hypot(g1, g2);
}

}  // namespace

void FluxQubitParameters::validate() const {
  if (!(ej > 0)) throw std::invalid_argument("ej must be > 0");
  if (!(ej2 > ej / 2)) throw std::invalid_argument("ej2 must exceed ej/2 for a double well");
  if (!(ec > 0)) throw std::invalid_argument("ec must be > 0");
  if (!(attempt_frequency > 0)) throw std::invalid_argument("attempt_frequency must be > 0");
}

double josephson_potential(double phi1, double phi2, const FluxQubitParameters& p) {
  const double frustration = 2.0 * kPi * p.external_flux;
  return -(std::cos(phi1) + std::cos(phi2) +
           (p.ej2 / p.ej) * std::cos(frustration - phi1 - phi2));
}

PotentialMinima find_minima(const FluxQubitParameters& p) {
  p.validate();
  if (std::abs(p.external_flux - 0.5) > 1e-12) {
    throw std::invalid_argument(
        "find_minima: requires the degeneracy point external_flux = 1/2; "
        "use the potential landscape raster for general flux");
  }
  const double ratio = p.ej / (2.0 * p.ej2);
  if (ratio >= 1.0) {
    throw std::invalid_argument("find_minima: ej2 <= ej/2 leaves a single well");
  }
  PotentialMinima m;
  m.phi_star = std::acos(ratio);
  m.minimum_a = {m.phi_star, m.phi_star};
  m.minimum_b = {-m.phi_star, -m.phi_star};
  m.value = josephson_potential(m.phi_star, m.phi_star, p);

  const double grad = std::max(potential_gradient_norm(m.minimum_a.first, m.minimum_a.second, p),
                               potential_gradient_norm(m.minimum_b.first, m.minimum_b.second, p));
  if (grad > 1e-8) {
    std::ostringstream msg;
    msg << "find_minima: stationarity check failed, |grad U/E_J| = " << grad;
    throw std::runtime_error(msg.str());
  }
  return m;
}

TunnelingResult wkb_tunneling_amplitude(const FluxQubitParameters& p) {
  const PotentialMinima minima = find_minima(p);
  const double phi_star = minima.phi_star;

  // Straight path for a phase slip across junction 1: from (phi*, phi*) to
  // the (2 pi, 0)-shifted copy of (-phi*, -phi*). The junction-3 slip is the
  // mirror image and carries the same action.
  const double d1 = 2.0 * kPi - 2.0 * phi_star;
  const double d2 = -2.0 * phi_star;
  const double path_length = std::hypot(d1, d2);

  // S = integral sqrt(2 m (U - U_min)) ds with m = 1/(8 ec) per unit phase,
  // i.e. S = (1/2) sqrt(ej/ec) * integral sqrt(v) ds in reduced units.
  const int intervals = 4096;  // composite Simpson, even count
  double integral = 0.0;
  for (int k = 0; k <= intervals; ++k) {
    const double tau = static_cast<double>(k) / intervals;
    const double v = josephson_potential(phi_star + tau * d1, phi_star + tau * d2, p) -
                     minima.value;
    const double f = std::sqrt(std::max(v, 0.0));
    const double weight = (k == 0 || k == intervals) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    integral += weight * f;
  }
  integral *= path_length / (3.0 * intervals);

  TunnelingResult result;
  result.phi_star = phi_star;
  result.action = 0.5 * std::sqrt(p.ej / p.ec) * integral;
  result.delta0 = constants::kPlanckMeVPerGHz * p.attempt_frequency * std::exp(-result.action);
  return result;
}

double aharonov_casher_phase(const ChargeConfiguration& c) {
  if (c.n_p != 0 && c.n_p != 1) throw std::invalid_argument("n_p must be 0 or 1");
  return kPi * (c.n_p + c.q_ext);
}

double flux_qubit_splitting(const TunnelingResult& t, const ChargeConfiguration& c) {
  if (c.n_p != 0 && c.n_p != 1) throw std::invalid_argument("n_p must be 0 or 1");
  return t.delta0 * half_pi_cos(c.n_p + c.q_ext);
}

int parity_readout(double measured_splitting, const TunnelingResult& t, double q_ext,
                   double noise_sigma) {
  if (noise_sigma < 0) throw std::invalid_argument("noise_sigma must be >= 0");
  const double s0 = std::abs(flux_qubit_splitting(t, {0, q_ext}));
  const double s1 = std::abs(flux_qubit_splitting(t, {1, q_ext}));
  const double separation = std::abs(s0 - s1);
  if (separation <= std::max(4.0 * noise_sigma, 1e-12 * t.delta0)) {
    std::ostringstream msg;
    msg << "parity_readout: candidate splittings indistinguishable (|" << s0 << " - " << s1
        << "| <= " << std::max(4.0 * noise_sigma, 1e-12 * t.delta0) << ")";
    throw std::runtime_error(msg.str());
  }
  return std::abs(measured_splitting - s0) <= std::abs(measured_splitting - s1) ? 0 : 1;
}

}  // namespace topobus::flux
