// Acceptance suite: one criterion per check, one pass/fail line each.
// Exit code is the number of failed criteria.

#include "topobus/config.hpp"
#include "topobus/csv.hpp"
#include "topobus/experiments.hpp"
#include "topobus/parallel.hpp"
#include "topobus/protocol.hpp"
#include "topobus/rng.hpp"
#include "topobus/wire.hpp"

#include "minimize2d.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace topobus;
using qsim::complex;
using qsim::Parity;
using qsim::StateVector;

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s — %s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

wire::WireParameters reduced(double mu, double alpha, double vx, double delta, int n) {
  return wire::WireParameters{0.5, mu, alpha, vx, delta, static_cast<double>(n), n};
}

std::pair<complex, complex> random_qubit(Rng& rng) {
  complex a(2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
  complex b(2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
  const double norm = std::sqrt(std::norm(a) + std::norm(b));
  return {a / norm, b / norm};
}

// --- 1. phase boundary within 5% of |V_x| = sqrt(mu^2 + Delta^2) at N = 400

void criterion_phase_boundary() {
  const int n = 400;
  const double delta = 0.5, alpha = 1.0;
  const std::vector<double> mus = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> detected(mus.size(), -1.0);

  auto is_topological = [&](double mu, double vx) {
    const std::vector<double> mg{mu}, vg{vx};
    return wire::phase_diagram_scan(reduced(0, alpha, 0, delta, n), mg, vg)[0].is_topological;
  };

  parallel_for(mus.size(), [&](std::size_t k) {
    const double vc = std::sqrt(mus[k] * mus[k] + delta * delta);
    double lo = 0.6 * vc, hi = 1.8 * vc;
    if (is_topological(mus[k], lo) || !is_topological(mus[k], hi)) return;
    for (int it = 0; it < 11; ++it) {
      const double mid = 0.5 * (lo + hi);
      (is_topological(mus[k], mid) ? hi : lo) = mid;
    }
    detected[k] = 0.5 * (lo + hi);
  });

  double worst = 0.0;
  bool pass = true;
  for (std::size_t k = 0; k < mus.size(); ++k) {
    const double vc = std::sqrt(mus[k] * mus[k] + delta * delta);
    if (detected[k] < 0) {
      pass = false;
      break;
    }
    worst = std::max(worst, std::abs(detected[k] - vc) / vc);
  }
  pass = pass && worst <= 0.05;
  std::ostringstream detail;
  detail << "max |V_detected - V_analytic|/V_analytic = " << worst * 100 << "% over "
         << mus.size() << " mu points (N = " << n << ", limit 5%)";
  report(1, "topological phase boundary", pass, detail.str());
}

// --- 2. exponential protection: R^2 > 0.99 for log(splitting) vs L

void criterion_exponential_protection() {
  const auto p = reduced(0.0, 1.2, 1.0, 0.5, 100);
  const std::vector<double> lengths{40, 60, 80, 100};
  const auto samples = wire::zero_mode_splitting_vs_length(p, lengths);
  const auto fit = wire::coherence_length_fit(samples);
  bool monotone = true;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    monotone = monotone && samples[i].second < samples[i - 1].second;
  }
  const bool pass = fit.r_squared > 0.99 && monotone && fit.xi > 0;
  std::ostringstream detail;
  detail << "R^2 = " << fit.r_squared << ", xi = " << fit.xi << " sites over " << lengths.size()
         << " lengths (limit R^2 > 0.99)";
  report(2, "exponential zero-mode protection", pass, detail.str());
}

// --- 3. particle-hole symmetry for 100 random parameter sets

void criterion_particle_hole() {
  Rng rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 38);
    const auto p = reduced(4 * rng.uniform() - 2, 2 * rng.uniform(), 4 * rng.uniform() - 2,
                           rng.uniform(), n);
    const auto s = wire::diagonalize(wire::build_bdg_hamiltonian(p));
    const double scale = std::max(s.eigenvalues.cwiseAbs().maxCoeff(), 1e-300);
    const Eigen::Index dim = s.eigenvalues.size();
    for (Eigen::Index i = 0; i < dim; ++i) {
      worst = std::max(worst, std::abs(s.eigenvalues[i] + s.eigenvalues[dim - 1 - i]) / scale);
    }
  }
  std::ostringstream detail;
  detail << "max |E + E_partner| / ||H|| = " << worst << " over 100 parameter sets (limit 1e-10)";
  report(3, "particle-hole symmetric spectra", worst <= 1e-10, detail.str());
}

// --- 4. flux-qubit minima against the closed form

void criterion_flux_minima() {
  double worst = 0.0;
  for (double ratio = 0.6; ratio <= 3.0 + 1e-9; ratio += 0.2) {
    const flux::FluxQubitParameters p{1.0, ratio, 0.1, 0.5, 1.0};
    const auto closed = flux::find_minima(p);
    const auto numeric = testing::minimize_2d(
        [&](double a, double b) { return flux::josephson_potential(a, b, p); },
        -std::numbers::pi, std::numbers::pi);
    worst = std::max(worst, std::abs(std::abs(numeric.x) - closed.phi_star));
    worst = std::max(worst, std::abs(std::abs(numeric.y) - closed.phi_star));
  }
  const double phi_op = flux::find_minima({1.0, 1.25, 0.1, 0.5, 1.0}).phi_star;
  const bool pass = worst <= 1e-6 && std::abs(phi_op - 1.159279) <= 1e-6;
  std::ostringstream detail;
  detail << "max |phi*_numeric - phi*_closed| = " << worst
         << " over ej2/ej in [0.6, 3] (limit 1e-6); phi*(1.25) = " << phi_op;
  report(4, "flux-qubit minima closed form", pass, detail.str());
}

// --- 5. WKB splitting: order of magnitude plus monotonicity

void criterion_wkb() {
  const auto t = flux::wkb_tunneling_amplitude({1.0, 1.25, 0.1, 0.5, 1.0});
  const double ratio = std::exp(-t.action);
  const bool in_range = ratio < 3 * 0.02 && ratio > 0.02 / 3;

  bool monotone = true;
  double last = 1e300;
  for (double ej_over_ec : {2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0}) {
    const auto tk = flux::wkb_tunneling_amplitude({1.0, 1.25, 1.0 / ej_over_ec, 0.5, 1.0});
    monotone = monotone && tk.delta0 < last;
    last = tk.delta0;
  }
  std::ostringstream detail;
  detail << "Delta0/(h nu_a) = " << ratio << " at ej/ec = 10 (target 0.02 within x3, factor "
         << (ratio > 0.02 ? ratio / 0.02 : 0.02 / ratio) << "); strictly decreasing in ej/ec: "
         << (monotone ? "yes" : "no");
  report(5, "WKB tunneling amplitude", in_range && monotone, detail.str());
}

// --- 6. Aharonov-Casher readout formula

void criterion_aharonov_casher() {
  const flux::TunnelingResult t{0.37, std::acos(0.4), 3.0};
  Rng rng(11);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n_p = rng.uniform() < 0.5 ? 0 : 1;
    const double q_ext = 4 * rng.uniform() - 2;
    const double got = flux::flux_qubit_splitting(t, {n_p, q_ext});
    const double expect = t.delta0 * std::cos(std::numbers::pi * (n_p + q_ext) / 2.0);
    worst = std::max(worst, std::abs(got - expect));
  }
  const bool exact_zero = flux::flux_qubit_splitting(t, {1, 0.0}) == 0.0;

  const auto layout = bus::set_coupling(bus::DeviceLayout::reference_device(
                                            {1.0, 1.25, 0.1, 0.5, 1.0}), 1, true);
  const auto& pair = layout.interferometer(1).pair;
  auto basis_pair = [&](int a, int b) {
    std::vector<std::pair<complex, complex>> qs(4, {1.0, 0.0});
    qs[pair.first] = a ? std::pair<complex, complex>{0.0, 1.0}
                       : std::pair<complex, complex>{1.0, 0.0};
    qs[pair.second] = b ? std::pair<complex, complex>{0.0, 1.0}
                        : std::pair<complex, complex>{1.0, 0.0};
    return StateVector::product(qs);
  };
  Rng rng2(12);
  bus::ProtocolTrace trace;
  const auto r00 = bus::measure_joint_parity(layout, 1, basis_pair(0, 0), 0.3, rng2, trace);
  const auto r11 = bus::measure_joint_parity(layout, 1, basis_pair(1, 1), 0.3, rng2, trace);
  const bool same_splitting = r00.predicted_splitting == r11.predicted_splitting;

  std::ostringstream detail;
  detail << "max formula deviation = " << worst << "; Delta(n_p=1, q_ext=0) = "
         << flux::flux_qubit_splitting(t, {1, 0.0}) << "; |00> vs |11> splitting equal: "
         << (same_splitting ? "yes" : "no");
  report(6, "Aharonov-Casher readout", worst <= 1e-15 * t.delta0 && exact_zero && same_splitting,
         detail.str());
}

// --- 7. projector algebra as matrix identities

void criterion_projector_algebra() {
  const auto [even, odd] = qsim::joint_parity_projectors(0, 1);
  const auto p0 = even.matrix(2), p1 = odd.matrix(2);
  auto outer = [](const StateVector& s) {
    return Eigen::MatrixXcd(s.amplitudes() * s.amplitudes().adjoint());
  };
  Eigen::MatrixXcd h2(2, 2);
  h2 << 1, 1, 1, -1;
  h2 /= std::numbers::sqrt2;
  Eigen::MatrixXcd hh = Eigen::MatrixXcd::Zero(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) hh(a + 2 * b, c + 2 * d) = h2(a, c) * h2(b, d);

  double worst = 0.0;
  auto track = [&](const Eigen::MatrixXcd& m) {
    worst = std::max(worst, m.cwiseAbs().maxCoeff());
  };
  track(p0 + p1 - Eigen::MatrixXcd::Identity(4, 4));
  track(p0 * p1);
  track(p0 * p0 - p0);
  track(p1 * p1 - p1);
  track(p0 - outer(qsim::bell_state(1)) - outer(qsim::bell_state(2)));
  track(p1 - outer(qsim::bell_state(0)) - outer(qsim::bell_state(3)));
  track(hh * p0 * hh - outer(qsim::bell_state(2)) - outer(qsim::bell_state(3)));
  track(hh * p1 * hh - outer(qsim::bell_state(0)) - outer(qsim::bell_state(1)));

  std::ostringstream detail;
  detail << "max elementwise deviation over 8 identities = " << worst << " (limit 1e-12)";
  report(7, "joint-parity projector algebra", worst <= 1e-12, detail.str());
}

// --- 8. entanglement generation on the device

void criterion_entanglement() {
  const auto layout = bus::DeviceLayout::reference_device({1.0, 1.25, 0.1, 0.5, 1.0});
  bool concurrence_ok = true;
  std::set<int> branches_seen;
  int even_count = 0;
  const int runs = 10000;
  Rng seeds(2025);
  for (int run = 0; run < runs; ++run) {
    Rng rng = seeds.split(run);
    const auto result =
        bus::entangle_pair(layout, 1, {kInvSqrt2, kInvSqrt2}, {kInvSqrt2, kInvSqrt2}, rng);
    concurrence_ok = concurrence_ok && std::abs(result.concurrence - 1.0) <= 1e-10;
    branches_seen.insert(result.outcome == Parity::even ? 0 : 1);
    even_count += result.outcome == Parity::even;
  }
  const double even_frequency = static_cast<double>(even_count) / runs;
  const bool pass = concurrence_ok && branches_seen.size() == 2 &&
                    std::abs(even_frequency - 0.5) <= 0.02;
  std::ostringstream detail;
  detail << "concurrence 1 in every run: " << (concurrence_ok ? "yes" : "no")
         << "; even-branch frequency = " << even_frequency << " over " << runs
         << " runs (target 0.5 +- 0.02)";
  report(8, "entanglement generation", pass, detail.str());
}

// --- 9. teleportation fidelity on the reference layout

void criterion_teleportation() {
  const auto layout = bus::DeviceLayout::reference_device({1.0, 1.25, 0.1, 0.5, 1.0});
  Rng inputs(31415);
  double worst = 1.0;
  bool all_ok = true;

  // 1000 random inputs, sampled branches, both directions
  for (int trial = 0; trial < 1000; ++trial) {
    const auto input = random_qubit(inputs);
    for (const auto& [source, target] : {std::pair{1, 3}, std::pair{2, 0}}) {
      Rng rng = inputs.split(trial * 2 + (source == 1 ? 0 : 1));
      const auto result = bus::teleport(layout, source, target, input, rng);
      worst = std::min(worst, result.fidelity);
      all_ok = all_ok && result.fidelity >= 1.0 - 1e-12;
    }
  }

  // exhaustive branch coverage on a subset
  for (int trial = 0; trial < 50; ++trial) {
    const auto input = random_qubit(inputs);
    for (const auto prep : {Parity::even, Parity::odd}) {
      for (int mu = 0; mu < 4; ++mu) {
        bus::TeleportOptions opt;
        opt.forced_preparation_outcome = prep;
        opt.forced_bell_mu = mu;
        for (const auto& [source, target] : {std::pair{1, 3}, std::pair{2, 0}}) {
          Rng rng(0);
          const auto result = bus::teleport(layout, source, target, input, rng, opt);
          worst = std::min(worst, result.fidelity);
          all_ok = all_ok && result.fidelity >= 1.0 - 1e-12;
        }
      }
    }
  }

  std::ostringstream detail;
  detail << "min fidelity = " << worst
         << " over 1000 random inputs x {T->C, C->T} plus 50 x 8 forced branches "
            "(limit 1 - 1e-12)";
  report(9, "teleportation identity", all_ok, detail.str());
}

// --- 10. byte-identical reruns for every experiment

void criterion_determinism() {
  auto cfg = cli::parse_config(
      "[run]\nseed = 99\n"
      "[wire]\nnum_sites = 40\nlength = 40\n"
      "[scan]\nmu_points = 2\nvx_points = 2\nlengths = 30 40 50\nphi_points = 9\nq_points = 9\n"
      "[protocol]\nshots = 500\n");
  bool pass = true;
  std::string failed;
  for (const std::string sub :
       {"wire-spectrum", "phase-diagram", "majorana-splitting", "flux-potential",
        "flux-splitting", "entangle", "teleport", "bell-stats"}) {
    const auto a = cli::render_experiment(sub, cfg);
    const auto b = cli::render_experiment(sub, cfg);
    if (a != b || a.empty()) {
      pass = false;
      failed = sub;
    }
  }
  std::ostringstream detail;
  if (pass) {
    detail << "all 8 subcommands rendered twice to byte-identical output";
  } else {
    detail << "mismatch in " << failed;
  }
  report(10, "deterministic outputs", pass, detail.str());
}

}  // namespace

int main() {
  std::printf("topobus acceptance suite\n");
  criterion_phase_boundary();
  criterion_exponential_protection();
  criterion_particle_hole();
  criterion_flux_minima();
  criterion_wkb();
  criterion_aharonov_casher();
  criterion_projector_algebra();
  criterion_entanglement();
  criterion_teleportation();
  criterion_determinism();
  if (g_failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criteria FAILED\n", g_failures);
  }
  return g_failures;
}
