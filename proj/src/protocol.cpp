#include "topobus/protocol.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace topobus::bus {

namespace {

using qsim::complex;
using qsim::Parity;
using qsim::StateVector;

const char* parity_name(Parity p) { return p == Parity::even ? "even" : "odd"; }

Eigen::Matrix2cd pauli_matrix(int mu) {
  Eigen::Matrix2cd m;
  switch (mu) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, complex(0, -1), complex(0, 1), 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli_matrix: mu must be in {0,1,2,3}");
  }
  return m;
}

bool covers(const Interferometer& itf, int a, int b) {
  return (itf.pair.first == a && itf.pair.second == b) ||
         (itf.pair.first == b && itf.pair.second == a);
}

// Predicted readout splitting for a parity bit, plus the degeneracy flag.
struct SplittingInfo {
  double value = 0.0;
  bool degenerate = false;
};

SplittingInfo predicted_splitting(const flux::FluxQubitParameters& params, int n_p,
                                  double q_ext) {
  const flux::TunnelingResult wkb = flux::wkb_tunneling_amplitude(params);
  SplittingInfo info;
  info.value = std::abs(flux::flux_qubit_splitting(wkb, {n_p, q_ext}));
  const double other = std::abs(flux::flux_qubit_splitting(wkb, {1 - n_p, q_ext}));
  info.degenerate = std::abs(info.value - other) <= 1e-9 * wkb.delta0;
  return info;
}

void push_coupling_step(ProtocolTrace& trace, const Interferometer& itf, bool coupled) {
  TraceStep step;
  step.op = coupled ? "couple_interferometer" : "decouple_interferometer";
  step.flux_id = itf.id;
  step.pair = itf.pair;
  trace.steps.push_back(std::move(step));
}

// One parity stage of a device measurement: either sampled or forced.
qsim::ParityOutcome parity_stage(const Interferometer& itf, const StateVector& state,
                                 double q_ext, Rng* rng, std::optional<Parity> forced,
                                 ProtocolTrace& trace) {
  if (!itf.coupled) {
    std::ostringstream msg;
    msg << "measure_joint_parity: interferometer " << itf.id << " decoupled";
    throw std::runtime_error(msg.str());
  }
  qsim::ParityOutcome outcome;
  if (forced) {
    const auto branches = qsim::parity_branches(state, itf.pair.first, itf.pair.second);
    const int pick = *forced == Parity::even ? 0 : 1;
    if (!branches[pick].post_state) {
      throw std::runtime_error("forced parity branch has zero probability");
    }
    outcome = {*forced, branches[pick].probability, *branches[pick].post_state};
  } else {
    outcome = qsim::sample_parity_measurement(state, itf.pair.first, itf.pair.second, *rng);
  }

  const SplittingInfo info =
      predicted_splitting(itf.params, outcome.parity == Parity::odd ? 1 : 0, q_ext);
  TraceStep step;
  step.op = "measure_joint_parity";
  step.flux_id = itf.id;
  step.pair = itf.pair;
  step.outcome = parity_name(outcome.parity);
  step.probability = outcome.probability;
  step.splitting = info.value;
  if (info.degenerate) step.note = "readout degenerate";
  trace.steps.push_back(std::move(step));
  return outcome;
}

void push_hadamard_step(ProtocolTrace& trace, const Interferometer& itf) {
  TraceStep step;
  step.op = "hadamard_pair";
  step.pair = itf.pair;
  trace.steps.push_back(std::move(step));
}

const Interferometer& coupled_interferometer(const DeviceLayout& layout, int flux_id,
                                             const char* where) {
  const Interferometer& itf = layout.interferometer(flux_id);
  if (!itf.coupled) {
    std::ostringstream msg;
    msg << where << ": interferometer " << flux_id << " decoupled";
    throw std::runtime_error(msg.str());
  }
  return itf;
}

qsim::BellOutcome device_bell_impl(const DeviceLayout& layout, int flux_id,
                                   const StateVector& state, double q_ext, Rng* rng,
                                   std::optional<int> forced_mu, ProtocolTrace& trace) {
  const Interferometer& itf = coupled_interferometer(layout, flux_id, "bell_measurement");
  const int i = itf.pair.first, j = itf.pair.second;

  std::optional<Parity> force_first, force_second;
  if (forced_mu) {
    // Inverse of the outcome table.
    static constexpr std::pair<Parity, Parity> kParities[4] = {
        {Parity::odd, Parity::odd},
        {Parity::even, Parity::odd},
        {Parity::even, Parity::even},
        {Parity::odd, Parity::even}};
    force_first = kParities[*forced_mu].first;
    force_second = kParities[*forced_mu].second;
  }

  const qsim::ParityOutcome first = parity_stage(itf, state, q_ext, rng, force_first, trace);
  StateVector rotated = qsim::apply_hadamard(qsim::apply_hadamard(first.post_state, i), j);
  push_hadamard_step(trace, itf);
  const qsim::ParityOutcome second = parity_stage(itf, rotated, q_ext, rng, force_second, trace);
  StateVector final_state =
      qsim::apply_hadamard(qsim::apply_hadamard(second.post_state, i), j);
  push_hadamard_step(trace, itf);

  qsim::BellOutcome outcome;
  outcome.mu = qsim::bell_outcome_mu(first.parity, second.parity);
  outcome.parity_results = {first.parity, second.parity};
  outcome.probability = first.probability * second.probability;
  outcome.post_state = std::move(final_state);
  return outcome;
}

// Basis index with the bit of qubit q removed.
Eigen::Index drop_bit(Eigen::Index basis, int q) {
  const Eigen::Index low = basis & ((Eigen::Index{1} << q) - 1);
  return low | ((basis >> (q + 1)) << q);
}

std::pair<complex, complex> extract_qubit_state(const StateVector& s, int q) {
  const Eigen::Index rest = s.dimension() / 2;
  Eigen::MatrixXcd m(2, rest);
  for (Eigen::Index basis = 0; basis < s.dimension(); ++basis) {
    m((basis >> q) & 1, drop_bit(basis, q)) = s.amplitude(basis);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU);
  if (svd.singularValues()[1] > 1e-8) {
    throw std::runtime_error("extract_qubit_state: qubit is entangled with the rest");
  }
  return {svd.matrixU()(0, 0), svd.matrixU()(1, 0)};
}

double pair_fidelity(std::pair<complex, complex> a, std::pair<complex, complex> b) {
  return std::norm(std::conj(a.first) * b.first + std::conj(a.second) * b.second);
}

}  // namespace

DeviceLayout DeviceLayout::reference_device(const flux::FluxQubitParameters& base) {
  flux::FluxQubitParameters detuned = base;
  detuned.external_flux = kDetunedFlux;
  DeviceLayout layout;
  layout.qubits = {QubitKind::topological, QubitKind::topological, QubitKind::conventional,
                   QubitKind::conventional};
  layout.interferometers = {Interferometer{1, {1, 2}, detuned, false},
                            Interferometer{2, {0, 1}, detuned, false},
                            Interferometer{3, {2, 3}, detuned, false}};
  layout.validate();
  return layout;
}

const Interferometer& DeviceLayout::interferometer(int flux_id) const {
  for (const auto& itf : interferometers) {
    if (itf.id == flux_id) return itf;
  }
  std::ostringstream msg;
  msg << "unknown flux qubit id " << flux_id;
  throw std::invalid_argument(msg.str());
}

void DeviceLayout::validate() const {
  const int n = static_cast<int>(qubits.size());
  for (const auto& itf : interferometers) {
    if (itf.pair.first == itf.pair.second || itf.pair.first < 0 || itf.pair.second < 0 ||
        itf.pair.first >= n || itf.pair.second >= n) {
      std::ostringstream msg;
      msg << "interferometer " << itf.id << " references invalid qubit pair ("
          << itf.pair.first << ", " << itf.pair.second << ")";
      throw std::invalid_argument(msg.str());
    }
    if (std::count_if(interferometers.begin(), interferometers.end(),
                      [&](const auto& other) { return other.id == itf.id; }) != 1) {
      throw std::invalid_argument("duplicate flux qubit id");
    }
  }
}

DeviceLayout set_coupling(DeviceLayout layout, int flux_id, bool coupled) {
  for (auto& itf : layout.interferometers) {
    if (itf.id == flux_id) {
      itf.coupled = coupled;
      itf.params.external_flux = coupled ? kCoupledFlux : kDetunedFlux;
      return layout;
    }
  }
  std::ostringstream msg;
  msg << "unknown flux qubit id " << flux_id;
  throw std::invalid_argument(msg.str());
}

ParityMeasurementRecord measure_joint_parity(const DeviceLayout& layout, int flux_id,
                                             const StateVector& state, double q_ext, Rng& rng,
                                             ProtocolTrace& trace) {
  const Interferometer& itf = coupled_interferometer(layout, flux_id, "measure_joint_parity");
  const qsim::ParityOutcome outcome = parity_stage(itf, state, q_ext, &rng, std::nullopt, trace);
  const TraceStep& step = trace.steps.back();
  ParityMeasurementRecord record{outcome, *step.splitting, step.note.has_value()};
  return record;
}

qsim::BellOutcome bell_measurement_via_device(const DeviceLayout& layout, int flux_id,
                                              const StateVector& state, Rng& rng,
                                              ProtocolTrace& trace, double q_ext) {
  return device_bell_impl(layout, flux_id, state, q_ext, &rng, std::nullopt, trace);
}

EntangleResult entangle_pair(const DeviceLayout& layout, int flux_id,
                             std::pair<complex, complex> psi_t,
                             std::pair<complex, complex> psi_c, Rng& rng) {
  layout.validate();
  const Interferometer& itf = layout.interferometer(flux_id);
  const QubitKind kind_first = layout.qubits[itf.pair.first];
  const QubitKind kind_second = layout.qubits[itf.pair.second];
  if (kind_first == kind_second) {
    throw std::invalid_argument(
        "entangle_pair: interferometer must couple a topological-conventional pair");
  }
  const int q_top = kind_first == QubitKind::topological ? itf.pair.first : itf.pair.second;
  const int q_conv = q_top == itf.pair.first ? itf.pair.second : itf.pair.first;

  std::vector<std::pair<complex, complex>> qubit_states(layout.qubits.size(), {1.0, 0.0});
  qubit_states[q_top] = psi_t;
  qubit_states[q_conv] = psi_c;
  StateVector state = StateVector::product(qubit_states);

  EntangleResult result;
  DeviceLayout active = set_coupling(layout, flux_id, true);
  push_coupling_step(result.trace, active.interferometer(flux_id), true);
  const ParityMeasurementRecord record =
      measure_joint_parity(active, flux_id, state, 0.0, rng, result.trace);
  active = set_coupling(active, flux_id, false);
  push_coupling_step(result.trace, active.interferometer(flux_id), false);

  // The untouched qubits stay in |0>, so the pair state is the slice over
  // the pair bits.
  Eigen::VectorXcd pair_amps(4);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      pair_amps[a + 2 * b] = record.outcome.post_state.amplitude(
          (Eigen::Index{a} << itf.pair.first) | (Eigen::Index{b} << itf.pair.second));
    }
  }
  if (std::abs(pair_amps.norm() - 1.0) > 1e-9) {
    throw std::runtime_error("entangle_pair: spectator qubits are no longer in |0>");
  }

  result.state = record.outcome.post_state;
  result.outcome = record.outcome.parity;
  result.probability = record.outcome.probability;
  result.concurrence = qsim::concurrence(StateVector::from_amplitudes(pair_amps));
  return result;
}

const std::array<int, 4>& pauli_correction_table() {
  static const std::array<int, 4> table = [] {
    // Three-qubit enumeration register: source 0, ancilla 1, target 2, with
    // the singlet resource on (ancilla, target). M_mu maps the input qubit to
    // the conditional target state; the correction is the unique Pauli with
    // sigma_c M_mu proportional to the identity.
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    std::array<int, 4> out{};
    for (int mu = 0; mu < 4; ++mu) {
      Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
      const StateVector phi = qsim::bell_state(mu);  // pair (source, ancilla)
      for (int b = 0; b < 2; ++b) {
        Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(8);
        amps[b + 0 + 4] = inv_sqrt2;   // |b>_S |0>_A |1>_T
        amps[b + 2 + 0] = -inv_sqrt2;  // |b>_S |1>_A |0>_T
        for (int t = 0; t < 2; ++t) {
          complex sum = 0.0;
          for (int sa = 0; sa < 4; ++sa) {
            sum += std::conj(phi.amplitude(sa)) * amps[sa + 4 * t];
          }
          m(t, b) = sum;
        }
      }
      int found = -1;
      for (int c = 0; c < 4; ++c) {
        const Eigen::Matrix2cd k = pauli_matrix(c) * m;
        if (std::abs(k(0, 1)) < 1e-12 && std::abs(k(1, 0)) < 1e-12 &&
            std::abs(k(0, 0) - k(1, 1)) < 1e-12 && std::abs(k(0, 0)) > 0.1) {
          found = c;
          break;
        }
      }
      if (found < 0) throw std::logic_error("pauli_correction_table: no Pauli restores input");
      out[mu] = found;
    }
    return out;
  }();
  return table;
}

TeleportResult teleport(const DeviceLayout& layout, int source, int target,
                        std::pair<complex, complex> input, Rng& rng,
                        const TeleportOptions& options) {
  layout.validate();
  const int n = static_cast<int>(layout.qubits.size());
  if (source < 0 || source >= n || target < 0 || target >= n || source == target) {
    throw std::invalid_argument("teleport: invalid source/target qubits");
  }
  const double input_norm = std::sqrt(std::norm(input.first) + std::norm(input.second));
  if (std::abs(input_norm - 1.0) > 1e-10) {
    throw std::invalid_argument("teleport: input state must be normalized");
  }

  // Route: ancilla adjacent to both endpoints.
  int ancilla = -1, prep_flux = -1, bell_flux = -1;
  for (int q = 0; q < n && ancilla < 0; ++q) {
    if (q == source || q == target) continue;
    int prep = -1, bell = -1;
    for (const auto& itf : layout.interferometers) {
      if (covers(itf, q, target)) prep = itf.id;
      if (covers(itf, source, q)) bell = itf.id;
    }
    if (prep >= 0 && bell >= 0) {
      ancilla = q;
      prep_flux = prep;
      bell_flux = bell;
    }
  }
  if (ancilla < 0) {
    throw std::runtime_error(
        "teleport: no interferometer route provides a resource pair between an ancilla "
        "and the target");
  }

  TeleportResult result;
  DeviceLayout active = layout;
  StateVector state = StateVector::zero(n);

  if (options.resource_mode == ResourceMode::injected) {
    // |input>_S (x) singlet_(A,T) (x) |0...0>
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
    for (int bs = 0; bs < 2; ++bs) {
      const complex amp_s = bs ? input.second : input.first;
      amps[(Eigen::Index{bs} << source) | (Eigen::Index{1} << target)] += amp_s * inv_sqrt2;
      amps[(Eigen::Index{bs} << source) | (Eigen::Index{1} << ancilla)] -= amp_s * inv_sqrt2;
    }
    state = StateVector::from_amplitudes(std::move(amps));
    TraceStep step;
    step.op = "inject_resource_singlet";
    step.pair = {ancilla, target};
    result.trace.steps.push_back(std::move(step));
    result.probability = 1.0;
  } else {
    // Prepare the singlet by a parity measurement on balanced states plus a
    // deterministic outcome-dependent fix-up on the target.
    std::vector<std::pair<complex, complex>> qubit_states(n, {1.0, 0.0});
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    qubit_states[source] = input;
    qubit_states[ancilla] = {inv_sqrt2, inv_sqrt2};
    qubit_states[target] = {inv_sqrt2, inv_sqrt2};
    state = StateVector::product(qubit_states);

    active = set_coupling(active, prep_flux, true);
    push_coupling_step(result.trace, active.interferometer(prep_flux), true);
    const qsim::ParityOutcome prep =
        parity_stage(active.interferometer(prep_flux), state, options.q_ext,
                     options.forced_preparation_outcome ? nullptr : &rng,
                     options.forced_preparation_outcome, result.trace);
    state = prep.post_state;
    result.probability = prep.probability;

    // Even branch (|00>+|11>)/sqrt(2): X then Z on the target gives the
    // singlet; odd branch (|01>+|10>)/sqrt(2): Z on the target suffices.
    std::vector<int> fixups =
        prep.parity == Parity::even ? std::vector<int>{1, 3} : std::vector<int>{3};
    for (int mu : fixups) {
      state = qsim::apply_pauli(state, target, mu);
      TraceStep step;
      step.op = "resource_fixup";
      step.pair = {ancilla, target};
      step.correction = "sigma_" + std::to_string(mu);
      result.trace.steps.push_back(std::move(step));
    }
    active = set_coupling(active, prep_flux, false);
    push_coupling_step(result.trace, active.interferometer(prep_flux), false);
  }

  active = set_coupling(active, bell_flux, true);
  push_coupling_step(result.trace, active.interferometer(bell_flux), true);
  const qsim::BellOutcome bell = device_bell_impl(
      active, bell_flux, state, options.q_ext,
      options.forced_bell_mu ? nullptr : &rng, options.forced_bell_mu, result.trace);
  active = set_coupling(active, bell_flux, false);
  push_coupling_step(result.trace, active.interferometer(bell_flux), false);
  result.probability *= bell.probability;
  result.bell_mu = bell.mu;

  // The Bell measurement on (source, ancilla) and the resource orientation
  // (ancilla, target) match the enumeration behind the correction table.
  const int correction = pauli_correction_table()[bell.mu];
  StateVector corrected = qsim::apply_pauli(bell.post_state, target, correction);
  TraceStep step;
  step.op = "pauli_correction";
  step.pair = {ancilla, target};
  step.outcome = "mu=" + std::to_string(bell.mu);
  step.correction = "sigma_" + std::to_string(correction);
  result.trace.steps.push_back(std::move(step));

  result.final_state = corrected;
  result.output_qubit = extract_qubit_state(corrected, target);
  result.fidelity = pair_fidelity(input, result.output_qubit);
  return result;
}

nlohmann::ordered_json layout_json(const DeviceLayout& layout) {
  nlohmann::ordered_json qubits = nlohmann::ordered_json::array();
  for (std::size_t q = 0; q < layout.qubits.size(); ++q) {
    qubits.push_back({{"id", q},
                      {"kind", layout.qubits[q] == QubitKind::topological ? "topological"
                                                                          : "conventional"}});
  }
  nlohmann::ordered_json itfs = nlohmann::ordered_json::array();
  for (const auto& itf : layout.interferometers) {
    itfs.push_back({{"id", itf.id},
                    {"pair", {itf.pair.first, itf.pair.second}},
                    {"coupled", itf.coupled},
                    {"external_flux", itf.params.external_flux}});
  }
  return {{"qubits", qubits}, {"interferometers", itfs}};
}

nlohmann::ordered_json step_json(const TraceStep& step) {
  nlohmann::ordered_json j;
  j["op"] = step.op;
  j["flux_id"] = step.flux_id ? nlohmann::ordered_json(*step.flux_id) : nullptr;
  j["pair"] = step.pair ? nlohmann::ordered_json({step.pair->first, step.pair->second})
                        : nullptr;
  j["outcome"] = step.outcome ? nlohmann::ordered_json(*step.outcome) : nullptr;
  j["probability"] = step.probability ? nlohmann::ordered_json(*step.probability) : nullptr;
  j["splitting"] = step.splitting ? nlohmann::ordered_json(*step.splitting) : nullptr;
  j["correction"] = step.correction ? nlohmann::ordered_json(*step.correction) : nullptr;
  if (step.note) j["note"] = *step.note;
  return j;
}

nlohmann::ordered_json trace_json(const DeviceLayout& layout, std::uint64_t seed,
                                  const ProtocolTrace& trace, const StateVector& final_state,
                                  std::optional<double> fidelity) {
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (const auto& step : trace.steps) steps.push_back(step_json(step));
  nlohmann::ordered_json amps = nlohmann::ordered_json::array();
  for (Eigen::Index k = 0; k < final_state.dimension(); ++k) {
    amps.push_back({final_state.amplitude(k).real(), final_state.amplitude(k).imag()});
  }
  return {{"layout", layout_json(layout)},
          {"seed", seed},
          {"steps", steps},
          {"final_state", amps},
          {"fidelity", fidelity ? nlohmann::ordered_json(*fidelity) : nullptr}};
}

}  // namespace topobus::bus
