#pragma once

#include "topobus/flux_qubit.hpp"
#include "topobus/qsim.hpp"
#include "topobus/rng.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace topobus::bus {

enum class QubitKind { topological, conventional };

/// Flux-qubit interferometer reading out the joint parity of one qubit pair.
/// Coupled means parked at the flux degeneracy point (external_flux = 1/2);
/// decoupled interferometers are detuned and never touch the register.
struct Interferometer {
  int id = 0;
  std::pair<int, int> pair{0, 1};
  flux::FluxQubitParameters params;
  bool coupled = false;
};

constexpr double kCoupledFlux = 0.5;
constexpr double kDetunedFlux = 0.45;

struct DeviceLayout {
  std::vector<QubitKind> qubits;
  std::vector<Interferometer> interferometers;

  /// Four-qubit reference device: qubits {T0, T1, C2, C3} and three
  /// interferometers covering the topological-conventional (id 1, pair 1-2),
  /// topological-topological (id 2, pair 0-1) and
  /// conventional-conventional (id 3, pair 2-3) pairs, all starting detuned.
  static DeviceLayout reference_device(const flux::FluxQubitParameters& base);

  const Interferometer& interferometer(int flux_id) const;  ///< throws on unknown id
  void validate() const;
};

/// Couples (flux = 1/2) or detunes (flux = 0.45) one interferometer;
/// returns the updated layout, the input is untouched.
DeviceLayout set_coupling(DeviceLayout layout, int flux_id, bool coupled);

struct TraceStep {
  std::string op;
  std::optional<int> flux_id;
  std::optional<std::pair<int, int>> pair;
  std::optional<std::string> outcome;
  std::optional<double> probability;
  std::optional<double> splitting;  ///< predicted |Delta|, meV
  std::optional<std::string> correction;
  std::optional<std::string> note;
};

/// Ordered record of one protocol run.
struct ProtocolTrace {
  std::vector<TraceStep> steps;
};

struct ParityMeasurementRecord {
  qsim::ParityOutcome outcome;
  double predicted_splitting = 0.0;  ///< |Delta| for n_p = outcome bit
  bool readout_degenerate = false;   ///< both parities predict the same |Delta|
};

/// Joint parity measurement through a coupled interferometer. Samples the
/// Born branch on the mapped pair and annotates it with the splitting the
/// readout would see for that parity and gate charge q_ext (units of e).
ParityMeasurementRecord measure_joint_parity(const DeviceLayout& layout, int flux_id,
                                             const qsim::StateVector& state, double q_ext,
                                             Rng& rng, ProtocolTrace& trace);

/// Parity, H on both pair qubits, parity, H again; appends four trace steps.
qsim::BellOutcome bell_measurement_via_device(const DeviceLayout& layout, int flux_id,
                                              const qsim::StateVector& state, Rng& rng,
                                              ProtocolTrace& trace, double q_ext = 0.0);

struct EntangleResult {
  ProtocolTrace trace;
  qsim::StateVector state = qsim::StateVector::zero(1);  ///< register after the measurement
  qsim::Parity outcome = qsim::Parity::even;
  double probability = 0.0;
  double concurrence = 0.0;       ///< of the measured pair
};

/// Product-state preparation plus one joint-parity measurement on the
/// topological-conventional pair of the given interferometer.
EntangleResult entangle_pair(const DeviceLayout& layout, int flux_id,
                             std::pair<qsim::complex, qsim::complex> psi_t,
                             std::pair<qsim::complex, qsim::complex> psi_c, Rng& rng);

/// Pauli correction restoring the teleported state on the target, index mu of
/// the Bell outcome -> sigma index. Derived once by exhaustive enumeration
/// over the four outcomes with the singlet resource on (ancilla, target) and
/// the Bell measurement on (source, ancilla).
const std::array<int, 4>& pauli_correction_table();

enum class ResourceMode { measured, injected };

struct TeleportOptions {
  ResourceMode resource_mode = ResourceMode::measured;
  double q_ext = 0.0;
  /// Force specific branches instead of sampling (branch enumeration).
  std::optional<qsim::Parity> forced_preparation_outcome;
  std::optional<int> forced_bell_mu;
};

struct TeleportResult {
  ProtocolTrace trace;
  qsim::StateVector final_state = qsim::StateVector::zero(1);  ///< register after correction
  std::pair<qsim::complex, qsim::complex> output_qubit;  ///< state on the target
  double fidelity = 0.0;                    ///< |<input|output>|^2
  int bell_mu = 0;
  double probability = 0.0;                 ///< of the sampled/forced branches
};

/// Measurement-based teleportation of `input` from source to target. The
/// route needs an ancilla adjacent to both: the interferometer covering
/// (ancilla, target) prepares the singlet resource (or it is injected), the
/// one covering (source, ancilla) performs the Bell measurement, and the
/// table correction lands on the target. Throws when the layout offers no
/// such route.
TeleportResult teleport(const DeviceLayout& layout, int source, int target,
                        std::pair<qsim::complex, qsim::complex> input, Rng& rng,
                        const TeleportOptions& options = {});

nlohmann::ordered_json layout_json(const DeviceLayout& layout);
nlohmann::ordered_json step_json(const TraceStep& step);

/// Full trace document: {layout, seed, steps, final_state, fidelity}.
nlohmann::ordered_json trace_json(const DeviceLayout& layout, std::uint64_t seed,
                                  const ProtocolTrace& trace,
                                  const qsim::StateVector& final_state,
                                  std::optional<double> fidelity);

}  // namespace topobus::bus
