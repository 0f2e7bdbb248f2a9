#pragma once

#include "topobus/rng.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <utility>

namespace topobus::qsim {

using complex = std::complex<double>;

/// Dense amplitudes of an n-qubit register, n <= 8.
///
/// Bit convention, fixed everywhere in this project:
///   * qubit 0 is the least significant bit of the basis index,
///     i.e. basis index = sum_i b_i 2^i;
///   * ket strings are written |q_{n-1} ... q_1 q_0>, most significant first;
///   * for a qubit pair (i, j), |ab> means qubit i in a and qubit j in b,
///     and pair operators written "1 (x) sigma" act with sigma on qubit j.
class StateVector {
 public:
  /// Tensor product of single-qubit states, list index = qubit index.
  /// Each (alpha, beta) must be normalized to 1e-10; throws with the
  /// offending norm otherwise.
  static StateVector product(std::span<const std::pair<complex, complex>> qubit_states);

  /// Wraps raw amplitudes (size 2^n); must be normalized to 1e-10.
  static StateVector from_amplitudes(Eigen::VectorXcd amplitudes);

  /// |0...0> on n qubits.
  static StateVector zero(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  Eigen::Index dimension() const { return amplitudes_.size(); }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  complex amplitude(Eigen::Index basis_index) const { return amplitudes_[basis_index]; }

 private:
  StateVector(int n, Eigen::VectorXcd amps) : num_qubits_(n), amplitudes_(std::move(amps)) {}

  int num_qubits_ = 0;
  Eigen::VectorXcd amplitudes_;
};

/// Hadamard on qubit q; involutive.
StateVector apply_hadamard(const StateVector& s, int q);

/// Pauli sigma_mu on qubit q, mu in {0 = 1, 1 = X, 2 = Y, 3 = Z}.
StateVector apply_pauli(const StateVector& s, int q, int mu);

enum class Parity { even, odd };

/// Projector onto the even {|00>,|11>} or odd {|01>,|10>} subspace of a
/// qubit pair, identity elsewhere.
struct ParityProjector {
  int qubit_i = 0;
  int qubit_j = 1;
  Parity parity = Parity::even;

  /// Dense matrix on an n-qubit register (diagonal 0/1).
  Eigen::MatrixXcd matrix(int num_qubits) const;
};

/// The complementary pair (even, odd) on qubits (i, j); i != j.
std::pair<ParityProjector, ParityProjector> joint_parity_projectors(int i, int j);

/// Born probability and normalized post-state; post-state absent when the
/// outcome is impossible (probability <= 1e-12).
struct ProjectionResult {
  double probability = 0.0;
  std::optional<StateVector> post_state;
};

/// Generic projective measurement branch. P must be Hermitian and
/// idempotent to 1e-10; throws std::invalid_argument otherwise.
ProjectionResult project(const StateVector& s, const Eigen::MatrixXcd& projector);

/// Fast path for parity projectors (no matrix materialization).
ProjectionResult project(const StateVector& s, const ParityProjector& projector);

struct ParityOutcome {
  Parity parity = Parity::even;
  double probability = 0.0;
  StateVector post_state = StateVector::zero(1);
};

/// Both branches of a parity measurement on (i, j), even first.
std::array<ProjectionResult, 2> parity_branches(const StateVector& s, int i, int j);

/// Samples one branch with Born probabilities; reproducible per seed/stream.
ParityOutcome sample_parity_measurement(const StateVector& s, int i, int j, Rng& rng);
ParityOutcome sample_parity_measurement(const StateVector& s, int i, int j,
                                        std::uint64_t rng_seed);

/// Bell state |Phi_mu> = (1 (x) sigma_mu)(|01> - |10>)/sqrt(2) on a 2-qubit
/// register, sigma_mu acting on qubit 1. The four states are orthonormal.
StateVector bell_state(int mu);

struct BellOutcome {
  int mu = 0;
  std::pair<Parity, Parity> parity_results{Parity::even, Parity::even};
  double probability = 0.0;
  StateVector post_state = StateVector::zero(1);
};

struct BellBranch {
  int mu = 0;
  std::pair<Parity, Parity> parity_results{Parity::even, Parity::even};
  double probability = 0.0;
  std::optional<StateVector> post_state;
};

/// Outcome pair -> mu. Each parity pair selects the unique Bell state lying
/// in both measured subspaces: the plain parity projector contains
/// {Phi_1, Phi_2} (even) / {Phi_0, Phi_3} (odd), while its Hadamard-conjugated
/// partner contains {Phi_2, Phi_3} (even) / {Phi_0, Phi_1} (odd).
int bell_outcome_mu(Parity first, Parity second);

/// All four branches of the parity/Hadamard Bell measurement on (i, j),
/// ordered mu = 0..3. Probabilities sum to 1.
std::array<BellBranch, 4> bell_branches(const StateVector& s, int i, int j);

/// Two parity measurements sandwiching H (x) H resolve the Bell basis; the
/// post-state equals the rank-1 projection onto |Phi_mu> up to global phase.
BellOutcome bell_measurement(const StateVector& s, int i, int j, Rng& rng);
BellOutcome bell_measurement(const StateVector& s, int i, int j, std::uint64_t rng_seed);

/// Two-qubit concurrence 2 |a00 a11 - a01 a10|; requires n = 2.
double concurrence(const StateVector& s);

/// |<a|b>|^2; dimensions must match.
double fidelity(const StateVector& a, const StateVector& b);

}  // namespace topobus::qsim
