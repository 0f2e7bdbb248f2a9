#include "topobus/qsim.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace topobus::qsim {

namespace {

constexpr int kMaxQubits = 8;
constexpr double kNormTolerance = 1e-10;
constexpr double kImpossible = 1e-12;

void check_qubit(const StateVector& s, int q, const char* where) {
  if (q < 0 || q >= s.num_qubits()) {
    std::ostringstream msg;
    msg << where << ": qubit " << q << " out of range for " << s.num_qubits() << "-qubit state";
    throw std::invalid_argument(msg.str());
  }
}

void check_pair(const StateVector& s, int i, int j, const char* where) {
  check_qubit(s, i, where);
  check_qubit(s, j, where);
  if (i == j) {
    std::ostringstream msg;
    msg << where << ": qubit pair must be distinct, got (" << i << ", " << j << ")";
    throw std::invalid_argument(msg.str());
  }
}

StateVector apply_single_qubit(const StateVector& s, int q, complex u00, complex u01,
                               complex u10, complex u11) {
  Eigen::VectorXcd amps = s.amplitudes();
  const Eigen::Index stride = Eigen::Index{1} << q;
  for (Eigen::Index base = 0; base < amps.size(); base += 2 * stride) {
    for (Eigen::Index k = 0; k < stride; ++k) {
      const complex a0 = amps[base + k];
      const complex a1 = amps[base + k + stride];
      amps[base + k] = u00 * a0 + u01 * a1;
      amps[base + k + stride] = u10 * a0 + u11 * a1;
    }
  }
  return StateVector::from_amplitudes(std::move(amps));
}

int pair_parity_bit(Eigen::Index basis, int i, int j) {
  return static_cast<int>(((basis >> i) ^ (basis >> j)) & 1);
}

}  // namespace

StateVector StateVector::product(std::span<const std::pair<complex, complex>> qubit_states) {
  const int n = static_cast<int>(qubit_states.size());
  if (n < 1) throw std::invalid_argument("StateVector: need at least one qubit");
  if (n > kMaxQubits) throw std::invalid_argument("StateVector: at most 8 qubits supported");
  for (int q = 0; q < n; ++q) {
    const auto& [alpha, beta] = qubit_states[q];
    const double norm = std::sqrt(std::norm(alpha) + std::norm(beta));
    if (std::abs(norm - 1.0) > kNormTolerance) {
      std::ostringstream msg;
      msg << "StateVector: qubit " << q << " amplitudes have norm " << norm << ", expected 1";
      throw std::invalid_argument(msg.str());
    }
  }
  Eigen::VectorXcd amps(Eigen::Index{1} << n);
  for (Eigen::Index basis = 0; basis < amps.size(); ++basis) {
    complex a = 1.0;
    for (int q = 0; q < n; ++q) {
      a *= ((basis >> q) & 1) ? qubit_states[q].second : qubit_states[q].first;
    }
    amps[basis] = a;
  }
  return StateVector(n, std::move(amps));
}

StateVector StateVector::from_amplitudes(Eigen::VectorXcd amplitudes) {
  const Eigen::Index dim = amplitudes.size();
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    throw std::invalid_argument("StateVector: amplitude count must be a power of two >= 2");
  }
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if (n > kMaxQubits) throw std::invalid_argument("StateVector: at most 8 qubits supported");
  const double norm = amplitudes.norm();
  if (std::abs(norm - 1.0) > kNormTolerance) {
    std::ostringstream msg;
    msg << "StateVector: amplitudes have norm " << norm << ", expected 1";
    throw std::invalid_argument(msg.str());
  }
  return StateVector(n, std::move(amplitudes));
}

StateVector StateVector::zero(int num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw std::invalid_argument("StateVector: qubit count must be in [1, 8]");
  }
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(Eigen::Index{1} << num_qubits);
  amps[0] = 1.0;
  return StateVector(num_qubits, std::move(amps));
}

StateVector apply_hadamard(const StateVector& s, int q) {
  check_qubit(s, q, "apply_hadamard");
  const double h = 1.0 / std::numbers::sqrt2;
  return apply_single_qubit(s, q, h, h, h, -h);
}

StateVector apply_pauli(const StateVector& s, int q, int mu) {
  check_qubit(s, q, "apply_pauli");
  switch (mu) {
    case 0: return s;
    case 1: return apply_single_qubit(s, q, 0, 1, 1, 0);
    case 2: return apply_single_qubit(s, q, 0, complex(0, -1), complex(0, 1), 0);
    case 3: return apply_single_qubit(s, q, 1, 0, 0, -1);
    default: throw std::invalid_argument("apply_pauli: mu must be in {0,1,2,3}");
  }
}

Eigen::MatrixXcd ParityProjector::matrix(int num_qubits) const {
  if (qubit_i >= num_qubits || qubit_j >= num_qubits || qubit_i < 0 || qubit_j < 0 ||
      qubit_i == qubit_j) {
    throw std::invalid_argument("ParityProjector: invalid qubit pair for register size");
  }
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  const int want = parity == Parity::even ? 0 : 1;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index basis = 0; basis < dim; ++basis) {
    if (pair_parity_bit(basis, qubit_i, qubit_j) == want) m(basis, basis) = 1.0;
  }
  return m;
}

std::pair<ParityProjector, ParityProjector> joint_parity_projectors(int i, int j) {
  if (i == j || i < 0 || j < 0) {
    throw std::invalid_argument("joint_parity_projectors: qubits must be distinct and >= 0");
  }
  return {ParityProjector{i, j, Parity::even}, ParityProjector{i, j, Parity::odd}};
}

ProjectionResult project(const StateVector& s, const Eigen::MatrixXcd& projector) {
  if (projector.rows() != s.dimension() || projector.cols() != s.dimension()) {
    throw std::invalid_argument("project: projector dimension does not match state");
  }
  const double scale = std::max(projector.cwiseAbs().maxCoeff(), 1.0);
  if ((projector - projector.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("project: operator is not Hermitian");
  }
  if ((projector * projector - projector).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("project: operator is not idempotent");
  }
  Eigen::VectorXcd projected = projector * s.amplitudes();
  ProjectionResult result;
  result.probability = projected.squaredNorm();
  if (result.probability > kImpossible) {
    result.post_state = StateVector::from_amplitudes(projected / projected.norm());
  }
  return result;
}

ProjectionResult project(const StateVector& s, const ParityProjector& projector) {
  check_pair(s, projector.qubit_i, projector.qubit_j, "project");
  const int want = projector.parity == Parity::even ? 0 : 1;
  Eigen::VectorXcd projected = s.amplitudes();
  double prob = 0.0;
  for (Eigen::Index basis = 0; basis < projected.size(); ++basis) {
    if (pair_parity_bit(basis, projector.qubit_i, projector.qubit_j) == want) {
      prob += std::norm(projected[basis]);
    } else {
      projected[basis] = 0.0;
    }
  }
  ProjectionResult result;
  result.probability = prob;
  if (prob > kImpossible) {
    result.post_state = StateVector::from_amplitudes(projected / std::sqrt(prob));
  }
  return result;
}

std::array<ProjectionResult, 2> parity_branches(const StateVector& s, int i, int j) {
  check_pair(s, i, j, "parity_branches");
  const auto [even, odd] = joint_parity_projectors(i, j);
  return {project(s, even), project(s, odd)};
}

ParityOutcome sample_parity_measurement(const StateVector& s, int i, int j, Rng& rng) {
  const auto branches = parity_branches(s, i, j);
  const double u = rng.uniform();
  const int pick = (u < branches[0].probability || !branches[1].post_state) ? 0 : 1;
  if (!branches[pick].post_state) {
    throw std::runtime_error("sample_parity_measurement: state has no valid branch");
  }
  return ParityOutcome{pick == 0 ? Parity::even : Parity::odd, branches[pick].probability,
                       *branches[pick].post_state};
}

ParityOutcome sample_parity_measurement(const StateVector& s, int i, int j,
                                        std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return sample_parity_measurement(s, i, j, rng);
}

StateVector bell_state(int mu) {
  if (mu < 0 || mu > 3) throw std::invalid_argument("bell_state: mu must be in {0,1,2,3}");
  Eigen::VectorXcd singlet = Eigen::VectorXcd::Zero(4);
  // (|01> - |10>)/sqrt(2) with |ab>: a on qubit 0, b on qubit 1.
  singlet[2] = 1.0 / std::numbers::sqrt2;
  singlet[1] = -1.0 / std::numbers::sqrt2;
  return apply_pauli(StateVector::from_amplitudes(std::move(singlet)), 1, mu);
}

int bell_outcome_mu(Parity first, Parity second) {
  if (first == Parity::odd) return second == Parity::odd ? 0 : 3;
  return second == Parity::odd ? 1 : 2;
}

std::array<BellBranch, 4> bell_branches(const StateVector& s, int i, int j) {
  check_pair(s, i, j, "bell_branches");
  std::array<BellBranch, 4> out;
  const auto first = parity_branches(s, i, j);
  for (int a = 0; a < 2; ++a) {
    const Parity pa = a == 0 ? Parity::even : Parity::odd;
    for (int b = 0; b < 2; ++b) {
      const Parity pb = b == 0 ? Parity::even : Parity::odd;
      BellBranch branch;
      branch.mu = bell_outcome_mu(pa, pb);
      branch.parity_results = {pa, pb};
      if (first[a].post_state) {
        StateVector rotated = apply_hadamard(apply_hadamard(*first[a].post_state, i), j);
        const auto second = parity_branches(rotated, i, j);
        branch.probability = first[a].probability * second[b].probability;
        if (second[b].post_state) {
          branch.post_state = apply_hadamard(apply_hadamard(*second[b].post_state, i), j);
        }
      }
      out[branch.mu] = std::move(branch);
    }
  }
  return out;
}

BellOutcome bell_measurement(const StateVector& s, int i, int j, Rng& rng) {
  // Sample the two parity outcomes sequentially so the draw order matches the
  // physical procedure (parity, H(x)H, parity, H(x)H).
  const ParityOutcome first = sample_parity_measurement(s, i, j, rng);
  StateVector rotated = apply_hadamard(apply_hadamard(first.post_state, i), j);
  const ParityOutcome second = sample_parity_measurement(rotated, i, j, rng);
  StateVector final_state = apply_hadamard(apply_hadamard(second.post_state, i), j);

  BellOutcome outcome;
  outcome.mu = bell_outcome_mu(first.parity, second.parity);
  outcome.parity_results = {first.parity, second.parity};
  outcome.probability = first.probability * second.probability;
  outcome.post_state = std::move(final_state);
  return outcome;
}

BellOutcome bell_measurement(const StateVector& s, int i, int j, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return bell_measurement(s, i, j, rng);
}

double concurrence(const StateVector& s) {
  if (s.num_qubits() != 2) throw std::invalid_argument("concurrence: state must have 2 qubits");
  const auto& a = s.amplitudes();
  return 2.0 * std::abs(a[0] * a[3] - a[1] * a[2]);
}

double fidelity(const StateVector& a, const StateVector& b) {
  if (a.dimension() != b.dimension()) {
    throw std::invalid_argument("fidelity: dimension mismatch");
  }
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

}  // namespace topobus::qsim
