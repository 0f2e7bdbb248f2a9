#pragma once

#include <Eigen/Dense>

#include <span>
#include <utility>
#include <vector>

namespace topobus::wire {

/// Parameters of the proximitized Rashba nanowire plus discretization
/// controls. Any consistent unit system works; the CLI converts physical
/// units (meV, nm, T) into the reduced system where the tight-binding
/// hopping t = 1/(2 m* a^2) is the energy scale and a the length scale.
struct WireParameters {
  double effective_mass = 0.5;      ///< 0.5 makes t = 1 at a = 1
  double chemical_potential = 0.0;  ///< measured from the band bottom
  double rashba = 0.0;              ///< spin-orbit strength, energy * length
  double zeeman = 0.0;              ///< V_x from the in-plane field
  double pairing = 0.0;             ///< proximity-induced gap, >= 0
  double length = 0.0;
  int num_sites = 0;  ///< >= 2

  double lattice_spacing() const { return length / num_sites; }
  double hopping() const;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Spin splitting V_x = g mu_B B / 2 in meV for B in tesla.
double zeeman_splitting(double g_factor, double b_field_tesla);

/// True in the topological phase: V_x^2 > mu^2 + Delta^2 (strict).
bool topological_phase_analytic(double mu, double pairing, double v_x);

/// Dense Nambu Hamiltonian (4N x 4N) of the wire on an open chain.
/// Basis: index = nambu * 2N + 2 * site + spin, nambu 0 = particle, 1 = hole.
/// Hermitian by construction and anticommutes exactly with the particle-hole
/// operator P = tau_x K.
Eigen::MatrixXcd build_bdg_hamiltonian(const WireParameters& p);

/// Full eigensystem of a Bogoliubov-de Gennes Hamiltonian.
struct BdGSpectrum {
  Eigen::VectorXd eigenvalues;    ///< ascending
  Eigen::MatrixXcd eigenvectors;  ///< orthonormal columns, matching order
  double gap = 0.0;               ///< smallest |E| among bulk-like states
  double zero_mode_splitting = 0.0;  ///< smallest |E| overall

  /// Finite-size ratio test: smallest |E| < threshold * next distinct |E|.
  bool has_zero_modes(double threshold = 0.1) const;

  /// Next distinct |E| above the lowest pair (the scale the ratio test
  /// compares against).
  double next_level() const;
};

/// Eigensystem of a dense Hermitian matrix, eigenvalues ascending.
/// Rejects non-Hermitian input with the measured asymmetry norm.
BdGSpectrum diagonalize(const Eigen::MatrixXcd& hamiltonian);

enum class WireEnd { left, right };

/// One self-conjugate end mode assembled from the lowest Nambu doublet.
struct MajoranaMode {
  Eigen::VectorXd site_weights;     ///< probability over sites, sums to 1
  WireEnd localization_end = WireEnd::left;
  double decay_length = 0.0;        ///< from an exponential fit of the profile
  Eigen::VectorXcd component_vector;  ///< Nambu vector, P-invariant
};

/// Combines the two lowest-|E| eigenvectors into the left/right-localized
/// self-conjugate pair. Requires zero_mode_splitting < 0.1 * next level;
/// throws std::runtime_error carrying the measured ratio otherwise.
std::pair<MajoranaMode, MajoranaMode> extract_majorana_modes(
    const BdGSpectrum& spectrum, const WireParameters& p);

/// Smallest |E| for each requested length at fixed lattice spacing
/// (num_sites rescales with length). All points must sit in the topological
/// phase per the ratio test.
std::vector<std::pair<double, double>> zero_mode_splitting_vs_length(
    const WireParameters& p, std::span<const double> lengths);

struct CoherenceFit {
  double xi = 0.0;        ///< decay length, -1/slope of log E vs L
  double r_squared = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares fit of log(E) vs L. Needs >= 3 samples with E > 0.
CoherenceFit coherence_length_fit(std::span<const std::pair<double, double>> samples);

struct PhasePoint {
  double mu = 0.0;
  double v_x = 0.0;
  double gap = 0.0;
  bool is_topological = false;
};

/// Diagonalizes the wire over the (mu, V_x) grid; points are independent and
/// evaluated in parallel, output in row-major grid order.
std::vector<PhasePoint> phase_diagram_scan(const WireParameters& base,
                                           std::span<const double> mu_grid,
                                           std::span<const double> v_x_grid);

}  // namespace topobus::wire
