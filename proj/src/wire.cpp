#include "topobus/wire.hpp"

#include "topobus/constants.hpp"
#include "topobus/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace topobus::wire {

namespace {

using complex = std::complex<double>;

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = fit.intercept + fit.slope * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - my) * (ys[i] - my);
  }
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

// Particle-hole conjugation P = tau_x K on a Nambu vector.
Eigen::VectorXcd ph_conjugate(const Eigen::VectorXcd& v) {
  const Eigen::Index half = v.size() / 2;
  Eigen::VectorXcd out(v.size());
  out.head(half) = v.tail(half).conjugate();
  out.tail(half) = v.head(half).conjugate();
  return out;
}

// Site density of a Nambu vector: sum over spin and particle/hole components.
Eigen::VectorXd site_profile(const Eigen::VectorXcd& v, int num_sites) {
  Eigen::VectorXd rho = Eigen::VectorXd::Zero(num_sites);
  const int two_n = 2 * num_sites;
  for (int j = 0; j < num_sites; ++j) {
    for (int s = 0; s < 2; ++s) {
      rho[j] += std::norm(v[2 * j + s]) + std::norm(v[two_n + 2 * j + s]);
    }
  }
  const double total = rho.sum();
  if (total > 0) rho /= total;
  return rho;
}

// Decay length of an end-localized density profile. Bins the profile from
// the peak toward the wire middle to wash out Fermi oscillations, then fits
// log(bin mass) vs position; density ~ exp(-2x/xi) gives xi = -2/slope.
double profile_decay_length(const Eigen::VectorXd& rho, double spacing, bool from_left) {
  const int n = static_cast<int>(rho.size());
  Eigen::VectorXd p = rho;
  if (!from_left) p.reverseInPlace();

  int peak = 0;
  p.maxCoeff(&peak);
  const int stop = n / 2;
  const int bin = 4;
  std::vector<double> xs, ys;
  const double peak_mass = p.segment(peak, std::min(bin, n - peak)).sum();
  for (int j = peak; j + bin <= stop; j += bin) {
    const double mass = p.segment(j, bin).sum();
    // Fit only the dominant decay: stop after 8 decades so subleading
    // evanescent channels and the numerical floor do not skew the slope.
    if (mass <= 0 || mass < peak_mass * 1e-8) break;
    xs.push_back(spacing * (j + 0.5 * (bin - 1)));
    ys.push_back(std::log(mass));
  }
  if (xs.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  const LineFit fit = fit_line(xs, ys);
  return fit.slope < 0 ? -2.0 / fit.slope : std::numeric_limits<double>::quiet_NaN();
}

// Level classification shared by the full and values-only paths.
double next_distinct_abs(const Eigen::VectorXd& eigenvalues) {
  std::vector<double> abs_e(eigenvalues.size());
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) abs_e[i] = std::abs(eigenvalues[i]);
  std::sort(abs_e.begin(), abs_e.end());
  // Spectra come in +-E pairs, so the lowest |E| occupies two slots.
  return abs_e[std::min<std::size_t>(2, abs_e.size() - 1)];
}

struct LevelSummary {
  double zero_mode_splitting = 0.0;
  double next_level = 0.0;
  double gap = 0.0;
  bool zero_modes = false;
};

LevelSummary summarize_levels(const Eigen::VectorXd& eigenvalues) {
  LevelSummary s;
  s.zero_mode_splitting = eigenvalues.cwiseAbs().minCoeff();
  s.next_level = next_distinct_abs(eigenvalues);
  s.zero_modes = s.zero_mode_splitting < 0.1 * s.next_level;
  s.gap = s.zero_modes ? s.next_level : s.zero_mode_splitting;
  return s;
}

// Eigenvalues of the wire Hamiltonian without the eigenvector cost; scans
// only need level positions.
LevelSummary wire_levels(const WireParameters& p) {
  const Eigen::MatrixXd h = build_bdg_hamiltonian(p).real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  return summarize_levels(solver.eigenvalues());
}

MajoranaMode make_mode(const Eigen::VectorXcd& gamma, const WireParameters& p) {
  MajoranaMode mode;
  mode.component_vector = gamma;
  mode.site_weights = site_profile(gamma, p.num_sites);
  const double left_mass = mode.site_weights.head(p.num_sites / 2).sum();
  mode.localization_end = left_mass >= 0.5 ? WireEnd::left : WireEnd::right;
  mode.decay_length = profile_decay_length(mode.site_weights, p.lattice_spacing(),
                                           mode.localization_end == WireEnd::left);
  return mode;
}

}  // namespace

double WireParameters::hopping() const {
  const double a = lattice_spacing();
  return 1.0 / (2.0 * effective_mass * a * a);
}

void WireParameters::validate() const {
  if (num_sites < 2) throw std::invalid_argument("num_sites must be >= 2");
  if (!(length > 0)) throw std::invalid_argument("length must be > 0");
  if (pairing < 0) throw std::invalid_argument("pairing must be >= 0");
  if (!(effective_mass > 0)) throw std::invalid_argument("effective_mass must be > 0");
}

double zeeman_splitting(double g_factor, double b_field_tesla) {
  return g_factor * constants::kBohrMagnetonMeVPerTesla * b_field_tesla / 2.0;
}

bool topological_phase_analytic(double mu, double pairing, double v_x) {
  if (pairing < 0) throw std::invalid_argument("pairing must be >= 0");
  return v_x * v_x > mu * mu + pairing * pairing;
}

Eigen::MatrixXcd build_bdg_hamiltonian(const WireParameters& p) {
  p.validate();
  const int n = p.num_sites;
  const int two_n = 2 * n;
  const double a = p.lattice_spacing();
  const double t = p.hopping();
  const double so = p.rashba / (2.0 * a);

  // Normal-state block h: on-site (2t - mu) + V_x sigma_x, bond -t + so * (i sigma_y).
  // All blocks are real, so the full Nambu matrix is real symmetric.
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(two_n, two_n);
  for (int j = 0; j < n; ++j) {
    const int up = 2 * j, dn = 2 * j + 1;
    h(up, up) = h(dn, dn) = 2.0 * t - p.chemical_potential;
    h(up, dn) = h(dn, up) = p.zeeman;
  }
  for (int j = 0; j + 1 < n; ++j) {
    const int up = 2 * j, dn = 2 * j + 1;
    const int up1 = 2 * (j + 1), dn1 = 2 * (j + 1) + 1;
    // i sigma_y = [[0, 1], [-1, 0]]
    h(up, up1) = h(up1, up) = -t;
    h(dn, dn1) = h(dn1, dn) = -t;
    h(up, dn1) = so;
    h(dn1, up) = so;
    h(dn, up1) = -so;
    h(up1, dn) = -so;
  }

  // Singlet pairing Delta * (i sigma_y) on site: antisymmetric real block.
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(two_n, two_n);
  for (int j = 0; j < n; ++j) {
    d(2 * j, 2 * j + 1) = p.pairing;
    d(2 * j + 1, 2 * j) = -p.pairing;
  }

  Eigen::MatrixXd bdg(4 * n, 4 * n);
  bdg.topLeftCorner(two_n, two_n) = h;
  bdg.topRightCorner(two_n, two_n) = d;
  bdg.bottomLeftCorner(two_n, two_n) = -d;
  bdg.bottomRightCorner(two_n, two_n) = -h;
  return bdg.cast<complex>();
}

bool BdGSpectrum::has_zero_modes(double threshold) const {
  return zero_mode_splitting < threshold * next_level();
}

double BdGSpectrum::next_level() const { return next_distinct_abs(eigenvalues); }

BdGSpectrum diagonalize(const Eigen::MatrixXcd& hamiltonian) {
  if (hamiltonian.rows() != hamiltonian.cols() || hamiltonian.rows() == 0) {
    throw std::invalid_argument("diagonalize: matrix must be square and non-empty");
  }
  const double scale = hamiltonian.cwiseAbs().maxCoeff();
  const double asym = (hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(scale, 1.0)) {
    std::ostringstream msg;
    msg << "diagonalize: matrix is not Hermitian, |H - H^dag|_max = " << asym;
    throw std::invalid_argument(msg.str());
  }

  BdGSpectrum s;
  if (hamiltonian.imag().cwiseAbs().maxCoeff() <= 1e-14 * std::max(scale, 1.0)) {
    // Real symmetric path; the nanowire Hamiltonian always lands here.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian.real());
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
    s.eigenvalues = solver.eigenvalues();
    s.eigenvectors = solver.eigenvectors().cast<complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hamiltonian);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
    s.eigenvalues = solver.eigenvalues();
    s.eigenvectors = solver.eigenvectors();
  }

  const LevelSummary levels = summarize_levels(s.eigenvalues);
  s.zero_mode_splitting = levels.zero_mode_splitting;
  s.gap = levels.gap;
  return s;
}

std::pair<MajoranaMode, MajoranaMode> extract_majorana_modes(
    const BdGSpectrum& spectrum, const WireParameters& p) {
  p.validate();
  const double next = spectrum.next_level();
  const double ratio = next > 0 ? spectrum.zero_mode_splitting / next : 1.0;
  if (!spectrum.has_zero_modes()) {
    std::ostringstream msg;
    msg << "extract_majorana_modes: no zero-mode doublet, splitting/gap ratio = " << ratio;
    throw std::runtime_error(msg.str());
  }

  // The lowest +-E doublet spans a two-dimensional space; the solver may hand
  // back any orthonormal basis of it (including real mixtures when the
  // splitting is below resolution), so work with both columns.
  Eigen::Index i0 = 0;
  spectrum.eigenvalues.cwiseAbs().minCoeff(&i0);
  Eigen::Index i1;
  if (i0 == 0) {
    i1 = 1;
  } else if (i0 + 1 == spectrum.eigenvalues.size()) {
    i1 = i0 - 1;
  } else {
    i1 = std::abs(spectrum.eigenvalues[i0 - 1]) < std::abs(spectrum.eigenvalues[i0 + 1])
             ? i0 - 1
             : i0 + 1;
  }

  // Self-conjugate (P m = m) orthonormal basis of the doublet space. For any
  // w in the space, w + Pw and i(w - Pw) are self-conjugate; inner products
  // of self-conjugate vectors are real, so real Gram-Schmidt stays in the
  // self-conjugate family.
  std::vector<Eigen::VectorXcd> candidates;
  for (const Eigen::Index idx : {i0, i1}) {
    const Eigen::VectorXcd w = spectrum.eigenvectors.col(idx);
    const Eigen::VectorXcd pw = ph_conjugate(w);
    candidates.push_back(w + pw);
    candidates.push_back(complex(0, 1) * (w - pw));
  }
  std::vector<Eigen::VectorXcd> basis;
  for (auto& cand : candidates) {
    Eigen::VectorXcd m = cand;
    for (const auto& b : basis) m -= b.dot(m).real() * b;
    if (m.norm() > 1e-6) {
      m /= m.norm();
      basis.push_back(std::move(m));
    }
    if (basis.size() == 2) break;
  }
  if (basis.size() != 2) {
    throw std::runtime_error("extract_majorana_modes: degenerate doublet basis not found");
  }

  // gamma(chi) = cos(chi) m_a + sin(chi) m_b; choose chi so one member
  // carries maximal weight on the left half. The half-mass difference is
  // quadratic in (cos chi, sin chi) and maximized in closed form.
  const int n = p.num_sites;
  auto half_mass_diff = [&](const Eigen::VectorXcd& v) {
    const Eigen::VectorXd rho = site_profile(v, n);
    return rho.head(n / 2).sum() - rho.tail(n - n / 2).sum();
  };
  const double alpha = half_mass_diff(basis[0]);
  const double beta = half_mass_diff(basis[1]);
  double cross = 0.0;
  for (Eigen::Index k = 0; k < basis[0].size(); ++k) {
    const int site = static_cast<int>((k % (2 * n)) / 2);
    const double sign = site < n / 2 ? 1.0 : -1.0;
    cross += sign * (std::conj(basis[0][k]) * basis[1][k]).real();
  }
  const double chi = 0.5 * std::atan2(2.0 * cross, alpha - beta);

  const double c = std::cos(chi), si = std::sin(chi);
  Eigen::VectorXcd gamma1 = c * basis[0] + si * basis[1];
  Eigen::VectorXcd gamma2 = -si * basis[0] + c * basis[1];

  MajoranaMode m1 = make_mode(gamma1, p);
  MajoranaMode m2 = make_mode(gamma2, p);
  if (m1.localization_end == WireEnd::right) std::swap(m1, m2);
  return {std::move(m1), std::move(m2)};
}

std::vector<std::pair<double, double>> zero_mode_splitting_vs_length(
    const WireParameters& p, std::span<const double> lengths) {
  p.validate();
  const double a = p.lattice_spacing();
  std::vector<std::pair<double, double>> out(lengths.size());
  parallel_for(lengths.size(), [&](std::size_t i) {
    WireParameters q = p;
    q.num_sites = std::max(2, static_cast<int>(std::lround(lengths[i] / a)));
    q.length = q.num_sites * a;
    const LevelSummary levels = wire_levels(q);
    if (!levels.zero_modes) {
      std::ostringstream msg;
      msg << "zero_mode_splitting_vs_length: wire of length " << q.length
          << " is not in the topological phase (splitting " << levels.zero_mode_splitting
          << " vs next level " << levels.next_level << ")";
      throw std::runtime_error(msg.str());
    }
    out[i] = {q.length, levels.zero_mode_splitting};
  });
  return out;
}

CoherenceFit coherence_length_fit(std::span<const std::pair<double, double>> samples) {
  if (samples.size() < 3) {
    throw std::invalid_argument("coherence_length_fit: need at least 3 samples");
  }
  std::vector<double> xs, ys;
  xs.reserve(samples.size());
  ys.reserve(samples.size());
  for (const auto& [length, energy] : samples) {
    if (!(energy > 0)) {
      throw std::invalid_argument("coherence_length_fit: energies must be > 0");
    }
    xs.push_back(length);
    ys.push_back(std::log(energy));
  }
  const LineFit fit = fit_line(xs, ys);
  CoherenceFit out;
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.r_squared = fit.r_squared;
  out.xi = -1.0 / fit.slope;
  return out;
}

std::vector<PhasePoint> phase_diagram_scan(const WireParameters& base,
                                           std::span<const double> mu_grid,
                                           std::span<const double> v_x_grid) {
  base.validate();
  if (mu_grid.empty() || v_x_grid.empty()) {
    throw std::invalid_argument("phase_diagram_scan: grids must be non-empty");
  }
  std::vector<PhasePoint> points(mu_grid.size() * v_x_grid.size());
  parallel_for(points.size(), [&](std::size_t k) {
    WireParameters q = base;
    q.chemical_potential = mu_grid[k / v_x_grid.size()];
    q.zeeman = v_x_grid[k % v_x_grid.size()];
    const LevelSummary levels = wire_levels(q);
    points[k] = {q.chemical_potential, q.zeeman, levels.gap, levels.zero_modes};
  });
  return points;
}

}  // namespace topobus::wire
