#include "jacobi_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace topobus::testing {

namespace {

using complex = std::complex<double>;

double off_diagonal_norm(const Eigen::MatrixXcd& a) {
  double sum = 0.0;
  for (Eigen::Index p = 0; p < a.rows(); ++p) {
    for (Eigen::Index q = 0; q < a.cols(); ++q) {
      if (p != q) sum += std::norm(a(p, q));
    }
  }
  return std::sqrt(sum);
}

}  // namespace

JacobiResult jacobi_hermitian(Eigen::MatrixXcd a, double tolerance, int max_sweeps) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("jacobi_hermitian: square matrix required");
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);

  Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(n, n);
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (off_diagonal_norm(a) <= tolerance * scale * n) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double r = std::abs(a(p, q));
        if (r <= tolerance * scale) continue;
        // Phase that makes the pivot real, then a standard real rotation.
        const complex phase = a(p, q) / r;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Zeroing the pivot needs t^2 - 2 tau t - 1 = 0; take the stable root.
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0 ? -1.0 : 1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // Unitary U: U(p,p)=c, U(p,q)=-s*phase, U(q,p)=s*conj(phase), U(q,q)=c.
        for (Eigen::Index k = 0; k < n; ++k) {
          const complex akp = a(k, p);
          const complex akq = a(k, q);
          a(k, p) = c * akp + s * std::conj(phase) * akq;
          a(k, q) = -s * phase * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const complex apk = a(p, k);
          const complex aqk = a(q, k);
          a(p, k) = c * apk + s * phase * aqk;
          a(q, k) = -s * std::conj(phase) * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const complex vkp = v(k, p);
          const complex vkq = v(k, q);
          v(k, p) = c * vkp + s * std::conj(phase) * vkq;
          v(k, q) = -s * phase * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == max_sweeps) throw std::runtime_error("jacobi_hermitian: did not converge");

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index i, Eigen::Index j) { return a(i, i).real() < a(j, j).real(); });

  JacobiResult result;
  result.sweeps = sweep;
  result.eigenvalues.resize(n);
  result.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    result.eigenvalues[k] = a(order[k], order[k]).real();
    result.eigenvectors.col(k) = v.col(order[k]);
  }
  return result;
}

}  // namespace topobus::testing
