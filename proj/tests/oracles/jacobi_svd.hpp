#pragma once

// Test-only dense SVD oracle: one-sided Jacobi rotations, independent of
// the library's solver. Returns singular values in non-increasing order.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

inline std::vector<double> jacobi_singular_values(Eigen::MatrixXd a) {
  if (a.rows() < a.cols()) a = Eigen::MatrixXd(a.transpose());
  const Eigen::Index n = a.cols();
  const double tol = 1e-14;
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double app = a.col(p).squaredNorm();
        const double aqq = a.col(q).squaredNorm();
        const double apq = a.col(p).dot(a.col(q));
        if (std::abs(apq) <= tol * std::sqrt(app * aqq) || apq == 0.0) continue;
        rotated = true;
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const Eigen::VectorXd col_p = a.col(p);
        a.col(p) = c * col_p - s * a.col(q);
        a.col(q) = s * col_p + c * a.col(q);
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sigma;
  sigma.reserve(static_cast<size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) sigma.push_back(a.col(j).norm());
  std::sort(sigma.begin(), sigma.end(), std::greater<double>());
  return sigma;
}

// Best rank-k Frobenius reconstruction error is the tail of the spectrum.
inline double rank_k_error(const std::vector<double>& sigma, int k) {
  double sum = 0.0;
  for (size_t i = static_cast<size_t>(k); i < sigma.size(); ++i) {
    sum += sigma[i] * sigma[i];
  }
  return std::sqrt(sum);
}

}  // namespace oracle
