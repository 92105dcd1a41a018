#include "jointsel/loss.hpp"

#include "jointsel/errors.hpp"

#include <string>

namespace jointsel {

static void check_dims(const Matrix& theta, const MomentCache& cache) {
  if (theta.rows() != cache.p || theta.cols() != cache.q())
    throw DataError("coefficient matrix is " + std::to_string(theta.rows()) +
                    "x" + std::to_string(theta.cols()) + ", cache expects " +
                    std::to_string(cache.p) + "x" + std::to_string(cache.q()));
}

double loss(const Matrix& theta, const MomentCache& cache) {
  check_dims(theta, cache);
  double acc = 0.0;
  for (int j = 0; j < cache.q(); ++j) {
    const auto col = theta.col(j);
    acc += 0.5 * col.dot(cache.gram[j] * col) - cache.cross[j].dot(col);
  }
  return acc;
}

Matrix grad_loss(const Matrix& theta, const MomentCache& cache) {
  check_dims(theta, cache);
  Matrix g(theta.rows(), theta.cols());
  for (int j = 0; j < cache.q(); ++j)
    g.col(j) = cache.gram[j] * theta.col(j) - cache.cross[j];
  return g;
}

Matrix grad_shifted_loss(const Matrix& theta, const MomentCache& cache,
                         const RegularizerSpec& reg) {
  if (reg.kind == Penalty::kL1)
    throw NumericalError(
        "grad_shifted_loss: shift degenerates for L1; use grad_loss");
  Matrix g = grad_loss(theta, cache);
  for (Eigen::Index i = 0; i < theta.rows(); ++i) {
    double nrm = theta.row(i).norm();
    if (nrm == 0.0) continue;
    g.row(i) -= theta.row(i) * (q_prime(nrm, reg) / nrm);
  }
  return g;
}

}  // namespace jointsel
