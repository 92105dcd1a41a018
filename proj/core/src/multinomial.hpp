#pragma once

#include "jointsel/types.hpp"

namespace jointsel::detail {

// Multinomial logistic fit with class 0 as the reference (its coefficient
// column and intercept stay zero). Maximizes the mean log-likelihood minus
// (ridge/2) * ||W||_F^2 (intercepts unpenalized) by gradient ascent with an
// adaptive step: accepted steps grow it, rejected ones halve it. Stops when
// the gradient norm drops to tol.
struct MultinomialModel {
  Matrix W;   // p x q
  Vector b;   // q
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
};

MultinomialModel fit_multinomial_raw(const Matrix& X, const IntVector& t,
                                     int q, double ridge,
                                     int max_iters = 10000, double tol = 1e-6);

}  // namespace jointsel::detail
