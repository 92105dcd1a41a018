#pragma once

#include "jointsel/data.hpp"
#include "jointsel/penalty.hpp"
#include "jointsel/types.hpp"

#include <string>
#include <vector>

namespace jointsel {

// Threshold convention for the proximal step. kStepScaled shrinks by
// step * lambda, which makes fixed points stationary points of the
// regularized objective. kRawLambda applies the lambda threshold unscaled at
// every step size.
enum class ProxScaling { kStepScaled, kRawLambda };

struct SolverConfig {
  // Constraint radius for the row-norm sum. Values <= 0 resolve at fit time
  // to twice the l-1,2 norm of a small-ridge pilot fit; the resolved radius
  // is recorded in FitResult.
  double radius_R = 0.0;
  // Initial step size. Values <= 0 resolve to 1 / (largest cohort Gram
  // eigenvalue), the inverse Lipschitz constant of the smooth part.
  double step_init = 0.0;
  double backtrack_c = 0.5;
  int max_iters = 5000;
  double tol = 1e-7;  // relative Frobenius change at which iteration stops
  Matrix theta_init;  // empty means the zero matrix
  ProxScaling prox_scaling = ProxScaling::kStepScaled;
  // Reject line-search candidates that increase the objective. Disable only
  // to mimic the feasibility-only line search exactly.
  bool enforce_descent = true;

  void validate() const;
};

struct FitResult {
  Matrix theta_hat;
  SupportSet support;  // rows of theta_hat that are not exactly zero
  int iterations = 0;
  double final_objective = 0.0;
  bool converged = false;
  std::vector<double> objective_trace;  // objective after each accepted step
  double radius_R = 0.0;   // resolved values actually used
  double step_init = 0.0;
  double final_step = 0.0;  // last accepted step size
  std::string message;
};

// Row-wise soft thresholding on row 2-norms:
// row i -> row i * max(0, 1 - threshold/||row i||), exact zeros below the
// threshold.
Matrix prox_l12(const Matrix& theta, double threshold);

// Regularized objective: loss + sum_i rho(||theta_i:||).
double objective(const Matrix& theta, const MomentCache& cache,
                 const RegularizerSpec& reg);

// Default constraint radius: 2 * ||pilot||_{1,2} of a per-cohort ridge fit.
double default_radius(const MomentCache& cache);

// Proximal gradient descent with backtracking line search on the shifted
// objective. L1 runs the same loop with the plain loss gradient.
FitResult fit(const CohortDataset& data, const RegularizerSpec& reg,
              const SolverConfig& config);
FitResult fit_moments(const MomentCache& cache, const RegularizerSpec& reg,
                      const SolverConfig& config);

// Per-cohort ordinary least squares restricted to the support rows; rows
// outside the support are zero. Moments are recomputed from the restricted
// columns, so the result depends only on them.
Matrix fit_restricted(const CohortDataset& data, const SupportSet& support);

}  // namespace jointsel
