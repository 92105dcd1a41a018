#pragma once

#include "jointsel/types.hpp"

namespace jointsel {

enum class Penalty { kMcp, kScad, kL1 };

// Scalar penalty rho_lambda applied to coefficient row norms. MCP and SCAD
// are the amenable nonconvex kinds with weak-convexity constants
// mu = 1/gamma and mu = 1/(gamma-1); L1 is the convex baseline.
struct RegularizerSpec {
  Penalty kind = Penalty::kMcp;
  double lambda = 1.0;
  double gamma = 3.0;

  static RegularizerSpec mcp(double lambda, double gamma = 3.0);
  static RegularizerSpec scad(double lambda, double gamma = 3.7);
  static RegularizerSpec l1(double lambda);

  double mu() const;  // weak-convexity constant; 0 for L1
  void validate() const;
};

double rho(double t, const RegularizerSpec& spec);

// Exact derivative of rho away from the origin; throws at t = 0 where only
// the subdifferential exists.
double rho_prime(double t, const RegularizerSpec& spec);

// Shift q(t) = lambda*|t| - rho(t) and its derivative. Everywhere
// differentiable with q'(0) = 0. Defined for MCP/SCAD only; for L1 the
// shift is identically zero and requesting it is treated as a misuse.
double q_value(double t, const RegularizerSpec& spec);
double q_prime(double t, const RegularizerSpec& spec);

// Sum of rho over the row 2-norms of theta (the penalty term of the
// regularized objective).
double penalty_row_sum(const Matrix& theta, const RegularizerSpec& spec);

// Grid check of the amenability conditions for a claimed weak-convexity
// bound: symmetry, monotonicity on the positive axis, rho(t)/t
// nonincreasing, convexity of rho + (mu/2) t^2 by second differences, and
// the selection property rho' = 0 beyond gamma*lambda.
struct AmenabilityReport {
  bool symmetric = false;
  bool monotone = false;
  bool ratio_nonincreasing = false;
  bool shifted_convex = false;
  bool selects = false;
  double worst_violation = 0.0;

  bool pass() const {
    return symmetric && monotone && ratio_nonincreasing && shifted_convex &&
           selects;
  }
};

AmenabilityReport amenability_report(const RegularizerSpec& spec,
                                     double mu_bound);

}  // namespace jointsel
