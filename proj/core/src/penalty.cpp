#include "jointsel/penalty.hpp"

#include "jointsel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace jointsel {

RegularizerSpec RegularizerSpec::mcp(double lambda, double gamma) {
  RegularizerSpec s{Penalty::kMcp, lambda, gamma};
  s.validate();
  return s;
}

RegularizerSpec RegularizerSpec::scad(double lambda, double gamma) {
  RegularizerSpec s{Penalty::kScad, lambda, gamma};
  s.validate();
  return s;
}

RegularizerSpec RegularizerSpec::l1(double lambda) {
  RegularizerSpec s{Penalty::kL1, lambda, 0.0};
  s.validate();
  return s;
}

double RegularizerSpec::mu() const {
  switch (kind) {
    case Penalty::kMcp:
      return 1.0 / gamma;
    case Penalty::kScad:
      return 1.0 / (gamma - 1.0);
    case Penalty::kL1:
      return 0.0;
  }
  return 0.0;
}

void RegularizerSpec::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw DataError("regularizer lambda must be positive and finite");
  if (kind == Penalty::kMcp && !(gamma > 1.0))
    throw DataError("MCP needs gamma > 1, got " + std::to_string(gamma));
  if (kind == Penalty::kScad && !(gamma > 2.0))
    throw DataError("SCAD needs gamma > 2, got " + std::to_string(gamma));
}

double rho(double t, const RegularizerSpec& spec) {
  double a = std::abs(t);
  double l = spec.lambda, g = spec.gamma;
  switch (spec.kind) {
    case Penalty::kMcp:
      if (a <= g * l) return l * a - a * a / (2.0 * g);
      return g * l * l / 2.0;
    case Penalty::kScad:
      if (a <= l) return l * a;
      if (a <= g * l)
        return (2.0 * g * l * a - a * a - l * l) / (2.0 * (g - 1.0));
      return l * l * (g + 1.0) / 2.0;
    case Penalty::kL1:
      return l * a;
  }
  return 0.0;
}

double rho_prime(double t, const RegularizerSpec& spec) {
  if (t == 0.0) throw NumericalError("rho_prime: subdifferential at origin");
  double a = std::abs(t);
  double sgn = t > 0.0 ? 1.0 : -1.0;
  double l = spec.lambda, g = spec.gamma;
  switch (spec.kind) {
    case Penalty::kMcp:
      if (a <= g * l) return sgn * (l - a / g);
      return 0.0;
    case Penalty::kScad:
      if (a <= l) return sgn * l;
      if (a <= g * l) return sgn * (g * l - a) / (g - 1.0);
      return 0.0;
    case Penalty::kL1:
      return sgn * l;
  }
  return 0.0;
}

static void require_shiftable(const RegularizerSpec& spec, const char* who) {
  if (spec.kind == Penalty::kL1)
    throw NumericalError(std::string(who) +
                         ": shift is identically zero for L1; use the plain "
                         "loss gradient instead");
}

double q_value(double t, const RegularizerSpec& spec) {
  require_shiftable(spec, "q_value");
  return spec.lambda * std::abs(t) - rho(t, spec);
}

double q_prime(double t, const RegularizerSpec& spec) {
  require_shiftable(spec, "q_prime");
  if (t == 0.0) return 0.0;
  double a = std::abs(t);
  double sgn = t > 0.0 ? 1.0 : -1.0;
  double l = spec.lambda, g = spec.gamma;
  if (spec.kind == Penalty::kMcp) {
    if (a <= g * l) return t / g;
    return sgn * l;
  }
  // SCAD
  if (a <= l) return 0.0;
  if (a <= g * l) return sgn * (a - l) / (g - 1.0);
  return sgn * l;
}

double penalty_row_sum(const Matrix& theta, const RegularizerSpec& spec) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < theta.rows(); ++i)
    acc += rho(theta.row(i).norm(), spec);
  return acc;
}

AmenabilityReport amenability_report(const RegularizerSpec& spec,
                                     double mu_bound) {
  spec.validate();
  if (!(mu_bound > 0.0))
    throw DataError("amenability_report: mu_bound must be positive");

  // L1 has no shape parameter; a nominal width keeps the grid meaningful.
  double g = spec.kind == Penalty::kL1 ? 3.0 : spec.gamma;
  double half = 3.0 * g * spec.lambda;
  const int kPoints = 10000;
  double h = 2.0 * half / (kPoints - 1);
  const double kTol = 1e-9;

  AmenabilityReport rep;
  rep.symmetric = rep.monotone = rep.ratio_nonincreasing = true;
  rep.shifted_convex = rep.selects = true;
  double worst = 0.0;
  auto flag = [&](bool& ok, double violation) {
    if (violation > kTol) {
      ok = false;
      worst = std::max(worst, violation);
    }
  };

  auto shifted = [&](double t) {
    return rho(t, spec) + 0.5 * mu_bound * t * t;
  };

  double prev_rho = 0.0, prev_ratio = 0.0;
  bool have_prev = false;
  for (int i = 0; i < kPoints; ++i) {
    double t = -half + h * static_cast<double>(i);
    flag(rep.symmetric, std::abs(rho(t, spec) - rho(-t, spec)));
    if (t > 0.0) {
      double r = rho(t, spec);
      double ratio = r / t;
      if (have_prev) {
        flag(rep.monotone, prev_rho - r);  // rho must not decrease
        flag(rep.ratio_nonincreasing, ratio - prev_ratio);
      }
      prev_rho = r;
      prev_ratio = ratio;
      have_prev = true;
    }
    if (i > 0 && i + 1 < kPoints) {
      double second = shifted(t - h) - 2.0 * shifted(t) + shifted(t + h);
      flag(rep.shifted_convex, -second);
    }
    if (spec.kind != Penalty::kL1 && std::abs(t) >= g * spec.lambda &&
        t != 0.0)
      flag(rep.selects, std::abs(rho_prime(t, spec)));
  }
  if (spec.kind == Penalty::kL1) {
    // L1 never flattens; its derivative stays at lambda everywhere.
    rep.selects = false;
    worst = std::max(worst, spec.lambda);
  }
  rep.worst_violation = worst;
  return rep;
}

}  // namespace jointsel
