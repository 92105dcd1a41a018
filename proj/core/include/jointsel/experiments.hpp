#pragma once

#include "jointsel/penalty.hpp"
#include "jointsel/selection.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace jointsel {

// How each experiment cell picks its lambda. kTheory uses
// c * sqrt(q * log(p) / n) with c either supplied or calibrated once per
// run on the easiest cell (smallest p, largest n); kCv cross-validates over
// the default grid; kFixed uses one given value everywhere.
enum class LambdaPolicy { kTheory, kCv, kFixed };

double theory_lambda(double c, int q, int p, int n);

struct PhaseDiagramSpec {
  std::vector<int> n_grid;  // total pooled sample sizes
  std::vector<int> p_grid;
  int q = 2;
  int k = 10;
  int trials = 25;
  SelectionMode mode = SelectionMode::kJoint;
  std::uint64_t base_seed = 0;
  LambdaPolicy lambda_policy = LambdaPolicy::kTheory;
  double lambda_c = 0.0;      // <= 0 calibrates; resolved value is reported
  double lambda_fixed = 1.0;  // kFixed only
  int cv_folds = 5;           // kCv only
  double noise_sigma = 1.0;
  double coef_scale = 1.0;
  double phi_scale = 1.0;
  Penalty reg_kind = Penalty::kMcp;
  double gamma = 0.0;  // <= 0 resolves to the kind's default
  int threads = 1;

  void validate() const;
};

struct PhaseCell {
  int n = 0;
  int p = 0;
  int trials = 0;
  double recovery_probability = 0.0;  // exact support matches / trials
  double mean_support_jaccard = 0.0;
  int failures = 0;  // trials that threw; counted as non-recoveries
};

struct PhaseDiagramResult {
  std::vector<PhaseCell> cells;  // p-major, n ascending within each p
  double resolved_lambda_c = 0.0;
  std::vector<std::string> notes;
};

PhaseDiagramResult run_phase_diagram(const PhaseDiagramSpec& spec);

struct ScalingSpec {
  int p = 128;
  int k = 10;
  int q = 2;
  std::vector<int> n_list;  // ascending, each at least 4 * k
  int trials = 30;
  std::uint64_t base_seed = 0;
  double lambda_c = 0.0;  // <= 0 calibrates at (p, largest n)
  double noise_sigma = 1.0;
  double coef_scale = 1.0;
  double phi_scale = 1.0;
  Penalty reg_kind = Penalty::kMcp;
  double gamma = 0.0;
  int threads = 1;

  void validate() const;
};

struct ScalingTrialRecord {
  int n = 0;
  int trial = 0;
  bool recovered = false;
  double err_inf_inf = 0.0;  // max abs entry of theta_hat - theta_star
  // Plug-in contrast error of the oracle restricted fit on the true
  // support against the draw's empirical target, and its Holder bound
  // ||mu_S||_1 * sum_t ||column error||_inf.
  double ate_err = 0.0;
  double ate_bound = 0.0;
};

struct ScalingRow {
  int n = 0;
  double mean_error = 0.0;      // mean err_inf_inf over completed trials
  double recovery_rate = 0.0;
};

struct ScalingResult {
  std::vector<ScalingRow> rows;
  std::vector<ScalingTrialRecord> trials;
  // Least-squares slope of log mean_error against log n; absent with a
  // single sample size or a zero mean error.
  std::optional<double> slope;
  double resolved_lambda_c = 0.0;
  std::vector<std::string> notes;
};

ScalingResult run_scaling_sweep(const ScalingSpec& spec);

}  // namespace jointsel
