#pragma once

#include "jointsel/data.hpp"
#include "jointsel/penalty.hpp"
#include "jointsel/solver.hpp"
#include "jointsel/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace jointsel {

enum class SelectionMode {
  kJoint,                // one row-sparse fit across all cohorts
  kIndependent,          // per-cohort single-column fits, union of supports
  kTreatmentRegression,  // rank covariates by multinomial fit of T on X
};

struct SelectionConfig {
  SelectionMode mode = SelectionMode::kJoint;

  // Strictly decreasing positive values; empty resolves to 30 points
  // log-spaced from the data-driven upper bound down to a hundredth of it.
  std::vector<double> lambda_grid;

  // 0 fits at the first grid value; >= 2 cross-validates over the grid with
  // stratified folds inside each cohort.
  int cv_folds = 0;

  Penalty reg_kind = Penalty::kMcp;
  double gamma = 0.0;  // <= 0 resolves to the kind's default curvature

  // Per-fit settings. theta_init is ignored here: the grid walk supplies
  // its own warm starts, beginning from zero at the largest lambda.
  SolverConfig solver;

  // Center covariates and outcome per cohort and scale covariates by their
  // pooled standard deviation before fitting; coefficients are mapped back
  // to the original scale. Constant columns keep unit scale.
  bool standardize = true;

  std::uint64_t seed = 0;  // drives the cross-validation fold shuffle

  int top_m = 0;  // support size for treatment-regression mode

  void validate() const;
};

struct SelectionResult {
  SupportSet support;
  double chosen_lambda = 0.0;
  std::vector<double> lambda_grid;  // resolved grid, aligned with cv_table
  std::vector<double> cv_table;     // mean held-out error per grid value
  // Coefficients at chosen_lambda on the original scale; the zero matrix in
  // treatment-regression mode, which fits no outcome model.
  Matrix theta;
  // Independent mode only: the per-cohort supports whose union is returned.
  std::vector<SupportSet> per_cohort_supports;
};

SelectionResult select(const CohortDataset& data, const SelectionConfig& config);

// Chosen lambda and the per-grid-value mean held-out squared prediction
// error, ties resolved toward the larger lambda.
std::pair<double, std::vector<double>> cross_validate(
    const CohortDataset& data, const SelectionConfig& config);

// Covariate ranking baseline: multinomial logistic fit of the treatment on
// standardized covariates, support = the top_m covariates by largest
// absolute coefficient across classes.
SupportSet select_by_treatment_regression(const PooledDataset& data, int top_m,
                                          double ridge = 1e-3);

// Largest lambda of the default grid: the biggest row 2-norm across
// covariates of the stacked per-cohort cross moments. Above it the first
// proximal step from zero keeps every row at zero.
double lambda_grid_upper_bound(const MomentCache& cache);

std::vector<double> default_lambda_grid(const MomentCache& cache);

}  // namespace jointsel
