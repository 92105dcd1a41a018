#pragma once

#include "jointsel/types.hpp"

#include <string>
#include <vector>

namespace jointsel {

// One treatment arm: the rows of the pooled sample with T = j.
struct Cohort {
  Matrix X;  // n_j x p
  Vector y;  // n_j
};

// Samples grouped by treatment arm; cohort j corresponds to label j.
struct CohortDataset {
  std::vector<Cohort> cohorts;
  int p = 0;

  int q() const { return static_cast<int>(cohorts.size()); }
  // Treatment-pipeline entry points require q >= 2, p >= 1, nonempty cohorts
  // of matching width, all entries finite. The solver itself accepts q = 1
  // (single-response problems), so this is not enforced on construction.
  void validate() const;
};

// Pooled ingestion form before the cohort split. Name fields are filled by
// the CSV reader and carried through for export; they stay empty for
// synthetic data.
struct PooledDataset {
  Matrix X;     // n x p
  IntVector t;  // labels in {0..q-1}
  Vector y;     // n
  int q = 0;

  std::vector<std::string> covariate_names;
  std::vector<std::string> treatment_levels;  // original labels, size q
  std::string treatment_name;
  std::string outcome_name;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
  void validate() const;
};

CohortDataset partition_by_treatment(const PooledDataset& data);

// Per-cohort second moments, each normalized by its own cohort size:
// gram[j] = X_j^T X_j / n_j, cross[j] = X_j^T y_j / n_j.
struct MomentCache {
  std::vector<Matrix> gram;
  std::vector<Vector> cross;
  int p = 0;

  int q() const { return static_cast<int>(gram.size()); }
};

// Row indices sorted lexicographically by (covariate row, outcome). Every
// per-cohort reduction (moments, means, variances, fold assignment) iterates
// in this order, which makes results exactly invariant to the order rows
// arrived in rather than invariant only up to floating-point reassociation.
std::vector<Eigen::Index> canonical_row_order(const Matrix& X, const Vector& y);

MomentCache compute_moments(const CohortDataset& data);

// Largest Gram eigenvalue across cohorts, estimated by fixed-count power
// iterations (deterministic start). Used for the default solver step size.
double max_gram_eigenvalue(const MomentCache& cache, int iters = 20);

}  // namespace jointsel
