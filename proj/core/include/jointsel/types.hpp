#pragma once

#include <Eigen/Core>

#include <vector>

namespace jointsel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

// Row support of a p x q coefficient matrix: the covariates with a nonzero
// coefficient in at least one treatment column.
struct SupportSet {
  std::vector<int> indices;  // sorted ascending, no duplicates
  int p = 0;                 // ambient covariate count

  static SupportSet from_indices(std::vector<int> idx, int p);
  static SupportSet from_nonzero_rows(const Matrix& theta);
  static SupportSet full(int p);

  bool contains(int i) const;
  int size() const { return static_cast<int>(indices.size()); }
  bool operator==(const SupportSet& other) const = default;
};

// |A intersect B| / |A union B|; 1 when both are empty.
double jaccard(const SupportSet& a, const SupportSet& b);

}  // namespace jointsel
