#pragma once

#include "jointsel/types.hpp"

namespace jointsel {

// Row-wise norms of a p x q coefficient matrix. norm_l12 is the sum of row
// 2-norms (the group penalty's argument), norm_linf2 the largest row 2-norm,
// norm_linfinf the largest absolute entry.

inline Vector row_norms(const Matrix& theta) { return theta.rowwise().norm(); }

inline double norm_l12(const Matrix& theta) {
  return theta.rowwise().norm().sum();
}

inline double norm_linf2(const Matrix& theta) {
  return theta.rows() == 0 ? 0.0 : theta.rowwise().norm().maxCoeff();
}

inline double norm_linfinf(const Matrix& theta) {
  return theta.size() == 0 ? 0.0 : theta.cwiseAbs().maxCoeff();
}

}  // namespace jointsel
