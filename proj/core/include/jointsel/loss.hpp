#pragma once

#include "jointsel/data.hpp"
#include "jointsel/penalty.hpp"
#include "jointsel/types.hpp"

namespace jointsel {

// Joint least-squares loss over moment form:
//   sum_j [ 0.5 * theta_j^T gram_j theta_j - cross_j^T theta_j ].
// Columns are fully decoupled; the sum runs in column order.
double loss(const Matrix& theta, const MomentCache& cache);

// Column j of the gradient: gram_j * theta_j - cross_j.
Matrix grad_loss(const Matrix& theta, const MomentCache& cache);

// Gradient of the shifted objective loss - sum_i q(||theta_i:||). Row i of
// the correction is theta_i: * q'(||theta_i:||)/||theta_i:||, the zero row
// when the row norm is zero (q'(0) = 0). MCP/SCAD only.
Matrix grad_shifted_loss(const Matrix& theta, const MomentCache& cache,
                         const RegularizerSpec& reg);

}  // namespace jointsel
