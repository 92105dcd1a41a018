#include "jointsel/solver.hpp"

#include "jointsel/errors.hpp"
#include "jointsel/loss.hpp"
#include "jointsel/norms.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <string>

namespace jointsel {

void SolverConfig::validate() const {
  if (!(backtrack_c > 0.0 && backtrack_c < 1.0))
    throw DataError("backtrack_c must lie strictly inside (0,1)");
  if (max_iters < 1) throw DataError("max_iters must be positive");
  if (!(tol > 0.0)) throw DataError("tol must be positive");
  if (radius_R > 0.0 && !std::isfinite(radius_R))
    throw DataError("radius_R must be finite");
  if (step_init > 0.0 && !std::isfinite(step_init))
    throw DataError("step_init must be finite");
}

Matrix prox_l12(const Matrix& theta, double threshold) {
  if (threshold < 0.0) throw DataError("prox threshold must be >= 0");
  Matrix out = theta;
  if (threshold == 0.0) return out;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    double nrm = out.row(i).norm();
    if (nrm <= threshold)
      out.row(i).setZero();
    else
      out.row(i) *= 1.0 - threshold / nrm;
  }
  return out;
}

double objective(const Matrix& theta, const MomentCache& cache,
                 const RegularizerSpec& reg) {
  return loss(theta, cache) + penalty_row_sum(theta, reg);
}

double default_radius(const MomentCache& cache) {
  Matrix pilot(cache.p, cache.q());
  for (int j = 0; j < cache.q(); ++j) {
    const Matrix& G = cache.gram[j];
    double ridge =
        std::max(1e-3 * G.trace() / static_cast<double>(cache.p), 1e-12);
    Matrix Gr = G;
    Gr.diagonal().array() += ridge;
    pilot.col(j) = Gr.ldlt().solve(cache.cross[j]);
  }
  double R = 2.0 * norm_l12(pilot);
  if (!(R > 0.0) || !std::isfinite(R)) R = 1.0;
  return R;
}

FitResult fit(const CohortDataset& data, const RegularizerSpec& reg,
              const SolverConfig& config) {
  return fit_moments(compute_moments(data), reg, config);
}

FitResult fit_moments(const MomentCache& cache, const RegularizerSpec& reg,
                      const SolverConfig& config) {
  reg.validate();
  config.validate();
  const int p = cache.p;
  const int q = cache.q();

  double R = config.radius_R > 0.0 ? config.radius_R : default_radius(cache);
  double zeta0 = config.step_init;
  if (zeta0 <= 0.0) {
    double lam_max = max_gram_eigenvalue(cache);
    zeta0 = lam_max > 0.0 ? 1.0 / lam_max : 1.0;
  }

  Matrix theta;
  if (config.theta_init.size() > 0) {
    if (config.theta_init.rows() != p || config.theta_init.cols() != q)
      throw DataError("theta_init dimensions do not match the problem");
    theta = config.theta_init;
  } else {
    theta = Matrix::Zero(p, q);
  }
  if (!(norm_l12(theta) < R))
    throw DataError("theta_init violates the strict l-1,2 radius constraint");

  const bool is_l1 = reg.kind == Penalty::kL1;
  double obj = objective(theta, cache, reg);

  FitResult res;
  res.radius_R = R;
  res.step_init = zeta0;
  res.objective_trace.push_back(obj);

  for (int iter = 0; iter < config.max_iters; ++iter) {
    Matrix grad = is_l1 ? grad_loss(theta, cache)
                        : grad_shifted_loss(theta, cache, reg);
    if (!grad.allFinite())
      throw NumericalError("fit: non-finite gradient at iteration " +
                           std::to_string(iter));

    double zeta = zeta0;
    bool accepted = false;
    Matrix cand;
    double cand_obj = 0.0;
    for (int halving = 0; halving <= 60; ++halving) {
      double thr = config.prox_scaling == ProxScaling::kStepScaled
                       ? zeta * reg.lambda
                       : reg.lambda;
      cand = prox_l12(theta - zeta * grad, thr);
      if (cand.allFinite() && norm_l12(cand) < R) {
        cand_obj = objective(cand, cache, reg);
        if (!config.enforce_descent || cand_obj <= obj) {
          accepted = true;
          break;
        }
      }
      zeta *= config.backtrack_c;
    }
    if (!accepted) {
      res.message =
          "line search found no feasible non-increasing step in 60 halvings";
      break;
    }
    if (!cand.allFinite())
      throw NumericalError("fit: non-finite iterate at iteration " +
                           std::to_string(iter));

    double change = (cand - theta).norm();
    double scale = std::max(1.0, theta.norm());
    theta = std::move(cand);
    obj = cand_obj;
    res.objective_trace.push_back(obj);
    res.final_step = zeta;
    ++res.iterations;
    if (change <= config.tol * scale) {
      res.converged = true;
      break;
    }
  }

  res.theta_hat = std::move(theta);
  res.support = SupportSet::from_nonzero_rows(res.theta_hat);
  res.final_objective = obj;
  return res;
}

Matrix fit_restricted(const CohortDataset& data, const SupportSet& support) {
  const int p = data.p;
  const int q = data.q();
  if (support.p != p)
    throw DataError("support ambient dimension does not match data");
  Matrix theta = Matrix::Zero(p, q);
  const int k = support.size();
  if (k == 0) return theta;

  for (int j = 0; j < q; ++j) {
    const Cohort& c = data.cohorts[j];
    Matrix Xs(c.X.rows(), k);
    for (int a = 0; a < k; ++a) Xs.col(a) = c.X.col(support.indices[a]);
    std::vector<Eigen::Index> order = canonical_row_order(Xs, c.y);
    Matrix Xc(Xs.rows(), k);
    Vector yc(c.y.size());
    for (Eigen::Index r = 0; r < Xs.rows(); ++r) {
      Xc.row(r) = Xs.row(order[r]);
      yc[r] = c.y[order[r]];
    }
    double inv_n = 1.0 / static_cast<double>(Xc.rows());
    Matrix G = (Xc.transpose() * Xc) * inv_n;
    Vector g = (Xc.transpose() * yc) * inv_n;
    Eigen::FullPivLU<Matrix> lu(G);
    if (!lu.isInvertible())
      throw NumericalError("restricted Gram is singular in cohort " +
                           std::to_string(j));
    Vector beta = lu.solve(g);
    for (int a = 0; a < k; ++a) theta(support.indices[a], j) = beta[a];
  }
  return theta;
}

}  // namespace jointsel
