#include "multinomial.hpp"

#include <cmath>

#include "jointsel/errors.hpp"

namespace jointsel::detail {

namespace {

// Row-wise softmax of the score matrix, stabilized by the row maximum.
Matrix softmax_rows(const Matrix& scores) {
  Matrix probs(scores.rows(), scores.cols());
  for (Eigen::Index s = 0; s < scores.rows(); ++s) {
    double m = scores.row(s).maxCoeff();
    double denom = 0.0;
    for (Eigen::Index c = 0; c < scores.cols(); ++c) {
      double e = std::exp(scores(s, c) - m);
      probs(s, c) = e;
      denom += e;
    }
    probs.row(s) /= denom;
  }
  return probs;
}

double mean_loglik(const Matrix& scores, const IntVector& t, const Matrix& W,
                   double ridge) {
  double acc = 0.0;
  for (Eigen::Index s = 0; s < scores.rows(); ++s) {
    double m = scores.row(s).maxCoeff();
    double denom = 0.0;
    for (Eigen::Index c = 0; c < scores.cols(); ++c)
      denom += std::exp(scores(s, c) - m);
    acc += scores(s, t(s)) - m - std::log(denom);
  }
  return acc / static_cast<double>(scores.rows()) -
         0.5 * ridge * W.squaredNorm();
}

}  // namespace

MultinomialModel fit_multinomial_raw(const Matrix& X, const IntVector& t,
                                     int q, double ridge, int max_iters,
                                     double tol) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (n == 0 || q < 2)
    throw DataError("multinomial fit needs samples and at least 2 classes");
  if (t.size() != n)
    throw DataError("multinomial fit: label length does not match rows");

  MultinomialModel model;
  model.W = Matrix::Zero(p, q);
  model.b = Vector::Zero(q);

  Matrix indicator = Matrix::Zero(n, q);
  for (Eigen::Index s = 0; s < n; ++s) indicator(s, t(s)) = 1.0;

  double inv_n = 1.0 / static_cast<double>(n);
  Matrix scores = (X * model.W).rowwise() + model.b.transpose();
  double obj = mean_loglik(scores, t, model.W, ridge);
  double step = 1.0;

  for (int it = 0; it < max_iters; ++it) {
    model.iterations = it + 1;
    Matrix probs = softmax_rows(scores);
    Matrix resid = indicator - probs;
    Matrix gW = (X.transpose() * resid) * inv_n - ridge * model.W;
    Vector gb = resid.colwise().sum() * inv_n;
    gW.col(0).setZero();  // reference class stays pinned
    gb(0) = 0.0;

    model.grad_norm =
        std::sqrt(gW.squaredNorm() + gb.squaredNorm());
    if (!std::isfinite(model.grad_norm))
      throw NumericalError("multinomial fit: non-finite gradient");
    if (model.grad_norm <= tol) {
      model.converged = true;
      return model;
    }

    bool accepted = false;
    for (int half = 0; half < 200; ++half) {
      Matrix Wc = model.W + step * gW;
      Vector bc = model.b + step * gb;
      Matrix sc = (X * Wc).rowwise() + bc.transpose();
      double cand = mean_loglik(sc, t, Wc, ridge);
      if (std::isfinite(cand) && cand >= obj) {
        model.W = std::move(Wc);
        model.b = std::move(bc);
        scores = std::move(sc);
        obj = cand;
        step *= 2.0;
        accepted = true;
        break;
      }
      step *= 0.5;
      if (step < 1e-18) break;
    }
    if (!accepted) {
      // Step collapsed without an improving move; report where we stopped.
      model.converged = model.grad_norm <= tol;
      return model;
    }
  }
  return model;
}

}  // namespace jointsel::detail
