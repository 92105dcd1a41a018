#include "jointsel/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "jointsel/errors.hpp"
#include "jointsel/rng.hpp"

namespace jointsel {

void SynthSpec::validate() const {
  if (p < 1) throw DataError("SynthSpec: p must be positive");
  if (q < 2) throw DataError("SynthSpec: q must be at least 2");
  if (k < 1 || k > p) throw DataError("SynthSpec: k must lie in [1, p]");
  if (n < 1) throw DataError("SynthSpec: n must be positive");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw DataError("SynthSpec: noise_sigma must be finite and nonnegative");
  if (!(coef_scale > 0.0) || !std::isfinite(coef_scale))
    throw DataError("SynthSpec: coef_scale must be finite and positive");
  if (!(phi_scale >= 0.0) || !std::isfinite(phi_scale))
    throw DataError("SynthSpec: phi_scale must be finite and nonnegative");
  if (!(beta_min >= 0.0) || !std::isfinite(beta_min))
    throw DataError("SynthSpec: beta_min must be finite and nonnegative");
  for (int i : phi_support)
    if (i < 0 || i >= p)
      throw DataError("SynthSpec: phi_support index " + std::to_string(i) +
                      " out of range");
  if (cov_chol.size() > 0 && (cov_chol.rows() != p || cov_chol.cols() != p))
    throw DataError("SynthSpec: cov_chol must be p x p");
}

double sparse_response(const Matrix& theta, const SupportSet& support,
                       const Vector& x, int t) {
  double acc = 0.0;
  for (int i : support.indices) acc += theta(i, t) * x(i);
  return acc;
}

namespace {

// First k entries of a partial Fisher-Yates shuffle of 0..p-1, sorted.
std::vector<int> draw_support(SplitMix64& rng, int p, int k) {
  std::vector<int> idx(static_cast<std::size_t>(p));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    std::uint64_t j = i + rng.uniform_index(static_cast<std::uint64_t>(p - i));
    std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
  }
  std::vector<int> out(idx.begin(), idx.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

Matrix draw_theta(SplitMix64& rng, const SynthSpec& spec, int p, int q,
                  const std::vector<int>& support) {
  Matrix theta = Matrix::Zero(p, q);
  const int kMaxAttempts = 10000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    for (int i : support)
      for (int j = 0; j < q; ++j) theta(i, j) = spec.coef_scale * rng.normal();
    if (spec.beta_min <= 0.0) return theta;
    double min_norm = std::numeric_limits<double>::infinity();
    for (int i : support) min_norm = std::min(min_norm, theta.row(i).norm());
    if (min_norm >= spec.beta_min) return theta;
  }
  throw NumericalError(
      "generate: could not satisfy beta_min after 10000 redraws");
}

void fill_ate_maps(SynthDraw& draw, int q, bool with_population) {
  Vector mu = draw.data.X.colwise().mean().transpose();
  for (int t = 0; t < q; ++t) {
    for (int tp = 0; tp < q; ++tp) {
      if (t == tp) continue;
      double emp = sparse_response(draw.true_theta, draw.true_support, mu, t) -
                   sparse_response(draw.true_theta, draw.true_support, mu, tp);
      draw.true_ate_empirical[{t, tp}] = emp;
      if (with_population) draw.true_ate_population[{t, tp}] = 0.0;
    }
  }
}

}  // namespace

SynthDraw generate(const SynthSpec& spec) {
  spec.validate();
  SplitMix64 rng(spec.seed);
  const int p = spec.p, q = spec.q, n = spec.n;

  SynthDraw draw;
  draw.true_support = SupportSet::from_indices(draw_support(rng, p, spec.k), p);
  draw.true_theta = draw_theta(rng, spec, p, q, draw.true_support.indices);

  draw.true_phi = Matrix::Zero(p, q);
  std::vector<int> phi_rows = spec.phi_support;
  if (phi_rows.empty()) {
    phi_rows.resize(static_cast<std::size_t>(p));
    std::iota(phi_rows.begin(), phi_rows.end(), 0);
  } else {
    std::sort(phi_rows.begin(), phi_rows.end());
    phi_rows.erase(std::unique(phi_rows.begin(), phi_rows.end()),
                   phi_rows.end());
  }
  for (int i : phi_rows)
    for (int j = 0; j < q; ++j) draw.true_phi(i, j) = spec.phi_scale * rng.normal();

  draw.data.X.resize(n, p);
  draw.data.t.resize(n);
  draw.data.y.resize(n);
  draw.data.q = q;

  Vector x(p), scores(q), probs(q);
  for (int s = 0; s < n; ++s) {
    for (int i = 0; i < p; ++i) x(i) = rng.normal();
    if (spec.cov_chol.size() > 0) x = spec.cov_chol * x;
    draw.data.X.row(s) = x.transpose();

    scores = draw.true_phi.transpose() * x;
    double m = scores.maxCoeff();
    for (int j = 0; j < q; ++j) probs(j) = std::exp(scores(j) - m);
    probs /= probs.sum();
    int t = rng.categorical(probs);
    draw.data.t(s) = t;

    double eps = rng.normal();
    draw.data.y(s) = sparse_response(draw.true_theta, draw.true_support, x, t) +
                     spec.noise_sigma * eps;
  }

  fill_ate_maps(draw, q, /*with_population=*/true);
  return draw;
}

SynthDraw generate_semisynthetic(const Matrix& base_covariates,
                                 const IntVector& treatment,
                                 const SynthSpec& spec) {
  const int n = static_cast<int>(base_covariates.rows());
  const int p = static_cast<int>(base_covariates.cols());
  if (n < 1 || p < 1)
    throw DataError("generate_semisynthetic: empty covariate matrix");
  if (treatment.size() != n)
    throw DataError(
        "generate_semisynthetic: treatment length does not match covariates");
  if (!base_covariates.allFinite())
    throw DataError("generate_semisynthetic: covariates contain non-finite values");
  if (spec.k < 1 || spec.k > p)
    throw DataError("generate_semisynthetic: k must lie in [1, p]");
  if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma))
    throw DataError("generate_semisynthetic: noise_sigma must be finite and nonnegative");
  if (!(spec.coef_scale > 0.0) || !std::isfinite(spec.coef_scale))
    throw DataError("generate_semisynthetic: coef_scale must be finite and positive");

  int q = 0;
  for (int s = 0; s < n; ++s) {
    if (treatment(s) < 0)
      throw DataError("generate_semisynthetic: negative treatment label");
    q = std::max(q, treatment(s) + 1);
  }

  SynthDraw draw;
  draw.data.X = base_covariates;
  draw.data.t = treatment;
  draw.data.q = q;
  draw.data.y = Vector::Zero(n);
  draw.data.validate();  // rejects constant treatment and absent labels

  SplitMix64 rng(spec.seed);
  draw.true_support = SupportSet::from_indices(draw_support(rng, p, spec.k), p);
  draw.true_theta = draw_theta(rng, spec, p, q, draw.true_support.indices);
  draw.true_phi = Matrix::Zero(p, q);
  for (int s = 0; s < n; ++s) {
    Vector x = draw.data.X.row(s).transpose();
    double eps = rng.normal();
    draw.data.y(s) =
        sparse_response(draw.true_theta, draw.true_support, x, draw.data.t(s)) +
        spec.noise_sigma * eps;
  }

  fill_ate_maps(draw, q, /*with_population=*/false);
  return draw;
}

}  // namespace jointsel
