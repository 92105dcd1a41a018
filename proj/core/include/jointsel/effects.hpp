#pragma once

#include "jointsel/data.hpp"
#include "jointsel/selection.hpp"
#include "jointsel/types.hpp"

#include <cstdint>
#include <map>
#include <utility>

namespace jointsel {

// Clip fraction above which doubly robust results carry a warning flag.
inline constexpr double kClipWarningFraction = 0.05;

// Contrast of fitted outcome models at a covariate vector:
// (theta_:t - theta_:t')^T s.
double plugin_ite(const Matrix& theta_hat, const Vector& s, int t, int t_prime);

// Same contrast at a mean covariate vector; identical arithmetic, separate
// name to keep call sites readable.
double plugin_ate(const Matrix& theta_hat, const Vector& mu, int t,
                  int t_prime);

struct PropensityModel {
  SupportSet support;    // covariates the model reads
  Matrix coefficients;   // |S| x q, class-0 column identically zero
  Vector intercepts;     // q, first entry zero
  double clip_lo = 0.01;
  double clip_hi = 0.99;

  // Class probabilities at a full-length covariate vector (only support
  // coordinates are read). predict_clipped truncates into
  // [clip_lo, clip_hi] without renormalizing.
  Vector predict(const Vector& x) const;
  Vector predict_clipped(const Vector& x) const;
};

// Multinomial logistic regression of the treatment on the support
// covariates, ridge-penalized, fitted to the gradient tolerance; failure to
// reach it is an error. Internally standardized for conditioning, with the
// coefficients mapped back to the raw covariate scale.
PropensityModel fit_propensity(const PooledDataset& data,
                               const SupportSet& support,
                               double ridge = 1e-3);

struct DrEffect {
  double value = 0.0;
  double clip_fraction = 0.0;  // share of samples with any clipped class
  bool clip_warning = false;   // clip_fraction above the reporting threshold
};

// Augmented inverse-propensity estimate of E[Y(t)] - E[Y(t')] with the
// outcome model refit by least squares on the support. The two treatment
// arguments enter antisymmetrically sample by sample, so swapping them
// flips the sign exactly. outcome_theta, when given, replaces the refit
// (full p x q, used by diagnostics that plug in a known coefficient
// matrix).
DrEffect dr_effect(const PooledDataset& data, const SupportSet& support, int t,
                   int t_prime, const PropensityModel& propensity,
                   const Matrix* outcome_theta = nullptr);

enum class EffectMethod { kPlugin, kDoublyRobust };

struct PipelineConfig {
  double selection_fraction = 0.2;  // share of rows used to pick the support
  int n_splits = 20;
  std::uint64_t seed = 0;
  double propensity_ridge = 1e-3;
  SelectionConfig selection;

  void validate() const;
};

struct EffectEstimate {
  // Estimated counterfactual means E[Y(t)] at the estimation-half covariate
  // mean, and all ordered pairwise contrasts (diagonal entries are zero).
  std::map<int, double> tau;
  std::map<std::pair<int, int>, double> pairwise;
  // Sample standard deviations across splits; empty for a single split.
  std::map<int, double> tau_std;
  std::map<std::pair<int, int>, double> pairwise_std;
  EffectMethod method = EffectMethod::kPlugin;
  int n_splits = 1;
  double mean_support_size = 0.0;
  double mean_clip_fraction = 0.0;  // doubly robust only
  int clip_warnings = 0;
};

// Sample-split pipeline: per split, select on a random selection_fraction
// of rows and estimate effects on the rest, then aggregate across splits.
// Splits that leave a treatment level absent from either part are redrawn,
// up to 100 attempts each.
EffectEstimate two_stage_pipeline(const PooledDataset& data,
                                  EffectMethod method,
                                  const PipelineConfig& config);

}  // namespace jointsel
