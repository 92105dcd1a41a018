#include "jointsel/effects.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "jointsel/errors.hpp"
#include "jointsel/rng.hpp"
#include "jointsel/solver.hpp"
#include "multinomial.hpp"

namespace jointsel {

namespace {

void check_contrast_args(const Matrix& theta, Eigen::Index s_len, int t,
                         int t_prime) {
  if (s_len != theta.rows())
    throw DataError("covariate vector length " + std::to_string(s_len) +
                    " does not match coefficient rows " +
                    std::to_string(theta.rows()));
  int q = static_cast<int>(theta.cols());
  if (t < 0 || t >= q || t_prime < 0 || t_prime >= q)
    throw DataError("treatment index outside {0.." + std::to_string(q - 1) +
                    "}");
}

}  // namespace

double plugin_ite(const Matrix& theta_hat, const Vector& s, int t,
                  int t_prime) {
  check_contrast_args(theta_hat, s.size(), t, t_prime);
  return theta_hat.col(t).dot(s) - theta_hat.col(t_prime).dot(s);
}

double plugin_ate(const Matrix& theta_hat, const Vector& mu, int t,
                  int t_prime) {
  check_contrast_args(theta_hat, mu.size(), t, t_prime);
  return theta_hat.col(t).dot(mu) - theta_hat.col(t_prime).dot(mu);
}

Vector PropensityModel::predict(const Vector& x) const {
  if (x.size() != support.p)
    throw DataError("propensity input length does not match covariate count");
  const int q = static_cast<int>(intercepts.size());
  Vector scores = intercepts;
  for (int c = 0; c < q; ++c)
    for (std::size_t r = 0; r < support.indices.size(); ++r)
      scores(c) += coefficients(static_cast<Eigen::Index>(r), c) *
                   x(support.indices[r]);
  double m = scores.maxCoeff();
  Vector probs(q);
  double denom = 0.0;
  for (int c = 0; c < q; ++c) {
    probs(c) = std::exp(scores(c) - m);
    denom += probs(c);
  }
  probs /= denom;
  return probs;
}

Vector PropensityModel::predict_clipped(const Vector& x) const {
  Vector probs = predict(x);
  for (Eigen::Index c = 0; c < probs.size(); ++c)
    probs(c) = std::min(clip_hi, std::max(clip_lo, probs(c)));
  return probs;
}

PropensityModel fit_propensity(const PooledDataset& data,
                               const SupportSet& support, double ridge) {
  data.validate();
  if (support.indices.empty())
    throw DataError("propensity fit needs a nonempty support");
  if (support.p != static_cast<int>(data.p()))
    throw DataError("support refers to a different covariate count");
  if (!(ridge >= 0.0) || !std::isfinite(ridge))
    throw DataError("ridge must be finite and nonnegative");

  const Eigen::Index n = data.n();
  const int ps = support.size();
  Matrix Xs(n, ps);
  for (int r = 0; r < ps; ++r) Xs.col(r) = data.X.col(support.indices[r]);

  // Standardize for conditioning; coefficients are mapped back to the raw
  // scale afterwards.
  Vector mean = Xs.colwise().mean().transpose();
  Xs.rowwise() -= mean.transpose();
  Vector sd(ps);
  for (int r = 0; r < ps; ++r) {
    double s = std::sqrt(Xs.col(r).squaredNorm() / static_cast<double>(n));
    sd(r) = (s > 0.0 && std::isfinite(s)) ? s : 1.0;
  }
  Xs.array().rowwise() /= sd.transpose().array();

  detail::MultinomialModel model =
      detail::fit_multinomial_raw(Xs, data.t, data.q, ridge);
  if (!model.converged)
    throw NumericalError(
        "propensity fit did not reach the gradient tolerance (gradient norm " +
        std::to_string(model.grad_norm) + " after " +
        std::to_string(model.iterations) + " iterations)");

  PropensityModel out;
  out.support = support;
  out.coefficients = Matrix::Zero(ps, data.q);
  out.intercepts = Vector::Zero(data.q);
  for (int c = 0; c < data.q; ++c) {
    double shift = 0.0;
    for (int r = 0; r < ps; ++r) {
      out.coefficients(r, c) = model.W(r, c) / sd(r);
      shift += model.W(r, c) * mean(r) / sd(r);
    }
    out.intercepts(c) = model.b(c) - shift;
  }
  return out;
}

DrEffect dr_effect(const PooledDataset& data, const SupportSet& support, int t,
                   int t_prime, const PropensityModel& propensity,
                   const Matrix* outcome_theta) {
  data.validate();
  if (support.indices.empty())
    throw DataError("doubly robust estimation needs a nonempty support");
  if (t < 0 || t >= data.q || t_prime < 0 || t_prime >= data.q)
    throw DataError("treatment index outside {0.." + std::to_string(data.q - 1) +
                    "}");

  Matrix theta;
  if (outcome_theta != nullptr) {
    if (outcome_theta->rows() != data.p() || outcome_theta->cols() != data.q)
      throw DataError("outcome coefficient matrix has the wrong shape");
    theta = *outcome_theta;
  } else {
    theta = fit_restricted(partition_by_treatment(data), support);
  }

  const Eigen::Index n = data.n();
  double acc = 0.0;
  Eigen::Index clipped = 0;
  for (Eigen::Index s = 0; s < n; ++s) {
    Vector x = data.X.row(s).transpose();
    Vector raw = propensity.predict(x);
    if (raw(t) < propensity.clip_lo || raw(t) > propensity.clip_hi ||
        raw(t_prime) < propensity.clip_lo || raw(t_prime) > propensity.clip_hi)
      ++clipped;
    Vector e = raw;
    for (Eigen::Index c = 0; c < e.size(); ++c)
      e(c) = std::min(propensity.clip_hi, std::max(propensity.clip_lo, e(c)));

    double m_t = theta.col(t).dot(x);
    double m_tp = theta.col(t_prime).dot(x);
    double term_t = m_t + (data.t(s) == t ? (data.y(s) - m_t) / e(t) : 0.0);
    double term_tp =
        m_tp + (data.t(s) == t_prime ? (data.y(s) - m_tp) / e(t_prime) : 0.0);
    acc += term_t - term_tp;
  }

  DrEffect out;
  out.value = acc / static_cast<double>(n);
  out.clip_fraction =
      static_cast<double>(clipped) / static_cast<double>(n);
  out.clip_warning = out.clip_fraction > kClipWarningFraction;
  if (!std::isfinite(out.value))
    throw NumericalError("doubly robust estimate is not finite");
  return out;
}

void PipelineConfig::validate() const {
  if (!(selection_fraction > 0.0) || !(selection_fraction < 1.0))
    throw DataError("selection_fraction must lie strictly in (0, 1)");
  if (n_splits < 1) throw DataError("n_splits must be at least 1");
  if (!(propensity_ridge >= 0.0) || !std::isfinite(propensity_ridge))
    throw DataError("propensity_ridge must be finite and nonnegative");
  selection.validate();
}

namespace {

PooledDataset subset_rows(const PooledDataset& data,
                          const std::vector<Eigen::Index>& rows) {
  PooledDataset out;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), data.p());
  out.t.resize(static_cast<Eigen::Index>(rows.size()));
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  out.q = data.q;
  out.covariate_names = data.covariate_names;
  out.treatment_levels = data.treatment_levels;
  out.treatment_name = data.treatment_name;
  out.outcome_name = data.outcome_name;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.X.row(static_cast<Eigen::Index>(r)) = data.X.row(rows[r]);
    out.t(static_cast<Eigen::Index>(r)) = data.t(rows[r]);
    out.y(static_cast<Eigen::Index>(r)) = data.y(rows[r]);
  }
  return out;
}

bool all_levels_present(const PooledDataset& data,
                        const std::vector<Eigen::Index>& rows) {
  std::vector<char> seen(data.q, 0);
  for (Eigen::Index r : rows) seen[data.t(r)] = 1;
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

}  // namespace

EffectEstimate two_stage_pipeline(const PooledDataset& data,
                                  EffectMethod method,
                                  const PipelineConfig& config) {
  data.validate();
  config.validate();
  const int q = data.q;

  std::map<int, std::vector<double>> tau_runs;
  std::map<std::pair<int, int>, std::vector<double>> pair_runs;
  double support_total = 0.0;
  double clip_total = 0.0;
  int clip_warnings = 0;

  for (int split = 0; split < config.n_splits; ++split) {
    SplitMix64 rng(substream(config.seed, static_cast<std::uint64_t>(split)));
    std::vector<Eigen::Index> sel_rows, est_rows;
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      sel_rows.clear();
      est_rows.clear();
      for (Eigen::Index r = 0; r < data.n(); ++r) {
        if (rng.uniform() < config.selection_fraction)
          sel_rows.push_back(r);
        else
          est_rows.push_back(r);
      }
      ok = !sel_rows.empty() && !est_rows.empty() &&
           all_levels_present(data, sel_rows) &&
           all_levels_present(data, est_rows);
    }
    if (!ok)
      throw DataError(
          "two_stage_pipeline: no split kept every treatment level on both "
          "sides after 100 attempts");

    PooledDataset sel_data = subset_rows(data, sel_rows);
    PooledDataset est_data = subset_rows(data, est_rows);

    SelectionConfig sel_cfg = config.selection;
    sel_cfg.seed =
        substream(config.seed, 0x100000000ULL + static_cast<std::uint64_t>(split));
    SelectionResult sres = select(partition_by_treatment(sel_data), sel_cfg);
    if (sres.support.indices.empty())
      throw DataError("two_stage_pipeline: selection stage returned an empty "
                      "support on split " +
                      std::to_string(split));
    support_total += sres.support.size();

    CohortDataset est_cohorts = partition_by_treatment(est_data);
    Matrix theta = fit_restricted(est_cohorts, sres.support);
    Vector mu = est_data.X.colwise().mean().transpose();

    if (method == EffectMethod::kPlugin) {
      std::vector<double> tau(q);
      for (int c = 0; c < q; ++c) {
        tau[c] = theta.col(c).dot(mu);
        tau_runs[c].push_back(tau[c]);
      }
      for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b)
          pair_runs[{a, b}].push_back(tau[a] - tau[b]);
    } else {
      PropensityModel prop =
          fit_propensity(est_data, sres.support, config.propensity_ridge);
      const Eigen::Index n_est = est_data.n();
      std::vector<double> tau_acc(q, 0.0);
      Matrix pair_acc = Matrix::Zero(q, q);
      Eigen::Index clipped = 0;
      Vector term(q);
      for (Eigen::Index s = 0; s < n_est; ++s) {
        Vector x = est_data.X.row(s).transpose();
        Vector raw = prop.predict(x);
        bool any_clip = false;
        Vector e = raw;
        for (int c = 0; c < q; ++c) {
          if (raw(c) < prop.clip_lo || raw(c) > prop.clip_hi) any_clip = true;
          e(c) = std::min(prop.clip_hi, std::max(prop.clip_lo, raw(c)));
        }
        if (any_clip) ++clipped;
        for (int c = 0; c < q; ++c) {
          double m = theta.col(c).dot(x);
          term(c) =
              m + (est_data.t(s) == c ? (est_data.y(s) - m) / e(c) : 0.0);
          tau_acc[c] += term(c);
        }
        for (int a = 0; a < q; ++a)
          for (int b = 0; b < q; ++b) pair_acc(a, b) += term(a) - term(b);
      }
      double inv = 1.0 / static_cast<double>(n_est);
      for (int c = 0; c < q; ++c) tau_runs[c].push_back(tau_acc[c] * inv);
      for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b)
          pair_runs[{a, b}].push_back(pair_acc(a, b) * inv);
      double frac = static_cast<double>(clipped) / static_cast<double>(n_est);
      clip_total += frac;
      if (frac > kClipWarningFraction) ++clip_warnings;
    }
  }

  EffectEstimate out;
  out.method = method;
  out.n_splits = config.n_splits;
  out.mean_support_size = support_total / config.n_splits;
  if (method == EffectMethod::kDoublyRobust) {
    out.mean_clip_fraction = clip_total / config.n_splits;
    out.clip_warnings = clip_warnings;
  }

  auto mean_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto std_of = [&](const std::vector<double>& v, double m) {
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
  };

  for (auto& [c, runs] : tau_runs) {
    double m = mean_of(runs);
    out.tau[c] = m;
    if (config.n_splits >= 2) out.tau_std[c] = std_of(runs, m);
  }
  for (auto& [key, runs] : pair_runs) {
    double m = mean_of(runs);
    out.pairwise[key] = m;
    if (config.n_splits >= 2) out.pairwise_std[key] = std_of(runs, m);
  }
  return out;
}

}  // namespace jointsel
