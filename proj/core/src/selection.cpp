#include "jointsel/selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <utility>

#include "jointsel/errors.hpp"
#include "jointsel/rng.hpp"
#include "multinomial.hpp"

namespace jointsel {

void SelectionConfig::validate() const {
  if (cv_folds < 0 || cv_folds == 1)
    throw DataError("cv_folds must be 0 (fixed lambda) or at least 2");
  if (top_m < 0) throw DataError("top_m must be nonnegative");
  if (mode == SelectionMode::kTreatmentRegression && top_m < 1)
    throw DataError("treatment-regression mode needs top_m >= 1");
  if (!lambda_grid.empty()) {
    for (double l : lambda_grid)
      if (!(l > 0.0) || !std::isfinite(l))
        throw DataError("lambda grid entries must be finite and positive");
    for (std::size_t g = 1; g < lambda_grid.size(); ++g)
      if (!(lambda_grid[g] < lambda_grid[g - 1]))
        throw DataError("lambda grid must be strictly decreasing");
  }
  solver.validate();
}

double lambda_grid_upper_bound(const MomentCache& cache) {
  double best = 0.0;
  for (int i = 0; i < cache.p; ++i) {
    double acc = 0.0;
    for (int j = 0; j < cache.q(); ++j) {
      double v = cache.cross[j](i);
      acc += v * v;
    }
    best = std::max(best, std::sqrt(acc));
  }
  return best;
}

std::vector<double> default_lambda_grid(const MomentCache& cache) {
  double top = lambda_grid_upper_bound(cache);
  if (!(top > 0.0)) top = 1e-12;  // outcome orthogonal to every covariate
  std::vector<double> grid(30);
  for (int g = 0; g < 30; ++g)
    grid[g] = top * std::pow(100.0, -static_cast<double>(g) / 29.0);
  return grid;
}

namespace {

// Per-cohort centering and pooled covariate scale. Sums run in canonical
// row order so the transform depends only on the multiset of rows per
// cohort, not their arrival order.
struct Transform {
  bool active = false;
  std::vector<Vector> x_mean;
  std::vector<double> y_mean;
  Vector scale;
};

Transform make_transform(const CohortDataset& data, bool active) {
  Transform tr;
  tr.active = active;
  const int p = data.p;
  const int q = data.q();
  tr.x_mean.assign(q, Vector::Zero(p));
  tr.y_mean.assign(q, 0.0);
  tr.scale = Vector::Ones(p);
  if (!active) return tr;

  Eigen::Index n_total = 0;
  std::vector<std::vector<Eigen::Index>> orders(q);
  for (int j = 0; j < q; ++j) {
    const Cohort& c = data.cohorts[j];
    orders[j] = canonical_row_order(c.X, c.y);
    Vector sx = Vector::Zero(p);
    double sy = 0.0;
    for (Eigen::Index r : orders[j]) {
      sx += c.X.row(r).transpose();
      sy += c.y(r);
    }
    double inv = 1.0 / static_cast<double>(c.X.rows());
    tr.x_mean[j] = sx * inv;
    tr.y_mean[j] = sy * inv;
    n_total += c.X.rows();
  }

  Vector ssq = Vector::Zero(p);
  for (int j = 0; j < q; ++j) {
    const Cohort& c = data.cohorts[j];
    for (Eigen::Index r : orders[j]) {
      Vector d = c.X.row(r).transpose() - tr.x_mean[j];
      ssq += d.cwiseProduct(d);
    }
  }
  for (int i = 0; i < p; ++i) {
    double s = std::sqrt(ssq(i) / static_cast<double>(n_total));
    tr.scale(i) = (s > 0.0 && std::isfinite(s)) ? s : 1.0;
  }
  return tr;
}

CohortDataset apply_transform(const CohortDataset& data, const Transform& tr) {
  if (!tr.active) return data;
  CohortDataset out;
  out.p = data.p;
  out.cohorts.resize(data.q());
  for (int j = 0; j < data.q(); ++j) {
    const Cohort& c = data.cohorts[j];
    Cohort& o = out.cohorts[j];
    o.X = c.X.rowwise() - tr.x_mean[j].transpose();
    o.X.array().rowwise() /= tr.scale.transpose().array();
    o.y = c.y.array() - tr.y_mean[j];
  }
  return out;
}

Matrix back_scale(const Matrix& theta_std, const Transform& tr) {
  if (!tr.active) return theta_std;
  Matrix out = theta_std;
  for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) /= tr.scale(i);
  return out;
}

double resolve_gamma(Penalty kind, double gamma) {
  if (gamma > 0.0) return gamma;
  return kind == Penalty::kScad ? 3.7 : 3.0;
}

RegularizerSpec make_reg(Penalty kind, double lambda, double gamma) {
  switch (kind) {
    case Penalty::kMcp:
      return RegularizerSpec::mcp(lambda, gamma);
    case Penalty::kScad:
      return RegularizerSpec::scad(lambda, gamma);
    default:
      return RegularizerSpec::l1(lambda);
  }
}

double resolve_radius(const MomentCache& cache, const SolverConfig& sc) {
  return sc.radius_R > 0.0 ? sc.radius_R : default_radius(cache);
}

double resolve_step(const MomentCache& cache, const SolverConfig& sc) {
  if (sc.step_init > 0.0) return sc.step_init;
  double lam = max_gram_eigenvalue(cache);
  return lam > 0.0 ? 1.0 / lam : 1.0;
}

struct PathStep {
  double lambda;
  bool converged;
  int iterations;
  double objective;
};

// Warm-started fits down grid[0..last]; visit sees each standardized-scale
// coefficient matrix. The path always starts from zero at the largest value.
std::vector<PathStep> fit_path(
    const MomentCache& cache, const std::vector<double>& grid, int last,
    const SelectionConfig& cfg, double radius, double step,
    const std::function<void(int, const Matrix&)>& visit) {
  std::vector<PathStep> steps;
  double gamma = resolve_gamma(cfg.reg_kind, cfg.gamma);
  SolverConfig sc = cfg.solver;
  sc.radius_R = radius;
  sc.step_init = step;
  sc.theta_init = Matrix();
  for (int g = 0; g <= last; ++g) {
    RegularizerSpec reg = make_reg(cfg.reg_kind, grid[g], gamma);
    FitResult fr = fit_moments(cache, reg, sc);
    steps.push_back({grid[g], fr.converged, fr.iterations, fr.final_objective});
    visit(g, fr.theta_hat);
    sc.theta_init = fr.theta_hat;
  }
  return steps;
}

MomentCache single_column(const MomentCache& cache, int j) {
  MomentCache out;
  out.p = cache.p;
  out.gram = {cache.gram[j]};
  out.cross = {cache.cross[j]};
  return out;
}

struct GridFits {
  std::vector<Matrix> theta;  // standardized scale, one per grid value
  std::vector<PathStep> steps;
  std::vector<std::vector<SupportSet>> cohort_supports;  // independent mode
};

GridFits fit_grid(const MomentCache& cache, const std::vector<double>& grid,
                  int last, const SelectionConfig& cfg) {
  GridFits out;
  out.theta.assign(last + 1, Matrix::Zero(cache.p, cache.q()));
  if (cfg.mode == SelectionMode::kJoint) {
    double radius = resolve_radius(cache, cfg.solver);
    double step = resolve_step(cache, cfg.solver);
    out.steps = fit_path(cache, grid, last, cfg, radius, step,
                         [&](int g, const Matrix& th) { out.theta[g] = th; });
    return out;
  }
  out.cohort_supports.assign(last + 1,
                             std::vector<SupportSet>(cache.q()));
  for (int j = 0; j < cache.q(); ++j) {
    MomentCache cj = single_column(cache, j);
    double radius = resolve_radius(cj, cfg.solver);
    double step = resolve_step(cj, cfg.solver);
    auto steps =
        fit_path(cj, grid, last, cfg, radius, step,
                 [&](int g, const Matrix& th) {
                   out.theta[g].col(j) = th.col(0);
                   out.cohort_supports[g][j] = SupportSet::from_nonzero_rows(th);
                 });
    out.steps.insert(out.steps.end(), steps.begin(), steps.end());
  }
  return out;
}

struct FoldPlan {
  // Per cohort: raw row index at each canonical rank, and the fold id
  // assigned to that rank (seeded shuffle, round-robin over ranks).
  std::vector<std::vector<Eigen::Index>> order;
  std::vector<std::vector<int>> fold_of_rank;
};

FoldPlan plan_folds(const CohortDataset& data, int folds, std::uint64_t seed) {
  FoldPlan plan;
  const int q = data.q();
  plan.order.resize(q);
  plan.fold_of_rank.resize(q);
  for (int j = 0; j < q; ++j) {
    const Cohort& c = data.cohorts[j];
    Eigen::Index nj = c.X.rows();
    if (nj < folds)
      throw DataError("cohort " + std::to_string(j) +
                      " has fewer rows than cv_folds");
    plan.order[j] = canonical_row_order(c.X, c.y);
    std::vector<Eigen::Index> pos(nj);
    std::iota(pos.begin(), pos.end(), Eigen::Index{0});
    SplitMix64 rng(substream(seed, static_cast<std::uint64_t>(j)));
    for (Eigen::Index i = nj - 1; i > 0; --i) {
      std::uint64_t k = rng.uniform_index(static_cast<std::uint64_t>(i) + 1);
      std::swap(pos[i], pos[k]);
    }
    plan.fold_of_rank[j].assign(nj, 0);
    for (Eigen::Index m = 0; m < nj; ++m)
      plan.fold_of_rank[j][pos[m]] = static_cast<int>(m % folds);
  }
  return plan;
}

std::pair<int, std::vector<double>> cv_core(const CohortDataset& data,
                                            const SelectionConfig& cfg,
                                            const std::vector<double>& grid) {
  const int q = data.q();
  const int G = static_cast<int>(grid.size());
  FoldPlan plan = plan_folds(data, cfg.cv_folds, cfg.seed);

  std::vector<double> table(G, 0.0);
  for (int f = 0; f < cfg.cv_folds; ++f) {
    CohortDataset train;
    train.p = data.p;
    train.cohorts.resize(q);
    std::vector<std::vector<Eigen::Index>> held(q);
    for (int j = 0; j < q; ++j) {
      const Cohort& c = data.cohorts[j];
      std::vector<Eigen::Index> rows;
      for (std::size_t r = 0; r < plan.order[j].size(); ++r) {
        if (plan.fold_of_rank[j][r] == f)
          held[j].push_back(plan.order[j][r]);
        else
          rows.push_back(plan.order[j][r]);
      }
      Cohort& tc = train.cohorts[j];
      tc.X.resize(static_cast<Eigen::Index>(rows.size()), data.p);
      tc.y.resize(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        tc.X.row(static_cast<Eigen::Index>(r)) = c.X.row(rows[r]);
        tc.y(static_cast<Eigen::Index>(r)) = c.y(rows[r]);
      }
    }

    Transform tr = make_transform(train, cfg.standardize);
    CohortDataset work = apply_transform(train, tr);
    MomentCache cache = compute_moments(work);
    GridFits fits = fit_grid(cache, grid, G - 1, cfg);

    for (int g = 0; g < G; ++g) {
      Matrix theta = back_scale(fits.theta[g], tr);
      double score = 0.0;
      for (int j = 0; j < q; ++j) {
        const Cohort& c = data.cohorts[j];
        double sse = 0.0;
        for (Eigen::Index r : held[j]) {
          double pred =
              cfg.standardize
                  ? tr.y_mean[j] +
                        theta.col(j).dot(c.X.row(r).transpose() - tr.x_mean[j])
                  : theta.col(j).dot(c.X.row(r).transpose());
          double d = c.y(r) - pred;
          sse += d * d;
        }
        score += sse / static_cast<double>(held[j].size());
      }
      table[g] += score;
    }
  }
  for (double& v : table) v /= static_cast<double>(cfg.cv_folds);

  int best = 0;
  for (int g = 1; g < G; ++g)
    if (table[g] < table[best]) best = g;  // ties keep the larger lambda
  return {best, table};
}

}  // namespace

std::pair<double, std::vector<double>> cross_validate(
    const CohortDataset& data, const SelectionConfig& config) {
  data.validate();
  config.validate();
  if (config.cv_folds < 2)
    throw DataError("cross_validate needs cv_folds >= 2");
  if (config.mode == SelectionMode::kTreatmentRegression)
    throw DataError("cross_validate does not apply to treatment-regression mode");
  std::vector<double> grid = config.lambda_grid;
  if (grid.empty()) {
    Transform tr = make_transform(data, config.standardize);
    grid = default_lambda_grid(compute_moments(apply_transform(data, tr)));
  }
  auto [idx, table] = cv_core(data, config, grid);
  return {grid[idx], std::move(table)};
}

SelectionResult select(const CohortDataset& data,
                       const SelectionConfig& config) {
  data.validate();
  config.validate();

  SelectionResult res;

  if (config.mode == SelectionMode::kTreatmentRegression) {
    Eigen::Index n = 0;
    for (const Cohort& c : data.cohorts) n += c.X.rows();
    PooledDataset pooled;
    pooled.X.resize(n, data.p);
    pooled.t.resize(n);
    pooled.y.resize(n);
    pooled.q = data.q();
    Eigen::Index at = 0;
    for (int j = 0; j < data.q(); ++j) {
      const Cohort& c = data.cohorts[j];
      for (Eigen::Index r = 0; r < c.X.rows(); ++r, ++at) {
        pooled.X.row(at) = c.X.row(r);
        pooled.t(at) = j;
        pooled.y(at) = c.y(r);
      }
    }
    res.support = select_by_treatment_regression(pooled, config.top_m);
    res.theta = Matrix::Zero(data.p, data.q());
    return res;
  }

  Transform tr = make_transform(data, config.standardize);
  CohortDataset work = apply_transform(data, tr);
  MomentCache cache = compute_moments(work);
  res.lambda_grid =
      config.lambda_grid.empty() ? default_lambda_grid(cache) : config.lambda_grid;

  int chosen_idx = 0;
  if (config.cv_folds >= 2) {
    auto [idx, table] = cv_core(data, config, res.lambda_grid);
    chosen_idx = idx;
    res.cv_table = std::move(table);
  }
  res.chosen_lambda = res.lambda_grid[chosen_idx];

  GridFits fits = fit_grid(cache, res.lambda_grid, chosen_idx, config);
  bool any_converged = false;
  for (const PathStep& s : fits.steps) any_converged |= s.converged;
  if (!any_converged) {
    std::string msg = "selection: no proximal fit converged on the path;";
    char buf[128];
    for (const PathStep& s : fits.steps) {
      std::snprintf(buf, sizeof(buf), " lambda=%.6g iters=%d objective=%.6g;",
                    s.lambda, s.iterations, s.objective);
      msg += buf;
    }
    throw NumericalError(msg);
  }

  res.theta = back_scale(fits.theta[chosen_idx], tr);
  res.support = SupportSet::from_nonzero_rows(fits.theta[chosen_idx]);
  if (config.mode == SelectionMode::kIndependent)
    res.per_cohort_supports = fits.cohort_supports[chosen_idx];
  return res;
}

SupportSet select_by_treatment_regression(const PooledDataset& data, int top_m,
                                          double ridge) {
  data.validate();
  const Eigen::Index n = data.n();
  const int p = static_cast<int>(data.p());
  if (top_m < 1 || top_m > p)
    throw DataError("top_m must lie in [1, " + std::to_string(p) + "]");
  if (!(ridge >= 0.0) || !std::isfinite(ridge))
    throw DataError("ridge must be finite and nonnegative");

  // Canonical pooled order keyed by (covariate row, label, outcome) makes
  // the ranking exactly invariant to row permutation.
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < data.X.cols(); ++c) {
      if (data.X(a, c) < data.X(b, c)) return true;
      if (data.X(a, c) > data.X(b, c)) return false;
    }
    if (data.t(a) != data.t(b)) return data.t(a) < data.t(b);
    return data.y(a) < data.y(b);
  });

  Matrix Xs(n, p);
  IntVector ts(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    Xs.row(r) = data.X.row(order[r]);
    ts(r) = data.t(order[r]);
  }

  Vector mean = Xs.colwise().mean().transpose();
  Xs.rowwise() -= mean.transpose();
  Vector sd(p);
  for (int i = 0; i < p; ++i) {
    double s = std::sqrt(Xs.col(i).squaredNorm() / static_cast<double>(n));
    sd(i) = (s > 0.0 && std::isfinite(s)) ? s : 1.0;
  }
  Xs.array().rowwise() /= sd.transpose().array();

  detail::MultinomialModel model =
      detail::fit_multinomial_raw(Xs, ts, data.q, ridge);
  if (!model.converged)
    throw NumericalError(
        "treatment regression did not reach the gradient tolerance "
        "(gradient norm " +
        std::to_string(model.grad_norm) + " after " +
        std::to_string(model.iterations) + " iterations)");

  std::vector<int> idx(p);
  std::iota(idx.begin(), idx.end(), 0);
  Vector score(p);
  for (int i = 0; i < p; ++i) score(i) = model.W.row(i).cwiseAbs().maxCoeff();
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (score(a) != score(b)) return score(a) > score(b);
    return a < b;
  });
  idx.resize(top_m);
  return SupportSet::from_indices(std::move(idx), p);
}

}  // namespace jointsel
