#include "jointsel/data.hpp"

#include "jointsel/errors.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace jointsel {

SupportSet SupportSet::from_indices(std::vector<int> idx, int p) {
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  if (!idx.empty() && (idx.front() < 0 || idx.back() >= p))
    throw DataError("support index out of range [0, " + std::to_string(p) + ")");
  return SupportSet{std::move(idx), p};
}

SupportSet SupportSet::from_nonzero_rows(const Matrix& theta) {
  SupportSet s;
  s.p = static_cast<int>(theta.rows());
  for (Eigen::Index i = 0; i < theta.rows(); ++i)
    if (!theta.row(i).isZero(0.0)) s.indices.push_back(static_cast<int>(i));
  return s;
}

SupportSet SupportSet::full(int p) {
  SupportSet s;
  s.p = p;
  s.indices.resize(p);
  std::iota(s.indices.begin(), s.indices.end(), 0);
  return s;
}

bool SupportSet::contains(int i) const {
  return std::binary_search(indices.begin(), indices.end(), i);
}

double jaccard(const SupportSet& a, const SupportSet& b) {
  if (a.indices.empty() && b.indices.empty()) return 1.0;
  std::vector<int> tmp;
  std::set_intersection(a.indices.begin(), a.indices.end(), b.indices.begin(),
                        b.indices.end(), std::back_inserter(tmp));
  double inter = static_cast<double>(tmp.size());
  double uni =
      static_cast<double>(a.indices.size() + b.indices.size()) - inter;
  return inter / uni;
}

void CohortDataset::validate() const {
  if (q() < 2) throw DataError("need at least 2 treatment cohorts, got " +
                               std::to_string(q()));
  if (p < 1) throw DataError("covariate dimension must be >= 1");
  for (int j = 0; j < q(); ++j) {
    const Cohort& c = cohorts[j];
    if (c.X.rows() < 1)
      throw DataError("cohort " + std::to_string(j) + " is empty");
    if (c.X.cols() != p)
      throw DataError("cohort " + std::to_string(j) + " has width " +
                      std::to_string(c.X.cols()) + ", expected " +
                      std::to_string(p));
    if (c.y.size() != c.X.rows())
      throw DataError("cohort " + std::to_string(j) +
                      " outcome length does not match design rows");
    if (!c.X.allFinite() || !c.y.allFinite())
      throw DataError("cohort " + std::to_string(j) +
                      " contains non-finite entries");
  }
}

void PooledDataset::validate() const {
  if (q < 2) throw DataError("need at least 2 treatment levels, got " +
                             std::to_string(q));
  if (t.size() != X.rows() || y.size() != X.rows())
    throw DataError("treatment/outcome length does not match covariate rows");
  if (!X.allFinite() || !y.allFinite())
    throw DataError("pooled data contains non-finite entries");
  std::vector<Eigen::Index> counts(q, 0);
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (t[i] < 0 || t[i] >= q)
      throw DataError("treatment label " + std::to_string(t[i]) +
                      " outside {0.." + std::to_string(q - 1) + "} at row " +
                      std::to_string(i));
    ++counts[t[i]];
  }
  for (int j = 0; j < q; ++j)
    if (counts[j] == 0)
      throw DataError("treatment label " + std::to_string(j) + " absent");
}

CohortDataset partition_by_treatment(const PooledDataset& data) {
  data.validate();
  CohortDataset out;
  out.p = static_cast<int>(data.p());
  out.cohorts.resize(data.q);
  std::vector<Eigen::Index> counts(data.q, 0);
  for (Eigen::Index i = 0; i < data.n(); ++i) ++counts[data.t[i]];
  for (int j = 0; j < data.q; ++j) {
    out.cohorts[j].X.resize(counts[j], data.p());
    out.cohorts[j].y.resize(counts[j]);
  }
  std::vector<Eigen::Index> fill(data.q, 0);
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    int j = data.t[i];
    out.cohorts[j].X.row(fill[j]) = data.X.row(i);
    out.cohorts[j].y[fill[j]] = data.y[i];
    ++fill[j];
  }
  return out;
}

std::vector<Eigen::Index> canonical_row_order(const Matrix& X,
                                              const Vector& y) {
  std::vector<Eigen::Index> order(X.rows());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
      if (X(a, c) < X(b, c)) return true;
      if (X(a, c) > X(b, c)) return false;
    }
    return y[a] < y[b];
  });
  return order;
}

MomentCache compute_moments(const CohortDataset& data) {
  MomentCache cache;
  cache.p = data.p;
  cache.gram.reserve(data.q());
  cache.cross.reserve(data.q());
  for (const Cohort& c : data.cohorts) {
    if (c.X.cols() != data.p || c.y.size() != c.X.rows() || c.X.rows() == 0)
      throw DataError("moment computation on inconsistent cohort");
    std::vector<Eigen::Index> order = canonical_row_order(c.X, c.y);
    Matrix Xs(c.X.rows(), c.X.cols());
    Vector ys(c.y.size());
    for (Eigen::Index r = 0; r < c.X.rows(); ++r) {
      Xs.row(r) = c.X.row(order[r]);
      ys[r] = c.y[order[r]];
    }
    double inv_n = 1.0 / static_cast<double>(Xs.rows());
    cache.gram.push_back((Xs.transpose() * Xs) * inv_n);
    cache.cross.push_back((Xs.transpose() * ys) * inv_n);
  }
  return cache;
}

double max_gram_eigenvalue(const MomentCache& cache, int iters) {
  double best = 0.0;
  for (const Matrix& G : cache.gram) {
    Vector v = Vector::Ones(G.rows());
    double nv = v.norm();
    if (nv == 0.0) continue;
    v /= nv;
    double lam = 0.0;
    for (int it = 0; it < iters; ++it) {
      Vector w = G * v;
      double nw = w.norm();
      if (nw == 0.0) {
        lam = 0.0;
        break;
      }
      lam = nw;  // Rayleigh quotient of the normalized iterate
      v = w / nw;
    }
    best = std::max(best, lam);
  }
  return best;
}

}  // namespace jointsel
