#include "ibex/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

#include "ibex/error.hpp"
#include "ibex/random.hpp"

namespace ibex {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d += (a[k] - b[k]) * (a[k] - b[k]);
  return d;
}

}  // namespace

SampleSet::SampleSet(Matrix means, double sigma2) : means_(std::move(means)), sigma2_(sigma2) {
  if (means_.rows() < 2 || means_.cols() == 0)
    throw Error(ErrorCode::BadShape, "need at least two samples with one dimension");
  for (double v : means_.data())
    if (!std::isfinite(v)) throw Error(ErrorCode::OutOfRange, "sample entries must be finite");
  if (!(sigma2_ > 0.0) || !std::isfinite(sigma2_))
    throw Error(ErrorCode::OutOfRange, "sigma2 must be positive");
}

double kde_mi_upper(const SampleSet& s) {
  const std::size_t n = s.size();
  const double scale = 1.0 / (2.0 * s.sigma2());
  std::vector<double> exponents(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k)
      exponents[k] = -squared_distance(s.means().row(i), s.means().row(k)) * scale;
    // log-sum-exp; the self term keeps the maximum at 0.
    const double top = *std::max_element(exponents.begin(), exponents.end());
    double acc = 0.0;
    for (double e : exponents) acc += std::exp(e - top);
    total += top + std::log(acc) - std::log(static_cast<double>(n));
  }
  const double bits = -total / static_cast<double>(n) / std::numbers::ln2;
  return std::clamp(bits, 0.0, std::log2(static_cast<double>(n)));
}

Clustering dbscan_clusters(const SampleSet& s, double eps, std::size_t min_pts) {
  if (!(eps > 0.0)) throw Error(ErrorCode::OutOfRange, "eps must be positive");
  if (min_pts < 1) throw Error(ErrorCode::OutOfRange, "min_pts must be >= 1");
  const std::size_t n = s.size();
  const double eps2 = eps * eps;
  const auto near = [&](std::size_t a, std::size_t b) {
    return squared_distance(s.means().row(a), s.means().row(b)) <= eps2;
  };

  std::vector<std::size_t> counts(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b)
      if (near(a, b)) {
        ++counts[a];
        if (b != a) ++counts[b];
      }
  std::vector<bool> core(n);
  for (std::size_t a = 0; a < n; ++a) core[a] = counts[a] >= min_pts;

  Clustering out;
  out.labels.assign(n, -1);
  int next = 0;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (!core[seed] || out.labels[seed] >= 0) continue;
    std::deque<std::size_t> frontier{seed};
    out.labels[seed] = next;
    while (!frontier.empty()) {
      const std::size_t a = frontier.front();
      frontier.pop_front();
      for (std::size_t b = 0; b < n; ++b)
        if (core[b] && out.labels[b] < 0 && near(a, b)) {
          out.labels[b] = next;
          frontier.push_back(b);
        }
    }
    ++next;
  }

  for (std::size_t a = 0; a < n; ++a) {
    if (core[a]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < n; ++b) {
      if (!core[b]) continue;
      const double d = squared_distance(s.means().row(a), s.means().row(b));
      if (d <= eps2 && d < best) {
        best = d;
        out.labels[a] = out.labels[b];
      }
    }
  }
  out.n_clusters = static_cast<std::size_t>(next);
  return out;
}

PlateauReport plateau_cluster_report(const std::vector<SolveResult>& sweep,
                                     const JointDistribution& j, std::size_t n_samples,
                                     const PlateauOptions& opts) {
  if (sweep.empty()) throw Error(ErrorCode::BadShape, "empty sweep");
  if (n_samples < 2) throw Error(ErrorCode::OutOfRange, "need at least two samples");
  PlateauReport rep;
  rep.header =
      "# analysis embedding: T symbols on a circle of radius " + std::to_string(opts.radius) +
      " with unit Gaussian noise; DBSCAN eps=" + std::to_string(opts.eps) +
      " min_pts=" + std::to_string(opts.min_pts) +
      ". Cluster counts are reported for correlation with performance levels only.";

  for (std::size_t p = 0; p < sweep.size(); ++p) {
    const auto& r = sweep[p];
    const std::size_t nt = r.encoder.cols();
    Rng rng(derive_seed(opts.seed, p));
    Matrix pts(n_samples, 2);
    for (std::size_t k = 0; k < n_samples; ++k) {
      const std::size_t x = rng.categorical(j.p_x().mass());
      const std::size_t t = rng.categorical(r.encoder.row(x));
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(nt);
      pts(k, 0) = opts.radius * std::cos(angle) + rng.normal();
      pts(k, 1) = opts.radius * std::sin(angle) + rng.normal();
    }
    const auto clusters = dbscan_clusters(SampleSet(std::move(pts)), opts.eps, opts.min_pts);
    rep.rows.push_back({r.beta_u, r.i_xt_bits, r.i_ty_bits, r.support_t, clusters.n_clusters});
  }
  return rep;
}

}  // namespace ibex
