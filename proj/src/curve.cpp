#include "ibex/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "ibex/error.hpp"

namespace ibex {

CurvePoint CurvePoint::from(const SolveResult& r) {
  return {r.beta_u, r.i_xt_bits, r.i_ty_bits, r.objective, r.converged, r.support_t};
}

std::vector<CurvePoint> CurveEstimate::pareto_points() const {
  std::vector<CurvePoint> out;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (pareto[i]) out.push_back(points[i]);
  return out;
}

double deterministic_curve(double i_xy, double r) {
  if (i_xy < 0.0 || r < 0.0) throw Error(ErrorCode::OutOfRange, "curve arguments must be >= 0");
  return std::min(r, i_xy);
}

CurveEstimate pareto_filter(std::vector<CurvePoint> points, double i_xy_bits) {
  if (points.empty()) throw Error(ErrorCode::BadShape, "no points to filter");
  std::sort(points.begin(), points.end(), [](const CurvePoint& a, const CurvePoint& b) {
    return std::tie(a.i_xt_bits, b.i_ty_bits, a.beta_u, a.objective) <
           std::tie(b.i_xt_bits, a.i_ty_bits, b.beta_u, b.objective);
  });
  CurveEstimate est;
  est.i_xy_bits = i_xy_bits;
  est.pareto.assign(points.size(), true);
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t k = 0; k < points.size() && est.pareto[i]; ++k) {
      const auto& a = points[k];
      const auto& b = points[i];
      const bool weakly = a.i_xt_bits <= b.i_xt_bits && a.i_ty_bits >= b.i_ty_bits;
      const bool strictly = a.i_xt_bits < b.i_xt_bits || a.i_ty_bits > b.i_ty_bits;
      if (weakly && strictly) est.pareto[i] = false;
    }
  est.points = std::move(points);
  return est;
}

bool is_concave(const std::vector<CurvePoint>& ordered, double tol) {
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < ordered.size(); ++k) {
    const double dx = ordered[k].i_xt_bits - ordered[k - 1].i_xt_bits;
    if (dx <= 0.0) continue;
    const double slope = (ordered[k].i_ty_bits - ordered[k - 1].i_ty_bits) / dx;
    // Compare rises, not slopes, so near-duplicate x values don't blow up.
    if (std::isfinite(previous) && (slope - previous) * dx > tol) return false;
    previous = slope;
  }
  return true;
}

std::size_t distinct_levels(std::vector<double> values, double resolution) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  std::size_t levels = 1;
  double anchor = values.front();
  for (double v : values)
    if (v - anchor >= resolution) {
      ++levels;
      anchor = v;
    }
  return levels;
}

ExplorabilityReport explorability_report(const CurveEstimate& est, std::string family_name,
                                         double resolution, bool deterministic) {
  if (!(resolution > 0.0)) throw Error(ErrorCode::OutOfRange, "resolution must be positive");
  ExplorabilityReport rep;
  rep.family = std::move(family_name);
  rep.resolution = resolution;
  rep.points = est.points.size();
  rep.pareto_points = static_cast<std::size_t>(std::count(est.pareto.begin(), est.pareto.end(), true));

  std::vector<double> xs;
  for (const auto& p : est.points) xs.push_back(p.i_xt_bits);
  rep.distinct_levels = distinct_levels(xs, resolution);

  const double span = est.i_xy_bits;
  if (span > 0.0) {
    std::vector<double> inside;
    for (double x : xs) inside.push_back(std::clamp(x, 0.0, span));
    std::sort(inside.begin(), inside.end());
    double prev = 0.0;
    for (double x : inside) {
      rep.max_gap = std::max(rep.max_gap, x - prev);
      prev = x;
    }
    rep.max_gap = std::max(rep.max_gap, span - prev);

    // Union of [x - res/2, x + res/2] clipped to [0, span].
    double covered = 0.0, reach = 0.0;
    for (double x : inside) {
      const double lo = std::max({x - resolution / 2, 0.0, reach});
      const double hi = std::min(x + resolution / 2, span);
      if (hi > lo) covered += hi - lo;
      reach = std::max(reach, hi);
    }
    rep.coverage = covered / span;
  }

  if (deterministic) {
    double worst = 0.0;
    for (std::size_t i = 0; i < est.points.size(); ++i) {
      if (!est.pareto[i]) continue;
      const auto& p = est.points[i];
      const double dev = std::abs(p.i_ty_bits - deterministic_curve(est.i_xy_bits, p.i_xt_bits));
      rep.deviations.push_back(dev);
      if (p.converged) worst = std::max(worst, dev);
    }
    rep.max_deviation = worst;
  }
  return rep;
}

}  // namespace ibex
