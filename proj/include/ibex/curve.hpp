#pragma once

// IB-curve construction from sweep output and explorability checks.

#include <optional>
#include <string>
#include <vector>

#include "ibex/solver.hpp"

namespace ibex {

struct CurvePoint {
  double beta_u = 0.0;
  double i_xt_bits = 0.0;
  double i_ty_bits = 0.0;
  double objective = 0.0;
  bool converged = false;
  std::size_t support_t = 0;

  static CurvePoint from(const SolveResult& r);
};

struct CurveEstimate {
  // Ordered by i_xt_bits (ties by i_ty_bits, then beta_u).
  std::vector<CurvePoint> points;
  std::vector<bool> pareto;
  double i_xy_bits = 0.0;

  std::vector<CurvePoint> pareto_points() const;
};

// min(r, i_xy): the IB curve when Y is a deterministic function of X.
double deterministic_curve(double i_xy, double r);

// Marks the points no other point dominates (no more compression for at
// least as much information, strict in one coordinate). Throws BadShape on
// an empty input.
CurveEstimate pareto_filter(std::vector<CurvePoint> points, double i_xy_bits = 0.0);

// Slopes between consecutive (x, y) pairs never increase by more than tol.
bool is_concave(const std::vector<CurvePoint>& ordered, double tol);

// Greedy anchored grouping of values: a new level starts once a value is at
// least `resolution` above the first member of the current level. Equals the
// largest subset of values pairwise >= resolution apart.
std::size_t distinct_levels(std::vector<double> values, double resolution);

struct ExplorabilityReport {
  std::string family;
  double resolution = 0.1;
  std::size_t points = 0;
  std::size_t pareto_points = 0;
  std::size_t distinct_levels = 0;
  // Widest stretch of [0, I(X;Y)] without a point, and the fraction of it
  // lying within resolution/2 of some point's I(X;T).
  double max_gap = 0.0;
  double coverage = 0.0;
  // Filled for deterministic instances: |I(T;Y) - min(I(X;T), I(X;Y))| per
  // Pareto point, and its maximum over converged ones.
  std::vector<double> deviations;
  std::optional<double> max_deviation;
};

ExplorabilityReport explorability_report(const CurveEstimate& est, std::string family_name,
                                         double resolution = 0.1, bool deterministic = false);

}  // namespace ibex
