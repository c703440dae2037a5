#pragma once

// Encoder optimisation for the classic and convex IB Lagrangians on a
// finite joint distribution.

#include <cstdint>
#include <optional>
#include <vector>

#include "ibex/lagrangian.hpp"
#include "ibex/prob.hpp"

namespace ibex {

struct SolverConfig {
  // 0 selects |X| (or |X| + |Y| with extended_t).
  std::size_t cardinality_t = 0;
  bool extended_t = false;
  int max_outer = 200;
  int max_inner = 2000;
  double tol_objective = 1e-9;
  double tol_fixed_point = 1e-7;
  int restarts = 10;
  std::uint64_t seed = 0x1b5eed;
  // Multipliers applied to the target effective beta on successive annealing
  // rungs; the last entry must be 1.
  std::vector<double> anneal = default_anneal();
  // Step fractions damping^k (k = 0, 1, ...) are tried along each update
  // direction; 1 disables damping.
  double damping = 0.5;

  // Geometric ladder of 8 rungs from 1.5 down to 1.
  static std::vector<double> default_anneal();

  // Throws OutOfRange on non-positive counts or tolerances.
  void validate() const;
  std::size_t resolve_cardinality(const JointDistribution& j) const;
};

struct SolveResult {
  Encoder encoder = Encoder::constant(1, 1);
  double i_xt_bits = 0.0;
  double i_ty_bits = 0.0;
  double beta_u = 0.0;
  double beta_effective = 0.0;
  double objective = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  bool converged = false;
  // Number of t symbols with q(t) > 1e-6.
  std::size_t support_t = 0;
};

struct BaStep {
  Encoder encoder;
  // Every t lost support for some x; the encoder was reset to constant.
  bool degenerate = false;
};

// One self-consistent update q(t|x) ∝ q(t) 2^{-KL(p(y|x) || q(y|t)) / beta_eff}.
BaStep ba_step(const JointDistribution& j, const Encoder& e, double beta_eff);

// Maximises I(T;Y) - beta I(X;T).
SolveResult solve_classic(const JointDistribution& j, double beta, const SolverConfig& cfg = {});

// Maximises I(T;Y) - beta_u u(I(X;T)).
SolveResult solve_convex(const JointDistribution& j, const UFamily& f, double beta_u,
                         const SolverConfig& cfg = {});

// Independent check: finite-difference gradient ascent on encoder logits.
// Throws SizeLimit when |X| |T| > 64.
SolveResult gradient_oracle(const JointDistribution& j, const UFamily& f, double beta_u,
                            const SolverConfig& cfg = {});

// Instance-derived auto grid: `count` log-spaced multipliers inside the
// explorable range. Without a curve, a deterministic joint is treated as
// Deterministic(I(X;Y)) and any other joint falls back to the bound range.
std::vector<double> auto_betas(const JointDistribution& j, const UFamily& f,
                               const std::optional<CurveSpec>& curve = std::nullopt,
                               int count = 20);

// One independent solve per multiplier, ordered by beta_u ascending.
// threads == 0 picks the hardware concurrency. Output does not depend on it.
std::vector<SolveResult> sweep(const JointDistribution& j, const UFamily& f,
                               std::vector<double> betas, const SolverConfig& cfg = {},
                               unsigned threads = 1);

struct AimResult {
  SolveResult result;
  double r_star = 0.0;
  double deviation = 0.0;
  bool target_unreachable = false;
};

// Convex solve with the shifted exponential centred on r_star.
AimResult aim_compression(const JointDistribution& j, double r_star, double eta, double beta_u,
                          const SolverConfig& cfg = {});

// True when H(Y|X) vanishes.
bool is_deterministic(const JointDistribution& j, double tol = 1e-12);

}  // namespace ibex
