#include "ibex/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "ibex/error.hpp"
#include "ibex/random.hpp"

namespace ibex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinBetaEff = 1e-12;
constexpr double kTieTolerance = 1e-9;
constexpr double kSupportThreshold = 1e-6;
constexpr std::size_t kOracleMaxParams = 64;
constexpr int kRefinePasses = 3;

Matrix dirichlet_rows(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    double total = 0.0;
    for (std::size_t k = 0; k < cols; ++k) total += (m(i, k) = rng.exponential());
    for (std::size_t k = 0; k < cols; ++k) m(i, k) /= total;
  }
  return m;
}

// Symmetric initialisations are fixed points of the update, so every start
// is a random draw. Even starts are pulled halfway to identity when there is
// room for it; odd starts use sparse rows close to a hard partition.
Encoder initial_encoder(Rng& rng, std::size_t nx, std::size_t nt, int k) {
  Matrix m = dirichlet_rows(rng, nx, nt);
  if (k % 2 == 1) {
    for (double& v : m.data()) v = std::pow(v, 4.0);
    return Encoder(StochasticMatrix::normalize_rows(std::move(m)));
  }
  if (nt >= nx)
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t t = 0; t < nt; ++t) m(x, t) *= 0.5;
      m(x, x) += 0.5;
    }
  return Encoder(StochasticMatrix::normalize_rows(std::move(m)));
}

Encoder mix(const Encoder& a, const Matrix& b, double tau) {
  Matrix m = a.matrix();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t k = 0; k < m.cols(); ++k) m(i, k) = (1.0 - tau) * m(i, k) + tau * b(i, k);
  return Encoder(StochasticMatrix::normalize_rows(std::move(m)));
}

struct Eval {
  double i_xt = 0.0;
  double i_ty = 0.0;
  double objective = -kInf;
};

Eval evaluate(const JointDistribution& j, const Encoder& e, const UFamily& f, double beta_u) {
  const auto q = induce(j, e);
  return {q.i_xt_bits, q.i_ty_bits, objective(q.i_xt_bits, q.i_ty_bits, f, beta_u).value};
}

struct Trajectory {
  Encoder encoder;
  Eval eval;
  int outer = 0;
  int inner = 0;
  bool converged = false;
};

bool better(const Eval& a, const Eval& b) {
  if (a.objective > b.objective + kTieTolerance) return true;
  if (b.objective > a.objective + kTieTolerance) return false;
  return a.i_xt < b.i_xt;
}

// One damped update: the self-consistent step at beta_eff gives a direction,
// and the step fraction is picked by the objective along it.
// Returns false when no fraction improves the objective.
bool damped_step(const JointDistribution& j, const UFamily& f, double beta_u, double beta_eff,
                 double damping, Trajectory& tr) {
  const auto target = ba_step(j, tr.encoder, beta_eff);
  const Matrix& dir = target.encoder.matrix();
  Eval best = tr.eval;
  std::optional<Encoder> best_encoder;
  double tau = 1.0;
  for (int k = 0; k < 64 && tau >= 1e-7; ++k, tau *= damping) {
    Encoder candidate = mix(tr.encoder, dir, tau);
    const Eval ev = evaluate(j, candidate, f, beta_u);
    if (ev.objective > best.objective) {
      best = ev;
      best_encoder = std::move(candidate);
    } else if (best_encoder) {
      break;  // past the best fraction along this direction
    }
    if (damping >= 1.0) break;
  }
  if (!best_encoder) return false;
  tr.encoder = std::move(*best_encoder);
  tr.eval = best;
  return true;
}

double effective_multiplier(const UFamily& f, double beta_u, double r) {
  if (beta_u == 0.0) return 0.0;
  return effective_beta(f, beta_u, r).value;
}

// Interleaves the multiplier fixed point beta_eff = beta_u u'(I(X;T)) with
// damped self-consistent updates: every update re-reads I(X;T). An outer
// iteration is a block of updates over which convergence is judged.
Trajectory ascend_convex(const JointDistribution& j, const UFamily& f, double beta_u,
                         Encoder start, const SolverConfig& cfg, int max_outer, int block) {
  Trajectory tr{std::move(start), {}, 0, 0, false};
  tr.eval = evaluate(j, tr.encoder, f, beta_u);
  for (int outer = 0; outer < max_outer; ++outer) {
    const Eval before = tr.eval;
    bool stalled = false;
    for (int b = 0; b < block; ++b) {
      ++tr.inner;
      const double beta_eff = effective_multiplier(f, beta_u, tr.eval.i_xt);
      if (!damped_step(j, f, beta_u, beta_eff, cfg.damping, tr)) {
        stalled = true;
        break;
      }
    }
    ++tr.outer;
    if (stalled || (tr.eval.objective - before.objective <= cfg.tol_objective &&
                    std::abs(tr.eval.i_xt - before.i_xt) <= cfg.tol_fixed_point)) {
      tr.converged = true;
      break;
    }
  }
  return tr;
}

SolveResult make_result(const JointDistribution& j, const UFamily& f, double beta_u,
                        const Trajectory& tr, double beta_effective) {
  SolveResult r;
  r.encoder = tr.encoder;
  const auto q = induce(j, tr.encoder);
  r.i_xt_bits = q.i_xt_bits;
  r.i_ty_bits = q.i_ty_bits;
  r.beta_u = beta_u;
  r.beta_effective = beta_effective;
  r.objective = objective(q.i_xt_bits, q.i_ty_bits, f, beta_u).value;
  r.outer_iterations = tr.outer;
  r.inner_iterations = tr.inner;
  r.converged = tr.converged;
  r.support_t = static_cast<std::size_t>(
      std::count_if(q.q_t.begin(), q.q_t.end(), [](double p) { return p > kSupportThreshold; }));
  return r;
}

// Starting points shared by both solvers: identity (when it fits) followed
// by seeded random draws.
std::vector<Encoder> starting_points(const JointDistribution& j, std::size_t nt,
                                     const SolverConfig& cfg, std::uint64_t stream) {
  std::vector<Encoder> starts;
  if (nt >= j.size_x()) starts.push_back(Encoder::identity(j.size_x(), nt));
  for (int k = 0; k < cfg.restarts; ++k) {
    Rng rng(derive_seed(cfg.seed, stream * 1000003ULL + static_cast<std::uint64_t>(k)));
    starts.push_back(initial_encoder(rng, j.size_x(), nt, k));
  }
  return starts;
}

// Split moves out of a fixed point: symbol t is emptied, row x sends half
// of its mass there, and the ascent restarts. Passes repeat while they
// improve.
void refine(const JointDistribution& j, const UFamily& f, double beta_u, const SolverConfig& cfg,
            int block, Trajectory& best) {
  const std::size_t nx = j.size_x(), nt = best.encoder.cols();
  if (nt < 2) return;
  for (int pass = 0; pass < kRefinePasses; ++pass) {
    bool improved = false;
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t t = 0; t < nt; ++t) {
        Matrix m = best.encoder.matrix();
        if (m(x, t) > 0.5) continue;
        for (std::size_t r = 0; r < nx; ++r) m(r, t) = 0.0;
        for (std::size_t k = 0; k < nt; ++k) m(x, k) *= 0.5;
        m(x, t) = 0.5;
        bool empty_row = false;
        for (std::size_t r = 0; r < nx && !empty_row; ++r) {
          const auto row = m.row(r);
          empty_row = std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; });
        }
        if (empty_row) continue;
        Trajectory tr = ascend_convex(j, f, beta_u, Encoder(StochasticMatrix::normalize_rows(std::move(m))),
                                      cfg, cfg.max_outer, block);
        if (tr.eval.objective > best.eval.objective + kTieTolerance) {
          tr.outer += best.outer;
          tr.inner += best.inner;
          best = std::move(tr);
          improved = true;
        }
      }
    if (!improved) break;
  }
}

Trajectory trivial_candidate(const JointDistribution& j, const UFamily& f, double beta_u,
                             std::size_t nt) {
  // The constant encoder is a fixed point of every update.
  Trajectory tr{Encoder::constant(j.size_x(), nt), {}, 0, 0, true};
  tr.eval = evaluate(j, tr.encoder, f, beta_u);
  return tr;
}

}  // namespace

std::vector<double> SolverConfig::default_anneal() {
  std::vector<double> ladder(8);
  for (int k = 0; k < 8; ++k) ladder[k] = std::pow(1.5, static_cast<double>(7 - k) / 7.0);
  ladder.back() = 1.0;
  return ladder;
}

void SolverConfig::validate() const {
  if (max_outer < 1 || max_inner < 1 || restarts < 0)
    throw Error(ErrorCode::OutOfRange, "solver iteration counts must be positive");
  if (!(tol_objective > 0.0) || !(tol_fixed_point > 0.0))
    throw Error(ErrorCode::OutOfRange, "solver tolerances must be positive");
  if (!(damping > 0.0 && damping <= 1.0))
    throw Error(ErrorCode::OutOfRange, "damping must lie in (0, 1]");
  if (anneal.empty() || anneal.back() != 1.0)
    throw Error(ErrorCode::OutOfRange, "annealing ladder must end at 1");
  for (double a : anneal)
    if (!(a > 0.0)) throw Error(ErrorCode::OutOfRange, "annealing factors must be positive");
}

std::size_t SolverConfig::resolve_cardinality(const JointDistribution& j) const {
  if (cardinality_t > 0) return cardinality_t;
  return extended_t ? j.size_x() + j.size_y() : j.size_x();
}

BaStep ba_step(const JointDistribution& j, const Encoder& e, double beta_eff) {
  if (e.rows() != j.size_x()) throw Error(ErrorCode::BadShape, "encoder rows do not match |X|");
  const auto q = induce(j, e);
  const std::size_t nx = j.size_x(), nt = e.cols();
  const double inv_beta = 1.0 / std::max(beta_eff, kMinBetaEff);

  Matrix next(nx, nt, 0.0);
  std::vector<double> logw(nt);
  for (std::size_t x = 0; x < nx; ++x) {
    double top = -kInf;
    for (std::size_t t = 0; t < nt; ++t) {
      if (q.empty_t[t]) {
        logw[t] = -kInf;
        continue;
      }
      const double kl = kl_divergence_bits(j.p_y_given_x().row(x), q.q_y_given_t.row(t));
      logw[t] = std::isinf(kl) ? -kInf : std::log2(q.q_t[t]) - inv_beta * kl;
      top = std::max(top, logw[t]);
    }
    if (std::isinf(top)) return {Encoder::constant(nx, nt), true};
    for (std::size_t t = 0; t < nt; ++t) next(x, t) = std::exp2(logw[t] - top);
  }
  return {Encoder(StochasticMatrix::normalize_rows(std::move(next))), false};
}

SolveResult solve_classic(const JointDistribution& j, double beta, const SolverConfig& cfg) {
  cfg.validate();
  if (!(beta >= 0.0)) throw Error(ErrorCode::OutOfRange, "beta must be >= 0");
  const UFamily identity = UFamily::identity();
  const std::size_t nt = cfg.resolve_cardinality(j);
  const int block = std::max(1, cfg.max_inner / cfg.max_outer);
  const int rungs = static_cast<int>(cfg.anneal.size());
  const int outer_per_rung = std::max(1, cfg.max_outer / rungs);

  Trajectory best = trivial_candidate(j, identity, beta, nt);
  auto starts = starting_points(j, nt, cfg, 0);
  for (std::size_t s = 0; s < starts.size(); ++s) {
    Rng rng(derive_seed(cfg.seed, 0x5eedULL + s));
    Trajectory direct = ascend_convex(j, identity, beta, starts[s], cfg, cfg.max_outer, block);
    if (better(direct.eval, best.eval)) best = std::move(direct);
    Trajectory tr{std::move(starts[s]), {}, 0, 0, false};
    for (int k = 0; k < rungs; ++k) {
      Encoder start = tr.encoder;
      if (k > 0) start = mix(start, dirichlet_rows(rng, j.size_x(), nt), 1e-3);
      const int outer_budget = k + 1 == rungs ? cfg.max_outer - outer_per_rung * (rungs - 1)
                                              : outer_per_rung;
      Trajectory rung = ascend_convex(j, identity, beta * cfg.anneal[k], std::move(start), cfg,
                                      std::max(1, outer_budget), block);
      rung.outer += tr.outer;
      rung.inner += tr.inner;
      tr = std::move(rung);
    }
    tr.eval = evaluate(j, tr.encoder, identity, beta);
    if (better(tr.eval, best.eval)) best = std::move(tr);
  }
  refine(j, identity, beta, cfg, block, best);
  return make_result(j, identity, beta, best, beta);
}

SolveResult solve_convex(const JointDistribution& j, const UFamily& f, double beta_u,
                         const SolverConfig& cfg) {
  if (f.is_identity()) return solve_classic(j, beta_u, cfg);
  cfg.validate();
  if (!(beta_u >= 0.0)) throw Error(ErrorCode::OutOfRange, "beta_u must be >= 0");
  const std::size_t nt = cfg.resolve_cardinality(j);
  const int block = std::max(1, cfg.max_inner / cfg.max_outer);

  Trajectory best = trivial_candidate(j, f, beta_u, nt);
  for (auto& start : starting_points(j, nt, cfg, 1)) {
    Trajectory tr = ascend_convex(j, f, beta_u, std::move(start), cfg, cfg.max_outer, block);
    if (better(tr.eval, best.eval)) best = std::move(tr);
  }
  refine(j, f, beta_u, cfg, block, best);
  return make_result(j, f, beta_u, best, effective_multiplier(f, beta_u, best.eval.i_xt));
}

// ---------------------------------------------------------------------------

namespace {

Encoder softmax_rows(std::span<const double> logits, std::size_t nx, std::size_t nt) {
  Matrix m(nx, nt);
  for (std::size_t x = 0; x < nx; ++x) {
    const double top = *std::max_element(logits.begin() + x * nt, logits.begin() + (x + 1) * nt);
    for (std::size_t t = 0; t < nt; ++t) m(x, t) = std::exp(logits[x * nt + t] - top);
  }
  return Encoder(StochasticMatrix::normalize_rows(std::move(m)));
}

}  // namespace

SolveResult gradient_oracle(const JointDistribution& j, const UFamily& f, double beta_u,
                            const SolverConfig& cfg) {
  cfg.validate();
  const std::size_t nx = j.size_x(), nt = cfg.resolve_cardinality(j);
  const std::size_t n = nx * nt;
  if (n > kOracleMaxParams)
    throw Error(ErrorCode::SizeLimit, "gradient oracle limited to |X| |T| <= 64");
  constexpr double kBox = 40.0;
  constexpr double kH = 1e-6;

  const auto value = [&](const std::vector<double>& theta) {
    return evaluate(j, softmax_rows(theta, nx, nt), f, beta_u).objective;
  };

  Trajectory best = trivial_candidate(j, f, beta_u, nt);
  for (int k = 0; k <= cfg.restarts; ++k) {
    std::vector<double> theta(n, 0.0);
    if (k == 0 && nt >= nx) {
      for (std::size_t x = 0; x < nx; ++x) theta[x * nt + x] = 8.0;
    } else {
      Rng rng(derive_seed(cfg.seed ^ 0x0a1c1eULL, static_cast<std::uint64_t>(k)));
      for (double& v : theta) v = std::log(rng.exponential() + 1e-300);
      if (nt >= nx)
        for (std::size_t x = 0; x < nx; ++x) theta[x * nt + x] += 1.0;
    }

    double current = value(theta);
    double step = 1.0;
    bool converged = false;
    int it = 0;
    std::vector<double> grad(n), trial(n);
    for (; it < cfg.max_inner; ++it) {
      for (std::size_t p = 0; p < n; ++p) {
        const double saved = theta[p];
        theta[p] = saved + kH;
        const double up = value(theta);
        theta[p] = saved - kH;
        const double down = value(theta);
        theta[p] = saved;
        grad[p] = (up - down) / (2.0 * kH);
      }
      bool moved = false;
      for (int tries = 0; tries < 50; ++tries) {
        for (std::size_t p = 0; p < n; ++p)
          trial[p] = std::clamp(theta[p] + step * grad[p], -kBox, kBox);
        const double candidate = value(trial);
        if (candidate > current) {
          const double gain = candidate - current;
          theta.swap(trial);
          current = candidate;
          step *= 2.0;
          moved = true;
          if (gain < cfg.tol_objective * 1e-3) converged = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) converged = true;
      if (converged) break;
    }

    Trajectory tr{softmax_rows(theta, nx, nt), {}, 1, it, converged};
    tr.eval = evaluate(j, tr.encoder, f, beta_u);
    if (better(tr.eval, best.eval)) best = std::move(tr);
  }
  return make_result(j, f, beta_u, best, effective_multiplier(f, beta_u, best.eval.i_xt));
}

// ---------------------------------------------------------------------------

bool is_deterministic(const JointDistribution& j, double tol) {
  return conditional_entropy(j) <= tol;
}

std::vector<double> auto_betas(const JointDistribution& j, const UFamily& f,
                               const std::optional<CurveSpec>& curve, int count) {
  if (count < 1) throw Error(ErrorCode::OutOfRange, "grid needs at least one point");
  constexpr double kCap = 1e3;
  double lo = 0.0, hi = 0.0;

  if (f.is_identity()) {
    // Classic multipliers live in [0, 1].
    lo = 1e-2;
    hi = 1.0;
  } else {
    std::optional<CurveSpec> c = curve;
    if (!c && is_deterministic(j)) c = CurveSpec::deterministic(mutual_information(j));
    if (c && c->known_shape()) {
      const double r_max = *c->r_max();
      const auto range = multiplier_range(f, *c);
      lo = range.lo;
      hi = std::min({range.hi, kCap, beta_for_compression(f, *c, r_max / count)});
    } else {
      // Unknown shape: the bound range, narrowed to the multipliers that
      // would target [H(X)/count, H(X)] under the assumed slope.
      const auto bound = multiplier_range_bound(f);
      const CurveSpec assumed = c ? *c : CurveSpec::unknown_bounded(1.0);
      const double h_x = std::max(entropy(j.p_x()), 1e-9);
      lo = std::max(bound.lo, beta_for_compression(f, assumed, h_x));
      hi = std::min({bound.hi, kCap, beta_for_compression(f, assumed, h_x / count)});
    }
  }
  if (!(lo > 0.0)) lo = hi * 1e-3;
  if (!(hi > lo)) return std::vector<double>(1, hi > 0.0 ? hi : lo);

  std::vector<double> betas(count);
  const double a = std::log(lo), b = std::log(hi);
  for (int k = 0; k < count; ++k)
    betas[k] = count == 1 ? std::exp(b) : std::exp(a + (b - a) * k / (count - 1));
  return betas;
}

std::vector<SolveResult> sweep(const JointDistribution& j, const UFamily& f,
                               std::vector<double> betas, const SolverConfig& cfg,
                               unsigned threads) {
  std::sort(betas.begin(), betas.end());
  std::vector<std::optional<SolveResult>> slots(betas.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < betas.size();) {
      SolverConfig local = cfg;
      local.seed = derive_seed(cfg.seed, 0xbe7aULL + i);
      slots[i] = solve_convex(j, f, betas[i], local);
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, betas.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  std::vector<SolveResult> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

AimResult aim_compression(const JointDistribution& j, double r_star, double eta, double beta_u,
                          const SolverConfig& cfg) {
  if (!(beta_u > 0.0)) throw Error(ErrorCode::OutOfRange, "beta_u must be positive");
  AimResult out;
  out.r_star = r_star;
  out.target_unreachable = r_star > entropy(j.p_x()) + 1e-12;
  out.result = solve_convex(j, UFamily::shifted_exponential(eta, r_star), beta_u, cfg);
  out.deviation = std::abs(out.result.i_xt_bits - r_star);
  return out;
}

}  // namespace ibex
