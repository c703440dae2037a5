#include "ibex/prob.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ibex/error.hpp"

namespace ibex {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::SumOutOfTolerance: return "SumOutOfTolerance";
    case ErrorCode::EmptyAfterPruning: return "EmptyAfterPruning";
    case ErrorCode::BadShape: return "BadShape";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::FlatRegion: return "FlatRegion";
    case ErrorCode::IdentityFamily: return "IdentityFamily";
    case ErrorCode::UnknownShape: return "UnknownShape";
    case ErrorCode::SizeLimit: return "SizeLimit";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

namespace {

void check_entries(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NegativeEntry, "non-finite entry");
    if (v < 0.0) throw Error(ErrorCode::NegativeEntry, "entry " + std::to_string(v) + " < 0");
  }
}

}  // namespace

Distribution::Distribution(std::vector<double> mass) : mass_(std::move(mass)) {
  if (mass_.empty()) throw Error(ErrorCode::BadShape, "empty distribution");
  check_entries(mass_);
  const double total = std::accumulate(mass_.begin(), mass_.end(), 0.0);
  if (std::abs(total - 1.0) > kNormTolerance)
    throw Error(ErrorCode::SumOutOfTolerance, "distribution sums to " + std::to_string(total));
}

JointDistribution::JointDistribution(Matrix pxy, std::vector<std::size_t> pruned)
    : pxy_(std::move(pxy)),
      p_x_([&] {
        std::vector<double> px(pxy_.rows(), 0.0);
        for (std::size_t x = 0; x < pxy_.rows(); ++x)
          for (double v : pxy_.row(x)) px[x] += v;
        return px;
      }()),
      p_y_([&] {
        std::vector<double> py(pxy_.cols(), 0.0);
        for (std::size_t x = 0; x < pxy_.rows(); ++x)
          for (std::size_t y = 0; y < pxy_.cols(); ++y) py[y] += pxy_(x, y);
        return py;
      }()),
      p_y_given_x_(pxy_.rows(), pxy_.cols()),
      pruned_x_(std::move(pruned)) {
  for (std::size_t x = 0; x < pxy_.rows(); ++x)
    for (std::size_t y = 0; y < pxy_.cols(); ++y) p_y_given_x_(x, y) = pxy_(x, y) / p_x_[x];
}

JointDistribution validate_joint(const std::vector<std::vector<double>>& raw) {
  if (raw.empty() || raw.front().empty()) throw Error(ErrorCode::BadShape, "empty joint matrix");
  const std::size_t ny = raw.front().size();
  double total = 0.0;
  for (const auto& row : raw) {
    if (row.size() != ny) throw Error(ErrorCode::BadShape, "joint matrix is not rectangular");
    check_entries(row);
    total = std::accumulate(row.begin(), row.end(), total);
  }
  if (total == 0.0) throw Error(ErrorCode::EmptyAfterPruning, "no x symbol has positive mass");
  if (std::abs(total - 1.0) > kRejectTolerance)
    throw Error(ErrorCode::SumOutOfTolerance, "joint sums to " + std::to_string(total));

  // Totals off by rounding only are kept as given so that files round-trip.
  const bool renormalize = std::abs(total - 1.0) > 1e-12;
  std::vector<std::vector<double>> kept;
  std::vector<std::size_t> pruned;
  for (std::size_t x = 0; x < raw.size(); ++x) {
    const double mass = std::accumulate(raw[x].begin(), raw[x].end(), 0.0);
    if (mass > 0.0) {
      kept.push_back(raw[x]);
      if (renormalize)
        for (double& v : kept.back()) v /= total;
    } else {
      pruned.push_back(x);
    }
  }
  if (kept.empty()) throw Error(ErrorCode::EmptyAfterPruning, "no x symbol has positive mass");
  return JointDistribution(Matrix::from_rows(kept), std::move(pruned));
}

JointDistribution validate_joint(const Matrix& raw) { return validate_joint(raw.to_rows()); }

StochasticMatrix::StochasticMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.cols() == 0) throw Error(ErrorCode::BadShape, "empty stochastic matrix");
  check_entries(m_.data());
  for (std::size_t i = 0; i < m_.rows(); ++i) {
    auto row = m_.row(i);
    const double total = std::accumulate(row.begin(), row.end(), 0.0);
    if (std::abs(total - 1.0) > kNormTolerance)
      throw Error(ErrorCode::SumOutOfTolerance,
                  "row " + std::to_string(i) + " sums to " + std::to_string(total));
    for (double& v : row) v /= total;
  }
}

StochasticMatrix StochasticMatrix::normalize_rows(Matrix m) {
  if (m.rows() == 0 || m.cols() == 0) throw Error(ErrorCode::BadShape, "empty stochastic matrix");
  check_entries(m.data());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    const double total = std::accumulate(row.begin(), row.end(), 0.0);
    if (!(total > 0.0)) throw Error(ErrorCode::SumOutOfTolerance, "row without mass");
    for (double& v : row) v /= total;
  }
  return StochasticMatrix(std::move(m), Trusted{});
}

Encoder Encoder::constant(std::size_t size_x, std::size_t cardinality_t) {
  Matrix m(size_x, cardinality_t, 0.0);
  for (std::size_t x = 0; x < size_x; ++x) m(x, 0) = 1.0;
  return Encoder(std::move(m));
}

Encoder Encoder::identity(std::size_t size_x, std::size_t cardinality_t) {
  if (cardinality_t < size_x) throw Error(ErrorCode::BadShape, "identity encoder needs |T| >= |X|");
  Matrix m(size_x, cardinality_t, 0.0);
  for (std::size_t x = 0; x < size_x; ++x) m(x, x) = 1.0;
  return Encoder(std::move(m));
}

Decoder Decoder::uniform(std::size_t cardinality_t, std::size_t size_y) {
  return Decoder(StochasticMatrix::normalize_rows(Matrix(cardinality_t, size_y, 1.0)));
}

double entropy(std::span<const double> mass) {
  double h = 0.0;
  for (double p : mass)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

double entropy(const Distribution& d) { return entropy(d.mass()); }

double mutual_information(const Matrix& joint) {
  std::vector<double> pa(joint.rows(), 0.0), pb(joint.cols(), 0.0);
  for (std::size_t a = 0; a < joint.rows(); ++a)
    for (std::size_t b = 0; b < joint.cols(); ++b) {
      pa[a] += joint(a, b);
      pb[b] += joint(a, b);
    }
  double mi = 0.0;
  for (std::size_t a = 0; a < joint.rows(); ++a)
    for (std::size_t b = 0; b < joint.cols(); ++b) {
      const double p = joint(a, b);
      if (p > 0.0) mi += p * std::log2(p / pa[a] / pb[b]);
    }
  return std::max(mi, 0.0);
}

double mutual_information(const JointDistribution& j) { return mutual_information(j.pxy()); }

double conditional_entropy(const JointDistribution& j) {
  double h = 0.0;
  for (std::size_t x = 0; x < j.size_x(); ++x) h += j.p_x()[x] * entropy(j.p_y_given_x().row(x));
  return h;
}

double kl_divergence_bits(std::span<const double> p, std::span<const double> q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log2(p[i] / q[i]);
  }
  return std::max(d, 0.0);
}

double kl_divergence(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw Error(ErrorCode::BadShape, "KL arguments differ in length");
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0 && q[i] <= 0.0)
      throw Error(ErrorCode::SupportViolation, "p(" + std::to_string(i) + ") > 0 where q is 0");
  return kl_divergence_bits(p.mass(), q.mass());
}

InducedQuantities induce(const JointDistribution& j, const Encoder& e) {
  if (e.rows() != j.size_x())
    throw Error(ErrorCode::BadShape, "encoder rows do not match |X|");
  const std::size_t nx = j.size_x(), ny = j.size_y(), nt = e.cols();
  const auto& px = j.p_x();

  InducedQuantities out;
  out.q_t.assign(nt, 0.0);
  out.joint_ty = Matrix(nt, ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t t = 0; t < nt; ++t) {
      const double w = e(x, t);
      if (w == 0.0) continue;
      out.q_t[t] += px[x] * w;
      for (std::size_t y = 0; y < ny; ++y) out.joint_ty(t, y) += j.pxy()(x, y) * w;
    }

  out.q_y_given_t = Matrix(nt, ny, 0.0);
  out.empty_t.assign(nt, false);
  for (std::size_t t = 0; t < nt; ++t) {
    if (out.q_t[t] > 0.0) {
      for (std::size_t y = 0; y < ny; ++y)
        out.q_y_given_t(t, y) = out.joint_ty(t, y) / out.q_t[t];
    } else {
      out.empty_t[t] = true;
      for (std::size_t y = 0; y < ny; ++y) out.q_y_given_t(t, y) = 1.0 / static_cast<double>(ny);
    }
  }

  double i_xt = 0.0;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t t = 0; t < nt; ++t)
      if (e(x, t) > 0.0) i_xt += px[x] * e(x, t) * std::log2(e(x, t) / out.q_t[t]);
  out.i_xt_bits = std::max(i_xt, 0.0);

  const auto& py = j.p_y();
  double i_ty = 0.0;
  for (std::size_t t = 0; t < nt; ++t) {
    if (out.empty_t[t]) continue;
    for (std::size_t y = 0; y < ny; ++y) {
      const double p = out.joint_ty(t, y);
      if (p > 0.0) i_ty += p * std::log2(p / out.q_t[t] / py[y]);
    }
  }
  out.i_ty_bits = std::max(i_ty, 0.0);
  return out;
}

double cross_entropy_cost(const JointDistribution& j, const Encoder& e, const Decoder& d) {
  if (d.rows() != e.cols() || d.cols() != j.size_y())
    throw Error(ErrorCode::BadShape, "decoder shape does not match |T| x |Y|");
  const auto induced = induce(j, e);
  double cost = 0.0;
  for (std::size_t t = 0; t < e.cols(); ++t)
    for (std::size_t y = 0; y < j.size_y(); ++y) {
      const double p = induced.joint_ty(t, y);
      if (p <= 0.0) continue;
      if (d(t, y) <= 0.0)
        throw Error(ErrorCode::SupportViolation, "decoder assigns zero to an observed outcome");
      cost -= p * std::log2(d(t, y));
    }
  return cost;
}

}  // namespace ibex
