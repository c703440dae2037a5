#pragma once

// Exact finite-alphabet probability machinery. All information quantities
// are in bits; 0 log 0 is taken as 0 throughout.

#include <cstddef>
#include <span>
#include <vector>

#include "ibex/matrix.hpp"

namespace ibex {

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kRejectTolerance = 1e-6;

class Distribution {
 public:
  // Throws NegativeEntry / SumOutOfTolerance.
  explicit Distribution(std::vector<double> mass);

  std::size_t size() const noexcept { return mass_.size(); }
  double operator[](std::size_t i) const { return mass_[i]; }
  std::span<const double> mass() const noexcept { return mass_; }

 private:
  std::vector<double> mass_;
};

// p(X,Y) with every x symbol carrying positive mass.
class JointDistribution {
 public:
  std::size_t size_x() const noexcept { return pxy_.rows(); }
  std::size_t size_y() const noexcept { return pxy_.cols(); }

  const Matrix& pxy() const noexcept { return pxy_; }
  const Distribution& p_x() const noexcept { return p_x_; }
  const Distribution& p_y() const noexcept { return p_y_; }
  // p(y|x) as an |X|x|Y| row-stochastic matrix.
  const Matrix& p_y_given_x() const noexcept { return p_y_given_x_; }

  // Original row indices of x symbols dropped for carrying zero mass.
  const std::vector<std::size_t>& pruned_x() const noexcept { return pruned_x_; }

 private:
  friend JointDistribution validate_joint(const std::vector<std::vector<double>>&);
  JointDistribution(Matrix pxy, std::vector<std::size_t> pruned);

  Matrix pxy_;
  Distribution p_x_;
  Distribution p_y_;
  Matrix p_y_given_x_;
  std::vector<std::size_t> pruned_x_;
};

// A row-stochastic matrix: q(T|X) for encoders, q(Y^|T) for decoders.
class StochasticMatrix {
 public:
  // Throws NegativeEntry, SumOutOfTolerance (row off by more than 1e-9) or
  // BadShape (no columns). Rows are renormalized exactly on construction.
  explicit StochasticMatrix(Matrix m);

  // Rescales each row to sum to one. Throws if a row has no mass.
  static StochasticMatrix normalize_rows(Matrix m);

  std::size_t rows() const noexcept { return m_.rows(); }
  std::size_t cols() const noexcept { return m_.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  std::span<const double> row(std::size_t i) const { return m_.row(i); }
  const Matrix& matrix() const noexcept { return m_; }

  friend bool operator==(const StochasticMatrix&, const StochasticMatrix&) = default;

 private:
  struct Trusted {};
  StochasticMatrix(Matrix m, Trusted) : m_(std::move(m)) {}
  Matrix m_;
};

// q(T|X): rows indexed by x, columns by t.
class Encoder : public StochasticMatrix {
 public:
  using StochasticMatrix::StochasticMatrix;
  Encoder(StochasticMatrix m) : StochasticMatrix(std::move(m)) {}  // NOLINT

  std::size_t cardinality_t() const noexcept { return cols(); }

  static Encoder constant(std::size_t size_x, std::size_t cardinality_t);
  // x -> t = x; requires cardinality_t >= size_x.
  static Encoder identity(std::size_t size_x, std::size_t cardinality_t);
};

// q(Y^|T): rows indexed by t, columns by y.
class Decoder : public StochasticMatrix {
 public:
  using StochasticMatrix::StochasticMatrix;
  Decoder(StochasticMatrix m) : StochasticMatrix(std::move(m)) {}  // NOLINT

  static Decoder uniform(std::size_t cardinality_t, std::size_t size_y);
};

struct InducedQuantities {
  std::vector<double> q_t;
  Matrix q_y_given_t;
  // true where q(t) == 0; the matching q_y_given_t row is uniform and unused.
  std::vector<bool> empty_t;
  Matrix joint_ty;
  double i_xt_bits = 0.0;
  double i_ty_bits = 0.0;
};

JointDistribution validate_joint(const std::vector<std::vector<double>>& raw);
JointDistribution validate_joint(const Matrix& raw);

double entropy(const Distribution& d);
double entropy(std::span<const double> mass);

// I(A;B) of an arbitrary nonnegative joint matrix summing to one.
double mutual_information(const Matrix& joint);
double mutual_information(const JointDistribution& j);

// H(Y|X) in bits.
double conditional_entropy(const JointDistribution& j);

// Throws SupportViolation when p has mass outside the support of q.
double kl_divergence(const Distribution& p, const Distribution& q);
// Unchecked variant: returns +inf on support violations.
double kl_divergence_bits(std::span<const double> p, std::span<const double> q);

// Requires e.rows() == j.size_x(), else BadShape.
InducedQuantities induce(const JointDistribution& j, const Encoder& e);

// Expected cross entropy between q(Y|T=t) and the decoder row t, weighted by
// q(t). Throws SupportViolation if the decoder gives zero probability to an
// outcome with positive induced mass.
double cross_entropy_cost(const JointDistribution& j, const Encoder& e, const Decoder& d);

}  // namespace ibex
