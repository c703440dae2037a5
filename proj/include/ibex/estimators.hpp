#pragma once

// Sample-based tools: a pairwise-distance upper bound on I(X;T) for noisy
// encoder outputs, and density-based cluster counting.

#include <cstdint>
#include <string>
#include <vector>

#include "ibex/matrix.hpp"
#include "ibex/prob.hpp"
#include "ibex/solver.hpp"

namespace ibex {

// (exp(-1))^2
inline constexpr double kDefaultKernelVariance = 0.1353352832366127;

// N encoder means (one per row) sharing an isotropic noise variance.
class SampleSet {
 public:
  // Throws BadShape when N < 2 or d == 0, OutOfRange on non-finite entries
  // or sigma2 <= 0.
  explicit SampleSet(Matrix means, double sigma2 = kDefaultKernelVariance);

  std::size_t size() const noexcept { return means_.rows(); }
  std::size_t dim() const noexcept { return means_.cols(); }
  const Matrix& means() const noexcept { return means_; }
  double sigma2() const noexcept { return sigma2_; }

 private:
  Matrix means_;
  double sigma2_;
};

// -(1/N) sum_i log2((1/N) sum_j exp(-|mu_i - mu_j|^2 / (2 sigma2))), in bits.
double kde_mi_upper(const SampleSet& s);

struct Clustering {
  std::size_t n_clusters = 0;
  // Cluster index per sample, -1 for noise.
  std::vector<int> labels;
};

// DBSCAN with Euclidean distance. A point is core when at least min_pts
// points (itself included) lie within eps. Border points join the cluster of
// their nearest core neighbour.
Clustering dbscan_clusters(const SampleSet& s, double eps, std::size_t min_pts);

struct PlateauOptions {
  double eps = 1.0;
  std::size_t min_pts = 50;
  double radius = 10.0;
  std::uint64_t seed = 0x91a7ea0ULL;
};

struct PlateauRow {
  double beta_u = 0.0;
  double i_xt_bits = 0.0;
  double i_ty_bits = 0.0;
  std::size_t support_t = 0;
  std::size_t n_clusters = 0;
};

struct PlateauReport {
  std::string header;
  std::vector<PlateauRow> rows;
};

// For each solved point, draws n_samples noisy embeddings of T (symbols on a
// circle, unit Gaussian noise) and counts DBSCAN clusters.
PlateauReport plateau_cluster_report(const std::vector<SolveResult>& sweep,
                                     const JointDistribution& j, std::size_t n_samples,
                                     const PlateauOptions& opts = {});

}  // namespace ibex
