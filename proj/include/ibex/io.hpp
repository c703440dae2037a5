#pragma once

// File formats: joint distributions (CSV matrix or {"pxy": [[...]]}),
// sample sets (CSV, one sample per row), sweep tables and run manifests.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "ibex/lagrangian.hpp"
#include "ibex/matrix.hpp"
#include "ibex/prob.hpp"
#include "ibex/solver.hpp"

namespace ibex {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Numeric CSV: rows separated by newlines, blank lines and '#' comments
// skipped. Ragged rows are rejected with BadShape.
std::vector<std::vector<double>> parse_csv_matrix(std::string_view text);

JointDistribution parse_joint_csv(std::string_view text);
JointDistribution parse_joint_json(std::string_view text);
// Dispatches on a ".json" extension or a leading '{'.
JointDistribution read_joint(const std::filesystem::path& path);

std::string joint_to_csv(const Matrix& pxy);
std::string joint_to_json(const Matrix& pxy);

Matrix read_samples(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

inline constexpr std::string_view kSweepHeader =
    "family,param1,param2,beta_u,i_xt_bits,i_ty_bits,objective,outer_iters,converged,support_t";

struct SweepRecord {
  std::string family;
  double param1 = 0.0;
  double param2 = 0.0;
  double beta_u = 0.0;
  double i_xt_bits = 0.0;
  double i_ty_bits = 0.0;
  double objective = 0.0;
  int outer_iters = 0;
  bool converged = false;
  std::size_t support_t = 0;

  static SweepRecord from(const UFamily& f, const SolveResult& r);
  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

std::string sweep_to_csv(const std::vector<SweepRecord>& rows);
std::vector<SweepRecord> parse_sweep_csv(std::string_view text);
nlohmann::json sweep_to_json(const std::vector<SweepRecord>& rows);

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> parameters;
  std::uint64_t seed = 0;
  std::string tool_version{kToolVersion};
  std::int64_t wall_time_ms = 0;

  nlohmann::json to_json() const;
};

}  // namespace ibex
