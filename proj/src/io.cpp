#include "ibex/io.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "ibex/error.hpp"
#include "ibex/format.hpp"

namespace ibex {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view field) {
  field = trim(field);
  double v = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (field == "inf") return std::numeric_limits<double>::infinity();
  if (ec != std::errc() || ptr != end || field.empty())
    throw Error(ErrorCode::Parse, "not a number: '" + std::string(field) + "'");
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    const auto line = trim(text.substr(start, pos - start));
    if (!line.empty() && line.front() != '#') fn(line);
    start = pos + 1;
  }
}

}  // namespace

std::vector<std::vector<double>> parse_csv_matrix(std::string_view text) {
  std::vector<std::vector<double>> rows;
  for_each_line(text, [&](std::string_view line) {
    std::vector<double> row;
    for (auto field : split_fields(line)) row.push_back(parse_double(field));
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(ErrorCode::BadShape, "row " + std::to_string(rows.size()) + " has " +
                                           std::to_string(row.size()) + " columns, expected " +
                                           std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  });
  if (rows.empty()) throw Error(ErrorCode::BadShape, "no numeric rows");
  return rows;
}

JointDistribution parse_joint_csv(std::string_view text) {
  return validate_joint(parse_csv_matrix(text));
}

JointDistribution parse_joint_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
  if (!doc.is_object() || !doc.contains("pxy") || !doc["pxy"].is_array())
    throw Error(ErrorCode::Parse, "expected an object with a \"pxy\" matrix");
  std::vector<std::vector<double>> rows;
  for (const auto& row : doc["pxy"]) {
    if (!row.is_array()) throw Error(ErrorCode::Parse, "pxy rows must be arrays");
    std::vector<double> values;
    for (const auto& v : row) {
      if (!v.is_number()) throw Error(ErrorCode::Parse, "pxy entries must be numbers");
      values.push_back(v.get<double>());
    }
    rows.push_back(std::move(values));
  }
  return validate_joint(rows);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Parse, "cannot write " + path.string());
  out << contents;
}

JointDistribution read_joint(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto body = trim(text);
  if (path.extension() == ".json" || (!body.empty() && body.front() == '{'))
    return parse_joint_json(text);
  return parse_joint_csv(text);
}

std::string joint_to_csv(const Matrix& pxy) {
  std::string out;
  for (std::size_t x = 0; x < pxy.rows(); ++x) {
    for (std::size_t y = 0; y < pxy.cols(); ++y) {
      if (y) out += ',';
      out += format_double(pxy(x, y));
    }
    out += '\n';
  }
  return out;
}

std::string joint_to_json(const Matrix& pxy) {
  nlohmann::json doc;
  doc["pxy"] = pxy.to_rows();
  return doc.dump() + "\n";
}

Matrix read_samples(const std::filesystem::path& path) {
  return Matrix::from_rows(parse_csv_matrix(read_file(path)));
}

SweepRecord SweepRecord::from(const UFamily& f, const SolveResult& r) {
  return {f.name(),       f.param1(),    f.param2(),          r.beta_u,    r.i_xt_bits,
          r.i_ty_bits,    r.objective,   r.outer_iterations,  r.converged, r.support_t};
}

std::string sweep_to_csv(const std::vector<SweepRecord>& rows) {
  std::string out{kSweepHeader};
  out += '\n';
  for (const auto& r : rows) {
    out += r.family + ',' + format_double(r.param1) + ',' + format_double(r.param2) + ',' +
           format_double(r.beta_u) + ',' + format_double(r.i_xt_bits) + ',' +
           format_double(r.i_ty_bits) + ',' + format_double(r.objective) + ',' +
           std::to_string(r.outer_iters) + ',' + (r.converged ? "1" : "0") + ',' +
           std::to_string(r.support_t) + '\n';
  }
  return out;
}

std::vector<SweepRecord> parse_sweep_csv(std::string_view text) {
  std::vector<SweepRecord> rows;
  bool header_seen = false;
  for_each_line(text, [&](std::string_view line) {
    if (!header_seen) {
      if (line != kSweepHeader) throw Error(ErrorCode::Parse, "unexpected sweep header");
      header_seen = true;
      return;
    }
    const auto f = split_fields(line);
    if (f.size() != 10) throw Error(ErrorCode::BadShape, "sweep rows have 10 columns");
    SweepRecord r;
    r.family = std::string(trim(f[0]));
    r.param1 = parse_double(f[1]);
    r.param2 = parse_double(f[2]);
    r.beta_u = parse_double(f[3]);
    r.i_xt_bits = parse_double(f[4]);
    r.i_ty_bits = parse_double(f[5]);
    r.objective = parse_double(f[6]);
    r.outer_iters = static_cast<int>(parse_double(f[7]));
    r.converged = parse_double(f[8]) != 0.0;
    r.support_t = static_cast<std::size_t>(parse_double(f[9]));
    rows.push_back(std::move(r));
  });
  if (!header_seen) throw Error(ErrorCode::Parse, "missing sweep header");
  return rows;
}

nlohmann::json sweep_to_json(const std::vector<SweepRecord>& rows) {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows)
    arr.push_back({{"family", r.family},
                   {"param1", r.param1},
                   {"param2", r.param2},
                   {"beta_u", r.beta_u},
                   {"i_xt_bits", r.i_xt_bits},
                   {"i_ty_bits", r.i_ty_bits},
                   {"objective", r.objective},
                   {"outer_iters", r.outer_iters},
                   {"converged", r.converged},
                   {"support_t", r.support_t}});
  return arr;
}

nlohmann::json RunManifest::to_json() const {
  return {{"command", command},
          {"parameters", parameters},
          {"seed", seed},
          {"tool_version", tool_version},
          {"wall_time_ms", wall_time_ms}};
}

}  // namespace ibex
