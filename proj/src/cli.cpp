#include "ibex/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ibex/curve.hpp"
#include "ibex/datasets.hpp"
#include "ibex/error.hpp"
#include "ibex/estimators.hpp"
#include "ibex/format.hpp"
#include "ibex/io.hpp"
#include "ibex/lagrangian.hpp"
#include "ibex/solver.hpp"

namespace ibex::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string joint;
  std::string family = "pow:1";
  std::optional<double> beta;
  std::vector<double> betas;
  bool auto_grid = false;
  int points = 20;
  std::optional<double> deterministic;
  std::optional<double> slope;
  std::size_t t_card = 0;
  bool extended_t = false;
  std::uint64_t seed = 1;
  int restarts = 10;
  std::optional<int> max_iter;
  std::string out;
  std::string format = "csv";

  // gen
  std::string kind;
  std::vector<double> shape;
  // aim
  double r_star = 0.0;
  double eta = 50.0;
  // range / map
  bool bound = false;
  std::optional<double> inf_beta0;
  std::optional<double> r;
  // curve
  std::optional<double> r_limit;
  // estimate / cluster / report
  std::string samples;
  double sigma2 = kDefaultKernelVariance;
  double eps = 0.3;
  std::size_t min_pts = 50;
  double resolution = 0.1;
  std::size_t n_samples = 2000;
};

class Invocation {
 public:
  Invocation(std::string command, const Options& opt, std::ostream& out)
      : opt_(opt), out_(out), start_(std::chrono::steady_clock::now()) {
    manifest_.command = std::move(command);
    manifest_.seed = opt.seed;
  }

  void param(const std::string& key, const std::string& value) {
    manifest_.parameters[key] = value;
  }

  bool json_format() const { return opt_.format == "json"; }

  // Writes to --out (with a manifest alongside) or to stdout.
  void emit_text(const std::string& text) {
    stamp();
    if (opt_.out.empty()) {
      out_ << text;
      return;
    }
    write_file(opt_.out, text);
    write_file(opt_.out + ".manifest.json", manifest_.to_json().dump(2) + "\n");
  }

  void emit_json(json doc) {
    stamp();
    doc["manifest"] = manifest_.to_json();
    const std::string text = doc.dump(2) + "\n";
    if (opt_.out.empty())
      out_ << text;
    else
      write_file(opt_.out, text);
  }

 private:
  void stamp() {
    manifest_.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - start_)
                                 .count();
  }

  const Options& opt_;
  std::ostream& out_;
  RunManifest manifest_;
  std::chrono::steady_clock::time_point start_;
};

UFamily parse_family(const std::string& spec) {
  try {
    return UFamily::parse(spec);
  } catch (const ibex::Error& e) {
    throw UsageError(e.what());
  }
}

std::optional<CurveSpec> curve_from(const Options& opt) {
  if (opt.deterministic && opt.slope)
    throw UsageError("--deterministic and --slope are mutually exclusive");
  try {
    if (opt.deterministic) return CurveSpec::deterministic(*opt.deterministic);
    if (opt.slope) return CurveSpec::unknown_bounded(*opt.slope);
  } catch (const ibex::Error& e) {
    throw UsageError(e.what());
  }
  return std::nullopt;
}

JointDistribution load_joint(const Options& opt) {
  if (opt.joint.empty()) throw UsageError("--joint is required");
  return read_joint(opt.joint);
}

SolverConfig solver_config(const Options& opt) {
  SolverConfig cfg;
  cfg.cardinality_t = opt.t_card;
  cfg.extended_t = opt.extended_t;
  cfg.seed = opt.seed;
  cfg.restarts = opt.restarts;
  if (opt.max_iter) {
    cfg.max_outer = *opt.max_iter;
    cfg.max_inner = 10 * *opt.max_iter;
  }
  return cfg;
}

unsigned thread_cap() {
  const char* env = std::getenv("IBEX_THREADS");
  if (!env || !*env) return 0;
  try {
    return static_cast<unsigned>(std::stoul(env));
  } catch (const std::exception&) {
    throw UsageError("IBEX_THREADS must be a non-negative integer");
  }
}

std::string bool_text(bool b) { return b ? "1" : "0"; }

json result_json(const UFamily& f, const SolveResult& r) {
  return {{"family", f.spec()},
          {"beta_u", r.beta_u},
          {"beta_effective", r.beta_effective},
          {"i_xt_bits", r.i_xt_bits},
          {"i_ty_bits", r.i_ty_bits},
          {"objective", r.objective},
          {"outer_iterations", r.outer_iterations},
          {"inner_iterations", r.inner_iterations},
          {"converged", r.converged},
          {"support_t", r.support_t},
          {"encoder", r.encoder.matrix().to_rows()}};
}

std::vector<double> sweep_betas(const Options& opt, const JointDistribution& j, const UFamily& f) {
  if (opt.auto_grid == !opt.betas.empty())
    throw UsageError("give exactly one of --betas or --auto");
  if (opt.auto_grid) return auto_betas(j, f, curve_from(opt), opt.points);
  for (double b : opt.betas)
    if (!(b >= 0.0)) throw UsageError("multipliers must be >= 0");
  return opt.betas;
}

// ---------------------------------------------------------------------------

int cmd_gen(const Options& opt, std::ostream& out) {
  Invocation inv("gen", opt, out);
  const auto count = [&](std::size_t k) -> std::size_t {
    if (opt.shape.size() <= k) throw UsageError("missing dataset arguments for " + opt.kind);
    const double v = opt.shape[k];
    if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v)))
      throw UsageError("alphabet sizes must be positive integers");
    return static_cast<std::size_t>(v);
  };
  std::optional<JointDistribution> j;
  if (opt.kind == "identity") {
    j = gen_identity(count(0));
  } else if (opt.kind == "map") {
    j = gen_map(count(0), count(1), opt.seed);
  } else if (opt.kind == "stochastic") {
    if (opt.shape.size() < 3) throw UsageError("stochastic needs N M NOISE");
    j = gen_stochastic(count(0), count(1), opt.shape[2], opt.seed);
  } else {
    throw UsageError("dataset kind must be identity, map or stochastic");
  }
  inv.param("kind", opt.kind);
  for (std::size_t k = 0; k < opt.shape.size(); ++k)
    inv.param("arg" + std::to_string(k), format_double(opt.shape[k]));
  if (inv.json_format()) {
    inv.emit_json({{"pxy", j->pxy().to_rows()}});
  } else {
    inv.emit_text(joint_to_csv(j->pxy()));
  }
  return kOk;
}

int cmd_info(const Options& opt, std::ostream& out) {
  Invocation inv("info", opt, out);
  inv.param("joint", opt.joint);
  const auto j = load_joint(opt);
  std::vector<std::pair<std::string, double>> rows = {
      {"size_x", static_cast<double>(j.size_x())},
      {"size_y", static_cast<double>(j.size_y())},
      {"pruned_x", static_cast<double>(j.pruned_x().size())},
      {"h_x_bits", entropy(j.p_x())},
      {"h_y_bits", entropy(j.p_y())},
      {"i_xy_bits", mutual_information(j)},
      {"h_y_given_x_bits", conditional_entropy(j)},
      {"deterministic", is_deterministic(j) ? 1.0 : 0.0}};
  if (inv.json_format()) {
    json doc;
    for (const auto& [k, v] : rows) doc[k] = v;
    doc["pruned_indices"] = j.pruned_x();
    inv.emit_json(doc);
  } else {
    std::string text = "quantity,value\n";
    for (const auto& [k, v] : rows) text += k + "," + format_double(v) + "\n";
    inv.emit_text(text);
  }
  return kOk;
}

int cmd_solve(const Options& opt, std::ostream& out) {
  Invocation inv("solve", opt, out);
  if (!opt.beta) throw UsageError("--beta is required");
  const auto f = parse_family(opt.family);
  inv.param("joint", opt.joint);
  inv.param("family", f.spec());
  inv.param("beta", format_double(*opt.beta));
  inv.param("restarts", std::to_string(opt.restarts));
  const auto j = load_joint(opt);
  const auto r = solve_convex(j, f, *opt.beta, solver_config(opt));
  if (inv.json_format())
    inv.emit_json(result_json(f, r));
  else
    inv.emit_text(sweep_to_csv({SweepRecord::from(f, r)}));
  return r.converged ? kOk : kNotConverged;
}

int cmd_sweep(const Options& opt, std::ostream& out) {
  Invocation inv("sweep", opt, out);
  const auto f = parse_family(opt.family);
  inv.param("joint", opt.joint);
  inv.param("family", f.spec());
  inv.param("restarts", std::to_string(opt.restarts));
  const auto j = load_joint(opt);
  const auto betas = sweep_betas(opt, j, f);
  std::string grid;
  for (double b : betas) grid += (grid.empty() ? "" : ",") + format_double(b);
  inv.param("betas", grid);
  const auto results = sweep(j, f, betas, solver_config(opt), thread_cap());
  std::vector<SweepRecord> rows;
  for (const auto& r : results) rows.push_back(SweepRecord::from(f, r));
  if (inv.json_format())
    inv.emit_json({{"rows", sweep_to_json(rows)}});
  else
    inv.emit_text(sweep_to_csv(rows));
  return kOk;
}

int cmd_aim(const Options& opt, std::ostream& out) {
  Invocation inv("aim", opt, out);
  const double beta = opt.beta.value_or(1.0);
  inv.param("joint", opt.joint);
  inv.param("r_star", format_double(opt.r_star));
  inv.param("eta", format_double(opt.eta));
  inv.param("beta", format_double(beta));
  const auto j = load_joint(opt);
  const auto a = aim_compression(j, opt.r_star, opt.eta, beta, solver_config(opt));
  if (inv.json_format()) {
    auto doc = result_json(UFamily::shifted_exponential(opt.eta, opt.r_star), a.result);
    doc["r_star"] = a.r_star;
    doc["deviation"] = a.deviation;
    doc["target_unreachable"] = a.target_unreachable;
    inv.emit_json(doc);
  } else {
    inv.emit_text("r_star,eta,beta_u,i_xt_bits,i_ty_bits,deviation,converged,target_unreachable\n" +
                  format_double(a.r_star) + "," + format_double(opt.eta) + "," +
                  format_double(beta) + "," + format_double(a.result.i_xt_bits) + "," +
                  format_double(a.result.i_ty_bits) + "," + format_double(a.deviation) + "," +
                  bool_text(a.result.converged) + "," + bool_text(a.target_unreachable) + "\n");
  }
  return a.result.converged ? kOk : kNotConverged;
}

int cmd_range(const Options& opt, std::ostream& out) {
  Invocation inv("range", opt, out);
  const auto f = parse_family(opt.family);
  inv.param("family", f.spec());
  MultiplierRange range;
  if (opt.bound) {
    if (f.is_identity()) throw UsageError("the bound needs a strictly convex family");
    range = multiplier_range_bound(f, opt.inf_beta0);
  } else {
    const auto c = curve_from(opt);
    if (!c || !c->known_shape())
      throw UsageError("range needs --deterministic IXY (or --bound)");
    range = multiplier_range(f, *c);
  }
  if (inv.json_format())
    inv.emit_json({{"lo", range.lo}, {"hi", format_double(range.hi)}});
  else
    inv.emit_text("[" + format_double(range.lo) + ", " + format_double(range.hi) + "]\n");
  return kOk;
}

int cmd_map(const Options& opt, std::ostream& out, std::ostream& err) {
  Invocation inv("map", opt, out);
  const auto f = parse_family(opt.family);
  if (f.is_identity()) throw UsageError("mapping needs a strictly convex family");
  const auto c = curve_from(opt);
  if (!c) throw UsageError("map needs --deterministic IXY or --slope S");
  if (opt.beta.has_value() == opt.r.has_value()) throw UsageError("give exactly one of --beta or --r");
  inv.param("family", f.spec());
  double value = 0.0;
  if (opt.beta) {
    const auto comp = compression_for_beta(f, *c, *opt.beta);
    if (comp.out_of_range) err << "warning: beta_u outside the explorable range; clamped\n";
    value = comp.r;
  } else {
    value = beta_for_compression(f, *c, *opt.r);
  }
  if (inv.json_format())
    inv.emit_json({{opt.beta ? "i_xt_bits" : "beta_u", value}});
  else
    inv.emit_text(format_double(value) + "\n");
  return kOk;
}

int cmd_curve(const Options& opt, std::ostream& out) {
  Invocation inv("curve", opt, out);
  if (!opt.deterministic) throw UsageError("curve needs --deterministic IXY");
  if (opt.points < 2) throw UsageError("--points must be >= 2");
  const double i_xy = *opt.deterministic;
  const double limit = opt.r_limit.value_or(1.5 * i_xy);
  std::string text = "i_xt_bits,i_ty_bits\n";
  for (int k = 0; k < opt.points; ++k) {
    const double r = limit * k / (opt.points - 1);
    text += format_double(r) + "," + format_double(deterministic_curve(i_xy, r)) + "\n";
  }
  inv.emit_text(text);
  return kOk;
}

int cmd_estimate(const Options& opt, std::ostream& out) {
  Invocation inv("estimate", opt, out);
  if (opt.samples.empty()) throw UsageError("--samples is required");
  inv.param("samples", opt.samples);
  inv.param("sigma2", format_double(opt.sigma2));
  const double bits = kde_mi_upper(SampleSet(read_samples(opt.samples), opt.sigma2));
  if (inv.json_format())
    inv.emit_json({{"i_xt_upper_bits", bits}});
  else
    inv.emit_text(format_double(bits) + "\n");
  return kOk;
}

int cmd_cluster(const Options& opt, std::ostream& out) {
  Invocation inv("cluster", opt, out);
  if (opt.samples.empty()) throw UsageError("--samples is required");
  inv.param("samples", opt.samples);
  inv.param("eps", format_double(opt.eps));
  inv.param("min_pts", std::to_string(opt.min_pts));
  const auto c = dbscan_clusters(SampleSet(read_samples(opt.samples)), opt.eps, opt.min_pts);
  if (inv.json_format()) {
    inv.emit_json({{"n_clusters", c.n_clusters}, {"labels", c.labels}});
  } else if (opt.out.empty()) {
    inv.emit_text(std::to_string(c.n_clusters) + "\n");
  } else {
    std::string text = "label\n";
    for (int l : c.labels) text += std::to_string(l) + "\n";
    inv.emit_text(text);
    out << c.n_clusters << "\n";
  }
  return kOk;
}

int cmd_report(const Options& opt, std::ostream& out) {
  Invocation inv("report", opt, out);
  const auto f = parse_family(opt.family);
  inv.param("joint", opt.joint);
  inv.param("family", f.spec());
  const auto j = load_joint(opt);
  const auto betas = sweep_betas(opt, j, f);
  const auto results = sweep(j, f, betas, solver_config(opt), thread_cap());

  std::vector<CurvePoint> points;
  for (const auto& r : results) points.push_back(CurvePoint::from(r));
  const bool deterministic = is_deterministic(j);
  const auto est = pareto_filter(points, mutual_information(j));
  const auto rep = explorability_report(est, f.spec(), opt.resolution, deterministic);
  PlateauOptions popts;
  popts.seed = opt.seed;
  const auto plateau = plateau_cluster_report(results, j, opt.n_samples, popts);

  if (inv.json_format()) {
    json rows = json::array();
    for (const auto& p : plateau.rows)
      rows.push_back({{"beta_u", p.beta_u},
                      {"i_xt_bits", p.i_xt_bits},
                      {"i_ty_bits", p.i_ty_bits},
                      {"support_t", p.support_t},
                      {"n_clusters", p.n_clusters}});
    json doc = {{"family", rep.family},
                {"points", rep.points},
                {"pareto_points", rep.pareto_points},
                {"distinct_levels", rep.distinct_levels},
                {"resolution", rep.resolution},
                {"max_gap", rep.max_gap},
                {"coverage", rep.coverage},
                {"deterministic", deterministic},
                {"plateau_note", plateau.header},
                {"plateau", rows}};
    if (rep.max_deviation) doc["max_deviation"] = *rep.max_deviation;
    inv.emit_json(doc);
    return kOk;
  }
  std::ostringstream text;
  text << "family," << rep.family << "\n"
       << "points," << rep.points << "\n"
       << "pareto_points," << rep.pareto_points << "\n"
       << "distinct_levels," << rep.distinct_levels << "\n"
       << "resolution," << format_double(rep.resolution) << "\n"
       << "max_gap," << format_double(rep.max_gap) << "\n"
       << "coverage," << format_double(rep.coverage) << "\n";
  if (rep.max_deviation) text << "max_deviation," << format_double(*rep.max_deviation) << "\n";
  text << "\n" << plateau.header << "\n"
       << "beta_u,i_xt_bits,i_ty_bits,support_t,n_clusters\n";
  for (const auto& p : plateau.rows)
    text << format_double(p.beta_u) << "," << format_double(p.i_xt_bits) << ","
         << format_double(p.i_ty_bits) << "," << p.support_t << "," << p.n_clusters << "\n";
  inv.emit_text(text.str());
  return kOk;
}

// ---------------------------------------------------------------------------

void add_solver_flags(CLI::App* sub, Options& o) {
  sub->add_option("--t-card", o.t_card, "Cardinality of T (0 = |X|)");
  sub->add_flag("--extended-t", o.extended_t, "Use |T| = |X| + |Y|");
  sub->add_option("--restarts", o.restarts, "Random restarts per solve")->check(CLI::NonNegativeNumber);
  sub->add_option("--max-iter", o.max_iter, "Iteration blocks per start (10 steps each)")
      ->check(CLI::PositiveNumber);
}

void add_output_flags(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out, "Output file (stdout when absent)");
  sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void add_curve_flags(CLI::App* sub, Options& o) {
  sub->add_option("--deterministic", o.deterministic, "Deterministic curve with this I(X;Y) in bits");
  sub->add_option("--slope", o.slope, "Assumed constant curve slope in (0, 1]");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Exact discrete information-bottleneck solver and analysis toolkit", "ibex"};
  app.require_subcommand(1);
  app.add_option("--seed", o.seed, "Master seed")->capture_default_str();

  auto* gen = app.add_subcommand("gen", "Generate a joint distribution");
  gen->add_option("kind", o.kind, "identity | map | stochastic")->required();
  gen->add_option("args", o.shape, "N [M [NOISE]]")->required();
  gen->add_option("--seed", o.seed, "Seed for the map");
  add_output_flags(gen, o);

  auto* info = app.add_subcommand("info", "Entropies and mutual information of a joint");
  info->add_option("--joint", o.joint, "Joint distribution (CSV or JSON)")->required();
  add_output_flags(info, o);

  auto* solve = app.add_subcommand("solve", "Maximise a (convex) IB Lagrangian");
  solve->add_option("--joint", o.joint)->required();
  solve->add_option("--family", o.family, "identity | pow:A | exp:E | shexp:E:R");
  solve->add_option("--beta", o.beta, "Multiplier beta_u")->required();
  solve->add_option("--seed", o.seed);
  add_solver_flags(solve, o);
  add_output_flags(solve, o);

  auto* sweep_cmd = app.add_subcommand("sweep", "Solve for a list of multipliers");
  sweep_cmd->add_option("--joint", o.joint)->required();
  sweep_cmd->add_option("--family", o.family);
  sweep_cmd->add_option("--betas", o.betas, "Comma separated multipliers")->delimiter(',');
  sweep_cmd->add_flag("--auto", o.auto_grid, "Log-spaced grid inside the explorable range");
  sweep_cmd->add_option("--points", o.points, "Points in the auto grid");
  sweep_cmd->add_option("--seed", o.seed);
  add_curve_flags(sweep_cmd, o);
  add_solver_flags(sweep_cmd, o);
  add_output_flags(sweep_cmd, o);

  auto* aim = app.add_subcommand("aim", "Target a compression level with the shifted exponential");
  aim->add_option("--joint", o.joint)->required();
  aim->add_option("--rstar", o.r_star, "Target I(X;T) in bits")->required();
  aim->add_option("--eta", o.eta, "Steepness")->check(CLI::PositiveNumber);
  aim->add_option("--beta", o.beta, "Multiplier (default 1)");
  aim->add_option("--seed", o.seed);
  add_solver_flags(aim, o);
  add_output_flags(aim, o);

  auto* range = app.add_subcommand("range", "Multiplier range that explores the curve");
  range->add_option("--family", o.family)->required();
  add_curve_flags(range, o);
  range->add_flag("--bound", o.bound, "Shape-free bound [0, beta_top]");
  range->add_option("--inf-beta0", o.inf_beta0, "Numerator term for the bound (>= 1)");
  add_output_flags(range, o);

  auto* map = app.add_subcommand("map", "Multiplier <-> compression on a known curve");
  map->add_option("--family", o.family)->required();
  add_curve_flags(map, o);
  map->add_option("--beta", o.beta, "Multiplier -> compression");
  map->add_option("--r", o.r, "Compression -> multiplier");
  add_output_flags(map, o);

  auto* curve = app.add_subcommand("curve", "Tabulate the deterministic IB curve");
  curve->add_option("--deterministic", o.deterministic, "I(X;Y) in bits")->required();
  curve->add_option("--points", o.points);
  curve->add_option("--rmax", o.r_limit, "Largest I(X;T) tabulated");
  add_output_flags(curve, o);

  auto* estimate = app.add_subcommand("estimate", "Kernel upper bound on I(X;T) from samples");
  estimate->add_option("--samples", o.samples, "CSV, one sample mean per row")->required();
  estimate->add_option("--sigma2", o.sigma2, "Kernel variance")->check(CLI::PositiveNumber);
  add_output_flags(estimate, o);

  auto* cluster = app.add_subcommand("cluster", "DBSCAN cluster count of samples");
  cluster->add_option("--samples", o.samples)->required();
  cluster->add_option("--eps", o.eps)->check(CLI::PositiveNumber);
  cluster->add_option("--min-pts", o.min_pts)->check(CLI::PositiveNumber);
  add_output_flags(cluster, o);

  auto* report = app.add_subcommand("report", "Explorability and plateau/cluster tables");
  report->add_option("--joint", o.joint)->required();
  report->add_option("--family", o.family);
  report->add_option("--betas", o.betas)->delimiter(',');
  report->add_flag("--auto", o.auto_grid);
  report->add_option("--points", o.points);
  report->add_option("--resolution", o.resolution)->check(CLI::PositiveNumber);
  report->add_option("--samples", o.n_samples, "Samples per point for clustering");
  report->add_option("--seed", o.seed);
  add_curve_flags(report, o);
  add_solver_flags(report, o);
  add_output_flags(report, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(o, out);
    if (info->parsed()) return cmd_info(o, out);
    if (solve->parsed()) return cmd_solve(o, out);
    if (sweep_cmd->parsed()) return cmd_sweep(o, out);
    if (aim->parsed()) return cmd_aim(o, out);
    if (range->parsed()) return cmd_range(o, out);
    if (map->parsed()) return cmd_map(o, out, err);
    if (curve->parsed()) return cmd_curve(o, out);
    if (estimate->parsed()) return cmd_estimate(o, out);
    if (cluster->parsed()) return cmd_cluster(o, out);
    if (report->parsed()) return cmd_report(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ibex::Error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

}  // namespace ibex::cli
