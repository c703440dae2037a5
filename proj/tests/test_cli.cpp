#include <cmath>
#include <filesystem>
#include <sstream>

#include "doctest.h"

#include "ibex/cli.hpp"
#include "ibex/datasets.hpp"
#include "ibex/error.hpp"
#include "ibex/io.hpp"
#include "json.hpp"

using namespace ibex;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "ibex_test_cli";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::string ident4() {
  const auto path = scratch("ident4.csv");
  write_file(path, joint_to_csv(gen_identity(4).pxy()));
  return path;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("datasets") {
  const auto id = gen_identity(4);
  CHECK(id.size_x() == 4);
  CHECK(mutual_information(id) == doctest::Approx(2.0));

  const auto map = gen_map(8, 4, 17);
  CHECK(mutual_information(map) == doctest::Approx(2.0));
  CHECK(entropy(map.p_x()) == doctest::Approx(3.0));
  CHECK(conditional_entropy(map) == doctest::Approx(0.0));
  CHECK(gen_map(8, 4, 17).pxy() == map.pxy());

  const auto st = gen_stochastic(4, 4, 0.1, 3);
  CHECK(conditional_entropy(st) > 0.0);
  CHECK(gen_stochastic(4, 4, 0.0, 3).pxy() == gen_map(4, 4, 3).pxy());

  CHECK_THROWS_AS(gen_stochastic(4, 4, 0.5, 3), Error);
  CHECK_THROWS_AS(gen_map(2, 3, 1), Error);
  CHECK_THROWS_AS(gen_identity(0), Error);
}

TEST_CASE("reference values through the command line") {
  auto m = invoke({"map", "--family", "shexp:200:2", "--deterministic", "3.3219", "--beta", "1"});
  CHECK(m.code == 0);
  CHECK(std::stod(m.out) == doctest::Approx(1.9735).epsilon(1e-4));

  auto r = invoke({"range", "--family", "exp:3", "--deterministic", "3.3219"});
  CHECK(r.code == 0);
  REQUIRE(r.out.front() == '[');
  const double lo = std::stod(r.out.substr(1));
  const double hi = std::stod(r.out.substr(r.out.find(',') + 1));
  CHECK(lo == doctest::Approx(1.56e-5).epsilon(0.01));
  CHECK(hi == doctest::Approx(0.33333).epsilon(1e-4));

  auto inv = invoke({"map", "--family", "pow:1", "--deterministic", "2", "--r", "1"});
  CHECK(std::stod(inv.out) == doctest::Approx(0.5));
  auto clamp = invoke({"map", "--family", "pow:1", "--deterministic", "2", "--beta", "0.01"});
  CHECK(clamp.code == 0);
  CHECK(clamp.err.find("clamped") != std::string::npos);
}

TEST_CASE("sweep writes a table and a manifest") {
  const auto joint = ident4();
  const auto out = scratch("sweep.csv");
  auto s = invoke({"sweep", "--joint", joint, "--family", "pow:1", "--auto", "--out", out});
  REQUIRE(s.code == 0);
  const auto text = read_file(out);
  const auto rows = parse_sweep_csv(text);
  CHECK(rows.size() == 20);
  CHECK(count_lines(text) == 21);
  const auto manifest = nlohmann::json::parse(read_file(out + ".manifest.json"));
  CHECK(manifest.at("command") == "sweep");
  CHECK(manifest.at("parameters").at("family") == "pow:1");

  SUBCASE("identical invocations give identical files") {
    const auto again = scratch("sweep2.csv");
    REQUIRE(invoke({"sweep", "--joint", joint, "--family", "pow:1", "--auto", "--out", again}).code == 0);
    CHECK(read_file(again) == text);
  }
  SUBCASE("explicit grid and json") {
    auto js = invoke({"sweep", "--joint", joint, "--betas", "0.5,1,2", "--format", "json"});
    REQUIRE(js.code == 0);
    const auto doc = nlohmann::json::parse(js.out);
    CHECK(doc.at("rows").size() == 3);
    CHECK(doc.contains("manifest"));
  }
}

TEST_CASE("other subcommands") {
  const auto joint = ident4();
  auto g = invoke({"gen", "map", "8", "4", "--seed", "5"});
  CHECK(g.code == 0);
  CHECK(mutual_information(parse_joint_csv(g.out)) == doctest::Approx(2.0));

  auto info = invoke({"info", "--joint", joint});
  CHECK(info.code == 0);
  CHECK(info.out.find("i_xy_bits,2\n") != std::string::npos);

  auto solve = invoke({"solve", "--joint", joint, "--family", "pow:1", "--beta", "0.5"});
  CHECK(solve.code == 0);
  const auto rec = parse_sweep_csv(solve.out).at(0);
  CHECK(std::abs(rec.i_xt_bits - 1.0) < 0.1);

  auto aim = invoke({"aim", "--joint", joint, "--rstar", "1", "--eta", "50", "--format", "json"});
  CHECK(aim.code == 0);
  CHECK(std::abs(nlohmann::json::parse(aim.out).at("i_xt_bits").get<double>() - 0.9218) < 0.05);

  auto curve = invoke({"curve", "--deterministic", "2", "--points", "5", "--rmax", "4"});
  CHECK(curve.out == "i_xt_bits,i_ty_bits\n0,0\n1,1\n2,2\n3,2\n4,2\n");

  const auto samples = scratch("samples.csv");
  write_file(samples, "0,0\n0,0\n1000,0\n1000,0\n");
  auto est = invoke({"estimate", "--samples", samples});
  CHECK(std::stod(est.out) == doctest::Approx(1.0));
  auto cl = invoke({"cluster", "--samples", samples, "--eps", "1", "--min-pts", "2"});
  CHECK(cl.out == "2\n");

  auto rep = invoke({"report", "--joint", joint, "--family", "identity", "--betas",
                     "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9", "--samples", "300"});
  CHECK(rep.code == 0);
  CHECK(rep.out.find("distinct_levels,1\n") != std::string::npos);

  auto bound = invoke({"range", "--family", "exp:2", "--bound"});
  CHECK(bound.out == "[0, 0.5]\n");
}

TEST_CASE("exit codes") {
  const auto joint = ident4();
  CHECK(invoke({"--help"}).code == cli::kOk);
  CHECK(invoke({}).code == cli::kUsage);
  CHECK(invoke({"solve", "--joint", joint}).code == cli::kUsage);
  CHECK(invoke({"solve", "--joint", joint, "--family", "quad:1", "--beta", "1"}).code == cli::kUsage);
  CHECK(invoke({"sweep", "--joint", joint}).code == cli::kUsage);
  CHECK(invoke({"map", "--family", "identity", "--deterministic", "2", "--beta", "1"}).code == cli::kUsage);
  CHECK(invoke({"solve", "--joint", scratch("missing.csv"), "--beta", "1"}).code == cli::kDataError);

  const auto bad = scratch("bad.csv");
  write_file(bad, "0.5,0.6\n");
  auto e = invoke({"info", "--joint", bad});
  CHECK(e.code == cli::kDataError);
  CHECK(e.err.find("SumOutOfTolerance") != std::string::npos);
  CHECK(invoke({"gen", "stochastic", "4", "4", "0.7"}).code == cli::kDataError);

  const auto noisy = scratch("noisy.csv");
  write_file(noisy, joint_to_csv(gen_stochastic(6, 3, 0.2, 4).pxy()));
  CHECK(invoke({"solve", "--joint", noisy, "--beta", "0.3", "--max-iter", "1"}).code == cli::kNotConverged);
}
