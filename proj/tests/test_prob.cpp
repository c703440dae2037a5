#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"

#include "ibex/error.hpp"
#include "ibex/prob.hpp"
#include "support.hpp"

using namespace ibex;
using ibex::testing::kPropertyCases;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an ibex::Error");
  return ErrorCode::Parse;
}

Matrix permute_rows(const Matrix& m, const std::vector<std::size_t>& perm) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(perm[i], j);
  return out;
}

Matrix permute_cols(const Matrix& m, const std::vector<std::size_t>& perm) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, perm[j]);
  return out;
}

std::vector<std::size_t> shuffled(Rng& rng, std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.bits() % i]);
  return p;
}

}  // namespace

TEST_CASE("validate_joint") {
  SUBCASE("uniform 2x2") {
    auto j = validate_joint({{0.25, 0.25}, {0.25, 0.25}});
    CHECK(j.size_x() == 2);
    CHECK(j.size_y() == 2);
    CHECK(j.pruned_x().empty());
    CHECK(j.p_x()[0] == doctest::Approx(0.5));
  }
  SUBCASE("zero row is pruned") {
    auto j = validate_joint({{0.5, 0.5}, {0, 0}});
    CHECK(j.size_x() == 1);
    CHECK(j.size_y() == 2);
    REQUIRE(j.pruned_x().size() == 1);
    CHECK(j.pruned_x()[0] == 1);
  }
  SUBCASE("errors") {
    CHECK(code_of([] { validate_joint({{0.3, -0.1}, {0.4, 0.4}}); }) == ErrorCode::NegativeEntry);
    CHECK(code_of([] { validate_joint({{0.3, 0.1}, {0.4, 0.4}}); }) == ErrorCode::SumOutOfTolerance);
    CHECK(code_of([] { validate_joint({{0.0, 0.0}}); }) == ErrorCode::EmptyAfterPruning);
    CHECK(code_of([] { validate_joint({{0.5, 0.5}, {0.0}}); }) == ErrorCode::BadShape);
    CHECK(code_of([] { validate_joint(std::vector<std::vector<double>>{}); }) == ErrorCode::BadShape);
  }
  SUBCASE("drift below the rejection threshold is renormalized") {
    auto j = validate_joint({{0.5 + 4e-7, 0.0}, {0.0, 0.5}});
    double total = 0.0;
    for (double v : j.pxy().data()) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("entropy") {
  CHECK(entropy(Distribution({0.5, 0.5})) == doctest::Approx(1.0));
  CHECK(entropy(Distribution({1.0, 0.0})) == 0.0);
  CHECK(entropy(Distribution({0.5, 0.25, 0.25})) == doctest::Approx(1.5));
  CHECK(code_of([] { Distribution({0.5, 0.6}); }) == ErrorCode::SumOutOfTolerance);
  CHECK(code_of([] { Distribution({1.2, -0.2}); }) == ErrorCode::NegativeEntry);
}

TEST_CASE("mutual_information") {
  CHECK(mutual_information(testing::identity_joint(4)) == doctest::Approx(2.0));
  CHECK(mutual_information(validate_joint({{0.4, 0.1}, {0.1, 0.4}})) ==
        doctest::Approx(0.27807190511263774).epsilon(1e-12));
  auto product = validate_joint({{0.2 * 0.3, 0.2 * 0.7}, {0.8 * 0.3, 0.8 * 0.7}});
  CHECK(std::abs(mutual_information(product)) < 1e-12);
  CHECK(conditional_entropy(testing::identity_joint(4)) == doctest::Approx(0.0));
}

TEST_CASE("kl_divergence") {
  CHECK(kl_divergence(Distribution({0.3, 0.7}), Distribution({0.3, 0.7})) == 0.0);
  CHECK(kl_divergence(Distribution({1.0, 0.0}), Distribution({0.5, 0.5})) == doctest::Approx(1.0));
  CHECK(kl_divergence(Distribution({0.75, 0.25}), Distribution({0.5, 0.5})) ==
        doctest::Approx(0.18872187554086717).epsilon(1e-12));
  CHECK(code_of([] { kl_divergence(Distribution({0.5, 0.5}), Distribution({1.0, 0.0})); }) ==
        ErrorCode::SupportViolation);
  const std::vector<double> p{0.5, 0.5}, q{1.0, 0.0};
  CHECK(std::isinf(kl_divergence_bits(p, q)));
}

TEST_CASE("induce") {
  auto j = testing::identity_joint(4);
  SUBCASE("lossless encoder") {
    auto q = induce(j, Encoder::identity(4, 4));
    CHECK(q.i_xt_bits == doctest::Approx(2.0));
    CHECK(q.i_ty_bits == doctest::Approx(2.0));
  }
  SUBCASE("constant encoder") {
    auto q = induce(j, Encoder::constant(4, 4));
    CHECK(std::abs(q.i_xt_bits) < 1e-12);
    CHECK(std::abs(q.i_ty_bits) < 1e-12);
    CHECK(std::count(q.empty_t.begin(), q.empty_t.end(), true) == 3);
  }
  SUBCASE("pair merge") {
    Encoder e(Matrix::from_rows({{1, 0}, {1, 0}, {0, 1}, {0, 1}}));
    auto q = induce(j, e);
    CHECK(q.i_xt_bits == doctest::Approx(1.0));
    CHECK(q.i_ty_bits == doctest::Approx(1.0));
  }
  SUBCASE("shape mismatch") {
    CHECK(code_of([&] { induce(j, Encoder::constant(3, 2)); }) == ErrorCode::BadShape);
  }
}

TEST_CASE("cross_entropy_cost") {
  Rng rng(7);
  auto j = testing::random_joint(rng, 3, 3);
  auto e = testing::random_encoder(rng, 3, 3);
  auto q = induce(j, e);
  SUBCASE("exact decoder") {
    Decoder d(q.q_y_given_t);
    const double jce = cross_entropy_cost(j, e, d);
    CHECK(q.i_ty_bits == doctest::Approx(entropy(j.p_y()) - jce).epsilon(1e-12));
  }
  SUBCASE("uniform decoder") {
    CHECK(cross_entropy_cost(j, e, Decoder::uniform(3, 3)) == doctest::Approx(std::log2(3.0)));
  }
  SUBCASE("decoder missing support") {
    Decoder d(Matrix::from_rows({{1, 0, 0}, {1, 0, 0}, {1, 0, 0}}));
    CHECK(code_of([&] { cross_entropy_cost(j, e, d); }) == ErrorCode::SupportViolation);
  }
}

TEST_CASE("property: normalization, nonnegativity, DPI and cross-entropy bound") {
  Rng rng(0x9e0b);
  for (int c = 0; c < kPropertyCases; ++c) {
    const std::size_t nx = 2 + rng.bits() % 5, ny = 2 + rng.bits() % 4, nt = 1 + rng.bits() % 6;
    auto j = testing::random_joint(rng, nx, ny, 0.2);
    auto e = testing::random_encoder(rng, j.size_x(), nt, 0.3);
    auto q = induce(j, e);
    const double ixy = mutual_information(j);

    for (std::size_t i = 0; i < e.rows(); ++i) {
      const auto r = e.row(i);
      CHECK(std::abs(std::accumulate(r.begin(), r.end(), 0.0) - 1.0) < 1e-9);
    }
    for (std::size_t t = 0; t < q.q_y_given_t.rows(); ++t) {
      const auto r = q.q_y_given_t.row(t);
      CHECK(std::abs(std::accumulate(r.begin(), r.end(), 0.0) - 1.0) < 1e-9);
    }
    CHECK(std::abs(std::accumulate(q.q_t.begin(), q.q_t.end(), 0.0) - 1.0) < 1e-9);

    CHECK(entropy(j.p_x()) >= -1e-12);
    CHECK(ixy >= -1e-12);
    CHECK(q.i_xt_bits >= -1e-12);
    CHECK(q.i_ty_bits >= -1e-12);
    CHECK(q.i_ty_bits <= q.i_xt_bits + 1e-6);
    CHECK(q.i_ty_bits <= ixy + 1e-6);

    auto pa = testing::random_simplex(rng, ny), pb = testing::random_simplex(rng, ny);
    CHECK(kl_divergence(Distribution(pa), Distribution(pb)) >= -1e-12);

    auto d = Decoder::normalize_rows(testing::random_stochastic(rng, nt, ny));
    CHECK(q.i_ty_bits >= entropy(j.p_y()) - cross_entropy_cost(j, e, d) - 1e-9);
  }
}

TEST_CASE("property: relabeling symbols leaves scalars unchanged") {
  Rng rng(0x51ab);
  for (int c = 0; c < kPropertyCases; ++c) {
    const std::size_t nx = 2 + rng.bits() % 4, ny = 2 + rng.bits() % 4, nt = 2 + rng.bits() % 4;
    auto j = testing::random_joint(rng, nx, ny);
    auto e = testing::random_encoder(rng, nx, nt);
    const auto px = shuffled(rng, nx), py = shuffled(rng, ny), pt = shuffled(rng, nt);

    auto j2 = validate_joint(permute_cols(permute_rows(j.pxy(), px), py));
    Encoder e2(permute_cols(permute_rows(e.matrix(), px), pt));
    const auto a = induce(j, e), b = induce(j2, e2);
    CHECK(std::abs(mutual_information(j) - mutual_information(j2)) < 1e-12);
    CHECK(std::abs(a.i_xt_bits - b.i_xt_bits) < 1e-12);
    CHECK(std::abs(a.i_ty_bits - b.i_ty_bits) < 1e-12);
    CHECK(std::abs(entropy(j.p_y()) - entropy(j2.p_y())) < 1e-12);
  }
}
