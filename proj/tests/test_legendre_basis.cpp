#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "lftraj/error.hpp"
#include "lftraj/legendre_basis.hpp"
#include "oracles.hpp"

using namespace lftraj;

TEST_CASE("low-degree rows") {
  const auto d = build_shifted_legendre(2);
  CHECK(d.degree() == 2);
  CHECK(d(0, 0) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK(d(1, 0) == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-14));
  CHECK(d(1, 1) == doctest::Approx(2 * std::sqrt(3.0)).epsilon(1e-14));
  CHECK(d(1, 0) == doctest::Approx(-1.7320508).epsilon(1e-7));
  CHECK(d(1, 1) == doctest::Approx(3.4641016).epsilon(1e-7));

  const double s5 = std::sqrt(5.0);
  CHECK(d(2, 0) == doctest::Approx(s5).epsilon(1e-14));
  CHECK(d(2, 1) == doctest::Approx(-6 * s5).epsilon(1e-14));
  CHECK(d(2, 2) == doctest::Approx(6 * s5).epsilon(1e-14));

  // b (t^2/12 - t/12 + 1/72) with b = 72 sqrt(5) is the same polynomial
  const double b = 72 * s5;
  CHECK(b / 72 == doctest::Approx(d(2, 0)));
  CHECK(-b / 12 == doctest::Approx(d(2, 1)));
  CHECK(b / 12 == doctest::Approx(d(2, 2)));
}

TEST_CASE("rows match the binomial formula and are lower triangular") {
  const auto d = build_shifted_legendre(30);
  for (int j = 0; j <= 30; ++j) {
    const auto row = d.row(j);
    REQUIRE(row.size() == static_cast<std::size_t>(j + 1));
    CHECK(d(j, j) > 0.0);
    for (int k = 0; k <= j; ++k) {
      const double expect = static_cast<double>(oracle::legendre_coeff(j, k));
      CHECK(d(j, k) == doctest::Approx(expect).epsilon(1e-14));
      CHECK(row[k] == d(j, k));
    }
  }
}

TEST_CASE("rows agree with the Hankel-determinant construction") {
  std::vector<double> m;
  for (int k = 0; k <= 10; ++k) m.push_back(1.0 / (k + 1));
  const auto d = build_shifted_legendre(5);
  for (int j = 0; j <= 5; ++j) {
    const auto row = oracle::hankel_orthonormal_row(m, j);
    for (int k = 0; k <= j; ++k) CHECK(d(j, k) == doctest::Approx(row[k]).epsilon(1e-9));
  }
}

TEST_CASE("degree cap") {
  CHECK_NOTHROW(build_shifted_legendre(60));
  CHECK_THROWS_AS(build_shifted_legendre(61), Error);
  CHECK_THROWS_AS(build_shifted_legendre(-1), Error);
  CHECK_NOTHROW(build_shifted_legendre(70, 80));
  try {
    build_shifted_legendre(61);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degree_cap);
  }
}

TEST_CASE("transform maps Lebesgue moments to e0") {
  // Entries grow like 5.8^n, so double moments only resolve low degrees to 1e-12.
  const auto d = build_shifted_legendre(7);
  std::vector<double> m;
  for (int k = 0; k <= 7; ++k) m.push_back(1.0 / (k + 1));
  const auto c = d.apply(m, 7);
  REQUIRE(c.size() == 8);
  CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-14));
  for (int j = 1; j <= 7; ++j) CHECK(std::abs(c[j]) < 1e-12);
}

TEST_CASE("transform of t^p moments gives the exact projections") {
  const auto d = build_shifted_legendre(8);
  for (int p = 0; p <= 4; ++p) {
    std::vector<double> m;
    for (int k = 0; k <= 8; ++k) m.push_back(1.0 / (p + k + 1));
    const auto c = d.apply(m, 8);
    for (int j = 0; j <= 8; ++j)
      CHECK(c[j] == doctest::Approx(static_cast<double>(oracle::monomial_projection(p, j)))
                        .epsilon(1e-9)
                        .scale(1.0));
  }
}

TEST_CASE("eval_basis examples") {
  CHECK(eval_basis(0, 0.37) == 1.0);
  CHECK(std::abs(eval_basis(1, 0.5)) < 1e-15);
  CHECK(eval_basis(2, 0.0) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
  CHECK(eval_basis(2, 0.0) == doctest::Approx(2.2360680).epsilon(1e-7));
  CHECK(eval_basis(3, 1.0) == doctest::Approx(std::sqrt(7.0)).epsilon(1e-14));
}

TEST_CASE("eval_basis rejects out-of-range input") {
  const auto d = build_shifted_legendre(3);
  CHECK_THROWS_AS(eval_basis(-1, 0.5), Error);
  CHECK_THROWS_AS(eval_basis(1, -0.01), Error);
  CHECK_THROWS_AS(eval_basis(1, 1.01), Error);
  CHECK_THROWS_AS(eval_basis(1, std::numeric_limits<double>::quiet_NaN()), Error);
  CHECK_THROWS_AS(eval_basis(d, 4, 0.5), Error);
  CHECK(eval_basis(d, 3, 0.25) == doctest::Approx(eval_basis(3, 0.25)));
}

TEST_CASE("recurrence agrees with the monomial form") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double t = u(rng);
    for (int j = 0; j <= 20; ++j) {
      const double r = eval_basis(j, t);
      const double h = oracle::legendre_horner(j, t);
      // Horner on the monomial form loses eps * sum |c_k| t^k; that bound,
      // not the recurrence, limits agreement at high degree.
      const double horner_err = 4.0 * (j + 1) * std::numeric_limits<double>::epsilon() *
                                oracle::legendre_abs_sum(j, t);
      CHECK(std::abs(r - h) <= horner_err + 1e-12);
      if (j <= 10) CHECK(std::abs(r - h) <= 1e-8);
    }
  }
}

TEST_CASE("eval_basis_all fills consecutive values") {
  std::vector<double> out(11);
  eval_basis_all(10, 0.3, out);
  for (int j = 0; j <= 10; ++j) CHECK(out[j] == doctest::Approx(eval_basis(j, 0.3)).epsilon(1e-15));
}

TEST_CASE("Gauss-Legendre examples") {
  const auto r1 = gauss_legendre_01(1);
  REQUIRE(r1.nodes.size() == 1);
  CHECK(r1.nodes[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r1.weights[0] == doctest::Approx(1.0).epsilon(1e-15));

  const auto r2 = gauss_legendre_01(2);
  REQUIRE(r2.nodes.size() == 2);
  const double lo = (1.0 - 1.0 / std::sqrt(3.0)) / 2, hi = (1.0 + 1.0 / std::sqrt(3.0)) / 2;
  CHECK(std::min(r2.nodes[0], r2.nodes[1]) == doctest::Approx(lo).epsilon(1e-15));
  CHECK(std::max(r2.nodes[0], r2.nodes[1]) == doctest::Approx(hi).epsilon(1e-15));
  CHECK(r2.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r2.weights[1] == doctest::Approx(0.5).epsilon(1e-15));

  const auto r5 = gauss_legendre_01(5);
  CHECK(r5.integrate([](double t) { return std::pow(t, 9); }) ==
        doctest::Approx(0.1).epsilon(1e-14));
  CHECK_THROWS_AS(gauss_legendre_01(0), Error);
}

TEST_CASE("Gauss-Legendre invariants") {
  for (int m = 1; m <= 40; ++m) {
    const auto rule = gauss_legendre_01(m);
    CHECK(rule.order == m);
    double wsum = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      CHECK(rule.nodes[q] > 0.0);
      CHECK(rule.nodes[q] < 1.0);
      CHECK(rule.weights[q] > 0.0);
      wsum += rule.weights[q];
    }
    CHECK(std::abs(wsum - 1.0) <= 1e-14);
    for (int k = 0; k <= 2 * m - 1; ++k) {
      const double q = rule.integrate([k](double t) { return std::pow(t, k); });
      CHECK(std::abs(q - 1.0 / (k + 1)) <= 1e-13);
    }
  }
}

TEST_CASE("orthonormality through degree 25") {
  const int n = 25;
  const auto rule = gauss_legendre_01(n + 1);
  std::vector<std::vector<double>> values(rule.nodes.size(), std::vector<double>(n + 1));
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) eval_basis_all(n, rule.nodes[q], values[q]);
  double worst = 0.0;
  for (int j = 0; j <= n; ++j)
    for (int k = 0; k <= n; ++k) {
      double s = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q)
        s += rule.weights[q] * values[q][j] * values[q][k];
      worst = std::max(worst, std::abs(s - (j == k ? 1.0 : 0.0)));
    }
  CHECK(worst <= 1e-10);

  // same check with a quadrature that shares nothing with the Gauss rule
  const double g = oracle::simpson([](double t) { return eval_basis(7, t) * eval_basis(4, t); });
  CHECK(std::abs(g) < 1e-10);
  const double g2 = oracle::simpson([](double t) { return eval_basis(7, t) * eval_basis(7, t); });
  CHECK(g2 == doctest::Approx(1.0).epsilon(1e-10));
}
