#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "lftraj/detector.hpp"
#include "lftraj/error.hpp"
#include "lftraj/orthopoly.hpp"
#include "oracles.hpp"

using namespace lftraj;

namespace {

std::vector<double> lebesgue_moments(int count) {
  std::vector<double> m;
  for (int j = 0; j < count; ++j) m.push_back(1.0 / (j + 1));
  return m;
}

std::vector<double> ramp_moments(int count) {
  std::vector<double> m;
  for (int j = 0; j < count; ++j) m.push_back(2.0 / (j + 2));
  return m;
}

/// gamma_i(j) = int t^j x(t)^i h(t) dt for x(t) = t: lebesgue 1/(i+j+1), ramp 2/(i+j+2)
MomentTable identity_table(int max_i, int max_j, bool ramp) {
  std::vector<std::vector<double>> g(max_i + 1, std::vector<double>(max_j + 1));
  for (int i = 0; i <= max_i; ++i)
    for (int j = 0; j <= max_j; ++j) g[i][j] = ramp ? 2.0 / (i + j + 2) : 1.0 / (i + j + 1);
  return MomentTable::create(g, ramp ? Marginal::from_moments(ramp_moments(max_j + 1))
                                     : Marginal::from_moments(lebesgue_moments(max_j + 1)));
}

}  // namespace

TEST_CASE("Lebesgue moments reproduce the shifted Legendre rows") {
  const auto basis = build_from_moments(lebesgue_moments(5));
  REQUIRE(basis->degree() == 2);
  const auto ref = build_shifted_legendre(2);
  for (int j = 0; j <= 2; ++j)
    for (int k = 0; k <= j; ++k) CHECK(std::abs(basis->entry(j, k) - ref(j, k)) <= 1e-10);
  CHECK(basis->entry(0, 1) == 0.0);

  const auto wider = build_from_moments(lebesgue_moments(13));
  const auto ref6 = build_shifted_legendre(6);
  for (int j = 0; j <= 6; ++j)
    for (int k = 0; k <= j; ++k)
      CHECK(wider->entry(j, k) == doctest::Approx(ref6(j, k)).epsilon(1e-8));
}

TEST_CASE("ramp marginal, degree 1") {
  const auto basis = build_from_moments(ramp_moments(3));
  REQUIRE(basis->degree() == 1);
  CHECK(basis->entry(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(basis->entry(1, 0) == doctest::Approx(-2 * std::sqrt(2.0)).epsilon(1e-13));
  CHECK(basis->entry(1, 1) == doctest::Approx(3 * std::sqrt(2.0)).epsilon(1e-13));
  CHECK(basis->entry(1, 0) == doctest::Approx(-2.8284271).epsilon(1e-7));
  CHECK(basis->entry(1, 1) == doctest::Approx(4.2426407).epsilon(1e-7));
}

TEST_CASE("rows agree with the Hankel-determinant construction") {
  for (const auto& m : {ramp_moments(11), lebesgue_moments(11)}) {
    const auto basis = build_from_moments(m);
    for (int j = 0; j <= 5; ++j) {
      const auto row = oracle::hankel_orthonormal_row(m, j);
      for (int k = 0; k <= j; ++k) CHECK(basis->entry(j, k) == doctest::Approx(row[k]).epsilon(1e-8));
    }
  }
}

TEST_CASE("degenerate marginal is rejected at the offending minor") {
  std::vector<double> m;
  for (int j = 0; j <= 4; ++j) m.push_back(std::pow(0.5, j));
  try {
    build_from_moments(m);
    FAIL("expected singular Hankel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::singular_hankel);
    CHECK(std::string(e.what()).find("index 1") != std::string::npos);
  }
}

TEST_CASE("degree cap and conditioning guard") {
  OrthoBuildOptions wide;
  wide.degree_cap = 20;
  CHECK_THROWS_AS(build_from_moments(lebesgue_moments(27)), Error);  // degree 13 > 12
  // Hilbert-type Hankel matrices lose ~1.5 digits per degree; the guard
  // refuses before the answer becomes noise.
  bool refused = false;
  double last_condition = 0.0;
  for (int n = 1; n <= 12; ++n) {
    try {
      const auto b = build_from_moments(lebesgue_moments(2 * n + 1), wide);
      CHECK(b->condition_estimate() > last_condition);
      last_condition = b->condition_estimate();
      CHECK(orthonormality_defect(*b) <= 1e-8);
    } catch (const Error& e) {
      CHECK((e.code() == ErrorCode::ill_conditioned || e.code() == ErrorCode::singular_hankel));
      refused = true;
      break;
    }
  }
  CHECK(refused);
  CHECK_THROWS_AS(build_from_moments(std::vector<double>{}), Error);
}

TEST_CASE("orthonormality at working degrees") {
  for (int n = 0; n <= 6; ++n) {
    CHECK(orthonormality_defect(*build_from_moments(lebesgue_moments(2 * n + 1))) <= 1e-8);
    CHECK(orthonormality_defect(*build_from_moments(ramp_moments(2 * n + 1))) <= 1e-8);
  }
  const auto b = build_from_moments(ramp_moments(13));
  for (int j = 0; j <= b->degree(); ++j) CHECK(b->entry(j, j) > 0.0);
}

TEST_CASE("recurrence evaluation matches the monomial rows") {
  const auto b = build_from_moments(ramp_moments(13));
  std::vector<double> vals(7);
  for (double t : {0.0, 0.1, 0.45, 0.8, 1.0}) {
    b->evaluate_all(6, t, vals);
    for (int j = 0; j <= 6; ++j) {
      const auto row = b->row(j);
      const double direct = oracle::horner(std::vector<double>(row.begin(), row.end()), t);
      CHECK(std::abs(vals[j] - direct) < 1e-8);
    }
    const std::vector<double> c{0.3, -0.2, 0.1, 0.05, -0.01, 0.002, 0.4};
    double naive = 0.0;
    for (int j = 0; j <= 6; ++j) naive += c[j] * vals[j];
    CHECK(b->clenshaw(c, t) == doctest::Approx(naive).epsilon(1e-12));
  }
}

TEST_CASE("Gauss rule of the marginal") {
  const auto b = build_from_moments(ramp_moments(13));
  for (int points = 1; points <= 6; ++points) {
    const auto rule = b->gauss_rule(points);
    REQUIRE(rule.nodes.size() == static_cast<std::size_t>(points));
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      CHECK(rule.nodes[q] > 0.0);
      CHECK(rule.nodes[q] < 1.0);
      CHECK(rule.weights[q] > 0.0);
    }
    for (int k = 0; k <= 2 * points - 1; ++k)
      CHECK(rule.integrate([k](double t) { return std::pow(t, k); }) ==
            doctest::Approx(2.0 / (k + 2)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(b->gauss_rule(7), Error);
}

TEST_CASE("general coefficient rows") {
  const auto basis = build_from_moments(ramp_moments(5));
  const auto table = identity_table(2, 2, true);
  const auto r = general_coefficient_row(table, basis, 1, 1);
  REQUIRE(r.size() == 2);
  CHECK(r[0] == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(r[1] == doctest::Approx(1.0 / (3 * std::sqrt(2.0))).epsilon(1e-13));
  CHECK(r[1] == doctest::Approx(0.2357023).epsilon(1e-7));
  CHECK(r.basis_tag() == basis->tag());

  const auto e0 = general_coefficient_row(table, basis, 0, 2);
  CHECK(e0[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(e0[1]) < 1e-13);
  CHECK(std::abs(e0[2]) < 1e-13);

  // a table whose marginal differs from the basis
  const auto flat = identity_table(2, 2, false);
  CHECK_THROWS_AS(general_coefficient_row(flat, basis, 1, 1), Error);
  CHECK_THROWS_AS(general_coefficient_row(table, basis, 1, 3), Error);
}

TEST_CASE("h = 1 reproduces the Lebesgue pipeline") {
  const auto basis = build_from_moments(lebesgue_moments(13));
  const auto general = identity_table(4, 6, false);
  std::vector<std::vector<double>> g(5, std::vector<double>(7));
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; j <= 6; ++j) g[i][j] = 1.0 / (i + j + 1);
  const auto plain = MomentTable::create(g, Marginal::lebesgue());
  for (int i = 0; i <= 4; ++i) {
    const auto a = general_coefficient_row(general, basis, i, 6);
    const auto b = coefficient_row(plain, i, 6);
    for (int j = 0; j <= 6; ++j) CHECK(std::abs(a[j] - b[j]) <= 1e-10);
  }
  const auto rg = check_trajectory(general, basis, 1, 4, 1e-9);
  const auto rp = check_trajectory(plain, 1, 4, 1e-9);
  CHECK(rg.verdict == rp.verdict);
  for (std::size_t q = 0; q < rg.residuals.size(); ++q)
    CHECK(std::abs(rg.residuals[q].residual - rp.residuals[q].residual) <= 1e-9);
  for (int k = 0; k <= 1; ++k)
    CHECK(std::abs(rg.reconstruction[k] - rp.reconstruction[k]) <= 1e-9);
}

TEST_CASE("x = t is a trajectory under the ramp marginal") {
  for (int K = 2; K <= 4; ++K) {
    const int degree = K + 1;
    const auto basis = build_from_moments(ramp_moments(2 * degree + 1));
    const auto table = identity_table(K, K, true);
    const auto report = check_trajectory(table, basis, 1, K, 1e-9);
    CHECK(report.verdict == Verdict::trajectory_consistent);
    CHECK(report.max_residual() <= 1e-10);
  }
  const auto small = build_from_moments(ramp_moments(5));
  CHECK_THROWS_AS(check_trajectory(identity_table(3, 3, true), small, 1, 3, 1e-9), Error);
}

TEST_CASE("marginal moments CSV") {
  std::istringstream in("j,value\n0,1\n1,0.5\n2,0.3333333333333333\n");
  const auto m = load_marginal_moments(in);
  REQUIRE(m.size() == 3);
  CHECK(m[1] == 0.5);
  std::istringstream gap("j,value\n0,1\n2,0.5\n");
  CHECK_THROWS_AS(load_marginal_moments(gap), Error);
}
