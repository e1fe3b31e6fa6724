#include "lftraj/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lftraj/error.hpp"

namespace lftraj {

namespace {

void require_same_basis(const LegendreSeries& a, const LegendreSeries& b) {
  if (a.basis_tag() != b.basis_tag()) {
    throw Error(ErrorCode::basis_mismatch,
                "basis mismatch: '" + a.basis_tag() + "' vs '" + b.basis_tag() + "'");
  }
}

void require_unit_interval(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::out_of_range, "t = " + std::to_string(t) + " outside [0,1]");
  }
}

}  // namespace

LegendreBasis::LegendreBasis(int degree_cap) : degree_cap_(degree_cap), tag_("lebesgue") {}

void LegendreBasis::evaluate_all(int degree, double t, std::span<double> out) const {
  eval_basis_all(degree, t, out);
}

double LegendreBasis::clenshaw(std::span<const double> coeffs, double t) const {
  // sum c_k L_k = sum d_k P_k(x), d_k = c_k sqrt(2k+1);
  // P_{k+1} = alpha_k P_k + beta_k P_{k-1}, alpha_k = (2k+1)x/(k+1), beta_k = -k/(k+1).
  const int n = static_cast<int>(coeffs.size()) - 1;
  if (n < 0) return 0.0;
  const double x = 2.0 * t - 1.0;
  double b1 = 0.0;
  double b2 = 0.0;
  for (int k = n; k >= 1; --k) {
    const double alpha = (2.0 * k + 1.0) * x / (k + 1.0);
    const double beta_next = -(k + 1.0) / (k + 2.0);
    const double bk = coeffs[k] * std::sqrt(2.0 * k + 1.0) + alpha * b1 + beta_next * b2;
    b2 = b1;
    b1 = bk;
  }
  return coeffs[0] + x * b1 - 0.5 * b2;
}

QuadratureRule LegendreBasis::gauss_rule(int points) const { return gauss_legendre_01(points); }

std::shared_ptr<const SeriesBasis> lebesgue_basis() {
  static const auto basis = std::make_shared<const LegendreBasis>();
  return basis;
}

LegendreSeries::LegendreSeries(std::vector<double> coeffs,
                               std::shared_ptr<const SeriesBasis> basis)
    : coeffs_(std::move(coeffs)), basis_(std::move(basis)) {
  if (!basis_) throw Error(ErrorCode::invalid_argument, "series needs a basis");
}

double LegendreSeries::norm() const {
  double s = 0.0;
  for (double c : coeffs_) s += c * c;
  return std::sqrt(s);
}

LegendreSeries LegendreSeries::truncated(std::size_t length) const {
  std::vector<double> out(length, 0.0);
  std::copy_n(coeffs_.begin(), std::min(length, coeffs_.size()), out.begin());
  return LegendreSeries(std::move(out), basis_);
}

int default_projection_order(int degree, int deg_estimate) {
  if (deg_estimate < 0) return std::max(kSmoothProjectionOrder, degree + 1);
  return std::max(32, (deg_estimate + degree + 1) / 2 + 1);
}

LegendreSeries project(const ScalarFunction& f, int degree, const QuadratureRule& rule,
                       std::shared_ptr<const SeriesBasis> basis) {
  if (degree < 0) throw Error(ErrorCode::invalid_argument, "degree must be >= 0");
  std::vector<double> coeffs(static_cast<std::size_t>(degree) + 1, 0.0);
  std::vector<double> values(static_cast<std::size_t>(degree) + 1);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double t = rule.nodes[q];
    const double fv = f(t);
    if (!std::isfinite(fv)) {
      throw Error(ErrorCode::non_finite, "function value at t = " + std::to_string(t) +
                                             " is not finite");
    }
    basis->evaluate_all(degree, t, values);
    const double wf = rule.weights[q] * fv;
    for (int j = 0; j <= degree; ++j) coeffs[j] += wf * values[j];
  }
  return LegendreSeries(std::move(coeffs), std::move(basis));
}

LegendreSeries project(const ScalarFunction& f, int degree, int deg_estimate,
                       std::shared_ptr<const SeriesBasis> basis) {
  const auto rule = basis->gauss_rule(default_projection_order(degree, deg_estimate));
  return project(f, degree, rule, std::move(basis));
}

LegendreSeries star_product(const LegendreSeries& a, const LegendreSeries& b) {
  require_same_basis(a, b);
  if (a.size() == 0 || b.size() == 0) {
    throw Error(ErrorCode::invalid_argument, "star product of an empty series");
  }
  const auto& basis = a.basis();
  const int out_degree = a.degree() + b.degree();
  if (out_degree > basis->max_product_degree()) {
    throw Error(ErrorCode::degree_cap, "star product degree " + std::to_string(out_degree) +
                                           " exceeds cap " +
                                           std::to_string(basis->max_product_degree()));
  }
  // The integrand B_j * a * b has degree <= 2 * out_degree; out_degree + 1
  // Gauss points integrate it exactly.
  const auto rule = basis->gauss_rule(out_degree + 1);
  std::vector<double> coeffs(static_cast<std::size_t>(out_degree) + 1, 0.0);
  std::vector<double> values(static_cast<std::size_t>(out_degree) + 1);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double t = rule.nodes[q];
    basis->evaluate_all(out_degree, t, values);
    double pa = 0.0;
    double pb = 0.0;
    for (int j = 0; j <= a.degree(); ++j) pa += a.coeffs()[j] * values[j];
    for (int j = 0; j <= b.degree(); ++j) pb += b.coeffs()[j] * values[j];
    const double wp = rule.weights[q] * pa * pb;
    for (int j = 0; j <= out_degree; ++j) coeffs[j] += wp * values[j];
  }
  return LegendreSeries(std::move(coeffs), basis);
}

LegendreSeries star_power(const LegendreSeries& a, int k) {
  if (k < 1) throw Error(ErrorCode::invalid_argument, "star power needs k >= 1");
  LegendreSeries acc = a;
  for (int p = 2; p <= k; ++p) acc = star_product(acc, a);
  return acc;
}

double l2_distance(const LegendreSeries& a, const LegendreSeries& b) {
  require_same_basis(a, b);
  const std::size_t n = std::max(a.size(), b.size());
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return std::sqrt(s);
}

double linf_distance(const LegendreSeries& a, const LegendreSeries& b) {
  require_same_basis(a, b);
  const std::size_t n = std::max(a.size(), b.size());
  double m = 0.0;
  for (std::size_t j = 0; j < n; ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

bool approx_equal(const LegendreSeries& a, const LegendreSeries& b, double tol) {
  return a.basis_tag() == b.basis_tag() && linf_distance(a, b) <= tol;
}

double evaluate(const LegendreSeries& a, double t) {
  require_unit_interval(t);
  return a.basis()->clenshaw(a.coeffs(), t);
}

}  // namespace lftraj
