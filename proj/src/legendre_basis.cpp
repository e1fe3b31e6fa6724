#include "lftraj/legendre_basis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lftraj/error.hpp"

namespace lftraj {

namespace {

// P_m(x) and P_{m-1}(x).
std::pair<double, double> legendre_pair(int m, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (m == 0) return {1.0, 0.0};
  for (int k = 1; k < m; ++k) {
    const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

}  // namespace

std::span<const double> BasisTransform::row(int j) const {
  if (j < 0 || j > degree_) {
    throw Error(ErrorCode::out_of_range, "basis row " + std::to_string(j) + " outside 0.." +
                                             std::to_string(degree_));
  }
  return {entries_.data() + index(j, 0), static_cast<std::size_t>(j) + 1};
}

std::vector<double> BasisTransform::apply(std::span<const double> moments, int rows) const {
  if (rows < 0 || rows > degree_) {
    throw Error(ErrorCode::out_of_range,
                "transform has degree " + std::to_string(degree_) + ", asked for " +
                    std::to_string(rows));
  }
  if (moments.size() < static_cast<std::size_t>(rows) + 1) {
    throw Error(ErrorCode::insufficient_moments,
                "need " + std::to_string(rows + 1) + " moments, got " +
                    std::to_string(moments.size()));
  }
  std::vector<double> out(static_cast<std::size_t>(rows) + 1);
  for (int j = 0; j <= rows; ++j) {
    // Integer coefficients first, sqrt(2j+1) last: the only rounding left
    // is in the moments themselves.
    long double acc = 0.0L;
    const long double* r = unscaled_.data() + index(j, 0);
    for (int k = 0; k <= j; ++k) acc += r[k] * moments[k];
    out[j] = static_cast<double>(acc * std::sqrt(2.0L * j + 1.0L));
  }
  return out;
}

BasisTransform build_shifted_legendre(int degree, int degree_cap) {
  if (degree < 0) throw Error(ErrorCode::invalid_argument, "degree must be >= 0");
  if (degree > degree_cap) {
    throw Error(ErrorCode::degree_cap, "degree " + std::to_string(degree) + " exceeds cap " +
                                           std::to_string(degree_cap));
  }
  // Shifted Legendre: P_j(2t-1) = sum_k (-1)^(j+k) C(j,k) C(j+k,k) t^k.
  // The ratio between consecutive k is -(j-k+1)(j+k)/k^2.
  const std::size_t size = static_cast<std::size_t>(degree + 1) * (degree + 2) / 2;
  std::vector<double> entries(size);
  std::vector<long double> unscaled(size);
  for (int j = 0; j <= degree; ++j) {
    const long double scale = std::sqrt(2.0L * j + 1.0L);
    long double c = (j % 2 == 0) ? 1.0L : -1.0L;
    const std::size_t base = static_cast<std::size_t>(j) * (j + 1) / 2;
    for (int k = 0; k <= j; ++k) {
      if (k > 0) {
        c *= -static_cast<long double>(j - k + 1) * (j + k) / (static_cast<long double>(k) * k);
        c = std::round(c);
      }
      unscaled[base + k] = c;
      entries[base + k] = static_cast<double>(c * scale);
    }
  }
  return BasisTransform(degree, std::move(entries), std::move(unscaled));
}

double eval_basis(int j, double t) {
  if (j < 0) throw Error(ErrorCode::out_of_range, "negative basis index");
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::out_of_range, "t = " + std::to_string(t) + " outside [0,1]");
  }
  return std::sqrt(2.0 * j + 1.0) * legendre_pair(j, 2.0 * t - 1.0).first;
}

double eval_basis(const BasisTransform& transform, int j, double t) {
  if (j > transform.degree()) {
    throw Error(ErrorCode::out_of_range, "basis index " + std::to_string(j) +
                                             " above transform degree " +
                                             std::to_string(transform.degree()));
  }
  return eval_basis(j, t);
}

void eval_basis_all(int degree, double t, std::span<double> out) {
  const double x = 2.0 * t - 1.0;
  double p0 = 1.0;
  double p1 = x;
  out[0] = 1.0;
  if (degree >= 1) out[1] = std::sqrt(3.0) * x;
  for (int k = 1; k < degree; ++k) {
    const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
    out[k + 1] = std::sqrt(2.0 * k + 3.0) * p2;
  }
}

QuadratureRule gauss_legendre_01(int order) {
  if (order < 1) throw Error(ErrorCode::invalid_argument, "quadrature order must be >= 1");
  constexpr double kTol = 1e-15;
  constexpr int kMaxIter = 100;

  const int m = order;
  std::vector<double> x(m);
  std::vector<double> w(m);
  // Roots are symmetric; solve for the upper half and mirror.
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < kMaxIter; ++it) {
      const auto [p, pm1] = legendre_pair(m, z);
      dp = m * (z * p - pm1) / (z * z - 1.0);
      const double dz = p / dp;
      z -= dz;
      if (std::abs(dz) <= kTol) break;
    }
    const auto [p, pm1] = legendre_pair(m, z);
    dp = m * (z * p - pm1) / (z * z - 1.0);
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = -z;
    x[m - 1 - i] = z;
    w[i] = wi;
    w[m - 1 - i] = wi;
  }
  if (m % 2 == 1) x[m / 2] = 0.0;

  QuadratureRule rule;
  rule.order = m;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    rule.nodes[i] = 0.5 * (x[i] + 1.0);
    rule.weights[i] = 0.5 * w[i];
  }
  return rule;
}

}  // namespace lftraj
