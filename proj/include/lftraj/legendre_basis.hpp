#pragma once

#include <span>
#include <vector>

namespace lftraj {

inline constexpr int kDefaultDegreeCap = 60;

/// Monomial coefficients of the orthonormal shifted Legendre polynomials
/// L_j(t) = sqrt(2j+1) P_j(2t-1) on [0,1], rows 0..degree.
///
/// Row j holds the coefficients of t^0..t^j; entries above the diagonal are
/// zero and the diagonal is strictly positive. The matrix maps a moment
/// vector (int t^k dmu)_k to the basis coefficients (int L_j dmu)_j.
///
/// Only use the monomial form for moment transforms and low-degree checks:
/// evaluating through it is hopelessly ill-conditioned past degree ~25.
class BasisTransform {
 public:
  int degree() const noexcept { return degree_; }

  double operator()(int j, int k) const { return entries_[index(j, k)]; }

  /// Row j, coefficients of t^0..t^j.
  std::span<const double> row(int j) const;

  /// Applies the leading (rows+1) x (rows+1) block to moments[0..rows].
  /// Accumulates in extended precision.
  std::vector<double> apply(std::span<const double> moments, int rows) const;

  friend BasisTransform build_shifted_legendre(int degree, int degree_cap);

 private:
  BasisTransform(int degree, std::vector<double> entries, std::vector<long double> unscaled)
      : degree_(degree), entries_(std::move(entries)), unscaled_(std::move(unscaled)) {}

  static std::size_t index(int j, int k) {
    return static_cast<std::size_t>(j) * (j + 1) / 2 + static_cast<std::size_t>(k);
  }

  int degree_;
  std::vector<double> entries_;  // packed lower triangle
  // (-1)^(j+k) C(j,k) C(j+k,k), exact integers through degree ~30
  std::vector<long double> unscaled_;
};

BasisTransform build_shifted_legendre(int degree, int degree_cap = kDefaultDegreeCap);

/// L_j(t) through the three-term recurrence for P_j(2t-1).
double eval_basis(int j, double t);

/// Same, bounded by the transform's degree.
double eval_basis(const BasisTransform& transform, int j, double t);

/// L_0(t)..L_degree(t) in one recurrence sweep.
void eval_basis_all(int degree, double t, std::span<double> out);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t q = 0; q < nodes.size(); ++q) sum += weights[q] * f(nodes[q]);
    return sum;
  }
};

/// m-point Gauss-Legendre rule mapped to [0,1]; exact through degree 2m-1.
QuadratureRule gauss_legendre_01(int order);

}  // namespace lftraj
