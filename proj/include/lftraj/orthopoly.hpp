#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lftraj/moment_table.hpp"
#include "lftraj/series.hpp"

namespace lftraj {

inline constexpr int kDefaultHankelDegreeCap = 12;

struct OrthoBuildOptions {
  int degree_cap = kDefaultHankelDegreeCap;
  /// Refuse a basis whose Hankel condition estimate leaves fewer digits.
  double min_reliable_digits = 4.0;
  /// Refuse a basis whose rounded coefficients miss orthonormality
  /// (max |entries H entries^T - I|) by more than this; <= 0 disables.
  double max_orthonormality_defect = 1e-8;
};

/// Orthonormal polynomials H_0..H_degree for a measure nu on [0,1] known only
/// through its moments m_0..m_{2 degree}.
///
/// entries() is the lower-triangular matrix whose row j holds the monomial
/// coefficients of H_j; it is the inverse of the Cholesky factor of the Hankel
/// matrix [m_{j+k}], so applying it to a moment vector of f dnu yields the
/// coefficients int H_j f dnu. Evaluation and quadrature go through the
/// three-term recurrence t H_j = b_{j+1} H_{j+1} + a_j H_j + b_j H_{j-1}
/// recovered from consecutive rows.
class OrthonormalBasis final : public SeriesBasis {
 public:
  int degree() const noexcept { return degree_; }
  double entry(int j, int k) const;
  std::span<const double> row(int j) const;
  const std::vector<double>& marginal_moments() const noexcept { return moments_; }
  /// a_0..a_{degree-1}
  const std::vector<double>& recurrence_a() const noexcept { return a_; }
  /// b_1..b_degree (b[0] is unused and zero)
  const std::vector<double>& recurrence_b() const noexcept { return b_; }
  /// Ratio of the largest to the smallest Cholesky pivot, a lower bound on
  /// the Hankel condition number.
  double condition_estimate() const noexcept { return condition_; }

  /// Coefficients of a moment vector: rows 0..rows applied to moments[0..rows].
  std::vector<double> apply(std::span<const double> moments, int rows) const;

  const std::string& tag() const override { return tag_; }
  int max_product_degree() const override { return degree_ - 1; }
  void evaluate_all(int degree, double t, std::span<double> out) const override;
  double clenshaw(std::span<const double> coeffs, double t) const override;
  QuadratureRule gauss_rule(int points) const override;

  friend std::shared_ptr<const OrthonormalBasis> build_from_moments(
      std::span<const double> marginal_moments, const OrthoBuildOptions& options);

 private:
  OrthonormalBasis() = default;
  static std::size_t index(int j, int k) {
    return static_cast<std::size_t>(j) * (j + 1) / 2 + static_cast<std::size_t>(k);
  }

  int degree_ = 0;
  std::vector<double> entries_;
  std::vector<double> moments_;
  std::vector<double> a_;
  std::vector<double> b_;
  double condition_ = 1.0;
  std::string tag_;
};

/// Builds the basis of degree n from 2n+1 moments (extra trailing moments
/// beyond an odd count are ignored).
std::shared_ptr<const OrthonormalBasis> build_from_moments(
    std::span<const double> marginal_moments, const OrthoBuildOptions& options = {});

/// max |entries * Hankel * entries^T - I|, evaluated in extended precision.
double orthonormality_defect(const OrthonormalBasis& basis);

/// Coefficients int H_j f_i dnu, j = 0..degree, from row i of the table.
/// The table's marginal must agree with the basis moments on their common
/// prefix (within marginal_tol).
LegendreSeries general_coefficient_row(const MomentTable& table,
                                       const std::shared_ptr<const OrthonormalBasis>& basis,
                                       int i, int degree, double marginal_tol = kDefaultMarginalTol);

/// Marginal-moments CSV: header `j,value`, dense j = 0..n.
std::vector<double> load_marginal_moments(std::istream& in);

}  // namespace lftraj
