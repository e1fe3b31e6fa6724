#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lftraj/legendre_basis.hpp"

namespace lftraj {

/// An orthonormal polynomial basis on [0,1] with respect to some probability
/// measure, together with the Gauss rule for that measure. Series operations
/// are written against this interface so the Lebesgue and general-marginal
/// pipelines share one implementation.
class SeriesBasis {
 public:
  virtual ~SeriesBasis() = default;

  /// Identifies the basis; series with different tags never mix.
  virtual const std::string& tag() const = 0;

  /// Highest degree a star product may produce in this basis.
  virtual int max_product_degree() const = 0;

  /// Values of basis polynomials 0..degree at t (out.size() >= degree+1).
  virtual void evaluate_all(int degree, double t, std::span<double> out) const = 0;

  /// Partial sum sum_j coeffs[j] * B_j(t) by backward recurrence.
  virtual double clenshaw(std::span<const double> coeffs, double t) const = 0;

  /// Gauss rule with `points` nodes for the basis measure.
  virtual QuadratureRule gauss_rule(int points) const = 0;
};

/// Shifted orthonormal Legendre basis (Lebesgue measure on [0,1]).
class LegendreBasis final : public SeriesBasis {
 public:
  explicit LegendreBasis(int degree_cap = kDefaultDegreeCap);

  const std::string& tag() const override { return tag_; }
  int max_product_degree() const override { return degree_cap_; }
  void evaluate_all(int degree, double t, std::span<double> out) const override;
  double clenshaw(std::span<const double> coeffs, double t) const override;
  QuadratureRule gauss_rule(int points) const override;

 private:
  int degree_cap_;
  std::string tag_;
};

/// Shared Lebesgue basis with the default degree cap.
std::shared_ptr<const SeriesBasis> lebesgue_basis();

inline constexpr double kSeriesEqualityTol = 1e-9;
inline constexpr int kSmoothProjectionOrder = 64;

/// Finite coefficient vector in an orthonormal basis; indices beyond
/// coeffs.size() are implicitly zero.
class LegendreSeries {
 public:
  LegendreSeries() : basis_(lebesgue_basis()) {}
  explicit LegendreSeries(std::vector<double> coeffs,
                          std::shared_ptr<const SeriesBasis> basis = lebesgue_basis());

  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  double operator[](std::size_t j) const { return j < coeffs_.size() ? coeffs_[j] : 0.0; }

  const std::string& basis_tag() const { return basis_->tag(); }
  const std::shared_ptr<const SeriesBasis>& basis() const noexcept { return basis_; }

  /// l2 norm of the coefficients (= L2 norm of the represented polynomial).
  double norm() const;

  /// First `length` coefficients, zero-padded when the series is shorter.
  LegendreSeries truncated(std::size_t length) const;

 private:
  std::vector<double> coeffs_;
  std::shared_ptr<const SeriesBasis> basis_;
};

using ScalarFunction = std::function<double(double)>;

/// coeffs[j] = quadrature of B_j * f under `rule`, for j = 0..degree.
LegendreSeries project(const ScalarFunction& f, int degree, const QuadratureRule& rule,
                       std::shared_ptr<const SeriesBasis> basis = lebesgue_basis());

/// Projection with the default rule: max(32, ceil((deg_estimate+degree)/2)+1)
/// points for polynomial f of known degree, 64 points otherwise
/// (deg_estimate < 0 means "not a polynomial").
LegendreSeries project(const ScalarFunction& f, int degree, int deg_estimate = -1,
                       std::shared_ptr<const SeriesBasis> basis = lebesgue_basis());

int default_projection_order(int degree, int deg_estimate);

/// Coefficients of the pointwise product of the two represented polynomials,
/// length deg(a) + deg(b) + 1.
LegendreSeries star_product(const LegendreSeries& a, const LegendreSeries& b);

/// k-fold star product of a with itself; star_power(a, 1) == a.
LegendreSeries star_power(const LegendreSeries& a, int k);

double l2_distance(const LegendreSeries& a, const LegendreSeries& b);
double linf_distance(const LegendreSeries& a, const LegendreSeries& b);

/// Entrywise comparison with zero padding.
bool approx_equal(const LegendreSeries& a, const LegendreSeries& b,
                  double tol = kSeriesEqualityTol);

/// Partial sum at t in [0,1].
double evaluate(const LegendreSeries& a, double t);

}  // namespace lftraj
