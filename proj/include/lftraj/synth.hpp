#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lftraj/moment_table.hpp"

namespace lftraj {

inline constexpr int kDefaultSynthOrder = 64;

/// A trajectory x: [0,1] -> [0,1] from the closed catalogue.
class TrajectoryFn {
 public:
  enum class Kind { polynomial, exp_neg, sin_scaled, constant };

  /// Ascending coefficients c_0 + c_1 t + ...
  static TrajectoryFn polynomial(std::vector<double> coeffs);
  static TrajectoryFn exp_neg();
  /// t -> 0.9 (1 + sin(2 pi t)) / 2 + 0.05
  static TrajectoryFn sin_scaled();
  static TrajectoryFn constant(double c);

  /// "exp_neg", "sin_scaled", "constant:C" or "poly:c0,c1,...".
  static TrajectoryFn parse(std::string_view text);

  double operator()(double t) const;
  Kind kind() const noexcept { return kind_; }
  /// Degree for polynomial and constant functions, -1 otherwise.
  int polynomial_degree() const;
  std::string describe() const;

 private:
  TrajectoryFn(Kind kind, std::vector<double> coeffs) : kind_(kind), coeffs_(std::move(coeffs)) {}

  Kind kind_;
  std::vector<double> coeffs_;
};

/// Density of the t-marginal: Lebesgue (h = 1) or ramp (h(t) = 2t).
enum class MarginalDensity { lebesgue, ramp };

MarginalDensity parse_marginal_density(std::string_view text);
double marginal_density(MarginalDensity h, double t);
/// Exact moments m_0..m_{count-1} of the density.
std::vector<double> marginal_density_moments(MarginalDensity h, int count);

enum class MeasureKind { trajectory, product, mixture };

MeasureKind parse_measure_kind(std::string_view text);

/// Synthetic measure: a trajectory delta_{x(t)} h(t)dt, the product of
/// Lebesgue-in-x with h(t)dt, or a weighted mixture of trajectories.
struct MeasureSpec {
  MeasureKind kind = MeasureKind::trajectory;
  std::vector<TrajectoryFn> trajectories;
  std::vector<double> weights;
  MarginalDensity marginal = MarginalDensity::lebesgue;

  static MeasureSpec trajectory(TrajectoryFn fn, MarginalDensity marginal = MarginalDensity::lebesgue);
  static MeasureSpec product(MarginalDensity marginal = MarginalDensity::lebesgue);
  static MeasureSpec mixture(std::vector<TrajectoryFn> fns, std::vector<double> weights,
                             MarginalDensity marginal = MarginalDensity::lebesgue);

  /// Throws when a trajectory leaves [0,1] on the 1024-point grid or the
  /// weights are not a probability vector.
  void validate() const;

  /// f_i(t) = int x^i psi(dx|t).
  double conditional_moment(int i, double t) const;
};

/// Tables with the ramp marginal record m_0..m_{2 max_j + 2} so a basis of
/// degree max_j + 1 can be built from the table alone.
MomentTable synthesize(const MeasureSpec& spec, int max_i, int max_j,
                       int order = kDefaultSynthOrder);

/// || f_i - f_1^i || in L2(h dt), by quadrature straight from the spec.
double oracle_residual(const MeasureSpec& spec, int i, int order = kDefaultSynthOrder);

/// Adds uniform noise in [-eps, eps] to rows i >= 1; row 0 (the marginal)
/// is left exact.
MomentTable add_noise(const MomentTable& table, double eps, std::uint64_t seed);

}  // namespace lftraj
