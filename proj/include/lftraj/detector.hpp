#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lftraj/moment_table.hpp"
#include "lftraj/orthopoly.hpp"
#include "lftraj/series.hpp"

namespace lftraj {

enum class Verdict { trajectory_consistent, inconsistent, inconclusive };

const char* to_string(Verdict v);

enum class ResidualNorm { l2, linf };

struct DetectionOptions {
  /// inconsistent iff max residual > escalation_factor * tolerance
  double escalation_factor = 10.0;
  ResidualNorm norm = ResidualNorm::l2;
  /// A consistent verdict needs the reconstruction inside [-slack, 1 + slack].
  double range_slack = 0.05;
  /// Warn when the sampled sup norm of the partial sum exceeds this.
  double sup_norm_warning = 1.5;
  int grid_points = 1024;
  /// Evaluate per-power residuals concurrently.
  bool parallel = true;
};

struct PowerResidual {
  int power = 0;
  double residual = 0.0;
  int compared_length = 0;
};

/// Outcome of comparing the coefficient rows of x^i against star powers of
/// the x-row, i = 2..K, at truncation n.
struct DetectionReport {
  int truncation_n = 0;
  int max_power_K = 0;
  double tolerance = 0.0;
  double escalation_factor = 10.0;
  ResidualNorm norm = ResidualNorm::l2;
  std::vector<PowerResidual> residuals;
  Verdict verdict = Verdict::inconclusive;
  /// Candidate coefficients of x(t): row 1 truncated at n.
  LegendreSeries reconstruction;
  /// max |partial sum| over the sampling grid.
  double sup_norm_estimate = 0.0;
  double range_min = 0.0;
  double range_max = 0.0;
  std::vector<std::string> warnings;

  double max_residual() const;
};

/// Three-way classification of a maximum residual.
Verdict classify(double max_residual, double tolerance, double escalation_factor);

/// Lebesgue-marginal detection.
DetectionReport check_trajectory(const MomentTable& table, int truncation_n, int max_power_K,
                                 double tolerance, const DetectionOptions& options = {});

/// Detection in the orthonormal basis of a general marginal. The basis must
/// reach degree n*K + 1 so star products can be projected exactly.
DetectionReport check_trajectory(const MomentTable& table,
                                 const std::shared_ptr<const OrthonormalBasis>& basis,
                                 int truncation_n, int max_power_K, double tolerance,
                                 const DetectionOptions& options = {});

struct SamplePoint {
  double t = 0.0;
  double x = 0.0;
};

/// Partial sum on a uniform grid including both endpoints.
std::vector<SamplePoint> sample_series(const LegendreSeries& series, int samples, bool clamp = false);

/// Samples the reconstruction of a report whose verdict is not inconsistent.
std::vector<SamplePoint> reconstruct_trajectory(const DetectionReport& report, int samples,
                                                bool clamp = false);

struct KernelTerm {
  int x_power = 0;
  int t_power = 0;
  double coeff = 0.0;
};

struct AlgebraicSupportResult {
  int degree_s = 0;
  /// Descending.
  std::vector<double> singular_values;
  double smallest_singular_value = 0.0;
  double largest_singular_value = 0.0;
  bool has_kernel = false;
  /// Unit-norm polynomial p(x,t) = sum coeff x^a t^b, present when has_kernel.
  std::vector<KernelTerm> kernel_polynomial;
};

inline constexpr double kKernelRelativeThreshold = 1e-8;

/// Smallest singular value of the bivariate moment matrix
/// M_s[(a,b),(c,d)] = gamma[a+c][b+d] over monomials x^a t^b, a+b <= s.
/// Monomials are ordered by total degree, then by descending x power.
AlgebraicSupportResult algebraic_support_check(const MomentTable& table, int degree_s,
                                               double relative_threshold = kKernelRelativeThreshold);

}  // namespace lftraj
