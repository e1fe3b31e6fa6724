#include "lftraj/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>

#include <Eigen/SVD>

#include "lftraj/error.hpp"

namespace lftraj {

namespace {

using RowFn = std::function<LegendreSeries(int i, int degree)>;

void validate_request(const MomentTable& table, int n, int K, double tol) {
  if (n < 0) throw Error(ErrorCode::invalid_argument, "truncation must be >= 0");
  if (K < 2) throw Error(ErrorCode::invalid_argument, "max power must be >= 2");
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tolerance must be > 0");
  if (table.max_i() < K) {
    throw Error(ErrorCode::insufficient_moments,
                "max power " + std::to_string(K) + " needs max_i >= " + std::to_string(K) +
                    ", table has " + std::to_string(table.max_i()));
  }
  if (table.max_j() < n * K) {
    throw Error(ErrorCode::insufficient_moments,
                "truncation " + std::to_string(n) + " with max power " + std::to_string(K) +
                    " needs max_j >= " + std::to_string(n * K) + ", table has " +
                    std::to_string(table.max_j()));
  }
}

DetectionReport run_detection(const RowFn& row, int n, int K, double tol,
                              const DetectionOptions& options) {
  DetectionReport report;
  report.truncation_n = n;
  report.max_power_K = K;
  report.tolerance = tol;
  report.escalation_factor = options.escalation_factor;
  report.norm = options.norm;
  report.reconstruction = row(1, n);

  const auto distance = options.norm == ResidualNorm::l2 ? l2_distance : linf_distance;
  const auto& x_hat = report.reconstruction;
  auto residual_for = [&](int i) {
    const auto observed = row(i, n * i);
    const auto predicted = star_power(x_hat, i);
    return PowerResidual{i, distance(observed, predicted), n * i + 1};
  };

  // Each power is independent; results land in fixed slots.
  report.residuals.resize(static_cast<std::size_t>(K) - 1);
  if (options.parallel && K > 2) {
    std::vector<std::future<PowerResidual>> jobs;
    for (int i = 2; i <= K; ++i) jobs.push_back(std::async(std::launch::async, residual_for, i));
    for (int i = 2; i <= K; ++i) report.residuals[i - 2] = jobs[i - 2].get();
  } else {
    for (int i = 2; i <= K; ++i) report.residuals[i - 2] = residual_for(i);
  }

  const int grid = std::max(options.grid_points, 2);
  report.range_min = std::numeric_limits<double>::infinity();
  report.range_max = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid; ++k) {
    const double v = evaluate(x_hat, static_cast<double>(k) / (grid - 1));
    report.range_min = std::min(report.range_min, v);
    report.range_max = std::max(report.range_max, v);
  }
  report.sup_norm_estimate = std::max(std::abs(report.range_min), std::abs(report.range_max));
  if (report.sup_norm_estimate > options.sup_norm_warning) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "partial sum reaches %.4g on the sampling grid; the boundedness hypothesis is in doubt",
                  report.sup_norm_estimate);
    report.warnings.emplace_back(buf);
  }

  report.verdict = classify(report.max_residual(), tol, options.escalation_factor);
  if (report.verdict == Verdict::trajectory_consistent &&
      (report.range_min < -options.range_slack || report.range_max > 1.0 + options.range_slack)) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "reconstruction spans [%.4g, %.4g], outside [0,1] by more than %.3g; verdict "
                  "downgraded to inconclusive",
                  report.range_min, report.range_max, options.range_slack);
    report.warnings.emplace_back(buf);
    report.verdict = Verdict::inconclusive;
  }
  return report;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::trajectory_consistent:
      return "trajectory_consistent";
    case Verdict::inconsistent:
      return "inconsistent";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

double DetectionReport::max_residual() const {
  double m = 0.0;
  for (const auto& r : residuals) m = std::max(m, r.residual);
  return m;
}

Verdict classify(double max_residual, double tolerance, double escalation_factor) {
  if (max_residual <= tolerance) return Verdict::trajectory_consistent;
  if (max_residual > escalation_factor * tolerance) return Verdict::inconsistent;
  return Verdict::inconclusive;
}

DetectionReport check_trajectory(const MomentTable& table, int truncation_n, int max_power_K,
                                 double tolerance, const DetectionOptions& options) {
  validate_request(table, truncation_n, max_power_K, tolerance);
  if (!table.marginal().is_lebesgue()) {
    throw Error(ErrorCode::basis_mismatch,
                "table has an explicit marginal; supply its orthonormal basis");
  }
  const RowFn row = [&](int i, int degree) { return coefficient_row(table, i, degree); };
  return run_detection(row, truncation_n, max_power_K, tolerance, options);
}

DetectionReport check_trajectory(const MomentTable& table,
                                 const std::shared_ptr<const OrthonormalBasis>& basis,
                                 int truncation_n, int max_power_K, double tolerance,
                                 const DetectionOptions& options) {
  validate_request(table, truncation_n, max_power_K, tolerance);
  if (!basis) throw Error(ErrorCode::invalid_argument, "null basis");
  const int needed = truncation_n * max_power_K;
  if (basis->max_product_degree() < needed) {
    throw Error(ErrorCode::insufficient_moments,
                "star powers up to degree " + std::to_string(needed) + " need a basis of degree " +
                    std::to_string(needed + 1) + " (" + std::to_string(2 * needed + 3) +
                    " marginal moments); basis has degree " + std::to_string(basis->degree()));
  }
  const RowFn row = [&](int i, int degree) {
    return general_coefficient_row(table, basis, i, degree);
  };
  return run_detection(row, truncation_n, max_power_K, tolerance, options);
}

std::vector<SamplePoint> sample_series(const LegendreSeries& series, int samples, bool clamp) {
  if (samples < 2) throw Error(ErrorCode::invalid_argument, "need at least 2 samples");
  std::vector<SamplePoint> out(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    const double t = k == samples - 1 ? 1.0 : static_cast<double>(k) / (samples - 1);
    double x = evaluate(series, t);
    if (clamp) x = std::clamp(x, 0.0, 1.0);
    out[k] = {t, x};
  }
  return out;
}

std::vector<SamplePoint> reconstruct_trajectory(const DetectionReport& report, int samples,
                                                bool clamp) {
  if (report.verdict == Verdict::inconsistent) {
    throw Error(ErrorCode::invalid_argument,
                "the moments are inconsistent with a trajectory; nothing to reconstruct");
  }
  return sample_series(report.reconstruction, samples, clamp);
}

AlgebraicSupportResult algebraic_support_check(const MomentTable& table, int degree_s,
                                               double relative_threshold) {
  if (degree_s < 0) throw Error(ErrorCode::invalid_argument, "degree s must be >= 0");
  if (table.max_i() < 2 * degree_s || table.max_j() < 2 * degree_s) {
    throw Error(ErrorCode::insufficient_moments,
                "moment matrix of degree " + std::to_string(degree_s) + " needs max_i, max_j >= " +
                    std::to_string(2 * degree_s));
  }
  std::vector<std::pair<int, int>> monomials;
  for (int d = 0; d <= degree_s; ++d)
    for (int a = d; a >= 0; --a) monomials.emplace_back(a, d - a);

  const auto size = static_cast<Eigen::Index>(monomials.size());
  Eigen::MatrixXd moments(size, size);
  for (Eigen::Index r = 0; r < size; ++r)
    for (Eigen::Index c = 0; c < size; ++c)
      moments(r, c) = table.gamma(monomials[r].first + monomials[c].first,
                                  monomials[r].second + monomials[c].second);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(moments, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();

  AlgebraicSupportResult result;
  result.degree_s = degree_s;
  result.singular_values.assign(sv.data(), sv.data() + sv.size());
  result.largest_singular_value = sv[0];
  result.smallest_singular_value = sv[size - 1];
  result.has_kernel = result.smallest_singular_value <= relative_threshold * result.largest_singular_value;
  if (result.has_kernel) {
    Eigen::VectorXd v = svd.matrixV().col(size - 1);
    Eigen::Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    if (v[pivot] < 0) v = -v;
    v.normalize();
    for (Eigen::Index r = 0; r < size; ++r) {
      result.kernel_polynomial.push_back({monomials[r].first, monomials[r].second, v[r]});
    }
  }
  return result;
}

}  // namespace lftraj
