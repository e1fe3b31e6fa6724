#include "lftraj/orthopoly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>

#include <Eigen/Eigenvalues>

#include "lftraj/error.hpp"
#include "text_util.hpp"

namespace lftraj {

namespace {

// A pivot this small relative to its diagonal entry means the leading minor
// vanished to working precision.
constexpr long double kSingularPivot = 1e-15L;

std::string marginal_tag(std::span<const double> moments) {
  std::string bytes(moments.size() * sizeof(double), '\0');
  std::memcpy(bytes.data(), moments.data(), bytes.size());
  return "marginal:" + detail::hex64(detail::fnv1a(bytes));
}

}  // namespace

std::shared_ptr<const OrthonormalBasis> build_from_moments(std::span<const double> marginal_moments,
                                                           const OrthoBuildOptions& options) {
  if (marginal_moments.empty()) {
    throw Error(ErrorCode::insufficient_moments, "no marginal moments given");
  }
  const int n = static_cast<int>(marginal_moments.size() - 1) / 2;
  if (n > options.degree_cap) {
    throw Error(ErrorCode::degree_cap, "Hankel basis degree " + std::to_string(n) +
                                           " exceeds cap " + std::to_string(options.degree_cap));
  }
  for (double m : marginal_moments.first(2 * n + 1)) {
    if (!std::isfinite(m)) throw Error(ErrorCode::non_finite, "non-finite marginal moment");
  }

  const int size = n + 1;
  auto hankel = [&](int j, int k) -> long double { return marginal_moments[j + k]; };

  // H = L L^T with positive diagonal.
  std::vector<long double> chol(static_cast<std::size_t>(size) * size, 0.0L);
  auto L = [&](int j, int k) -> long double& { return chol[static_cast<std::size_t>(j) * size + k]; };
  long double max_pivot = 0.0L;
  long double min_pivot = 0.0L;
  for (int j = 0; j < size; ++j) {
    long double d = hankel(j, j);
    for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (!(d > kSingularPivot * std::abs(hankel(j, j)))) {
      throw Error(ErrorCode::singular_hankel,
                  "singular Hankel minor at index " + std::to_string(j) +
                      ": the marginal is supported on too few points for degree " +
                      std::to_string(n) + ", or the degree is too high for double precision");
    }
    max_pivot = j == 0 ? d : std::max(max_pivot, d);
    min_pivot = j == 0 ? d : std::min(min_pivot, d);
    L(j, j) = std::sqrt(d);
    for (int i = j + 1; i < size; ++i) {
      long double s = hankel(i, j);
      for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / L(j, j);
    }
  }
  const double condition = static_cast<double>(max_pivot / min_pivot);
  const double digits = 16.0 - std::log10(condition);
  if (digits < options.min_reliable_digits) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "Hankel matrix of degree %d too ill-conditioned (pivot ratio %.3g, about %.1f "
                  "reliable digits)",
                  n, condition, digits);
    throw Error(ErrorCode::ill_conditioned, buf);
  }

  auto basis = std::shared_ptr<OrthonormalBasis>(new OrthonormalBasis());
  basis->degree_ = n;
  basis->condition_ = condition;
  basis->moments_.assign(marginal_moments.begin(), marginal_moments.begin() + 2 * n + 1);
  basis->tag_ = marginal_tag(basis->moments_);

  // entries = L^{-1}, row by row via forward substitution.
  basis->entries_.assign(static_cast<std::size_t>(size) * (size + 1) / 2, 0.0);
  std::vector<long double> inv(static_cast<std::size_t>(size) * size, 0.0L);
  for (int j = 0; j < size; ++j) {
    inv[static_cast<std::size_t>(j) * size + j] = 1.0L / L(j, j);
    for (int k = j - 1; k >= 0; --k) {
      // Row j of L^{-1} times column k of L must vanish for k < j.
      long double s = 0.0L;
      for (int r = k + 1; r <= j; ++r) s += inv[static_cast<std::size_t>(j) * size + r] * L(r, k);
      inv[static_cast<std::size_t>(j) * size + k] = -s / L(k, k);
    }
    for (int k = 0; k <= j; ++k) {
      basis->entries_[OrthonormalBasis::index(j, k)] = static_cast<double>(inv[static_cast<std::size_t>(j) * size + k]);
    }
  }

  // Leading coefficients give b_{j+1} = e_jj / e_{j+1,j+1}; matching t^j in
  // t H_j = b_{j+1} H_{j+1} + a_j H_j + b_j H_{j-1} gives a_j.
  basis->a_.assign(n, 0.0);
  basis->b_.assign(static_cast<std::size_t>(n) + 1, 0.0);
  for (int j = 0; j < n; ++j) {
    const long double ejj = inv[static_cast<std::size_t>(j) * size + j];
    const long double next_lead = inv[static_cast<std::size_t>(j + 1) * size + j + 1];
    const long double next_sub = inv[static_cast<std::size_t>(j + 1) * size + j];
    const long double sub = j > 0 ? inv[static_cast<std::size_t>(j) * size + j - 1] : 0.0L;
    const long double b_next = ejj / next_lead;
    basis->b_[j + 1] = static_cast<double>(b_next);
    basis->a_[j] = static_cast<double>((sub - b_next * next_sub) / ejj);
  }

  if (options.max_orthonormality_defect > 0.0) {
    const double defect = orthonormality_defect(*basis);
    if (!(defect <= options.max_orthonormality_defect)) {
      char buf[200];
      std::snprintf(buf, sizeof buf,
                    "Hankel basis of degree %d misses orthonormality by %.3g after rounding to "
                    "double (limit %.3g); lower the degree",
                    n, defect, options.max_orthonormality_defect);
      throw Error(ErrorCode::ill_conditioned, buf);
    }
  }
  return basis;
}

double OrthonormalBasis::entry(int j, int k) const {
  if (j < 0 || j > degree_ || k < 0 || k > degree_) {
    throw Error(ErrorCode::out_of_range, "basis entry outside 0.." + std::to_string(degree_));
  }
  return k > j ? 0.0 : entries_[index(j, k)];
}

std::span<const double> OrthonormalBasis::row(int j) const {
  if (j < 0 || j > degree_) {
    throw Error(ErrorCode::out_of_range, "basis row " + std::to_string(j) + " outside 0.." +
                                             std::to_string(degree_));
  }
  return {entries_.data() + index(j, 0), static_cast<std::size_t>(j) + 1};
}

std::vector<double> OrthonormalBasis::apply(std::span<const double> moments, int rows) const {
  if (rows < 0 || rows > degree_) {
    throw Error(ErrorCode::out_of_range, "basis has degree " + std::to_string(degree_) +
                                             ", asked for " + std::to_string(rows));
  }
  if (moments.size() < static_cast<std::size_t>(rows) + 1) {
    throw Error(ErrorCode::insufficient_moments, "not enough moments for the requested degree");
  }
  std::vector<double> out(static_cast<std::size_t>(rows) + 1);
  for (int j = 0; j <= rows; ++j) {
    long double acc = 0.0L;
    const auto r = row(j);
    for (int k = 0; k <= j; ++k) acc += static_cast<long double>(r[k]) * moments[k];
    out[j] = static_cast<double>(acc);
  }
  return out;
}

void OrthonormalBasis::evaluate_all(int degree, double t, std::span<double> out) const {
  if (degree > degree_) {
    throw Error(ErrorCode::degree_cap, "evaluation degree " + std::to_string(degree) +
                                           " above basis degree " + std::to_string(degree_));
  }
  out[0] = entries_[0];
  if (degree == 0) return;
  out[1] = (t - a_[0]) * out[0] / b_[1];
  for (int j = 1; j < degree; ++j) {
    out[j + 1] = ((t - a_[j]) * out[j] - b_[j] * out[j - 1]) / b_[j + 1];
  }
}

double OrthonormalBasis::clenshaw(std::span<const double> coeffs, double t) const {
  // H_{k+1} = alpha_k H_k + beta_k H_{k-1}, alpha_k = (t - a_k)/b_{k+1},
  // beta_k = -b_k/b_{k+1}.
  const int n = static_cast<int>(coeffs.size()) - 1;
  if (n < 0) return 0.0;
  if (n > degree_) {
    throw Error(ErrorCode::degree_cap, "series degree " + std::to_string(n) +
                                           " above basis degree " + std::to_string(degree_));
  }
  const double h0 = entries_[0];
  if (n == 0) return coeffs[0] * h0;
  double y1 = 0.0;
  double y2 = 0.0;
  for (int k = n; k >= 1; --k) {
    double yk = coeffs[k];
    if (k < n) yk += (t - a_[k]) / b_[k + 1] * y1;
    if (k + 1 < n) yk -= b_[k + 1] / b_[k + 2] * y2;
    y2 = y1;
    y1 = yk;
  }
  const double h1 = (t - a_[0]) * h0 / b_[1];
  const double beta1 = n >= 2 ? -b_[1] / b_[2] : 0.0;
  return coeffs[0] * h0 + y1 * h1 + beta1 * h0 * y2;
}

QuadratureRule OrthonormalBasis::gauss_rule(int points) const {
  if (points < 1 || points > degree_) {
    throw Error(ErrorCode::degree_cap, "a " + std::to_string(points) +
                                           "-point rule needs a basis of degree >= " +
                                           std::to_string(points) + ", have " +
                                           std::to_string(degree_));
  }
  // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights
  // m_0 times the squared first eigenvector components.
  Eigen::VectorXd diag(points);
  Eigen::VectorXd sub(std::max(points - 1, 0));
  for (int j = 0; j < points; ++j) diag[j] = a_[j];
  for (int j = 0; j + 1 < points; ++j) sub[j] = b_[j + 1];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  QuadratureRule rule;
  rule.order = points;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  for (int q = 0; q < points; ++q) {
    rule.nodes[q] = solver.eigenvalues()[q];
    const double v0 = solver.eigenvectors()(0, q);
    rule.weights[q] = moments_[0] * v0 * v0;
  }
  return rule;
}

double orthonormality_defect(const OrthonormalBasis& basis) {
  const int n = basis.degree();
  const auto& m = basis.marginal_moments();
  long double worst = 0.0L;
  for (int j = 0; j <= n; ++j) {
    for (int k = 0; k <= j; ++k) {
      long double s = 0.0L;
      for (int p = 0; p <= j; ++p)
        for (int q = 0; q <= k; ++q)
          s += static_cast<long double>(basis.entry(j, p)) * basis.entry(k, q) * m[p + q];
      worst = std::max(worst, std::abs(s - (j == k ? 1.0L : 0.0L)));
    }
  }
  return static_cast<double>(worst);
}

LegendreSeries general_coefficient_row(const MomentTable& table,
                                       const std::shared_ptr<const OrthonormalBasis>& basis,
                                       int i, int degree, double marginal_tol) {
  if (!basis) throw Error(ErrorCode::invalid_argument, "null basis");
  if (i < 0 || i > table.max_i()) {
    throw Error(ErrorCode::out_of_range, "row " + std::to_string(i) + " outside 0.." +
                                             std::to_string(table.max_i()));
  }
  if (degree < 0) throw Error(ErrorCode::invalid_argument, "degree must be >= 0");
  if (degree > table.max_j()) {
    throw Error(ErrorCode::insufficient_moments,
                "degree " + std::to_string(degree) + " needs max_j >= " + std::to_string(degree) +
                    ", table has " + std::to_string(table.max_j()));
  }
  if (degree > basis->degree()) {
    throw Error(ErrorCode::insufficient_moments,
                "degree " + std::to_string(degree) + " above basis degree " +
                    std::to_string(basis->degree()));
  }
  const auto& m = basis->marginal_moments();
  const int common = std::min<int>(table.max_j(), static_cast<int>(m.size()) - 1);
  for (int j = 0; j <= common; ++j) {
    if (std::abs(table.marginal().moment(j) - m[j]) > marginal_tol) {
      throw Error(ErrorCode::basis_mismatch,
                  "marginal mismatch between table and basis at j=" + std::to_string(j));
    }
  }
  return LegendreSeries(basis->apply(table.row(i), degree), basis);
}

std::vector<double> load_marginal_moments(std::istream& in) {
  return detail::read_indexed_column(in, "value");
}

}  // namespace lftraj
