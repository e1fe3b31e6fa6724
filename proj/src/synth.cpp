#include "lftraj/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "lftraj/error.hpp"
#include "text_util.hpp"

namespace lftraj {

namespace {

constexpr int kRangeGrid = 1024;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::invalid_argument, what);
}

}  // namespace

TrajectoryFn TrajectoryFn::polynomial(std::vector<double> coeffs) {
  require(!coeffs.empty(), "polynomial trajectory needs at least one coefficient");
  while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
  return TrajectoryFn(Kind::polynomial, std::move(coeffs));
}

TrajectoryFn TrajectoryFn::exp_neg() { return TrajectoryFn(Kind::exp_neg, {}); }
TrajectoryFn TrajectoryFn::sin_scaled() { return TrajectoryFn(Kind::sin_scaled, {}); }
TrajectoryFn TrajectoryFn::constant(double c) { return TrajectoryFn(Kind::constant, {c}); }

TrajectoryFn TrajectoryFn::parse(std::string_view text) {
  if (text == "exp_neg") return exp_neg();
  if (text == "sin_scaled") return sin_scaled();
  if (text.starts_with("constant:")) {
    return constant(detail::parse_double(std::string(text.substr(9)), 0));
  }
  if (text.starts_with("poly:")) {
    std::vector<double> coeffs;
    for (const auto& field : detail::split_csv(std::string(text.substr(5)))) {
      coeffs.push_back(detail::parse_double(field, 0));
    }
    return polynomial(std::move(coeffs));
  }
  throw Error(ErrorCode::invalid_argument,
              "unknown trajectory '" + std::string(text) +
                  "' (expected exp_neg, sin_scaled, constant:C or poly:c0,c1,...)");
}

double TrajectoryFn::operator()(double t) const {
  switch (kind_) {
    case Kind::polynomial: {
      double v = 0.0;
      for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * t + *it;
      return v;
    }
    case Kind::exp_neg:
      return std::exp(-t);
    case Kind::sin_scaled:
      return 0.9 * (1.0 + std::sin(2.0 * std::numbers::pi * t)) / 2.0 + 0.05;
    case Kind::constant:
      return coeffs_[0];
  }
  return 0.0;
}

int TrajectoryFn::polynomial_degree() const {
  switch (kind_) {
    case Kind::polynomial:
      return static_cast<int>(coeffs_.size()) - 1;
    case Kind::constant:
      return 0;
    default:
      return -1;
  }
}

std::string TrajectoryFn::describe() const {
  switch (kind_) {
    case Kind::polynomial: {
      std::string s = "poly:";
      for (std::size_t k = 0; k < coeffs_.size(); ++k) s += (k ? "," : "") + format_double(coeffs_[k]);
      return s;
    }
    case Kind::exp_neg:
      return "exp_neg";
    case Kind::sin_scaled:
      return "sin_scaled";
    case Kind::constant:
      return "constant:" + format_double(coeffs_[0]);
  }
  return {};
}

MarginalDensity parse_marginal_density(std::string_view text) {
  if (text == "lebesgue") return MarginalDensity::lebesgue;
  if (text == "ramp") return MarginalDensity::ramp;
  throw Error(ErrorCode::invalid_argument,
              "unknown marginal '" + std::string(text) + "' (expected lebesgue or ramp)");
}

double marginal_density(MarginalDensity h, double t) {
  return h == MarginalDensity::lebesgue ? 1.0 : 2.0 * t;
}

std::vector<double> marginal_density_moments(MarginalDensity h, int count) {
  std::vector<double> m(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) m[j] = h == MarginalDensity::lebesgue ? 1.0 / (j + 1) : 2.0 / (j + 2);
  return m;
}

MeasureKind parse_measure_kind(std::string_view text) {
  if (text == "trajectory") return MeasureKind::trajectory;
  if (text == "product") return MeasureKind::product;
  if (text == "mixture") return MeasureKind::mixture;
  throw Error(ErrorCode::invalid_argument, "unknown measure kind '" + std::string(text) + "'");
}

MeasureSpec MeasureSpec::trajectory(TrajectoryFn fn, MarginalDensity marginal) {
  return MeasureSpec{MeasureKind::trajectory, {std::move(fn)}, {1.0}, marginal};
}

MeasureSpec MeasureSpec::product(MarginalDensity marginal) {
  return MeasureSpec{MeasureKind::product, {}, {}, marginal};
}

MeasureSpec MeasureSpec::mixture(std::vector<TrajectoryFn> fns, std::vector<double> weights,
                                 MarginalDensity marginal) {
  return MeasureSpec{MeasureKind::mixture, std::move(fns), std::move(weights), marginal};
}

void MeasureSpec::validate() const {
  switch (kind) {
    case MeasureKind::trajectory:
      require(trajectories.size() == 1, "trajectory measure needs exactly one function");
      break;
    case MeasureKind::product:
      require(trajectories.empty(), "product measure takes no trajectory functions");
      return;
    case MeasureKind::mixture:
      require(trajectories.size() == 2, "mixture needs two trajectory functions");
      break;
  }
  require(weights.size() == trajectories.size(), "one weight per trajectory function");
  double total = 0.0;
  for (double w : weights) {
    require(w >= 0.0, "mixture weights must be nonnegative");
    total += w;
  }
  require(std::abs(total - 1.0) <= 1e-12, "mixture weights must sum to 1");
  for (const auto& fn : trajectories) {
    for (int k = 0; k < kRangeGrid; ++k) {
      const double t = static_cast<double>(k) / (kRangeGrid - 1);
      const double x = fn(t);
      require(x >= 0.0 && x <= 1.0, "trajectory " + fn.describe() + " leaves [0,1] at t = " +
                                        format_double(t) + " (x = " + format_double(x) + ")");
    }
  }
}

double MeasureSpec::conditional_moment(int i, double t) const {
  if (kind == MeasureKind::product) return 1.0 / (i + 1.0);
  double v = 0.0;
  for (std::size_t r = 0; r < trajectories.size(); ++r) {
    v += weights[r] * std::pow(trajectories[r](t), i);
  }
  return v;
}

MomentTable synthesize(const MeasureSpec& spec, int max_i, int max_j, int order) {
  spec.validate();
  require(max_i >= 0 && max_j >= 0, "max_i and max_j must be >= 0");
  require(order >= 1, "quadrature order must be >= 1");

  // Explicit marginals carry 2 max_j + 3 moments: enough for a Hankel basis
  // of degree max_j + 1, which detection at n K = max_j needs.
  const auto marginal = marginal_density_moments(spec.marginal, 2 * max_j + 3);
  std::vector<std::vector<double>> gamma(max_i + 1, std::vector<double>(max_j + 1));

  if (spec.kind == MeasureKind::product) {
    for (int i = 0; i <= max_i; ++i)
      for (int j = 0; j <= max_j; ++j) gamma[i][j] = marginal[j] / (i + 1.0);
  } else {
    int poly_degree = 0;
    bool polynomial = true;
    for (const auto& fn : spec.trajectories) {
      polynomial = polynomial && fn.polynomial_degree() >= 0;
      poly_degree = std::max(poly_degree, fn.polynomial_degree());
    }
    if (polynomial) {
      const int needed = max_j + max_i * poly_degree + (spec.marginal == MarginalDensity::ramp ? 1 : 0);
      require(2 * order - 1 >= needed,
              "quadrature order " + std::to_string(order) + " not exact for degree " +
                  std::to_string(needed) + "; raise the order");
    }
    const auto rule = gauss_legendre_01(order);
    for (int i = 0; i <= max_i; ++i) {
      for (int j = 0; j <= max_j; ++j) {
        long double acc = 0.0L;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
          const double t = rule.nodes[q];
          acc += static_cast<long double>(rule.weights[q]) * std::pow(t, j) *
                 spec.conditional_moment(i, t) * marginal_density(spec.marginal, t);
        }
        gamma[i][j] = static_cast<double>(acc);
      }
    }
    // Row 0 is the marginal itself; store the exact values.
    for (int j = 0; j <= max_j; ++j) gamma[0][j] = marginal[j];
  }

  Marginal m = spec.marginal == MarginalDensity::lebesgue ? Marginal::lebesgue()
                                                          : Marginal::from_moments(marginal);
  return MomentTable::create(std::move(gamma), std::move(m));
}

double oracle_residual(const MeasureSpec& spec, int i, int order) {
  spec.validate();
  require(i >= 2, "oracle residual needs i >= 2");
  const auto rule = gauss_legendre_01(order);
  long double acc = 0.0L;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double t = rule.nodes[q];
    const double diff = spec.conditional_moment(i, t) - std::pow(spec.conditional_moment(1, t), i);
    acc += static_cast<long double>(rule.weights[q]) * marginal_density(spec.marginal, t) * diff * diff;
  }
  return std::sqrt(static_cast<double>(acc));
}

MomentTable add_noise(const MomentTable& table, double eps, std::uint64_t seed) {
  require(eps >= 0.0, "noise amplitude must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-eps, eps);
  std::vector<std::vector<double>> gamma(table.max_i() + 1);
  for (int i = 0; i <= table.max_i(); ++i) {
    const auto r = table.row(i);
    gamma[i].assign(r.begin(), r.end());
    if (i == 0) continue;
    for (double& v : gamma[i]) v += noise(rng);
  }
  LoadOptions options;
  options.marginal_tol = std::max(kDefaultMarginalTol, eps);
  return MomentTable::create(std::move(gamma), table.marginal(), options);
}

}  // namespace lftraj
