#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lftraj/series.hpp"

namespace lftraj {

inline constexpr double kDefaultMarginalTol = 1e-9;

/// The t-marginal of the measure: Lebesgue on [0,1] or given by its moments.
class Marginal {
 public:
  static Marginal lebesgue() { return Marginal{}; }
  static Marginal from_moments(std::vector<double> moments);

  bool is_lebesgue() const noexcept { return !moments_.has_value(); }

  /// m_j; for Lebesgue 1/(j+1) for every j.
  double moment(int j) const;

  /// Explicit moments (empty for Lebesgue).
  std::span<const double> moments() const;

 private:
  std::optional<std::vector<double>> moments_;
};

struct LoadOptions {
  double marginal_tol = kDefaultMarginalTol;
  /// Divide the whole table by gamma[0][0] when it is positive but not 1.
  bool normalize = false;
  /// Replaces the marginal declared by the input (CSV input is Lebesgue
  /// otherwise).
  std::optional<std::vector<double>> marginal_override;
};

/// Affine box [a,b] x [c,d] holding (x, t) before rescaling to the unit square.
struct Box {
  double a = 0.0, b = 1.0, c = 0.0, d = 1.0;
};

/// Dense table gamma[i][j] = int x^i t^j dmu over [0,1]^2, i <= max_i, j <= max_j.
/// Immutable; every instance has passed validation.
class MomentTable {
 public:
  /// Validates and, if requested, normalizes. `gamma` is row-major in i.
  static MomentTable create(std::vector<std::vector<double>> gamma, Marginal marginal,
                            const LoadOptions& options = {});

  int max_i() const noexcept { return max_i_; }
  int max_j() const noexcept { return max_j_; }
  double gamma(int i, int j) const;
  std::span<const double> row(int i) const;
  const Marginal& marginal() const noexcept { return marginal_; }

 private:
  MomentTable(int max_i, int max_j, std::vector<double> data, Marginal marginal)
      : max_i_(max_i), max_j_(max_j), data_(std::move(data)), marginal_(std::move(marginal)) {}

  int max_i_;
  int max_j_;
  std::vector<double> data_;
  Marginal marginal_;
};

enum class MomentFormat { csv, structured };

/// `.json` selects the structured format, anything else CSV.
MomentFormat format_for_path(const std::filesystem::path& path);

MomentTable load_moments(std::istream& in, MomentFormat format, const LoadOptions& options = {});
MomentTable load_moments(const std::filesystem::path& path, const LoadOptions& options = {});

void write_moments(std::ostream& out, const MomentTable& table, MomentFormat format);

/// Raw moments over `box` mapped to moments over [0,1]^2.
std::vector<std::vector<double>> rescale_to_unit_square(
    const std::vector<std::vector<double>>& gamma, const Box& box);

/// Basis coefficients of f_i(t) = int x^i psi(dx|t): the transform applied to
/// row i, entries 0..degree. Lebesgue marginal only; see
/// general_coefficient_row for other marginals.
LegendreSeries coefficient_row(const MomentTable& table, int i, int degree);

/// Moments gamma(j, alpha) of a measure over (t, x_1..x_n).
class MomentStore {
 public:
  explicit MomentStore(int dims);

  int dims() const noexcept { return dims_; }
  void set(int j, std::vector<int> alpha, double value);
  std::optional<double> get(int j, const std::vector<int>& alpha) const;
  std::size_t size() const noexcept { return values_.size(); }

  const std::map<std::pair<int, std::vector<int>>, double>& entries() const noexcept {
    return values_;
  }

 private:
  int dims_;
  std::map<std::pair<int, std::vector<int>>, double> values_;
};

/// CSV with header `j,a1,...,an,value`; n is inferred from the header.
MomentStore load_store(std::istream& in);

/// (t, x_c) marginal table for 1-based coordinate c: gamma[k][j] = gamma(j, k e_c).
MomentTable slice_coordinate(const MomentStore& store, int coordinate,
                             const LoadOptions& options = {});

/// Double formatted with 17 significant digits.
std::string format_double(double v);

}  // namespace lftraj
