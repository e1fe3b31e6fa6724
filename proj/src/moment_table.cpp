#include "lftraj/moment_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lftraj/error.hpp"
#include "text_util.hpp"

namespace lftraj {

using detail::parse_double;
using detail::parse_index;
using detail::split_csv;
using detail::trim;

namespace {

std::string describe_missing(const std::vector<std::pair<int, int>>& missing) {
  std::string msg = "missing moments (i,j):";
  const std::size_t shown = std::min<std::size_t>(missing.size(), 20);
  for (std::size_t n = 0; n < shown; ++n) {
    msg += " (" + std::to_string(missing[n].first) + "," + std::to_string(missing[n].second) + ")";
  }
  if (missing.size() > shown) msg += " ... " + std::to_string(missing.size()) + " total";
  return msg;
}

double binomial(int n, int k) {
  double c = 1.0;
  for (int r = 1; r <= k; ++r) c = c * (n - k + r) / r;
  return c;
}

// Coefficients of ((z - lo)/(hi - lo))^n in powers of z.
std::vector<double> affine_power(int n, double lo, double hi) {
  std::vector<double> c(static_cast<std::size_t>(n) + 1);
  const double scale = std::pow(hi - lo, -n);
  for (int q = 0; q <= n; ++q) c[q] = binomial(n, q) * std::pow(-lo, n - q) * scale;
  return c;
}

std::vector<double> rescale_marginal(std::span<const double> m, double lo, double hi) {
  std::vector<double> out(m.size());
  for (std::size_t j = 0; j < m.size(); ++j) {
    const auto c = affine_power(static_cast<int>(j), lo, hi);
    long double acc = 0.0L;
    for (std::size_t q = 0; q <= j; ++q) acc += static_cast<long double>(c[q]) * m[q];
    out[j] = static_cast<double>(acc);
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Marginal --------------------------------------------------------------------

Marginal Marginal::from_moments(std::vector<double> moments) {
  if (moments.empty()) throw Error(ErrorCode::invalid_argument, "empty marginal moment list");
  Marginal m;
  m.moments_ = std::move(moments);
  return m;
}

double Marginal::moment(int j) const {
  if (!moments_) return 1.0 / (j + 1.0);
  if (j < 0 || static_cast<std::size_t>(j) >= moments_->size()) {
    throw Error(ErrorCode::insufficient_moments,
                "marginal moment " + std::to_string(j) + " not available");
  }
  return (*moments_)[j];
}

std::span<const double> Marginal::moments() const {
  if (!moments_) return {};
  return *moments_;
}

// MomentTable -----------------------------------------------------------------

MomentTable MomentTable::create(std::vector<std::vector<double>> gamma, Marginal marginal,
                                const LoadOptions& options) {
  if (gamma.empty() || gamma.front().empty()) {
    throw Error(ErrorCode::missing_entries, "moment table is empty");
  }
  const int max_i = static_cast<int>(gamma.size()) - 1;
  const int max_j = static_cast<int>(gamma.front().size()) - 1;
  for (int i = 0; i <= max_i; ++i) {
    if (static_cast<int>(gamma[i].size()) != max_j + 1) {
      throw Error(ErrorCode::missing_entries, "row " + std::to_string(i) + " has " +
                                                  std::to_string(gamma[i].size()) +
                                                  " entries, expected " +
                                                  std::to_string(max_j + 1));
    }
    for (int j = 0; j <= max_j; ++j) {
      if (!std::isfinite(gamma[i][j])) {
        throw Error(ErrorCode::non_finite, "moment (" + std::to_string(i) + "," +
                                               std::to_string(j) + ") is not finite");
      }
    }
  }
  if (options.marginal_override) marginal = Marginal::from_moments(*options.marginal_override);

  const double tol = options.marginal_tol;
  const double mass = gamma[0][0];
  if (!(mass > 0.0)) {
    throw Error(ErrorCode::mass_violation, "total mass gamma[0][0] = " + format_double(mass) +
                                               " is not positive");
  }
  if (std::abs(mass - 1.0) > tol) {
    if (!options.normalize) {
      throw Error(ErrorCode::mass_violation,
                  "total mass gamma[0][0] = " + format_double(mass) +
                      " is not 1 (pass --normalize to rescale)");
    }
    for (auto& r : gamma)
      for (double& v : r) v /= mass;
    if (!marginal.is_lebesgue()) {
      std::vector<double> m(marginal.moments().begin(), marginal.moments().end());
      for (double& v : m) v /= mass;
      marginal = Marginal::from_moments(std::move(m));
    }
  }

  if (!marginal.is_lebesgue() && marginal.moments().size() < static_cast<std::size_t>(max_j) + 1) {
    throw Error(ErrorCode::insufficient_moments,
                "explicit marginal has " + std::to_string(marginal.moments().size()) +
                    " moments, table needs " + std::to_string(max_j + 1));
  }
  for (int j = 0; j <= max_j; ++j) {
    const double expected = marginal.moment(j);
    const double deviation = gamma[0][j] - expected;
    if (std::abs(deviation) > tol) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "marginal violation at j=%d: expected %.10g, got %.10g (deviation %.3g)",
                    j, expected, gamma[0][j], deviation);
      throw Error(ErrorCode::marginal_violation, buf);
    }
  }
  for (int i = 1; i <= max_i; ++i) {
    for (int j = 0; j <= max_j; ++j) {
      const double v = gamma[i][j];
      if (v < -tol || v > gamma[0][j] + tol) {
        throw Error(ErrorCode::box_violation,
                    "moment (" + std::to_string(i) + "," + std::to_string(j) + ") = " +
                        format_double(v) + " outside [0, gamma[0][" + std::to_string(j) +
                        "]]; the measure cannot live on [0,1]^2");
      }
    }
  }

  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(max_i + 1) * (max_j + 1));
  for (const auto& r : gamma) data.insert(data.end(), r.begin(), r.end());
  return MomentTable(max_i, max_j, std::move(data), std::move(marginal));
}

double MomentTable::gamma(int i, int j) const {
  if (i < 0 || i > max_i_ || j < 0 || j > max_j_) {
    throw Error(ErrorCode::out_of_range, "moment (" + std::to_string(i) + "," +
                                             std::to_string(j) + ") outside table");
  }
  return data_[static_cast<std::size_t>(i) * (max_j_ + 1) + j];
}

std::span<const double> MomentTable::row(int i) const {
  if (i < 0 || i > max_i_) {
    throw Error(ErrorCode::out_of_range, "row " + std::to_string(i) + " outside table");
  }
  return {data_.data() + static_cast<std::size_t>(i) * (max_j_ + 1),
          static_cast<std::size_t>(max_j_) + 1};
}

std::vector<std::vector<double>> rescale_to_unit_square(
    const std::vector<std::vector<double>>& gamma, const Box& box) {
  if (!(box.b > box.a) || !(box.d > box.c)) {
    throw Error(ErrorCode::invalid_argument, "degenerate box");
  }
  const int max_i = static_cast<int>(gamma.size()) - 1;
  const int max_j = static_cast<int>(gamma.front().size()) - 1;
  std::vector<std::vector<double>> out(gamma.size(), std::vector<double>(max_j + 1));
  for (int i = 0; i <= max_i; ++i) {
    const auto cx = affine_power(i, box.a, box.b);
    for (int j = 0; j <= max_j; ++j) {
      const auto ct = affine_power(j, box.c, box.d);
      long double acc = 0.0L;
      for (int p = 0; p <= i; ++p)
        for (int q = 0; q <= j; ++q)
          acc += static_cast<long double>(cx[p]) * ct[q] * gamma[p][q];
      out[i][j] = static_cast<double>(acc);
    }
  }
  return out;
}

// I/O -------------------------------------------------------------------------

MomentFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".json" ? MomentFormat::structured : MomentFormat::csv;
}

namespace {

MomentTable load_csv(std::istream& in, const LoadOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv(line);
      break;
    }
  }
  if (header != std::vector<std::string>{"i", "j", "value"}) {
    throw Error(ErrorCode::parse_error, "expected CSV header 'i,j,value'");
  }
  std::map<std::pair<int, int>, double> cells;
  int max_i = -1;
  int max_j = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 3) {
      throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) +
                                              ": expected 3 fields, got " +
                                              std::to_string(fields.size()));
    }
    const int i = parse_index(fields[0], line_no);
    const int j = parse_index(fields[1], line_no);
    const double v = parse_double(fields[2], line_no);
    if (!cells.emplace(std::pair{i, j}, v).second) {
      throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) +
                                              ": duplicate moment (" + std::to_string(i) +
                                              "," + std::to_string(j) + ")");
    }
    max_i = std::max(max_i, i);
    max_j = std::max(max_j, j);
  }
  if (cells.empty()) throw Error(ErrorCode::missing_entries, "no moments in input");

  std::vector<std::vector<double>> gamma(max_i + 1, std::vector<double>(max_j + 1));
  std::vector<std::pair<int, int>> missing;
  for (int i = 0; i <= max_i; ++i) {
    for (int j = 0; j <= max_j; ++j) {
      const auto it = cells.find({i, j});
      if (it == cells.end()) {
        missing.emplace_back(i, j);
      } else {
        gamma[i][j] = it->second;
      }
    }
  }
  if (!missing.empty()) throw Error(ErrorCode::missing_entries, describe_missing(missing));
  return MomentTable::create(std::move(gamma), Marginal::lebesgue(), options);
}

MomentTable load_structured(std::istream& in, const LoadOptions& options) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed structured moment file: ") + e.what());
  }
  try {
    const int max_i = doc.at("max_i").get<int>();
    const int max_j = doc.at("max_j").get<int>();
    if (max_i < 0 || max_j < 0) throw Error(ErrorCode::parse_error, "negative max_i/max_j");
    auto gamma = doc.at("gamma").get<std::vector<std::vector<double>>>();
    std::vector<std::pair<int, int>> missing;
    if (static_cast<int>(gamma.size()) < max_i + 1) gamma.resize(max_i + 1);
    if (static_cast<int>(gamma.size()) > max_i + 1) {
      throw Error(ErrorCode::parse_error, "gamma has more rows than max_i + 1");
    }
    for (int i = 0; i <= max_i; ++i) {
      if (static_cast<int>(gamma[i].size()) > max_j + 1) {
        throw Error(ErrorCode::parse_error, "gamma row " + std::to_string(i) +
                                                " longer than max_j + 1");
      }
      for (int j = static_cast<int>(gamma[i].size()); j <= max_j; ++j) missing.emplace_back(i, j);
    }
    if (!missing.empty()) throw Error(ErrorCode::missing_entries, describe_missing(missing));

    Marginal marginal = Marginal::lebesgue();
    if (doc.contains("marginal")) {
      const auto& m = doc["marginal"];
      if (m.is_string()) {
        if (m.get<std::string>() != "lebesgue") {
          throw Error(ErrorCode::parse_error, "marginal must be \"lebesgue\" or a list of moments");
        }
      } else {
        marginal = Marginal::from_moments(m.get<std::vector<double>>());
      }
    }
    if (doc.contains("box") && !doc["box"].is_null()) {
      const auto b = doc["box"].get<std::vector<double>>();
      if (b.size() != 4) throw Error(ErrorCode::parse_error, "box must be [a,b,c,d]");
      const Box box{b[0], b[1], b[2], b[3]};
      gamma = rescale_to_unit_square(gamma, box);
      if (!marginal.is_lebesgue()) {
        marginal = Marginal::from_moments(rescale_marginal(marginal.moments(), box.c, box.d));
      }
    }
    return MomentTable::create(std::move(gamma), std::move(marginal), options);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed structured moment file: ") + e.what());
  }
}

}  // namespace

MomentTable load_moments(std::istream& in, MomentFormat format, const LoadOptions& options) {
  return format == MomentFormat::csv ? load_csv(in, options) : load_structured(in, options);
}

MomentTable load_moments(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  return load_moments(in, format_for_path(path), options);
}

void write_moments(std::ostream& out, const MomentTable& table, MomentFormat format) {
  if (format == MomentFormat::csv) {
    out << "i,j,value\n";
    for (int i = 0; i <= table.max_i(); ++i)
      for (int j = 0; j <= table.max_j(); ++j)
        out << i << ',' << j << ',' << format_double(table.gamma(i, j)) << '\n';
    return;
  }
  // Hand-rolled so numbers keep 17 significant digits.
  out << "{\n  \"box\": null,\n  \"marginal\": ";
  if (table.marginal().is_lebesgue()) {
    out << "\"lebesgue\"";
  } else {
    out << '[';
    const auto m = table.marginal().moments();
    for (std::size_t j = 0; j < m.size(); ++j) out << (j ? ", " : "") << format_double(m[j]);
    out << ']';
  }
  out << ",\n  \"max_i\": " << table.max_i() << ",\n  \"max_j\": " << table.max_j()
      << ",\n  \"gamma\": [\n";
  for (int i = 0; i <= table.max_i(); ++i) {
    out << "    [";
    for (int j = 0; j <= table.max_j(); ++j) out << (j ? ", " : "") << format_double(table.gamma(i, j));
    out << (i < table.max_i() ? "],\n" : "]\n");
  }
  out << "  ]\n}\n";
}

LegendreSeries coefficient_row(const MomentTable& table, int i, int degree) {
  if (!table.marginal().is_lebesgue()) {
    throw Error(ErrorCode::basis_mismatch,
                "table has an explicit marginal; use the general-marginal coefficient row");
  }
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
  const auto delta = build_shifted_legendre(degree);
  return LegendreSeries(delta.apply(table.row(i), degree), lebesgue_basis());
}

// MomentStore -----------------------------------------------------------------

MomentStore::MomentStore(int dims) : dims_(dims) {
  if (dims < 1) throw Error(ErrorCode::invalid_argument, "store needs at least one coordinate");
}

void MomentStore::set(int j, std::vector<int> alpha, double value) {
  if (static_cast<int>(alpha.size()) != dims_) {
    throw Error(ErrorCode::invalid_argument, "multi-index has wrong length");
  }
  values_[{j, std::move(alpha)}] = value;
}

std::optional<double> MomentStore::get(int j, const std::vector<int>& alpha) const {
  const auto it = values_.find({j, alpha});
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

MomentStore load_store(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv(line);
      break;
    }
  }
  if (header.size() < 3 || header.front() != "j" || header.back() != "value") {
    throw Error(ErrorCode::parse_error, "expected CSV header 'j,a1,...,an,value'");
  }
  const int dims = static_cast<int>(header.size()) - 2;
  MomentStore store(dims);
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": expected " +
                                              std::to_string(header.size()) + " fields");
    }
    const int j = parse_index(fields[0], line_no);
    std::vector<int> alpha(dims);
    for (int c = 0; c < dims; ++c) alpha[c] = parse_index(fields[c + 1], line_no);
    if (store.get(j, alpha)) {
      throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": duplicate entry");
    }
    store.set(j, std::move(alpha), parse_double(fields.back(), line_no));
  }
  return store;
}

MomentTable slice_coordinate(const MomentStore& store, int coordinate, const LoadOptions& options) {
  if (coordinate < 1 || coordinate > store.dims()) {
    throw Error(ErrorCode::out_of_range, "coordinate " + std::to_string(coordinate) +
                                             " outside 1.." + std::to_string(store.dims()));
  }
  const int c = coordinate - 1;
  // Extent is shared by all coordinates: the highest pure power k e_d present
  // for any d, and the highest t-power.
  int max_k = -1;
  int max_j = -1;
  for (const auto& [key, value] : store.entries()) {
    const auto& alpha = key.second;
    const auto nonzero = std::count_if(alpha.begin(), alpha.end(), [](int a) { return a != 0; });
    if (nonzero > 1) continue;
    max_k = std::max(max_k, *std::max_element(alpha.begin(), alpha.end()));
    max_j = std::max(max_j, key.first);
  }
  if (max_k < 0) throw Error(ErrorCode::missing_entries, "store has no moments for this coordinate");

  std::vector<std::vector<double>> gamma(max_k + 1, std::vector<double>(max_j + 1));
  std::vector<std::pair<int, int>> missing;
  std::vector<int> alpha(store.dims(), 0);
  for (int k = 0; k <= max_k; ++k) {
    alpha[c] = k;
    for (int j = 0; j <= max_j; ++j) {
      if (const auto v = store.get(j, alpha)) {
        gamma[k][j] = *v;
      } else {
        missing.emplace_back(k, j);
      }
    }
  }
  if (!missing.empty()) throw Error(ErrorCode::missing_entries, describe_missing(missing));
  return MomentTable::create(std::move(gamma), Marginal::lebesgue(), options);
}

}  // namespace lftraj
