#include "lftraj/cli.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lftraj/detector.hpp"
#include "lftraj/error.hpp"
#include "lftraj/legendre_basis.hpp"
#include "lftraj/moment_table.hpp"
#include "lftraj/orthopoly.hpp"
#include "lftraj/synth.hpp"
#include "text_util.hpp"

namespace lftraj::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string digest(const std::string& bytes) { return "fnv1a64:" + detail::hex64(detail::fnv1a(bytes)); }

/// Writes through a temporary sibling and renames, so a failed run never
/// leaves a truncated file behind.
void write_atomically(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
    out << contents;
    if (!out.flush()) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorCode::io_error, "cannot write " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::io_error, "cannot write " + path.string());
  }
}

/// Primary output to a file if given, else to `out`.
void emit(const std::string& path, const std::string& contents, std::ostream& out) {
  if (path.empty()) {
    out << contents;
  } else {
    write_atomically(path, contents);
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& f : detail::split_csv(text)) out.push_back(detail::parse_double(f, 0));
  return out;
}

struct TableInput {
  std::string path;
  std::string marginal_path;
  bool normalize = false;
  double marginal_tol = kDefaultMarginalTol;

  void add_options(CLI::App* app, bool with_marginal = true) {
    app->add_option("--moments", path, "Moment table (CSV i,j,value or .json)")
        ->required()
        ->check(CLI::ExistingFile);
    if (with_marginal) {
      app->add_option("--marginal-moments", marginal_path, "Marginal moments CSV (j,value)")
          ->check(CLI::ExistingFile);
    }
    app->add_flag("--normalize", normalize, "Divide the table by its total mass");
    app->add_option("--marginal-tol", marginal_tol, "Marginal tolerance")->check(CLI::PositiveNumber);
  }

  LoadOptions options() const {
    LoadOptions o;
    o.normalize = normalize;
    o.marginal_tol = marginal_tol;
    if (!marginal_path.empty()) {
      std::istringstream in(read_file(marginal_path));
      o.marginal_override = load_marginal_moments(in);
    }
    return o;
  }
};

std::string series_csv(const LegendreSeries& s) {
  std::string out = "j,coefficient\n";
  for (std::size_t j = 0; j < s.size(); ++j) out += std::to_string(j) + "," + format_double(s.coeffs()[j]) + "\n";
  return out;
}

std::string samples_csv(const std::vector<SamplePoint>& pts) {
  std::string out = "t,value\n";
  for (const auto& p : pts) out += format_double(p.t) + "," + format_double(p.x) + "\n";
  return out;
}

// Basis of the table's explicit marginal, no higher than `degree`: unneeded
// degrees would only worsen the Hankel conditioning.
std::shared_ptr<const OrthonormalBasis> basis_for(const MomentTable& table, int degree) {
  const auto m = table.marginal().moments();
  std::size_t count = std::min(m.size(), static_cast<std::size_t>(2 * degree + 1));
  if (count % 2 == 0) --count;
  return build_from_moments(m.first(count));
}

json report_json(const DetectionReport& r, const std::shared_ptr<const OrthonormalBasis>& basis) {
  json j;
  j["truncation_n"] = r.truncation_n;
  j["max_power_K"] = r.max_power_K;
  j["tolerance"] = r.tolerance;
  j["escalation_factor"] = r.escalation_factor;
  j["norm"] = r.norm == ResidualNorm::l2 ? "l2" : "linf";
  j["residuals"] = json::array();
  for (const auto& p : r.residuals) {
    j["residuals"].push_back({{"i", p.power}, {"r", p.residual}, {"compared_length", p.compared_length}});
  }
  j["max_residual"] = r.max_residual();
  j["verdict"] = to_string(r.verdict);
  j["reconstruction"] = {{"basis", r.reconstruction.basis_tag()}, {"coeffs", r.reconstruction.coeffs()}};
  if (basis) j["reconstruction"]["basis_moments"] = basis->marginal_moments();
  j["sup_norm_estimate"] = r.sup_norm_estimate;
  j["range"] = {r.range_min, r.range_max};
  j["warnings"] = r.warnings;
  return j;
}

int exit_for(Verdict v) {
  switch (v) {
    case Verdict::trajectory_consistent:
      return kSuccess;
    case Verdict::inconsistent:
      return kInconsistent;
    case Verdict::inconclusive:
      return kInconclusive;
  }
  return kInputError;
}

void print_summary(std::ostream& out, const DetectionReport& r, const std::string& label) {
  out << label << "n=" << r.truncation_n << " K=" << r.max_power_K << " tol=" << r.tolerance << "\n";
  for (const auto& p : r.residuals) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "  r_%d = %.6e  (over %d coefficients)\n", p.power, p.residual,
                  p.compared_length);
    out << buf;
  }
  out << "  sup-norm estimate " << r.sup_norm_estimate << "\n";
  for (const auto& w : r.warnings) out << "  warning: " << w << "\n";
  out << "  verdict: " << to_string(r.verdict) << "\n";
}

// Subcommands -----------------------------------------------------------------

struct SynthArgs {
  std::string kind = "trajectory";
  std::vector<std::string> fns;
  std::string weights;
  std::string marginal = "lebesgue";
  int max_i = 0;
  int max_j = 0;
  int order = kDefaultSynthOrder;
  std::string out;
  std::string format;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

int do_synth(const SynthArgs& a, std::ostream& out) {
  const auto kind = parse_measure_kind(a.kind);
  const auto marginal = parse_marginal_density(a.marginal);
  MeasureSpec spec;
  if (kind == MeasureKind::product) {
    if (!a.fns.empty()) throw Error(ErrorCode::invalid_argument, "product measure takes no --fn");
    spec = MeasureSpec::product(marginal);
  } else {
    std::vector<TrajectoryFn> fns;
    for (const auto& f : a.fns) fns.push_back(TrajectoryFn::parse(f));
    if (fns.empty()) throw Error(ErrorCode::invalid_argument, "--fn is required for " + a.kind);
    if (kind == MeasureKind::trajectory) {
      if (fns.size() != 1) throw Error(ErrorCode::invalid_argument, "trajectory takes one --fn");
      spec = MeasureSpec::trajectory(fns.front(), marginal);
    } else {
      auto weights = a.weights.empty() ? std::vector<double>(fns.size(), 1.0 / fns.size())
                                       : parse_number_list(a.weights);
      spec = MeasureSpec::mixture(std::move(fns), std::move(weights), marginal);
    }
  }
  auto table = synthesize(spec, a.max_i, a.max_j, a.order);
  if (a.noise > 0.0) table = add_noise(table, a.noise, a.seed);

  MomentFormat format = format_for_path(a.out);
  if (a.format == "csv") format = MomentFormat::csv;
  if (a.format == "structured" || a.format == "json") format = MomentFormat::structured;
  if (format == MomentFormat::csv && !table.marginal().is_lebesgue()) {
    throw Error(ErrorCode::invalid_argument,
                "CSV cannot carry an explicit marginal; use --format structured");
  }
  std::ostringstream ss;
  write_moments(ss, table, format);
  write_atomically(a.out, ss.str());
  out << "wrote " << (table.max_i() + 1) << "x" << (table.max_j() + 1) << " moment table to "
      << a.out << "\n";
  return kSuccess;
}

struct CoeffsArgs {
  TableInput input;
  int i = 1;
  int degree = 0;
  std::string out;
};

int do_coeffs(const CoeffsArgs& a, std::ostream& out) {
  const auto table = load_moments(fs::path(a.input.path), a.input.options());
  LegendreSeries row;
  if (table.marginal().is_lebesgue()) {
    row = coefficient_row(table, a.i, a.degree);
  } else {
    row = general_coefficient_row(table, basis_for(table, a.degree), a.i, a.degree, a.input.marginal_tol);
  }
  emit(a.out, series_csv(row), out);
  return kSuccess;
}

struct CheckArgs {
  TableInput input;
  std::string store;
  int n = 0;
  int K = 2;
  double tol = 0.0;
  std::string report;
  bool linf = false;
  bool clamp = false;
  bool stamp = false;
  bool sequential = false;
  int samples = 0;
  double escalation = 10.0;
};

int do_check(const CheckArgs& a, std::ostream& out) {
  DetectionOptions options;
  options.norm = a.linf ? ResidualNorm::linf : ResidualNorm::l2;
  options.escalation_factor = a.escalation;
  options.parallel = !a.sequential;

  json doc;
  doc["tool"] = "lftraj";
  doc["tool_version"] = kToolVersion;

  auto detect = [&](const MomentTable& table, json& j, const std::string& label) {
    std::shared_ptr<const OrthonormalBasis> basis;
    DetectionReport r;
    if (table.marginal().is_lebesgue()) {
      r = check_trajectory(table, a.n, a.K, a.tol, options);
    } else {
      basis = basis_for(table, a.n * a.K + 1);
      r = check_trajectory(table, basis, a.n, a.K, a.tol, options);
    }
    j = report_json(r, basis);
    if (a.samples > 0 && r.verdict != Verdict::inconsistent) {
      json pts = json::array();
      for (const auto& p : reconstruct_trajectory(r, a.samples, a.clamp)) pts.push_back({p.t, p.x});
      j["samples"] = pts;
    }
    print_summary(out, r, label);
    return r.verdict;
  };

  int code = kSuccess;
  if (!a.store.empty()) {
    const std::string bytes = read_file(a.store);
    doc["input_digest"] = digest(bytes);
    std::istringstream in(bytes);
    const auto store = load_store(in);
    const auto options_in = a.input.options();
    // Slice and validate every coordinate before reporting anything.
    std::vector<MomentTable> tables;
    for (int c = 1; c <= store.dims(); ++c) tables.push_back(slice_coordinate(store, c, options_in));
    doc["coordinates"] = json::array();
    bool any_inconsistent = false;
    bool any_inconclusive = false;
    for (int c = 1; c <= store.dims(); ++c) {
      json j;
      const auto v = detect(tables[c - 1], j, "coordinate " + std::to_string(c) + ": ");
      j["coordinate"] = c;
      doc["coordinates"].push_back(j);
      any_inconsistent = any_inconsistent || v == Verdict::inconsistent;
      any_inconclusive = any_inconclusive || v == Verdict::inconclusive;
    }
    code = any_inconsistent ? kInconsistent : any_inconclusive ? kInconclusive : kSuccess;
  } else {
    const std::string bytes = read_file(a.input.path);
    std::istringstream in(bytes);
    const auto table = load_moments(in, format_for_path(a.input.path), a.input.options());
    json j;
    code = exit_for(detect(table, j, ""));
    doc["input_digest"] = digest(bytes);
    doc.update(j);
  }
  if (a.stamp) doc["timestamp"] = utc_timestamp();
  if (!a.report.empty()) write_atomically(a.report, doc.dump(2) + "\n");
  return code;
}

struct ReconstructArgs {
  std::string series;
  int samples = 0;
  std::string out;
  bool clamp = false;
};

int do_reconstruct(const ReconstructArgs& a, std::ostream& out) {
  const std::string bytes = read_file(a.series);
  LegendreSeries series;
  if (fs::path(a.series).extension() == ".json") {
    json doc;
    try {
      doc = json::parse(bytes);
      if (doc.contains("verdict") && doc["verdict"] == to_string(Verdict::inconsistent)) {
        throw Error(ErrorCode::invalid_argument,
                    "report verdict is inconsistent; nothing to reconstruct");
      }
      const auto& rec = doc.at("reconstruction");
      auto coeffs = rec.at("coeffs").get<std::vector<double>>();
      if (rec.contains("basis_moments")) {
        const auto m = rec["basis_moments"].get<std::vector<double>>();
        series = LegendreSeries(std::move(coeffs), build_from_moments(m));
      } else {
        series = LegendreSeries(std::move(coeffs));
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::parse_error, std::string("malformed report: ") + e.what());
    }
  } else {
    std::istringstream in(bytes);
    series = LegendreSeries(detail::read_indexed_column(in, "coefficient"));
  }
  emit(a.out, samples_csv(sample_series(series, a.samples, a.clamp)), out);
  return kSuccess;
}

struct BasisArgs {
  int degree = 0;
  std::string format = "csv";
  std::string marginal;
  std::string out;
  int cap = kDefaultDegreeCap;
};

int do_basis(const BasisArgs& a, std::ostream& out) {
  std::vector<std::vector<double>> rows;
  std::string tag = "lebesgue";
  if (a.marginal.empty()) {
    const auto delta = build_shifted_legendre(a.degree, a.cap);
    for (int j = 0; j <= a.degree; ++j) rows.emplace_back(delta.row(j).begin(), delta.row(j).end());
  } else {
    std::istringstream in(read_file(a.marginal));
    const auto m = load_marginal_moments(in);
    if (m.size() < 2 * static_cast<std::size_t>(a.degree) + 1) {
      throw Error(ErrorCode::insufficient_moments,
                  "degree " + std::to_string(a.degree) + " needs " +
                      std::to_string(2 * a.degree + 1) + " marginal moments, file has " +
                      std::to_string(m.size()));
    }
    const auto basis = build_from_moments(std::span<const double>(m).first(2 * a.degree + 1));
    tag = basis->tag();
    for (int j = 0; j <= a.degree; ++j) rows.emplace_back(basis->row(j).begin(), basis->row(j).end());
  }
  std::string text;
  if (a.format == "json") {
    json doc{{"degree", a.degree}, {"basis", tag}, {"rows", rows}};
    text = doc.dump(2) + "\n";
  } else {
    text = "j,k,coefficient\n";
    for (std::size_t j = 0; j < rows.size(); ++j)
      for (std::size_t k = 0; k < rows[j].size(); ++k)
        text += std::to_string(j) + "," + std::to_string(k) + "," + format_double(rows[j][k]) + "\n";
  }
  emit(a.out, text, out);
  return kSuccess;
}

struct AlgebraicArgs {
  TableInput input;
  int s = 1;
  double threshold = kKernelRelativeThreshold;
  std::string report;
};

int do_algebraic(const AlgebraicArgs& a, std::ostream& out) {
  const std::string bytes = read_file(a.input.path);
  std::istringstream in(bytes);
  const auto table = load_moments(in, format_for_path(a.input.path), a.input.options());
  const auto res = algebraic_support_check(table, a.s, a.threshold);
  out << "moment matrix M_" << a.s << ": smallest singular value " << res.smallest_singular_value
      << " (largest " << res.largest_singular_value << ")\n";
  json doc{{"tool", "lftraj"},
           {"tool_version", kToolVersion},
           {"input_digest", digest(bytes)},
           {"degree_s", res.degree_s},
           {"singular_values", res.singular_values},
           {"smallest_singular_value", res.smallest_singular_value},
           {"has_kernel", res.has_kernel}};
  json poly = json::array();
  if (res.has_kernel) {
    out << "  kernel polynomial:";
    for (const auto& term : res.kernel_polynomial) {
      poly.push_back({{"x_power", term.x_power}, {"t_power", term.t_power}, {"coeff", term.coeff}});
      if (std::abs(term.coeff) > 1e-12) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " %+.6f x^%d t^%d", term.coeff, term.x_power, term.t_power);
        out << buf;
      }
    }
    out << "\n";
  } else {
    out << "  no kernel below the threshold\n";
  }
  doc["kernel_polynomial"] = res.has_kernel ? poly : json(nullptr);
  if (!a.report.empty()) write_atomically(a.report, doc.dump(2) + "\n");
  return kSuccess;
}

struct SliceArgs {
  std::string store;
  int coordinate = 1;
  std::string out;
  std::string format;
};

int do_slice(const SliceArgs& a, std::ostream& out) {
  std::istringstream in(read_file(a.store));
  const auto table = slice_coordinate(load_store(in), a.coordinate);
  MomentFormat format = format_for_path(a.out);
  if (a.format == "csv") format = MomentFormat::csv;
  if (a.format == "structured" || a.format == "json") format = MomentFormat::structured;
  std::ostringstream ss;
  write_moments(ss, table, format);
  emit(a.out, ss.str(), out);
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trajectory detection from moments via Legendre-Fourier star products", "lftraj"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a moment table for a synthetic measure");
  s->add_option("--kind", synth.kind, "trajectory | product | mixture")
      ->check(CLI::IsMember({"trajectory", "product", "mixture"}));
  s->add_option("--fn", synth.fns, "exp_neg | sin_scaled | constant:C | poly:c0,c1,... (repeat for mixtures)");
  s->add_option("--weights", synth.weights, "Mixture weights, comma separated");
  s->add_option("--marginal", synth.marginal, "lebesgue | ramp")->check(CLI::IsMember({"lebesgue", "ramp"}));
  s->add_option("--max-i", synth.max_i)->required()->check(CLI::NonNegativeNumber);
  s->add_option("--max-j", synth.max_j)->required()->check(CLI::NonNegativeNumber);
  s->add_option("--order", synth.order, "Quadrature points")->check(CLI::PositiveNumber);
  s->add_option("--out", synth.out)->required();
  s->add_option("--format", synth.format)->check(CLI::IsMember({"csv", "structured", "json"}));
  s->add_option("--noise", synth.noise, "Uniform noise amplitude on rows i >= 1")->check(CLI::NonNegativeNumber);
  s->add_option("--seed", synth.seed);

  CoeffsArgs coeffs;
  auto* c = app.add_subcommand("coeffs", "Basis coefficients of one moment row");
  coeffs.input.add_options(c);
  c->add_option("--i", coeffs.i, "Row (power of x)")->required()->check(CLI::NonNegativeNumber);
  c->add_option("--degree", coeffs.degree)->required()->check(CLI::NonNegativeNumber);
  c->add_option("--out", coeffs.out);

  CheckArgs check;
  auto* k = app.add_subcommand("check", "Test whether the moments come from a trajectory");
  auto* moments_opt = k->add_option("--moments", check.input.path, "Moment table")->check(CLI::ExistingFile);
  auto* store_opt = k->add_option("--store", check.store, "Multi-coordinate store (j,a1..an,value)")
                        ->check(CLI::ExistingFile);
  moments_opt->excludes(store_opt);
  k->add_option("--marginal-moments", check.input.marginal_path)->check(CLI::ExistingFile);
  k->add_flag("--normalize", check.input.normalize);
  k->add_option("--marginal-tol", check.input.marginal_tol)->check(CLI::PositiveNumber);
  k->add_option("--truncation", check.n)->required()->check(CLI::NonNegativeNumber);
  k->add_option("--max-power", check.K)->required()->check(CLI::Range(2, INT_MAX));
  k->add_option("--tol", check.tol)->required()->check(CLI::PositiveNumber);
  k->add_option("--escalation", check.escalation)->check(CLI::Range(1.0, 1e300));
  k->add_option("--report", check.report);
  k->add_option("--samples", check.samples, "Embed a sampled reconstruction in the report")
      ->check(CLI::Range(2, INT_MAX));
  k->add_flag("--linf", check.linf, "Max-norm residuals");
  k->add_flag("--clamp", check.clamp, "Clamp sampled reconstruction to [0,1]");
  k->add_flag("--stamp", check.stamp, "Embed a UTC timestamp in the report");
  k->add_flag("--sequential", check.sequential, "Evaluate residuals on one thread");

  ReconstructArgs recon;
  auto* r = app.add_subcommand("reconstruct", "Sample a coefficient series on [0,1]");
  r->add_option("--series", recon.series, "CSV j,coefficient or a check report (.json)")
      ->required()
      ->check(CLI::ExistingFile);
  r->add_option("--samples", recon.samples)->required()->check(CLI::Range(2, INT_MAX));
  r->add_option("--out", recon.out);
  r->add_flag("--clamp", recon.clamp);

  BasisArgs basis;
  auto* b = app.add_subcommand("basis", "Dump monomial coefficients of the orthonormal basis");
  b->add_option("--degree", basis.degree)->required()->check(CLI::NonNegativeNumber);
  b->add_option("--format", basis.format)->check(CLI::IsMember({"csv", "json"}));
  b->add_option("--marginal-moments", basis.marginal)->check(CLI::ExistingFile);
  b->add_option("--degree-cap", basis.cap)->check(CLI::NonNegativeNumber);
  b->add_option("--out", basis.out);

  AlgebraicArgs alg;
  auto* g = app.add_subcommand("algebraic-check", "Kernel of the bivariate moment matrix");
  alg.input.add_options(g, false);
  g->add_option("--degree-s", alg.s)->required()->check(CLI::NonNegativeNumber);
  g->add_option("--threshold", alg.threshold)->check(CLI::PositiveNumber);
  g->add_option("--report", alg.report);

  SliceArgs slice;
  auto* sl = app.add_subcommand("slice", "Extract the (t, x_c) table from a store");
  sl->add_option("--store", slice.store)->required()->check(CLI::ExistingFile);
  sl->add_option("--coordinate", slice.coordinate, "1-based")->required()->check(CLI::PositiveNumber);
  sl->add_option("--out", slice.out);
  sl->add_option("--format", slice.format)->check(CLI::IsMember({"csv", "structured", "json"}));

  std::vector<std::string> argv_storage{"lftraj"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kInputError;
  }

  try {
    if (s->parsed()) return do_synth(synth, out);
    if (c->parsed()) return do_coeffs(coeffs, out);
    if (k->parsed()) {
      if (check.input.path.empty() && check.store.empty()) {
        err << "check: one of --moments or --store is required\n";
        return kInputError;
      }
      return do_check(check, out);
    }
    if (r->parsed()) return do_reconstruct(recon, out);
    if (b->parsed()) return do_basis(basis, out);
    if (g->parsed()) return do_algebraic(alg, out);
    if (sl->parsed()) return do_slice(slice, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace lftraj::cli
