#include "twomode_cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "twomode/analytics.hpp"
#include "twomode/ensemble.hpp"
#include "twomode/error.hpp"
#include "twomode/exact.hpp"
#include "twomode/fock.hpp"
#include "twomode/random.hpp"
#include "twomode_cli/report_io.hpp"

#ifndef TWOMODE_VERSION
#define TWOMODE_VERSION "0.0.0"
#endif

namespace twomode::cli {

namespace fs = std::filesystem;

namespace {

struct Outcome {
  json config;
  json results;
  std::optional<CsvTable> table;
  bool pass = true;
  std::string summary;
  std::optional<std::uint64_t> seed;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<int> parse_ints(const std::string& text, const std::string& field) {
  std::vector<int> out;
  for (const auto& s : split(text, ',')) {
    try {
      std::size_t used = 0;
      int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ParameterError(field, "'" + s + "' is not an integer");
    }
  }
  return out;
}

std::vector<std::vector<int>> parse_sets(const std::string& text, std::size_t width, const std::string& field) {
  std::vector<std::vector<int>> out;
  for (const auto& s : split(text, ';')) {
    auto v = parse_ints(s, field);
    if (v.size() != width)
      throw ParameterError(field, "each entry needs " + std::to_string(width) + " comma-separated indices");
    out.push_back(v);
  }
  return out;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------

struct MomentsCmd {
  int N = 0, n = 0;
  std::size_t samples = 200000;
  std::uint64_t seed = 0;
  int batches = 32;
  std::string pairs, quartics;
  double tolerance = 5.0;

  void add(CLI::App* app) {
    app->add_option("--N", N, "total particle number (even)")->required();
    app->add_option("--n", n, "subspace dimension (odd, <= N+1)")->required();
    app->add_option("--samples", samples, "number of sampled states")->capture_default_str();
    app->add_option("--seed", seed, "master seed")->required();
    app->add_option("--batches", batches, "batches for standard errors")->capture_default_str();
    app->add_option("--pairs", pairs, "order-2 index sets, e.g. \"0,0;0,1\"");
    app->add_option("--quartics", quartics, "order-4 index sets, e.g. \"0,1,0,1\"");
    app->add_option("--tolerance-se", tolerance, "pass threshold in standard errors")->capture_default_str();
  }

  Outcome run() const {
    const SubspaceSpec spec = make_subspace(N, n);
    if (samples < 2) throw ParameterError("samples", "at least two samples are required");
    std::vector<std::vector<int>> sets = parse_sets(pairs, 2, "pairs");
    for (auto& q : parse_sets(quartics, 4, "quartics")) sets.push_back(q);
    if (sets.empty()) {
      const int hi = spec.max_index();
      sets = {{0, 0}, {0, 0, 0, 0}};
      if (hi > 0) {
        for (std::vector<int> s : {std::vector<int>{0, 1}, {-hi, hi}, {hi, hi}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 1, 0, 0}})
          sets.push_back(s);
      }
    }
    const auto est = sample_moments(spec, sets, samples, seed, batches);

    Outcome o;
    o.seed = seed;
    o.config = {{"N", N}, {"n", n}, {"samples", samples}, {"seed", seed}, {"batches", batches},
                {"index_sets", sets}, {"tolerance_se", tolerance}};
    CsvTable table({"order", "l1", "l2", "l3", "l4", "value_re", "value_im", "standard_error", "expected", "z_score"});
    json rows = json::array();
    double worst = 0.0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const double expected = uniform_moment(spec, sets[i]);
      const double dev = std::abs(est[i].value - std::complex<double>(expected));
      const double z = est[i].standard_error > 0 ? dev / est[i].standard_error : (dev <= 1e-12 ? 0.0 : 1e300);
      worst = std::max(worst, z);
      const bool within = z <= tolerance;
      o.pass = o.pass && within;
      rows.push_back({{"indices", sets[i]},
                      {"order", sets[i].size()},
                      {"value", {est[i].value.real(), est[i].value.imag()}},
                      {"standard_error", est[i].standard_error},
                      {"expected", expected},
                      {"z_score", z},
                      {"within", within}});
      std::vector<std::string> cells{std::to_string(sets[i].size())};
      for (std::size_t j = 0; j < 4; ++j) cells.push_back(j < sets[i].size() ? std::to_string(sets[i][j]) : "");
      for (double v : {est[i].value.real(), est[i].value.imag(), est[i].standard_error, expected, z})
        cells.push_back(format_number(v));
      table.add_row(cells);
    }
    o.results = {{"sample_count", samples}, {"moments", rows}};
    o.table = std::move(table);
    o.summary = std::to_string(sets.size()) + " moments, worst " + fixed(worst, 3) + " SE";
    return o;
  }
};

// ---------------------------------------------------------------------------

struct SumsCmd {
  int N = 0, n = 0;
  std::string mode = "exact";

  void add(CLI::App* app) {
    app->add_option("--N", N, "total particle number (even)")->required();
    app->add_option("--n", n, "subspace dimension (odd, <= N+1)")->required();
    app->add_option("--mode", mode, "exact, closed or both")
        ->check(CLI::IsMember({"exact", "closed", "both"}))
        ->capture_default_str();
  }

  Outcome run() const {
    const SubspaceSpec spec = make_subspace(N, n);
    Outcome o;
    o.config = {{"N", N}, {"n", n}, {"mode", mode}};
    CsvTable table({"mode", "N", "n", "S20", "S11", "S40", "S31", "S22", "S30", "S21"});
    auto emit = [&](const char* name, const SumsRecord& r) {
      json j;
      const std::pair<const char*, const Rational*> fields[] = {{"S20", &r.S20}, {"S11", &r.S11}, {"S40", &r.S40},
                                                                {"S31", &r.S31}, {"S22", &r.S22}, {"S30", &r.S30},
                                                                {"S21", &r.S21}};
      std::vector<std::string> cells{name, std::to_string(N), std::to_string(n)};
      for (const auto& [key, value] : fields) {
        j[key] = {{"value", to_double(*value)}, {"rational", value->str()}};
        cells.push_back(format_number(to_double(*value)));
      }
      o.results[name] = j;
      table.add_row(cells);
    };
    if (mode != "closed") emit("exact", s_sums_exact(spec));
    if (mode != "exact") emit("closed", s_sums_closed(spec));
    o.table = std::move(table);
    const auto& first = o.results.begin().value();
    o.summary = "S20 = " + format_number(first["S20"]["value"].get<double>()) +
                ", S11 = " + format_number(first["S11"]["value"].get<double>());
    return o;
  }
};

// ---------------------------------------------------------------------------

void add_stat_rows(CsvTable& table, const StatReport& report) {
  for (const auto& p : report.points) {
    std::vector<std::string> cells{format_number(p.k.x()), format_number(p.k.y()), format_number(p.k.z()),
                                   std::string(to_string(report.provenance))};
    for (const StatQuantity* q : {&p.mean, &p.ensemble_cov, &p.quantum_cov_avg, &p.total_cov}) {
      cells.push_back(format_number(q->value));
      cells.push_back(format_number(q->uncertainty));
    }
    table.add_row(cells);
  }
}

CsvTable stat_table() {
  return CsvTable({"k_x", "k_y", "k_z", "provenance", "mean", "mean_unc", "ensemble_cov", "ensemble_cov_unc",
                   "quantum_cov_avg", "quantum_cov_avg_unc", "total_cov", "total_cov_unc"});
}

struct PlaneWaveCmd {
  int N = 0, n = 0;
  std::array<int, 3> k0{1, 0, 0};
  int dims = 1;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  std::string grid = "-2,0,2";
  double tolerance = 5.0;
  double band = 1.0;
  int batches = 32;

  void add(CLI::App* app) {
    app->add_option("--N", N, "total particle number (even)")->required();
    app->add_option("--n", n, "subspace dimension (odd, <= N+1)")->required();
    app->add_option("--k0", k0[0], "k0 along x (lattice units)")->capture_default_str();
    app->add_option("--k0y", k0[1], "k0 along y")->capture_default_str();
    app->add_option("--k0z", k0[2], "k0 along z")->capture_default_str();
    app->add_option("--dims", dims, "spatial dimensions (1-3)")->capture_default_str();
    app->add_option("--samples", samples, "Monte Carlo states (0 skips Monte Carlo)")->capture_default_str();
    app->add_option("--seed", seed, "master seed")->required();
    app->add_option("--grid", grid, "k grid as multiples of k0")->capture_default_str();
    app->add_option("--tolerance-se", tolerance, "Monte Carlo threshold in standard errors")->capture_default_str();
    app->add_option("--band-scale", band, "closed-form band c in c N^2")->capture_default_str();
    app->add_option("--batches", batches, "batches for standard errors")->capture_default_str();
  }

  Outcome run() const {
    const SubspaceSpec spec = make_subspace(N, n);
    const PlaneWaveModel model = make_plane_wave(k0, dims);
    std::vector<Momentum> ks;
    const auto multiples = parse_ints(grid, "grid");
    if (multiples.empty()) throw ParameterError("grid", "the k grid is empty");
    for (int m : multiples) ks.push_back(static_cast<double>(m) * model.k0_momentum());

    Outcome o;
    o.seed = seed;
    o.config = {{"N", N}, {"n", n}, {"k0", k0}, {"dims", dims}, {"samples", samples}, {"seed", seed},
                {"grid", multiples}, {"tolerance_se", tolerance}, {"band_scale", band}, {"batches", batches}};

    const StatReport exact = exact_report(spec, model, ks);
    const StatReport closed = closed_report(spec, model, ks, ClosedVariant::model_leading, band);
    const ComparisonTolerances tol{tolerance, 1.0};
    json reports = {{"exact", to_json(exact)}, {"closed", to_json(closed)}};
    json comparisons;
    const auto ce = compare_reports(closed, exact, tol);
    comparisons["closed_vs_exact"] = to_json(ce);
    o.pass = ce.pass;
    CsvTable table = stat_table();
    add_stat_rows(table, exact);
    add_stat_rows(table, closed);
    std::string worst = "closed/exact " + fixed(ce.worst.normalized, 3) + " band";
    if (samples > 0) {
      ExperimentConfig config{spec, model, ks, samples, seed, tolerance, batches};
      const StatReport mc = run_ensemble(config);
      const auto me = compare_reports(mc, exact, tol);
      reports["montecarlo"] = to_json(mc);
      comparisons["montecarlo_vs_exact"] = to_json(me);
      o.pass = o.pass && me.pass;
      add_stat_rows(table, mc);
      worst += ", montecarlo/exact " + fixed(me.worst.normalized, 3) + " SE";
    }
    o.results = {{"model", describe(model)}, {"reports", reports}, {"comparisons", comparisons}};
    o.table = std::move(table);
    o.summary = worst;
    return o;
  }
};

// ---------------------------------------------------------------------------

struct GaussianCmd {
  int N = 0, n = 0;
  double alpha = 5.0, t = 50.0;
  std::size_t points = 2048;
  bool exact = false;
  double band = 1.0;

  void add(CLI::App* app) {
    app->add_option("--N", N, "total particle number (even)")->required();
    app->add_option("--n", n, "subspace dimension (odd, <= N+1)")->required();
    app->add_option("--alpha", alpha, "half distance between the packets")->capture_default_str();
    app->add_option("--t", t, "expansion time")->capture_default_str();
    app->add_option("--points", points, "grid points")->capture_default_str();
    app->add_flag("--exact", exact, "also evaluate the exact-trace oracle and compare");
    app->add_option("--band-scale", band, "closed-form band c in c N^2")->capture_default_str();
  }

  Outcome run() const {
    const SubspaceSpec spec = make_subspace(N, n);
    const GaussianModel model{alpha, t};
    (void)gaussian_kernel(model);
    const auto grid = gaussian_default_grid(model, points);
    const auto ek = gaussian_closed_set(spec, model, grid, Evaluation::exact_kernel);
    const auto lt = gaussian_closed_set(spec, model, grid, Evaluation::large_time);

    Outcome o;
    o.config = {{"N", N}, {"n", n}, {"alpha", alpha}, {"t", t}, {"points", points}, {"exact", exact},
                {"band_scale", band}};
    CsvTable table({"k", "mean_exact_kernel", "ensemble_cov_exact_kernel", "quantum_cov_exact_kernel",
                    "mean_large_time", "ensemble_cov_large_time", "quantum_cov_large_time", "c30", "c12", "c04",
                    "c03"});
    json jek = json::array(), jlt = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      jek.push_back(to_json(ek[i]));
      jlt.push_back(to_json(lt[i]));
      const auto& c = lt[i].breakdown->c;
      std::vector<std::string> cells;
      for (double v : {grid[i], ek[i].mean, ek[i].ensemble_cov, ek[i].quantum_cov_avg, lt[i].mean, lt[i].ensemble_cov,
                       lt[i].quantum_cov_avg, c.c30, c.c12, c.c04, c.c03})
        cells.push_back(format_number(v));
      table.add_row(cells);
    }
    o.results = {{"k0", k0_of_t(model)},
                 {"overlap", orthogonality_report(model)},
                 {"quasi_orthogonal", is_quasi_orthogonal(model)},
                 {"grid_step", grid[1] - grid[0]},
                 {"exact_kernel", jek},
                 {"large_time", jlt}};
    o.summary = "k0(t) = " + format_number(k0_of_t(model)) + ", " + std::to_string(grid.size()) + " grid points";
    if (exact) {
      std::vector<Momentum> ks;
      for (double k : grid) ks.emplace_back(k);
      const auto oracle = exact_report(spec, model, ks);
      const auto closed = closed_report(spec, model, ks, ClosedVariant::kernel_general, band);
      const auto verdict = compare_reports(closed, oracle);
      o.results["exact"] = to_json(oracle);
      o.results["comparison"] = to_json(verdict);
      o.pass = verdict.pass;
      o.summary += ", closed/exact worst " + fixed(verdict.worst.normalized, 3) + " band";
    }
    o.table = std::move(table);
    return o;
  }
};

// ---------------------------------------------------------------------------

ModeModel select_model(const std::string& name, int k0, double alpha, double t) {
  if (name == "plane-wave") return make_plane_wave({k0, 0, 0}, 1);
  GaussianModel g{alpha, t};
  (void)gaussian_kernel(g);
  return g;
}

struct PatternCmd {
  std::string model = "plane-wave";
  int N = 0, n = 0, k0 = 1;
  double alpha = 5.0, t = 50.0;
  std::size_t runs = 1000;
  std::uint64_t seed = 0;
  std::size_t positions = 256;
  std::optional<double> x_min, x_max;
  double tolerance = 5.0;

  void add(CLI::App* app) {
    app->add_option("--model", model, "plane-wave or gaussian")
        ->check(CLI::IsMember({"plane-wave", "gaussian"}))
        ->capture_default_str();
    app->add_option("--N", N, "total particle number (even)")->required();
    app->add_option("--n", n, "subspace dimension (odd, <= N+1)")->required();
    app->add_option("--k0", k0, "plane-wave k0 (lattice units)")->capture_default_str();
    app->add_option("--alpha", alpha, "gaussian half distance")->capture_default_str();
    app->add_option("--t", t, "gaussian expansion time")->capture_default_str();
    app->add_option("--runs", runs, "number of single runs averaged")->capture_default_str();
    app->add_option("--seed", seed, "master seed")->required();
    app->add_option("--positions", positions, "position grid size")->capture_default_str();
    app->add_option("--x-min", x_min, "first position (default 0)");
    app->add_option("--x-max", x_max, "last position (default two fringe periods)");
    app->add_option("--tolerance-se", tolerance, "flatness threshold in standard errors")->capture_default_str();
  }

  Outcome run() const {
    const SubspaceSpec spec = make_subspace(N, n);
    const ModeModel m = select_model(model, k0, alpha, t);
    if (runs < 1) throw ParameterError("runs", "at least one run is required");
    if (positions < 2) throw ParameterError("positions", "at least two positions are required");
    const double half = fringe_half_wavenumber(m);
    const double period = std::numbers::pi / half;
    const double lo = x_min.value_or(0.0);
    const double hi = x_max.value_or(lo + 2.0 * period);
    if (!(hi > lo)) throw ParameterError("x-max", "x-max must exceed x-min");
    std::vector<double> xs(positions);
    for (std::size_t i = 0; i < positions; ++i)
      xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(positions - 1);

    const StreamFactory streams(seed);
    auto state_rng = streams.stream(0, stream_tag::state);
    auto phase_rng = streams.stream(0, stream_tag::phase);
    const StateVector state = sample_state(spec, state_rng);
    const PatternRecord first = single_run_pattern(state, m, phase_rng, xs);

    Outcome o;
    o.seed = seed;
    o.config = {{"model", model}, {"N", N}, {"n", n}, {"k0", k0}, {"alpha", alpha}, {"t", t}, {"runs", runs},
                {"seed", seed}, {"positions", positions}, {"x_min", lo}, {"x_max", hi}, {"tolerance_se", tolerance}};
    const auto [mn, mx] = std::minmax_element(first.density.begin(), first.density.end());
    o.results["first_run"] = {{"fringe_wavevector", to_json(first.fringe_wavevector)},
                              {"half_wavenumber", first.half_wavenumber},
                              {"period", period},
                              {"phase", first.phase},
                              {"amplitude", first.amplitude},
                              {"visibility", first.visibility},
                              {"min_density", *mn},
                              {"max_density", *mx}};
    CsvTable table({"x", "first_run", "mean", "standard_error"});
    std::optional<PatternAverage> avg;
    if (runs >= 2) avg = average_patterns(spec, m, runs, seed, xs);
    double worst = 0.0;
    for (std::size_t i = 0; i < positions; ++i) {
      std::vector<std::string> cells{format_number(xs[i]), format_number(first.density[i])};
      if (avg) {
        const double dev = std::abs(avg->mean[i] - N);
        const double se = avg->standard_error[i];
        worst = std::max(worst, se > 0 ? dev / se : (dev <= 1e-9 * N ? 0.0 : 1e300));
        cells.push_back(format_number(avg->mean[i]));
        cells.push_back(format_number(se));
      } else {
        cells.push_back("");
        cells.push_back("");
      }
      table.add_row(cells);
    }
    if (avg) {
      o.pass = worst <= tolerance;
      o.results["average"] = {{"runs", runs}, {"worst_z", worst}, {"flat", o.pass}};
    }
    o.table = std::move(table);
    o.summary = "visibility " + fixed(first.visibility) + (avg ? ", average flat within " + fixed(worst, 3) + " SE" : "");
    return o;
  }
};

// ---------------------------------------------------------------------------

struct ScanCmd {
  std::string model = "plane-wave";
  int k0 = 1;
  double alpha = 5.0, t = 50.0;
  double exponent = 0.5;
  std::string totals = "256,512,1024,2048,4096,8192,16384";
  int spot = 4096;
  double band = 1.0;
  std::optional<double> expect;
  double slope_tol = 0.05;

  void add(CLI::App* app) {
    app->add_option("--model", model, "plane-wave or gaussian")
        ->check(CLI::IsMember({"plane-wave", "gaussian"}))
        ->capture_default_str();
    app->add_option("--k0", k0, "plane-wave k0 (lattice units)")->capture_default_str();
    app->add_option("--alpha", alpha, "gaussian half distance")->capture_default_str();
    app->add_option("--t", t, "gaussian expansion time")->capture_default_str();
    app->add_option("--exponent", exponent, "n = odd floor of N^exponent")->capture_default_str();
    app->add_option("--totals", totals, "comma-separated N values")->capture_default_str();
    app->add_option("--spot-check-max", spot, "exact-oracle checks up to this N")->capture_default_str();
    app->add_option("--band-scale", band, "remainder band c in c N^2")->capture_default_str();
    app->add_option("--expect-slope", expect, "expected log-log slope");
    app->add_option("--slope-tolerance", slope_tol, "allowed slope deviation")->capture_default_str();
  }

  Outcome run() const {
    ScalingFamily family{select_model(model, k0, alpha, t), exponent, parse_ints(totals, "totals"), band, spot};
    const ScalingReport r = scaling_scan(family);
    Outcome o;
    o.config = {{"model", model}, {"k0", k0}, {"alpha", alpha}, {"t", t}, {"exponent", exponent},
                {"totals", family.totals}, {"spot_check_max", spot}, {"band_scale", band},
                {"expect_slope", expect ? json(*expect) : json(nullptr)}, {"slope_tolerance", slope_tol}};
    CsvTable table({"N", "n", "mean", "ensemble_cov", "quantum_cov", "relative", "exact_relative", "excluded"});
    json pts = json::array();
    for (const auto& p : r.points) {
      pts.push_back({{"N", p.total},
                     {"n", p.dim},
                     {"mean", p.mean},
                     {"ensemble_cov", p.ensemble_cov},
                     {"quantum_cov", p.quantum_cov},
                     {"relative", p.relative},
                     {"exact_relative", p.exact_relative ? json(*p.exact_relative) : json(nullptr)},
                     {"excluded", p.excluded}});
      table.add_row({std::to_string(p.total), std::to_string(p.dim), format_number(p.mean),
                     format_number(p.ensemble_cov), format_number(p.quantum_cov), format_number(p.relative),
                     p.exact_relative ? format_number(*p.exact_relative) : "", p.excluded ? "1" : "0"});
    }
    o.results = {{"points", pts},
                 {"slope", r.slope},
                 {"slope_standard_error", r.slope_standard_error},
                 {"intercept", r.intercept},
                 {"used_points", r.used_points}};
    o.summary = "slope " + fixed(r.slope, 4);
    if (expect) {
      o.pass = std::abs(r.slope - *expect) <= slope_tol;
      o.results["within"] = o.pass;
      o.summary += " (expected " + fixed(*expect, 4) + " +- " + fixed(slope_tol, 3) + ")";
    }
    o.table = std::move(table);
    return o;
  }
};

// ---------------------------------------------------------------------------

struct Peak {
  double k;
  double value;
};

std::vector<Peak> local_maxima(const std::vector<double>& grid, const std::vector<double>& v, double floor) {
  std::vector<Peak> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const bool left = i == 0 || v[i] >= v[i - 1];
    const bool right = i + 1 == v.size() || v[i] > v[i + 1];
    if (left && right && v[i] > floor) out.push_back({grid[i], v[i]});
  }
  return out;
}

json peaks_json(const std::vector<Peak>& peaks) {
  json j = json::array();
  for (const auto& p : peaks) j.push_back({{"k", p.k}, {"value", p.value}});
  return j;
}

struct Fig1Cmd {
  double alpha = 5.0, t = 50.0;
  std::size_t points = 2048;

  void add(CLI::App* app) {
    app->add_option("--alpha", alpha, "half distance between the packets")->capture_default_str();
    app->add_option("--t", t, "expansion time")->capture_default_str();
    app->add_option("--points", points, "grid points")->capture_default_str();
  }

  Outcome run() const {
    const GaussianModel model{alpha, t};
    (void)gaussian_kernel(model);
    const auto grid = gaussian_default_grid(model, points);
    const auto curve = figure1_curve(model, grid);
    const auto peaks = local_maxima(grid, curve, 1e-3);
    Outcome o;
    o.config = {{"alpha", alpha}, {"t", t}, {"points", points}};
    CsvTable table({"k", "mean_over_N2"});
    for (std::size_t i = 0; i < grid.size(); ++i) table.add_row({format_number(grid[i]), format_number(curve[i])});
    const double two_k0 = 2.0 * k0_of_t(model);
    auto nearest = [&](double target) {
      Peak best{0.0, 0.0};
      double dist = INFINITY;
      for (const auto& p : peaks)
        if (std::abs(p.k - target) < dist) {
          dist = std::abs(p.k - target);
          best = p;
        }
      return best;
    };
    const Peak centre = nearest(0.0), side = nearest(two_k0);
    o.results = {{"two_k0", two_k0},
                 {"grid_step", grid[1] - grid[0]},
                 {"maxima", peaks_json(peaks)},
                 {"central_value", centre.value},
                 {"side_value", side.value},
                 {"side_over_centre", centre.value > 0 ? side.value / centre.value : 0.0}};
    o.table = std::move(table);
    o.summary = std::to_string(peaks.size()) + " maxima, centre " + fixed(centre.value, 6) + ", side " +
                fixed(side.value, 6) + " at " + fixed(side.k, 6);
    return o;
  }
};

struct Fig2Cmd {
  std::string regime;
  int N = 10000, n = 0;
  double alpha = 5.0, t = 50.0;
  std::size_t points = 2048;
  std::optional<double> k2;

  void add(CLI::App* app) {
    app->add_option("--regime", regime, "small (n << N^3/4) or large (n >> N^3/4)")
        ->check(CLI::IsMember({"small", "large"}))
        ->required();
    app->add_option("--N", N, "total particle number (even)")->capture_default_str();
    app->add_option("--n", n, "subspace dimension (default 11 for small, N/2+1 rounded odd for large)");
    app->add_option("--alpha", alpha, "half distance between the packets")->capture_default_str();
    app->add_option("--t", t, "expansion time")->capture_default_str();
    app->add_option("--points", points, "grid points")->capture_default_str();
    app->add_option("--k2", k2, "fixed second momentum (default 2 k0(t))");
  }

  Outcome run() const {
    int dim = n;
    if (dim == 0) {
      dim = regime == "small" ? 11 : N / 2 + 1;
      if (dim % 2 == 0) ++dim;
    }
    const SubspaceSpec spec = make_subspace(N, dim);
    const GaussianModel model{alpha, t};
    (void)gaussian_kernel(model);
    const auto grid = gaussian_default_grid(model, points);
    const VarianceRegime r = regime == "small" ? VarianceRegime::small_n : VarianceRegime::large_n;
    const double fixed_k2 = k2.value_or(2.0 * k0_of_t(model));
    const auto slice = figure2_slice(spec, model, grid, r, fixed_k2);
    const auto it = std::max_element(slice.begin(), slice.end());
    const double argmax = grid[static_cast<std::size_t>(it - slice.begin())];
    Outcome o;
    o.config = {{"regime", regime}, {"N", N}, {"n", dim}, {"alpha", alpha}, {"t", t}, {"points", points},
                {"k2", fixed_k2}};
    CsvTable table({"k", "variance_term"});
    for (std::size_t i = 0; i < grid.size(); ++i) table.add_row({format_number(grid[i]), format_number(slice[i])});
    o.results = {{"term", regime == "small" ? "C30 N^3" : "C04 n^4"},
                 {"n_over_N_three_quarters", dim / std::pow(static_cast<double>(N), 0.75)},
                 {"two_k0", 2.0 * k0_of_t(model)},
                 {"grid_step", grid[1] - grid[0]},
                 {"argmax_k", argmax},
                 {"peak_value", *it},
                 {"maxima", peaks_json(local_maxima(grid, slice, 1e-3 * *it))}};
    o.table = std::move(table);
    o.summary = "peak at k = " + fixed(argmax, 6) + " (2 k0 = " + fixed(2.0 * k0_of_t(model), 6) + ")";
    return o;
  }
};

// ---------------------------------------------------------------------------

StatReport load_report(const std::string& path, const std::string& name, const std::string& field) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParameterError(field, path + " is not valid JSON");
  }
  if (j.contains("provenance")) return stat_report_from_json(j);
  if (j.contains("results") && j["results"].contains("reports")) {
    const auto& reports = j["results"]["reports"];
    if (name.empty()) throw ParameterError(field, path + " holds several reports; choose one with --" + field + "-report");
    if (!reports.contains(name)) throw ParameterError(field, path + " has no report named '" + name + "'");
    return stat_report_from_json(reports[name]);
  }
  if (j.contains("results") && j["results"].contains("exact") && j["results"]["exact"].contains("provenance"))
    return stat_report_from_json(j["results"]["exact"]);
  throw ParameterError(field, path + " does not contain a statistics report");
}

struct CompareCmd {
  std::string a, b, a_report, b_report;
  double se_units = 5.0, band_units = 1.0;

  void add(CLI::App* app) {
    app->add_option("--a", a, "first report file")->required();
    app->add_option("--b", b, "second report file")->required();
    app->add_option("--a-report", a_report, "report name inside the first file (exact, closed, montecarlo)");
    app->add_option("--b-report", b_report, "report name inside the second file");
    app->add_option("--se-units", se_units, "threshold when Monte Carlo is involved")->capture_default_str();
    app->add_option("--band-units", band_units, "threshold when a closed form is involved")->capture_default_str();
  }

  Outcome run() const {
    const StatReport ra = load_report(a, a_report, "a");
    const StatReport rb = load_report(b, b_report, "b");
    const auto v = compare_reports(ra, rb, {se_units, band_units});
    Outcome o;
    o.config = {{"a", a}, {"b", b}, {"a_report", a_report}, {"b_report", b_report}, {"se_units", se_units},
                {"band_units", band_units}};
    o.results = {{"a_provenance", std::string(to_string(ra.provenance))},
                 {"b_provenance", std::string(to_string(rb.provenance))},
                 {"verdict", to_json(v)}};
    CsvTable table({"index", "quantity", "absolute", "normalized", "within"});
    for (const auto& d : v.deviations)
      table.add_row({std::to_string(d.index), d.quantity, format_number(d.absolute), format_number(d.normalized),
                     d.within ? "1" : "0"});
    o.table = std::move(table);
    o.pass = v.pass;
    o.summary = "worst " + v.worst.quantity + " at point " + std::to_string(v.worst.index) + ": " +
                fixed(v.worst.normalized, 4);
    return o;
  }
};

// ---------------------------------------------------------------------------

struct Paths {
  fs::path json;
  fs::path csv;
  fs::path manifest;
};

Paths output_paths(const std::string& out) {
  fs::path p(out);
  Paths paths;
  if (p.extension() == ".csv") {
    paths.csv = p;
    paths.json = fs::path(p).replace_extension(".json");
  } else {
    paths.json = p;
    paths.csv = fs::path(p).replace_extension(".csv");
  }
  paths.manifest = fs::path(paths.json).replace_extension(".manifest.json");
  return paths;
}

int execute(const std::string& command, const std::vector<std::string>& args, const std::string& out_path,
            const std::function<Outcome()>& body, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o = body();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const Paths paths = output_paths(out_path);
  json report = {{"command", command},
                 {"version", TWOMODE_VERSION},
                 {"config", o.config},
                 {"pass", o.pass},
                 {"summary", o.summary},
                 {"results", o.results}};
  write_atomic(paths.json, report.dump(2) + "\n");
  json artifacts = json::array({paths.json.string()});
  if (o.table) {
    write_atomic(paths.csv, o.table->str());
    artifacts.push_back(paths.csv.string());
  }
  json manifest = {{"command", command},
                   {"argv", args},
                   {"config", o.config},
                   {"seed", o.seed ? json(*o.seed) : json(nullptr)},
                   {"artifacts", artifacts},
                   {"duration_seconds", seconds},
                   {"version", TWOMODE_VERSION}};
  write_atomic(paths.manifest, manifest.dump(2) + "\n");

  out << command << ": " << (o.pass ? "PASS" : "FAIL") << " " << o.summary << " -> " << paths.json.string() << "\n";
  return o.pass ? kExitPass : kExitComparisonFailed;
}

std::vector<std::string> replay_args(const std::string& manifest_path, const std::string& new_out) {
  json m;
  try {
    m = json::parse(read_file(manifest_path));
  } catch (const json::parse_error&) {
    throw ParameterError("manifest", manifest_path + " is not valid JSON");
  }
  if (!m.contains("argv") || !m["argv"].is_array()) throw ParameterError("manifest", "manifest has no argv");
  auto args = m["argv"].get<std::vector<std::string>>();
  if (!args.empty() && args.front() == "replay") throw ParameterError("manifest", "cannot replay a replay");
  if (new_out.empty()) return args;
  bool replaced = false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out" && i + 1 < args.size()) {
      args[i + 1] = new_out;
      replaced = true;
    } else if (args[i].rfind("--out=", 0) == 0) {
      args[i] = "--out=" + new_out;
      replaced = true;
    }
  }
  if (!replaced) {
    args.push_back("--out");
    args.push_back(new_out);
  }
  return args;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-mode condensate typicality toolkit", "twomode"};
  app.require_subcommand(1);
  app.set_version_flag("--version", TWOMODE_VERSION);

  std::string out_path;
  MomentsCmd moments;
  SumsCmd sums;
  PlaneWaveCmd plane_wave;
  GaussianCmd gaussian;
  PatternCmd pattern;
  ScanCmd scan;
  Fig1Cmd fig1;
  Fig2Cmd fig2;
  CompareCmd compare;
  std::string manifest_path, replay_out;

  struct Entry {
    const char* name;
    const char* help;
    std::function<void(CLI::App*)> add;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> entries{
      {"moments", "Monte Carlo moments of uniformly sampled states", [&](CLI::App* a) { moments.add(a); },
       [&] { return moments.run(); }},
      {"sums", "ensemble sums S_ij, exact and closed form", [&](CLI::App* a) { sums.add(a); },
       [&] { return sums.run(); }},
      {"plane-wave", "plane-wave mean and covariances: exact, closed form, Monte Carlo",
       [&](CLI::App* a) { plane_wave.add(a); }, [&] { return plane_wave.run(); }},
      {"gaussian", "expanding-Gaussian closed forms on the default grid", [&](CLI::App* a) { gaussian.add(a); },
       [&] { return gaussian.run(); }},
      {"pattern", "single-run fringe patterns and their run average", [&](CLI::App* a) { pattern.add(a); },
       [&] { return pattern.run(); }},
      {"scan", "relative-fluctuation scaling with N", [&](CLI::App* a) { scan.add(a); }, [&] { return scan.run(); }},
      {"fig1", "average R(k)/N^2 for expanding Gaussians", [&](CLI::App* a) { fig1.add(a); },
       [&] { return fig1.run(); }},
      {"fig2", "dominant variance slice for expanding Gaussians", [&](CLI::App* a) { fig2.add(a); },
       [&] { return fig2.run(); }},
      {"compare", "compare two statistics reports", [&](CLI::App* a) { compare.add(a); },
       [&] { return compare.run(); }},
  };
  std::vector<CLI::App*> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    e.add(sub);
    sub->add_option("--out", out_path, "output file (.json report; the CSV table goes next to it)")
        ->default_str(std::string(e.name) + ".json");
    subs.push_back(sub);
  }
  CLI::App* replay = app.add_subcommand("replay", "re-run a command from its manifest");
  replay->add_option("--manifest", manifest_path, "manifest written by an earlier run")->required();
  replay->add_option("--out", replay_out, "new output path (default: the original)");

  std::vector<const char*> argv{"twomode"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    for (auto* s : subs)
      if (s->parsed()) {
        out << s->help();
        return kExitPass;
      }
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForVersion&) {
    out << TWOMODE_VERSION << "\n";
    return kExitPass;
  } catch (const CLI::Success&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (replay->parsed()) return run_command(replay_args(manifest_path, replay_out), out, err);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      if (out_path.empty()) out_path = std::string(entries[i].name) + ".json";
      return execute(entries[i].name, args, out_path, entries[i].run, out);
    }
  } catch (const ParameterError& e) {
    err << "error: " << e.field() << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace twomode::cli
