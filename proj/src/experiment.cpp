#include "randword/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "randword/ergodic.hpp"
#include "randword/errors.hpp"
#include "randword/floquet.hpp"
#include "randword/furstenberg.hpp"
#include "randword/scattering.hpp"
#include "randword/spectrum.hpp"
#include "randword/transfer.hpp"

namespace randword {

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

namespace fs = std::filesystem;

class Artifacts {
 public:
  Artifacts(const ExperimentConfig& cfg, fs::path dir) : cfg_(cfg), dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw ConfigError("output directory " + dir_.string() + ": " + ec.message());
  }

  std::string header() const {
    std::string h = "# config_hash=" + cfg_.hash();
    h += " seed=" + (cfg_.seed ? std::to_string(*cfg_.seed) : std::string("none"));
    return h;
  }

  void csv(const std::string& name, const std::vector<std::string>& columns,
           const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    out << header() << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
      out << '\n';
    }
    write(name, out.str());
  }

  void report(const std::string& name, json result) {
    json wrapped;
    wrapped["config_hash"] = cfg_.hash();
    wrapped["seed"] = cfg_.seed ? json(*cfg_.seed) : json(nullptr);
    wrapped["task"] = cfg_.task;
    wrapped["result"] = std::move(result);
    write(name, wrapped.dump(2) + "\n");
  }

  std::vector<fs::path> files;

 private:
  void write(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path.string());
    f << content;
    if (!f) throw ConfigError("write failed for " + path.string());
    files.push_back(path);
  }

  const ExperimentConfig& cfg_;
  fs::path dir_;
};

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

/// Either an explicit list or {"from", "to", "points"}.
std::vector<double> energy_grid(const ConfigNode& node) {
  if (node.raw().is_array()) return node.numbers();
  node.only_keys({"from", "to", "points"});
  const double from = node["from"].number(), to = node["to"].number();
  const std::size_t points = node["points"].count();
  if (points < 1) node["points"].fail("need at least one point");
  if (points > 1 && !(to > from)) node["to"].fail("must exceed 'from'");
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = points == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(points - 1);
  return out;
}

/// Two support words for tasks built on a background/insertion pair: taken
/// from params when given, else the first non-commuting pair of the model.
std::pair<Word, Word> word_pair(const ExperimentConfig& cfg, const char* first, const char* second) {
  const auto p = cfg.params();
  if (p.has(first) && p.has(second)) return {p[first].word(), p[second].word()};
  if (p.has(first) != p.has(second)) p.fail(std::string("give both '") + first + "' and '" + second + "' or neither");
  const auto nc = check_nc(*cfg.model);
  if (!nc.witness) throw ModelDegenerateError("model support has no non-commuting pair of words");
  return *nc.witness;
}

RunSummary run_lyapunov(const ExperimentConfig& cfg, Artifacts& out) {
  const auto p = cfg.params();
  p.only_keys({"energies", "eta", "sites"});
  const auto energies = energy_grid(p["energies"]);
  const double eta = p.number("eta", 0.0);
  const std::size_t sites = p.count("sites", 100000);
  std::vector<cplx> z;
  for (double e : energies) z.emplace_back(e, eta);
  const auto curve = gamma_curve(*cfg.model, z, sites, cfg.require_seed());
  std::vector<std::vector<double>> rows;
  double min_gamma = std::numeric_limits<double>::infinity();
  for (const auto& pt : curve) {
    rows.push_back({pt.energy.real(), pt.energy.imag(), pt.gamma0.value, pt.gamma0.std_error,
                    pt.gamma.value, pt.gamma.std_error, pt.ratio});
    min_gamma = std::min(min_gamma, pt.gamma.value);
  }
  out.csv("lyapunov.csv", {"energy_re", "energy_im", "gamma0", "gamma0_err", "gamma", "gamma_err", "ratio"}, rows);
  std::ostringstream line;
  line << "lyapunov: " << curve.size() << " energies, <L>=" << cfg.model->expected_length()
       << ", min gamma=" << min_gamma;
  return {line.str(), {}};
}

json band_json(const BandStructure& bs) {
  json r;
  r["discriminant"] = bs.discriminant.coefficients();
  r["bands"] = json::array();
  for (const auto& b : bs.bands) r["bands"].push_back({{"lower", b.lower}, {"upper", b.upper}});
  r["gaps"] = json::array();
  for (const auto& g : bs.gaps)
    r["gaps"].push_back({{"lower", finite_or_null(g.lower)}, {"upper", finite_or_null(g.upper)}});
  r["degenerate_points"] = bs.degenerate_points;
  return r;
}

RunSummary run_bands(const ExperimentConfig& cfg, Artifacts& out) {
  const auto p = cfg.params();
  p.only_keys({"background", "points"});
  const Word w = p.has("background") ? p["background"].word() : cfg.model->support().front().word;
  const auto bg = PeriodicBackground::from_word(w);
  const auto bs = band_structure(bg);
  json r = band_json(bs);
  r["period"] = bg.period();
  out.report("bands.json", r);

  const std::size_t points = p.count("points", 401);
  if (points < 2) p["points"].fail("need at least two points");
  const double lo = bs.bands.front().lower - 0.5, hi = bs.bands.back().upper + 0.5;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < points; ++i) {
    const double e = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    rows.push_back({e, bs.discriminant(e)});
  }
  out.csv("bands.csv", {"energy", "discriminant"}, rows);
  std::ostringstream line;
  line << "bands: period " << bg.period() << ", " << bs.bands.size() << " bands, "
       << bs.degenerate_points.size() << " closed gaps";
  return {line.str(), {}};
}

RunSummary run_scatter(const ExperimentConfig& cfg, Artifacts& out) {
  const auto p = cfg.params();
  p.only_keys({"background", "insertion", "points"});
  const auto [w0, w1] = word_pair(cfg, "background", "insertion");
  const auto problem = InsertionProblem::from_words(w0, w1);
  const auto bs = band_structure(problem.background);
  const std::size_t points = p.count("points", 200);
  const double margin = 1e-3;

  std::vector<std::vector<double>> rows;
  double worst = 0.0;
  for (const auto& [lo, hi] : bs.stability_intervals) {
    for (std::size_t i = 0; i < points; ++i) {
      const double e = lo + margin + (hi - lo - 2 * margin) * (static_cast<double>(i) + 0.5) /
                                         static_cast<double>(points);
      const auto sp = scattering_coefficients(problem, e);
      worst = std::max(worst, sp.residual);
      rows.push_back({e, sp.a.real(), sp.a.imag(), sp.b.real(), sp.b.imag(), sp.residual,
                      sp.condition, sp.flagged ? 1.0 : 0.0});
    }
  }
  out.csv("scatter.csv", {"energy", "re_a", "im_a", "re_b", "im_b", "unitarity_residual", "condition", "flagged"},
          rows);

  json r = band_json(bs);
  r["background"] = w0.values;
  r["insertion"] = w1.values;
  r["max_unitarity_residual"] = worst;
  r["b_roots"] = json::array();
  r["gap_roots"] = json::array();
  if (problem.potentials_differ()) {
    for (std::size_t b = 0; b < bs.bands.size(); ++b)
      for (const auto& root : find_b_roots(problem, bs, b))
        r["b_roots"].push_back({{"energy", root.energy}, {"residual", root.residual}});
    for (std::size_t g = 0; g < bs.gaps.size(); ++g)
      for (const auto& root : find_gap_roots(problem, bs, g))
        r["gap_roots"].push_back({{"energy", root.energy}, {"residual", root.residual}});
  }
  out.report("scatter.json", r);
  std::ostringstream line;
  line << "scatter: " << rows.size() << " band points, max | |a|^2-|b|^2-1 | = " << worst << ", "
       << r["b_roots"].size() << " b roots, " << r["gap_roots"].size() << " gap roots";
  return {line.str(), {}};
}

json exceptional_json(const ExceptionalSet& set) {
  json list = json::array();
  for (const auto& e : set.entries)
    list.push_back({{"energy", e.energy},
                    {"class", to_string(e.kind)},
                    {"residual", e.residual},
                    {"heuristic", e.heuristic}});
  return list;
}

RunSummary run_exceptional(const ExperimentConfig& cfg, Artifacts& out) {
  const auto p = cfg.params();
  p.only_keys({"w0", "w1", "lower", "upper", "scan_points"});
  const auto [w0, w1] = word_pair(cfg, "w0", "w1");
  ExceptionalOptions opts;
  if (p.has("lower")) opts.lower = p["lower"].number();
  if (p.has("upper")) opts.upper = p["upper"].number();
  opts.scan_points = p.count("scan_points", opts.scan_points);
  const auto set = exceptional_set(*cfg.model, w0, w1, opts);
  json r;
  r["w0"] = w0.values;
  r["w1"] = w1.values;
  r["entries"] = exceptional_json(set);
  r["energies"] = set.energies();
  out.report("exceptional.json", r);
  std::ostringstream line;
  line << "exceptional: " << set.entries.size() << " energies";
  return {line.str(), {}};
}

std::vector<double> default_exclusions(const WordModel& model) {
  if (!model.is_atomic()) return {};
  const auto nc = check_nc(model);
  if (!nc.witness) return {};
  return exceptional_set(model, nc.witness->first, nc.witness->second).energies();
}

RunSummary run_localize(const ExperimentConfig& cfg, Artifacts& out) {
  const auto p = cfg.params();
  p.only_keys({"box", "gamma_sites", "gamma_step", "bin_width", "exclude", "exclusion"});
  const std::size_t n = p.count("box", 2000);
  if (n < 100) p["box"].fail("box too small for decay fits (need >= 100 sites)");
  const std::uint64_t seed = cfg.require_seed();
  const auto box = FiniteBox::sample(*cfg.model, n, derive_seed(seed, {0}));
  const auto spectrum = diagonalize(box);

  const double step = p.number("gamma_step", 0.02);
  if (!(step > 0.0)) p["gamma_step"].fail("must be positive");
  EnergyCurve gamma;
  const double lo = spectrum.values.front(), hi = spectrum.values.back();
  const auto steps = static_cast<std::size_t>(std::ceil((hi - lo) / step));
  for (std::size_t i = 0; i <= steps; ++i)
    gamma.energies.push_back(std::min(hi, lo + step * static_cast<double>(i)));
  const auto estimates = gamma_sweep(*cfg.model, gamma.energies, p.count("gamma_sites", 100000),
                                     derive_seed(seed, {1}));
  for (const auto& e : estimates) gamma.values.push_back(e.value);

  const auto excluded = p.has("exclude") ? p["exclude"].numbers() : default_exclusions(*cfg.model);
  DecayOptions opts;
  opts.bin_width = p.number("bin_width", opts.bin_width);
  opts.exclusion = p.number("exclusion", opts.exclusion);
  const auto report = decay_report(box, spectrum, gamma, excluded, opts);

  std::vector<std::vector<double>> fit_rows;
  for (const auto& f : report.fits)
    fit_rows.push_back({f.energy, static_cast<double>(f.peak), f.rate(), gamma(f.energy)});
  out.csv("localize_fits.csv", {"energy", "peak", "rate", "gamma"}, fit_rows);
  std::vector<std::vector<double>> gamma_rows;
  for (std::size_t i = 0; i < gamma.energies.size(); ++i)
    gamma_rows.push_back({gamma.energies[i], gamma.values[i], estimates[i].std_error});
  out.csv("localize_gamma.csv", {"energy", "gamma", "gamma_stderr"}, gamma_rows);

  json r;
  r["box"] = n;
  r["excluded"] = excluded;
  r["fits"] = report.fits.size();
  r["max_relative_error"] = report.max_relative_error;
  r["bins"] = json::array();
  for (const auto& b : report.bins)
    r["bins"].push_back({{"lower", b.lower},
                         {"upper", b.upper},
                         {"count", b.count},
                         {"median_rate", b.median_rate},
                         {"gamma", b.gamma},
                         {"relative_error", b.relative_error}});
  out.report("localize.json", r);
  std::ostringstream line;
  line << "localize: " << report.fits.size() << " fits in " << report.bins.size()
       << " bins, max relative error " << report.max_relative_error;
  return {line.str(), {}};
}

RunSummary run_dynamics(const ExperimentConfig& cfg, Artifacts& out) {
  const auto p = cfg.params();
  p.only_keys({"box", "lower", "upper", "site", "p", "t_max", "time_points", "realizations",
               "slope_from", "boundary_tolerance"});
  const std::size_t n = p.count("box", 4000);
  const double lower = p["lower"].number(), upper = p["upper"].number();
  if (!(upper > lower)) p["upper"].fail("must exceed 'lower'");
  const std::size_t site = p.count("site", n / 2);
  const double moment = p.number("p", 2.0);
  if (!(moment > 0.0)) p["p"].fail("must be positive");
  const double t_max = p.number("t_max", 1000.0);
  if (!(t_max > 1.0)) p["t_max"].fail("must exceed 1");
  const std::size_t points = p.count("time_points", 41);
  if (points < 3) p["time_points"].fail("need at least three times");
  const std::size_t realizations = p.count("realizations", 16);
  const double slope_from = p.number("slope_from", t_max / 10.0);
  MomentOptions opts;
  opts.boundary_tolerance = p.number("boundary_tolerance", opts.boundary_tolerance);

  std::vector<double> times(points);
  for (std::size_t i = 0; i < points; ++i)
    times[i] = std::pow(t_max, static_cast<double>(i) / static_cast<double>(points - 1));
  const auto ens = ensemble_moments(*cfg.model, n, realizations, site, moment, lower, upper, times,
                                    cfg.require_seed(), opts);

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < points; ++i) rows.push_back({times[i], ens.typical[i], ens.mean[i], ens.sup[i]});
  out.csv("dynamics.csv", {"time", "typical", "mean", "sup"}, rows);

  json r;
  r["window"] = {lower, upper};
  r["box"] = n;
  r["site"] = site;
  r["p"] = moment;
  r["realizations"] = ens.realizations;
  r["skipped"] = ens.skipped;
  r["slope_from"] = slope_from;
  r["slope_typical"] = loglog_slope(ens.times, ens.typical, slope_from);
  r["slope_mean"] = loglog_slope(ens.times, ens.mean, slope_from);
  r["slope_sup"] = loglog_slope(ens.times, ens.sup, slope_from);
  r["empirical_sup"] = ens.sup.back();
  r["sample_mean_at_t_max"] = ens.mean.back();
  r["max_boundary_weight"] = ens.max_boundary_weight;
  r["note"] = "finite horizon t <= t_max and a finite disorder sample: the supremum over all times "
              "and the disorder expectation are not verified";
  out.report("dynamics.json", r);
  std::ostringstream line;
  line << "dynamics: window [" << lower << ", " << upper << "], typical slope "
       << r["slope_typical"].get<double>() << " over t >= " << slope_from;
  return {line.str(), {}};
}

RunSummary run_renewal(const ExperimentConfig& cfg, Artifacts& out) {
  const auto p = cfg.params();
  p.only_keys({"weights", "L"});
  std::vector<double> weights;
  if (p.has("weights")) {
    const auto w = p["weights"];
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double v = w[i].number();
      if (v < 0.0) w[i].fail("weight must be nonnegative");
      weights.push_back(v);
    }
  } else if (cfg.model) {
    weights = cfg.model->length_weights();
  } else {
    p["weights"].fail("give length weights or a model");
  }
  const std::size_t max_length = p.count("L", 60);
  RenewalSequence seq;
  try {
    seq = renewal_sequence(weights, max_length);
  } catch (const ConfigError& e) {
    p.has("weights") ? p["weights"].fail(e.what()) : p.fail(e.what());
  }
  const auto series = generating_coefficients(weights, max_length);
  const std::vector<double> tail(seq.values.begin() + 1, seq.values.end());
  const auto means = cesaro_mean(tail);

  std::vector<std::vector<double>> rows;
  double agreement = 0.0;
  for (std::size_t ell = 1; ell <= max_length; ++ell) {
    rows.push_back({static_cast<double>(ell), seq.values[ell], series[ell], means[ell - 1]});
    agreement = std::max(agreement, std::abs(seq.values[ell] - series[ell]));
  }
  out.csv("renewal.csv", {"ell", "A", "series", "cesaro"}, rows);
  json r;
  r["weights"] = weights;
  r["gcd"] = seq.gcd;
  r["limit_along_multiples"] = renewal_limit(weights);
  r["cesaro_limit"] = renewal_limit(weights) / static_cast<double>(seq.gcd);
  r["A_L"] = seq.values.back();
  r["cesaro_L"] = means.back();
  r["max_series_disagreement"] = agreement;
  out.report("renewal.json", r);
  std::ostringstream line;
  line << "renewal: gcd " << seq.gcd << ", A_" << max_length << " = " << format_number(seq.values.back())
       << ", limit " << format_number(renewal_limit(weights));
  return {line.str(), {}};
}

RunSummary run_mixing(const ExperimentConfig& cfg, Artifacts& out) {
  const auto p = cfg.params();
  p.only_keys({"A", "B", "ell_min", "ell_max", "trials"});
  const auto a = parse_cylinder(p["A"]);
  const auto b = p.has("B") ? parse_cylinder(p["B"]) : a;
  const std::size_t ell_min = p.count("ell_min", 0), ell_max = p.count("ell_max", 60);
  if (ell_max < ell_min) p["ell_max"].fail("must be at least ell_min");
  const std::size_t trials = p.count("trials", 100000);
  if (trials < kMinTrials) p["trials"].fail("need at least 10000 trials");
  const auto table = mixing_experiment(*cfg.model, a, b, ell_min, ell_max, trials, cfg.require_seed());

  std::vector<std::vector<double>> rows;
  std::size_t outside = 0;
  for (const auto& row : table.rows) {
    rows.push_back({static_cast<double>(row.ell), row.empirical, row.target, row.std_error});
    if (std::abs(row.empirical - row.target) > 3.0 * row.std_error) ++outside;
  }
  out.csv("mixing.csv", {"ell", "empirical", "target", "stderr"}, rows);
  json r;
  r["trials"] = table.trials;
  r["prob_A"] = table.prob_a;
  r["prob_B"] = table.prob_b;
  r["target"] = table.prob_a * table.prob_b;
  r["rows_outside_3sigma"] = outside;
  out.report("mixing.json", r);
  std::ostringstream line;
  line << "mixing: " << table.rows.size() << " shifts, " << outside << " outside 3 sigma of "
       << format_number(table.prob_a * table.prob_b);
  return {line.str(), {}};
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  Artifacts out(config, out_dir);
  RunSummary summary;
  const auto& t = config.task;
  if (t == "lyapunov") summary = run_lyapunov(config, out);
  else if (t == "bands") summary = run_bands(config, out);
  else if (t == "scatter") summary = run_scatter(config, out);
  else if (t == "exceptional") summary = run_exceptional(config, out);
  else if (t == "localize") summary = run_localize(config, out);
  else if (t == "dynamics") summary = run_dynamics(config, out);
  else if (t == "renewal") summary = run_renewal(config, out);
  else if (t == "mixing") summary = run_mixing(config, out);
  else throw ConfigError("unknown task '" + t + "'");
  summary.files = out.files;
  return summary;
}

}  // namespace randword
