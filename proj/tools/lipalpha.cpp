// lipalpha: command-line front door for the little-lip derivation lab.
//
// Exit codes:
//   0  success (verdict converged / certified / invariants hold)
//   1  configuration or schema error
//   2  precondition failure (infeasible schedule, aperture violation,
//      sequence left the domain, missing input)
//   3  inconclusive verdict
//   4  analytic invariant violated (the witness is printed)

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <string>

#include "lipalpha/content.hpp"
#include "lipalpha/diffquot.hpp"
#include "lipalpha/errors.hpp"
#include "lipalpha/estimates.hpp"
#include "lipalpha/function_space.hpp"
#include "lipalpha/geometry.hpp"
#include "lipalpha/io.hpp"
#include "lipalpha/numerics.hpp"
#include "lipalpha/pair_measure.hpp"
#include "lipalpha/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lipalpha;

namespace {

// Pinned thresholds for the assertable invariants.
constexpr double kSlopeThreshold = 0.05;
constexpr double kSeminormExcessThreshold = 1e-2;
constexpr double kFubiniRelErrThreshold = 1e-3;
constexpr double kFubiniOrderThreshold = 1.8;
constexpr double kIdentityRelThreshold = 1e-12;

struct Options {
  std::string config;
  std::string out = "out";
  std::string format = "csv,json";
  unsigned threads = 1;
  bool seed_set = false;
  std::uint64_t seed = 0;
};

struct Emit {
  bool csv = false, json_fmt = false, svg = false;
};

Emit parse_formats(const std::string& s) {
  Emit e;
  std::string token;
  std::stringstream ss(s);
  while (std::getline(ss, token, ',')) {
    if (token == "csv") e.csv = true;
    else if (token == "json") e.json_fmt = true;
    else if (token == "svg") e.svg = true;
    else throw ConfigError("unknown format '" + token + "'");
  }
  return e;
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& ctx) {
  if (!j.is_object()) throw ConfigError("expected an object at " + ctx);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key '" + it.key() + "' in " + ctx);
}

Complex complex_from(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 2)
    throw ConfigError("expected [re,im] at " + ctx);
  return {j[0].get<double>(), j[1].get<double>()};
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

const json& must(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
  return j.at(key);
}

struct Run {
  Options opts;
  Emit emit;
  json config;
  std::string config_text;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> input_hashes;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  fs::path out_dir() const { return fs::path(opts.out); }

  std::string resolve(const std::string& rel) const {
    fs::path p(rel);
    if (p.is_absolute()) return p.string();
    return (fs::path(opts.config).parent_path() / p).string();
  }

  void write(const std::string& name, const std::string& content) {
    atomic_write((out_dir() / name).string(), content);
  }

  void manifest(const std::map<std::string, std::string>& seeds) {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string s = std::string("{\"tool_version\": \"") + kToolVersion +
                    "\", \"config_hash\": \"" + fnv1a64_hex(config_text) + "\"";
    s += ", \"inputs\": {";
    bool first = true;
    for (const auto& [path, hash] : input_hashes) {
      if (!first) s += ", ";
      s += "\"" + path + "\": \"" + hash + "\"";
      first = false;
    }
    s += "}, \"wall_time_s\": " + fmt_double(wall) + ", \"seeds\": {";
    first = true;
    for (const auto& [k, v] : seeds) {
      if (!first) s += ", ";
      s += "\"" + k + "\": " + v;
      first = false;
    }
    s += "}}\n";
    write("manifest.json", s);
  }
};

RadiiSchedule parse_schedule(const json& j, const std::string& ctx) {
  check_keys(j,
             {"family", "scale", "ratio", "n_min", "n_max", "balls_per_annulus",
              "saturate_dyadic", "require_exact_budget", "angular_margin"},
             ctx);
  RadiiSchedule s;
  const std::string family = get_or<std::string>(j, "family", "geometric");
  if (family == "geometric") s.family = RadiiSchedule::Family::geometric;
  else if (family == "power") s.family = RadiiSchedule::Family::power;
  else throw ConfigError("schedule family must be 'geometric' or 'power'");
  s.scale = get_or<double>(j, "scale", 1.0);
  s.ratio = get_or<double>(j, "ratio", 0.5);
  s.n_min = get_or<int>(j, "n_min", 2);
  s.n_max = get_or<int>(j, "n_max", 20);
  s.balls_per_annulus = get_or<int>(j, "balls_per_annulus", 1);
  s.saturate_dyadic = get_or<bool>(j, "saturate_dyadic", false);
  s.require_exact_budget = get_or<bool>(j, "require_exact_budget", false);
  s.angular_margin = get_or<double>(j, "angular_margin", 0.7853981633974483);
  if (s.family == RadiiSchedule::Family::geometric && !(s.ratio > 0 && s.ratio < 1))
    throw ConfigError("schedule ratio must lie in (0,1)");
  return s;
}

DomainSpec load_domain(Run& run, const json& cfg) {
  const std::string path = run.resolve(must(cfg, "domain").get<std::string>());
  if (!fs::exists(path))
    throw std::runtime_error("domain file not found: " + path);
  const std::string text = read_file(path);
  run.input_hashes[must(cfg, "domain").get<std::string>()] = fnv1a64_hex(text);
  return domain_from_json(text);
}

TestFunction parse_function(const json& j, std::shared_ptr<const DomainSpec> domain,
                            const std::string& ctx) {
  check_keys(j, {"kernels", "poly", "cluster"}, ctx);
  if (j.contains("cluster")) {
    const json& c = j.at("cluster");
    check_keys(c, {"ratio", "scale", "schedule"}, ctx + ".cluster");
    ClusterRule rule;
    rule.ratio = get_or<double>(c, "ratio", 0.03125);
    rule.scale = get_or<double>(c, "scale", 1.0);
    if (!c.contains("schedule"))
      throw ConfigError("cluster rule needs the design schedule for its tails");
    rule.schedule = parse_schedule(c.at("schedule"), ctx + ".cluster.schedule");
    return build_cluster_function(std::move(domain), rule);
  }
  std::vector<KernelTerm> kernels;
  if (j.contains("kernels")) {
    for (const auto& k : j.at("kernels")) {
      check_keys(k, {"pole", "order", "coeff"}, ctx + ".kernels[]");
      kernels.push_back({complex_from(k.at("pole"), ctx),
                         get_or<int>(k, "order", 1),
                         complex_from(k.at("coeff"), ctx)});
    }
  }
  std::vector<Complex> poly;
  if (j.contains("poly"))
    for (const auto& p : j.at("poly")) poly.push_back(complex_from(p, ctx + ".poly"));
  return make_test_function(std::move(domain), std::move(kernels), std::move(poly));
}

RayScanSpec parse_scan(const json& j, const DomainSpec& d, const std::string& ctx) {
  check_keys(j, {"theta", "r_hi", "r_lo", "count"}, ctx);
  RayScanSpec spec;
  spec.theta = get_or<double>(j, "theta", d.probe.theta);
  spec.r_hi = get_or<double>(j, "r_hi", 0.3);
  spec.r_lo = get_or<double>(j, "r_lo", 1e-6);
  spec.count = get_or<int>(j, "count", 50);
  return spec;
}

std::vector<PairMeasure> parse_measures(Run& run, const json& j, const DomainSpec& d,
                                        const std::string& ctx) {
  check_keys(j, {"random", "file"}, ctx);
  std::vector<PairMeasure> out;
  if (j.contains("file")) {
    const std::string path = run.resolve(j.at("file").get<std::string>());
    const std::string text = read_file(path);
    run.input_hashes[j.at("file").get<std::string>()] = fnv1a64_hex(text);
    out.push_back(pair_measure_from_json(text, d));
    return out;
  }
  const json& r = must(j, "random");
  check_keys(r, {"atoms", "count", "seed"}, ctx + ".random");
  const int atoms = get_or<int>(r, "atoms", 20);
  const int count = get_or<int>(r, "count", 1);
  const std::uint64_t seed = get_or<std::uint64_t>(r, "seed", run.seed);
  for (int i = 0; i < count; ++i)
    out.push_back(random_pair_measure(d, atoms, split_seed(seed, 40 + i)));
  return out;
}

// ---------------------------------------------------------------------------

int cmd_design(Run& run) {
  const json& cfg = run.config;
  check_keys(cfg,
             {"alpha", "outer", "b", "probe_theta", "seed", "n_max_series",
              "schedule"},
             "design config");
  const double alpha = must(cfg, "alpha").get<double>();
  const json& outer_j = must(cfg, "outer");
  check_keys(outer_j, {"center", "radius"}, "design.outer");
  const ClosedBall outer{complex_from(must(outer_j, "center"), "outer.center"),
                         must(outer_j, "radius").get<double>()};
  const Complex b = complex_from(must(cfg, "b"), "b");
  const double probe_theta = get_or<double>(cfg, "probe_theta", 0.0);
  const RadiiSchedule schedule = parse_schedule(must(cfg, "schedule"), "schedule");
  const int n_max = get_or<int>(cfg, "n_max_series", schedule.n_max);

  DomainSpec d;
  try {
    d = design_domain(alpha, schedule, outer, b, run.seed, probe_theta);
  } catch (const InfeasibleSchedule& e) {
    std::cerr << "infeasible schedule at n=" << e.n << ": " << e.what() << "\n";
    return 2;
  }
  const WienerReport report = wiener_series(d, n_max, schedule);

  run.write("domain.json", domain_to_json(d));
  if (run.emit.csv) run.write("wiener.csv", wiener_to_csv(report));
  if (run.emit.json_fmt) run.write("wiener.json", wiener_to_json(report));
  if (run.emit.svg) {
    SvgSeries s{"4^n * content bound", "#1f77b4", {}};
    for (const auto& t : report.terms)
      s.points.emplace_back(std::ldexp(1.0, -t.n), std::max(t.term, 0.0));
    run.write("wiener.svg",
              svg_loglog("Wiener-type series terms", "2^-n", "term", {s}));
  }
  run.manifest({{"design", std::to_string(run.seed)}});
  std::cout << "design: verdict " << verdict_name(report.verdict)
            << ", partial_sum " << fmt_double(report.partial_sum) << "\n";
  return report.verdict == WienerVerdict::certified_convergent ? 0 : 3;
}

int cmd_wiener(Run& run) {
  const json& cfg = run.config;
  check_keys(cfg, {"domain", "n_max", "schedule"}, "wiener config");
  const DomainSpec d = load_domain(run, cfg);
  const int n_max = get_or<int>(cfg, "n_max", 24);
  std::optional<RadiiSchedule> schedule;
  if (cfg.contains("schedule"))
    schedule = parse_schedule(cfg.at("schedule"), "schedule");
  const WienerReport report = wiener_series(d, n_max, schedule);
  if (run.emit.csv) run.write("wiener.csv", wiener_to_csv(report));
  if (run.emit.json_fmt) run.write("wiener.json", wiener_to_json(report));
  run.manifest({});
  std::cout << "wiener: verdict " << verdict_name(report.verdict) << "\n";
  return report.verdict == WienerVerdict::certified_convergent ? 0 : 3;
}

int cmd_diffquot(Run& run) {
  const json& cfg = run.config;
  check_keys(cfg, {"domain", "function", "ray", "tol", "seed"}, "diffquot config");
  const DomainSpec d = load_domain(run, cfg);
  auto domain = std::make_shared<const DomainSpec>(d);
  const TestFunction f = parse_function(must(cfg, "function"), domain, "function");

  const json& ray_j = must(cfg, "ray");
  check_keys(ray_j, {"theta", "t", "r_max", "r0", "rho", "count"}, "ray");
  ExperimentConfig ec;
  ec.domain = d;
  ec.f = f;
  ec.ray.b = d.b;
  ec.ray.theta = get_or<double>(ray_j, "theta", d.probe.theta);
  ec.ray.t = get_or<double>(ray_j, "t", d.probe.t);
  ec.ray.r_max = get_or<double>(ray_j, "r_max", d.probe.eps_hi);
  ec.r0 = get_or<double>(ray_j, "r0", 0.3);
  ec.rho = get_or<double>(ray_j, "rho", 0.5);
  ec.count = get_or<int>(ray_j, "count", 25);
  ec.tol = get_or<double>(cfg, "tol", f.tail ? 1e-3 : 1e-6);
  ec.seed = run.seed;

  const ConvergenceReport report = run_experiment(ec);
  if (run.emit.csv) run.write("quotients.csv", quotients_to_csv(report.records, d.b));
  if (run.emit.json_fmt) {
    run.write("convergence.json", convergence_to_json(report));
    run.write("function.json", test_function_to_json(f));
  }
  if (run.emit.svg) {
    SvgSeries s{"|q_n - oracle|", "#d62728", {}};
    for (const auto& rec : report.records)
      s.points.emplace_back(std::abs(rec.z_n - d.b), rec.err_n);
    run.write("error.svg",
              svg_loglog("difference-quotient error", "r", "error", {s}));
  }
  run.manifest({{"experiment", std::to_string(run.seed)}});
  std::cout << "diffquot: verdict " << verdict_name(report.verdict)
            << ", final_err " << fmt_double(report.final_err) << "\n";
  switch (report.verdict) {
    case ConvergenceVerdict::converged: return 0;
    case ConvergenceVerdict::inconclusive: return 3;
    case ConvergenceVerdict::not_converged: return 4;
  }
  return 3;
}

int cmd_lemmas(Run& run) {
  const json& cfg = run.config;
  check_keys(cfg, {"domain", "measure", "g", "t", "scan"}, "lemmas config");
  const DomainSpec d = load_domain(run, cfg);
  auto domain = std::make_shared<const DomainSpec>(d);
  const double t = get_or<double>(cfg, "t", 0.5);
  const RayScanSpec spec = cfg.contains("scan")
                               ? parse_scan(cfg.at("scan"), d, "scan")
                               : RayScanSpec{d.probe.theta, 0.3, 1e-6, 50};
  TestFunction g =
      cfg.contains("g")
          ? parse_function(cfg.at("g"), domain, "g")
          : make_test_function(domain, {}, {Complex(0.0), Complex(1.0)});  // z-b

  const std::vector<PairMeasure> measures =
      parse_measures(run, must(cfg, "measure"), d, "measure");

  // CI fault-injection hook: corrupts the reported transform growth so the
  // exit-4 path stays machine-testable end to end.
  const bool fault = std::getenv("LIPALPHA_FAULT_INJECT_H") != nullptr;

  const double kappa = lip_bounds(g).kappa_bar;
  bool ok = true;
  std::string witness;
  std::string summary = "[";
  for (std::size_t mi = 0; mi < measures.size(); ++mi) {
    const PairMeasure& mu = measures[mi];
    RatioScan scans[3] = {scan_L1(mu, g, t, d, spec, run.opts.threads),
                          scan_L2(mu, g, t, d, spec, run.opts.threads),
                          scan_L3(mu, t, d, spec, run.opts.threads)};
    if (fault) {
      for (auto& scan : scans) {
        scan.sup_ratio = 0.0;
        std::vector<double> x, y;
        for (auto& p : scan.points) {
          p.ratio *= (spec.r_hi / p.r) * (spec.r_hi / p.r);
          scan.sup_ratio = std::max(scan.sup_ratio, p.ratio);
          if (p.ratio > 0.0) {
            x.push_back(std::log(1.0 / p.r));
            y.push_back(std::log(p.ratio));
          }
        }
        scan.loglog_slope = x.size() >= 2 ? least_squares_slope(x, y) : 0.0;
      }
    }
    const ActionSplit split = module_action(g, mu);
    const double lambda_norm = split.S2.total_variation();
    const double mu_norm = mu.total_variation();
    for (const auto& scan : scans) {
      const std::string tag =
          std::string(lemma_name(scan.lemma)) + "_" + std::to_string(mi);
      if (run.emit.csv) run.write("scan_" + tag + ".csv", scan_to_csv(scan));
      if (mi > 0 || &scan != &scans[0]) summary += ", ";
      std::string one = scan_to_json(scan);
      if (!one.empty() && one.back() == '\n') one.pop_back();
      summary += one;
      if (!std::isfinite(scan.sup_ratio) || scan.loglog_slope > kSlopeThreshold) {
        ok = false;
        const ScanPoint* worst = nullptr;
        for (const auto& p : scan.points)
          if (!worst || p.ratio > worst->ratio) worst = &p;
        witness = std::string("lemma ") + lemma_name(scan.lemma) + " measure " +
                  std::to_string(mi) + ": slope " + fmt_double(scan.loglog_slope) +
                  ", worst point r=" + (worst ? fmt_double(worst->r) : "?") +
                  " ratio=" + (worst ? fmt_double(worst->ratio) : "?");
      }
    }
    if (lambda_norm > kappa * mu_norm * (1.0 + 1e-12)) {
      ok = false;
      witness = "residual norm bound: ||lambda|| = " + fmt_double(lambda_norm) +
                " > kappa_bar(g)*||mu|| = " + fmt_double(kappa * mu_norm);
    }
    if (mi == 0 && run.emit.csv) {
      std::vector<Complex> field_points;
      const Complex dir = std::polar(1.0, spec.theta);
      double r = spec.r_hi;
      const double step =
          std::pow(spec.r_lo / spec.r_hi, 1.0 / static_cast<double>(spec.count - 1));
      for (int i = 0; i < spec.count; ++i, r *= step)
        field_points.push_back(d.b + r * dir);
      run.write("transform_field.csv", transform_field_csv(mu, d, field_points));
    }
    if (mi == 0 && run.emit.svg) {
      std::vector<SvgSeries> series;
      const char* colors[3] = {"#1f77b4", "#2ca02c", "#d62728"};
      for (int si = 0; si < 3; ++si) {
        SvgSeries s{lemma_name(scans[si].lemma), colors[si], {}};
        for (const auto& p : scans[si].points) s.points.emplace_back(p.r, p.ratio);
        series.push_back(std::move(s));
      }
      run.write("lemma_ratios.svg",
                svg_loglog("transform growth ratios", "r = |a-b|", "ratio", series));
    }
  }
  summary += "]";
  if (run.emit.json_fmt) run.write("lemmas.json", summary + "\n");
  run.manifest({});
  if (!ok) {
    std::cout << "lemma invariant violated; witness: " << witness << "\n";
    return 4;
  }
  std::cout << "lemmas: all scans bounded (slope <= " << kSlopeThreshold << ")\n";
  return 0;
}

int cmd_seminorm(Run& run) {
  const json& cfg = run.config;
  check_keys(cfg, {"domain", "function", "samples", "seed"}, "seminorm config");
  const DomainSpec d = load_domain(run, cfg);
  auto domain = std::make_shared<const DomainSpec>(d);
  const TestFunction f = parse_function(must(cfg, "function"), domain, "function");
  const long samples = get_or<long>(cfg, "samples", 100000);
  const SeminormCheck check =
      boundary_seminorm_check(f, samples, run.seed, run.opts.threads);
  if (run.emit.json_fmt) run.write("seminorm.json", seminorm_to_json(check));
  run.manifest({{"seminorm", std::to_string(run.seed)}});
  const bool ok = check.sup_xx == 0.0
                      ? check.sup_yy <= 1e-12
                      : check.interior_excess / check.sup_xx < kSeminormExcessThreshold;
  std::cout << "seminorm: sup_XX " << fmt_double(check.sup_xx) << ", excess "
            << fmt_double(check.interior_excess) << (ok ? " (ok)" : " (violated)")
            << "\n";
  if (!ok) {
    std::cout << "boundary-seminorm invariant violated; witness: sup_YY="
              << fmt_double(check.sup_yy) << " sup_XX=" << fmt_double(check.sup_xx)
              << "\n";
    return 4;
  }
  return 0;
}

int cmd_fubini(Run& run) {
  const json& cfg = run.config;
  check_keys(cfg, {"domain", "measure", "bump", "grid", "refine", "seed"},
             "fubini config");
  const DomainSpec d = load_domain(run, cfg);
  const std::vector<PairMeasure> measures =
      parse_measures(run, must(cfg, "measure"), d, "measure");
  const json& bump_j = must(cfg, "bump");
  check_keys(bump_j, {"center", "radius", "amplitude"}, "bump");
  BumpSpec bump;
  bump.center = complex_from(must(bump_j, "center"), "bump.center");
  bump.radius = get_or<double>(bump_j, "radius", 0.25);
  bump.amplitude = get_or<double>(bump_j, "amplitude", 1.0);
  GridSpec grid;
  if (cfg.contains("grid")) {
    check_keys(cfg.at("grid"), {"n", "margin"}, "grid");
    grid.n = get_or<int>(cfg.at("grid"), "n", 512);
    grid.margin = get_or<double>(cfg.at("grid"), "margin", 0.05);
  }

  bool ok = true;
  std::string witness;
  std::string out_json;
  for (std::size_t mi = 0; mi < measures.size(); ++mi) {
    const FubiniResult result =
        fubini_consistency(measures[mi], bump, grid, run.opts.threads);
    std::optional<FubiniRefinement> refinement;
    if (cfg.contains("refine")) {
      std::vector<int> grids;
      for (const auto& g : cfg.at("refine")) grids.push_back(g.get<int>());
      refinement = fubini_refinement(measures[mi], bump, grids, grid.margin,
                                     run.opts.threads);
      if (refinement->order < kFubiniOrderThreshold) {
        ok = false;
        witness = "refinement order " + fmt_double(refinement->order) + " < " +
                  fmt_double(kFubiniOrderThreshold);
      }
    }
    if (!result.vacuous && result.rel_err >= kFubiniRelErrThreshold) {
      ok = false;
      witness = "rel_err " + fmt_double(result.rel_err) + " at measure " +
                std::to_string(mi);
    }
    out_json += fubini_to_json(result, refinement ? &*refinement : nullptr);
  }
  if (run.emit.json_fmt) run.write("fubini.json", out_json);
  run.manifest({});
  if (!ok) {
    std::cout << "Fubini identity violated; witness: " << witness << "\n";
    return 4;
  }
  std::cout << "fubini: identity holds (rel_err < " << kFubiniRelErrThreshold
            << ")\n";
  return 0;
}

int cmd_identity(Run& run) {
  const json& cfg = run.config;
  check_keys(cfg, {"domain", "trials", "seed"}, "identity config");
  const DomainSpec d = load_domain(run, cfg);
  const long trials = get_or<long>(cfg, "trials", 100);
  const IdentityReport report = identity_E_a_report(d, trials, run.seed);
  if (run.emit.json_fmt) run.write("identity.json", identity_to_json(report));
  run.manifest({{"identity", std::to_string(run.seed)}});
  if (report.max_rel_discrepancy >= kIdentityRelThreshold) {
    std::cout << "E_a identity violated; witness: max relative discrepancy "
              << fmt_double(report.max_rel_discrepancy) << "\n";
    return 4;
  }
  std::cout << "identity: dual paths agree to "
            << fmt_double(report.max_rel_discrepancy) << " relative\n";
  return 0;
}

int cmd_that(Run& run) {
  const json& cfg = run.config;
  check_keys(cfg, {"domain", "degree", "pairs", "seed", "scan"}, "that config");
  const DomainSpec d = load_domain(run, cfg);
  const int degree = get_or<int>(cfg, "degree", 3);
  const int n_pairs = get_or<int>(cfg, "pairs", 16);
  const RayScanSpec spec = cfg.contains("scan")
                               ? parse_scan(cfg.at("scan"), d, "scan")
                               : RayScanSpec{d.probe.theta, 0.3, 1e-3, 30};
  const auto pairs = random_boundary_pairs(d, n_pairs, split_seed(run.seed, 4), 0.05);
  const PairMeasure mu = moment_match(d, pairs, degree);
  const THatDiagnostic diag = t_hat_diagnostic(mu, d, spec);
  if (run.emit.csv) run.write("that.csv", t_hat_to_csv(diag));
  if (run.emit.json_fmt) run.write("that.json", t_hat_to_json(diag));
  if (run.emit.svg) {
    SvgSeries s1{"|T-hat - 1|", "#1f77b4", {}};
    SvgSeries s2{"r^(1-alpha)", "#7f7f7f", {}};
    for (const auto& p : diag.points) {
      s1.points.emplace_back(p.r, p.t_hat_minus_1);
      s2.points.emplace_back(p.r, p.reference);
    }
    run.write("that.svg", svg_loglog("T-hat diagnostic", "r", "value", {s1, s2}));
  }
  run.manifest({{"that", std::to_string(run.seed)}});
  std::cout << "that: diagnostic emitted, trend_flag "
            << (diag.trend_flag ? "true" : "false") << "\n";
  return 0;  // diagnostics never affect the exit code
}

int dispatch(const std::string& cmd, Run& run) {
  if (cmd == "design") return cmd_design(run);
  if (cmd == "wiener") return cmd_wiener(run);
  if (cmd == "diffquot") return cmd_diffquot(run);
  if (cmd == "lemmas") return cmd_lemmas(run);
  if (cmd == "seminorm") return cmd_seminorm(run);
  if (cmd == "fubini") return cmd_fubini(run);
  if (cmd == "identity") return cmd_identity(run);
  if (cmd == "that") return cmd_that(run);
  throw ConfigError("unknown command " + cmd);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lipalpha: point-derivation certification and difference-quotient lab"};
  app.require_subcommand(1);

  Options opts;
  std::string seed_str;
  for (const char* name :
       {"design", "wiener", "diffquot", "lemmas", "seminorm", "fubini", "identity",
        "that"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config, "JSON config file")->required();
    sub->add_option("--out", opts.out, "output directory");
    sub->add_option("--seed", seed_str, "master seed override (u64)");
    sub->add_option("--format", opts.format, "comma list of csv,json,svg");
    sub->add_option("--threads", opts.threads, "worker threads");
  }

  CLI11_PARSE(app, argc, argv);

  Run run;
  run.opts = opts;

  try {
    if (!seed_str.empty()) {
      run.opts.seed_set = true;
      try {
        run.opts.seed = std::stoull(seed_str);
      } catch (const std::exception&) {
        throw ConfigError("--seed must be an unsigned 64-bit integer");
      }
    }
    run.emit = parse_formats(opts.format);
    run.config_text = read_file(opts.config);
    try {
      run.config = json::parse(run.config_text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config parse error: ") + e.what());
    }
    run.seed = run.opts.seed_set ? run.opts.seed
                                 : get_or<std::uint64_t>(run.config, "seed", 1);
    const std::string cmd = app.get_subcommands().front()->get_name();
    return dispatch(cmd, run);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const InfeasibleSchedule& e) {
    std::cerr << "infeasible schedule at n=" << e.n << ": " << e.what() << "\n";
    return 2;
  } catch (const ApertureViolated& e) {
    std::cerr << "aperture violated at index " << e.index << ": " << e.what() << "\n";
    return 2;
  } catch (const SequenceLeftDomain& e) {
    std::cerr << "sequence left domain at index " << e.index << ": " << e.what()
              << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
