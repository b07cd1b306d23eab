// Acceptance suite: one pass/fail line per criterion, every tolerance pinned
// in code. Run directly or through ctest.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "lipalpha/content.hpp"
#include "lipalpha/diffquot.hpp"
#include "lipalpha/estimates.hpp"
#include "lipalpha/function_space.hpp"
#include "lipalpha/geometry.hpp"
#include "lipalpha/io.hpp"
#include "lipalpha/pair_measure.hpp"
#include "lipalpha/rng.hpp"
#include "test_support.hpp"

using namespace lipalpha;
using namespace lipalpha::testing;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int id;
  std::string name;
  bool pass = true;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back(what);
    }
  }

  ~Criterion() {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", id, name.c_str());
    for (const auto& n : notes) std::printf("       - %s\n", n.c_str());
    std::fflush(stdout);
  }
};

ExperimentConfig ray_experiment(const DomainSpec& d, TestFunction f, double r0,
                                double rho, int count, double tol) {
  ExperimentConfig cfg;
  cfg.domain = d;
  cfg.f = std::move(f);
  cfg.ray = {d.b, d.probe.theta, std::min(0.5, d.probe.t), d.probe.eps_hi};
  cfg.r0 = r0;
  cfg.rho = rho;
  cfg.count = count;
  cfg.tol = tol;
  return cfg;
}

}  // namespace

TEST_CASE("criterion 1: Wiener certification of the designed domain") {
  Criterion c{1, "Wiener certification (budgets exact, closed-form partial sum)"};

  // (a) one requested ball per annulus on [2,20]; budgets hold with
  // nonnegative slack, exactly saturated where the budget radius is dyadic
  {
    const DomainSpec d = design_domain(0.5, dyadic_schedule(2, 20, 1),
                                       {Complex(0.0), 1.0}, Complex(0.0), 3);
    for (int n = 0; n <= 20; ++n) {
      double sum = 0.0;
      for (const auto& ball : balls_meeting_annulus(d, n))
        sum += ball.radius * std::sqrt(ball.radius);  // independent recomputation
      const double budget = std::ldexp(1.0, -3 * n);  // s_n/4^n = 8^-n
      c.expect(sum <= budget, "k=1 design: budget exceeded at n=" + std::to_string(n));
      if (n >= 3 && n <= 20)
        c.expect(sum == budget,
                 "k=1 design: dyadic saturation missed at n=" + std::to_string(n));
    }
    const WienerReport r = wiener_series(d, 20, dyadic_schedule(2, 20, 1));
    c.expect(r.verdict == WienerVerdict::certified_convergent,
             "k=1 design: verdict not certified-convergent");
  }

  // (b) the budget-saturating design: every term is exactly 2^-n and the
  // partial sum matches the closed form 2 - 2^-n_max to 1e-12
  {
    const int n_max = 24;
    const DomainSpec d = saturated_design(n_max);
    for (int n = 1; n <= n_max; ++n) {
      double sum = 0.0;
      for (const auto& ball : balls_meeting_annulus(d, n))
        sum += ball.radius * std::sqrt(ball.radius);
      c.expect(sum == std::ldexp(1.0, -3 * n),
               "saturated design: budget not exact at n=" + std::to_string(n));
    }
    const WienerReport r =
        wiener_series(d, n_max, dyadic_schedule(1, n_max, 1, true));
    c.expect(std::abs(r.partial_sum - (2.0 - std::ldexp(1.0, -n_max))) < 1e-12,
             "partial sum deviates from 2 - 2^-n_max: got " +
                 fmt_double(r.partial_sum));
    c.expect(r.verdict == WienerVerdict::certified_convergent,
             "saturated design: verdict not certified-convergent");
  }

  CHECK(c.pass);
}

TEST_CASE("criterion 2: theorem on the dense subalgebra (Cauchy kernel)") {
  Criterion c{2, "difference quotients of 1/(z-a) reach -1/(b-a)^2 at order ~1"};
  const DomainSpec d = one_ball_domain();
  const TestFunction f = make_test_function(
      shared(one_ball_domain()), {{Complex(0.5, 0.0), 1, Complex(1.0)}}, {});
  const Complex oracle = -1.0 / ((d.b - Complex(0.5, 0.0)) * (d.b - Complex(0.5, 0.0)));

  const ExperimentConfig cfg = ray_experiment(d, f, 0.5, 0.5, 20, 1e-4);
  const auto records = run_quotients(cfg);
  const ConvergenceReport r = convergence_report(records, oracle, 1e-4, 0.5);

  const double r_final = std::abs(records.back().z_n - d.b);
  c.expect(r_final < 1.05e-6, "final radius not below 1e-6: " + fmt_double(r_final));
  c.expect(r.final_err < 1e-4,
           "final quotient error " + fmt_double(r.final_err) + " >= 1e-4");
  c.expect(r.empirical_order >= 0.9 && r.empirical_order <= 1.1,
           "empirical order " + fmt_double(r.empirical_order) + " outside [0.9,1.1]");
  CHECK(c.pass);
}

TEST_CASE("criterion 3: theorem at a non-removable boundary point") {
  Criterion c{3, "clustering function converges against the certified oracle"};
  const DomainSpec d = saturated_design(24);
  c.expect(removability_flag(d), "designed domain should flag non-removability");

  ClusterRule rule;
  rule.ratio = 0.03125;
  rule.scale = 1.0;
  rule.schedule = dyadic_schedule(1, 24, 1, true);
  const TestFunction f = build_cluster_function(shared(saturated_design(24)), rule);
  c.expect(f.tail.has_value() && f.tail->oracle_tail < 1e-8,
           "oracle tail not certified below 1e-8");

  const ConvergenceReport r = run_experiment(ray_experiment(d, f, 0.3, 0.5, 16, 1e-3));
  const double r_final = std::abs(r.records.back().z_n - d.b);
  c.expect(r_final < 1.05e-5, "final radius not at the 1e-5 scale");
  c.expect(r.final_err < 1e-3,
           "final error " + fmt_double(r.final_err) + " >= 1e-3");
  c.expect(r.verdict == ConvergenceVerdict::converged, "verdict not converged");
  CHECK(c.pass);
}

TEST_CASE("criterion 4: identity exactness") {
  Criterion c{4, "q = 1 for f = z; split and E_a identities at rounding level"};
  const DomainSpec d = two_ball_domain();
  auto dp = shared(two_ball_domain());

  const auto records = run_quotients(
      ray_experiment(d, identity_function(dp), 0.3, 0.5, 20, 1e-6));
  for (const auto& rec : records)
    c.expect(std::abs(rec.q_n - Complex(1.0)) < 1e-12,
             "quotient of f = z off unity at n=" + std::to_string(rec.n));

  // module-action split identity, 100 random trials
  Rng rng(404);
  double worst_split = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const PairMeasure mu = random_pair_measure(d, 10, 7000 + trial);
    const TestFunction gt = make_test_function(
        dp, {},
        {Complex(0.0), Complex(rng.uniform(-1, 1), rng.uniform(-1, 1)),
         Complex(rng.uniform(-1, 1), rng.uniform(-1, 1))});
    const Complex pole(rng.uniform(1.5, 2.5), rng.uniform(-1.0, 1.0));
    auto phi = [&](Complex z) { return 1.0 / (z - pole) + z * z; };
    const ActionSplit split = module_action(gt, mu);
    const Complex lhs = apply_T1(split.S1, phi) + apply_scalar(split.S2, phi);
    const Complex rhs = apply_T1(mu, [&](Complex z) { return eval(gt, z) * phi(z); });
    worst_split = std::max(worst_split,
                           std::abs(lhs - rhs) / std::max(1e-300, std::abs(rhs)));
  }
  c.expect(worst_split < 1e-12,
           "split identity relative discrepancy " + fmt_double(worst_split));

  const IdentityReport ea = identity_E_a_report(d, 100, 2025);
  c.expect(ea.max_rel_discrepancy < 1e-12,
           "E_a dual-path relative discrepancy " + fmt_double(ea.max_rel_discrepancy));
  CHECK(c.pass);
}

TEST_CASE("criterion 5: transform inequalities") {
  Criterion c{5, "pi|H| <= H-tilde and the scalar transform bound, no violations"};
  const DomainSpec d = two_ball_domain();
  auto dp = shared(two_ball_domain());
  const TestFunction g = make_test_function(dp, {}, {Complex(0.0), Complex(1.0)});

  long violations_pair = 0, violations_scalar = 0;
  for (int mi = 0; mi < 20; ++mi) {
    const PairMeasure mu = random_pair_measure(d, 20, 8000 + mi);
    const ScalarMeasure lambda = module_action(g, mu).S2;
    const double tv = lambda.total_variation();
    Rng rng(9000 + mi);
    for (int k = 0; k < 10000; ++k) {
      const Complex a = rng.in_disk(Complex(0.0), 2.0);
      if (dist_to_atoms(mu, a) < 1e-9) continue;
      if (kPi * std::abs(cauchy_H(mu, a)) >
          cauchy_H_majorant(mu, a) * (1.0 + 1e-12))
        ++violations_pair;
      const double da = dist_to_atoms(lambda, a);
      if (da < 1e-9) continue;
      if (std::abs(cauchy_scalar(lambda, a)) > tv / da * (1.0 + 1e-12))
        ++violations_scalar;
    }
  }
  c.expect(violations_pair == 0,
           std::to_string(violations_pair) + " majorant violations");
  c.expect(violations_scalar == 0,
           std::to_string(violations_scalar) + " scalar-bound violations");
  CHECK(c.pass);
}

TEST_CASE("criterion 6: growth lemma scans") {
  Criterion c{6, "L1/L2/L3 ray scans bounded (slope <= 0.05), residual norm bound"};
  const DomainSpec d = two_ball_domain();
  auto dp = shared(two_ball_domain());
  const TestFunction g = make_test_function(dp, {}, {Complex(0.0), Complex(1.0)});
  const RayScanSpec spec{kPi, 0.3, 1e-6, 50};
  const double kappa = lip_bounds(g).kappa_bar;

  for (int mi = 0; mi < 10; ++mi) {
    const PairMeasure mu = random_pair_measure(d, 20, 8100 + mi);
    const RatioScan scans[3] = {scan_L1(mu, g, 0.5, d, spec),
                                scan_L2(mu, g, 0.5, d, spec),
                                scan_L3(mu, 0.5, d, spec)};
    for (const auto& scan : scans) {
      c.expect(std::isfinite(scan.sup_ratio),
               std::string(lemma_name(scan.lemma)) + ": sup ratio not finite");
      c.expect(scan.loglog_slope <= 0.05,
               std::string(lemma_name(scan.lemma)) + " measure " +
                   std::to_string(mi) + ": slope " + fmt_double(scan.loglog_slope));
    }
    const ActionSplit split = module_action(g, mu);
    c.expect(split.S2.total_variation() <=
                 kappa * mu.total_variation() * (1.0 + 1e-12),
             "residual norm bound violated at measure " + std::to_string(mi));
  }
  CHECK(c.pass);
}

TEST_CASE("criterion 7: boundary-seminorm comparison") {
  Criterion c{7, "interior excess below 1e-2 of the boundary sup at 1e5 samples"};
  const DomainSpec d = saturated_design(16);
  auto dp = shared(saturated_design(16));

  std::vector<std::pair<std::string, TestFunction>> functions;
  functions.emplace_back("z", identity_function(dp));
  functions.emplace_back(
      "kernel", make_test_function(dp, {{d.balls.front().center, 1, Complex(1.0)}}, {}));
  functions.emplace_back(
      "cubic", make_test_function(dp, {},
                                  {Complex(0.0), Complex(1.0), Complex(0.3),
                                   Complex(0.0, -0.2)}));

  for (const auto& [name, f] : functions) {
    const SeminormCheck check = boundary_seminorm_check(f, 100000, 31, 4);
    c.expect(check.sup_xx > 0.0, name + ": boundary sup vanished");
    c.expect(check.interior_excess < 1e-2 * check.sup_xx,
             name + ": excess/sup_XX = " +
                 fmt_double(check.interior_excess / check.sup_xx));
  }
  CHECK(c.pass);
}

TEST_CASE("criterion 8: Fubini identity for the transform field") {
  Criterion c{8, "quadrature consistency below 1e-3 with refinement order >= 1.8"};
  const DomainSpec d = two_ball_domain();
  const BumpSpec bump{Complex(-0.4, -0.4), 0.25, 1.0};

  const PairMeasure single(d, {{Complex(1.0, 0.0), Complex(-1.0, 0.0), Complex(1.0)}});
  const PairMeasure many = random_pair_measure(d, 20, 808);

  for (const PairMeasure* mu : {&single, &many}) {
    const FubiniResult at512 = fubini_consistency(*mu, bump, GridSpec{512, 0.05}, 4);
    c.expect(!at512.vacuous, "512-grid comparison came out vacuous");
    c.expect(at512.rel_err < 1e-3,
             "512-grid rel_err " + fmt_double(at512.rel_err));
    const FubiniRefinement ref =
        fubini_refinement(*mu, bump, {32, 64, 128}, 0.05, 4);
    c.expect(ref.order >= 1.8, "refinement order " + fmt_double(ref.order));
  }
  CHECK(c.pass);
}

TEST_CASE("criterion 9: far-field decay of moment-matched transforms") {
  Criterion c{9, "a^2 pi H(a) within 1e-2 of 1 at |a| = 1000 diam on three rays"};
  const DomainSpec d = two_ball_domain();
  const auto pairs = random_boundary_pairs(d, 8, 909, 0.15);
  const PairMeasure mu = moment_match(d, pairs, 1);
  const double diam = 2.0 * d.outer.radius;
  for (double theta : {0.3, 2.2, 4.5}) {
    const Complex a = 1000.0 * diam * std::polar(1.0, theta);
    const double dev = std::abs(a * a * kPi * cauchy_H(mu, a) - Complex(1.0));
    c.expect(dev < 1e-2, "deviation " + fmt_double(dev) + " on ray theta=" +
                             fmt_double(theta));
  }
  CHECK(c.pass);
}

namespace {

int run_cli(const std::string& cli, const std::string& args, const std::string& log) {
  const std::string cmd = cli + " " + args + " > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (!WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

}  // namespace

TEST_CASE("criterion 10: byte-determinism across worker threads") {
  Criterion c{10, "CLI report bundle byte-identical at 1, 4 and 8 threads"};
  const char* cli_env = std::getenv("LIPALPHA_CLI");
  c.expect(cli_env != nullptr, "LIPALPHA_CLI not set");
  if (!cli_env) {
    CHECK(c.pass);
    return;
  }
  const std::string cli = cli_env;
  const fs::path dir = "acceptance_tmp";
  fs::remove_all(dir);
  fs::create_directories(dir);

  write_file(dir / "domain.json", domain_to_json(two_ball_domain()));
  const DomainSpec designed = saturated_design(16);
  write_file(dir / "designed.json", domain_to_json(designed));
  const Complex pole = designed.balls.front().center;

  struct Job {
    std::string cmd;
    std::string config;
    std::vector<std::string> outputs;
  };
  const std::vector<Job> jobs = {
      {"design",
       "{\"alpha\": 0.5, \"outer\": {\"center\": [0,0], \"radius\": 1.0},"
       " \"b\": [0,0], \"seed\": 5, \"n_max_series\": 16,"
       " \"schedule\": {\"family\": \"geometric\", \"scale\": 1.0,"
       "  \"ratio\": 0.5, \"n_min\": 1, \"n_max\": 16,"
       "  \"balls_per_annulus\": 1, \"saturate_dyadic\": true}}",
       {"domain.json", "wiener.csv", "wiener.json", "wiener.svg"}},
      {"diffquot",
       "{\"domain\": \"designed.json\","
       " \"function\": {\"kernels\": [{\"pole\": " + fmt_complex_pair(pole) +
           ","
           "  \"order\": 1, \"coeff\": [1,0]}]},"
           " \"ray\": {\"t\": 0.5, \"r0\": 0.25, \"rho\": 0.5,"
           " \"count\": 18}, \"tol\": 1e-4}",
       {"quotients.csv", "convergence.json", "error.svg"}},
      {"lemmas",
       "{\"domain\": \"domain.json\","
       " \"measure\": {\"random\": {\"atoms\": 20, \"count\": 2, \"seed\": 11}},"
       " \"t\": 0.5, \"scan\": {\"theta\": 3.141592653589793, \"r_hi\": 0.3,"
       "  \"r_lo\": 1e-6, \"count\": 40}}",
       {"scan_L1_0.csv", "scan_L2_0.csv", "scan_L3_1.csv", "lemmas.json",
        "transform_field.csv", "lemma_ratios.svg"}},
      {"seminorm",
       "{\"domain\": \"designed.json\", \"samples\": 20000, \"seed\": 31,"
       " \"function\": {\"poly\": [[0,0],[1,0]]}}",
       {"seminorm.json"}},
      {"fubini",
       "{\"domain\": \"domain.json\","
       " \"measure\": {\"random\": {\"atoms\": 8, \"seed\": 4}},"
       " \"bump\": {\"center\": [-0.4,-0.4], \"radius\": 0.25, \"amplitude\": 1},"
       " \"grid\": {\"n\": 128, \"margin\": 0.05}, \"refine\": [32, 64, 128]}",
       {"fubini.json"}},
      {"identity",
       "{\"domain\": \"domain.json\", \"trials\": 25, \"seed\": 12}",
       {"identity.json"}},
      {"that",
       "{\"domain\": \"domain.json\", \"degree\": 3, \"pairs\": 16, \"seed\": 4,"
       " \"scan\": {\"theta\": 3.141592653589793, \"r_hi\": 0.3, \"r_lo\": 1e-3,"
       "  \"count\": 25}}",
       {"that.csv", "that.json", "that.svg"}},
  };

  for (const auto& job : jobs) {
    write_file(dir / (job.cmd + ".json"), job.config);
    std::map<std::string, std::string> reference;
    bool first = true;
    for (int rep = 0; rep < 2; ++rep) {
      for (int threads : {1, 4, 8}) {
        const fs::path out =
            dir / (job.cmd + "_t" + std::to_string(threads) + "_r" +
                   std::to_string(rep));
        const int code = run_cli(
            cli,
            job.cmd + " --config " + (dir / (job.cmd + ".json")).string() +
                " --format csv,json,svg --threads " + std::to_string(threads) +
                " --out " + out.string(),
            (out.string() + ".log"));
        c.expect(code == 0, job.cmd + ": exit code " + std::to_string(code) +
                                " at threads=" + std::to_string(threads));
        if (code != 0) continue;
        for (const auto& name : job.outputs) {
          const std::string bytes = read_file((out / name).string());
          if (first) {
            reference[name] = bytes;
          } else {
            c.expect(bytes == reference[name],
                     job.cmd + "/" + name + " differs at threads=" +
                         std::to_string(threads) + " rep=" + std::to_string(rep));
          }
        }
        first = false;
      }
    }
  }
  CHECK(c.pass);
}
