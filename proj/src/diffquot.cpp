#include "lipalpha/diffquot.hpp"

#include <algorithm>
#include <cmath>

#include "lipalpha/errors.hpp"
#include "lipalpha/numerics.hpp"

namespace lipalpha {

namespace {

constexpr double kRMinFloor = 1e-8;

std::vector<QuotientRecord> quotients_over(const DomainSpec& d,
                                           const TestFunction& f,
                                           const std::vector<Complex>& points,
                                           bool enforce_in_u) {
  const Complex fb = eval(f, d.b);
  const Complex oracle = derivative_at(f, d.b);
  std::vector<QuotientRecord> records;
  records.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!is_in_u(points[i], d)) {
      if (enforce_in_u)
        throw SequenceLeftDomain(static_cast<long>(i),
                                 "quotient sequence left the open set");
      continue;
    }
    QuotientRecord rec;
    rec.n = static_cast<int>(i);
    rec.z_n = points[i];
    rec.q_n = (eval(f, points[i]) - fb) / (points[i] - d.b);
    rec.err_n = std::abs(rec.q_n - oracle);
    records.push_back(rec);
  }
  return records;
}

}  // namespace

const char* verdict_name(ConvergenceVerdict v) {
  switch (v) {
    case ConvergenceVerdict::converged: return "converged";
    case ConvergenceVerdict::not_converged: return "not-converged";
    case ConvergenceVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

std::vector<QuotientRecord> run_quotients(const ExperimentConfig& cfg) {
  int count = cfg.count;
  // r_min floor: below 1e-8 the cancellation in f(z)-f(b) eats the quotient.
  {
    double r = cfg.r0;
    int usable = 0;
    for (int n = 0; n < cfg.count && r >= kRMinFloor; ++n, r *= cfg.rho) ++usable;
    count = usable;
  }
  const std::vector<Complex> seq = ray_sequence(cfg.ray, cfg.r0, cfg.rho, count);
  const NtCheck nt = check_nontangential(seq, cfg.ray.t, cfg.domain);
  if (!nt.ok) {
    if (!is_in_u(seq[static_cast<std::size_t>(nt.first_violation)], cfg.domain))
      throw SequenceLeftDomain(nt.first_violation,
                               "quotient sequence left the open set");
    throw ApertureViolated(nt.first_violation,
                           "quotient sequence violates the ray aperture");
  }
  return quotients_over(cfg.domain, cfg.f, seq, true);
}

ConvergenceReport convergence_report(const std::vector<QuotientRecord>& records,
                                     Complex oracle, double tol, double rho) {
  if (records.size() < 8)
    throw InsufficientData("convergence_report: need at least 8 records");

  ConvergenceReport report;
  report.records = records;
  report.oracle = oracle;
  report.tol = tol;
  report.rho = rho;

  // Limit point of the geometric ray, recovered exactly from two records:
  // z_n = b + r0 rho^n e^{i theta} gives b = (z_k - rho z_{k-1}) / (1 - rho).
  const std::size_t k = records.size() - 1;
  const Complex z_b = (records[k].z_n - rho * records[k - 1].z_n) / (1.0 - rho);
  std::vector<double> rs;
  rs.reserve(records.size());
  for (const auto& rec : records) rs.push_back(std::abs(rec.z_n - z_b));

  if (!(rs.front() / rs.back() >= 1e3))
    throw InsufficientData("convergence_report: records span fewer than 3 decades");

  report.final_err = records.back().err_n;

  // Empirical order on the records with errors above rounding level.
  const double floor_err = 1e-14 * std::max(1.0, std::abs(oracle));
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].err_n > floor_err) {
      lx.push_back(std::log(rs[i]));
      ly.push_back(std::log(records[i].err_n));
    }
  }
  report.empirical_order = lx.size() >= 2 ? least_squares_slope(lx, ly) : 0.0;

  // Richardson extrapolation on the geometric sequence (ratio rho known
  // exactly): two first-order stages from the last three records.
  {
    const Complex q1 = records[k - 2].q_n, q2 = records[k - 1].q_n,
                  q3 = records[k].q_n;
    const Complex r1 = (q2 - rho * q1) / (1.0 - rho);
    const Complex r2 = (q3 - rho * q2) / (1.0 - rho);
    report.limit_estimate = (r2 - rho * rho * r1) / (1.0 - rho * rho);
  }

  // Monotone decrease over the last five records, factor-2 noise allowed;
  // pairs at rounding level are exempt.
  bool monotone = true;
  const std::size_t lo = records.size() - 5;
  for (std::size_t i = lo; i + 1 < records.size(); ++i) {
    const double e0 = records[i].err_n, e1 = records[i + 1].err_n;
    if (e0 <= floor_err && e1 <= floor_err) continue;
    if (e1 > 2.0 * e0) monotone = false;
  }

  if (report.final_err < tol && monotone)
    report.verdict = ConvergenceVerdict::converged;
  else if (report.final_err >= tol && lx.size() >= 2 && report.empirical_order < 0.1)
    report.verdict = ConvergenceVerdict::not_converged;
  else
    report.verdict = ConvergenceVerdict::inconclusive;
  return report;
}

ConvergenceReport run_experiment(const ExperimentConfig& cfg) {
  const std::vector<QuotientRecord> records = run_quotients(cfg);
  const Complex oracle = derivation_oracle(cfg.f);
  ConvergenceReport report = convergence_report(records, oracle, cfg.tol, cfg.rho);
  if (!records.empty()) {
    const double r_last = std::abs(records.back().z_n - cfg.domain.b);
    report.cancellation_bound =
        std::abs(eval(cfg.f, cfg.domain.b)) * 0x1.0p-52 / r_last;
  }
  return report;
}

TangentialProbe tangential_probe(const DomainSpec& d, const TestFunction& f,
                                 const std::vector<Complex>& curve, double t) {
  for (std::size_t i = 0; i < curve.size(); ++i)
    if (!is_in_u(curve[i], d))
      throw SequenceLeftDomain(static_cast<long>(i), "probe curve left the open set");
  TangentialProbe probe;
  probe.records = quotients_over(d, f, curve, true);
  const NtCheck nt = check_nontangential(curve, t, d);
  probe.aperture_violation = nt.ok ? -1 : nt.first_violation;
  probe.note =
      "exploratory: tangential approach is outside the cone hypothesis; "
      "records carry no verdict";
  return probe;
}

}  // namespace lipalpha
