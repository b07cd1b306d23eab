#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lipalpha/function_space.hpp"
#include "lipalpha/geometry.hpp"

namespace lipalpha {

struct ExperimentConfig {
  DomainSpec domain;
  TestFunction f;
  NontangentialRay ray;
  double r0 = 0.3;
  double rho = 0.5;
  int count = 25;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

struct QuotientRecord {
  int n = 0;
  Complex z_n;
  Complex q_n;      // (f(z_n) - f(b)) / (z_n - b)
  double err_n = 0.0;  // |q_n - oracle|
};

enum class ConvergenceVerdict { converged, not_converged, inconclusive };

const char* verdict_name(ConvergenceVerdict v);

struct ConvergenceReport {
  std::vector<QuotientRecord> records;
  Complex oracle;
  Complex limit_estimate;  // Richardson extrapolation of the last 3 records
  double final_err = 0.0;
  double empirical_order = 0.0;  // least-squares slope of log err vs log r
  ConvergenceVerdict verdict = ConvergenceVerdict::inconclusive;
  double tol = 1e-6;
  double cancellation_bound = 0.0;  // |f(b)| * 2^-52 / r at the last record
  double rho = 0.5;
};

// Difference quotients along the geometric ray sequence. Every point is
// re-verified in U (SequenceLeftDomain with the index otherwise) and against
// the ray aperture (ApertureViolated). The sequence stops at r = 1e-8 to stay
// clear of catastrophic cancellation in f(z)-f(b).
std::vector<QuotientRecord> run_quotients(const ExperimentConfig& cfg);

// Fits the error decay and issues the verdict: converged needs final_err
// below tol and errors non-increasing over the last five records up to a
// factor-2 noise allowance (records at rounding level are exempt). Requires
// at least 8 records spanning at least 3 decades of r (InsufficientData).
ConvergenceReport convergence_report(const std::vector<QuotientRecord>& records,
                                     Complex oracle, double tol, double rho);

// run_quotients + convergence_report against the derivation oracle, with the
// floating-point cancellation bound filled in.
ConvergenceReport run_experiment(const ExperimentConfig& cfg);

struct TangentialProbe {
  std::vector<QuotientRecord> records;
  std::string note;          // non-assertive; probes beyond the cone hypothesis
  long aperture_violation = -1;  // first index violating the given aperture
};

// Quotients along an arbitrary in-U curve, with the aperture check reported
// rather than enforced. Emits no verdict and never contributes to pass/fail.
TangentialProbe tangential_probe(const DomainSpec& d, const TestFunction& f,
                                 const std::vector<Complex>& curve, double t);

}  // namespace lipalpha
