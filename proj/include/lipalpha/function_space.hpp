#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "lipalpha/content.hpp"
#include "lipalpha/geometry.hpp"

namespace lipalpha {

// c / (z - pole)^order. The pole must sit strictly inside a removed ball of
// the bound domain with margin >= radius/2; builders place poles at ball
// centers, so the distance from the pole to clos(U) is the ball radius.
struct KernelTerm {
  Complex pole;
  int order = 1;
  Complex coeff;
};

// Analytic remainder bounds for a clustering family truncated at the last
// stored annulus. All bounds are geometric tails in the annulus index.
struct TailCertificate {
  double eps_ratio = 0.0;      // per-annulus coefficient ratio g
  double eps_scale = 0.0;      // eps_n = eps_scale * g^n, one per ball
  int last_annulus = 0;        // N: deepest stored annulus
  double pole_scale = 0.0;     // omitted poles lie within this of b
  double oracle_tail = 0.0;    // bound on | sum_{omitted} -eps/(b-a)^2 |
  double lip_tail = 0.0;       // bound on sum_{omitted} eps/r^2 (Lip-1 mass)
  double eval_tail_at_b = 0.0; // bound on sum_{omitted} eps/|b-a|
  double coeff_tail = 0.0;     // bound on sum_{omitted} eps
};

// Member of the little-lip algebra in closed form: Cauchy kernels with poles
// inside removed balls plus a polynomial in (z - b) of degree <= 6.
struct TestFunction {
  std::shared_ptr<const DomainSpec> domain;
  std::vector<KernelTerm> kernels;
  std::vector<Complex> poly;  // coefficients of (z-b)^j
  std::optional<TailCertificate> tail;
};

struct SeminormEstimate {
  double kappa_hat = 0.0;   // sampled sup of |f(z)-f(w)| / |z-w|^alpha
  double kappa_bar = 0.0;   // analytic upper bound
  Complex argmax_z, argmax_w;
  long samples = 0;
  std::uint64_t seed = 0;
};

struct LipBounds {
  double lip1 = 0.0;       // K(f): path-free Lipschitz-1 constant on clos(U)
  double kappa_bar = 0.0;  // K(f) * diam^(1-alpha)
};

// Validates the pole-in-ball invariant and the polynomial degree cap.
TestFunction make_test_function(std::shared_ptr<const DomainSpec> domain,
                                std::vector<KernelTerm> kernels,
                                std::vector<Complex> poly);

// Convenience: the polynomial b + (z-b), i.e. f(z) = z.
TestFunction identity_function(std::shared_ptr<const DomainSpec> domain);

Complex eval(const TestFunction& f, Complex z);

// Remainder bound for the omitted clustering terms at z (0 for finite
// families). Infinity when z is too deep inside the omitted pole cluster
// for the certificate to say anything.
double eval_tail_bound(const TestFunction& f, Complex z);

Complex derivative_at(const TestFunction& f, Complex z);

// Same for the derivative; at z = b this is the oracle tail.
double derivative_tail_bound(const TestFunction& f, Complex z);

// The normalised derivation applied to f. For finite families this is the
// classical f'(b); for clustering families the stored series value, whose
// omitted-term bound must be below 10^-8 (else TailNotCertified).
Complex derivation_oracle(const TestFunction& f);

// Sup of |f''| over the disk B(b, radius); used for Taylor-remainder bounds
// on difference quotients. Requires the disk to stay clear of all poles.
double second_derivative_bound(const TestFunction& f, double radius);

LipBounds lip_bounds(const TestFunction& f);

SeminormEstimate empirical_seminorm(const TestFunction& f, long samples,
                                    std::uint64_t seed, unsigned threads = 1);

struct LittleLipPoint {
  double delta = 0.0;
  double sup_ratio = 0.0;
};

// sup of the Lip-alpha quotient over sampled pairs with |z-w| < delta, for a
// positive decreasing delta grid. Little-lip members drive this to zero.
std::vector<LittleLipPoint> little_lip_profile(const TestFunction& f,
                                               const std::vector<double>& deltas,
                                               long samples, std::uint64_t seed);

// Geometric coefficient rule eps_n = scale * ratio^n for clustering families;
// the schedule pins the ideal continuation of the design beyond the stored
// annuli so the tails have closed forms.
struct ClusterRule {
  double ratio = 0.03125;
  double scale = 1.0;
  RadiiSchedule schedule;
};

// One simple pole per removed ball, at its center, with coefficient eps_n of
// the ball's annulus. Requires sum eps_n / r_n^2 < infinity against the
// design's radii (DivergentNorm otherwise) and populates the tail
// certificate used by eval / derivative / oracle.
TestFunction build_cluster_function(std::shared_ptr<const DomainSpec> domain,
                                    const ClusterRule& rule);

}  // namespace lipalpha
