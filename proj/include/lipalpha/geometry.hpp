#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace lipalpha {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

struct ClosedBall {
  Complex center;
  double radius = 0.0;  // > 0
};

struct Segment {
  Complex p, q;  // p != q
};

// Dyadic annulus around b: 2^-(n+1) <= |z-b| <= 2^-n.
struct Annulus {
  Complex b;
  int n = 0;
  double inner() const { return std::ldexp(1.0, -(n + 1)); }
  double outer() const { return std::ldexp(1.0, -n); }
};

// Constructive witness that b is reachable from inside: the points
// b + eps*e^{i theta} lie in U for eps in [eps_lo, eps_hi], and along that
// ray dist(z, C\U) >= t*|z-b|.
struct ProbeWitness {
  double theta = 0.0;
  double t = 0.5;  // certified aperture, 0 < t < 1
  double eps_lo = 1e-12;
  double eps_hi = 0.5;
};

// Bounded open set U = int(outer) minus closed balls, segments and {b}.
// Only finitely many removed pieces are stored; the analytic tail of a
// designed family is certified separately (see content.hpp).
struct DomainSpec {
  ClosedBall outer;
  Complex b;
  double alpha = 0.5;  // Lipschitz exponent, in (0,1)
  std::vector<ClosedBall> balls;
  std::vector<Segment> segments;
  ProbeWitness probe;

  bool operator==(const DomainSpec&) const = default;
};

inline bool operator==(const ClosedBall& a, const ClosedBall& b) {
  return a.center == b.center && a.radius == b.radius;
}
inline bool operator==(const Segment& a, const Segment& b) {
  return a.p == b.p && a.q == b.q;
}
inline bool operator==(const ProbeWitness& a, const ProbeWitness& b) {
  return a.theta == b.theta && a.t == b.t && a.eps_lo == b.eps_lo &&
         a.eps_hi == b.eps_hi;
}

struct NontangentialRay {
  Complex b;
  double theta = 0.0;
  double t = 0.5;  // aperture, 0 < t < 1
  double r_max = 0.5;
};

// Throws std::invalid_argument when an invariant fails; returns the
// validated spec otherwise. Deserialized domains pass through here too.
DomainSpec validate_domain(DomainSpec d);

double point_segment_distance(Complex z, const Segment& s);

// Membership in U. Removed balls are closed, segments use an exact
// on-segment test (squared distance compared against zero), and b itself
// is excluded.
bool is_in_u(Complex z, const DomainSpec& d);

// Exact Euclidean distance from z in U to the complement of U.
// Throws PointNotInDomain when z is not in U.
double dist_to_complement(Complex z, const DomainSpec& d);

// Two-sided distance from any point to X = bdy U (outer circle, removed
// ball circles, removed segments, and {b}).
double dist_to_boundary(Complex z, const DomainSpec& d);

// Removed balls whose radial interval about b overlaps [2^-(n+1), 2^-n].
// For a connected ball this interval test is equivalent to ball-annulus
// intersection.
std::vector<ClosedBall> balls_meeting_annulus(const DomainSpec& d, int n);

// Indices into d.balls, same criterion as above.
std::vector<std::size_t> ball_indices_meeting_annulus(const DomainSpec& d, int n);

// Deterministic boundary sampler; pieces are weighted by their
// one-dimensional size (circumference / segment length). The point b has
// weight b_weight (default 0, i.e. never drawn).
std::vector<Complex> sample_boundary_points(const DomainSpec& d, int count,
                                            std::uint64_t seed,
                                            double b_weight = 0.0);

// z_n = b + r0 * rho^n * e^{i theta}, n = 0..count-1. Requires 0 < r0 <= r_max
// and 0 < rho < 1.
std::vector<Complex> ray_sequence(const NontangentialRay& ray, double r0,
                                  double rho, int count);

struct NtCheck {
  bool ok = true;
  long first_violation = -1;  // index of the first failing point, -1 if none
};

// Every z_n must be in U with dist(z_n, C\U) >= t*|z_n - b|. A violation is
// reported through the return value, not an error.
NtCheck check_nontangential(const std::vector<Complex>& seq, double t,
                            const DomainSpec& d);

}  // namespace lipalpha
