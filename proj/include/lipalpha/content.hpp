#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lipalpha/geometry.hpp"

namespace lipalpha {

// How a per-annulus content bound was obtained:
//   ball_sum        subadditivity over the removed balls meeting the annulus
//   trivial_annulus containment in B(b, 2^-n), used when the annulus pokes out
//                   of the outer disk or when the ball sum exceeds it
//   mixed           ball sum is operative but removed segments (content zero
//                   for beta > 1) also meet the annulus
enum class Provenance { ball_sum, trivial_annulus, mixed };

const char* provenance_name(Provenance p);

// Upper bound for the lower (1+alpha)-content of A_n(b) \ U.
struct ContentBound {
  int n = 0;
  double bound = 0.0;
  Provenance provenance = Provenance::ball_sum;
};

// Named radius-budget families s_n with closed-form tails.
struct RadiiSchedule {
  enum class Family { geometric, power };

  Family family = Family::geometric;
  double scale = 1.0;  // S
  double ratio = 0.5;  // q in (0,1), geometric family only
  int n_min = 2;
  int n_max = 20;
  int balls_per_annulus = 1;  // requested k_n (constant rule)
  // Promote k_n so that per-annulus sums attain s_n/4^n exactly with dyadic
  // radii. Requires alpha = 1/2 and dyadic budgets; the one construction in
  // this lab where the series arithmetic is exact end to end.
  bool saturate_dyadic = false;
  bool require_exact_budget = false;
  double angular_margin = 0.7853981633974483;  // keep-out around the probe ray

  double s(int n) const;
  // Closed-form upper bound on sum_{m > n} s_m.
  double tail_after(int n) const;
};

struct WienerTerm {
  int n = 0;
  double content_bound = 0.0;
  Provenance provenance = Provenance::ball_sum;
  double term = 0.0;  // 4^n * content_bound
};

enum class WienerVerdict { certified_convergent, inconclusive };

const char* verdict_name(WienerVerdict v);

struct WienerReport {
  double beta = 1.5;  // 1 + alpha
  int n_max = 0;
  std::vector<WienerTerm> terms;
  double partial_sum = 0.0;
  std::optional<double> tail_bound;
  WienerVerdict verdict = WienerVerdict::inconclusive;
  std::string tail_derivation;  // recorded justification when certified
};

// M(ball of radius r) = r^beta. Domain error on nonpositive inputs.
double content_ball(double r, double beta);

// min( sum of r_i^beta over balls meeting A_n(b), (2^-n)^beta ). Segments and
// {b} contribute zero. If A_n(b) is not contained in int(outer), only the
// trivial containment bound is available.
ContentBound annulus_content_bound(const DomainSpec& d, int n);

// Terms 4^n * bound for n = 0..n_max with compensated partial sum. When a
// schedule is supplied, every per-annulus ball budget sum r^beta <= s_n/4^n
// is recomputed (for all n up to max(n_max, schedule.n_max)) and the annuli
// beyond n_max are checked to stay inside the outer disk; only then is the
// closed-form tail attached and the verdict certified-convergent.
WienerReport wiener_series(const DomainSpec& d, int n_max,
                           const std::optional<RadiiSchedule>& schedule);

// Sizing plan for one annulus of a designed domain.
struct AnnulusPlan {
  int n = 0;
  int count = 0;
  double radius = 0.0;
};

// Sizes and (when saturating) promotes the ball count for annulus n.
// Throws InfeasibleSchedule when the budget cannot be met under the
// one-annulus clamp r <= 2^-(n+3).
AnnulusPlan plan_annulus(double alpha, const RadiiSchedule& schedule, int n);

// Builds a swiss-cheese domain following the budget recipe: for every n,
// the (1+alpha)-th powers of the radii of the balls meeting A_n(b) sum to
// at most s_n/4^n. Balls sit at modulus 0.75*2^-n, equally spaced outside
// an angular keep-out around the probe direction; each ball meets exactly
// one annulus. The budget is recomputed and asserted before returning, and
// the probe witness stores a certified aperture for the probe ray.
DomainSpec design_domain(double alpha, const RadiiSchedule& schedule,
                         const ClosedBall& outer, Complex b, std::uint64_t seed,
                         double probe_theta = 0.0);

// True when the ball-bearing annuli form one contiguous block [n_lo, n_hi]:
// every neighborhood scale down to the design floor then meets the removed
// set in a planar ball, which has infinite (1+alpha)-measure for alpha < 1.
// Informational only.
bool removability_flag(const DomainSpec& d);

}  // namespace lipalpha
