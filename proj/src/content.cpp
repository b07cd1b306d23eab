#include "lipalpha/content.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "lipalpha/errors.hpp"
#include "lipalpha/numerics.hpp"
#include "lipalpha/rng.hpp"

namespace lipalpha {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kCenterModulus = 0.75;  // ball centers sit at 0.75 * 2^-n

double four_pow(int n) { return std::ldexp(1.0, 2 * n); }

bool annulus_inside_outer(const DomainSpec& d, int n) {
  const Annulus ann{d.b, n};
  return std::abs(d.b - d.outer.center) + ann.outer() < d.outer.radius;
}

bool segment_meets_annulus(const DomainSpec& d, const Segment& s, int n) {
  const Annulus ann{d.b, n};
  const double lo = point_segment_distance(d.b, s);
  const double hi = std::max(std::abs(s.p - d.b), std::abs(s.q - d.b));
  return lo <= ann.outer() && ann.inner() <= hi;
}

// Largest dyadic radius 2^-p with k * (2^-p)^(1+alpha) == s_n/4^n exactly and
// 2^-p <= 2^-(n+3); k is forced to a power of 8. Only alpha = 1/2 with budgets
// equal to a power of two admits such a representation.
AnnulusPlan saturated_dyadic_plan(double alpha, double budget, int n) {
  if (alpha != 0.5)
    throw InfeasibleSchedule(n, "dyadic saturation requires alpha = 1/2");
  int e = 0;
  const double m = std::frexp(budget, &e);  // budget = m * 2^e, m in [0.5, 1)
  if (m != 0.5)
    throw InfeasibleSchedule(n, "dyadic saturation requires a power-of-two budget");
  const int exp2 = 1 - e;  // budget = 2^-exp2
  if (exp2 < 0 || exp2 % 3 != 0)
    throw InfeasibleSchedule(
        n, "dyadic saturation requires budget = 2^-3m (pick s_n = 2^-n)");
  // radius 2^-p with 1.5*p = exp2 + 3*j  =>  p = (2/3)*exp2 + 2*j
  const int p0 = 2 * exp2 / 3;
  const int j = std::max(0, (n + 3 - p0 + 1) / 2);
  const int p = p0 + 2 * j;
  AnnulusPlan plan;
  plan.n = n;
  plan.radius = std::ldexp(1.0, -p);
  plan.count = static_cast<int>(std::ldexp(1.0, 3 * j));  // 8^j
  return plan;
}

}  // namespace

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::ball_sum: return "ball-sum";
    case Provenance::trivial_annulus: return "trivial-annulus";
    case Provenance::mixed: return "mixed";
  }
  return "?";
}

const char* verdict_name(WienerVerdict v) {
  return v == WienerVerdict::certified_convergent ? "certified-convergent"
                                                  : "inconclusive";
}

double RadiiSchedule::s(int n) const {
  if (family == Family::geometric) return scale * std::pow(ratio, n);
  const double k = static_cast<double>(n) + 1.0;
  return scale / (k * k);
}

double RadiiSchedule::tail_after(int n) const {
  if (family == Family::geometric)
    return scale * std::pow(ratio, n + 1) / (1.0 - ratio);
  // sum_{m>n} S/(m+1)^2 = S * sum_{j>=n+2} 1/j^2 < S/(n+1)
  return scale / (static_cast<double>(n) + 1.0);
}

double content_ball(double r, double beta) {
  if (!(r > 0.0) || !(beta > 0.0))
    throw std::domain_error("content_ball: need r > 0 and beta > 0");
  return pow_beta(r, beta);
}

ContentBound annulus_content_bound(const DomainSpec& d, int n) {
  if (n < 0) throw std::invalid_argument("annulus_content_bound: n >= 0");
  const double beta = 1.0 + d.alpha;
  const double trivial = pow_beta(Annulus{d.b, n}.outer(), beta);
  ContentBound out;
  out.n = n;
  if (!annulus_inside_outer(d, n)) {
    out.bound = trivial;
    out.provenance = Provenance::trivial_annulus;
    return out;
  }
  KahanSum sum;
  for (const auto& ball : balls_meeting_annulus(d, n))
    sum.add(pow_beta(ball.radius, beta));
  if (sum.value() > trivial) {
    out.bound = trivial;
    out.provenance = Provenance::trivial_annulus;
    return out;
  }
  out.bound = sum.value();
  out.provenance = Provenance::ball_sum;
  for (const auto& seg : d.segments) {
    if (segment_meets_annulus(d, seg, n)) {
      out.provenance = Provenance::mixed;  // zero contribution, noted only
      break;
    }
  }
  return out;
}

WienerReport wiener_series(const DomainSpec& d, int n_max,
                           const std::optional<RadiiSchedule>& schedule) {
  if (n_max < 0) throw std::invalid_argument("wiener_series: n_max >= 0");
  WienerReport report;
  report.beta = 1.0 + d.alpha;
  report.n_max = n_max;
  KahanSum sum;
  for (int n = 0; n <= n_max; ++n) {
    const ContentBound cb = annulus_content_bound(d, n);
    const double term = four_pow(n) * cb.bound;
    report.terms.push_back({n, cb.bound, cb.provenance, term});
    sum.add(term);
  }
  report.partial_sum = sum.value();

  if (!schedule) return report;

  // Certification: every ball budget holds (so terms beyond n_max are at
  // most s_n), and annuli beyond n_max stay inside the outer disk (so the
  // trivial bound never replaces the ball sum out there).
  const int n_check = std::max(n_max, schedule->n_max);
  for (int n = 0; n <= n_check; ++n) {
    KahanSum ball_sum;
    for (const auto& ball : balls_meeting_annulus(d, n))
      ball_sum.add(pow_beta(ball.radius, report.beta));
    if (ball_sum.value() > schedule->s(n) / four_pow(n)) return report;
  }
  if (!annulus_inside_outer(d, n_max + 1)) return report;

  // When every removed ball stays clear of the annuli beyond n_max, the tail
  // terms vanish outright (segments and {b} carry zero content).
  double min_lo = std::numeric_limits<double>::infinity();
  for (const auto& ball : d.balls)
    min_lo = std::min(min_lo, std::abs(ball.center - d.b) - ball.radius);
  const bool nothing_deeper =
      d.balls.empty() || min_lo > Annulus{d.b, n_max + 1}.outer();

  report.tail_bound = nothing_deeper ? 0.0 : schedule->tail_after(n_max);
  report.verdict = WienerVerdict::certified_convergent;
  report.tail_derivation =
      nothing_deeper
          ? "no removed ball meets any annulus beyond n_max; tail is exactly 0"
          : "per-annulus ball budgets verified for n <= " + std::to_string(n_check) +
                "; terms beyond n_max are bounded by s_n, tail = closed-form sum "
                "of s_n";
  return report;
}

AnnulusPlan plan_annulus(double alpha, const RadiiSchedule& schedule, int n) {
  AnnulusPlan plan;
  plan.n = n;
  plan.count = schedule.balls_per_annulus;
  if (plan.count <= 0) {
    plan.count = 0;
    return plan;
  }
  const double budget = schedule.s(n) / four_pow(n);
  const double clamp = std::ldexp(1.0, -(n + 3));
  if (schedule.saturate_dyadic) return saturated_dyadic_plan(alpha, budget, n);
  const double r_star = std::pow(budget / plan.count, 1.0 / (1.0 + alpha));
  if (r_star > clamp && schedule.require_exact_budget)
    throw InfeasibleSchedule(
        n, "budget-exact radius exceeds the one-annulus clamp 2^-(n+3)");
  double r = std::min(r_star, clamp);
  // Round-trip guard: pow(pow(B,1/(1+a)),1+a) can overshoot by a few ulps of
  // the budget for non-dyadic inputs, which would register as negative slack
  // downstream. Walk r down until the recomputed sum fits.
  int guard = 0;
  while (plan.count * pow_beta(r, 1.0 + alpha) > budget && ++guard < 4096)
    r = std::nextafter(r, 0.0);
  if (plan.count * pow_beta(r, 1.0 + alpha) > budget)
    throw InfeasibleSchedule(n, "cannot size a radius under the budget");
  plan.radius = r;
  return plan;
}

namespace {

// Worst-case cone ratio delivered by the ball layout: every ball center sits
// at angular offset >= margin from the probe ray, with radius <= rho_max
// times its center modulus. Scale invariance across annuli reduces the
// certificate to a one-variable minimization in u = eps/m.
double certify_aperture(double rho_max, double margin) {
  if (rho_max <= 0.0) return 0.98;
  const double c = std::cos(margin);
  auto ratio = [&](double u) {
    return (std::sqrt(u * u - 2.0 * u * c + 1.0) - rho_max) / u;
  };
  const double t = minimize_log_grid(ratio, 1e-5, 1e5);
  return 0.98 * std::min(1.0, t);
}

}  // namespace

DomainSpec design_domain(double alpha, const RadiiSchedule& schedule,
                         const ClosedBall& outer, Complex b, std::uint64_t seed,
                         double probe_theta) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("design_domain: alpha in (0,1)");
  if (schedule.n_min < 0 || schedule.n_max < schedule.n_min)
    throw std::invalid_argument("design_domain: bad annulus range");
  if (!(schedule.angular_margin > 0.0 && schedule.angular_margin < 1.5))
    throw std::invalid_argument("design_domain: angular margin out of range");

  DomainSpec d;
  d.outer = outer;
  d.b = b;
  d.alpha = alpha;

  Rng rng(seed);
  double rho_max = 0.0;
  for (int n = schedule.n_min; n <= schedule.n_max; ++n) {
    const AnnulusPlan plan = plan_annulus(alpha, schedule, n);
    if (plan.count == 0) continue;
    const double m = kCenterModulus * std::ldexp(1.0, -n);
    const double half_width = std::ldexp(1.0, -(n + 2));
    if (!(plan.radius < half_width))
      throw InfeasibleSchedule(n, "ball radius reaches the annulus boundary");
    const double arc = kTwoPi - 2.0 * schedule.angular_margin;
    const double sep = arc / plan.count;
    if (plan.count > 1 && 2.0 * m * std::sin(sep / 2.0) <= 2.0 * plan.radius)
      throw InfeasibleSchedule(n, "balls do not fit disjointly on the placement ring");
    // Deterministic jitter: rotate the equally spaced pattern by up to half
    // a slot; the margin and the pairwise separation are preserved.
    const double shift = 0.25 + 0.5 * rng.derived(n).uniform();
    for (int j = 0; j < plan.count; ++j) {
      const double theta =
          probe_theta + schedule.angular_margin + (j + shift) * sep;
      ClosedBall ball{b + m * std::polar(1.0, theta), plan.radius};
      if (std::abs(ball.center - d.outer.center) + ball.radius >= d.outer.radius)
        throw InfeasibleSchedule(n, "ball does not fit inside the outer disk");
      d.balls.push_back(ball);
    }
    rho_max = std::max(rho_max, plan.radius / m);
  }

  const double t_cert = certify_aperture(rho_max, schedule.angular_margin);
  const double d_out = d.outer.radius - std::abs(b - d.outer.center);
  d.probe.theta = probe_theta;
  d.probe.t = t_cert;
  d.probe.eps_lo = std::ldexp(1.0, -60);
  d.probe.eps_hi = 0.999 * d_out / (1.0 + t_cert);

  // Recompute every budget from the placed balls before handing the
  // domain out; slack must be nonnegative at every annulus.
  const double beta = 1.0 + alpha;
  for (int n = 0; n <= schedule.n_max; ++n) {
    KahanSum sum;
    for (const auto& ball : balls_meeting_annulus(d, n))
      sum.add(pow_beta(ball.radius, beta));
    if (sum.value() > schedule.s(n) / four_pow(n))
      throw InfeasibleSchedule(n, "post-check: annulus budget exceeded");
  }
  return validate_domain(std::move(d));
}

bool removability_flag(const DomainSpec& d) {
  std::set<int> occupied;
  int n_hi = 0;
  for (const auto& ball : d.balls) {
    const double dc = std::abs(ball.center - d.b);
    const double lo = std::max(0.0, dc - ball.radius);
    if (lo <= 0.0) return true;  // b on the ball boundary: meets every scale
    n_hi = std::max(n_hi, static_cast<int>(std::ceil(-std::log2(lo))) + 1);
  }
  n_hi = std::min(n_hi, 1100);
  for (int n = 0; n <= n_hi; ++n)
    if (!ball_indices_meeting_annulus(d, n).empty()) occupied.insert(n);
  if (occupied.empty()) return false;
  for (int n = *occupied.begin(); n <= *occupied.rbegin(); ++n)
    if (!occupied.count(n)) return false;
  return true;
}

}  // namespace lipalpha
