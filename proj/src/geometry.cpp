#include "lipalpha/geometry.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "lipalpha/errors.hpp"
#include "lipalpha/rng.hpp"

namespace lipalpha {

namespace {

void require_finite(Complex z, const char* who) {
  if (!is_finite(z))
    throw std::invalid_argument(std::string(who) + ": non-finite point");
}

double sq(double x) { return x * x; }

double abs2(Complex z) { return z.real() * z.real() + z.imag() * z.imag(); }

}  // namespace

double point_segment_distance(Complex z, const Segment& s) {
  const Complex d = s.q - s.p;
  const double len2 = abs2(d);
  const Complex v = z - s.p;
  double t = (v.real() * d.real() + v.imag() * d.imag()) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(z - (s.p + t * d));
}

DomainSpec validate_domain(DomainSpec d) {
  require_finite(d.outer.center, "DomainSpec.outer");
  require_finite(d.b, "DomainSpec.b");
  if (!(d.outer.radius > 0.0))
    throw std::invalid_argument("DomainSpec: outer radius must be positive");
  if (!(d.alpha > 0.0 && d.alpha < 1.0))
    throw std::invalid_argument("DomainSpec: alpha must lie in (0,1)");
  if (std::abs(d.b - d.outer.center) >= d.outer.radius)
    throw std::invalid_argument("DomainSpec: b must lie in the open interior of outer");
  for (const auto& ball : d.balls) {
    require_finite(ball.center, "DomainSpec.balls");
    if (!(ball.radius > 0.0))
      throw std::invalid_argument("DomainSpec: removed ball radius must be positive");
    if (std::abs(ball.center - d.outer.center) + ball.radius >= d.outer.radius)
      throw std::invalid_argument(
          "DomainSpec: removed ball not contained in the interior of outer");
    if (std::abs(d.b - ball.center) < ball.radius)
      throw std::invalid_argument("DomainSpec: b lies inside a removed ball");
  }
  for (const auto& seg : d.segments) {
    require_finite(seg.p, "DomainSpec.segments");
    require_finite(seg.q, "DomainSpec.segments");
    if (seg.p == seg.q)
      throw std::invalid_argument("DomainSpec: degenerate segment");
  }
  if (!(d.probe.t > 0.0 && d.probe.t < 1.0))
    throw std::invalid_argument("DomainSpec: probe aperture must lie in (0,1)");
  if (!(d.probe.eps_lo > 0.0 && d.probe.eps_lo <= d.probe.eps_hi))
    throw std::invalid_argument("DomainSpec: bad probe eps range");
  // Spot-check the boundary witness: a few probe points must lie in U.
  for (double s : {0.0, 0.5, 1.0}) {
    const double eps =
        d.probe.eps_lo * std::pow(d.probe.eps_hi / d.probe.eps_lo, s);
    const Complex z = d.b + eps * std::polar(1.0, d.probe.theta);
    if (!is_in_u(z, d))
      throw std::invalid_argument("DomainSpec: probe witness point not in U");
  }
  return d;
}

bool is_in_u(Complex z, const DomainSpec& d) {
  require_finite(z, "is_in_u");
  if (z == d.b) return false;
  if (abs2(z - d.outer.center) >= sq(d.outer.radius)) return false;
  for (const auto& ball : d.balls)
    if (abs2(z - ball.center) <= sq(ball.radius)) return false;
  for (const auto& seg : d.segments) {
    const double dist = point_segment_distance(z, seg);
    if (dist * dist <= 0.0) return false;
  }
  return true;
}

double dist_to_complement(Complex z, const DomainSpec& d) {
  if (!is_in_u(z, d))
    throw PointNotInDomain("dist_to_complement: point not in U");
  double best = d.outer.radius - std::abs(z - d.outer.center);
  for (const auto& ball : d.balls)
    best = std::min(best, std::abs(z - ball.center) - ball.radius);
  for (const auto& seg : d.segments)
    best = std::min(best, point_segment_distance(z, seg));
  best = std::min(best, std::abs(z - d.b));
  return best;
}

double dist_to_boundary(Complex z, const DomainSpec& d) {
  require_finite(z, "dist_to_boundary");
  double best = std::abs(d.outer.radius - std::abs(z - d.outer.center));
  for (const auto& ball : d.balls)
    best = std::min(best, std::abs(std::abs(z - ball.center) - ball.radius));
  for (const auto& seg : d.segments)
    best = std::min(best, point_segment_distance(z, seg));
  best = std::min(best, std::abs(z - d.b));
  return best;
}

std::vector<std::size_t> ball_indices_meeting_annulus(const DomainSpec& d, int n) {
  if (n < 0) throw std::invalid_argument("annulus index must be nonnegative");
  const Annulus ann{d.b, n};
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < d.balls.size(); ++i) {
    const auto& ball = d.balls[i];
    const double dc = std::abs(ball.center - d.b);
    const double lo = std::max(0.0, dc - ball.radius);
    const double hi = dc + ball.radius;
    if (lo <= ann.outer() && ann.inner() <= hi) out.push_back(i);
  }
  return out;
}

std::vector<ClosedBall> balls_meeting_annulus(const DomainSpec& d, int n) {
  std::vector<ClosedBall> out;
  for (std::size_t i : ball_indices_meeting_annulus(d, n)) out.push_back(d.balls[i]);
  return out;
}

std::vector<Complex> sample_boundary_points(const DomainSpec& d, int count,
                                            std::uint64_t seed, double b_weight) {
  if (count < 1) throw std::invalid_argument("sample_boundary_points: count >= 1");
  // piece table: 0 = outer circle, 1..nb = ball circles, then segments, then b
  struct Piece {
    int kind;  // 0 circle, 1 segment, 2 point
    std::size_t index;
    double weight;
  };
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::vector<Piece> pieces;
  pieces.push_back({0, static_cast<std::size_t>(-1), kTwoPi * d.outer.radius});
  for (std::size_t i = 0; i < d.balls.size(); ++i)
    pieces.push_back({0, i, kTwoPi * d.balls[i].radius});
  for (std::size_t i = 0; i < d.segments.size(); ++i)
    pieces.push_back({1, i, std::abs(d.segments[i].q - d.segments[i].p)});
  if (b_weight > 0.0) pieces.push_back({2, 0, b_weight});

  double total = 0.0;
  for (const auto& p : pieces) total += p.weight;

  Rng rng(seed);
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    double u = rng.uniform() * total;
    std::size_t k = 0;
    while (k + 1 < pieces.size() && u >= pieces[k].weight) {
      u -= pieces[k].weight;
      ++k;
    }
    const Piece& p = pieces[k];
    if (p.kind == 2) {
      out.push_back(d.b);
      continue;
    }
    const double s = rng.uniform();
    if (p.kind == 0) {
      const ClosedBall& c =
          (p.index == static_cast<std::size_t>(-1)) ? d.outer : d.balls[p.index];
      out.push_back(c.center + c.radius * std::polar(1.0, kTwoPi * s));
    } else {
      const Segment& seg = d.segments[p.index];
      out.push_back(seg.p + s * (seg.q - seg.p));
    }
  }
  return out;
}

std::vector<Complex> ray_sequence(const NontangentialRay& ray, double r0,
                                  double rho, int count) {
  if (!(r0 > 0.0 && r0 <= ray.r_max))
    throw std::invalid_argument("ray_sequence: need 0 < r0 <= r_max");
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("ray_sequence: need rho in (0,1)");
  if (count < 0) throw std::invalid_argument("ray_sequence: count >= 0");
  const Complex dir = std::polar(1.0, ray.theta);
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(count));
  double r = r0;
  for (int n = 0; n < count; ++n) {
    out.push_back(ray.b + r * dir);
    r *= rho;
  }
  return out;
}

NtCheck check_nontangential(const std::vector<Complex>& seq, double t,
                            const DomainSpec& d) {
  if (!(t > 0.0 && t < 1.0))
    throw std::invalid_argument("check_nontangential: need t in (0,1)");
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!is_in_u(seq[i], d)) return {false, static_cast<long>(i)};
    const double dist = dist_to_complement(seq[i], d);
    if (dist < t * std::abs(seq[i] - d.b)) return {false, static_cast<long>(i)};
  }
  return {true, -1};
}

}  // namespace lipalpha
