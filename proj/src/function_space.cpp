#include "lipalpha/function_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lipalpha/errors.hpp"
#include "lipalpha/numerics.hpp"
#include "lipalpha/parallel.hpp"
#include "lipalpha/rng.hpp"

namespace lipalpha {

namespace {

constexpr std::size_t kMaxPolyDegree = 6;
constexpr double kCenterModulus = 0.75;

double abs2(Complex z) { return std::norm(z); }

Complex ipow(Complex z, int k) {
  Complex acc = 1.0;
  for (int i = 0; i < k; ++i) acc *= z;
  return acc;
}

// Distance from a kernel pole to clos(U): radius of the containing removed
// ball minus the offset from its center. The construction invariant keeps
// this at least radius/2.
double pole_clearance(const DomainSpec& d, Complex pole) {
  double best = -1.0;
  for (const auto& ball : d.balls) {
    const double off = std::abs(pole - ball.center);
    if (off <= ball.radius / 2.0) best = std::max(best, ball.radius - off);
  }
  return best;
}

Complex eval_poly(const std::vector<Complex>& poly, Complex u) {
  Complex acc = 0.0;
  for (std::size_t j = poly.size(); j-- > 0;) acc = acc * u + poly[j];
  return acc;
}

Complex eval_poly_derivative(const std::vector<Complex>& poly, Complex u) {
  Complex acc = 0.0;
  for (std::size_t j = poly.size(); j-- > 1;)
    acc = acc * u + static_cast<double>(j) * poly[j];
  return acc;
}

struct TailMasses {
  double oracle = 0.0, lip = 0.0, eval_b = 0.0, coeff = 0.0;
};

// Per-annulus omitted masses for annulus n under the rule and schedule.
TailMasses annulus_masses(double alpha, const ClusterRule& rule, int n) {
  const AnnulusPlan plan = plan_annulus(alpha, rule.schedule, n);
  const double eps = rule.scale * std::pow(rule.ratio, n);
  const double m = kCenterModulus * std::ldexp(1.0, -n);
  TailMasses out;
  if (plan.count == 0) return out;
  const double k = static_cast<double>(plan.count);
  out.oracle = k * eps / (m * m);
  out.lip = k * eps / (plan.radius * plan.radius);
  out.eval_b = k * eps / m;
  out.coeff = k * eps;
  return out;
}

}  // namespace

TestFunction make_test_function(std::shared_ptr<const DomainSpec> domain,
                                std::vector<KernelTerm> kernels,
                                std::vector<Complex> poly) {
  if (!domain) throw std::invalid_argument("TestFunction: null domain");
  if (poly.size() > kMaxPolyDegree + 1)
    throw std::invalid_argument("TestFunction: polynomial degree exceeds 6");
  for (const auto& k : kernels) {
    if (k.order < 1) throw std::invalid_argument("TestFunction: kernel order >= 1");
    if (!is_finite(k.pole) || !is_finite(k.coeff))
      throw std::invalid_argument("TestFunction: non-finite kernel");
    if (pole_clearance(*domain, k.pole) <= 0.0)
      throw std::invalid_argument(
          "TestFunction: pole not inside a removed ball with radius/2 margin");
  }
  TestFunction f;
  f.domain = std::move(domain);
  f.kernels = std::move(kernels);
  f.poly = std::move(poly);
  return f;
}

TestFunction identity_function(std::shared_ptr<const DomainSpec> domain) {
  const Complex b = domain->b;
  return make_test_function(std::move(domain), {}, {b, Complex(1.0, 0.0)});
}

Complex eval(const TestFunction& f, Complex z) {
  if (!is_finite(z)) throw std::invalid_argument("eval: non-finite point");
  Complex acc = eval_poly(f.poly, z - f.domain->b);
  for (const auto& k : f.kernels) {
    const Complex dz = z - k.pole;
    if (abs2(dz) == 0.0) throw PoleHit("eval: z coincides with a pole");
    acc += k.coeff / ipow(dz, k.order);
  }
  return acc;
}

double eval_tail_bound(const TestFunction& f, Complex z) {
  if (!f.tail) return 0.0;
  const TailCertificate& tc = *f.tail;
  const double r = std::abs(z - f.domain->b);
  if (r == 0.0) return tc.eval_tail_at_b;
  if (r > 2.0 * tc.pole_scale) return tc.coeff_tail / (r - tc.pole_scale);
  return std::numeric_limits<double>::infinity();
}

double derivative_tail_bound(const TestFunction& f, Complex z) {
  if (!f.tail) return 0.0;
  const TailCertificate& tc = *f.tail;
  const double r = std::abs(z - f.domain->b);
  if (r == 0.0) return tc.oracle_tail;
  if (r > 2.0 * tc.pole_scale) {
    const double gap = r - tc.pole_scale;
    return tc.coeff_tail / (gap * gap);
  }
  return std::numeric_limits<double>::infinity();
}

Complex derivative_at(const TestFunction& f, Complex z) {
  if (!is_finite(z)) throw std::invalid_argument("derivative_at: non-finite point");
  Complex acc = eval_poly_derivative(f.poly, z - f.domain->b);
  for (const auto& k : f.kernels) {
    const Complex dz = z - k.pole;
    if (abs2(dz) == 0.0) throw PoleHit("derivative_at: z coincides with a pole");
    acc += -static_cast<double>(k.order) * k.coeff / ipow(dz, k.order + 1);
  }
  return acc;
}

Complex derivation_oracle(const TestFunction& f) {
  if (f.tail && f.tail->oracle_tail > 1e-8)
    throw TailNotCertified("derivation_oracle: omitted-term bound above 1e-8");
  return derivative_at(f, f.domain->b);
}

double second_derivative_bound(const TestFunction& f, double radius) {
  if (!(radius > 0.0))
    throw std::invalid_argument("second_derivative_bound: radius > 0");
  if (f.tail && radius >= 0.5 * f.tail->pole_scale)
    throw std::invalid_argument(
        "second_derivative_bound: disk reaches the omitted pole cluster");
  double acc = 0.0;
  for (std::size_t j = 2; j < f.poly.size(); ++j)
    acc += static_cast<double>(j) * static_cast<double>(j - 1) *
           std::abs(f.poly[j]) * std::pow(radius, static_cast<double>(j - 2));
  for (const auto& k : f.kernels) {
    const double dist = std::abs(k.pole - f.domain->b) - radius;
    if (dist <= 0.0)
      throw std::invalid_argument("second_derivative_bound: pole inside the disk");
    const double m = static_cast<double>(k.order);
    acc += std::abs(k.coeff) * m * (m + 1.0) / std::pow(dist, m + 2.0);
  }
  return acc;
}

LipBounds lip_bounds(const TestFunction& f) {
  const DomainSpec& d = *f.domain;
  const double diam = 2.0 * d.outer.radius;
  const double reach =
      d.outer.radius + std::abs(d.b - d.outer.center);  // max |z-b| on clos(U)
  double lip1 = 0.0;
  for (std::size_t j = 1; j < f.poly.size(); ++j)
    lip1 += static_cast<double>(j) * std::abs(f.poly[j]) *
            std::pow(reach, static_cast<double>(j - 1));
  for (const auto& k : f.kernels) {
    const double delta = pole_clearance(d, k.pole);
    const double m = static_cast<double>(k.order);
    lip1 += std::abs(k.coeff) * m / std::pow(delta, m + 1.0);
  }
  if (f.tail) lip1 += f.tail->lip_tail;
  return {lip1, lip1 * std::pow(diam, 1.0 - d.alpha)};
}

namespace {

struct PointPool {
  std::vector<Complex> boundary;
  std::vector<Complex> interior;
};

PointPool make_pool(const DomainSpec& d, std::uint64_t seed, std::size_t size) {
  PointPool pool;
  pool.boundary = sample_boundary_points(d, static_cast<int>(size),
                                         split_seed(seed, 101));
  Rng rng = Rng(seed).derived(102);
  pool.interior.reserve(size);
  while (pool.interior.size() < size) {
    const Complex z = rng.in_disk(d.outer.center, d.outer.radius);
    if (is_in_u(z, d)) pool.interior.push_back(z);
  }
  return pool;
}

}  // namespace

SeminormEstimate empirical_seminorm(const TestFunction& f, long samples,
                                    std::uint64_t seed, unsigned threads) {
  if (samples < 2) throw std::invalid_argument("empirical_seminorm: samples >= 2");
  const DomainSpec& d = *f.domain;
  const PointPool pool = make_pool(d, seed, 4096);
  Rng rng = Rng(seed).derived(103);
  std::vector<std::pair<Complex, Complex>> pairs;
  pairs.reserve(static_cast<std::size_t>(samples));
  auto draw = [&]() -> Complex {
    const bool on_x = rng.uniform() < 0.5;
    const auto& v = on_x ? pool.boundary : pool.interior;
    return v[rng.index(v.size())];
  };
  for (long i = 0; i < samples; ++i) pairs.emplace_back(draw(), draw());

  std::vector<double> ratios(pairs.size(), 0.0);
  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    const auto& [z, w] = pairs[i];
    const double sep = std::abs(z - w);
    if (sep < 1e-14) return;
    ratios[i] = std::abs(eval(f, z) - eval(f, w)) / std::pow(sep, d.alpha);
  });

  SeminormEstimate est;
  est.samples = samples;
  est.seed = seed;
  est.kappa_bar = lip_bounds(f).kappa_bar;
  std::size_t best = 0;
  for (std::size_t i = 0; i < ratios.size(); ++i)
    if (ratios[i] > ratios[best]) best = i;
  est.kappa_hat = ratios[best];
  est.argmax_z = pairs[best].first;
  est.argmax_w = pairs[best].second;
  if (est.kappa_hat > est.kappa_bar * (1.0 + 1e-9))
    throw std::logic_error("empirical_seminorm: sampled sup exceeds analytic bound");
  return est;
}

std::vector<LittleLipPoint> little_lip_profile(const TestFunction& f,
                                               const std::vector<double>& deltas,
                                               long samples, std::uint64_t seed) {
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0))
      throw std::invalid_argument("little_lip_profile: deltas must be positive");
    if (i > 0 && !(deltas[i] < deltas[i - 1]))
      throw std::invalid_argument("little_lip_profile: deltas must decrease");
  }
  const DomainSpec& d = *f.domain;
  const PointPool pool = make_pool(d, seed, 4096);
  std::vector<LittleLipPoint> out;
  out.reserve(deltas.size());
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    Rng rng = Rng(seed).derived(200 + k);
    const double delta = deltas[k];
    double sup = 0.0;
    for (long i = 0; i < samples; ++i) {
      const bool on_x = rng.uniform() < 0.5;
      const auto& v = on_x ? pool.boundary : pool.interior;
      const Complex z = v[rng.index(v.size())];
      const double sep = delta * rng.uniform(0.05, 0.999);
      const Complex w = z + sep * std::polar(1.0, rng.uniform(0.0, 6.283185307179586));
      if (!is_in_u(w, d)) continue;
      const double dzw = std::abs(z - w);
      if (dzw < 1e-14 || dzw >= delta) continue;
      sup = std::max(sup, std::abs(eval(f, z) - eval(f, w)) / std::pow(dzw, d.alpha));
    }
    out.push_back({delta, sup});
  }
  return out;
}

TestFunction build_cluster_function(std::shared_ptr<const DomainSpec> domain,
                                    const ClusterRule& rule) {
  const DomainSpec& d = *domain;
  const double alpha = d.alpha;
  if (rule.schedule.family != RadiiSchedule::Family::geometric)
    throw std::invalid_argument(
        "build_cluster_function: closed-form tails need a geometric schedule");
  if (!(rule.ratio >= 0.0 && rule.ratio < 1.0))
    throw std::invalid_argument("build_cluster_function: ratio in [0,1)");
  if (d.balls.empty())
    throw std::invalid_argument("build_cluster_function: domain has no removed balls");

  // A-norm domination: per-annulus Lip-1 mass k_n eps_n / r_n^2 must form a
  // convergent series against the design's radii.
  const double ratio_lip =
      rule.ratio * std::pow(4.0 / rule.schedule.ratio, 2.0 / (1.0 + alpha));
  if (rule.scale != 0.0 && ratio_lip >= 1.0)
    throw DivergentNorm(
        "build_cluster_function: sum eps_n / r_n^2 diverges for this rule");

  std::vector<KernelTerm> kernels;
  if (rule.scale != 0.0) {
    for (const auto& ball : d.balls) {
      const double dc = std::abs(ball.center - d.b);
      if (dc <= 0.0)
        throw std::invalid_argument("build_cluster_function: ball centered at b");
      const int n = static_cast<int>(std::floor(-std::log2(dc)));
      // the designer places each ball strictly inside one annulus
      const Annulus ann{d.b, n};
      if (!(dc - ball.radius > ann.inner() && dc + ball.radius < ann.outer()))
        throw std::invalid_argument(
            "build_cluster_function: ball is not confined to a single annulus");
      kernels.push_back(
          {ball.center, 1, Complex(rule.scale * std::pow(rule.ratio, n), 0.0)});
    }
  }

  TestFunction f = make_test_function(std::move(domain), std::move(kernels), {});

  // Tails: sum the first 40 omitted annuli directly, then close with the
  // analytic geometric ratio. The measured ratios must have settled onto the
  // analytic ones by then, otherwise the certificate is refused.
  TailCertificate tc;
  tc.eps_ratio = rule.ratio;
  tc.eps_scale = rule.scale;
  tc.last_annulus = rule.schedule.n_max;
  tc.pole_scale = kCenterModulus * std::ldexp(1.0, -(tc.last_annulus + 1));
  if (rule.scale != 0.0) {
    const double rho_oracle = 4.0 * rule.ratio;
    const double rho_eval = 2.0 * rule.ratio;
    KahanSum so, sl, se, sc;
    TailMasses last;
    for (int n = tc.last_annulus + 1; n <= tc.last_annulus + 40; ++n) {
      last = annulus_masses(alpha, rule, n);
      so.add(last.oracle);
      sl.add(last.lip);
      se.add(last.eval_b);
      sc.add(last.coeff);
    }
    const TailMasses next = annulus_masses(alpha, rule, tc.last_annulus + 41);
    if (last.oracle > 0.0 &&
        std::abs(next.lip / last.lip - ratio_lip) > 1e-9 * ratio_lip)
      throw TailNotCertified(
          "build_cluster_function: tail masses did not settle onto the analytic ratio");
    tc.oracle_tail = so.value() + last.oracle * rho_oracle / (1.0 - rho_oracle);
    tc.lip_tail = sl.value() + last.lip * ratio_lip / (1.0 - ratio_lip);
    tc.eval_tail_at_b = se.value() + last.eval_b * rho_eval / (1.0 - rho_eval);
    tc.coeff_tail = sc.value() + last.coeff * rule.ratio / (1.0 - rule.ratio);
  }
  f.tail = tc;
  return f;
}

}  // namespace lipalpha
