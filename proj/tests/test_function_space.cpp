#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lipalpha/errors.hpp"
#include "lipalpha/function_space.hpp"
#include "lipalpha/rng.hpp"
#include "test_support.hpp"

using namespace lipalpha;
using namespace lipalpha::testing;

namespace {

TestFunction simple_pole(std::shared_ptr<const DomainSpec> d, Complex pole,
                         Complex coeff = Complex(1.0)) {
  return make_test_function(std::move(d), {{pole, 1, coeff}}, {});
}

}  // namespace

TEST_CASE("evaluation of kernels and polynomials") {
  auto d = shared(one_ball_domain());
  const TestFunction f = simple_pole(d, Complex(0.5, 0.0));
  CHECK(eval(f, Complex(0.0, 0.0)) == Complex(-2.0, 0.0));

  const TestFunction sq = make_test_function(d, {}, {Complex(0.0), Complex(0.0), Complex(1.0)});
  CHECK(eval(sq, d->b) == Complex(0.0, 0.0));  // (z-b)^2 at b

  const TestFunction idf = identity_function(d);
  CHECK(eval(idf, Complex(0.3, 0.1)) == Complex(0.3, 0.1));

  CHECK_THROWS_AS(eval(f, Complex(0.5, 0.0)), PoleHit);
}

TEST_CASE("derivatives") {
  auto d = shared(one_ball_domain());
  const TestFunction f = simple_pole(d, Complex(0.5, 0.0));
  CHECK(derivative_at(f, Complex(0.0, 0.0)) == Complex(-4.0, 0.0));

  const TestFunction idf = identity_function(d);
  CHECK(derivative_at(idf, Complex(0.2, -0.7)) == Complex(1.0, 0.0));

  // second-order kernel: d/dz (z-a)^-2 at 0 with a = 0.5 gives -2/(-0.5)^3 = 16
  const TestFunction f2 = make_test_function(d, {{Complex(0.5, 0.0), 2, Complex(1.0)}}, {});
  CHECK(derivative_at(f2, Complex(0.0, 0.0)) == Complex(16.0, 0.0));
}

TEST_CASE("the derivation oracle is normalised and classical") {
  auto d = shared(one_ball_domain());
  CHECK(derivation_oracle(identity_function(d)) == Complex(1.0, 0.0));
  CHECK(derivation_oracle(simple_pole(d, Complex(0.5, 0.0))) == Complex(-4.0, 0.0));
}

TEST_CASE("oracle linearity") {
  auto d = shared(two_ball_domain());
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const Complex c1(rng.uniform(-2, 2), rng.uniform(-2, 2));
    const Complex c2(rng.uniform(-2, 2), rng.uniform(-2, 2));
    const TestFunction f = make_test_function(
        d, {{Complex(0.5, 0.0), 1, Complex(rng.uniform(-1, 1), rng.uniform(-1, 1))}},
        {Complex(rng.uniform(-1, 1)), Complex(rng.uniform(-1, 1))});
    const TestFunction g = make_test_function(
        d, {{Complex(0.0, 0.5), 2, Complex(rng.uniform(-1, 1), rng.uniform(-1, 1))}},
        {Complex(0.0), Complex(0.0), Complex(rng.uniform(-1, 1))});

    std::vector<KernelTerm> kernels;
    for (auto k : f.kernels) { k.coeff *= c1; kernels.push_back(k); }
    for (auto k : g.kernels) { k.coeff *= c2; kernels.push_back(k); }
    std::vector<Complex> poly(3, Complex(0.0));
    for (std::size_t j = 0; j < f.poly.size(); ++j) poly[j] += c1 * f.poly[j];
    for (std::size_t j = 0; j < g.poly.size(); ++j) poly[j] += c2 * g.poly[j];
    const TestFunction combo = make_test_function(d, kernels, poly);

    const Complex lhs = derivation_oracle(combo);
    const Complex rhs = c1 * derivation_oracle(f) + c2 * derivation_oracle(g);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("Leibniz rule through explicit products") {
  auto d = shared(two_ball_domain());
  const Complex b = d->b;

  SUBCASE("two simple poles via partial fractions") {
    const Complex a1(0.5, 0.0), a2(0.0, 0.5);
    const TestFunction f = simple_pole(d, a1);
    const TestFunction g = simple_pole(d, a2);
    // 1/((z-a1)(z-a2)) = (1/(a1-a2)) [1/(z-a1) - 1/(z-a2)]
    const Complex s = 1.0 / (a1 - a2);
    const TestFunction product =
        make_test_function(d, {{a1, 1, s}, {a2, 1, -s}}, {});
    const Complex lhs = derivation_oracle(product);
    const Complex rhs =
        eval(f, b) * derivation_oracle(g) + derivation_oracle(f) * eval(g, b);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
  }

  SUBCASE("polynomial product") {
    // f = (z-b)+2, g = (z-b)^2-1, fg = (z-b)^3+2(z-b)^2-(z-b)-2
    const TestFunction f = make_test_function(d, {}, {Complex(2.0), Complex(1.0)});
    const TestFunction g =
        make_test_function(d, {}, {Complex(-1.0), Complex(0.0), Complex(1.0)});
    const TestFunction fg = make_test_function(
        d, {}, {Complex(-2.0), Complex(-1.0), Complex(2.0), Complex(1.0)});
    const Complex lhs = derivation_oracle(fg);
    const Complex rhs =
        eval(f, b) * derivation_oracle(g) + derivation_oracle(f) * eval(g, b);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("analytic Lipschitz bounds") {
  auto d = shared(one_ball_domain());

  const TestFunction f = simple_pole(d, Complex(0.5, 0.0));
  const LipBounds lb = lip_bounds(f);
  CHECK(lb.lip1 == doctest::Approx(100.0).epsilon(1e-12));  // 1/delta^2, delta = 0.1
  CHECK(lb.kappa_bar == doctest::Approx(100.0 * std::sqrt(2.0)).epsilon(1e-12));

  const LipBounds id_lb = lip_bounds(identity_function(d));
  CHECK(id_lb.lip1 == doctest::Approx(1.0));
  CHECK(id_lb.kappa_bar == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  // homogeneity: bounds scale with |c|
  const TestFunction cf = simple_pole(d, Complex(0.5, 0.0), Complex(0.0, -3.0));
  CHECK(lip_bounds(cf).lip1 == doctest::Approx(300.0).epsilon(1e-12));
  CHECK(lip_bounds(cf).kappa_bar ==
        doctest::Approx(3.0 * lb.kappa_bar).epsilon(1e-12));
}

TEST_CASE("empirical seminorm") {
  auto d = shared(two_ball_domain());

  const TestFunction constant = make_test_function(d, {}, {Complex(4.2, -1.0)});
  CHECK(empirical_seminorm(constant, 2000, 5).kappa_hat == 0.0);

  // f = z on a domain of diameter 2: sup ratio = diam^(1/2) = sqrt(2),
  // attained at antipodal boundary points. Oracle: dense boundary-grid max.
  const TestFunction idf = identity_function(d);
  double oracle = 0.0;
  for (int i = 0; i < 800; ++i)
    for (int j = i + 1; j < 800; ++j) {
      const double sep =
          std::abs(std::polar(1.0, 2 * kPi * i / 800.0) -
                   std::polar(1.0, 2 * kPi * j / 800.0));
      if (sep > 1e-14) oracle = std::max(oracle, std::sqrt(sep));
    }
  CHECK(oracle == doctest::Approx(std::sqrt(2.0)).epsilon(1e-4));

  const SeminormEstimate est = empirical_seminorm(idf, 200000, 5, 2);
  CHECK(est.kappa_hat == doctest::Approx(oracle).epsilon(0.02));
  CHECK(est.kappa_hat <= est.kappa_bar * (1.0 + 1e-9));

  // nondecreasing in the sample budget (same seed, prefix sampling)
  const SeminormEstimate small = empirical_seminorm(idf, 50000, 5);
  CHECK(small.kappa_hat <= est.kappa_hat * (1.0 + 1e-15));

  // bound holds for a kernel too
  const TestFunction pole = simple_pole(d, Complex(0.5, 0.0));
  const SeminormEstimate pe = empirical_seminorm(pole, 50000, 9);
  CHECK(pe.kappa_hat <= pe.kappa_bar * (1.0 + 1e-9));
  CHECK(pe.kappa_hat > 0.0);
}

TEST_CASE("little-lip profile") {
  auto d = shared(two_ball_domain());
  const std::vector<double> deltas = {0.5, 0.25, 0.125, 0.0625, 0.03125};

  const TestFunction constant = make_test_function(d, {}, {Complex(1.0)});
  for (const auto& p : little_lip_profile(constant, deltas, 500, 3))
    CHECK(p.sup_ratio == 0.0);

  const TestFunction idf = identity_function(d);
  const auto profile = little_lip_profile(idf, deltas, 4000, 3);
  REQUIRE(profile.size() == deltas.size());
  const double lip1 = lip_bounds(idf).lip1;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    // analytic profile: sup |z-w|^(1/2) over separations < delta is delta^(1/2)
    CHECK(profile[i].sup_ratio <= std::sqrt(deltas[i]) * (1.0 + 1e-9));
    CHECK(profile[i].sup_ratio >= 0.9 * std::sqrt(deltas[i]));
    CHECK(profile[i].sup_ratio <=
          lip1 * std::pow(deltas[i], 0.5) * (1.0 + 1e-9));
    if (i > 0) CHECK(profile[i].sup_ratio < profile[i - 1].sup_ratio);
  }

  CHECK_THROWS_AS(little_lip_profile(idf, {0.1, 0.2}, 100, 1),
                  std::invalid_argument);
}

TEST_CASE("construction guards") {
  auto d = shared(one_ball_domain());
  // pole must sit inside a removed ball with margin
  CHECK_THROWS_AS(simple_pole(d, Complex(0.2, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(simple_pole(d, Complex(0.58, 0.0)), std::invalid_argument);
  // polynomial degree cap
  CHECK_THROWS_AS(make_test_function(d, {}, std::vector<Complex>(8, Complex(1.0))),
                  std::invalid_argument);
}

TEST_CASE("cluster functions: divergence and certification") {
  auto d = shared(saturated_design(16));

  // eps_n = 8^-n against r_n = 2^-2n: sum eps/r^2 = sum 2^n diverges
  ClusterRule bad;
  bad.ratio = 0.125;
  bad.scale = 1.0;
  bad.schedule = dyadic_schedule(1, 16, 1, true);
  CHECK_THROWS_AS(build_cluster_function(d, bad), DivergentNorm);

  // eps_n = 32^-n: mass ratio 16/32 = 1/2, certified
  ClusterRule good = bad;
  good.ratio = 0.03125;
  const TestFunction f = build_cluster_function(d, good);
  CHECK(f.kernels.size() == d->balls.size());
  REQUIRE(f.tail.has_value());
  CHECK(f.tail->oracle_tail > 0.0);
  CHECK(f.tail->oracle_tail < 1e-8);  // deep truncation: oracle certified
  CHECK(std::isfinite(lip_bounds(f).kappa_bar));

  // scale 0 gives the zero function
  ClusterRule zero = good;
  zero.scale = 0.0;
  const TestFunction z = build_cluster_function(d, zero);
  CHECK(eval(z, Complex(0.3, 0.2)) == Complex(0.0));
  CHECK(derivation_oracle(z) == Complex(0.0));

  // little-lip profile decreases for the certified cluster function
  const auto profile =
      little_lip_profile(f, {0.25, 0.0625, 0.015625}, 3000, 11);
  CHECK(profile.front().sup_ratio > profile.back().sup_ratio);
}

TEST_CASE("oracle series terms of the 8^-n coefficient rule") {
  // eps_n = 8^-n with poles at |b - a| = 0.75 * 2^-n makes each oracle term
  // eps_n / |b - a|^2 = (16/9) 2^-n: absolutely summable even though the
  // rule fails the Lipschitz-mass test. Built directly from kernel terms.
  auto d = shared(saturated_design(12));
  for (int n = 3; n <= 12; ++n) {
    const auto balls = balls_meeting_annulus(*d, n);
    REQUIRE(balls.size() == 1);
    const double eps = std::ldexp(1.0, -3 * n);
    const TestFunction one_term =
        make_test_function(d, {{balls[0].center, 1, Complex(eps)}}, {});
    const double term = std::abs(derivation_oracle(one_term));
    CHECK(term ==
          doctest::Approx((16.0 / 9.0) * std::ldexp(1.0, -n)).epsilon(1e-12));
  }
}

TEST_CASE("cluster truncation depths agree within the certified tail") {
  // nested designs: the deep one extends the shallow one annulus by annulus.
  // The cutoff is shallow enough that the analytic tails dominate the
  // floating-point summation noise of the comparison.
  auto shallow = shared(saturated_design(8, 7));
  auto deep = shared(saturated_design(20, 7));

  ClusterRule rule;
  rule.ratio = 0.03125;
  rule.scale = 1.0;
  rule.schedule = dyadic_schedule(1, 8, 1, true);
  const TestFunction f8 = build_cluster_function(shallow, rule);
  rule.schedule = dyadic_schedule(1, 20, 1, true);
  const TestFunction f20 = build_cluster_function(deep, rule);

  // oracle difference bounded by the shallow certificate
  const Complex o8 = derivative_at(f8, shallow->b);
  const Complex o20 = derivative_at(f20, deep->b);
  REQUIRE(f8.tail.has_value());
  CHECK(std::abs(o8 - o20) <= f8.tail->oracle_tail);

  // value at b likewise
  CHECK(std::abs(eval(f8, shallow->b) - eval(f20, deep->b)) <=
        f8.tail->eval_tail_at_b);
  CHECK(std::abs(eval(f8, Complex(-0.2, 0.0)) - eval(f20, Complex(-0.2, 0.0))) <=
        eval_tail_bound(f8, Complex(-0.2, 0.0)));
  CHECK(std::abs(derivative_at(f8, Complex(-0.2, 0.0)) -
                 derivative_at(f20, Complex(-0.2, 0.0))) <=
        derivative_tail_bound(f8, Complex(-0.2, 0.0)));

  // an artificially failed certificate is refused by the oracle
  TestFunction uncertified = f8;
  uncertified.tail->oracle_tail = 1e-3;
  CHECK_THROWS_AS(derivation_oracle(uncertified), TailNotCertified);
}

TEST_CASE("difference quotients obey the Taylor bound near b") {
  auto d = shared(one_ball_domain());
  const TestFunction f = make_test_function(
      d, {{Complex(0.5, 0.0), 1, Complex(1.0, 0.5)}},
      {Complex(0.3), Complex(-1.0, 0.2), Complex(0.0), Complex(0.25)});
  const double radius = 0.25;  // half the pole distance
  const double c_f = second_derivative_bound(f, radius) / 2.0;
  const Complex fb = eval(f, d->b);
  const Complex fpb = derivative_at(f, d->b);

  Rng rng(13);
  int tested = 0;
  while (tested < 1000) {
    const Complex z = d->b + rng.uniform(1e-6, radius * 0.999) *
                                 std::polar(1.0, rng.uniform(0.0, 2 * kPi));
    if (!is_in_u(z, *d)) continue;
    const Complex q = (eval(f, z) - fb) / (z - d->b);
    CHECK(std::abs(q - fpb) <= c_f * std::abs(z - d->b) * (1.0 + 1e-9) + 1e-15);
    ++tested;
  }
}
