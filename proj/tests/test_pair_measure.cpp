#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lipalpha/errors.hpp"
#include "lipalpha/pair_measure.hpp"
#include "lipalpha/rng.hpp"
#include "test_support.hpp"

using namespace lipalpha;
using namespace lipalpha::testing;

namespace {

// Single atom at (1, -1) with weight 1 on the unit circle of the two-ball
// domain (b = 0, alpha = 1/2).
PairMeasure unit_atom(const DomainSpec& d, Complex weight = Complex(1.0)) {
  return PairMeasure(d, {{Complex(1.0, 0.0), Complex(-1.0, 0.0), weight}});
}

}  // namespace

TEST_CASE("apply_T1 on atoms") {
  const DomainSpec d = two_ball_domain();
  const PairMeasure mu = unit_atom(d);

  CHECK(apply_T1(mu, [](Complex) { return Complex(3.7, -0.2); }) == Complex(0.0));

  // (z - w)/|z - w|^(1/2) = 2 / sqrt(2) = sqrt(2)
  const Complex v = apply_T1(mu, [](Complex z) { return z; });
  CHECK(v.real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(v.imag() == 0.0);

  const PairMeasure empty(d, {});
  CHECK(empty.total_variation() == 0.0);
  CHECK(apply_T1(empty, [](Complex z) { return z; }) == Complex(0.0));

  // linearity over random integrands
  const PairMeasure big = random_pair_measure(d, 15, 3);
  Rng rng(4);
  for (int i = 0; i < 40; ++i) {
    const Complex a(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Complex c(rng.uniform(-1, 1), rng.uniform(-1, 1));
    auto f = [&](Complex z) { return a * z * z + Complex(0.3, -1.0) * z; };
    auto g = [&](Complex z) { return c / (z - Complex(3.0, 1.0)); };
    const Complex lhs = apply_T1(big, [&](Complex z) { return f(z) + g(z); });
    const Complex rhs = apply_T1(big, f) + apply_T1(big, g);
    CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("atom validation") {
  const DomainSpec d = two_ball_domain();
  // off-boundary point
  CHECK_THROWS_AS(PairMeasure(d, {{Complex(0.3, 0.0), Complex(1.0, 0.0), 1.0}}),
                  std::invalid_argument);
  // on the diagonal
  CHECK_THROWS_AS(PairMeasure(d, {{Complex(1.0, 0.0), Complex(1.0, 0.0), 1.0}}),
                  std::invalid_argument);
  // on a removed-ball circle: fine
  CHECK_NOTHROW(PairMeasure(d, {{Complex(0.6, 0.0), Complex(-1.0, 0.0), 1.0}}));
}

TEST_CASE("Cauchy transform of the pair functional") {
  const DomainSpec d = two_ball_domain();
  const PairMeasure mu = unit_atom(d);
  const Complex a(0.0, 2.0);

  // independent oracle: (1-2i)(-1-2i) expands to -5, so
  // H = (1/pi) * 2 / (-5 sqrt(2)) = -sqrt(2)/(5 pi)
  const Complex denom = (Complex(1.0, 0.0) - a) * (Complex(-1.0, 0.0) - a);
  CHECK(denom == Complex(-5.0, 0.0));
  const double expected = -std::sqrt(2.0) / (5.0 * kPi);
  const Complex h = cauchy_H(mu, a);
  CHECK(h.real() == doctest::Approx(expected).epsilon(1e-14));
  CHECK(std::abs(h.imag()) < 1e-16);
  CHECK(expected == doctest::Approx(-0.09003163161571061).epsilon(1e-14));

  const PairMeasure empty(d, {});
  CHECK(cauchy_H(empty, a) == Complex(0.0));

  CHECK_THROWS_AS(cauchy_H(mu, Complex(1.0, 0.0)), TransformSingular);
}

TEST_CASE("transform dual path: H(a) = <1/(pi(a-z)), T1> off X") {
  const DomainSpec d = two_ball_domain();
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const PairMeasure mu = random_pair_measure(d, 12, 100 + trial);
    Complex a;
    do {
      a = rng.in_disk(Complex(0.0), 1.6);
    } while (dist_to_boundary(a, d) < 0.05);
    const Complex direct = cauchy_H(mu, a);
    const Complex pulled =
        apply_T1(mu, [&](Complex z) { return 1.0 / (kPi * (a - z)); });
    CHECK(std::abs(direct - pulled) <= 1e-13 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("majorant dominates pi |H|") {
  const DomainSpec d = two_ball_domain();
  const PairMeasure mu = unit_atom(d);
  const Complex a(0.0, 2.0);

  // single atom: H~ = sqrt(2)/(sqrt(5) sqrt(5)) = sqrt(2)/5, saturated
  const double tilde = cauchy_H_majorant(mu, a);
  CHECK(tilde == doctest::Approx(std::sqrt(2.0) / 5.0).epsilon(1e-15));
  CHECK(kPi * std::abs(cauchy_H(mu, a)) ==
        doctest::Approx(tilde).epsilon(1e-13));  // no cancellation possible

  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const PairMeasure random = random_pair_measure(d, 20, 500 + trial);
    for (int k = 0; k < 100; ++k) {
      Complex p;
      do {
        p = rng.in_disk(Complex(0.0), 1.8);
      } while (dist_to_boundary(p, d) < 1e-3);
      CHECK(kPi * std::abs(cauchy_H(random, p)) <=
            cauchy_H_majorant(random, p) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("module action splits exactly") {
  const DomainSpec d = two_ball_domain();
  auto dp = shared(two_ball_domain());
  const PairMeasure mu = unit_atom(d);

  SUBCASE("g identically 1") {
    const TestFunction one = make_test_function(dp, {}, {Complex(1.0)});
    const ActionSplit split = module_action(one, mu);
    REQUIRE(split.S1.atoms().size() == 1);
    CHECK(split.S1.atoms()[0].weight == Complex(1.0));
    CHECK(split.S2.total_variation() == 0.0);
  }

  SUBCASE("g = z on the single atom saturates the residual bound") {
    const TestFunction g = identity_function(dp);  // b = 0, so g(z) = z
    const ActionSplit split = module_action(g, mu);
    REQUIRE(split.S2.atoms.size() == 1);
    CHECK(split.S2.atoms[0].point == Complex(-1.0, 0.0));
    CHECK(split.S2.atoms[0].weight.real() ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    const double bound = lip_bounds(g).kappa_bar * mu.total_variation();
    CHECK(split.S2.total_variation() <= bound * (1.0 + 1e-12));
    CHECK(split.S2.total_variation() == doctest::Approx(bound).epsilon(1e-13));
  }

  SUBCASE("split identity over random triples") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
      const PairMeasure random = random_pair_measure(d, 10, 900 + trial);
      const TestFunction g = make_test_function(
          dp, {},
          {Complex(rng.uniform(-1, 1), rng.uniform(-1, 1)),
           Complex(rng.uniform(-1, 1), rng.uniform(-1, 1)),
           Complex(rng.uniform(-1, 1), rng.uniform(-1, 1))});
      const Complex pole(rng.uniform(2.0, 3.0), rng.uniform(-1.0, 1.0));
      auto phi = [&](Complex z) { return 1.0 / (z - pole) + z; };
      const ActionSplit split = module_action(g, random);
      const Complex lhs = apply_T1(split.S1, phi) + apply_scalar(split.S2, phi);
      const Complex rhs =
          apply_T1(random, [&](Complex z) { return eval(g, z) * phi(z); });
      CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(1.0, std::abs(rhs)));

      const double bound = lip_bounds(g).kappa_bar * random.total_variation();
      CHECK(split.S2.total_variation() <= bound * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("scalar Cauchy transform and its bound") {
  const DomainSpec d = two_ball_domain();

  ScalarMeasure lambda{{{Complex(0.0, 0.0), Complex(1.0)}}};
  CHECK(cauchy_scalar(lambda, Complex(2.0, 0.0)).real() ==
        doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-15));

  ScalarMeasure zero{};
  CHECK(cauchy_scalar(zero, Complex(2.0, 0.0)) == Complex(0.0));
  CHECK_THROWS_AS(cauchy_scalar(lambda, Complex(0.0, 0.0)), TransformSingular);

  Rng rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    ScalarMeasure lm;
    const int n = 1 + static_cast<int>(rng.index(8));
    for (int i = 0; i < n; ++i)
      lm.atoms.push_back({std::polar(1.0, rng.uniform(0.0, 2 * kPi)),
                          Complex(rng.uniform(-1, 1), rng.uniform(-1, 1))});
    const Complex a = rng.in_disk(Complex(0.0), 3.0);
    const double dist = dist_to_atoms(lm, a);
    if (dist < 1e-6) continue;
    const double tv = lm.total_variation();
    const double v = std::abs(cauchy_scalar(lm, a));
    CHECK(v <= tv / (kPi * dist) * (1.0 + 1e-12));
    CHECK(v <= tv / dist * (1.0 + 1e-12));
  }
}

TEST_CASE("moment matching") {
  const DomainSpec d = two_ball_domain();

  SUBCASE("degree 1, single pair") {
    const PairMeasure mu =
        moment_match(d, {{Complex(1.0, 0.0), Complex(-1.0, 0.0)}}, 1);
    REQUIRE(mu.atoms().size() == 1);
    CHECK(mu.atoms()[0].weight.real() ==
          doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-14));
    CHECK(std::abs(mu.atoms()[0].weight.imag()) < 1e-15);
  }

  SUBCASE("pairs symmetric under negation split the weight equally") {
    const PairMeasure mu = moment_match(
        d,
        {{Complex(1.0, 0.0), Complex(-1.0, 0.0)},
         {Complex(-1.0, 0.0), Complex(1.0, 0.0)}},
        1);
    REQUIRE(mu.atoms().size() == 2);
    const Complex c0 = mu.atoms()[0].weight, c1 = mu.atoms()[1].weight;
    CHECK(std::abs(c0 + c1) < 1e-14);
    CHECK(std::abs(c0) == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-13));
  }

  SUBCASE("degree 3 with 8 spread pairs") {
    const auto pairs = random_boundary_pairs(d, 8, 77, 0.15);
    CHECK(moment_match_residual(d, pairs, 3) < 1e-10);
    const PairMeasure mu = moment_match(d, pairs, 3);

    // recompute the moments from the returned weights
    for (int m = 1; m <= 3; ++m) {
      const Complex got = apply_T1(mu, [&](Complex z) {
        Complex acc = 1.0;
        for (int j = 0; j < m; ++j) acc *= (z - d.b);
        return acc;
      });
      const Complex want = m == 1 ? Complex(1.0) : Complex(0.0);
      CHECK(std::abs(got - want) < 1e-10);
    }
    // independent check: T1(z^2 - 2 b z) = 0 (b = 0 here)
    CHECK(std::abs(apply_T1(mu, [&](Complex z) {
            return z * z - 2.0 * d.b * z;
          })) < 1e-10);
  }

  SUBCASE("infeasible systems raise RankDeficient") {
    // duplicated pair with z + w != 0: T1(z) = 1 and T1(z^2) = 0 conflict
    CHECK_THROWS_AS(moment_match(d,
                                 {{Complex(1.0, 0.0), Complex(0.0, 1.0)},
                                  {Complex(1.0, 0.0), Complex(0.0, 1.0)}},
                                 2),
                    RankDeficient);
  }
}

TEST_CASE("far-field decay of moment-matched transforms") {
  const DomainSpec d = two_ball_domain();
  const auto pairs = random_boundary_pairs(d, 6, 13, 0.15);
  const PairMeasure mu = moment_match(d, pairs, 1);
  const double diam = 2.0 * d.outer.radius;
  for (double theta : {0.4, 2.1, 4.4}) {
    const Complex a = 1000.0 * diam * std::polar(1.0, theta);
    const Complex laurent = a * a * kPi * cauchy_H(mu, a);
    CHECK(std::abs(laurent - Complex(1.0)) < 1e-2);
  }
}
