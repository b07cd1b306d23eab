#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lipalpha/function_space.hpp"
#include "lipalpha/geometry.hpp"

namespace lipalpha {

// One atom of a measure on X x X, kept off the diagonal.
struct PairAtom {
  Complex z, w;
  Complex weight;
};

// Finite atomic measure on X x X off the diagonal. Realizes the functional
//   f  |->  sum_k c_k (f(z_k) - f(w_k)) / |z_k - w_k|^alpha,
// the atomic form of the pair-measure representation of a functional that
// annihilates constants.
class PairMeasure {
 public:
  // Validates each atom: both points within 1e-10 of X and |z-w| > 1e-12.
  PairMeasure(const DomainSpec& d, std::vector<PairAtom> atoms);

  const std::vector<PairAtom>& atoms() const { return atoms_; }
  double alpha() const { return alpha_; }
  Complex b() const { return b_; }
  double total_variation() const;
  bool empty() const { return atoms_.empty(); }

 private:
  std::vector<PairAtom> atoms_;
  double alpha_;
  Complex b_;
};

struct ScalarAtom {
  Complex point;
  Complex weight;
};

// Finite atomic measure on X (the residual part of a module action).
struct ScalarMeasure {
  std::vector<ScalarAtom> atoms;
  double total_variation() const;
};

// g . T1 = S1 + S2: S1 is again a pair measure (weights g(z_k) c_k), S2 a
// scalar measure at the w_k with weights c_k (g(z_k) - g(w_k)) / |z_k-w_k|^a.
struct ActionSplit {
  PairMeasure S1;
  ScalarMeasure S2;
};

using Evaluatable = std::function<Complex(Complex)>;

// < f, T1 > as a finite sum over atoms.
Complex apply_T1(const PairMeasure& mu, const Evaluatable& f);
Complex apply_T1(const PairMeasure& mu, const TestFunction& f);

// < phi, S2 > = sum of weights * phi(point).
Complex apply_scalar(const ScalarMeasure& lambda, const Evaluatable& phi);

// Cauchy transform of T1:
//   H(a) = (1/pi) sum c_k (z_k - w_k) / ((z_k - a)(w_k - a) |z_k - w_k|^alpha).
// For a off X this equals < 1/(pi(a-z)), T1 >. Throws TransformSingular when
// a coincides with an atom point.
Complex cauchy_H(const PairMeasure& mu, Complex a);

// Pointwise majorant: sum |c_k| |w_k - z_k|^(1-alpha) / (|z_k-a||w_k-a|),
// with |pi H(a)| <= H~(a). The 1/pi of the transform stays outside here.
double cauchy_H_majorant(const PairMeasure& mu, Complex a);

// Exact split of the module action; for every evaluatable phi,
// apply_T1(S1, phi) + apply_scalar(S2, phi) == apply_T1(mu, g * phi).
ActionSplit module_action(const TestFunction& g, const PairMeasure& mu);

// (1/pi) sum weight / (a - point); obeys |.| <= ||lambda|| / (pi dist(a, atoms)).
Complex cauchy_scalar(const ScalarMeasure& lambda, Complex a);

// Smallest distance from a to the atom points (pair or scalar).
double dist_to_atoms(const PairMeasure& mu, Complex a);
double dist_to_atoms(const ScalarMeasure& lambda, Complex a);

// Least-|c|^2 weights on the given boundary pairs solving
//   T1((z-b)^m) = [m == 1]   for m = 1..degree,
// so T1 agrees with the normalised derivation on low-degree polynomials.
// Throws RankDeficient when the residual exceeds 1e-10.
PairMeasure moment_match(const DomainSpec& d,
                         const std::vector<std::pair<Complex, Complex>>& pairs,
                         int degree);

// Residual of the last moment_match solve (2-norm); for reporting.
double moment_match_residual(const DomainSpec& d,
                             const std::vector<std::pair<Complex, Complex>>& pairs,
                             int degree);

// Deterministic helpers used by experiments and the CLI: random boundary
// pairs with a minimum separation, and a random measure built on them.
std::vector<std::pair<Complex, Complex>> random_boundary_pairs(
    const DomainSpec& d, int count, std::uint64_t seed, double min_sep = 1e-3);
PairMeasure random_pair_measure(const DomainSpec& d, int atoms, std::uint64_t seed);

}  // namespace lipalpha
