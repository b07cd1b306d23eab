#include "lipalpha/pair_measure.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lipalpha/errors.hpp"
#include "lipalpha/numerics.hpp"
#include "lipalpha/rng.hpp"

namespace lipalpha {

namespace {

constexpr double kOnBoundaryTol = 1e-10;
constexpr double kDiagonalSep = 1e-12;
constexpr double kPi = 3.14159265358979323846264338327950288;

double abs2(Complex z) { return std::norm(z); }

// Moment system matrix for the pairs: row m-1 is ((z-b)^m - (w-b)^m)/|z-w|^a.
Eigen::MatrixXcd moment_matrix(const DomainSpec& d,
                               const std::vector<std::pair<Complex, Complex>>& pairs,
                               int degree) {
  Eigen::MatrixXcd A(degree, static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const Complex z = pairs[k].first - d.b;
    const Complex w = pairs[k].second - d.b;
    const double denom = std::pow(std::abs(pairs[k].first - pairs[k].second), d.alpha);
    Complex zp = 1.0, wp = 1.0;
    for (int m = 1; m <= degree; ++m) {
      zp *= z;
      wp *= w;
      A(m - 1, static_cast<Eigen::Index>(k)) = (zp - wp) / denom;
    }
  }
  return A;
}

Eigen::VectorXcd solve_moments(const DomainSpec& d,
                               const std::vector<std::pair<Complex, Complex>>& pairs,
                               int degree, double& residual) {
  if (degree < 1) throw std::invalid_argument("moment_match: degree >= 1");
  if (pairs.size() < static_cast<std::size_t>(degree))
    throw std::invalid_argument("moment_match: need at least `degree` pairs");
  const Eigen::MatrixXcd A = moment_matrix(d, pairs, degree);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(degree);
  e(0) = 1.0;
  const Eigen::VectorXcd c =
      A.completeOrthogonalDecomposition().solve(e);  // least-norm solution
  residual = (A * c - e).norm();
  return c;
}

}  // namespace

PairMeasure::PairMeasure(const DomainSpec& d, std::vector<PairAtom> atoms)
    : atoms_(std::move(atoms)), alpha_(d.alpha), b_(d.b) {
  for (const auto& a : atoms_) {
    if (!is_finite(a.z) || !is_finite(a.w) || !is_finite(a.weight))
      throw std::invalid_argument("PairMeasure: non-finite atom");
    if (std::abs(a.z - a.w) <= kDiagonalSep)
      throw std::invalid_argument("PairMeasure: atom too close to the diagonal");
    if (dist_to_boundary(a.z, d) >= kOnBoundaryTol ||
        dist_to_boundary(a.w, d) >= kOnBoundaryTol)
      throw std::invalid_argument("PairMeasure: atom point not on X");
  }
}

double PairMeasure::total_variation() const {
  KahanSum s;
  for (const auto& a : atoms_) s.add(std::abs(a.weight));
  return s.value();
}

double ScalarMeasure::total_variation() const {
  KahanSum s;
  for (const auto& a : atoms) s.add(std::abs(a.weight));
  return s.value();
}

Complex apply_T1(const PairMeasure& mu, const Evaluatable& f) {
  Complex acc = 0.0;
  for (const auto& a : mu.atoms())
    acc += a.weight * (f(a.z) - f(a.w)) / std::pow(std::abs(a.z - a.w), mu.alpha());
  return acc;
}

Complex apply_T1(const PairMeasure& mu, const TestFunction& f) {
  return apply_T1(mu, [&](Complex z) { return eval(f, z); });
}

Complex apply_scalar(const ScalarMeasure& lambda, const Evaluatable& phi) {
  Complex acc = 0.0;
  for (const auto& a : lambda.atoms) acc += a.weight * phi(a.point);
  return acc;
}

Complex cauchy_H(const PairMeasure& mu, Complex a) {
  Complex acc = 0.0;
  for (const auto& at : mu.atoms()) {
    const Complex dz = at.z - a, dw = at.w - a;
    if (abs2(dz) == 0.0 || abs2(dw) == 0.0)
      throw TransformSingular("cauchy_H: a coincides with an atom point");
    acc += at.weight * (at.z - at.w) /
           (dz * dw * std::pow(std::abs(at.z - at.w), mu.alpha()));
  }
  return acc / kPi;
}

double cauchy_H_majorant(const PairMeasure& mu, Complex a) {
  KahanSum acc;
  for (const auto& at : mu.atoms()) {
    const double dz = std::abs(at.z - a), dw = std::abs(at.w - a);
    if (dz == 0.0 || dw == 0.0)
      throw TransformSingular("cauchy_H_majorant: a coincides with an atom point");
    acc.add(std::abs(at.weight) *
            std::pow(std::abs(at.w - at.z), 1.0 - mu.alpha()) / (dz * dw));
  }
  return acc.value();
}

ActionSplit module_action(const TestFunction& g, const PairMeasure& mu) {
  std::vector<PairAtom> main_atoms;
  std::vector<ScalarAtom> residual_atoms;
  main_atoms.reserve(mu.atoms().size());
  residual_atoms.reserve(mu.atoms().size());
  const double alpha = mu.alpha();
  for (const auto& at : mu.atoms()) {
    const Complex gz = eval(g, at.z), gw = eval(g, at.w);
    main_atoms.push_back({at.z, at.w, gz * at.weight});
    residual_atoms.push_back(
        {at.w, at.weight * (gz - gw) / std::pow(std::abs(at.z - at.w), alpha)});
  }
  ActionSplit split{PairMeasure(*g.domain, std::move(main_atoms)),
                    ScalarMeasure{std::move(residual_atoms)}};
  return split;
}

Complex cauchy_scalar(const ScalarMeasure& lambda, Complex a) {
  Complex acc = 0.0;
  for (const auto& at : lambda.atoms) {
    const Complex da = a - at.point;
    if (abs2(da) == 0.0)
      throw TransformSingular("cauchy_scalar: a coincides with an atom point");
    acc += at.weight / da;
  }
  return acc / kPi;
}

double dist_to_atoms(const PairMeasure& mu, Complex a) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& at : mu.atoms())
    best = std::min({best, std::abs(a - at.z), std::abs(a - at.w)});
  return best;
}

double dist_to_atoms(const ScalarMeasure& lambda, Complex a) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& at : lambda.atoms) best = std::min(best, std::abs(a - at.point));
  return best;
}

PairMeasure moment_match(const DomainSpec& d,
                         const std::vector<std::pair<Complex, Complex>>& pairs,
                         int degree) {
  double residual = 0.0;
  const Eigen::VectorXcd c = solve_moments(d, pairs, degree, residual);
  if (!(residual < 1e-10))
    throw RankDeficient("moment_match: residual " + std::to_string(residual) +
                        " above 1e-10");
  std::vector<PairAtom> atoms;
  atoms.reserve(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k)
    atoms.push_back({pairs[k].first, pairs[k].second, c(static_cast<Eigen::Index>(k))});
  return PairMeasure(d, std::move(atoms));
}

double moment_match_residual(const DomainSpec& d,
                             const std::vector<std::pair<Complex, Complex>>& pairs,
                             int degree) {
  double residual = 0.0;
  solve_moments(d, pairs, degree, residual);
  return residual;
}

std::vector<std::pair<Complex, Complex>> random_boundary_pairs(
    const DomainSpec& d, int count, std::uint64_t seed, double min_sep) {
  // Oversample, then greedily accept pairs respecting the separation floor.
  const int budget = 16 * count + 64;
  const std::vector<Complex> pts =
      sample_boundary_points(d, 2 * budget, split_seed(seed, 7));
  std::vector<std::pair<Complex, Complex>> out;
  for (int i = 0; i < budget && static_cast<int>(out.size()) < count; ++i) {
    const Complex z = pts[2 * i], w = pts[2 * i + 1];
    if (std::abs(z - w) >= min_sep && std::abs(z - d.b) > min_sep &&
        std::abs(w - d.b) > min_sep)
      out.emplace_back(z, w);
  }
  if (static_cast<int>(out.size()) < count)
    throw std::runtime_error("random_boundary_pairs: separation floor too demanding");
  return out;
}

PairMeasure random_pair_measure(const DomainSpec& d, int n_atoms, std::uint64_t seed) {
  const auto pairs = random_boundary_pairs(d, n_atoms, seed);
  Rng rng = Rng(seed).derived(9);
  std::vector<PairAtom> atoms;
  atoms.reserve(pairs.size());
  for (const auto& [z, w] : pairs)
    atoms.push_back({z, w, Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))});
  return PairMeasure(d, std::move(atoms));
}

}  // namespace lipalpha
