#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lipalpha {

// Compensated (Kahan) accumulator.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

inline double kahan_sum(const std::vector<double>& xs) {
  KahanSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

// r^beta. beta = 3/2 is computed as r*sqrt(r) so dyadic radii with even
// exponent stay exact (sqrt of a power of four is exact in IEEE754).
inline double pow_beta(double r, double beta) {
  if (beta == 1.5) return r * std::sqrt(r);
  return std::pow(r, beta);
}

// Least-squares slope of y against x.
inline double least_squares_slope(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("least_squares_slope: need >= 2 points");
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares_slope: degenerate x");
  return sxy / sxx;
}

// Minimize a unimodal-ish scalar function over [lo,hi] by a log-spaced
// grid pass followed by golden-section refinement around the best cell.
template <class F>
double minimize_log_grid(F&& f, double lo, double hi, int grid = 2001) {
  double best_u = lo, best_v = f(lo);
  const double la = std::log(lo), lb = std::log(hi);
  for (int i = 0; i <= grid; ++i) {
    double u = std::exp(la + (lb - la) * static_cast<double>(i) / grid);
    double v = f(u);
    if (v < best_v) {
      best_v = v;
      best_u = u;
    }
  }
  double a = best_u * 0.5, b = best_u * 2.0;
  const double gr = 0.6180339887498949;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 120; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  return std::min(best_v, std::min(f1, f2));
}

}  // namespace lipalpha
