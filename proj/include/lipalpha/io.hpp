#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lipalpha/content.hpp"
#include "lipalpha/diffquot.hpp"
#include "lipalpha/estimates.hpp"
#include "lipalpha/function_space.hpp"
#include "lipalpha/geometry.hpp"
#include "lipalpha/pair_measure.hpp"

namespace lipalpha {

inline constexpr const char* kToolVersion = "0.1.0";

// Decimal with 17 significant digits; round-trips IEEE754 doubles and keeps
// report bytes reproducible.
std::string fmt_double(double v);
std::string fmt_complex_pair(Complex z);  // "[re,im]"

// Write-to-temp then atomic rename; no partial files on error.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// FNV-1a 64-bit, hex encoded; manifest input hashes.
std::string fnv1a64_hex(const std::string& bytes);

// DomainSpec <-> JSON with the fixed field order
// outer, b, alpha, balls, segments, probe.
std::string domain_to_json(const DomainSpec& d);
DomainSpec domain_from_json(const std::string& text);

std::string pair_measure_to_json(const PairMeasure& mu);
PairMeasure pair_measure_from_json(const std::string& text, const DomainSpec& d);

std::string test_function_to_json(const TestFunction& f);

std::string wiener_to_csv(const WienerReport& report);
std::string wiener_to_json(const WienerReport& report);

std::string scan_to_csv(const RatioScan& scan);
std::string scan_to_json(const RatioScan& scan);

std::string quotients_to_csv(const std::vector<QuotientRecord>& records, Complex b);
std::string convergence_to_json(const ConvergenceReport& report);

std::string seminorm_to_json(const SeminormCheck& check);
std::string fubini_to_json(const FubiniResult& result, const FubiniRefinement* refinement);
std::string identity_to_json(const IdentityReport& report);
std::string t_hat_to_csv(const THatDiagnostic& diag);
std::string t_hat_to_json(const THatDiagnostic& diag);

// Transform field samples: a_re, a_im, H_re, H_im, H_tilde, dist_to_X.
std::string transform_field_csv(const PairMeasure& mu, const DomainSpec& d,
                                const std::vector<Complex>& points);

// Static log-log SVG line plot (no scripts); points with nonpositive
// coordinates are dropped.
struct SvgSeries {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
};
std::string svg_loglog(const std::string& title, const std::string& x_label,
                       const std::string& y_label,
                       const std::vector<SvgSeries>& series);

}  // namespace lipalpha
