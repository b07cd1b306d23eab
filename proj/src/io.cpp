#include "lipalpha/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lipalpha/errors.hpp"
#include "lipalpha/numerics.hpp"

namespace lipalpha {

namespace {

using nlohmann::json;

json must_get(const json& j, const char* key) {
  if (!j.contains(key))
    throw ConfigError(std::string("missing key '") + key + "'");
  return j.at(key);
}

Complex complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw ConfigError("expected a [re,im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_complex_pair(Complex z) {
  return "[" + fmt_double(z.real()) + "," + fmt_double(z.imag()) + "]";
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("atomic_write: write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

std::string domain_to_json(const DomainSpec& d) {
  std::string s;
  s += "{\"outer\": {\"center\": " + fmt_complex_pair(d.outer.center) +
       ", \"radius\": " + fmt_double(d.outer.radius) + "}";
  s += ", \"b\": " + fmt_complex_pair(d.b);
  s += ", \"alpha\": " + fmt_double(d.alpha);
  s += ", \"balls\": [";
  for (std::size_t i = 0; i < d.balls.size(); ++i) {
    if (i) s += ", ";
    s += "{\"center\": " + fmt_complex_pair(d.balls[i].center) +
         ", \"radius\": " + fmt_double(d.balls[i].radius) + "}";
  }
  s += "], \"segments\": [";
  for (std::size_t i = 0; i < d.segments.size(); ++i) {
    if (i) s += ", ";
    s += "{\"p\": " + fmt_complex_pair(d.segments[i].p) +
         ", \"q\": " + fmt_complex_pair(d.segments[i].q) + "}";
  }
  s += "], \"probe\": {\"theta\": " + fmt_double(d.probe.theta) +
       ", \"t\": " + fmt_double(d.probe.t) + ", \"eps_range\": [" +
       fmt_double(d.probe.eps_lo) + "," + fmt_double(d.probe.eps_hi) + "]}}";
  s += "\n";
  return s;
}

DomainSpec domain_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("domain JSON parse error: ") + e.what());
  }
  DomainSpec d;
  const json outer = must_get(j, "outer");
  d.outer.center = complex_from(must_get(outer, "center"));
  d.outer.radius = must_get(outer, "radius").get<double>();
  d.b = complex_from(must_get(j, "b"));
  d.alpha = must_get(j, "alpha").get<double>();
  for (const auto& ball : must_get(j, "balls"))
    d.balls.push_back({complex_from(must_get(ball, "center")),
                       must_get(ball, "radius").get<double>()});
  for (const auto& seg : must_get(j, "segments"))
    d.segments.push_back(
        {complex_from(must_get(seg, "p")), complex_from(must_get(seg, "q"))});
  const json probe = must_get(j, "probe");
  d.probe.theta = must_get(probe, "theta").get<double>();
  d.probe.t = must_get(probe, "t").get<double>();
  const json eps = must_get(probe, "eps_range");
  d.probe.eps_lo = eps.at(0).get<double>();
  d.probe.eps_hi = eps.at(1).get<double>();
  return validate_domain(std::move(d));
}

std::string pair_measure_to_json(const PairMeasure& mu) {
  std::string s = "{\"alpha\": " + fmt_double(mu.alpha()) +
                  ", \"b\": " + fmt_complex_pair(mu.b()) + ", \"atoms\": [";
  const auto& atoms = mu.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) s += ", ";
    s += "{\"z\": " + fmt_complex_pair(atoms[i].z) +
         ", \"w\": " + fmt_complex_pair(atoms[i].w) +
         ", \"c\": " + fmt_complex_pair(atoms[i].weight) + "}";
  }
  s += "]}\n";
  return s;
}

PairMeasure pair_measure_from_json(const std::string& text, const DomainSpec& d) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("measure JSON parse error: ") + e.what());
  }
  std::vector<PairAtom> atoms;
  for (const auto& a : must_get(j, "atoms"))
    atoms.push_back({complex_from(must_get(a, "z")), complex_from(must_get(a, "w")),
                     complex_from(must_get(a, "c"))});
  return PairMeasure(d, std::move(atoms));
}

std::string test_function_to_json(const TestFunction& f) {
  std::string s = "{\"kernels\": [";
  for (std::size_t i = 0; i < f.kernels.size(); ++i) {
    if (i) s += ", ";
    s += "{\"pole\": " + fmt_complex_pair(f.kernels[i].pole) +
         ", \"order\": " + std::to_string(f.kernels[i].order) +
         ", \"coeff\": " + fmt_complex_pair(f.kernels[i].coeff) + "}";
  }
  s += "], \"poly\": [";
  for (std::size_t i = 0; i < f.poly.size(); ++i) {
    if (i) s += ", ";
    s += fmt_complex_pair(f.poly[i]);
  }
  s += "]";
  if (f.tail) {
    s += ", \"epsilon_rule\": {\"ratio\": " + fmt_double(f.tail->eps_ratio) +
         ", \"scale\": " + fmt_double(f.tail->eps_scale) +
         ", \"last_annulus\": " + std::to_string(f.tail->last_annulus) +
         ", \"oracle_tail\": " + fmt_double(f.tail->oracle_tail) +
         ", \"lip_tail\": " + fmt_double(f.tail->lip_tail) + "}";
  }
  s += "}\n";
  return s;
}

std::string wiener_to_csv(const WienerReport& report) {
  std::string s = "n,content_bound,provenance,term,partial_sum\n";
  KahanSum running;
  for (const auto& t : report.terms) {
    running.add(t.term);
    s += std::to_string(t.n) + "," + fmt_double(t.content_bound) + "," +
         provenance_name(t.provenance) + "," + fmt_double(t.term) + "," +
         fmt_double(running.value()) + "\n";
  }
  return s;
}

std::string wiener_to_json(const WienerReport& report) {
  std::string s = "{\"beta\": " + fmt_double(report.beta) +
                  ", \"n_max\": " + std::to_string(report.n_max) +
                  ", \"partial_sum\": " + fmt_double(report.partial_sum) +
                  ", \"tail_bound\": " +
                  (report.tail_bound ? fmt_double(*report.tail_bound) : "null") +
                  ", \"verdict\": \"" + verdict_name(report.verdict) + "\"";
  if (!report.tail_derivation.empty())
    s += ", \"tail_derivation\": \"" + report.tail_derivation + "\"";
  s += "}\n";
  return s;
}

std::string scan_to_csv(const RatioScan& scan) {
  std::string s = "r,dist,lhs,normalizer,ratio\n";
  for (const auto& p : scan.points)
    s += fmt_double(p.r) + "," + fmt_double(p.dist_to_x) + "," + fmt_double(p.lhs) +
         "," + fmt_double(p.normalizer) + "," + fmt_double(p.ratio) + "\n";
  return s;
}

std::string scan_to_json(const RatioScan& scan) {
  std::string s = std::string("{\"lemma\": \"") + lemma_name(scan.lemma) +
                  "\", \"t\": " + fmt_double(scan.t) +
                  ", \"points\": " + std::to_string(scan.points.size()) +
                  ", \"sup_ratio\": " + fmt_double(scan.sup_ratio) +
                  ", \"loglog_slope\": " + fmt_double(scan.loglog_slope);
  if (scan.lemma == Lemma::L1)
    s += ", \"sup_ratio_dist_normalized\": " + fmt_double(scan.sup_ratio_alt);
  s += "}\n";
  return s;
}

std::string quotients_to_csv(const std::vector<QuotientRecord>& records, Complex b) {
  std::string s = "n,r_n,z_re,z_im,q_re,q_im,err\n";
  for (const auto& rec : records)
    s += std::to_string(rec.n) + "," + fmt_double(std::abs(rec.z_n - b)) + "," +
         fmt_double(rec.z_n.real()) + "," + fmt_double(rec.z_n.imag()) + "," +
         fmt_double(rec.q_n.real()) + "," + fmt_double(rec.q_n.imag()) + "," +
         fmt_double(rec.err_n) + "\n";
  return s;
}

std::string convergence_to_json(const ConvergenceReport& report) {
  std::string s = "{\"oracle\": " + fmt_complex_pair(report.oracle) +
                  ", \"limit_estimate\": " + fmt_complex_pair(report.limit_estimate) +
                  ", \"final_err\": " + fmt_double(report.final_err) +
                  ", \"empirical_order\": " + fmt_double(report.empirical_order) +
                  ", \"verdict\": \"" + verdict_name(report.verdict) + "\"" +
                  ", \"tol\": " + fmt_double(report.tol) +
                  ", \"cancellation_bound\": " + fmt_double(report.cancellation_bound) +
                  ", \"records\": " + std::to_string(report.records.size()) + "}\n";
  return s;
}

std::string seminorm_to_json(const SeminormCheck& check) {
  return "{\"sup_yy\": " + fmt_double(check.sup_yy) +
         ", \"sup_xx\": " + fmt_double(check.sup_xx) +
         ", \"interior_excess\": " + fmt_double(check.interior_excess) +
         ", \"samples\": " + std::to_string(check.samples) +
         ", \"seed\": " + std::to_string(check.seed) + "}\n";
}

std::string fubini_to_json(const FubiniResult& result,
                           const FubiniRefinement* refinement) {
  std::string s = "{\"lhs\": " + fmt_complex_pair(result.lhs) +
                  ", \"rhs\": " + fmt_complex_pair(result.rhs) +
                  ", \"rel_err\": " + fmt_double(result.rel_err) +
                  ", \"vacuous\": " + (result.vacuous ? "true" : "false");
  if (refinement) {
    s += ", \"refinement\": {\"grids\": [";
    for (std::size_t i = 0; i < refinement->grid_sizes.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(refinement->grid_sizes[i]);
    }
    s += "], \"rel_errs\": [";
    for (std::size_t i = 0; i < refinement->rel_errs.size(); ++i) {
      if (i) s += ",";
      s += fmt_double(refinement->rel_errs[i]);
    }
    s += "], \"order\": " + fmt_double(refinement->order) + "}";
  }
  s += "}\n";
  return s;
}

std::string identity_to_json(const IdentityReport& report) {
  return "{\"identity\": \"" + report.identity +
         "\", \"trials\": " + std::to_string(report.trials) +
         ", \"max_abs_discrepancy\": " + fmt_double(report.max_abs_discrepancy) +
         ", \"max_rel_discrepancy\": " + fmt_double(report.max_rel_discrepancy) +
         ", \"constant_convention\": \"" + report.constant_convention + "\"}\n";
}

std::string t_hat_to_csv(const THatDiagnostic& diag) {
  std::string s = "r,t_hat_minus_1_abs,r_pow_1_minus_alpha\n";
  for (const auto& p : diag.points)
    s += fmt_double(p.r) + "," + fmt_double(p.t_hat_minus_1) + "," +
         fmt_double(p.reference) + "\n";
  return s;
}

std::string t_hat_to_json(const THatDiagnostic& diag) {
  return std::string("{\"points\": ") + std::to_string(diag.points.size()) +
         ", \"trend_flag\": " + (diag.trend_flag ? "true" : "false") +
         ", \"note\": \"diagnostic only; T-hat -> 1 is not asserted for "
         "moment-matched measures\"}\n";
}

std::string transform_field_csv(const PairMeasure& mu, const DomainSpec& d,
                                const std::vector<Complex>& points) {
  std::string s = "a_re,a_im,H_re,H_im,H_tilde,dist_to_X\n";
  for (const Complex& a : points) {
    const Complex h = cauchy_H(mu, a);
    s += fmt_double(a.real()) + "," + fmt_double(a.imag()) + "," +
         fmt_double(h.real()) + "," + fmt_double(h.imag()) + "," +
         fmt_double(cauchy_H_majorant(mu, a)) + "," +
         fmt_double(dist_to_boundary(a, d)) + "\n";
  }
  return s;
}

namespace {

std::string fmt_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string svg_loglog(const std::string& title, const std::string& x_label,
                       const std::string& y_label,
                       const std::vector<SvgSeries>& series) {
  const double width = 640, height = 480;
  const double ml = 70, mr = 20, mt = 40, mb = 50;
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  bool have = false;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!(x > 0.0) || !(y > 0.0)) continue;
      const double lx = std::log10(x), ly = std::log10(y);
      if (!have) {
        min_x = max_x = lx;
        min_y = max_y = ly;
        have = true;
      } else {
        min_x = std::min(min_x, lx);
        max_x = std::max(max_x, lx);
        min_y = std::min(min_y, ly);
        max_y = std::max(max_y, ly);
      }
    }
  }
  if (!have) {
    min_x = min_y = -1;
    max_x = max_y = 1;
  }
  if (max_x - min_x < 1e-12) max_x = min_x + 1;
  if (max_y - min_y < 1e-12) max_y = min_y + 1;

  auto px = [&](double lx) {
    return ml + (lx - min_x) / (max_x - min_x) * (width - ml - mr);
  };
  auto py = [&](double ly) {
    return height - mb - (ly - min_y) / (max_y - min_y) * (height - mt - mb);
  };

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
      "viewBox=\"0 0 640 480\">\n"
      "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"14\">" + title + "</text>\n";

  // decade grid
  for (int e = static_cast<int>(std::ceil(min_x)); e <= std::floor(max_x); ++e) {
    const double x = px(e);
    svg += "<line x1=\"" + fmt_coord(x) + "\" y1=\"" + fmt_coord(mt) + "\" x2=\"" +
           fmt_coord(x) + "\" y2=\"" + fmt_coord(height - mb) +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + fmt_coord(x) + "\" y=\"" + fmt_coord(height - mb + 18) +
           "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">1e" +
           std::to_string(e) + "</text>\n";
  }
  for (int e = static_cast<int>(std::ceil(min_y)); e <= std::floor(max_y); ++e) {
    const double y = py(e);
    svg += "<line x1=\"" + fmt_coord(ml) + "\" y1=\"" + fmt_coord(y) + "\" x2=\"" +
           fmt_coord(width - mr) + "\" y2=\"" + fmt_coord(y) +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + fmt_coord(ml - 6) + "\" y=\"" + fmt_coord(y + 4) +
           "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">1e" +
           std::to_string(e) + "</text>\n";
  }
  svg += "<rect x=\"" + fmt_coord(ml) + "\" y=\"" + fmt_coord(mt) + "\" width=\"" +
         fmt_coord(width - ml - mr) + "\" height=\"" + fmt_coord(height - mt - mb) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<text x=\"320\" y=\"" + fmt_coord(height - 12) +
         "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">" +
         x_label + "</text>\n";
  svg += "<text x=\"16\" y=\"240\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"12\" transform=\"rotate(-90 16 240)\">" + y_label + "</text>\n";

  int legend_row = 0;
  for (const auto& s : series) {
    std::string path;
    bool first = true;
    for (const auto& [x, y] : s.points) {
      if (!(x > 0.0) || !(y > 0.0)) continue;
      path += (first ? "M" : " L");
      path += fmt_coord(px(std::log10(x))) + " " + fmt_coord(py(std::log10(y)));
      first = false;
    }
    if (!path.empty())
      svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + s.color +
             "\" stroke-width=\"1.5\"/>\n";
    svg += "<text x=\"" + fmt_coord(width - mr - 6) + "\" y=\"" +
           fmt_coord(mt + 16 + 16 * legend_row) +
           "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\" fill=\"" +
           s.color + "\">" + s.label + "</text>\n";
    ++legend_row;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace lipalpha
