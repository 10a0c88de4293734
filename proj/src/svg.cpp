#include "aggbne/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace aggbne {

namespace {

constexpr int kWidth = 960;
constexpr int kHeight = 600;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 160;
constexpr int kMarginTop = 30;
constexpr int kMarginBottom = 50;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                "#bcbd22", "#17becf"};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Scale {
  double lo = 0.0, hi = 1.0;
  double px0 = 0.0, px1 = 1.0;
  double map(double v) const {
    const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
    return px0 + t * (px1 - px0);
  }
};

void write_frame(std::ostream& os, const Scale& x, const Scale& y,
                 const std::string& x_label, const std::string& y_label,
                 bool y_log) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
     << kHeight << "\">\n";
  os << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" fill=\"white\"/>\n";
  os << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
     << kWidth - kMarginLeft - kMarginRight << "\" height=\""
     << kHeight - kMarginTop - kMarginBottom
     << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  for (int tick = 0; tick <= 5; ++tick) {
    const double xv = x.lo + (x.hi - x.lo) * tick / 5.0;
    const double px = x.map(xv);
    os << "<line x1=\"" << fmt(px) << "\" y1=\"" << kHeight - kMarginBottom
       << "\" x2=\"" << fmt(px) << "\" y2=\"" << kHeight - kMarginBottom + 5
       << "\" stroke=\"#333333\"/>\n";
    os << "<text x=\"" << fmt(px) << "\" y=\"" << kHeight - kMarginBottom + 20
       << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
    const double yv = y.lo + (y.hi - y.lo) * tick / 5.0;
    const double py = y.map(yv);
    os << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << fmt(py) << "\" x2=\""
       << kMarginLeft << "\" y2=\"" << fmt(py) << "\" stroke=\"#333333\"/>\n";
    os << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << fmt(py + 4)
       << "\" font-size=\"12\" text-anchor=\"end\">"
       << (y_log ? "1e" + fmt(yv) : fmt(yv)) << "</text>\n";
  }
  os << "<text x=\"" << (kMarginLeft + kWidth - kMarginRight) / 2 << "\" y=\""
     << kHeight - 12 << "\" font-size=\"14\" text-anchor=\"middle\">" << x_label
     << "</text>\n";
  os << "<text x=\"18\" y=\"" << (kMarginTop + kHeight - kMarginBottom) / 2
     << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << (kMarginTop + kHeight - kMarginBottom) / 2 << ")\">" << y_label
     << "</text>\n";
}

void write_polyline(std::ostream& os, const std::vector<double>& xs,
                    const std::vector<double>& ys, const Scale& x, const Scale& y,
                    const std::string& color) {
  os << "<polyline fill=\"none\" stroke=\"" << color
     << "\" stroke-width=\"1.5\" points=\"";
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) os << ' ';
    os << fmt(x.map(xs[i])) << ',' << fmt(y.map(ys[i]));
  }
  os << "\"/>\n";
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw NumericError("cannot write '" + path + "'");
  return out;
}

}  // namespace

void emit_probe_svg(const std::vector<TraceRow>& rows,
                    const std::vector<Probe>& probes, const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("emit_probe_svg: empty trace");
  if (!probes.empty() && rows.front().probes.size() != probes.size()) {
    throw std::invalid_argument("emit_probe_svg: probe labels do not match the trace");
  }

  std::vector<double> ts;
  ts.reserve(rows.size());
  for (const TraceRow& row : rows) ts.push_back(static_cast<double>(row.t));

  double lo = 0.0, hi = 1.0;
  bool first = true;
  for (const TraceRow& row : rows) {
    for (double v : row.probes) {
      lo = first ? v : std::min(lo, v);
      hi = first ? v : std::max(hi, v);
      first = false;
    }
  }
  if (first) throw std::invalid_argument("emit_probe_svg: trace has no probes");
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  }

  Scale x{ts.front(), ts.back(), kMarginLeft, double(kWidth - kMarginRight)};
  Scale y{lo, hi, double(kHeight - kMarginBottom), double(kMarginTop)};

  std::ofstream out = open_output(path);
  write_frame(out, x, y, "t", "strategy value", false);
  for (size_t p = 0; p < probes.size(); ++p) {
    std::vector<double> ys;
    ys.reserve(rows.size());
    for (const TraceRow& row : rows) ys.push_back(row.probes[p]);
    const std::string color = kPalette[p % (sizeof(kPalette) / sizeof(char*))];
    write_polyline(out, ts, ys, x, y, color);
    const double ly = kMarginTop + 16.0 * (p + 1);
    out << "<line x1=\"" << kWidth - kMarginRight + 10 << "\" y1=\"" << fmt(ly - 4)
        << "\" x2=\"" << kWidth - kMarginRight + 30 << "\" y2=\"" << fmt(ly - 4)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kWidth - kMarginRight + 35 << "\" y=\"" << fmt(ly)
        << "\" font-size=\"12\">player" << probes[p].player + 1 << "/type"
        << probes[p].type_index + 1 << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw NumericError("failed writing '" + path + "'");
}

void emit_consensus_svg(const std::vector<TraceRow>& rows, const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("emit_consensus_svg: empty trace");
  std::vector<double> ts, ys;
  for (const TraceRow& row : rows) {
    ts.push_back(static_cast<double>(row.t));
    ys.push_back(std::log10(std::max(row.consensus_residual, 1e-18)));
  }
  const auto [lo_it, hi_it] = std::minmax_element(ys.begin(), ys.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi - lo < 1e-9) {
    lo -= 1.0;
    hi += 1.0;
  }
  Scale x{ts.front(), ts.back(), kMarginLeft, double(kWidth - kMarginRight)};
  Scale y{lo, hi, double(kHeight - kMarginBottom), double(kMarginTop)};
  std::ofstream out = open_output(path);
  write_frame(out, x, y, "t", "log10 consensus residual", true);
  write_polyline(out, ts, ys, x, y, kPalette[0]);
  out << "</svg>\n";
  if (!out) throw NumericError("failed writing '" + path + "'");
}

}  // namespace aggbne
