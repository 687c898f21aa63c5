#pragma once

// Minimal self-contained SVG charts: polylines with optional bands, and
// grouped bars. No scripts, fonts or external references.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace zominmax::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> lo;  // optional band, same length as y
  std::vector<double> hi;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<Series> series;
};

struct Bar {
  std::string label;
  double value;
  bool capped = false;  // drawn hatched-grey and annotated
};

struct BarChart {
  std::string title;
  std::string y_label;
  std::vector<Bar> bars;
};

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace detail {

inline const char* palette(std::size_t k) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  return colors[k % 7];
}

inline std::string num(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(2) << v;
  return ss.str();
}

inline std::string tick_label(double v) {
  std::ostringstream ss;
  ss << std::setprecision(3) << v;
  return ss.str();
}

constexpr double kWidth = 640, kHeight = 400, kLeft = 70, kRight = 160, kTop = 40, kBottom = 50;

inline void open(std::ostringstream& os, const std::string& title) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
     << escape(title) << "</text>\n";
}

}  // namespace detail

inline std::string render(const LineChart& chart) {
  using namespace detail;
  auto ty = [&](double y) { return chart.log_y ? std::log10(std::max(y, 1e-300)) : y; };
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  auto usable = [&](double y) { return std::isfinite(y) && (!chart.log_y || y > 0.0); };
  for (const auto& s : chart.series) {
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (!usable(s.y[k]) || !std::isfinite(s.x[k])) continue;
      xmin = std::min(xmin, s.x[k]);
      xmax = std::max(xmax, s.x[k]);
      for (double y : {s.y[k], k < s.lo.size() ? s.lo[k] : s.y[k], k < s.hi.size() ? s.hi[k] : s.y[k]}) {
        if (!usable(y)) continue;
        ymin = std::min(ymin, ty(y));
        ymax = std::max(ymax, ty(y));
      }
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  if (chart.log_y) ymin = std::floor(ymin), ymax = std::ceil(ymax);

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (ty(y) - ymin) / (ymax - ymin)) * ph; };

  std::ostringstream os;
  open(os, chart.title);
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4.0;
    os << "<text x=\"" << num(px(xv)) << "\" y=\"" << kTop + ph + 16
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(xv) << "</text>\n";
  }
  if (chart.log_y) {
    for (double e = ymin; e <= ymax; e += 1.0) {
      const double yy = kTop + (1.0 - (e - ymin) / (ymax - ymin)) * ph;
      os << "<line x1=\"" << kLeft << "\" y1=\"" << num(yy) << "\" x2=\"" << kLeft + pw << "\" y2=\"" << num(yy)
         << "\" stroke=\"#dddddd\"/>\n<text x=\"" << kLeft - 6 << "\" y=\"" << num(yy + 4)
         << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << static_cast<int>(e)
         << "</text>\n";
    }
  } else {
    for (int k = 0; k <= 4; ++k) {
      const double yv = ymin + (ymax - ymin) * k / 4.0;
      const double yy = kTop + (1.0 - k / 4.0) * ph;
      os << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(yy + 4)
         << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(yv) << "</text>\n";
    }
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape(chart.x_label)
     << "</text>\n<text x=\"16\" y=\"" << kTop + ph / 2 << "\" transform=\"rotate(-90 16 " << kTop + ph / 2
     << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape(chart.y_label)
     << "</text>\n";

  for (std::size_t s = 0; s < chart.series.size(); ++s) {
    const auto& ser = chart.series[s];
    const char* color = palette(s);
    if (!ser.lo.empty() && ser.lo.size() == ser.y.size() && ser.hi.size() == ser.y.size()) {
      std::ostringstream pts;
      for (std::size_t k = 0; k < ser.x.size(); ++k)
        if (usable(ser.hi[k])) pts << num(px(ser.x[k])) << ',' << num(py(ser.hi[k])) << ' ';
      for (std::size_t k = ser.x.size(); k-- > 0;)
        if (usable(ser.lo[k])) pts << num(px(ser.x[k])) << ',' << num(py(ser.lo[k])) << ' ';
      os << "<polygon points=\"" << pts.str() << "\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    }
    std::ostringstream pts;
    for (std::size_t k = 0; k < ser.x.size() && k < ser.y.size(); ++k)
      if (usable(ser.y[k])) pts << num(px(ser.x[k])) << ',' << num(py(ser.y[k])) << ' ';
    os << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\"/>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(s);
    os << "<line x1=\"" << kLeft + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw + 30 << "\" y2=\"" << ly
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n<text x=\"" << kLeft + pw + 36 << "\" y=\"" << ly + 4
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(ser.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline std::string render(const BarChart& chart) {
  using namespace detail;
  double ymax = 0.0;
  for (const auto& b : chart.bars)
    if (std::isfinite(b.value)) ymax = std::max(ymax, b.value);
  if (ymax <= 0.0) ymax = 1.0;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const double slot = chart.bars.empty() ? pw : pw / static_cast<double>(chart.bars.size());

  std::ostringstream os;
  open(os, chart.title);
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double yy = kTop + (1.0 - k / 4.0) * ph;
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(yy + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(ymax * k / 4.0)
       << "</text>\n";
  }
  for (std::size_t k = 0; k < chart.bars.size(); ++k) {
    const auto& b = chart.bars[k];
    const double h = std::isfinite(b.value) ? b.value / ymax * ph : 0.0;
    const double x = kLeft + slot * static_cast<double>(k) + slot * 0.15;
    os << "<rect x=\"" << num(x) << "\" y=\"" << num(kTop + ph - h) << "\" width=\"" << num(slot * 0.7)
       << "\" height=\"" << num(h) << "\" fill=\"" << (b.capped ? "#aaaaaa" : palette(0)) << "\"/>\n";
    if (b.capped)
      os << "<text x=\"" << num(x + slot * 0.35) << "\" y=\"" << num(kTop + ph - h - 4)
         << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">cap</text>\n";
    os << "<text x=\"" << num(x + slot * 0.35) << "\" y=\"" << kTop + ph + 16
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << escape(b.label) << "</text>\n";
  }
  os << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" transform=\"rotate(-90 16 " << kTop + ph / 2
     << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape(chart.y_label)
     << "</text>\n</svg>\n";
  return os.str();
}

}  // namespace zominmax::svg
