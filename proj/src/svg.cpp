#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace quasiblow::detail {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v, int prec = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string tick_label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Axis {
  bool log = false;
  double lo = 0.0;
  double hi = 1.0;

  double map(double v) const { return log ? std::log10(v) : v; }
  double frac(double v) const { return (map(v) - lo) / (hi - lo); }
};

Axis make_axis(const std::vector<double>& values, bool log) {
  Axis a;
  a.log = log;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    lo = std::min(lo, a.map(v));
    hi = std::max(hi, a.map(v));
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  if (log) {
    lo = std::floor(lo);
    hi = std::ceil(hi);
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

std::vector<double> ticks(const Axis& a) {
  std::vector<double> t;
  if (a.log) {
    const int step = std::max(1, static_cast<int>(std::ceil((a.hi - a.lo) / 8.0)));
    for (int e = static_cast<int>(a.lo); e <= static_cast<int>(a.hi); e += step)
      t.push_back(std::pow(10.0, e));
  } else {
    for (int k = 0; k <= 5; ++k) t.push_back(a.lo + (a.hi - a.lo) * k / 5.0);
  }
  return t;
}

}  // namespace

std::string svg_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  std::vector<PlotSeries> clean;
  std::vector<double> xs, ys;
  for (const auto& s : series) {
    PlotSeries c;
    c.label = s.label;
    c.markers = s.markers;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      const double x = s.x[i];
      const double y = s.y[i];
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if ((spec.log_x && !(x > 0.0)) || (spec.log_y && !(y > 0.0))) continue;
      c.x.push_back(x);
      c.y.push_back(y);
      xs.push_back(x);
      ys.push_back(y);
    }
    clean.push_back(std::move(c));
  }
  const Axis ax = make_axis(xs, spec.log_x);
  const Axis ay = make_axis(ys, spec.log_y);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + ax.frac(x) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - ay.frac(y)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(spec.title) << "</text>\n";
  o << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw)
    << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(ax)) {
    const double x = px(t);
    o << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kTop + ph) << "\" x2=\"" << fmt(x)
      << "\" y2=\"" << fmt(kTop + ph + 5) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kTop + ph + 18)
      << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t : ticks(ay)) {
    const double y = py(t);
    o << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kLeft)
      << "\" y2=\"" << fmt(y) << "\" stroke=\"black\"/>";
    o << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">"
      << tick_label(t) << "</text>\n";
  }
  o << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 10)
    << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
  o << "<text transform=\"translate(16," << fmt(kTop + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape(spec.y_label) << "</text>\n";

  for (std::size_t k = 0; k < clean.size(); ++k) {
    const auto& s = clean[k];
    const char* color = kColors[k % (sizeof kColors / sizeof kColors[0])];
    if (s.markers) {
      for (std::size_t i = 0; i < s.x.size(); ++i)
        o << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i]))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    } else if (!s.x.empty()) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        o << (i ? " " : "") << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
      o << "\"/>\n";
    }
    const double ly = kTop + 12 + 16.0 * static_cast<double>(k);
    o << "<line x1=\"" << fmt(kLeft + pw + 10) << "\" y1=\"" << fmt(ly) << "\" x2=\""
      << fmt(kLeft + pw + 30) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>";
    o << "<text x=\"" << fmt(kLeft + pw + 35) << "\" y=\"" << fmt(ly + 4) << "\">"
      << escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace quasiblow::detail
