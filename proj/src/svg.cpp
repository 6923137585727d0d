#include "singsurf/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace singsurf::svg {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// 1, 2 or 5 times a power of ten, giving about `target` intervals.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) lo = 0, hi = 1;
    if (hi - lo < 1e-300) {
      const double pad = std::max(std::abs(lo) * 0.05, 1e-3);
      lo -= pad;
      hi += pad;
    }
  }
};

}  // namespace

std::string Plot::render() const {
  Range xr, yr;
  if (x_min < x_max) {
    xr.lo = x_min, xr.hi = x_max;
  } else {
    for (const auto& s : series) for (double v : s.x) xr.add(v);
    xr.settle();
  }
  if (y_min < y_max) {
    yr.lo = y_min, yr.hi = y_max;
  } else {
    for (const auto& s : series) {
      for (std::size_t i = 0; i < s.y.size(); ++i) {
        if (i < s.x.size() && s.x[i] >= xr.lo && s.x[i] <= xr.hi) yr.add(s.y[i]);
      }
    }
    for (const auto& m : horizontal) yr.add(m.at);
    yr.settle();
    const double pad = 0.05 * (yr.hi - yr.lo);
    yr.lo -= pad;
    yr.hi += pad;
  }

  const double left = 80, right = 24, top = 40, bottom = 56;
  const double pw = width - left - right, ph = height - top - bottom;
  const auto sx = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  const auto sy = [&](double y) { return top + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
       std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " + std::to_string(height) +
       "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<defs><clipPath id=\"plot\"><rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) +
       "\" height=\"" + num(ph) + "\"/></clipPath></defs>\n";

  // Grid and ticks.
  const double xs = nice_step(xr.hi - xr.lo, 8), ys = nice_step(yr.hi - yr.lo, 6);
  for (double t = std::ceil(xr.lo / xs) * xs; t <= xr.hi + 1e-9 * xs; t += xs) {
    o += "<line x1=\"" + num(sx(t)) + "\" y1=\"" + num(top) + "\" x2=\"" + num(sx(t)) + "\" y2=\"" +
         num(top + ph) + "\" stroke=\"#e5e5e5\"/>\n";
    o += "<text x=\"" + num(sx(t)) + "\" y=\"" + num(top + ph + 18) + "\" text-anchor=\"middle\">" + label(t) +
         "</text>\n";
  }
  for (double t = std::ceil(yr.lo / ys) * ys; t <= yr.hi + 1e-9 * ys; t += ys) {
    o += "<line x1=\"" + num(left) + "\" y1=\"" + num(sy(t)) + "\" x2=\"" + num(left + pw) + "\" y2=\"" +
         num(sy(t)) + "\" stroke=\"#e5e5e5\"/>\n";
    o += "<text x=\"" + num(left - 6) + "\" y=\"" + num(sy(t) + 4) + "\" text-anchor=\"end\">" + label(t) +
         "</text>\n";
  }
  o += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
       "\" fill=\"none\" stroke=\"#333\"/>\n";

  o += "<g clip-path=\"url(#plot)\">\n";
  for (const auto& s : series) {
    std::string d;
    bool pen = false;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        pen = false;
        continue;
      }
      d += (pen ? "L" : "M") + num(sx(s.x[i])) + " " + num(sy(s.y[i])) + " ";
      pen = true;
    }
    if (d.empty()) continue;
    o += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"" + num(s.width) + "\"" +
         (s.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
  }
  for (const auto& m : vertical) {
    if (m.at < xr.lo || m.at > xr.hi) continue;
    o += "<line x1=\"" + num(sx(m.at)) + "\" y1=\"" + num(top) + "\" x2=\"" + num(sx(m.at)) + "\" y2=\"" +
         num(top + ph) + "\" stroke=\"" + m.color + "\"" + (m.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
  }
  for (const auto& m : horizontal) {
    if (m.at < yr.lo || m.at > yr.hi) continue;
    o += "<line x1=\"" + num(left) + "\" y1=\"" + num(sy(m.at)) + "\" x2=\"" + num(left + pw) + "\" y2=\"" +
         num(sy(m.at)) + "\" stroke=\"" + m.color + "\"" + (m.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
  }
  o += "</g>\n";

  // Legend: series first, then labelled markers.
  double ly = top + 16;
  const auto legend = [&](const std::string& text, const std::string& color, bool dashed) {
    if (text.empty()) return;
    const double lx = left + pw - 190;
    o += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(lx + 24) + "\" y2=\"" + num(ly - 4) +
         "\" stroke=\"" + color + "\" stroke-width=\"2\"" + (dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
    o += "<text x=\"" + num(lx + 30) + "\" y=\"" + num(ly) + "\">" + escape(text) + "</text>\n";
    ly += 16;
  };
  for (const auto& s : series) legend(s.label, s.color, s.dashed);
  for (const auto& m : vertical) legend(m.label, m.color, m.dashed);
  for (const auto& m : horizontal) legend(m.label, m.color, m.dashed);

  o += "<text x=\"" + num(left + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) +
       "</text>\n";
  o += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(height - 14) + "\" text-anchor=\"middle\">" +
       escape(x_label) + "</text>\n";
  o += "<text transform=\"translate(18 " + num(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       escape(y_label) + "</text>\n";
  o += "</svg>\n";
  return o;
}

}  // namespace singsurf::svg
