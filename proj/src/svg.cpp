#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "marginlab/experiments.hpp"

namespace marginlab {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Axis {
  std::string label;
  std::vector<double> x;
};

// First grid field that actually varies across rows becomes the x axis;
// otherwise rows are plotted by position.
Axis sweep_axis(const std::vector<GridRow>& rows) {
  auto distinct = [&](auto get) {
    for (const auto& r : rows)
      if (get(r) != get(rows.front())) return true;
    return false;
  };
  auto collect = [&](const char* label, auto get) {
    Axis a{label, {}};
    for (const auto& r : rows) a.x.push_back(double(get(r)));
    return a;
  };
  if (distinct([](const GridRow& r) { return r.d; }))
    return collect("d", [](const GridRow& r) { return r.d; });
  if (distinct([](const GridRow& r) { return r.n; }))
    return collect("n", [](const GridRow& r) { return r.n; });
  if (distinct([](const GridRow& r) { return r.N; }))
    return collect("N", [](const GridRow& r) { return r.N; });
  if (distinct([](const GridRow& r) { return r.r; }))
    return collect("r", [](const GridRow& r) { return r.r; });
  if (distinct([](const GridRow& r) { return r.eps; }))
    return collect("eps", [](const GridRow& r) { return r.eps; });
  Axis a{"row", {}};
  for (std::size_t i = 0; i < rows.size(); ++i) a.x.push_back(double(i));
  return a;
}

struct Scale {
  double lo = 0.0, hi = 1.0;
  double p0 = 0.0, p1 = 1.0;  // pixel range
  double at(double v) const {
    if (hi == lo) return 0.5 * (p0 + p1);
    return p0 + (v - lo) / (hi - lo) * (p1 - p0);
  }
};

Scale fit(const std::vector<double>& vals, double p0, double p1) {
  Scale s;
  s.p0 = p0;
  s.p1 = p1;
  bool any = false;
  for (double v : vals)
    if (std::isfinite(v)) {
      if (!any) {
        s.lo = s.hi = v;
        any = true;
      } else {
        s.lo = std::min(s.lo, v);
        s.hi = std::max(s.hi, v);
      }
    }
  if (!any) {
    s.lo = 0.0;
    s.hi = 1.0;
  }
  const double pad = (s.hi - s.lo) * 0.08 + 1e-12;
  s.lo -= pad;
  s.hi += pad;
  return s;
}

void polyline(std::ostringstream& out, const std::vector<double>& xs,
              const std::vector<double>& ys, const Scale& sx, const Scale& sy,
              const std::string& style) {
  out << "  <polyline fill=\"none\" " << style << " points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(ys[i])) continue;
    out << num(sx.at(xs[i])) << ',' << num(sy.at(ys[i])) << ' ';
  }
  out << "\"/>\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(ys[i])) continue;
    out << "  <circle cx=\"" << num(sx.at(xs[i])) << "\" cy=\"" << num(sy.at(ys[i]))
        << "\" r=\"2.5\" " << style << "/>\n";
  }
}

}  // namespace

void write_report_svg(const ExperimentReport& report, const std::string& path) {
  const auto& rows = report.rows;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 400\" "
         "font-family=\"sans-serif\" font-size=\"11\">\n"
         "  <rect width=\"640\" height=\"400\" fill=\"white\"/>\n";

  if (!rows.empty()) {
    const Axis axis = sweep_axis(rows);
    std::vector<double> stat, bound, all;
    for (const auto& r : rows) {
      stat.push_back(r.statistic);
      bound.push_back(r.bound);
    }
    all = stat;
    all.insert(all.end(), bound.begin(), bound.end());

    const Scale sx = fit(axis.x, 60.0, 616.0);
    Scale sy = fit(all, 360.0, 24.0);  // y grows upward

    out << "  <rect x=\"60\" y=\"24\" width=\"556\" height=\"336\" fill=\"none\" "
           "stroke=\"#888\"/>\n";
    for (int i = 0; i <= 5; ++i) {
      const double fx = sx.lo + (sx.hi - sx.lo) * i / 5.0;
      const double fy = sy.lo + (sy.hi - sy.lo) * i / 5.0;
      const double px = sx.at(fx), py = sy.at(fy);
      out << "  <line x1=\"" << num(px) << "\" y1=\"360\" x2=\"" << num(px)
          << "\" y2=\"364\" stroke=\"#888\"/>\n"
          << "  <text x=\"" << num(px) << "\" y=\"376\" text-anchor=\"middle\">"
          << num(fx) << "</text>\n"
          << "  <line x1=\"56\" y1=\"" << num(py) << "\" x2=\"60\" y2=\"" << num(py)
          << "\" stroke=\"#888\"/>\n"
          << "  <text x=\"52\" y=\"" << num(py + 4.0)
          << "\" text-anchor=\"end\">" << num(fy) << "</text>\n";
    }
    out << "  <text x=\"338\" y=\"394\" text-anchor=\"middle\">" << axis.label
        << "</text>\n";

    polyline(out, axis.x, stat, sx, sy, "stroke=\"#1f77b4\" stroke-width=\"1.5\"");
    polyline(out, axis.x, bound, sx, sy,
             "stroke=\"#d62728\" stroke-width=\"1.2\" stroke-dasharray=\"5 3\"");

    out << "  <rect x=\"480\" y=\"30\" width=\"130\" height=\"36\" fill=\"white\" "
           "stroke=\"#bbb\"/>\n"
           "  <line x1=\"488\" y1=\"42\" x2=\"508\" y2=\"42\" stroke=\"#1f77b4\" "
           "stroke-width=\"1.5\"/>\n"
           "  <text x=\"514\" y=\"46\">statistic</text>\n"
           "  <line x1=\"488\" y1=\"58\" x2=\"508\" y2=\"58\" stroke=\"#d62728\" "
           "stroke-width=\"1.2\" stroke-dasharray=\"5 3\"/>\n"
           "  <text x=\"514\" y=\"62\">bound</text>\n";
  }

  out << "  <text x=\"60\" y=\"14\">" << report.kind << " (seed " << report.seed
      << ", config " << report.digest << ")</text>\n</svg>\n";
  atomic_write_text(path, out.str());
}

}  // namespace marginlab
