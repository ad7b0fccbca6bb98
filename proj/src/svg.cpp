#include "fpl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "fpl/errors.hpp"

namespace fpl {

namespace {

constexpr double kPlotW = 560.0;
constexpr double kPlotH = 180.0;
constexpr double kLeft = 56.0;
constexpr double kRight = 16.0;
constexpr double kTop = 14.0;
constexpr double kBottom = 40.0;
constexpr double kLegendH = 24.0;
constexpr int kCurveSamples = 64;

const char *const kPalette[] = {"#1b6ca8", "#c0392b", "#1e8449", "#8e44ad",
                                "#b7950b", "#148f77", "#a04000", "#34495e"};
constexpr size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);
const char *const kTrajColor = "#8a939b";

std::string coord(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  std::string s(buf);
  return s == "-0.000" ? "0.000" : s;
}

std::string tick_label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  std::string s(buf);
  return s == "-0" ? "0" : s;
}

std::string xml_escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

/* Sample times of one template: its breakpoints plus a uniform grid, so
 * the square-root std curve bends smoothly between breakpoints. */
std::vector<double> atom_grid(const Atom &a) {
  std::vector<double> ts = a.breakpoint_times();
  double tau = a.horizon();
  if (tau > 0.0)
    for (int i = 0; i <= kCurveSamples; ++i)
      ts.push_back(tau * i / kCurveSamples);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end(),
                       [](double a_, double b_) { return b_ - a_ < 1e-9; }),
           ts.end());
  return ts;
}

/* Standard deviation of dimension d at time t; NaN when unconstrained. */
double std_at(const Atom &a, int d, double t) {
  if (a.has_diagonal_covariance()) {
    const auto &diag = std::get<DiagonalCovariance>(a.covariance());
    const PiecewiseLinear &var = diag.variances[static_cast<size_t>(d)];
    if (var.is_infinite())
      return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(var.eval(t));
  }
  const auto &full = std::get<FullCovariance>(a.covariance());
  return std::sqrt(full.eval(t)(d, d));
}

} // namespace

std::string render_svg(const std::vector<std::shared_ptr<const Atom>> &atoms,
                       const std::vector<Trajectory> &trajectories) {
  if (atoms.empty() && trajectories.empty())
    throw DomainError("nothing to plot");
  for (const auto &a : atoms)
    if (!a)
      throw DomainError("plot received a null template");

  int dim = atoms.empty() ? trajectories.front().dim() : atoms.front()->dim();
  for (const auto &a : atoms)
    if (a->dim() != dim)
      throw DomainError("plot inputs mix signal dimensions");
  for (const Trajectory &z : trajectories)
    if (z.dim() != dim)
      throw DomainError("plot inputs mix signal dimensions");

  double xmax = 0.0;
  for (const auto &a : atoms)
    xmax = std::max(xmax, a->horizon());
  for (const Trajectory &z : trajectories)
    xmax = std::max(xmax, z.horizon());
  if (xmax <= 0.0)
    xmax = 1.0;

  /* Per-dimension value range over every drawn curve. */
  std::vector<double> ymin(static_cast<size_t>(dim),
                           std::numeric_limits<double>::infinity());
  std::vector<double> ymax(static_cast<size_t>(dim),
                           -std::numeric_limits<double>::infinity());
  auto grow = [&](int d, double v) {
    if (!std::isfinite(v))
      return;
    ymin[static_cast<size_t>(d)] = std::min(ymin[static_cast<size_t>(d)], v);
    ymax[static_cast<size_t>(d)] = std::max(ymax[static_cast<size_t>(d)], v);
  };
  for (const Trajectory &z : trajectories)
    for (size_t i = 0; i < z.sample_count(); ++i)
      for (int d = 0; d < dim; ++d)
        grow(d, z.point(i)(d));
  std::vector<std::vector<double>> grids;
  for (const auto &a : atoms) {
    grids.push_back(atom_grid(*a));
    for (double t : grids.back()) {
      Eigen::VectorXd m = a->mean_at(t);
      for (int d = 0; d < dim; ++d) {
        double s = std_at(*a, d, t);
        if (std::isnan(s)) {
          grow(d, m(d));
        } else {
          grow(d, m(d) - s);
          grow(d, m(d) + s);
        }
      }
    }
  }
  for (int d = 0; d < dim; ++d) {
    auto &lo = ymin[static_cast<size_t>(d)];
    auto &hi = ymax[static_cast<size_t>(d)];
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    double pad = (hi - lo) < 1e-9 ? 0.5 : 0.08 * (hi - lo);
    lo -= pad;
    hi += pad;
  }

  double pitch = kTop + kPlotH + kBottom;
  double width = kLeft + kPlotW + kRight;
  double height = kLegendH + dim * pitch;

  std::string out;
  out.reserve(1 << 16);
  auto add = [&](const std::string &s) { out += s; };

  add("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + coord(width) +
      "\" height=\"" + coord(height) + "\" viewBox=\"0 0 " + coord(width) +
      " " + coord(height) + "\" font-family=\"sans-serif\">\n");
  add("<rect width=\"" + coord(width) + "\" height=\"" + coord(height) +
      "\" fill=\"#ffffff\"/>\n");

  /* Legend row. */
  double lx = kLeft;
  for (size_t i = 0; i < atoms.size(); ++i) {
    const char *color = kPalette[i % kPaletteSize];
    std::string name = xml_escape(atoms[i]->name());
    add("<rect x=\"" + coord(lx) + "\" y=\"7\" width=\"10\" height=\"10\" fill=\"" +
        color + "\"/>\n");
    add("<text x=\"" + coord(lx + 14) +
        "\" y=\"16\" font-size=\"11\" fill=\"#333333\">" + name + "</text>\n");
    lx += 14 + 7.0 * static_cast<double>(name.size()) + 22;
  }
  if (!trajectories.empty()) {
    std::string label =
        "trajectories (" + std::to_string(trajectories.size()) + ")";
    add("<rect x=\"" + coord(lx) + "\" y=\"7\" width=\"10\" height=\"10\" fill=\"" +
        std::string(kTrajColor) + "\"/>\n");
    add("<text x=\"" + coord(lx + 14) +
        "\" y=\"16\" font-size=\"11\" fill=\"#333333\">" + label + "</text>\n");
  }

  for (int d = 0; d < dim; ++d) {
    double py = kLegendH + d * pitch + kTop;
    double lo = ymin[static_cast<size_t>(d)];
    double hi = ymax[static_cast<size_t>(d)];
    auto X = [&](double t) { return kLeft + t / xmax * kPlotW; };
    auto Y = [&](double v) {
      return py + kPlotH - (v - lo) / (hi - lo) * kPlotH;
    };

    /* Horizontal grid lines with y tick labels. */
    for (int i = 0; i <= 4; ++i) {
      double v = lo + (hi - lo) * i / 4;
      add("<line x1=\"" + coord(kLeft) + "\" y1=\"" + coord(Y(v)) + "\" x2=\"" +
          coord(kLeft + kPlotW) + "\" y2=\"" + coord(Y(v)) +
          "\" stroke=\"#e4e7ea\" stroke-width=\"1\"/>\n");
      add("<text x=\"" + coord(kLeft - 6) + "\" y=\"" + coord(Y(v) + 3.5) +
          "\" font-size=\"10\" text-anchor=\"end\" fill=\"#555555\">" +
          tick_label(v) + "</text>\n");
    }

    /* Std bands, then data, then means on top. */
    for (size_t i = 0; i < atoms.size(); ++i) {
      const Atom &a = *atoms[i];
      const std::vector<double> &ts = grids[i];
      bool banded = true;
      for (double t : ts)
        if (std::isnan(std_at(a, d, t)))
          banded = false;
      if (!banded || ts.size() < 2)
        continue;
      std::string pts;
      for (double t : ts) {
        double m = a.mean_at(t)(d), s = std_at(a, d, t);
        pts += coord(X(t)) + "," + coord(Y(m + s)) + " ";
      }
      for (auto it = ts.rbegin(); it != ts.rend(); ++it) {
        double m = a.mean_at(*it)(d), s = std_at(a, d, *it);
        pts += coord(X(*it)) + "," + coord(Y(m - s)) + " ";
      }
      pts.pop_back();
      add("<polygon points=\"" + pts + "\" fill=\"" +
          std::string(kPalette[i % kPaletteSize]) +
          "\" fill-opacity=\"0.16\" stroke=\"none\"/>\n");
    }

    for (const Trajectory &z : trajectories) {
      std::string pts;
      for (size_t i = 0; i < z.sample_count(); ++i)
        pts += coord(X(z.times()[i])) + "," + coord(Y(z.point(i)(d))) + " ";
      pts.pop_back();
      add("<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
          std::string(kTrajColor) +
          "\" stroke-width=\"1\" stroke-opacity=\"0.65\"/>\n");
    }

    for (size_t i = 0; i < atoms.size(); ++i) {
      const Atom &a = *atoms[i];
      std::string pts;
      for (double t : grids[i])
        pts += coord(X(t)) + "," + coord(Y(a.mean_at(t)(d))) + " ";
      pts.pop_back();
      add("<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
          std::string(kPalette[i % kPaletteSize]) +
          "\" stroke-width=\"2.5\"/>\n");
    }

    /* Frame, x ticks, panel title. */
    add("<rect x=\"" + coord(kLeft) + "\" y=\"" + coord(py) + "\" width=\"" +
        coord(kPlotW) + "\" height=\"" + coord(kPlotH) +
        "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n");
    for (int i = 0; i <= 4; ++i) {
      double t = xmax * i / 4;
      add("<line x1=\"" + coord(X(t)) + "\" y1=\"" + coord(py + kPlotH) +
          "\" x2=\"" + coord(X(t)) + "\" y2=\"" + coord(py + kPlotH + 4) +
          "\" stroke=\"#444444\" stroke-width=\"1\"/>\n");
      add("<text x=\"" + coord(X(t)) + "\" y=\"" + coord(py + kPlotH + 16) +
          "\" font-size=\"10\" text-anchor=\"middle\" fill=\"#555555\">" +
          tick_label(t) + "</text>\n");
    }
    add("<text x=\"" + coord(kLeft) + "\" y=\"" + coord(py - 4) +
        "\" font-size=\"11\" fill=\"#333333\">s" + std::to_string(d + 1) +
        "</text>\n");
    add("<text x=\"" + coord(kLeft + kPlotW / 2) + "\" y=\"" +
        coord(py + kPlotH + 32) +
        "\" font-size=\"10\" text-anchor=\"middle\" fill=\"#555555\">t</text>\n");
  }

  add("</svg>\n");
  return out;
}

} // namespace fpl
