#pragma once

// Static SVG pictures in the z-plane: a trace over the start circle with
// roots and critical points, and a grid shaded by the critical point whose
// Voronoi cell contains each lifted grid point.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "alphastep/branch_lift.hpp"
#include "alphastep/critical_geometry.hpp"
#include "alphastep/json_io.hpp"
#include "alphastep/parallel.hpp"
#include "alphastep/path_lift.hpp"

namespace alphastep {

namespace detail {

inline constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
                                           "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6", "#d37295"};

class SvgCanvas {
 public:
  SvgCanvas(double half_width, int pixels) : half_(half_width), pixels_(pixels) {
    body_ = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(pixels) + "\" height=\"" +
            std::to_string(pixels) + "\" viewBox=\"0 0 " + std::to_string(pixels) + " " + std::to_string(pixels) +
            "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }

  double px(double x) const { return (x + half_) / (2.0 * half_) * pixels_; }
  double py(double y) const { return (half_ - y) / (2.0 * half_) * pixels_; }
  std::string sx(double x) const { return format_double(std::round(px(x) * 100.0) / 100.0); }
  std::string sy(double y) const { return format_double(std::round(py(y) * 100.0) / 100.0); }

  void raw(const std::string& s) { body_ += s; }

  void circle_outline(double radius, const char* stroke) {
    body_ += "<circle cx=\"" + sx(0) + "\" cy=\"" + sy(0) + "\" r=\"" +
             format_double(std::round(radius / (2.0 * half_) * pixels_ * 100.0) / 100.0) +
             "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-dasharray=\"4 3\"/>\n";
  }

  void marker(Complex z, const char* cls, double r, const char* fill) {
    body_ += "<circle class=\"" + std::string(cls) + "\" cx=\"" + sx(z.real()) + "\" cy=\"" + sy(z.imag()) +
             "\" r=\"" + format_double(r) + "\" fill=\"" + fill + "\"/>\n";
  }

  void cross(Complex z, const char* cls, const char* stroke) {
    const double x = px(z.real());
    const double y = py(z.imag());
    auto f = [](double v) { return format_double(std::round(v * 100.0) / 100.0); };
    body_ += "<path class=\"" + std::string(cls) + "\" d=\"M" + f(x - 4) + " " + f(y - 4) + "L" + f(x + 4) + " " +
             f(y + 4) + "M" + f(x - 4) + " " + f(y + 4) + "L" + f(x + 4) + " " + f(y - 4) + "\" stroke=\"" + stroke +
             "\" stroke-width=\"1.5\"/>\n";
  }

  std::string finish() { return body_ + "</svg>\n"; }

 private:
  double half_;
  int pixels_;
  std::string body_;
};

inline void draw_roots_and_critical(SvgCanvas& canvas, const CriticalProfile& profile) {
  for (const auto& r : profile.roots) canvas.cross(r, "root", "black");
  for (const auto& c : profile.critical) canvas.marker(c.point, "critical", 3.5, "#e15759");
}

}  // namespace detail

/// The iterates z_0..z_N joined by a polyline, one marker per iterate.
inline std::string trace_svg(const Trace& trace, const CriticalProfile& profile, int pixels = 600) {
  double half = trace.radius;
  for (const auto& s : trace.steps) half = std::max({half, std::abs(s.z.real()), std::abs(s.z.imag())});
  for (const auto& r : profile.roots) half = std::max({half, std::abs(r.real()), std::abs(r.imag())});
  half *= 1.1;
  detail::SvgCanvas canvas(half, pixels);
  canvas.circle_outline(trace.radius, "#999999");
  canvas.circle_outline(1.0, "#cccccc");
  detail::draw_roots_and_critical(canvas, profile);
  if (trace.steps.size() > 1) {
    std::string pts;
    for (const auto& s : trace.steps) pts += canvas.sx(s.z.real()) + "," + canvas.sy(s.z.imag()) + " ";
    pts.pop_back();
    canvas.raw("<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"#4e79a7\" stroke-width=\"1\"/>\n");
  }
  for (const auto& s : trace.steps) canvas.marker(s.z, "step", 2.5, "#4e79a7");
  return canvas.finish();
}

/// grid x grid cells over the disk of radius `half`, each colored by the
/// critical point whose cell contains (f(z), z). Unresolved cells are grey.
/// Horizontal runs of equal color are merged into one rectangle.
inline std::string voronoi_svg(const CriticalProfile& profile, int grid, double half, int pixels = 600) {
  const Polynomial& p = profile.polynomial;
  std::vector<int> color(static_cast<std::size_t>(grid) * grid, -1);
  parallel_for(static_cast<std::size_t>(grid), [&](std::size_t row) {
    for (int col = 0; col < grid; ++col) {
      const Complex z{-half + (col + 0.5) * 2.0 * half / grid, half - (static_cast<double>(row) + 0.5) * 2.0 * half / grid};
      const NearestBranchPoint near = nearest_branch_point_direct(p, profile.critical, p(z), z);
      color[row * grid + col] = (near.index && !near.flagged) ? static_cast<int>(*near.index) : -1;
    }
  });
  detail::SvgCanvas canvas(half, pixels);
  const double cell = static_cast<double>(pixels) / grid;
  auto f = [](double v) { return format_double(std::round(v * 100.0) / 100.0); };
  for (int row = 0; row < grid; ++row) {
    int col = 0;
    while (col < grid) {
      const int c = color[static_cast<std::size_t>(row) * grid + col];
      int end = col + 1;
      while (end < grid && color[static_cast<std::size_t>(row) * grid + end] == c) ++end;
      const char* fill = c < 0 ? "#dddddd" : detail::kPalette[c % 12];
      canvas.raw("<rect class=\"cell\" x=\"" + f(col * cell) + "\" y=\"" + f(row * cell) + "\" width=\"" +
                 f((end - col) * cell) + "\" height=\"" + f(cell) + "\" fill=\"" + fill + "\"/>\n");
      col = end;
    }
  }
  canvas.circle_outline(1.0, "#333333");
  detail::draw_roots_and_critical(canvas, profile);
  return canvas.finish();
}

}  // namespace alphastep
