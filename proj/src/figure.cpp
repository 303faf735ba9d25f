#include <fmt/format.h>

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "qbrouwer/cli.hpp"
#include "qbrouwer/maps.hpp"

namespace qbrouwer::cli {
namespace {

constexpr double kCenter = 256.0;
constexpr double kScale = 240.0;
constexpr std::array<const char*, 3> kColors{"#1f77b4", "#ff7f0e", "#2ca02c"};  // blue, orange, green

double sx(double x) { return kCenter + kScale * x; }
double sy(double y) { return kCenter - kScale * y; }

double angle_of(double x, double y) {
  const double a = std::atan2(y, x);
  return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
}

double ccw_distance(double from, double to) {
  double d = to - from;
  while (d < 0.0) d += 2.0 * std::numbers::pi;
  return d;
}

}  // namespace

std::string render_figure_svg(double eps) {
  const ExtremalMap map(2, eps);
  const Eigen::MatrixXd& v = map.vertices().matrix();
  const double inner = kScale * map.image_radius();

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"512\" height=\"512\" viewBox=\"0 0 512 512\">\n";
  svg += "  <defs><clipPath id=\"viewport\"><rect x=\"0\" y=\"0\" width=\"512\" height=\"512\"/></clipPath></defs>\n";
  svg += "  <rect x=\"0\" y=\"0\" width=\"512\" height=\"512\" fill=\"white\"/>\n";

  // The wall between cells i and j is the ray towards -x_k, k the third index.
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    double a = angle_of(-v(0, j), -v(1, j));
    double b = angle_of(-v(0, k), -v(1, k));
    if (ccw_distance(a, angle_of(v(0, i), v(1, i))) > ccw_distance(a, b)) std::swap(a, b);
    // Counterclockwise in the plane is sweep-flag 0 once the y axis is flipped.
    svg += fmt::format(
        "  <path class=\"cell\" id=\"cell{}\" d=\"M {:.9f} {:.9f} L {:.9f} {:.9f} A {:.9f} {:.9f} 0 0 0 {:.9f} {:.9f} Z\" "
        "fill=\"{}\" fill-opacity=\"0.35\" stroke=\"#888888\" stroke-width=\"1\"/>\n",
        i, kCenter, kCenter, sx(std::cos(a)), sy(std::sin(a)), kScale, kScale, sx(std::cos(b)), sy(std::sin(b)),
        kColors[static_cast<std::size_t>(i)]);
  }

  svg += fmt::format(
      "  <circle id=\"outer\" cx=\"{:.9f}\" cy=\"{:.9f}\" r=\"{:.9f}\" fill=\"none\" stroke=\"black\" "
      "stroke-width=\"2\"/>\n",
      kCenter, kCenter, kScale);
  svg += fmt::format(
      "  <circle id=\"inner\" cx=\"{:.9f}\" cy=\"{:.9f}\" r=\"{:.9f}\" fill=\"none\" stroke=\"black\" "
      "stroke-width=\"1.5\" stroke-dasharray=\"4 4\" clip-path=\"url(#viewport)\"/>\n",
      kCenter, kCenter, inner);

  const Eigen::MatrixXd& images = map.image_points().matrix();
  for (int i = 0; i < 3; ++i) {
    svg += fmt::format(
        "  <circle class=\"image\" id=\"image{}\" cx=\"{:.9f}\" cy=\"{:.9f}\" r=\"6\" fill=\"{}\" stroke=\"black\" "
        "clip-path=\"url(#viewport)\"/>\n",
        i, sx(images(0, i)), sy(images(1, i)), kColors[static_cast<std::size_t>(i)]);
  }

  svg += fmt::format(
      "  <text x=\"12\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">n = 2, eps = {}, eps/R_2 = {:.6f}</text>\n",
      eps, map.image_radius());
  if (map.image_radius() > 1.0) {
    svg += fmt::format(
        "  <text id=\"warning\" x=\"12\" y=\"500\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#b00000\">"
        "eps/R_2 = {:.6f} &gt; 1: the dotted circle lies outside the unit disk</text>\n",
        map.image_radius());
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace qbrouwer::cli
