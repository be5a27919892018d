#include "cascade/svg.hpp"

#include "cascade/csvio.hpp"

namespace cascade {

namespace {
constexpr double kMargin = 40.0;
}

SvgPlot::SvgPlot(double xlo, double xhi, double ylo, double yhi, int width, int height)
    : xlo_(xlo), xhi_(xhi), ylo_(ylo), yhi_(yhi), width_(width), height_(height) {
  if (xhi_ <= xlo_) xhi_ = xlo_ + 1.0;
  if (yhi_ <= ylo_) yhi_ = ylo_ + 1.0;
}

double SvgPlot::px(double x) const {
  return kMargin + (x - xlo_) / (xhi_ - xlo_) * (width_ - 2 * kMargin);
}

double SvgPlot::py(double y) const {
  return height_ - kMargin - (y - ylo_) / (yhi_ - ylo_) * (height_ - 2 * kMargin);
}

void SvgPlot::polyline(const std::vector<std::array<double, 2>>& pts,
                       const std::string& color, double stroke_width) {
  if (pts.empty()) return;
  body_ += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
           format_double(stroke_width) + "\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) body_ += ' ';
    body_ += format_double(px(pts[i][0])) + ',' + format_double(py(pts[i][1]));
  }
  body_ += "\"/>\n";
}

void SvgPlot::line(double x0, double y0, double x1, double y1,
                   const std::string& color, double stroke_width) {
  body_ += "<line x1=\"" + format_double(px(x0)) + "\" y1=\"" + format_double(py(y0)) +
           "\" x2=\"" + format_double(px(x1)) + "\" y2=\"" + format_double(py(y1)) +
           "\" stroke=\"" + color + "\" stroke-width=\"" + format_double(stroke_width) +
           "\"/>\n";
}

void SvgPlot::text(double x, double y, const std::string& label, const std::string& color) {
  std::string safe;
  for (char c : label) {
    switch (c) {
      case '<': safe += "&lt;"; break;
      case '>': safe += "&gt;"; break;
      case '&': safe += "&amp;"; break;
      default: safe += c;
    }
  }
  body_ += "<text x=\"" + format_double(px(x)) + "\" y=\"" + format_double(py(y)) +
           "\" font-family=\"monospace\" font-size=\"12\" fill=\"" + color + "\">" +
           safe + "</text>\n";
}

void SvgPlot::axes() {
  line(xlo_, ylo_, xhi_, ylo_, "#333333");
  line(xlo_, ylo_, xlo_, yhi_, "#333333");
  text(xlo_, ylo_ - 0.04 * (yhi_ - ylo_), format_double(xlo_), "#333333");
  text(xhi_ - 0.08 * (xhi_ - xlo_), ylo_ - 0.04 * (yhi_ - ylo_), format_double(xhi_), "#333333");
  text(xlo_ - 0.0, yhi_, format_double(yhi_), "#333333");
}

std::string SvgPlot::render() const {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_int(width_) +
         "\" height=\"" + format_int(height_) + "\" viewBox=\"0 0 " + format_int(width_) +
         ' ' + format_int(height_) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  out += body_;
  out += "</svg>\n";
  return out;
}

}  // namespace cascade
