#pragma once

#include <array>
#include <string>
#include <vector>

namespace cascade {

// Minimal SVG 1.1 line-plot writer. Data coordinates map linearly onto a
// fixed pixel viewport with a small margin; output is deterministic.
class SvgPlot {
 public:
  SvgPlot(double xlo, double xhi, double ylo, double yhi,
          int width = 640, int height = 480);

  void polyline(const std::vector<std::array<double, 2>>& pts,
                const std::string& color, double stroke_width = 1.0);
  void line(double x0, double y0, double x1, double y1,
            const std::string& color, double stroke_width = 1.0);
  void text(double x, double y, const std::string& label,
            const std::string& color = "#000000");
  void axes();

  std::string render() const;

 private:
  double px(double x) const;
  double py(double y) const;
  double xlo_, xhi_, ylo_, yhi_;
  int width_, height_;
  std::string body_;
};

}  // namespace cascade
