#ifndef SPINDEX_SVG_HPP
#define SPINDEX_SVG_HPP

#include <string>
#include <vector>

#include "spindex/linalg.hpp"

namespace spindex {

/// Minimal static SVG writer with a fixed data-to-viewport transform.
class SvgCanvas {
public:
    SvgCanvas(double x_min, double x_max, double y_min, double y_max, int width = 720,
              int height = 480);

    void polyline(const std::vector<Vec2>& pts, const std::string& color, double stroke = 1.0);
    void circle(const Vec2& at, double radius_px, const std::string& color, bool filled = true);
    void text(const Vec2& at, const std::string& label, int px = 12,
              const std::string& color = "#333333");
    void frame_and_axes(const std::string& x_label, const std::string& y_label);

    std::string finish() const;

private:
    double tx(double x) const;
    double ty(double y) const;

    double x_min_, x_max_, y_min_, y_max_;
    int width_, height_;
    std::string body_;
};

}  // namespace spindex

#endif
