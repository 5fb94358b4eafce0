#include "spindex/svg.hpp"

#include <cstdio>
#include <sstream>

namespace spindex {

namespace {
const int kMargin = 48;

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}
}  // namespace

SvgCanvas::SvgCanvas(double x_min, double x_max, double y_min, double y_max, int width,
                     int height)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max), width_(width),
      height_(height) {}

double SvgCanvas::tx(double x) const {
    return kMargin + (x - x_min_) / (x_max_ - x_min_) * (width_ - 2 * kMargin);
}

double SvgCanvas::ty(double y) const {
    return height_ - kMargin - (y - y_min_) / (y_max_ - y_min_) * (height_ - 2 * kMargin);
}

void SvgCanvas::polyline(const std::vector<Vec2>& pts, const std::string& color, double stroke) {
    if (pts.size() < 2) return;
    std::ostringstream os;
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << stroke
       << "\" points=\"";
    for (const auto& p : pts) os << num(tx(p.x)) << "," << num(ty(p.y)) << " ";
    os << "\"/>\n";
    body_ += os.str();
}

void SvgCanvas::circle(const Vec2& at, double radius_px, const std::string& color, bool filled) {
    std::ostringstream os;
    os << "<circle cx=\"" << num(tx(at.x)) << "\" cy=\"" << num(ty(at.y)) << "\" r=\""
       << radius_px << "\" ";
    if (filled)
        os << "fill=\"" << color << "\"";
    else
        os << "fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    os << "/>\n";
    body_ += os.str();
}

void SvgCanvas::text(const Vec2& at, const std::string& label, int px, const std::string& color) {
    std::ostringstream os;
    os << "<text x=\"" << num(tx(at.x)) << "\" y=\"" << num(ty(at.y)) << "\" font-size=\"" << px
       << "\" font-family=\"monospace\" fill=\"" << color << "\">" << label << "</text>\n";
    body_ += os.str();
}

void SvgCanvas::frame_and_axes(const std::string& x_label, const std::string& y_label) {
    std::ostringstream os;
    os << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\""
       << width_ - 2 * kMargin << "\" height=\"" << height_ - 2 * kMargin
       << "\" fill=\"none\" stroke=\"#888888\"/>\n";
    os << "<text x=\"" << width_ / 2 << "\" y=\"" << height_ - 12
       << "\" font-size=\"13\" font-family=\"monospace\" text-anchor=\"middle\">" << x_label
       << "</text>\n";
    os << "<text x=\"14\" y=\"" << height_ / 2
       << "\" font-size=\"13\" font-family=\"monospace\" text-anchor=\"middle\" "
          "transform=\"rotate(-90 14 "
       << height_ / 2 << ")\">" << y_label << "</text>\n";
    // corner tick labels
    os << "<text x=\"" << kMargin << "\" y=\"" << height_ - kMargin + 16
       << "\" font-size=\"11\" font-family=\"monospace\">" << num(x_min_) << "</text>\n";
    os << "<text x=\"" << width_ - kMargin << "\" y=\"" << height_ - kMargin + 16
       << "\" font-size=\"11\" font-family=\"monospace\" text-anchor=\"end\">" << num(x_max_)
       << "</text>\n";
    os << "<text x=\"" << kMargin - 4 << "\" y=\"" << height_ - kMargin
       << "\" font-size=\"11\" font-family=\"monospace\" text-anchor=\"end\">" << num(y_min_)
       << "</text>\n";
    os << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin + 4
       << "\" font-size=\"11\" font-family=\"monospace\" text-anchor=\"end\">" << num(y_max_)
       << "</text>\n";
    body_ = os.str() + body_;
}

std::string SvgCanvas::finish() const {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
       << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << body_ << "</svg>\n";
    return os.str();
}

}  // namespace spindex
