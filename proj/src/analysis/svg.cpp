#include "blackjack/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

namespace blackjack::svg {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

const char *kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

} // namespace

std::string escape(const std::string &text) {
  std::string out;
  for (char c : text) {
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

Document::Document(double width, double height) : width_(width), height_(height) {}

void Document::rect(double x, double y, double w, double h, const std::string &fill, const std::string &stroke) {
  body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
           "\" fill=\"" + fill + "\" stroke=\"" + stroke + "\"/>\n";
}

void Document::text(double x, double y, const std::string &content, double size, const std::string &anchor,
                    const std::string &fill) {
  body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(size) + "\" text-anchor=\"" + anchor +
           "\" fill=\"" + fill + "\" font-family=\"sans-serif\">" + escape(content) + "</text>\n";
}

void Document::line(double x1, double y1, double x2, double y2, const std::string &stroke, double width) {
  body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
           "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

void Document::polyline(const std::vector<std::pair<double, double>> &points, const std::string &stroke,
                        double width) {
  std::string pts;
  for (const auto &[x, y] : points) pts += num(x) + "," + num(y) + " ";
  body_ += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) +
           "\"/>\n";
}

std::string Document::str() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) + "\" height=\"" + num(height_) +
         "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
         body_ + "</svg>\n";
}

std::string lineChart(const std::string &title, const std::string &xLabel, const std::string &yLabel,
                      const std::vector<Series> &series) {
  const double w = 720, h = 420, left = 70, right = 170, top = 40, bottom = 50;
  double xmin = std::numeric_limits<double>::max(), xmax = std::numeric_limits<double>::lowest();
  double ymin = xmin, ymax = xmax;
  for (const auto &s : series) {
    for (const auto &[x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) {
    ymin -= 0.01;
    ymax += 0.01;
  }
  const double pw = w - left - right, ph = h - top - bottom;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + ph - (y - ymin) / (ymax - ymin) * ph; };

  Document doc(w, h);
  doc.text(w / 2, 24, title, 15, "middle");
  doc.line(left, top + ph, left + pw, top + ph, "#444");
  doc.line(left, top, left, top + ph, "#444");
  for (int i = 0; i <= 4; ++i) {
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", yv);
    doc.text(left - 6, sy(yv) + 4, buf, 10, "end");
    doc.line(left, sy(yv), left + pw, sy(yv), "#eee");
    std::snprintf(buf, sizeof buf, "%.0f", xv);
    doc.text(sx(xv), top + ph + 16, buf, 10, "middle");
  }
  doc.text(left + pw / 2, h - 10, xLabel, 12, "middle");
  doc.text(16, top + ph / 2, yLabel, 12, "middle");
  for (size_t i = 0; i < series.size(); ++i) {
    const std::string color = kPalette[i % std::size(kPalette)];
    std::vector<std::pair<double, double>> pts;
    for (const auto &[x, y] : series[i].points) pts.emplace_back(sx(x), sy(y));
    doc.polyline(pts, color);
    const double ly = top + 14 + 18 * static_cast<double>(i);
    doc.line(left + pw + 12, ly - 4, left + pw + 32, ly - 4, color, 2.5);
    doc.text(left + pw + 38, ly, series[i].label, 11);
  }
  return doc.str();
}

} // namespace blackjack::svg
