#pragma once

#include <string>
#include <utility>
#include <vector>

namespace blackjack::svg {

/** Minimal SVG writer; numbers are printed with fixed precision so output is stable. */
class Document {
public:
  Document(double width, double height);

  void rect(double x, double y, double w, double h, const std::string &fill, const std::string &stroke = "none");
  void text(double x, double y, const std::string &content, double size = 12, const std::string &anchor = "start",
            const std::string &fill = "#222");
  void line(double x1, double y1, double x2, double y2, const std::string &stroke, double width = 1.0);
  void polyline(const std::vector<std::pair<double, double>> &points, const std::string &stroke, double width = 1.5);

  std::string str() const;

private:
  double width_;
  double height_;
  std::string body_;
};

std::string escape(const std::string &text);

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

/** Line chart with axes and a legend. */
std::string lineChart(const std::string &title, const std::string &xLabel, const std::string &yLabel,
                      const std::vector<Series> &series);

} // namespace blackjack::svg
