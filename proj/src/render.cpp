#include "shopsim/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace shopsim {

std::vector<TrajectoryPoint> load_trajectory_csv(const std::string& bytes) {
  std::vector<TrajectoryPoint> out;
  std::istringstream in(bytes);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("t,", 0) == 0) continue;  // header
    }
    TrajectoryPoint p;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &p.t, &p.x, &p.y, &p.yaw) != 4) {
      throw ParseError("trajectory.csv: malformed line: '" + line + "'");
    }
    out.push_back(p);
  }
  return out;
}

namespace {

struct Bounds {
  double xmin = 1e18, ymin = 1e18, xmax = -1e18, ymax = -1e18;
  void grow(double x, double y) {
    xmin = std::min(xmin, x);
    ymin = std::min(ymin, y);
    xmax = std::max(xmax, x);
    ymax = std::max(ymax, y);
  }
};

std::string f3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string render_svg(const WorldConfig& config, const SemanticMap& map,
                       const std::vector<TrajectoryPoint>& trajectory) {
  Bounds b;
  for (const Rect& r : config.corridors) {
    b.grow(r.xmin, r.ymin);
    b.grow(r.xmax, r.ymax);
  }
  const double pad = 0.6;
  const double scale = 60.0;  // px per meter
  const double w = (b.xmax - b.xmin + 2 * pad) * scale;
  const double h = (b.ymax - b.ymin + 2 * pad) * scale;
  // World +y is up; SVG y grows downward.
  auto X = [&](double x) { return (x - b.xmin + pad) * scale; };
  auto Y = [&](double y) { return h - (y - b.ymin + pad) * scale; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f3(w)
      << "\" height=\"" << f3(h) << "\" viewBox=\"0 0 " << f3(w) << " " << f3(h)
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  for (const Rect& r : config.corridors) {
    svg << "<rect x=\"" << f3(X(r.xmin)) << "\" y=\"" << f3(Y(r.ymax)) << "\" width=\""
        << f3((r.xmax - r.xmin) * scale) << "\" height=\""
        << f3((r.ymax - r.ymin) * scale) << "\" fill=\"#f2f2f2\"/>\n";
  }
  for (const StoreSpec& st : config.stores) {
    const Rect& r = st.interior;
    svg << "<rect x=\"" << f3(X(r.xmin)) << "\" y=\"" << f3(Y(r.ymax)) << "\" width=\""
        << f3((r.xmax - r.xmin) * scale) << "\" height=\""
        << f3((r.ymax - r.ymin) * scale)
        << "\" fill=\"#cfe3ff\" fill-opacity=\"0.6\"/>\n";
    svg << "<text x=\"" << f3(X(r.cx())) << "\" y=\"" << f3(Y(r.cy()))
        << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#234\">" << st.category
        << "</text>\n";
  }
  {
    const Rect& r = config.pickup_zone;
    svg << "<rect x=\"" << f3(X(r.xmin)) << "\" y=\"" << f3(Y(r.ymax)) << "\" width=\""
        << f3((r.xmax - r.xmin) * scale) << "\" height=\""
        << f3((r.ymax - r.ymin) * scale)
        << "\" fill=\"#c9f0c9\" fill-opacity=\"0.8\"/>\n";
    svg << "<text x=\"" << f3(X(r.cx())) << "\" y=\"" << f3(Y(r.cy()))
        << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#151\">pickup</text>\n";
  }
  for (const Segment& s : config.walls) {
    svg << "<line x1=\"" << f3(X(s.x1)) << "\" y1=\"" << f3(Y(s.y1)) << "\" x2=\""
        << f3(X(s.x2)) << "\" y2=\"" << f3(Y(s.y2))
        << "\" stroke=\"#222222\" stroke-width=\"2\"/>\n";
  }
  if (!trajectory.empty()) {
    svg << "<polyline fill=\"none\" stroke=\"#d33\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
      if (i) svg << " ";
      svg << f3(X(trajectory[i].x)) << "," << f3(Y(trajectory[i].y));
    }
    svg << "\"/>\n";
    const auto& s0 = trajectory.front();
    const auto& s1 = trajectory.back();
    svg << "<circle cx=\"" << f3(X(s0.x)) << "\" cy=\"" << f3(Y(s0.y))
        << "\" r=\"4\" fill=\"#2a2\"/>\n";
    svg << "<circle cx=\"" << f3(X(s1.x)) << "\" cy=\"" << f3(Y(s1.y))
        << "\" r=\"4\" fill=\"#d33\"/>\n";
  }
  for (const JunctionRecord& rec : map) {
    svg << "<circle cx=\"" << f3(X(rec.pose.x)) << "\" cy=\"" << f3(Y(rec.pose.y))
        << "\" r=\"5\" fill=\"none\" stroke=\"#06c\" stroke-width=\"2\"/>\n";
    std::string label = rec.id + ":";
    for (const auto& p : rec.poi_pairs) label += " [" + p + "]";
    svg << "<text x=\"" << f3(X(rec.pose.x) + 8) << "\" y=\""
        << f3(Y(rec.pose.y) - 6) << "\" font-size=\"10\" fill=\"#06c\">" << label
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_ascii(const WorldConfig& config,
                         const std::vector<TrajectoryPoint>& trajectory) {
  Bounds b;
  for (const Rect& r : config.corridors) {
    b.grow(r.xmin, r.ymin);
    b.grow(r.xmax, r.ymax);
  }
  const double res = 0.25;
  const int nx = static_cast<int>(std::ceil((b.xmax - b.xmin) / res)) + 2;
  const int ny = static_cast<int>(std::ceil((b.ymax - b.ymin) / res)) + 2;
  std::vector<std::string> rows(static_cast<std::size_t>(ny), std::string(static_cast<std::size_t>(nx), '#'));

  auto cell = [&](double x, double y) -> char* {
    const int ix = static_cast<int>(std::floor((x - b.xmin) / res)) + 1;
    const int iy = static_cast<int>(std::floor((y - b.ymin) / res)) + 1;
    if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) return nullptr;
    return &rows[static_cast<std::size_t>(ny - 1 - iy)][static_cast<std::size_t>(ix)];
  };

  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const double x = b.xmin + (ix - 0.5) * res;
      const double y = b.ymin + (iy - 0.5) * res;
      if (point_in_free_space(config, x, y)) {
        rows[static_cast<std::size_t>(ny - 1 - iy)][static_cast<std::size_t>(ix)] = '.';
      }
    }
  }
  {
    const Rect& r = config.pickup_zone;
    for (double x = r.xmin; x <= r.xmax; x += res) {
      for (double y = r.ymin; y <= r.ymax; y += res) {
        if (char* c = cell(x, y)) *c = 'P';
      }
    }
  }
  for (const auto& p : trajectory) {
    if (char* c = cell(p.x, p.y)) *c = '*';
  }
  if (!trajectory.empty()) {
    if (char* c = cell(trajectory.back().x, trajectory.back().y)) *c = 'R';
  }
  std::string out;
  for (const auto& row : rows) {
    out += row;
    out += '\n';
  }
  return out;
}

}  // namespace shopsim
