#include "intersafe/svg.hpp"

#include <algorithm>
#include <sstream>

#include "intersafe/format.hpp"

namespace intersafe {

namespace {

// White to dark red.
std::string shade(double u) {
  u = std::clamp(u, 0.0, 1.0);
  const int g = static_cast<int>(std::lround(255.0 * (1.0 - u)));
  const int r = static_cast<int>(std::lround(255.0 - 115.0 * u));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, g);
  return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

}  // namespace

std::string volume_heatmap_svg(const VolumeMatrix& m, const std::optional<GameMarkers>& game, double data_end) {
  constexpr double cell = 24.0;
  constexpr double left = 60.0;
  constexpr double top = 30.0;
  const double width = left + 24 * cell + 20;
  const double height = top + static_cast<double>(m.phases.size()) * cell + 40;
  std::size_t peak = 1;
  for (const auto& row : m.counts) peak = std::max(peak, *std::max_element(row.begin(), row.end()));

  std::ostringstream out;
  out << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << width << R"(" height=")" << height
      << R"(" font-family="sans-serif" font-size="10">)" << '\n';
  for (std::size_t r = 0; r < m.phases.size(); ++r) {
    const double y = top + static_cast<double>(r) * cell;
    out << R"(<text x="4" y=")" << y + cell * 0.65 << R"(">Phase )" << m.phases[r] << "</text>\n";
    for (int h = 0; h < 24; ++h) {
      const std::size_t v = m.counts[r][static_cast<std::size_t>(h)];
      out << R"(<rect x=")" << left + h * cell << R"(" y=")" << y << R"(" width=")" << cell << R"(" height=")"
          << cell << R"(" fill=")" << shade(static_cast<double>(v) / static_cast<double>(peak))
          << R"(" stroke="#ccc"><title>)" << v << "</title></rect>\n";
    }
  }
  const double axis_y = top + static_cast<double>(m.phases.size()) * cell + 14;
  for (int h = 0; h < 24; h += 2) {
    out << R"(<text x=")" << left + h * cell << R"(" y=")" << axis_y << R"(">)" << h << "</text>\n";
  }
  auto marker = [&](double t, const char* label) {
    const double x = left + t / kHour * cell;
    out << R"(<line x1=")" << fixed(x, 2) << R"(" y1=")" << top - 6 << R"(" x2=")" << fixed(x, 2) << R"(" y2=")"
        << axis_y - 10 << R"(" stroke="#000" stroke-width="2"/>)" << '\n'
        << R"(<text x=")" << fixed(x + 2, 2) << R"(" y=")" << top - 8 << R"(">)" << label << "</text>\n";
  };
  if (game && game->start >= 0.0 && game->start < data_end) {
    marker(game->start, "start");
    if (game->end < data_end) marker(game->end, "end");
  }
  out << "</svg>\n";
  return out.str();
}

std::string kde_svg(const KdeSurface& k) {
  constexpr double px = 8.0;
  const double peak = std::max(1e-300, *std::max_element(k.density.begin(), k.density.end()));
  std::ostringstream out;
  out << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << k.mesh.n_cols * px << R"(" height=")"
      << k.mesh.n_rows * px << R"(">)" << '\n';
  for (std::size_t c = 0; c < k.density.size(); ++c) {
    // Row 0 is the southern edge, so flip for screen coordinates.
    const double x = k.mesh.col_of(c) * px;
    const double y = (k.mesh.n_rows - 1 - k.mesh.row_of(c)) * px;
    out << R"(<rect x=")" << x << R"(" y=")" << y << R"(" width=")" << px << R"(" height=")" << px << R"(" fill=")"
        << shade(k.density[c] / peak) << R"("/>)" << '\n';
  }
  out << "</svg>\n";
  return out.str();
}

std::string aggregate_svg(const std::vector<AggregateSeries>& series) {
  constexpr double left = 50.0;
  constexpr double top = 20.0;
  constexpr double plot_w = 500.0;
  constexpr double plot_h = 250.0;
  double ymax = 1.0;
  int h0 = 24;
  int h1 = 0;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      ymax = std::max(ymax, p.band.high);
      h0 = std::min(h0, p.hour);
      h1 = std::max(h1, p.hour);
    }
  }
  const double span = std::max(1, h1 - h0);
  auto sx = [&](int h) { return left + (h - h0) / span * plot_w; };
  auto sy = [&](double v) { return top + plot_h - std::max(0.0, v) / ymax * plot_h; };

  std::ostringstream out;
  out << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << left + plot_w + 160 << R"(" height=")"
      << top + plot_h + 40 << R"(" font-family="sans-serif" font-size="10">)" << '\n';
  out << R"(<rect x=")" << left << R"(" y=")" << top << R"(" width=")" << plot_w << R"(" height=")" << plot_h
      << R"(" fill="none" stroke="#888"/>)" << '\n';
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    std::ostringstream band;
    std::ostringstream line;
    for (const auto& p : s.points) band << fixed(sx(p.hour), 2) << ',' << fixed(sy(p.band.high), 2) << ' ';
    for (auto it = s.points.rbegin(); it != s.points.rend(); ++it) {
      band << fixed(sx(it->hour), 2) << ',' << fixed(sy(it->band.low), 2) << ' ';
    }
    for (const auto& p : s.points) line << fixed(sx(p.hour), 2) << ',' << fixed(sy(p.band.mean), 2) << ' ';
    out << R"(<polygon points=")" << band.str() << R"(" fill=")" << color << R"(" fill-opacity="0.2"/>)" << '\n';
    out << R"(<polyline points=")" << line.str() << R"(" fill="none" stroke=")" << color << R"("/>)" << '\n';
    out << R"(<text x=")" << left + plot_w + 10 << R"(" y=")" << top + 12 + 14 * static_cast<double>(i)
        << R"(" fill=")" << color << R"(">)" << s.group << " (n=" << s.days << ")</text>\n";
  }
  for (int h = h0; h <= h1; ++h) {
    out << R"(<text x=")" << fixed(sx(h) - 6, 2) << R"(" y=")" << top + plot_h + 14 << R"(">)" << h
        << ":00</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace intersafe
