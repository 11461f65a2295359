#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "nhqm/error.hpp"
#include "nhqm/experiments.hpp"

namespace nhqm::experiments {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 440;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 170;
constexpr int kMarginTop = 30;
constexpr int kMarginBottom = 50;

struct Rgb {
  std::uint8_t r, g, b;
};

constexpr std::array<Rgb, 8> kPalette{{{31, 119, 180},
                                       {255, 127, 14},
                                       {44, 160, 44},
                                       {214, 39, 40},
                                       {148, 103, 189},
                                       {140, 86, 75},
                                       {227, 119, 194},
                                       {127, 127, 127}}};

struct Curve {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct Frame {
  double x_min, x_max, y_min, y_max;

  double px(double x) const {
    return kMarginLeft + (x - x_min) / (x_max - x_min) * (kWidth - kMarginLeft - kMarginRight);
  }
  double py(double y) const {
    return kHeight - kMarginBottom - (y - y_min) / (y_max - y_min) * (kHeight - kMarginTop - kMarginBottom);
  }
};

double pick(const SweepRow& row, PlotKind kind) {
  switch (kind) {
    case PlotKind::Real: return row.value.real();
    case PlotKind::Imag: return row.value.imag();
    case PlotKind::Abs: break;
  }
  return std::abs(row.value);
}

const char* axis_label(PlotKind kind) {
  switch (kind) {
    case PlotKind::Real: return "Re &lt;H&gt;";
    case PlotKind::Imag: return "Im &lt;H&gt;";
    case PlotKind::Abs: break;
  }
  return "|&lt;H&gt;|";
}

// Curves in order of first appearance of each gauge label.
std::vector<Curve> collect(const SweepTable& table, PlotKind kind) {
  std::vector<Curve> curves;
  std::map<std::string, std::size_t> index;
  for (const auto& row : table.rows) {
    auto [it, inserted] = index.try_emplace(row.gauge, curves.size());
    if (inserted) curves.push_back({row.gauge, {}});
    const double y = pick(row, kind);
    if (row.status == "ok" && std::isfinite(y) && std::isfinite(row.gamma)) {
      curves[it->second].points.emplace_back(row.gamma, y);
    }
  }
  return curves;
}

Frame frame_for(const std::vector<Curve>& curves) {
  Frame f{1e300, -1e300, 1e300, -1e300};
  for (const auto& c : curves) {
    for (const auto& [x, y] : c.points) {
      f.x_min = std::min(f.x_min, x);
      f.x_max = std::max(f.x_max, x);
      f.y_min = std::min(f.y_min, y);
      f.y_max = std::max(f.y_max, y);
    }
  }
  if (f.x_min > f.x_max) f = {0.0, 1.0, 0.0, 1.0};
  if (f.x_max - f.x_min < 1e-12) {
    f.x_min -= 0.5;
    f.x_max += 0.5;
  }
  const double pad = std::max(1e-9, 0.05 * (f.y_max - f.y_min));
  f.y_min -= pad;
  f.y_max += pad;
  return f;
}

std::string num(double x) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << x;
  return out.str();
}

std::string tick(double x) {
  std::ostringstream out;
  out << std::setprecision(4) << x;
  return out.str();
}

void write_svg(const std::vector<Curve>& curves, const Frame& f, PlotKind kind,
               const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const double x0 = f.px(f.x_min), x1 = f.px(f.x_max), y0 = f.py(f.y_min), y1 = f.py(f.y_max);
  out << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0)
      << "\" height=\"" << num(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x_min + (f.x_max - f.x_min) * i / 4.0;
    const double yv = f.y_min + (f.y_max - f.y_min) * i / 4.0;
    out << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << num(y0 + 18) << "\" text-anchor=\"middle\">"
        << tick(xv) << "</text>\n";
    out << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(f.py(yv) + 4) << "\" text-anchor=\"end\">"
        << tick(yv) << "</text>\n";
  }
  out << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">gamma</text>\n";
  out << "<text x=\"16\" y=\"" << num((y0 + y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num((y0 + y1) / 2) << ")\">" << axis_label(kind) << "</text>\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const Rgb c = kPalette[i % kPalette.size()];
    std::ostringstream color;
    color << "rgb(" << int(c.r) << ',' << int(c.g) << ',' << int(c.b) << ')';
    out << "<polyline fill=\"none\" stroke=\"" << color.str() << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : curves[i].points) out << num(f.px(x)) << ',' << num(f.py(y)) << ' ';
    out << "\"/>\n";
    const double ly = kMarginTop + 18.0 * static_cast<double>(i);
    out << "<line x1=\"" << num(x1 + 12) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(x1 + 36)
        << "\" y2=\"" << num(ly) << "\" stroke=\"" << color.str() << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(x1 + 42) << "\" y=\"" << num(ly + 4) << "\">" << curves[i].label << "</text>\n";
  }
  out << "</svg>\n";
}

class Raster {
 public:
  Raster() : pixels_(static_cast<std::size_t>(kWidth * kHeight), Rgb{255, 255, 255}) {}

  void set(int x, int y, Rgb c) {
    if (x >= 0 && x < kWidth && y >= 0 && y < kHeight) pixels_[static_cast<std::size_t>(y * kWidth + x)] = c;
  }

  void line(int x0, int y0, int x1, int y1, Rgb c) {
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
      set(x0, y0, c);
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + path.string());
    out << "P6\n" << kWidth << ' ' << kHeight << "\n255\n";
    for (const auto& p : pixels_) out.put(static_cast<char>(p.r)).put(static_cast<char>(p.g)).put(static_cast<char>(p.b));
  }

 private:
  std::vector<Rgb> pixels_;
};

void write_ppm(const std::vector<Curve>& curves, const Frame& f, const std::filesystem::path& path) {
  Raster img;
  const auto ix = [&](double x) { return static_cast<int>(std::lround(f.px(x))); };
  const auto iy = [&](double y) { return static_cast<int>(std::lround(f.py(y))); };
  const Rgb black{0, 0, 0};
  img.line(ix(f.x_min), iy(f.y_min), ix(f.x_max), iy(f.y_min), black);
  img.line(ix(f.x_min), iy(f.y_max), ix(f.x_max), iy(f.y_max), black);
  img.line(ix(f.x_min), iy(f.y_min), ix(f.x_min), iy(f.y_max), black);
  img.line(ix(f.x_max), iy(f.y_min), ix(f.x_max), iy(f.y_max), black);
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const Rgb c = kPalette[i % kPalette.size()];
    const auto& pts = curves[i].points;
    for (std::size_t k = 1; k < pts.size(); ++k) {
      img.line(ix(pts[k - 1].first), iy(pts[k - 1].second), ix(pts[k].first), iy(pts[k].second), c);
    }
    // legend swatch
    const int ly = kMarginTop + 18 * static_cast<int>(i);
    img.line(ix(f.x_max) + 12, ly, ix(f.x_max) + 36, ly, c);
  }
  img.write(path);
}

}  // namespace

PlotKind parse_plot_kind(const std::string& name) {
  if (name == "abs") return PlotKind::Abs;
  if (name == "re") return PlotKind::Real;
  if (name == "im") return PlotKind::Imag;
  throw Error(ErrorKind::ConfigError, "plot kind must be abs, re or im");
}

void emit_plot(const SweepTable& table, PlotKind kind, const std::filesystem::path& output) {
  if (table.rows.empty()) throw Error(ErrorKind::SchemaMismatch, "table has no rows");
  const auto curves = collect(table, kind);
  const Frame frame = frame_for(curves);
  const auto ext = output.extension().string();
  if (ext == ".svg") {
    write_svg(curves, frame, kind, output);
  } else if (ext == ".ppm") {
    write_ppm(curves, frame, output);
  } else {
    throw Error(ErrorKind::ConfigError, "unsupported image extension '" + ext + "' (use .svg or .ppm)");
  }
}

}  // namespace nhqm::experiments
