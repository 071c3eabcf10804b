#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "stochgm/error.hpp"

namespace stochgm::cli {
namespace {

constexpr int kPanelW = 420;
constexpr int kPanelH = 300;
constexpr int kMarginL = 62;
constexpr int kMarginR = 14;
constexpr int kMarginT = 30;
constexpr int kMarginB = 44;
constexpr int kTitleH = 34;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  double map(double v, double p0, double p1) const {
    const double a = log ? std::log10(lo) : lo;
    const double b = log ? std::log10(hi) : hi;
    const double t = ((log ? std::log10(v) : v) - a) / (b - a);
    return p0 + t * (p1 - p0);
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const int e0 = static_cast<int>(std::floor(std::log10(lo)));
      const int e1 = static_cast<int>(std::ceil(std::log10(hi)));
      const bool sparse = e1 - e0 > 4;
      for (int e = e0; e <= e1; ++e) {
        for (double m : {1.0, 2.0, 5.0}) {
          if (sparse && m != 1.0) continue;
          const double v = m * std::pow(10.0, e);
          if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) out.push_back(v);
        }
      }
      return out;
    }
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
      out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
    return out;
  }
};

Axis make_axis(const std::vector<Series>& series, bool y, bool log,
               const std::optional<std::pair<double, double>>& fixed) {
  Axis ax;
  ax.log = log;
  if (fixed) {
    ax.lo = fixed->first;
    ax.hi = fixed->second;
    return ax;
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    for (double v : y ? s.y : s.x) {
      if (!std::isfinite(v) || (log && v <= 0.0)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo)) {
    lo = log ? 0.1 : 0.0;
    hi = log ? 1.0 : 1.0;
  }
  if (hi <= lo) {
    const double pad = log ? 0.0 : std::max(std::abs(lo) * 0.1, 1e-6);
    lo = log ? lo / 2.0 : lo - pad;
    hi = log ? hi * 2.0 : hi + pad;
  } else if (y && !log) {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  ax.lo = lo;
  ax.hi = hi;
  return ax;
}

void render_panel(std::ostringstream& os, const Panel& p, int ox, int oy) {
  const double x0 = ox + kMarginL, x1 = ox + kPanelW - kMarginR;
  const double y0 = oy + kPanelH - kMarginB, y1 = oy + kMarginT;
  const Axis ax = make_axis(p.series, false, p.log_x, std::nullopt);
  const Axis ay = make_axis(p.series, true, p.log_y, p.y_range);

  os << "<g class='panel'>\n";
  os << "<rect x='" << x0 << "' y='" << y1 << "' width='" << x1 - x0 << "' height='" << y0 - y1
     << "' fill='white' stroke='#444'/>\n";
  for (double t : ax.ticks()) {
    const double px = ax.map(t, x0, x1);
    os << "<line x1='" << px << "' y1='" << y0 << "' x2='" << px << "' y2='" << y1
       << "' stroke='#ddd'/>\n";
    os << "<text x='" << px << "' y='" << y0 + 14 << "' font-size='10' text-anchor='middle'>" << num(t)
       << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double py = ay.map(t, y0, y1);
    os << "<line x1='" << x0 << "' y1='" << py << "' x2='" << x1 << "' y2='" << py
       << "' stroke='#ddd'/>\n";
    os << "<text x='" << x0 - 4 << "' y='" << py + 3 << "' font-size='10' text-anchor='end'>" << num(t)
       << "</text>\n";
  }
  os << "<text x='" << (x0 + x1) / 2 << "' y='" << oy + 18 << "' font-size='13' text-anchor='middle'>"
     << escape(p.title) << "</text>\n";
  os << "<text x='" << (x0 + x1) / 2 << "' y='" << y0 + 32 << "' font-size='11' text-anchor='middle'>"
     << escape(p.x_label) << "</text>\n";
  os << "<text transform='translate(" << ox + 14 << "," << (y0 + y1) / 2
     << ") rotate(-90)' font-size='11' text-anchor='middle'>" << escape(p.y_label) << "</text>\n";

  os << "<clipPath id='c" << ox << "_" << oy << "'><rect x='" << x0 << "' y='" << y1 << "' width='"
     << x1 - x0 << "' height='" << y0 - y1 << "'/></clipPath>\n";
  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& s = p.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::ostringstream path;
    bool pen = false;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      const bool ok = std::isfinite(s.x[i]) && std::isfinite(s.y[i]) && (!p.log_x || s.x[i] > 0) &&
                      (!p.log_y || s.y[i] > 0);
      if (!ok) {
        pen = false;
        continue;
      }
      path << (pen ? " L" : " M") << ax.map(s.x[i], x0, x1) << ',' << ay.map(s.y[i], y0, y1);
      pen = true;
    }
    os << "<path clip-path='url(#c" << ox << "_" << oy << ")' d='" << path.str()
       << "' fill='none' stroke='" << color << "' stroke-width='1.6'"
       << (s.dashed ? " stroke-dasharray='5,3'" : "") << "/>\n";
    const double ly = y1 + 12 + 13.0 * static_cast<double>(k);
    os << "<line x1='" << x1 - 110 << "' y1='" << ly - 4 << "' x2='" << x1 - 92 << "' y2='" << ly - 4
       << "' stroke='" << color << "' stroke-width='1.6'" << (s.dashed ? " stroke-dasharray='5,3'" : "")
       << "/>\n";
    os << "<text x='" << x1 - 88 << "' y='" << ly << "' font-size='10'>" << escape(s.label) << "</text>\n";
  }
  os << "</g>\n";
}

}  // namespace

std::string render_svg(const std::vector<Panel>& panels, int columns, const std::string& title) {
  columns = std::max(1, columns);
  const int rows = (static_cast<int>(panels.size()) + columns - 1) / columns;
  const int width = columns * kPanelW;
  const int height = kTitleH + rows * kPanelH;
  std::ostringstream os;
  os << "<?xml version='1.0' encoding='UTF-8'?>\n"
     << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
     << "' viewBox='0 0 " << width << ' ' << height << "' font-family='sans-serif'>\n"
     << "<rect width='100%' height='100%' fill='#fafafa'/>\n"
     << "<text x='" << width / 2 << "' y='22' font-size='15' text-anchor='middle'>" << escape(title)
     << "</text>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const int c = static_cast<int>(i) % columns;
    const int r = static_cast<int>(i) / columns;
    render_panel(os, panels[i], c * kPanelW, kTitleH + r * kPanelH);
  }
  os << "</svg>\n";
  return os.str();
}

void write_svg(const std::filesystem::path& path, const std::vector<Panel>& panels, int columns,
               const std::string& title) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << render_svg(panels, columns, title);
}

}  // namespace stochgm::cli
