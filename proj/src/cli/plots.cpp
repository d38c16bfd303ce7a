#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "report.hpp"

namespace pcg::cli {

namespace {

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
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

void open_svg(std::ostringstream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
     << "</text>\n";
}

void axes(std::ostringstream& os, const Frame& f, const std::string& xlabel, const std::string& ylabel, bool xticks) {
  os << "<g stroke=\"black\">"
     << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight << "\" y2=\""
     << kHeight - kBottom << "\"/>"
     << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kHeight - kBottom
     << "\"/></g>\n";
  for (int i = 0; i <= 4; ++i) {
    const double y = f.y0 + (f.y1 - f.y0) * i / 4.0;
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << f.py(y) + 4 << "\" text-anchor=\"end\">" << num(y) << "</text>\n";
    if (xticks) {
      const double x = f.x0 + (f.x1 - f.x0) * i / 4.0;
      os << "<text x=\"" << f.px(x) << "\" y=\"" << kHeight - kBottom + 16 << "\" text-anchor=\"middle\">" << num(x)
         << "</text>\n";
    }
  }
  os << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
     << escape(xlabel) << "</text>\n"
     << "<text transform=\"translate(16," << (kTop + kHeight - kBottom) / 2
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(ylabel) << "</text>\n";
}

void legend(std::ostringstream& os, const std::vector<std::pair<std::string, std::string>>& entries) {
  double y = kTop + 8;
  for (const auto& [name, color] : entries) {
    os << "<rect x=\"" << kWidth - kRight - 120 << "\" y=\"" << y - 9 << "\" width=\"12\" height=\"12\" fill=\""
       << color << "\"/><text x=\"" << kWidth - kRight - 102 << "\" y=\"" << y + 1 << "\">" << escape(name)
       << "</text>\n";
    y += 18;
  }
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

std::string svg_band_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          const std::vector<Series>& series) {
  Frame f{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(), 0.0,
          std::numeric_limits<double>::lowest()};
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      f.x0 = std::min(f.x0, s.x[i]);
      f.x1 = std::max(f.x1, s.x[i]);
      f.y0 = std::min(f.y0, s.mean[i] - s.std[i]);
      f.y1 = std::max(f.y1, s.mean[i] + s.std[i]);
    }
  }
  if (!(f.x1 > f.x0)) f.x1 = f.x0 + 1.0;
  if (!(f.y1 > f.y0)) f.y1 = f.y0 + 1.0;

  std::ostringstream os;
  open_svg(os, title);
  axes(os, f, xlabel, ylabel, true);
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& s : series) {
    os << "<polygon fill=\"" << s.color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) os << f.px(s.x[i]) << ',' << f.py(s.mean[i] + s.std[i]) << ' ';
    for (std::size_t i = s.x.size(); i-- > 0;) os << f.px(s.x[i]) << ',' << f.py(s.mean[i] - s.std[i]) << ' ';
    os << "\"/>\n<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) os << f.px(s.x[i]) << ',' << f.py(s.mean[i]) << ' ';
    os << "\"/>\n";
    entries.emplace_back(s.name + " (mean +- std)", s.color);
  }
  legend(os, entries);
  os << "</svg>\n";
  return os.str();
}

std::string svg_heatmap(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                        const std::vector<std::vector<double>>& values) {
  double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
  for (const auto& row : values) {
    for (double v : row) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(hi > lo)) hi = lo + 1.0;
  const std::size_t rows = values.size();
  const std::size_t cols = rows ? values.front().size() : 0;
  const double w = (kWidth - kLeft - kRight) / static_cast<double>(std::max<std::size_t>(cols, 1));
  const double h = (kHeight - kTop - kBottom) / static_cast<double>(std::max<std::size_t>(rows, 1));

  std::ostringstream os;
  open_svg(os, title);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double t = (values[r][c] - lo) / (hi - lo);
      const int red = static_cast<int>(std::lround(255 * t));
      const int blue = static_cast<int>(std::lround(255 * (1 - t)));
      os << "<rect x=\"" << kLeft + c * w << "\" y=\"" << kTop + r * h << "\" width=\"" << w + 0.5 << "\" height=\""
         << h + 0.5 << "\" fill=\"rgb(" << red << ",64," << blue << ")\"/>\n";
    }
  }
  os << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
     << escape(xlabel) << "</text>\n"
     << "<text transform=\"translate(16," << (kTop + kHeight - kBottom) / 2
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(ylabel) << "</text>\n"
     << "<text x=\"" << kLeft << "\" y=\"" << kHeight - kBottom + 16 << "\">min " << num(lo) << " (blue), max "
     << num(hi) << " (red)</text>\n</svg>\n";
  return os.str();
}

std::string svg_boxplot(const std::string& title, const std::string& ylabel, const std::string& a_name,
                        const std::string& b_name, const std::vector<BoxGroup>& groups) {
  Frame f{0.0, static_cast<double>(std::max<std::size_t>(groups.size(), 1)), std::numeric_limits<double>::max(),
          std::numeric_limits<double>::lowest()};
  for (const auto& g : groups) {
    for (const auto* v : {&g.a, &g.b}) {
      for (double x : *v) {
        f.y0 = std::min(f.y0, x);
        f.y1 = std::max(f.y1, x);
      }
    }
  }
  if (!(f.y1 > f.y0)) {
    f.y0 = 0.0;
    f.y1 = 1.0;
  }
  const double pad = 0.12 * (f.y1 - f.y0);
  f.y1 += pad;

  std::ostringstream os;
  open_svg(os, title);
  axes(os, f, "", ylabel, false);
  const double slot = (kWidth - kLeft - kRight) / f.x1;
  auto box = [&](const std::vector<double>& v, double center, const char* color) {
    if (v.empty()) return;
    const double q1 = quantile(v, 0.25), q2 = quantile(v, 0.5), q3 = quantile(v, 0.75);
    const double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
    const double half = slot * 0.17;
    os << "<line x1=\"" << center << "\" x2=\"" << center << "\" y1=\"" << f.py(lo) << "\" y2=\"" << f.py(hi)
       << "\" stroke=\"black\"/>"
       << "<rect x=\"" << center - half << "\" y=\"" << f.py(q3) << "\" width=\"" << 2 * half << "\" height=\""
       << f.py(q1) - f.py(q3) << "\" fill=\"" << color << "\" stroke=\"black\"/>"
       << "<line x1=\"" << center - half << "\" x2=\"" << center + half << "\" y1=\"" << f.py(q2) << "\" y2=\""
       << f.py(q2) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  };
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const double left = kLeft + slot * static_cast<double>(i);
    box(groups[i].a, left + slot * 0.3, "#d95f02");
    box(groups[i].b, left + slot * 0.7, "#1b9e77");
    os << "<text x=\"" << left + slot / 2 << "\" y=\"" << kHeight - kBottom + 16 << "\" text-anchor=\"middle\">"
       << escape(groups[i].label) << "</text>\n";
    const auto stars = significance_stars(groups[i].p_value);
    if (!stars.empty()) {
      os << "<text x=\"" << left + slot / 2 << "\" y=\"" << f.py(f.y1) + 14
         << "\" text-anchor=\"middle\" font-size=\"16\">" << stars << "</text>\n";
    }
  }
  legend(os, {{a_name, "#d95f02"}, {b_name, "#1b9e77"}});
  os << "</svg>\n";
  return os.str();
}

}  // namespace pcg::cli
