#include "pslab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pslab/errors.hpp"

namespace pslab {

using nlohmann::json;

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 420;
constexpr int kMargin = 56;

struct Frame {
  double xmin, xmax, ymin, ymax;
  double px(double x) const {
    return kMargin + (x - xmin) / (xmax - xmin) * (kWidth - 2 * kMargin);
  }
  double py(double y) const {
    return kHeight - kMargin - (y - ymin) / (ymax - ymin) * (kHeight - 2 * kMargin);
  }
};

void header(std::ostringstream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
     << "font-size=\"16\">" << title << "</text>\n";
}

void axes(std::ostringstream& os, const std::string& xlabel, const std::string& ylabel) {
  os << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
     << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
     << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xlabel
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << kHeight / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
     << "transform=\"rotate(-90 16 " << kHeight / 2 << ")\">" << ylabel << "</text>\n";
}

void polyline(std::ostringstream& os, const Frame& fr, const std::vector<double>& xs,
              const std::vector<double>& ys, const std::string& color) {
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i)
    os << fr.px(xs[i]) << "," << fr.py(ys[i]) << (i + 1 < xs.size() ? " " : "");
  os << "\"/>\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    os << "<circle cx=\"" << fr.px(xs[i]) << "\" cy=\"" << fr.py(ys[i])
       << "\" r=\"3\" fill=\"" << color << "\"/>\n";
}

std::vector<double> get_doubles(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw InvalidArgument("svg: missing series '" + key + "'");
  std::vector<double> v;
  for (const auto& e : j.at(key)) v.push_back(e.get<double>());
  return v;
}

}  // namespace

std::string render_stabilization_svg(const json& series) {
  const std::vector<double> ks = get_doubles(series, "levels");
  const std::vector<double> vs = get_doubles(series, "values");
  if (ks.empty() || ks.size() != vs.size())
    throw InvalidArgument("svg: stabilization series malformed");
  Frame fr;
  fr.xmin = ks.front() - 0.5;
  fr.xmax = ks.back() + 0.5;
  const auto [mn, mx] = std::minmax_element(vs.begin(), vs.end());
  const double pad = std::max(1e-12, (*mx - *mn) * 2.0 + std::abs(*mx) * 0.1 + 1e-3);
  fr.ymin = *mn - pad;
  fr.ymax = *mx + pad;
  std::ostringstream os;
  header(os, "Inner-product stabilization across slab levels");
  axes(os, "slab level k", "level inner product (real part)");
  polyline(os, fr, ks, vs, "#1f77b4");
  os << "</svg>\n";
  return os.str();
}

std::string render_essentiality_svg(const json& series) {
  const std::vector<double> ns = get_doubles(series, "terms");
  std::vector<double> ds = get_doubles(series, "defects");
  if (ns.empty() || ns.size() != ds.size())
    throw InvalidArgument("svg: essentiality series malformed");
  // Log scale with a floor so exact zeros stay plottable.
  for (auto& d : ds) d = std::log10(std::max(std::abs(d), 1e-18));
  Frame fr;
  fr.xmin = ns.front() - 0.5;
  fr.xmax = ns.back() + 0.5;
  const auto [mn, mx] = std::minmax_element(ds.begin(), ds.end());
  fr.ymin = *mn - 1.0;
  fr.ymax = *mx + 1.0;
  std::ostringstream os;
  header(os, "Essentiality defect against truncation size");
  axes(os, "number of adjoint terms N", "log10 |defect|");
  polyline(os, fr, ns, ds, "#d62728");
  os << "</svg>\n";
  return os.str();
}

std::string render_partition_svg(const json& series) {
  if (!series.contains("cells") || !series.at("cells").is_array())
    throw InvalidArgument("svg: missing partition cells");
  const double h = series.value("spacing", 1.0);
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  struct Cell {
    double x, y;
    int level;
  };
  std::vector<Cell> cells;
  for (const auto& c : series.at("cells")) {
    Cell cell{c.at(0).get<double>() * h, c.at(1).get<double>() * h, c.at(2).get<int>()};
    xmin = std::min(xmin, cell.x);
    xmax = std::max(xmax, cell.x);
    ymin = std::min(ymin, cell.y);
    ymax = std::max(ymax, cell.y);
    cells.push_back(cell);
  }
  if (cells.empty()) throw InvalidArgument("svg: empty partition series");
  Frame fr{xmin - h, xmax + h, ymin - h, ymax + h};
  std::ostringstream os;
  header(os, "Slab partition: lattice map of n(x)");
  axes(os, "x1", "x2");
  const double wx = std::abs(fr.px(h) - fr.px(0.0));
  const double wy = std::abs(fr.py(h) - fr.py(0.0));
  for (const auto& c : cells) {
    os << "<rect x=\"" << fr.px(c.x) - wx / 2 << "\" y=\"" << fr.py(c.y) - wy / 2
       << "\" width=\"" << wx << "\" height=\"" << wy << "\" fill=\""
       << palette[c.level % 10] << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace pslab
