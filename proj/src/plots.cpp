#include "ura/plots.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ura/io.hpp"

namespace ura {

namespace {

constexpr double kWidth = 760, kHeight = 520;
constexpr double kLeft = 80, kRight = 30, kTop = 30, kBottom = 64;
constexpr double kPupeFloor = 1e-4;  // zero rates are drawn at this floor

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // sorted by x
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = true;
  bool ref_line = false;  // dashed PUPE = 0.05 marker
  std::vector<Series> series;
};

std::string trim_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void render_svg(const PlotSpec& spec, const std::string& path) {
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool first = true;
  for (const Series& s : spec.series) {
    for (const auto& [x, y] : s.points) {
      const double yv = spec.log_y ? std::max(y, kPupeFloor) : y;
      if (first) {
        xmin = xmax = x;
        ymin = ymax = yv;
        first = false;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, yv);
        ymax = std::max(ymax, yv);
      }
    }
  }
  if (first) throw std::invalid_argument("plot: no points to draw");
  if (xmin == xmax) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (spec.ref_line) {
    ymin = std::min(ymin, 0.05);
    ymax = std::max(ymax, 0.05);
  }

  double lo, hi;  // y range in plot units (log10 when log_y)
  if (spec.log_y) {
    lo = std::floor(std::log10(std::max(ymin, kPupeFloor)));
    hi = std::ceil(std::log10(std::max(ymax, kPupeFloor)));
    if (lo == hi) hi = lo + 1;
  } else {
    lo = 0.0;
    hi = ymax <= 0 ? 1.0 : ymax * 1.1;
  }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto map_x = [&](double x) {
    return kLeft + (x - xmin) / (xmax - xmin) * plot_w;
  };
  auto map_y = [&](double y) {
    const double v = spec.log_y ? std::log10(std::max(y, kPupeFloor)) : y;
    return kTop + (hi - v) / (hi - lo) * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"18\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << spec.title
      << "</text>\n";

  // frame
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // x ticks on the distinct data abscissae
  std::set<double> xs;
  for (const Series& s : spec.series) {
    for (const auto& [x, y] : s.points) xs.insert(x);
  }
  for (double x : xs) {
    const double px = map_x(x);
    svg << "<line x1=\"" << px << "\" y1=\"" << kTop + plot_h << "\" x2=\""
        << px << "\" y2=\"" << kTop + plot_h + 5
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px << "\" y=\"" << kTop + plot_h + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << trim_number(x) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"12\">" << spec.x_label << "</text>\n";

  // y ticks: decades when log, quarters when linear
  if (spec.log_y) {
    for (double e = lo; e <= hi + 1e-9; e += 1.0) {
      const double py = kTop + (hi - e) / (hi - lo) * plot_h;
      svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py << "\" x2=\""
          << kLeft << "\" y2=\"" << py << "\" stroke=\"black\"/>\n";
      svg << "<text x=\"" << kLeft - 9 << "\" y=\"" << py + 4
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          << "font-size=\"11\">1e" << static_cast<int>(e) << "</text>\n";
    }
  } else {
    for (int t = 0; t <= 4; ++t) {
      const double v = lo + (hi - lo) * t / 4.0;
      const double py = kTop + (hi - v) / (hi - lo) * plot_h;
      svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py << "\" x2=\""
          << kLeft << "\" y2=\"" << py << "\" stroke=\"black\"/>\n";
      svg << "<text x=\"" << kLeft - 9 << "\" y=\"" << py + 4
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          << "font-size=\"11\">" << trim_number(v) << "</text>\n";
    }
  }
  svg << "<text x=\"18\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 18 " << kTop + plot_h / 2 << ")\">"
      << spec.y_label << "</text>\n";

  if (spec.ref_line) {
    const double py = map_y(0.05);
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << py << "\" x2=\""
        << kLeft + plot_w << "\" y2=\"" << py
        << "\" stroke=\"red\" stroke-dasharray=\"6,4\"/>\n";
    svg << "<text x=\"" << kLeft + plot_w - 4 << "\" y=\"" << py - 5
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" "
        << "fill=\"red\">PUPE = 0.05</text>\n";
  }

  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const Series& s = spec.series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(*kPalette))];
    if (s.points.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.6\" points=\"";
      for (const auto& [x, y] : s.points) {
        svg << map_x(x) << "," << map_y(y) << " ";
      }
      svg << "\"/>\n";
    }
    for (const auto& [x, y] : s.points) {
      svg << "<circle cx=\"" << map_x(x) << "\" cy=\"" << map_y(y)
          << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 16 + 16 * static_cast<double>(si);
    svg << "<rect x=\"" << kLeft + 10 << "\" y=\"" << ly - 9
        << "\" width=\"14\" height=\"4\" fill=\"" << color << "\"/>\n";
    svg << "<text x=\"" << kLeft + 30 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label
        << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plot: " + path);
  out << svg.str();
}

using KeyFn = double (*)(const ResultRow&);

// Mean of `value` grouped by (series key, x), one series per key.
std::vector<Series> build_series(const std::vector<ResultRow>& rows,
                                 bool key_includes_k, KeyFn x_of, KeyFn y_of) {
  std::map<std::string, std::map<double, std::pair<double, int>>> acc;
  for (const ResultRow& r : rows) {
    std::string key = r.decoder;
    if (key_includes_k) key += ", K=" + std::to_string(r.K);
    auto& cell = acc[key][x_of(r)];
    cell.first += y_of(r);
    cell.second += 1;
  }
  std::vector<Series> series;
  for (const auto& [label, by_x] : acc) {
    Series s;
    s.label = label;
    for (const auto& [x, cell] : by_x) {
      s.points.emplace_back(x, cell.first / cell.second);
    }
    series.push_back(std::move(s));
  }
  return series;
}

template <typename F>
std::size_t count_distinct(const std::vector<ResultRow>& rows, F f) {
  std::set<double> vals;
  for (const ResultRow& r : rows) vals.insert(f(r));
  return vals.size();
}

}  // namespace

std::vector<std::string> emit_plots(const std::vector<ResultRow>& rows,
                                    const std::string& outdir) {
  if (rows.empty()) {
    throw std::invalid_argument("emit_plots: result table is empty");
  }
  std::filesystem::create_directories(outdir);

  const bool many_k =
      count_distinct(rows, [](const ResultRow& r) { return double(r.K); }) > 1;
  std::vector<std::string> written;

  auto emit = [&](const std::string& name, PlotSpec spec) {
    const std::string path = (std::filesystem::path(outdir) / name).string();
    render_svg(spec, path);
    written.push_back(path);
  };

  {
    PlotSpec spec;
    spec.title = "PUPE vs Eb/N0";
    spec.x_label = "Eb/N0 (dB)";
    spec.y_label = "PUPE";
    spec.log_y = true;
    spec.ref_line = true;
    spec.series = build_series(
        rows, many_k, [](const ResultRow& r) { return r.ebn0_db; },
        [](const ResultRow& r) { return r.p_e; });
    emit("pupe_vs_ebn0.svg", std::move(spec));
  }

  if (count_distinct(rows, [](const ResultRow& r) { return double(r.M); }) > 1) {
    PlotSpec spec;
    spec.title = "PUPE vs antennas";
    spec.x_label = "M";
    spec.y_label = "PUPE";
    spec.log_y = true;
    spec.ref_line = true;
    spec.series = build_series(
        rows, many_k, [](const ResultRow& r) { return double(r.M); },
        [](const ResultRow& r) { return r.p_e; });
    emit("pupe_vs_m.svg", std::move(spec));
  }

  if (many_k) {
    PlotSpec spec;
    spec.title = "Decode time vs active users";
    spec.x_label = "K";
    spec.y_label = "seconds per section";
    spec.log_y = true;
    spec.ref_line = false;
    spec.series = build_series(
        rows, false, [](const ResultRow& r) { return double(r.K); },
        [](const ResultRow& r) { return r.decode_seconds_per_section; });
    emit("time_vs_k.svg", std::move(spec));
  }

  if (count_distinct(rows, [](const ResultRow& r) { return double(r.J); }) > 1) {
    PlotSpec spec;
    spec.title = "Decode time vs section bits";
    spec.x_label = "J = log2(N)";
    spec.y_label = "seconds per section";
    spec.log_y = true;
    spec.ref_line = false;
    spec.series = build_series(
        rows, false, [](const ResultRow& r) { return double(r.J); },
        [](const ResultRow& r) { return r.decode_seconds_per_section; });
    emit("time_vs_j.svg", std::move(spec));
  }

  return written;
}

std::vector<std::string> emit_plots(const std::string& csv_path,
                                    const std::string& outdir) {
  return emit_plots(load_result_csv(csv_path), outdir);
}

}  // namespace ura
