#include "graspeeg/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "graspeeg/error.hpp"
#include "graspeeg/io.hpp"

namespace graspeeg {

namespace {

constexpr std::array<Rgb, 5> kViridis = {{{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};

constexpr const char* kScaleNote =
    "color scale: linear viridis, 5 stops #440154 #3b528b #21918c #5ec962 #fde725, "
    "min to max of the plotted values";

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

// "--" is not allowed inside an XML comment.
std::string comment_safe(std::string s) {
  std::size_t pos = 0;
  while ((pos = s.find("--", pos)) != std::string::npos) s.replace(pos, 2, "- -");
  return s;
}

std::string svg_header(const json& provenance, double width, double height) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<!--\n" << comment_safe("provenance: " + provenance.dump()) << "\n" << kScaleNote << "\n-->\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width, 0) << "\" height=\"" << fixed(height, 0)
      << "\" viewBox=\"0 0 " << fixed(width, 0) << " " << fixed(height, 0) << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return out.str();
}

std::pair<double, double> value_range(std::span<const double> values) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo > hi) return {0.0, 0.0};
  return {lo, hi};
}

double normalized(double v, std::pair<double, double> range) {
  const double span = range.second - range.first;
  return span > 0.0 ? (v - range.first) / span : 0.5;
}

// Vertical colorbar with min/max labels at (x, y).
void colorbar(std::ostringstream& out, double x, double y, double h, std::pair<double, double> range) {
  const int steps = 32;
  for (int i = 0; i < steps; ++i) {
    const double t = 1.0 - (i + 0.5) / steps;
    out << "<rect x=\"" << fixed(x, 1) << "\" y=\"" << fixed(y + h * i / steps, 2) << "\" width=\"12\" height=\""
        << fixed(h / steps + 0.5, 2) << "\" fill=\"" << hex_color(viridis(t)) << "\"/>\n";
  }
  out << "<text x=\"" << fixed(x + 16, 1) << "\" y=\"" << fixed(y + 8, 1) << "\" font-size=\"10\">"
      << format_double(range.second) << "</text>\n";
  out << "<text x=\"" << fixed(x + 16, 1) << "\" y=\"" << fixed(y + h, 1) << "\" font-size=\"10\">"
      << format_double(range.first) << "</text>\n";
}

ScalpPosition position_of(const Montage& montage, const std::string& channel) {
  const auto idx = montage.index_of(channel);
  if (!idx) throw DataError("channel not in montage: " + channel);
  return montage.positions()[*idx];
}

}  // namespace

std::string provenance_comment(const json& provenance) { return "# provenance: " + provenance.dump() + "\n"; }

Rgb viridis(double t) {
  if (!(t >= 0.0)) t = 0.0;
  t = std::min(t, 1.0);
  const double pos = t * (kViridis.size() - 1);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(pos), kViridis.size() - 2);
  const double w = pos - static_cast<double>(i);
  const Rgb& a = kViridis[i];
  const Rgb& b = kViridis[i + 1];
  auto mix = [w](int x, int y) { return static_cast<int>(std::lround(x + (y - x) * w)); };
  return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

std::string hex_color(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

std::string tf_map_csv(const TimeFrequencyMap& map, const json& provenance) {
  std::ostringstream out;
  out << provenance_comment(provenance) << "# channel: " << map.channel << "\n";
  out << "freq_hz,time_s,power\n";
  for (std::size_t f = 0; f < map.freqs_hz.size(); ++f)
    for (std::size_t t = 0; t < map.times_s.size(); ++t)
      out << format_double(map.freqs_hz[f]) << ',' << format_double(map.times_s[t]) << ','
          << format_double(map.power(f, t)) << '\n';
  return out.str();
}

std::string tf_map_svg(const TimeFrequencyMap& map, const json& provenance, const std::string& title) {
  const std::size_t nf = map.freqs_hz.size();
  const std::size_t nt = map.times_s.size();
  if (nf == 0 || nt == 0) throw DataError("empty time-frequency map");
  const double left = 60, top = 40, plot_w = 600, plot_h = 240;
  const double cw = plot_w / static_cast<double>(nt);
  const double ch = plot_h / static_cast<double>(nf);
  const auto range = value_range(map.power.data());

  std::ostringstream out;
  out << svg_header(provenance, left + plot_w + 90, top + plot_h + 50);
  out << "<text x=\"" << fixed(left, 0) << "\" y=\"24\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
  for (std::size_t f = 0; f < nf; ++f) {
    const double y = top + plot_h - static_cast<double>(f + 1) * ch;
    for (std::size_t t = 0; t < nt; ++t) {
      out << "<rect x=\"" << fixed(left + static_cast<double>(t) * cw, 2) << "\" y=\"" << fixed(y, 2)
          << "\" width=\"" << fixed(cw + 0.05, 2) << "\" height=\"" << fixed(ch, 2) << "\" fill=\""
          << hex_color(viridis(normalized(map.power(f, t), range))) << "\"/>\n";
    }
    out << "<text x=\"" << fixed(left - 6, 0) << "\" y=\"" << fixed(y + ch / 2 + 4, 1)
        << "\" font-size=\"10\" text-anchor=\"end\">" << format_double(map.freqs_hz[f]) << " Hz</text>\n";
  }
  const double t0 = map.times_s.front();
  const double t1 = map.times_s.back();
  for (double tick : {t0, 0.0, t1}) {
    if (tick < t0 || tick > t1) continue;
    const double x = t1 > t0 ? left + plot_w * (tick - t0) / (t1 - t0) : left;
    out << "<line x1=\"" << fixed(x, 2) << "\" y1=\"" << fixed(top + plot_h, 0) << "\" x2=\"" << fixed(x, 2)
        << "\" y2=\"" << fixed(top + plot_h + 5, 0) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << fixed(x, 2) << "\" y=\"" << fixed(top + plot_h + 18, 0)
        << "\" font-size=\"10\" text-anchor=\"middle\">" << format_double(tick) << " s</text>\n";
  }
  colorbar(out, left + plot_w + 12, top, plot_h, range);
  out << "</svg>\n";
  return out.str();
}

std::string snapshot_csv(const TopographicSnapshot& snap, const Montage& montage, const json& provenance) {
  std::ostringstream out;
  out << provenance_comment(provenance);
  if (snap.band.empty())
    out << "# time_s: " << format_double(snap.time_s) << "\n# freq_hz: " << format_double(snap.freq_hz) << "\n";
  else
    out << "# band: " << snap.band << "\n";
  out << "channel,x,y,value\n";
  for (std::size_t c = 0; c < snap.channels.size(); ++c) {
    const ScalpPosition p = position_of(montage, snap.channels[c]);
    out << snap.channels[c] << ',' << format_double(p.x) << ',' << format_double(p.y) << ','
        << format_double(snap.values.at(c)) << '\n';
  }
  return out.str();
}

std::string grid_csv(const ScalpGrid& grid, const json& provenance) {
  std::ostringstream out;
  out << provenance_comment(provenance) << "# grid: " << grid.size << "\n";
  out << "row,col,x,y,value\n";
  for (std::size_t r = 0; r < grid.size; ++r)
    for (std::size_t c = 0; c < grid.size; ++c) {
      if (!grid.inside_at(r, c)) continue;
      const ScalpPosition p = grid.centre(r, c);
      out << r << ',' << c << ',' << format_double(p.x) << ',' << format_double(p.y) << ','
          << format_double(grid.at(r, c)) << '\n';
    }
  return out.str();
}

std::string topomap_svg(const TopographicSnapshot& snap, const Montage& montage, const json& provenance,
                        const std::string& title) {
  if (!snap.grid) throw DataError("topomap needs an interpolated grid");
  const ScalpGrid& grid = *snap.grid;
  const double left = 30, top = 40, side = 320;
  const double cell = side / static_cast<double>(grid.size);
  std::vector<double> inside_values;
  for (std::size_t i = 0; i < grid.values.size(); ++i)
    if (grid.inside[i]) inside_values.push_back(grid.values[i]);
  const auto range = value_range(inside_values);

  auto px = [&](double x) { return left + (x + 1.0) * side / 2.0; };
  auto py = [&](double y) { return top + (1.0 - y) * side / 2.0; };

  std::ostringstream out;
  out << svg_header(provenance, left + side + 90, top + side + 30);
  out << "<text x=\"" << fixed(left, 0) << "\" y=\"24\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
  for (std::size_t r = 0; r < grid.size; ++r)
    for (std::size_t c = 0; c < grid.size; ++c) {
      if (!grid.inside_at(r, c)) continue;
      out << "<rect x=\"" << fixed(left + static_cast<double>(c) * cell, 2) << "\" y=\""
          << fixed(top + static_cast<double>(r) * cell, 2) << "\" width=\"" << fixed(cell + 0.05, 2)
          << "\" height=\"" << fixed(cell + 0.05, 2) << "\" fill=\""
          << hex_color(viridis(normalized(grid.at(r, c), range))) << "\"/>\n";
    }
  // Head outline and nose.
  out << "<circle cx=\"" << fixed(px(0), 1) << "\" cy=\"" << fixed(py(0), 1) << "\" r=\"" << fixed(side / 2, 1)
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n";
  out << "<polyline points=\"" << fixed(px(-0.1), 1) << ',' << fixed(py(0.995), 1) << ' ' << fixed(px(0), 1) << ','
      << fixed(py(1.1), 1) << ' ' << fixed(px(0.1), 1) << ',' << fixed(py(0.995), 1)
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n";
  for (std::size_t c = 0; c < snap.channels.size(); ++c) {
    const ScalpPosition p = position_of(montage, snap.channels[c]);
    out << "<circle cx=\"" << fixed(px(p.x), 1) << "\" cy=\"" << fixed(py(p.y), 1)
        << "\" r=\"3\" fill=\"black\"/>\n"
        << "<text x=\"" << fixed(px(p.x), 1) << "\" y=\"" << fixed(py(p.y) - 6, 1)
        << "\" font-size=\"10\" text-anchor=\"middle\">" << xml_escape(snap.channels[c]) << "</text>\n";
  }
  colorbar(out, left + side + 16, top, side, range);
  out << "</svg>\n";
  return out.str();
}

std::string boxplot_csv(std::span<const BoxplotEntry> entries, const json& provenance) {
  std::ostringstream out;
  out << provenance_comment(provenance) << "rank,feature,name,min,q1,median,q3,max\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    out << i + 1 << ',' << e.feature << ',' << e.name << ',' << format_double(e.min) << ',' << format_double(e.q1)
        << ',' << format_double(e.median) << ',' << format_double(e.q3) << ',' << format_double(e.max) << '\n';
  }
  return out.str();
}

std::string boxplot_svg(std::span<const BoxplotEntry> entries, const json& provenance, const std::string& title) {
  const double left = 170, top = 40, plot_w = 400, row_h = 24;
  const double plot_h = row_h * static_cast<double>(std::max<std::size_t>(entries.size(), 1));
  double lo = 0.0, hi = 0.0;
  for (const auto& e : entries) {
    lo = std::min(lo, e.min);
    hi = std::max(hi, e.max);
  }
  if (hi <= lo) hi = lo + 1.0;
  auto px = [&](double v) { return left + plot_w * (v - lo) / (hi - lo); };

  std::ostringstream out;
  out << svg_header(provenance, left + plot_w + 40, top + plot_h + 40);
  out << "<text x=\"10\" y=\"24\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
  out << "<line x1=\"" << fixed(px(0), 2) << "\" y1=\"" << fixed(top, 0) << "\" x2=\"" << fixed(px(0), 2)
      << "\" y2=\"" << fixed(top + plot_h, 0) << "\" stroke=\"#888\" stroke-dasharray=\"3,3\"/>\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const double cy = top + row_h * (static_cast<double>(i) + 0.5);
    out << "<text x=\"" << fixed(left - 8, 0) << "\" y=\"" << fixed(cy + 4, 1)
        << "\" font-size=\"11\" text-anchor=\"end\">" << xml_escape(e.name) << "</text>\n";
    out << "<line x1=\"" << fixed(px(e.min), 2) << "\" y1=\"" << fixed(cy, 1) << "\" x2=\"" << fixed(px(e.max), 2)
        << "\" y2=\"" << fixed(cy, 1) << "\" stroke=\"black\"/>\n";
    out << "<rect x=\"" << fixed(px(e.q1), 2) << "\" y=\"" << fixed(cy - 8, 1) << "\" width=\""
        << fixed(px(e.q3) - px(e.q1), 2) << "\" height=\"16\" fill=\"" << hex_color(viridis(0.5))
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fixed(px(e.median), 2) << "\" y1=\"" << fixed(cy - 8, 1) << "\" x2=\""
        << fixed(px(e.median), 2) << "\" y2=\"" << fixed(cy + 8, 1) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  }
  for (double tick : {lo, 0.0, hi}) {
    out << "<text x=\"" << fixed(px(tick), 2) << "\" y=\"" << fixed(top + plot_h + 16, 0)
        << "\" font-size=\"10\" text-anchor=\"middle\">" << fixed(tick, 3) << "</text>\n";
  }
  out << "<text x=\"" << fixed(left + plot_w / 2, 0) << "\" y=\"" << fixed(top + plot_h + 32, 0)
      << "\" font-size=\"11\" text-anchor=\"middle\">accuracy drop when permuted</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string accuracy_table_csv(std::span<const CvReport> reports, bool binary, const json& provenance) {
  std::vector<std::string> datasets;
  std::vector<std::pair<Task, ModelKind>> columns;
  std::map<std::pair<std::string, std::pair<Task, ModelKind>>, double> cells;
  for (const auto& rep : reports) {
    if ((rep.task != Task::Multiclass) != binary) continue;
    if (std::find(datasets.begin(), datasets.end(), rep.dataset_name) == datasets.end())
      datasets.push_back(rep.dataset_name);
    const auto col = std::make_pair(rep.task, rep.kind);
    if (std::find(columns.begin(), columns.end(), col) == columns.end()) columns.push_back(col);
    cells[{rep.dataset_name, col}] = rep.mean * 100.0;
  }
  if (datasets.empty()) throw DataError(binary ? "no binary-task reports" : "no multiclass reports");
  std::sort(columns.begin(), columns.end());

  std::ostringstream out;
  out << provenance_comment(provenance) << "dataset";
  for (const auto& [task, kind] : columns) {
    out << ',';
    if (binary) out << task_name(task) << '/';
    out << model_name(kind);
  }
  out << '\n';
  std::vector<std::vector<double>> per_column(columns.size());
  for (const auto& name : datasets) {
    out << name;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out << ',';
      auto it = cells.find({name, columns[c]});
      if (it == cells.end()) continue;
      out << fixed(it->second, 2);
      per_column[c].push_back(it->second);
    }
    out << '\n';
  }
  out << "Mean";
  for (const auto& v : per_column) {
    out << ',';
    if (v.empty()) continue;
    double s = 0.0;
    for (double x : v) s += x;
    out << fixed(s / static_cast<double>(v.size()), 2);
  }
  out << "\nSTD";
  for (const auto& v : per_column) {
    out << ',';
    if (v.size() < 2) {
      if (!v.empty()) out << fixed(0.0, 2);
      continue;
    }
    double s = 0.0;
    for (double x : v) s += x;
    const double m = s / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    out << fixed(std::sqrt(ss / static_cast<double>(v.size() - 1)), 2);
  }
  out << '\n';
  return out.str();
}

}  // namespace graspeeg
