#pragma once

#include <span>
#include <string>

#include "graspeeg/importance.hpp"
#include "graspeeg/serialize.hpp"
#include "graspeeg/wavelet.hpp"

namespace graspeeg {

// Every artifact starts with a provenance block: "# " lines for CSV, an XML
// comment for SVG. `provenance` is usually {"config": ..., "seed": ...}.
std::string provenance_comment(const json& provenance);

struct Rgb {
  int r = 0, g = 0, b = 0;
};

// Fixed five-stop viridis approximation, t clamped to [0, 1].
Rgb viridis(double t);
std::string hex_color(Rgb c);

// Long format: freq_hz,time_s,power.
std::string tf_map_csv(const TimeFrequencyMap& map, const json& provenance);
// Heatmap scaled to [min, max] of the map; low frequencies at the bottom.
std::string tf_map_svg(const TimeFrequencyMap& map, const json& provenance, const std::string& title);

// channel,x,y,value
std::string snapshot_csv(const TopographicSnapshot& snap, const Montage& montage, const json& provenance);
// row,col,x,y,value; cells outside the head are omitted.
std::string grid_csv(const ScalpGrid& grid, const json& provenance);
// Requires snap.grid.
std::string topomap_svg(const TopographicSnapshot& snap, const Montage& montage, const json& provenance,
                        const std::string& title);

// rank,feature,name,min,q1,median,q3,max
std::string boxplot_csv(std::span<const BoxplotEntry> entries, const json& provenance);
std::string boxplot_svg(std::span<const BoxplotEntry> entries, const json& provenance, const std::string& title);

// Accuracy table in percent with two decimals. Rows are datasets in first-seen
// order followed by Mean and STD (sample std across datasets). Multiclass
// columns are models; binary columns are "<task>/<model>". Each cell is the
// fold mean of the matching report; a missing combination is left empty.
std::string accuracy_table_csv(std::span<const CvReport> reports, bool binary, const json& provenance);

}  // namespace graspeeg
