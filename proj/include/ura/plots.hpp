// SVG renderings of a result table: PUPE and timing curves in the style of
// the usual link-level figures, with a reference line at PUPE = 0.05.
#pragma once

#include <string>
#include <vector>

#include "ura/experiment.hpp"

namespace ura {

// One SVG per sweep axis present in the table: always pupe_vs_ebn0.svg;
// pupe_vs_m.svg, time_vs_k.svg, time_vs_j.svg when the axis varies.
// Series are keyed by decoder (and K when several K are present).
// Returns the paths written; throws on an empty table before writing
// anything.
std::vector<std::string> emit_plots(const std::vector<ResultRow>& rows,
                                    const std::string& outdir);
std::vector<std::string> emit_plots(const std::string& csv_path,
                                    const std::string& outdir);

}  // namespace ura
