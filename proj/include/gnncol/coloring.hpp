#pragma once

#include "gnncol/graph.hpp"
#include "gnncol/ordering.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace gnncol {

/// Proper vertex coloring with a contiguous color range 0..num_colors-1.
/// max_color_multiplicity counts the vertices carrying the top color;
/// it is the quality tiebreak used by genetic fitness.
struct Coloring {
    std::vector<std::int32_t> c;
    std::int32_t num_colors = 0;
    std::int64_t max_color_multiplicity = 0;
};

/// Sequential greedy: vertices in `precedes` order, smallest color absent
/// among already-colored neighbors. Uses at most max_degree + 1 colors.
Coloring greedy_color(const CsrGraph& g, const PriorityMap& pm);

/// Jones-Plassmann. Vertices whose higher-priority neighbors are all
/// colored form the frontier; counters drop via atomic decrements and local
/// next-buffers are merged per round. The result equals greedy_color(g, pm)
/// array-for-array at every worker count.
Coloring jp_color(const CsrGraph& g, const PriorityMap& pm, int workers);

/// Greedy recoloring with priorities set to the previous colors. Never
/// increases the number of colors used. Throws std::invalid_argument if
/// prev is not a proper coloring of g.
Coloring culberson_recolor(const CsrGraph& g, const Coloring& prev);

/// Properness plus contiguity plus consistency of the derived fields.
bool validate(const CsrGraph& g, const Coloring& col);

/// Text dump: header "# coloring <n> <num_colors>", one color per line.
void write_coloring(const Coloring& col, std::ostream& out);

} // namespace gnncol
