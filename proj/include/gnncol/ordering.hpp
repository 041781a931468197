#pragma once

#include "gnncol/graph.hpp"

#include <iosfwd>
#include <vector>

namespace gnncol {

/// One finite real priority per vertex. Together with `precedes` this
/// induces a strict total order: higher priority first, ties to the
/// lower vertex ID.
struct PriorityMap {
    std::vector<double> p;

    std::size_t size() const { return p.size(); }
};

/// The single comparator used everywhere ties can arise: greedy, JP,
/// label generation, and inference.
inline bool precedes(const PriorityMap& pm, Vertex u, Vertex v) {
    return pm.p[u] > pm.p[v] || (pm.p[u] == pm.p[v] && u < v);
}

/// Vertices sorted into processing order under `precedes`.
std::vector<Vertex> sorted_by_priority(const PriorityMap& pm);

/// First fit: p(u) = n - u, preserving input order.
PriorityMap order_ff(const CsrGraph& g, int workers = 1);

/// Largest degree first: p(u) = degree(u).
PriorityMap order_lf(const CsrGraph& g, int workers = 1);

/// Smallest degree last, round-based: every round removes all vertices
/// whose residual degree is at most the current minimum and assigns them
/// the round index as priority. Identical output for every worker count;
/// workers == 1 runs the bucketed O(n+m) path.
PriorityMap order_sl(const CsrGraph& g, int workers = 1);

/// Incidence degree: sequential selection maximizing (already-selected
/// neighbor count, degree, lowest ID); p(u) = n - selection position.
PriorityMap order_id(const CsrGraph& g);

/// Saturation degree: full DSATUR simulation selecting on (distinct
/// neighbor colors, degree, lowest ID); p(u) = n - selection position.
PriorityMap order_sd(const CsrGraph& g);

/// Text dump: header "# priorities <n>", then one priority per line.
void write_priorities(const PriorityMap& pm, std::ostream& out);
PriorityMap read_priorities(std::istream& in);

} // namespace gnncol
