#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gnncol {

using Vertex = std::uint32_t;

/// Thrown on malformed graph input; the message carries the line number.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Immutable undirected simple graph in compressed-sparse-row layout.
/// Every undirected edge is stored in both directions; adjacency ranges
/// are sorted ascending and hold no duplicates or self-loops.
struct CsrGraph {
    Vertex n = 0;                              // vertex count
    std::uint64_t m = 0;                       // undirected edge count
    Vertex max_degree = 0;
    std::vector<std::uint64_t> row_offsets{0}; // length n+1
    std::vector<Vertex> col_indices;           // length 2m

    Vertex degree(Vertex u) const {
        return static_cast<Vertex>(row_offsets[u + 1] - row_offsets[u]);
    }

    std::span<const Vertex> neighbors(Vertex u) const {
        return {col_indices.data() + row_offsets[u],
                col_indices.data() + row_offsets[u + 1]};
    }

    std::uint64_t num_directed_edges() const { return 2 * m; }

    /// Normalizing constructor: drops self-loops, merges duplicate and
    /// reverse-duplicate edges, sorts adjacency. Vertex IDs must be < n.
    static CsrGraph from_edges(Vertex n, std::vector<std::pair<Vertex, Vertex>> edges);
};

/// Whitespace-separated vertex-ID pairs, '#' comment lines. IDs are
/// compacted to 0..n-1 by ascending numeric order.
CsrGraph load_edge_list(std::istream& in);

/// DIMACS .col: 'c' comments, one 'p edge <n> <m>' line, 'e <u> <v>' lines
/// with 1-based IDs. The declared n is authoritative, so isolated vertices
/// survive.
CsrGraph load_dimacs_col(std::istream& in);

/// Dispatch on extension: ".col" -> DIMACS, ".csrg" -> binary cache,
/// anything else -> edge list.
CsrGraph load_graph_file(const std::string& path);

/// One "u v" line per undirected edge, u < v, ascending.
void write_edge_list(const CsrGraph& g, std::ostream& out);

/// Binary cache: magic "CSRG", version byte 1, little-endian u64 n and m,
/// then row_offsets (u64 each) and col_indices (u32 each). Bit-exact
/// round trip.
void save_csr_binary(const CsrGraph& g, const std::string& path);
CsrGraph load_csr_binary(const std::string& path);

/// Full-scan structural check: offsets monotone, ranges sorted and
/// duplicate-free, no self-loops, adjacency symmetric, degree sum = 2m.
bool check_invariants(const CsrGraph& g);

} // namespace gnncol
