#include "gnncol/graph.hpp"
#include "gnncol/detail/binio.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace gnncol {

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
    throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

std::uint64_t parse_vertex_id(const std::string& tok, std::size_t line_no) {
    if (!tok.empty() && tok[0] == '-')
        parse_fail(line_no, "negative vertex id '" + tok + "'");
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        parse_fail(line_no, "malformed token '" + tok + "'");
    return value;
}

} // namespace

CsrGraph CsrGraph::from_edges(Vertex n, std::vector<std::pair<Vertex, Vertex>> edges) {
    // Pack both orientations into 64-bit keys; sort+unique normalizes.
    std::vector<std::uint64_t> directed;
    directed.reserve(edges.size() * 2);
    for (auto [u, v] : edges) {
        if (u == v) continue;
        if (u >= n || v >= n)
            throw std::invalid_argument("from_edges: vertex id out of range");
        directed.push_back((std::uint64_t(u) << 32) | v);
        directed.push_back((std::uint64_t(v) << 32) | u);
    }
    edges.clear();
    edges.shrink_to_fit();
    std::sort(directed.begin(), directed.end());
    directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

    CsrGraph g;
    g.n = n;
    g.m = directed.size() / 2;
    g.row_offsets.assign(std::size_t(n) + 1, 0);
    g.col_indices.resize(directed.size());
    for (std::size_t k = 0; k < directed.size(); ++k) {
        g.row_offsets[(directed[k] >> 32) + 1]++;
        g.col_indices[k] = static_cast<Vertex>(directed[k] & 0xffffffffu);
    }
    for (Vertex u = 0; u < n; ++u) {
        g.max_degree = std::max<Vertex>(g.max_degree, static_cast<Vertex>(g.row_offsets[u + 1]));
        g.row_offsets[u + 1] += g.row_offsets[u];
    }
    return g;
}

CsrGraph load_edge_list(std::istream& in) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
    std::string line, tok;
    std::size_t line_no = 0;
    bool have_pending = false;
    std::uint64_t pending = 0;
    std::size_t pending_line = 0;

    while (std::getline(in, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        std::istringstream ls(line);
        while (ls >> tok) {
            std::uint64_t id = parse_vertex_id(tok, line_no);
            if (have_pending) {
                raw.emplace_back(pending, id);
                have_pending = false;
            } else {
                pending = id;
                pending_line = line_no;
                have_pending = true;
            }
        }
    }
    if (have_pending)
        parse_fail(pending_line, "odd number of vertex ids");

    // Compact IDs by ascending numeric order. Endpoints of dropped
    // self-loops still count as vertices.
    std::vector<std::uint64_t> ids;
    ids.reserve(raw.size() * 2);
    for (auto& [u, v] : raw) {
        ids.push_back(u);
        ids.push_back(v);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

    auto compact = [&](std::uint64_t id) {
        return static_cast<Vertex>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
    };
    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(raw.size());
    for (auto& [u, v] : raw)
        edges.emplace_back(compact(u), compact(v));
    return CsrGraph::from_edges(static_cast<Vertex>(ids.size()), std::move(edges));
}

CsrGraph load_dimacs_col(std::istream& in) {
    std::string line, tag;
    std::size_t line_no = 0;
    bool have_p = false;
    std::uint64_t n = 0, m_declared = 0;
    std::vector<std::pair<Vertex, Vertex>> edges;

    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        if (!(ls >> tag)) continue;
        if (tag == "c") continue;
        if (tag == "p") {
            if (have_p) parse_fail(line_no, "duplicate 'p' line");
            std::string fmt;
            if (!(ls >> fmt >> n >> m_declared) || fmt != "edge")
                parse_fail(line_no, "expected 'p edge <n> <m>'");
            have_p = true;
            edges.reserve(m_declared);
        } else if (tag == "e") {
            if (!have_p) parse_fail(line_no, "'e' line before 'p' line");
            std::uint64_t u = 0, v = 0;
            if (!(ls >> u >> v))
                parse_fail(line_no, "expected 'e <u> <v>'");
            if (u < 1 || u > n || v < 1 || v > n)
                parse_fail(line_no, "vertex id out of range [1," + std::to_string(n) + "]");
            edges.emplace_back(static_cast<Vertex>(u - 1), static_cast<Vertex>(v - 1));
        } else {
            parse_fail(line_no, "unknown line type '" + tag + "'");
        }
    }
    if (!have_p)
        throw ParseError("missing 'p edge <n> <m>' line");
    return CsrGraph::from_edges(static_cast<Vertex>(n), std::move(edges));
}

CsrGraph load_graph_file(const std::string& path) {
    auto ends_with = [&](const char* suf) {
        std::string s(suf);
        return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
    };
    if (ends_with(".csrg"))
        return load_csr_binary(path);
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open graph file: " + path);
    return ends_with(".col") ? load_dimacs_col(in) : load_edge_list(in);
}

void write_edge_list(const CsrGraph& g, std::ostream& out) {
    for (Vertex u = 0; u < g.n; ++u)
        for (Vertex v : g.neighbors(u))
            if (u < v)
                out << u << ' ' << v << '\n';
}

namespace {

constexpr char kCsrMagic[4] = {'C', 'S', 'R', 'G'};
constexpr std::uint8_t kCsrVersion = 1;

using detail::get_u32;
using detail::get_u64;
using detail::put_u32;
using detail::put_u64;

} // namespace

void save_csr_binary(const CsrGraph& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out.write(kCsrMagic, 4);
    out.put(char(kCsrVersion));
    put_u64(out, g.n);
    put_u64(out, g.m);
    for (auto off : g.row_offsets) put_u64(out, off);
    for (auto v : g.col_indices) put_u32(out, v);
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

CsrGraph load_csr_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open graph file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || !std::equal(magic, magic + 4, kCsrMagic))
        throw ParseError("bad magic in CSR cache: " + path);
    if (in.get() != kCsrVersion)
        throw ParseError("unsupported CSR cache version: " + path);
    CsrGraph g;
    std::uint64_t n = get_u64(in);
    g.m = get_u64(in);
    g.n = static_cast<Vertex>(n);
    g.row_offsets.resize(n + 1);
    for (auto& off : g.row_offsets) off = get_u64(in);
    g.col_indices.resize(2 * g.m);
    for (auto& v : g.col_indices) v = get_u32(in);
    if (!in)
        throw ParseError("truncated CSR cache: " + path);
    if (g.row_offsets.front() != 0 || g.row_offsets.back() != 2 * g.m)
        throw ParseError("inconsistent offsets in CSR cache: " + path);
    for (Vertex u = 0; u < g.n; ++u)
        g.max_degree = std::max(g.max_degree, g.degree(u));
    return g;
}

bool check_invariants(const CsrGraph& g) {
    if (g.row_offsets.size() != std::size_t(g.n) + 1) return false;
    if (g.row_offsets.front() != 0 || g.row_offsets.back() != 2 * g.m) return false;
    if (g.col_indices.size() != 2 * g.m) return false;
    std::uint64_t degree_sum = 0;
    Vertex max_deg = 0;
    for (Vertex u = 0; u < g.n; ++u) {
        if (g.row_offsets[u] > g.row_offsets[u + 1]) return false;
        auto nbrs = g.neighbors(u);
        degree_sum += nbrs.size();
        max_deg = std::max<Vertex>(max_deg, static_cast<Vertex>(nbrs.size()));
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            Vertex v = nbrs[i];
            if (v >= g.n || v == u) return false;
            if (i > 0 && nbrs[i - 1] >= v) return false;
            auto back = g.neighbors(v);
            if (!std::binary_search(back.begin(), back.end(), u)) return false;
        }
    }
    return degree_sum == 2 * g.m && max_deg == g.max_degree;
}

} // namespace gnncol
