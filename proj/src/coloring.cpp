#include "gnncol/coloring.hpp"

#include <algorithm>
#include <atomic>
#include <ostream>
#include <stdexcept>

#include <omp.h>

namespace gnncol {

namespace {

void finalize_stats(Coloring& col) {
    std::int32_t max_color = -1;
    for (auto c : col.c) max_color = std::max(max_color, c);
    col.num_colors = max_color + 1;
    col.max_color_multiplicity = 0;
    for (auto c : col.c)
        if (c == max_color) ++col.max_color_multiplicity;
    if (col.c.empty()) col.max_color_multiplicity = 0;
}

} // namespace

Coloring greedy_color(const CsrGraph& g, const PriorityMap& pm) {
    Coloring col;
    col.c.assign(g.n, -1);
    std::vector<Vertex> order = sorted_by_priority(pm);

    // Version-stamped mark array: O(deg(u)) per vertex, no clearing.
    std::vector<std::uint32_t> mark(std::size_t(g.max_degree) + 2, 0);
    std::uint32_t stamp = 0;
    for (Vertex u : order) {
        ++stamp;
        for (Vertex v : g.neighbors(u))
            if (col.c[v] >= 0) mark[col.c[v]] = stamp;
        std::int32_t c = 0;
        while (mark[c] == stamp) ++c;
        col.c[u] = c;
    }
    finalize_stats(col);
    return col;
}

Coloring jp_color(const CsrGraph& g, const PriorityMap& pm, int workers) {
    const Vertex n = g.n;
    Coloring col;
    col.c.assign(n, -1);
    if (n == 0) {
        finalize_stats(col);
        return col;
    }
    // the colors are worker-count invariant, so cap the team at the
    // hardware instead of oversubscribing
    workers = std::max(1, std::min(workers, omp_get_num_procs()));

    std::vector<std::atomic<std::int32_t>> count(n);
    std::vector<Vertex> prev, next(n);
    std::atomic<std::size_t> next_size{0};

    // Per-worker scratch: reusable mark arrays and local next buffers.
    std::vector<std::vector<std::uint32_t>> marks(workers);
    std::vector<std::uint32_t> stamps(workers, 0);
    std::vector<std::vector<Vertex>> locals(workers);

    prev.reserve(n);
#pragma omp parallel num_threads(workers)
    {
        const int tid = omp_get_thread_num();
        auto& local = locals[tid];
#pragma omp for schedule(static)
        for (std::int64_t ui = 0; ui < std::int64_t(n); ++ui) {
            Vertex u = Vertex(ui);
            std::int32_t preds = 0;
            for (Vertex v : g.neighbors(u))
                if (precedes(pm, v, u)) ++preds;
            count[u].store(preds, std::memory_order_relaxed);
            if (preds == 0) local.push_back(u);
        }
#pragma omp critical
        prev.insert(prev.end(), local.begin(), local.end());
        local.clear();
    }

    while (!prev.empty()) {
        next_size.store(0, std::memory_order_relaxed);
#pragma omp parallel num_threads(workers)
        {
            const int tid = omp_get_thread_num();
            auto& mark = marks[tid];
            if (mark.size() < std::size_t(g.max_degree) + 2)
                mark.assign(std::size_t(g.max_degree) + 2, 0);
            auto& local = locals[tid];
            std::vector<Vertex> succ;
            succ.reserve(g.max_degree);
#pragma omp for schedule(dynamic, 64)
            for (std::int64_t i = 0; i < std::int64_t(prev.size()); ++i) {
                Vertex u = prev[i];
                std::uint32_t stamp = ++stamps[tid];
                succ.clear();
                for (Vertex v : g.neighbors(u)) {
                    if (precedes(pm, v, u))
                        mark[col.c[v]] = stamp;
                    else
                        succ.push_back(v);
                }
                std::int32_t c = 0;
                while (mark[c] == stamp) ++c;
                col.c[u] = c; // must land before any successor counter drop
                for (Vertex v : succ)
                    if (count[v].fetch_sub(1, std::memory_order_acq_rel) == 1)
                        local.push_back(v);
            }
            if (!local.empty()) {
                std::size_t at = next_size.fetch_add(local.size(), std::memory_order_relaxed);
                std::copy(local.begin(), local.end(), next.begin() + at);
                local.clear();
            }
        }
        prev.assign(next.begin(), next.begin() + next_size.load(std::memory_order_relaxed));
    }
    finalize_stats(col);
    return col;
}

Coloring culberson_recolor(const CsrGraph& g, const Coloring& prev) {
    if (prev.c.size() != g.n)
        throw std::invalid_argument("culberson_recolor: coloring size mismatch");
    for (Vertex u = 0; u < g.n; ++u) {
        if (prev.c[u] < 0)
            throw std::invalid_argument("culberson_recolor: uncolored vertex");
        for (Vertex v : g.neighbors(u))
            if (prev.c[u] == prev.c[v])
                throw std::invalid_argument("culberson_recolor: improper coloring");
    }
    PriorityMap pm;
    pm.p.resize(g.n);
    for (Vertex u = 0; u < g.n; ++u)
        pm.p[u] = double(prev.c[u]);
    return greedy_color(g, pm);
}

bool validate(const CsrGraph& g, const Coloring& col) {
    if (col.c.size() != g.n) return false;
    std::int32_t max_color = -1;
    for (Vertex u = 0; u < g.n; ++u) {
        if (col.c[u] < 0) return false;
        max_color = std::max(max_color, col.c[u]);
        for (Vertex v : g.neighbors(u))
            if (col.c[u] == col.c[v]) return false;
    }
    if (col.num_colors != max_color + 1) return false;
    std::vector<std::int64_t> used(max_color >= 0 ? std::size_t(max_color) + 1 : 0, 0);
    for (auto c : col.c) ++used[c];
    for (auto count : used)
        if (count == 0) return false; // gap in the color range
    std::int64_t top = g.n == 0 ? 0 : used[max_color];
    return col.max_color_multiplicity == top;
}

void write_coloring(const Coloring& col, std::ostream& out) {
    out << "# coloring " << col.c.size() << ' ' << col.num_colors << '\n';
    for (auto c : col.c)
        out << c << '\n';
}

} // namespace gnncol
