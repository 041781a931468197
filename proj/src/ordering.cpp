#include "gnncol/ordering.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>

#include <omp.h>

namespace gnncol {

std::vector<Vertex> sorted_by_priority(const PriorityMap& pm) {
    std::vector<Vertex> order(pm.size());
    std::iota(order.begin(), order.end(), Vertex{0});
    std::sort(order.begin(), order.end(),
              [&](Vertex a, Vertex b) { return precedes(pm, a, b); });
    return order;
}

PriorityMap order_ff(const CsrGraph& g, int workers) {
    PriorityMap pm;
    pm.p.resize(g.n);
#pragma omp parallel for schedule(static) num_threads(workers)
    for (std::int64_t u = 0; u < std::int64_t(g.n); ++u)
        pm.p[u] = double(g.n) - double(u);
    return pm;
}

PriorityMap order_lf(const CsrGraph& g, int workers) {
    PriorityMap pm;
    pm.p.resize(g.n);
#pragma omp parallel for schedule(static) num_threads(workers)
    for (std::int64_t u = 0; u < std::int64_t(g.n); ++u)
        pm.p[u] = double(g.degree(Vertex(u)));
    return pm;
}

namespace {

// Bucketed peeling. Each vertex is re-pushed once per degree drop, so the
// total number of bucket entries is bounded by n + 2m.
PriorityMap sl_sequential(const CsrGraph& g) {
    const Vertex n = g.n;
    PriorityMap pm;
    pm.p.assign(n, 0.0);
    if (n == 0) return pm;

    std::vector<Vertex> deg(n);
    std::vector<char> removed(n, 0);
    std::vector<std::vector<Vertex>> buckets(std::size_t(g.max_degree) + 1);
    for (Vertex u = 0; u < n; ++u) {
        deg[u] = g.degree(u);
        buckets[deg[u]].push_back(u);
    }

    Vertex remaining = n;
    Vertex cur = 0;
    double round = 0.0;
    std::vector<Vertex> round_set;
    while (remaining > 0) {
        // Lowest bucket holding a live entry; stale entries are popped for good.
        for (;; ++cur) {
            auto& b = buckets[cur];
            while (!b.empty() && (removed[b.back()] || deg[b.back()] != cur))
                b.pop_back();
            if (!b.empty()) break;
        }
        round_set.clear();
        for (Vertex u : buckets[cur]) {
            if (!removed[u] && deg[u] == cur) {
                removed[u] = 1;
                pm.p[u] = round;
                round_set.push_back(u);
            }
        }
        buckets[cur].clear();
        remaining -= Vertex(round_set.size());

        Vertex lowest = cur;
        for (Vertex u : round_set) {
            for (Vertex v : g.neighbors(u)) {
                if (removed[v]) continue;
                Vertex d = --deg[v];
                buckets[d].push_back(v);
                lowest = std::min(lowest, d);
            }
        }
        cur = lowest;
        round += 1.0;
    }
    return pm;
}

// Round-synchronous variant producing the same rounds and priorities as
// the bucketed path. Every thread owns a bucket queue; an atomic capture
// decrement hands the vertex to the decrementing thread's bucket at the
// new level, so each vertex is re-bucketed once per degree drop and the
// total work stays O(n + m). Round boundaries are barriers.
PriorityMap sl_parallel(const CsrGraph& g, int workers) {
    const Vertex n = g.n;
    PriorityMap pm;
    pm.p.assign(n, 0.0);
    if (n == 0) return pm;

    const int team = std::max(1, std::min(workers, omp_get_num_procs()));
    const std::size_t levels = std::size_t(g.max_degree) + 1;

    std::vector<std::int32_t> deg(n);
    std::vector<char> removed(n, 0);
    // [tid][level] -> entries; level_count[tid][level] tracks them so the
    // master can skip empty levels without a scan
    std::vector<std::vector<std::vector<Vertex>>> buckets(team);
    std::vector<std::vector<std::int64_t>> level_count(team);
    std::vector<Vertex> min_pushed(team);
    std::vector<Vertex> removed_count(team);

    Vertex cur = 0;
    Vertex remaining = n;
    double round = 0.0;

#pragma omp parallel num_threads(team)
    {
        const int tid = omp_get_thread_num();
        buckets[tid].resize(levels);
        level_count[tid].assign(levels, 0);
        std::vector<Vertex> mine;

#pragma omp for schedule(static)
        for (std::int64_t u = 0; u < std::int64_t(n); ++u) {
            std::int32_t d = std::int32_t(g.degree(Vertex(u)));
            deg[u] = d;
            buckets[tid][d].push_back(Vertex(u));
            ++level_count[tid][d];
        }
        // implicit barrier

        while (true) {
#pragma omp master
            {
                // skip levels that hold no entries at all (live or stale)
                while (cur < levels) {
                    std::int64_t total = 0;
                    for (int t = 0; t < team; ++t) total += level_count[t][cur];
                    if (total > 0) break;
                    ++cur;
                }
            }
#pragma omp barrier
            if (remaining == 0) break;

            // collect my live entries at the current level; stale entries
            // (superseded by a later push at a lower level) drop for good
            mine.clear();
            {
                auto& bucket = buckets[tid][cur];
                for (Vertex u : bucket)
                    if (!removed[u] && deg[u] == std::int32_t(cur)) mine.push_back(u);
                level_count[tid][cur] = 0;
                bucket.clear();
            }
            for (Vertex u : mine) {
                removed[u] = 1;
                pm.p[u] = round;
            }
            removed_count[tid] = Vertex(mine.size());
#pragma omp barrier

            Vertex lowest = cur;
            for (Vertex u : mine) {
                for (Vertex v : g.neighbors(u)) {
                    if (removed[v]) continue;
                    std::int32_t nd;
#pragma omp atomic capture
                    nd = --deg[v];
                    buckets[tid][nd].push_back(v);
                    ++level_count[tid][nd];
                    lowest = std::min(lowest, Vertex(nd));
                }
            }
            min_pushed[tid] = lowest;
#pragma omp barrier
#pragma omp master
            {
                Vertex removed_this_round = 0;
                for (int t = 0; t < team; ++t) {
                    removed_this_round += removed_count[t];
                    removed_count[t] = 0;
                    cur = std::min(cur, min_pushed[t]);
                }
                remaining -= removed_this_round;
                // a level holding only stale entries is not a round
                if (removed_this_round > 0) round += 1.0;
            }
#pragma omp barrier
        }
    }
    return pm;
}

} // namespace

PriorityMap order_sl(const CsrGraph& g, int workers) {
    return workers <= 1 ? sl_sequential(g) : sl_parallel(g, workers);
}

namespace {

struct HeapKey {
    std::int64_t primary;   // incidence or saturation count
    std::int64_t degree;
    Vertex id;

    // std::priority_queue is a max-heap on this ordering: higher primary,
    // then higher degree, then lower id wins.
    bool operator<(const HeapKey& o) const {
        if (primary != o.primary) return primary < o.primary;
        if (degree != o.degree) return degree < o.degree;
        return id > o.id;
    }
};

} // namespace

PriorityMap order_id(const CsrGraph& g) {
    const Vertex n = g.n;
    PriorityMap pm;
    pm.p.assign(n, 0.0);
    std::vector<std::int64_t> incidence(n, 0);
    std::vector<char> selected(n, 0);
    std::priority_queue<HeapKey> heap;
    for (Vertex u = 0; u < n; ++u)
        heap.push({0, g.degree(u), u});

    std::int64_t position = 0;
    while (!heap.empty()) {
        HeapKey top = heap.top();
        heap.pop();
        Vertex u = top.id;
        if (selected[u] || top.primary != incidence[u]) continue; // stale
        selected[u] = 1;
        pm.p[u] = double(n) - double(position++);
        for (Vertex v : g.neighbors(u)) {
            if (selected[v]) continue;
            ++incidence[v];
            heap.push({incidence[v], g.degree(v), v});
        }
    }
    return pm;
}

PriorityMap order_sd(const CsrGraph& g) {
    const Vertex n = g.n;
    PriorityMap pm;
    pm.p.assign(n, 0.0);
    std::vector<std::int32_t> color(n, -1);
    std::vector<std::int64_t> saturation(n, 0);
    std::vector<std::vector<std::int32_t>> nbr_colors(n);
    std::vector<std::uint32_t> mark(std::size_t(g.max_degree) + 2, 0);
    std::uint32_t stamp = 0;

    std::priority_queue<HeapKey> heap;
    for (Vertex u = 0; u < n; ++u)
        heap.push({0, g.degree(u), u});

    std::int64_t position = 0;
    while (!heap.empty()) {
        HeapKey top = heap.top();
        heap.pop();
        Vertex u = top.id;
        if (color[u] >= 0 || top.primary != saturation[u]) continue;
        pm.p[u] = double(n) - double(position++);

        ++stamp;
        for (Vertex v : g.neighbors(u))
            if (color[v] >= 0) mark[color[v]] = stamp;
        std::int32_t c = 0;
        while (mark[c] == stamp) ++c;
        color[u] = c;

        for (Vertex v : g.neighbors(u)) {
            if (color[v] >= 0) continue;
            auto& seen = nbr_colors[v];
            auto it = std::lower_bound(seen.begin(), seen.end(), c);
            if (it == seen.end() || *it != c) {
                seen.insert(it, c);
                ++saturation[v];
                heap.push({saturation[v], g.degree(v), v});
            }
        }
    }
    return pm;
}

void write_priorities(const PriorityMap& pm, std::ostream& out) {
    out << "# priorities " << pm.size() << '\n';
    char buf[64];
    for (double x : pm.p) {
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        out << buf << '\n';
    }
}

PriorityMap read_priorities(std::istream& in) {
    std::string header;
    std::getline(in, header);
    std::istringstream hs(header);
    std::string hash, word;
    std::size_t n = 0;
    if (!(hs >> hash >> word >> n) || hash != "#" || word != "priorities")
        throw ParseError("expected '# priorities <n>' header");
    PriorityMap pm;
    pm.p.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        if (!(in >> pm.p[i]))
            throw ParseError("truncated priority dump (expected " + std::to_string(n) + " values)");
    return pm;
}

} // namespace gnncol
