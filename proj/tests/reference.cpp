#include "reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace gnncol::reference {

namespace {

bool k_colorable(const CsrGraph& g, int k, std::vector<int>& color, Vertex u) {
    if (u == g.n) return true;
    for (int c = 0; c < k; ++c) {
        bool ok = true;
        for (Vertex v : g.neighbors(u))
            if (color[v] == c) { ok = false; break; }
        if (!ok) continue;
        color[u] = c;
        if (k_colorable(g, k, color, u + 1)) return true;
        color[u] = -1;
    }
    return false;
}

} // namespace

int brute_force_chromatic(const CsrGraph& g) {
    if (g.n == 0) return 0;
    for (int k = 1; k <= int(g.n); ++k) {
        std::vector<int> color(g.n, -1);
        if (k_colorable(g, k, color, 0)) return k;
    }
    return int(g.n);
}

int strict_peel_degeneracy(const CsrGraph& g) {
    std::vector<int> deg(g.n);
    std::vector<char> removed(g.n, 0);
    for (Vertex u = 0; u < g.n; ++u) deg[u] = int(g.degree(u));
    int degeneracy = 0;
    for (Vertex step = 0; step < g.n; ++step) {
        Vertex best = g.n;
        for (Vertex u = 0; u < g.n; ++u)
            if (!removed[u] && (best == g.n || deg[u] < deg[best])) best = u;
        degeneracy = std::max(degeneracy, deg[best]);
        removed[best] = 1;
        for (Vertex v : g.neighbors(best))
            if (!removed[v]) --deg[v];
    }
    return degeneracy;
}

PriorityMap sl_rounds_reference(const CsrGraph& g) {
    PriorityMap pm;
    pm.p.assign(g.n, 0.0);
    std::vector<int> deg(g.n);
    std::vector<char> removed(g.n, 0);
    for (Vertex u = 0; u < g.n; ++u) deg[u] = int(g.degree(u));
    Vertex remaining = g.n;
    double round = 0.0;
    while (remaining > 0) {
        int dmin = std::numeric_limits<int>::max();
        for (Vertex u = 0; u < g.n; ++u)
            if (!removed[u]) dmin = std::min(dmin, deg[u]);
        std::vector<Vertex> batch;
        for (Vertex u = 0; u < g.n; ++u)
            if (!removed[u] && deg[u] <= dmin) batch.push_back(u);
        for (Vertex u : batch) {
            removed[u] = 1;
            pm.p[u] = round;
        }
        for (Vertex u : batch)
            for (Vertex v : g.neighbors(u))
                if (!removed[v]) --deg[v];
        remaining -= Vertex(batch.size());
        round += 1.0;
    }
    return pm;
}

SdReference sd_reference(const CsrGraph& g) {
    SdReference ref;
    ref.pm.p.assign(g.n, 0.0);
    std::vector<int> color(g.n, -1);
    std::vector<std::set<int>> seen(g.n);
    for (Vertex step = 0; step < g.n; ++step) {
        Vertex best = g.n;
        for (Vertex u = 0; u < g.n; ++u) {
            if (color[u] >= 0) continue;
            if (best == g.n) { best = u; continue; }
            auto su = std::make_pair(seen[u].size(), std::size_t(g.degree(u)));
            auto sb = std::make_pair(seen[best].size(), std::size_t(g.degree(best)));
            if (su > sb) best = u; // lower id already wins via scan order
        }
        ref.pm.p[best] = double(g.n) - double(step);
        int c = 0;
        while (seen[best].count(c)) ++c;
        color[best] = c;
        ref.colors_used = std::max(ref.colors_used, c + 1);
        for (Vertex v : g.neighbors(best))
            if (color[v] < 0) seen[v].insert(c);
    }
    return ref;
}

std::vector<double> naive_infer(const CsrGraph& g, const GnnModel& model) {
    const std::size_t n = g.n;
    std::vector<std::vector<double>> h(n, std::vector<double>(2, 0.0));
    const double dmax = std::max<Vertex>(1, g.max_degree);
    const double imax = std::max<Vertex>(1, g.n > 0 ? g.n - 1 : 1);
    for (Vertex u = 0; u < g.n; ++u) {
        h[u][0] = double(g.degree(u)) / dmax;
        h[u][1] = double(u) / imax;
    }

    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        const auto& layer = model.layers[li];
        const std::size_t d = layer.d_in, dout = layer.d_out;
        const bool relu = li + 1 < model.layers.size();
        std::vector<std::vector<double>> out(n, std::vector<double>(dout, 0.0));
        for (Vertex u = 0; u < g.n; ++u) {
            std::vector<double> cat(2 * d, 0.0);
            for (std::size_t k = 0; k < d; ++k) cat[k] = h[u][k];
            auto nbrs = g.neighbors(u);
            for (Vertex v : nbrs)
                for (std::size_t k = 0; k < d; ++k) cat[d + k] += h[v][k];
            if (!nbrs.empty())
                for (std::size_t k = 0; k < d; ++k) cat[d + k] /= double(nbrs.size());
            for (std::size_t j = 0; j < dout; ++j) {
                double a = layer.b[j];
                for (std::size_t i = 0; i < 2 * d; ++i)
                    a += cat[i] * double(layer.W[i * dout + j]);
                out[u][j] = relu ? std::max(0.0, a) : a;
            }
        }
        h = std::move(out);
    }

    std::vector<double> p(n, 0.0);
    for (std::size_t u = 0; u < n; ++u)
        for (double x : h[u]) p[u] += x;
    return p;
}

double min_hidden_preactivation(const CsrGraph& g, const GnnModel& model) {
    const std::size_t n = g.n;
    std::vector<std::vector<double>> h(n, std::vector<double>(2, 0.0));
    const double dmax = std::max<Vertex>(1, g.max_degree);
    const double imax = std::max<Vertex>(1, g.n > 0 ? g.n - 1 : 1);
    for (Vertex u = 0; u < g.n; ++u) {
        h[u][0] = double(g.degree(u)) / dmax;
        h[u][1] = double(u) / imax;
    }
    double clearance = std::numeric_limits<double>::infinity();
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        const auto& layer = model.layers[li];
        const std::size_t d = layer.d_in, dout = layer.d_out;
        const bool relu = li + 1 < model.layers.size();
        std::vector<std::vector<double>> out(n, std::vector<double>(dout, 0.0));
        for (Vertex u = 0; u < g.n; ++u) {
            std::vector<double> cat(2 * d, 0.0);
            for (std::size_t k = 0; k < d; ++k) cat[k] = h[u][k];
            auto nbrs = g.neighbors(u);
            for (Vertex v : nbrs)
                for (std::size_t k = 0; k < d; ++k) cat[d + k] += h[v][k];
            if (!nbrs.empty())
                for (std::size_t k = 0; k < d; ++k) cat[d + k] /= double(nbrs.size());
            for (std::size_t j = 0; j < dout; ++j) {
                double a = layer.b[j];
                for (std::size_t i = 0; i < 2 * d; ++i)
                    a += cat[i] * double(layer.W[i * dout + j]);
                if (relu) {
                    clearance = std::min(clearance, std::abs(a));
                    out[u][j] = std::max(0.0, a);
                } else {
                    out[u][j] = a;
                }
            }
        }
        h = std::move(out);
    }
    return clearance;
}

std::vector<float> naive_infer_f32(const CsrGraph& g, const GnnModel& model) {
    const std::size_t n = g.n;
    std::vector<std::vector<float>> h(n, std::vector<float>(2, 0.0f));
    const float inv_deg = 1.0f / float(std::max<Vertex>(1, g.max_degree));
    const float inv_id = 1.0f / float(std::max<Vertex>(1, g.n > 0 ? g.n - 1 : 1));
    for (Vertex u = 0; u < g.n; ++u) {
        h[u][0] = float(g.degree(u)) * inv_deg;
        h[u][1] = float(u) * inv_id;
    }

    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        const auto& layer = model.layers[li];
        const std::size_t d = layer.d_in, dout = layer.d_out;
        const bool relu = li + 1 < model.layers.size();
        std::vector<std::vector<float>> out(n, std::vector<float>(dout, 0.0f));
        for (Vertex u = 0; u < g.n; ++u) {
            std::vector<float> cat(2 * d, 0.0f);
            for (std::size_t k = 0; k < d; ++k) cat[k] = h[u][k];
            auto nbrs = g.neighbors(u);
            for (Vertex v : nbrs)
                for (std::size_t k = 0; k < d; ++k) cat[d + k] += h[v][k];
            if (!nbrs.empty())
                for (std::size_t k = 0; k < d; ++k) cat[d + k] *= 1.0f / float(nbrs.size());
            for (std::size_t j = 0; j < dout; ++j) {
                float a = layer.b[j];
                for (std::size_t i = 0; i < 2 * d; ++i)
                    a += cat[i] * layer.W[i * dout + j];
                out[u][j] = relu ? std::max(0.0f, a) : a;
            }
        }
        h = std::move(out);
    }

    std::vector<float> p(n, 0.0f);
    for (std::size_t u = 0; u < n; ++u)
        for (float x : h[u]) p[u] += x;
    return p;
}

} // namespace gnncol::reference
