#include "gnncol/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace gnncol {

EdgeLabelSet labels_from_priorities(const CsrGraph& g, const PriorityMap& pm) {
    EdgeLabelSet set;
    set.labels.resize(g.num_directed_edges());
    for (Vertex u = 0; u < g.n; ++u)
        for (std::uint64_t k = g.row_offsets[u]; k < g.row_offsets[u + 1]; ++k)
            set.labels[k] = pm.p[u] > pm.p[g.col_indices[k]] ? 1 : 0;
    return set;
}

EdgeLabelSet make_labels(const CsrGraph& g, LabelSource source) {
    switch (source) {
    case LabelSource::SL: return labels_from_priorities(g, order_sl(g));
    case LabelSource::SD: return labels_from_priorities(g, sd_round_priorities(g));
    case LabelSource::LF: return labels_from_priorities(g, order_lf(g));
    }
    throw std::invalid_argument("make_labels: unknown label source");
}

PriorityMap sd_round_priorities(const CsrGraph& g) {
    const Vertex n = g.n;
    PriorityMap pm;
    pm.p.assign(n, 0.0);
    std::vector<std::int32_t> color(n, -1);
    std::vector<std::int64_t> saturation(n, 0);
    std::vector<std::vector<std::int32_t>> nbr_colors(n);
    std::vector<std::uint32_t> mark(std::size_t(g.max_degree) + 2, 0);
    std::uint32_t stamp = 0;

    Vertex uncolored = n;
    std::vector<Vertex> round_set;
    double round = 0.0;
    while (uncolored > 0) {
        // Round membership keys on (saturation, degree): every vertex tied
        // at the top of the selection rule short of the ID tiebreak. Keying
        // on saturation alone would pull the whole graph into round 0,
        // since every saturation starts at zero.
        std::pair<std::int64_t, Vertex> top{-1, 0};
        for (Vertex u = 0; u < n; ++u)
            if (color[u] < 0) top = std::max(top, {saturation[u], g.degree(u)});
        round_set.clear();
        for (Vertex u = 0; u < n; ++u)
            if (color[u] < 0 && saturation[u] == top.first && g.degree(u) == top.second)
                round_set.push_back(u);

        // Members share one priority; bookkeeping colors them by ascending ID.
        for (Vertex u : round_set) {
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
                }
            }
            pm.p[u] = round;
        }
        uncolored -= Vertex(round_set.size());
        round -= 1.0;
    }
    // Shift so the last round sits at zero and none are negative.
    for (auto& p : pm.p) p += -round - 1.0;
    return pm;
}

namespace {

constexpr double kClampEps = 1e-7;

template <typename Real>
Real sigmoid(Real z) {
    return Real(1) / (Real(1) + std::exp(-z));
}

// Layout of the flat parameter vector: per layer, W row-major then b.
struct LayerView {
    std::size_t d_in, d_out, w_off, b_off;
};

std::vector<LayerView> layer_views(const GnnModel& shape, std::size_t* total_out) {
    std::vector<LayerView> views;
    std::size_t off = 0;
    for (const auto& l : shape.layers) {
        LayerView v{l.d_in, l.d_out, off, off + std::size_t(2) * l.d_in * l.d_out};
        off = v.b_off + l.d_out;
        views.push_back(v);
    }
    if (total_out) *total_out = off;
    return views;
}

// Forward + loss, and optionally the full backward pass, over one graph.
// Real = float is the production path; Real = double backs the
// finite-difference oracle.
template <typename Real>
Real forward_backward(const CsrGraph& g, const std::vector<LayerView>& views,
                      std::span<const Real> params, const EdgeLabelSet& labels,
                      Real* grad) {
    const Vertex n = g.n;
    const std::size_t L = views.size();
    const std::uint64_t E = g.num_directed_edges();

    // Forward, keeping per-layer concatenated inputs and activations.
    std::vector<std::vector<Real>> xcat(L), act(L + 1);
    act[0].resize(std::size_t(n) * kInputDim);
    const Real inv_deg = Real(1) / Real(std::max<Vertex>(1, g.max_degree));
    const Real inv_id = Real(1) / Real(std::max<Vertex>(1, n > 0 ? n - 1 : 1));
    for (Vertex u = 0; u < n; ++u) {
        act[0][std::size_t(u) * kInputDim] = Real(g.degree(u)) * inv_deg;
        act[0][std::size_t(u) * kInputDim + 1] = Real(u) * inv_id;
    }

    for (std::size_t l = 0; l < L; ++l) {
        const auto& lv = views[l];
        const std::size_t d = lv.d_in, dout = lv.d_out, w = 2 * d;
        const bool relu = l + 1 < L;
        const Real* W = params.data() + lv.w_off;
        const Real* b = params.data() + lv.b_off;
        xcat[l].assign(std::size_t(n) * w, Real(0));
        act[l + 1].assign(std::size_t(n) * dout, Real(0));
        for (Vertex u = 0; u < n; ++u) {
            Real* row = xcat[l].data() + std::size_t(u) * w;
            const Real* self = act[l].data() + std::size_t(u) * d;
            std::copy(self, self + d, row);
            auto nbrs = g.neighbors(u);
            for (Vertex v : nbrs) {
                const Real* hv = act[l].data() + std::size_t(v) * d;
                for (std::size_t k = 0; k < d; ++k) row[d + k] += hv[k];
            }
            if (!nbrs.empty()) {
                const Real scale = Real(1) / Real(nbrs.size());
                for (std::size_t k = 0; k < d; ++k) row[d + k] *= scale;
            }
            Real* out = act[l + 1].data() + std::size_t(u) * dout;
            for (std::size_t j = 0; j < dout; ++j) {
                Real a = b[j];
                for (std::size_t i = 0; i < w; ++i) a += row[i] * W[i * dout + j];
                out[j] = relu ? std::max(Real(0), a) : a;
            }
        }
    }

    const std::size_t d_last = views.back().d_out;
    std::vector<Real> s(n, Real(0));
    for (Vertex u = 0; u < n; ++u) {
        const Real* row = act[L].data() + std::size_t(u) * d_last;
        for (std::size_t k = 0; k < d_last; ++k) s[u] += row[k];
    }

    // Mean BCE over directed edges; sigma(s_u - s_v) clamped before the log.
    Real loss = Real(0);
    std::vector<Real> ds;
    if (grad) ds.assign(n, Real(0));
    const Real lo = Real(kClampEps), hi = Real(1) - Real(kClampEps);
    for (Vertex u = 0; u < n; ++u) {
        for (std::uint64_t k = g.row_offsets[u]; k < g.row_offsets[u + 1]; ++k) {
            Vertex v = g.col_indices[k];
            Real yhat = sigmoid(s[u] - s[v]);
            // NaN must fall through the clamp so the train loop can abort
            Real yc = yhat < lo ? lo : (yhat > hi ? hi : yhat);
            Real y = Real(labels.labels[k]);
            loss -= y > Real(0.5) ? std::log(yc) : std::log(Real(1) - yc);
            if (grad && yhat > lo && yhat < hi) {
                Real gz = (yhat - y) / Real(E);
                ds[u] += gz;
                ds[v] -= gz;
            }
        }
    }
    if (E > 0) loss /= Real(E);
    if (!grad) return loss;

    // Backward.
    std::vector<Real> dh(std::size_t(n) * d_last);
    for (Vertex u = 0; u < n; ++u)
        for (std::size_t j = 0; j < d_last; ++j)
            dh[std::size_t(u) * d_last + j] = ds[u];

    for (std::size_t li = L; li-- > 0;) {
        const auto& lv = views[li];
        const std::size_t d = lv.d_in, dout = lv.d_out, w = 2 * d;
        const bool relu = li + 1 < L;
        const Real* W = params.data() + lv.w_off;
        Real* dW = grad + lv.w_off;
        Real* db = grad + lv.b_off;

        if (relu) {
            // Post-activation values gate the gradient.
            for (std::size_t i = 0; i < std::size_t(n) * dout; ++i)
                if (act[li + 1][i] <= Real(0)) dh[i] = Real(0);
        }

        std::vector<Real> dxcat(std::size_t(n) * w, Real(0));
        for (Vertex u = 0; u < n; ++u) {
            const Real* gout = dh.data() + std::size_t(u) * dout;
            const Real* row = xcat[li].data() + std::size_t(u) * w;
            Real* dx = dxcat.data() + std::size_t(u) * w;
            for (std::size_t j = 0; j < dout; ++j) {
                const Real gj = gout[j];
                if (gj == Real(0)) continue;
                db[j] += gj;
                for (std::size_t i = 0; i < w; ++i) {
                    dW[i * dout + j] += row[i] * gj;
                    dx[i] += W[i * dout + j] * gj;
                }
            }
        }

        // dH_l: self half directly, aggregated half redistributed to
        // neighbors scaled by the receiving side's 1/|N(v)|.
        std::vector<Real> dh_prev(std::size_t(n) * d, Real(0));
        for (Vertex u = 0; u < n; ++u) {
            Real* dst = dh_prev.data() + std::size_t(u) * d;
            const Real* dx = dxcat.data() + std::size_t(u) * w;
            for (std::size_t k = 0; k < d; ++k) dst[k] += dx[k];
            for (Vertex v : g.neighbors(u)) {
                const Real* dxv = dxcat.data() + std::size_t(v) * w;
                const Real scale = Real(1) / Real(g.degree(v));
                for (std::size_t k = 0; k < d; ++k) dst[k] += dxv[d + k] * scale;
            }
        }
        dh = std::move(dh_prev);
    }
    return loss;
}

} // namespace

std::vector<float> flatten_params(const GnnModel& model) {
    std::vector<float> flat;
    flat.reserve(model.num_params());
    for (const auto& l : model.layers) {
        flat.insert(flat.end(), l.W.begin(), l.W.end());
        flat.insert(flat.end(), l.b.begin(), l.b.end());
    }
    return flat;
}

void unflatten_params(GnnModel& model, std::span<const float> flat) {
    std::size_t off = 0;
    for (auto& l : model.layers) {
        std::copy(flat.begin() + off, flat.begin() + off + l.W.size(), l.W.begin());
        off += l.W.size();
        std::copy(flat.begin() + off, flat.begin() + off + l.b.size(), l.b.begin());
        off += l.b.size();
    }
}

float loss_and_gradients(const GnnModel& model, const CsrGraph& g,
                         const EdgeLabelSet& labels, std::vector<float>& grad) {
    std::size_t total = 0;
    auto views = layer_views(model, &total);
    std::vector<float> params = flatten_params(model);
    grad.assign(total, 0.0f);
    return forward_backward<float>(g, views, params, labels, grad.data());
}

double loss_fp64(const GnnModel& shape, const CsrGraph& g, const EdgeLabelSet& labels,
                 std::span<const double> flat_params) {
    auto views = layer_views(shape, nullptr);
    return forward_backward<double>(g, views, flat_params, labels, nullptr);
}

double loss_and_gradients_fp64(const GnnModel& shape, const CsrGraph& g,
                               const EdgeLabelSet& labels, std::span<const double> flat_params,
                               std::vector<double>& grad) {
    std::size_t total = 0;
    auto views = layer_views(shape, &total);
    grad.assign(total, 0.0);
    return forward_backward<double>(g, views, flat_params, labels, grad.data());
}

double predict_edge(const GnnModel& model, const CsrGraph& g, Vertex u, Vertex v) {
    auto nbrs = g.neighbors(u);
    if (!std::binary_search(nbrs.begin(), nbrs.end(), v))
        throw std::invalid_argument("predict_edge: vertices are not adjacent");
    PriorityMap pm = infer_priorities(g, model, 1);
    return sigmoid(pm.p[u] - pm.p[v]);
}

std::vector<double> edge_predictions(const GnnModel& model, const CsrGraph& g) {
    PriorityMap pm = infer_priorities(g, model, 1);
    std::vector<double> preds(g.num_directed_edges());
    for (Vertex u = 0; u < g.n; ++u)
        for (std::uint64_t k = g.row_offsets[u]; k < g.row_offsets[u + 1]; ++k)
            preds[k] = sigmoid(pm.p[u] - pm.p[g.col_indices[k]]);
    return preds;
}

double bce_loss(std::span<const double> predictions, std::span<const std::uint8_t> labels) {
    if (predictions.size() != labels.size())
        throw std::invalid_argument("bce_loss: size mismatch");
    if (predictions.empty()) return 0.0;
    double loss = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        double y = predictions[i];
        double yc = y < kClampEps ? kClampEps : (y > 1.0 - kClampEps ? 1.0 - kClampEps : y);
        loss -= labels[i] ? std::log(yc) : std::log(1.0 - yc);
    }
    return loss / double(predictions.size());
}

double f1_score(std::span<const double> predictions, std::span<const std::uint8_t> labels) {
    if (predictions.size() != labels.size())
        throw std::invalid_argument("f1_score: size mismatch");
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        bool pos = predictions[i] > 0.5;
        if (pos && labels[i]) ++tp;
        else if (pos && !labels[i]) ++fp;
        else if (!pos && labels[i]) ++fn;
    }
    if (2 * tp + fp + fn == 0) return 0.0;
    return 2.0 * double(tp) / double(2 * tp + fp + fn);
}

GnnModel parameter_init(const TrainConfig& cfg) {
    if (cfg.layers < 2 || cfg.layers > 4)
        throw std::invalid_argument("parameter_init: layer count outside 2..4");
    std::mt19937_64 rng(cfg.seed);
    GnnModel model;
    std::uint32_t d_in = kInputDim;
    for (int l = 0; l < cfg.layers; ++l) {
        GnnLayer layer;
        layer.d_in = d_in;
        layer.d_out = kHiddenDim;
        const std::size_t rows = std::size_t(2) * d_in;
        const float bound = std::sqrt(6.0f / float(rows + layer.d_out));
        std::uniform_real_distribution<float> dist(-bound, bound);
        layer.W.resize(rows * layer.d_out);
        for (auto& w : layer.W) w = dist(rng);
        layer.b.assign(layer.d_out, 0.0f);
        model.layers.push_back(std::move(layer));
        d_in = layer.d_out;
    }
    return model;
}

TrainResult train_supervised(const std::vector<CsrGraph>& train_graphs,
                             const std::vector<CsrGraph>& holdout_graphs,
                             const TrainConfig& cfg,
                             const GnnModel* warm_start) {
    if (train_graphs.empty())
        throw std::invalid_argument("train_supervised: empty graph list");

    std::vector<EdgeLabelSet> train_labels, holdout_labels;
    train_labels.reserve(train_graphs.size());
    for (const auto& g : train_graphs) train_labels.push_back(make_labels(g, cfg.source));
    holdout_labels.reserve(holdout_graphs.size());
    for (const auto& g : holdout_graphs) holdout_labels.push_back(make_labels(g, cfg.source));

    TrainResult result;
    if (warm_start) {
        if (int(warm_start->layers.size()) != cfg.layers)
            throw std::invalid_argument("train_supervised: warm start layer count mismatch");
        result.model = *warm_start;
    } else {
        result.model = parameter_init(cfg);
    }
    std::size_t total = 0;
    auto views = layer_views(result.model, &total);
    std::vector<float> params = flatten_params(result.model);
    std::vector<float> grad(total), m(total, 0.0f), v(total, 0.0f);

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(train_graphs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::int64_t step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t gi : order) {
            grad.assign(total, 0.0f);
            float loss = forward_backward<float>(train_graphs[gi], views, params,
                                                 train_labels[gi], grad.data());
            if (!std::isfinite(loss))
                throw TrainError("non-finite loss (seed=" + std::to_string(cfg.seed) +
                                 ", epoch=" + std::to_string(epoch) +
                                 ", graph=" + std::to_string(gi) + ")");
            epoch_loss += loss;

            ++step;
            const double bc1 = 1.0 - std::pow(double(cfg.beta1), double(step));
            const double bc2 = 1.0 - std::pow(double(cfg.beta2), double(step));
            for (std::size_t i = 0; i < total; ++i) {
                m[i] = cfg.beta1 * m[i] + (1.0f - cfg.beta1) * grad[i];
                v[i] = cfg.beta2 * v[i] + (1.0f - cfg.beta2) * grad[i] * grad[i];
                const float mhat = float(m[i] / bc1);
                const float vhat = float(v[i] / bc2);
                params[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
            }
        }
        unflatten_params(result.model, params);

        EpochMetrics em;
        em.epoch = epoch;
        em.loss = epoch_loss / double(train_graphs.size());
        std::int64_t tp = 0, fp = 0, fn = 0;
        for (std::size_t hi = 0; hi < holdout_graphs.size(); ++hi) {
            const auto& g = holdout_graphs[hi];
            auto preds = edge_predictions(result.model, g);
            const auto& lab = holdout_labels[hi].labels;
            for (std::size_t i = 0; i < preds.size(); ++i) {
                bool pos = preds[i] > 0.5;
                if (pos && lab[i]) ++tp;
                else if (pos && !lab[i]) ++fp;
                else if (!pos && lab[i]) ++fn;
            }
            em.holdout_colors += greedy_color(g, infer_priorities(g, result.model, 1)).num_colors;
        }
        em.f1 = (2 * tp + fp + fn) == 0 ? 0.0 : 2.0 * double(tp) / double(2 * tp + fp + fn);
        result.history.push_back(em);
    }
    unflatten_params(result.model, params);
    return result;
}

} // namespace gnncol
