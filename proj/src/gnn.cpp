#include "gnncol/gnn.hpp"
#include "gnncol/detail/binio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <omp.h>

namespace gnncol {

FeatureMatrix initial_features(const CsrGraph& g) {
    FeatureMatrix H(g.n, kInputDim);
    const float inv_deg = 1.0f / float(std::max<Vertex>(1, g.max_degree));
    const float inv_id = 1.0f / float(std::max<Vertex>(1, g.n > 0 ? g.n - 1 : 1));
    for (Vertex u = 0; u < g.n; ++u) {
        H.row(u)[0] = float(g.degree(u)) * inv_deg;
        H.row(u)[1] = float(u) * inv_id;
    }
    return H;
}

FeatureMatrix sage_layer(const CsrGraph& g, const FeatureMatrix& H,
                         const GnnLayer& layer, bool apply_activation) {
    if (H.cols != layer.d_in || H.rows != g.n)
        throw std::invalid_argument("sage_layer: feature/layer shape mismatch");
    const std::size_t d = layer.d_in;
    const std::size_t dout = layer.d_out;
    FeatureMatrix out(g.n, dout);
    std::vector<float> xcat(2 * d);

    for (Vertex u = 0; u < g.n; ++u) {
        const float* self = H.row(u);
        std::copy(self, self + d, xcat.begin());
        std::fill(xcat.begin() + d, xcat.end(), 0.0f);
        auto nbrs = g.neighbors(u);
        if (!nbrs.empty()) {
            for (Vertex v : nbrs) {
                const float* hv = H.row(v);
                for (std::size_t k = 0; k < d; ++k) xcat[d + k] += hv[k];
            }
            const float scale = 1.0f / float(nbrs.size());
            for (std::size_t k = 0; k < d; ++k) xcat[d + k] *= scale;
        }
        float* dst = out.row(u);
        for (std::size_t j = 0; j < dout; ++j) {
            float acc = layer.b[j];
            for (std::size_t i = 0; i < 2 * d; ++i)
                acc += xcat[i] * layer.W[i * dout + j];
            dst[j] = apply_activation ? std::max(0.0f, acc) : acc;
        }
    }
    return out;
}

namespace {

constexpr std::size_t kBlock = 64; // vertices aggregated before each transform

// One layer over a block range: message passing into a small buffer,
// then the dense transform, so the weights stay hot while the irregular
// neighbor reads stream through.
void layer_block(const CsrGraph& g, const float* in, std::size_t d,
                 const GnnLayer& layer, bool relu, Vertex lo, Vertex hi,
                 float* xcat, float* out) {
    const std::size_t dout = layer.d_out;
    const std::size_t w = 2 * d;
    for (Vertex u = lo; u < hi; ++u) {
        float* row = xcat + std::size_t(u - lo) * w;
        const float* self = in + std::size_t(u) * d;
        for (std::size_t k = 0; k < d; ++k) {
            row[k] = self[k];
            row[d + k] = 0.0f;
        }
        auto nbrs = g.neighbors(u);
        for (Vertex v : nbrs) {
            const float* hv = in + std::size_t(v) * d;
            for (std::size_t k = 0; k < d; ++k) row[d + k] += hv[k];
        }
        if (!nbrs.empty()) {
            const float scale = 1.0f / float(nbrs.size());
            for (std::size_t k = 0; k < d; ++k) row[d + k] *= scale;
        }
    }
    for (Vertex u = lo; u < hi; ++u) {
        const float* row = xcat + std::size_t(u - lo) * w;
        float* dst = out + std::size_t(u) * dout;
        for (std::size_t j = 0; j < dout; ++j) {
            float acc = layer.b[j];
            for (std::size_t i = 0; i < w; ++i)
                acc += row[i] * layer.W[i * dout + j];
            dst[j] = relu ? std::max(0.0f, acc) : acc;
        }
    }
}

} // namespace

PriorityMap infer_priorities(const CsrGraph& g, const GnnModel& model, int workers) {
    InferenceWorkspace ws;
    return infer_priorities(g, model, workers, ws);
}

PriorityMap infer_priorities(const CsrGraph& g, const GnnModel& model, int workers,
                             InferenceWorkspace& ws) {
    if (model.layers.empty())
        throw std::invalid_argument("infer_priorities: model has no layers");
    const Vertex n = g.n;
    PriorityMap pm;
    pm.p.assign(n, 0.0);
    if (n == 0) return pm;
    workers = std::max(1, std::min(workers, omp_get_num_procs()));

    std::size_t max_dim = kInputDim;
    std::uint32_t chain = kInputDim;
    for (const auto& l : model.layers) {
        if (l.d_in != chain)
            throw std::invalid_argument("infer_priorities: layer dimension chain broken");
        chain = l.d_out;
        max_dim = std::max<std::size_t>(max_dim, l.d_out);
    }
    ws.a.resize(std::size_t(n) * max_dim);
    ws.b.resize(std::size_t(n) * max_dim);

    const float inv_deg = 1.0f / float(std::max<Vertex>(1, g.max_degree));
    const float inv_id = 1.0f / float(std::max<Vertex>(1, n - 1));
    const std::size_t num_blocks = (std::size_t(n) + kBlock - 1) / kBlock;

#pragma omp parallel num_threads(workers)
    {
        std::vector<float> xcat(kBlock * 2 * max_dim);

#pragma omp for schedule(static)
        for (std::int64_t u = 0; u < std::int64_t(n); ++u) {
            ws.a[std::size_t(u) * kInputDim] = float(g.degree(Vertex(u))) * inv_deg;
            ws.a[std::size_t(u) * kInputDim + 1] = float(u) * inv_id;
        }

        float* in = ws.a.data();
        float* out = ws.b.data();
        std::size_t d = kInputDim;
        for (std::size_t li = 0; li < model.layers.size(); ++li) {
            const auto& layer = model.layers[li];
            const bool relu = li + 1 < model.layers.size();
#pragma omp for schedule(static)
            for (std::int64_t blk = 0; blk < std::int64_t(num_blocks); ++blk) {
                Vertex lo = Vertex(std::size_t(blk) * kBlock);
                Vertex hi = Vertex(std::min<std::size_t>(n, std::size_t(blk + 1) * kBlock));
                layer_block(g, in, d, layer, relu, lo, hi, xcat.data(), out);
            }
            std::swap(in, out);
            d = layer.d_out;
        }

        // after the swap `in` points at the final layer output
#pragma omp for schedule(static)
        for (std::int64_t u = 0; u < std::int64_t(n); ++u) {
            float sum = 0.0f;
            const float* row = in + std::size_t(u) * d;
            for (std::size_t k = 0; k < d; ++k) sum += row[k];
            pm.p[u] = double(sum);
        }
    }
    return pm;
}

namespace {

constexpr char kModelMagic[4] = {'G', 'S', 'G', 'C'};
constexpr std::uint8_t kModelVersion = 1;

} // namespace

void save_model(const GnnModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out.write(kModelMagic, 4);
    out.put(char(kModelVersion));
    out.put(char(model.feature_norm));
    out.put(char(model.layers.size()));
    for (const auto& l : model.layers) {
        detail::put_u32(out, 2 * l.d_in);
        detail::put_u32(out, l.d_out);
        for (float w : l.W) detail::put_f32(out, w);
        for (float b : l.b) detail::put_f32(out, b);
    }
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

GnnModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open model file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || !std::equal(magic, magic + 4, kModelMagic))
        throw ParseError("bad magic in weight file: " + path);
    if (in.get() != kModelVersion)
        throw ParseError("unsupported weight file version: " + path);
    GnnModel model;
    int norm = in.get();
    if (norm != 0)
        throw ParseError("unknown feature-normalization scheme in weight file: " + path);
    model.feature_norm = std::uint8_t(norm);
    int layer_count = in.get();
    if (layer_count < 2 || layer_count > 4)
        throw ParseError("layer count outside 2..4 in weight file: " + path);

    std::uint32_t expect_in = kInputDim;
    for (int li = 0; li < layer_count; ++li) {
        GnnLayer l;
        std::uint32_t rows = detail::get_u32(in);
        l.d_out = detail::get_u32(in);
        if (rows != 2 * expect_in || l.d_out != kHiddenDim)
            throw ParseError("inconsistent dimension chain in weight file: " + path);
        l.d_in = expect_in;
        l.W.resize(std::size_t(rows) * l.d_out);
        for (auto& w : l.W) w = detail::get_f32(in);
        l.b.resize(l.d_out);
        for (auto& b : l.b) b = detail::get_f32(in);
        if (!in)
            throw ParseError("truncated weight file: " + path);
        for (float w : l.W)
            if (!std::isfinite(w)) throw ParseError("non-finite parameter in weight file: " + path);
        for (float b : l.b)
            if (!std::isfinite(b)) throw ParseError("non-finite parameter in weight file: " + path);
        expect_in = l.d_out;
        model.layers.push_back(std::move(l));
    }
    return model;
}

} // namespace gnncol
