#pragma once

#include "gnncol/graph.hpp"
#include "gnncol/ordering.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gnncol {

/// One GraphSAGE layer: W has shape (2*d_in) x d_out row-major (self
/// features stacked above the aggregated ones), b has length d_out.
struct GnnLayer {
    std::uint32_t d_in = 0;
    std::uint32_t d_out = 0;
    std::vector<float> W;
    std::vector<float> b;
};

constexpr std::uint32_t kInputDim = 2;   // degree + id
constexpr std::uint32_t kHiddenDim = 16;

struct GnnModel {
    std::uint8_t feature_norm = 0; // 0 = degree/max_degree, id/(n-1)
    std::vector<GnnLayer> layers;

    std::size_t num_params() const {
        std::size_t total = 0;
        for (const auto& l : layers) total += l.W.size() + l.b.size();
        return total;
    }
};

/// Dense n x d matrix, row u = feature vector of vertex u.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<float> data;

    FeatureMatrix() = default;
    FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0f) {}

    float* row(std::size_t u) { return data.data() + u * cols; }
    const float* row(std::size_t u) const { return data.data() + u * cols; }
};

/// H(0): per vertex (degree / max(1, max_degree), id / max(1, n-1)).
FeatureMatrix initial_features(const CsrGraph& g);

/// Semantic single-layer propagation: mean-aggregate the neighborhood
/// (zero vector for isolated vertices), concatenate with the vertex's own
/// row, transform, and optionally apply ReLU. This plain path is the
/// definition the optimized forward is tested against.
FeatureMatrix sage_layer(const CsrGraph& g, const FeatureMatrix& H,
                         const GnnLayer& layer, bool apply_activation);

/// Reusable buffers so repeated inference on the same graph avoids
/// reallocation (the genetic fitness loop hits this hard).
struct InferenceWorkspace {
    std::vector<float> a, b;
};

/// Full forward pass: initial features, every layer with ReLU except the
/// last (identity), then p(u) = sum of the final row. Output is bit-equal
/// for every worker count.
PriorityMap infer_priorities(const CsrGraph& g, const GnnModel& model, int workers = 1);
PriorityMap infer_priorities(const CsrGraph& g, const GnnModel& model, int workers,
                             InferenceWorkspace& ws);

/// "GSGC" weight file: magic, version 1, feature-norm byte, layer count,
/// then per layer little-endian u32 dims (2*d_in, d_out), W row-major as
/// f32, then b. The loader rejects bad magic/version, unknown norm
/// schemes, layer counts outside 2..4, and broken dimension chains.
void save_model(const GnnModel& model, const std::string& path);
GnnModel load_model(const std::string& path);

} // namespace gnncol
