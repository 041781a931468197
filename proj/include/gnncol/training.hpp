#pragma once

#include "gnncol/coloring.hpp"
#include "gnncol/gnn.hpp"
#include "gnncol/graph.hpp"
#include "gnncol/ordering.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnncol {

/// Ground-truth ordering used to derive edge labels. SL and SD use the
/// round-based formulations (equal priority within a round); LF labels
/// come straight from vertex degrees and exist for the learnability
/// sanity check.
enum class LabelSource { SL, SD, LF };

/// One binary label per directed edge, aligned with the CSR col_indices
/// slots: labels[k] refers to the edge (row-of-k -> col_indices[k]).
/// L(u,v) = 1 iff the ground-truth priority of u strictly exceeds v's.
struct EdgeLabelSet {
    std::vector<std::uint8_t> labels;
};

EdgeLabelSet labels_from_priorities(const CsrGraph& g, const PriorityMap& pm);
EdgeLabelSet make_labels(const CsrGraph& g, LabelSource source);

/// Round-based saturation-degree priorities: every step, all uncolored
/// vertices of maximum saturation receive the same priority; saturation
/// bookkeeping colors round members in ascending ID.
PriorityMap sd_round_priorities(const CsrGraph& g);

/// sigma(priority(u) - priority(v)) from a full forward pass.
double predict_edge(const GnnModel& model, const CsrGraph& g, Vertex u, Vertex v);

/// sigma(p(u) - p(v)) for every directed edge slot.
std::vector<double> edge_predictions(const GnnModel& model, const CsrGraph& g);

/// Mean binary cross-entropy with predictions clamped to [1e-7, 1-1e-7].
double bce_loss(std::span<const double> predictions, std::span<const std::uint8_t> labels);

/// Binary F1 on the positive class at threshold 0.5; predictions at
/// exactly 0.5 count as class 0. Zero when precision+recall is zero.
double f1_score(std::span<const double> predictions, std::span<const std::uint8_t> labels);

struct TrainConfig {
    int epochs = 200;
    float learning_rate = 1e-3f;
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float adam_eps = 1e-8f;
    std::uint64_t seed = 1;
    LabelSource source = LabelSource::SL;
    int layers = 2;
};

/// Xavier-uniform weights in +-sqrt(6/(fan_in+fan_out)), zero biases.
GnnModel parameter_init(const TrainConfig& cfg);

struct EpochMetrics {
    int epoch = 0;
    double loss = 0.0;
    double f1 = 0.0;
    std::int64_t holdout_colors = 0;
};

struct TrainResult {
    GnnModel model;
    std::vector<EpochMetrics> history;
};

class TrainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adam on mean BCE over directed edges, one mini-batch per graph, graphs
/// shuffled per epoch with the seeded RNG. Per-epoch metrics report the
/// mean training loss plus F1 and total greedy colors on the held-out set.
/// Throws TrainError with seed/epoch/graph diagnostics if the loss goes
/// non-finite. Pass warm_start to continue from an existing model instead
/// of a fresh parameter_init.
TrainResult train_supervised(const std::vector<CsrGraph>& train_graphs,
                             const std::vector<CsrGraph>& holdout_graphs,
                             const TrainConfig& cfg,
                             const GnnModel* warm_start = nullptr);

/// Flat parameter order: per layer, W row-major then b.
std::vector<float> flatten_params(const GnnModel& model);
void unflatten_params(GnnModel& model, std::span<const float> flat);

/// Production gradient path (single precision throughout).
float loss_and_gradients(const GnnModel& model, const CsrGraph& g,
                         const EdgeLabelSet& labels, std::vector<float>& grad);

/// Double-precision mirrors of the same computation, driven by an explicit
/// flat parameter vector; these back the finite-difference checks.
double loss_fp64(const GnnModel& shape, const CsrGraph& g, const EdgeLabelSet& labels,
                 std::span<const double> flat_params);
double loss_and_gradients_fp64(const GnnModel& shape, const CsrGraph& g,
                               const EdgeLabelSet& labels, std::span<const double> flat_params,
                               std::vector<double>& grad);

} // namespace gnncol
