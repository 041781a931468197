#pragma once

#include "gnncol/coloring.hpp"
#include "gnncol/gnn.hpp"
#include "gnncol/graph.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace gnncol {

/// Lexicographic fitness, lower is better: total colors over the training
/// set, then total vertices carrying each graph's top color.
struct Fitness {
    std::int64_t colors = 0;
    std::int64_t top_multiplicity = 0;

    auto operator<=>(const Fitness&) const = default;
};

struct Individual {
    GnnModel model;
    Fitness fit;
};

struct EvolveConfig {
    int population = 100;
    int truncation = 20;
    int generations = 500;
    std::uint64_t seed = 1;
    double weight_gaussian = 0.4;
    double weight_node = 0.3;
    double weight_crossover = 0.3;
    double sigma = 0.01;
    int workers = 1;
};

Fitness fitness(const GnnModel& model, const std::vector<CsrGraph>& graphs, int workers = 1);

/// Every parameter gets independent N(0, sigma^2) noise.
GnnModel mutate_gaussian(const GnnModel& model, double sigma, std::mt19937_64& rng);

/// One uniformly chosen output feature of one layer: only its incoming
/// weight column and bias entry get noise (2*d_in + 1 parameters).
GnnModel mutate_node(const GnnModel& model, double sigma, std::mt19937_64& rng);

/// Per layer, positions whose larger-magnitude parent value sits in the
/// top half of magnitudes are copied from that parent (ties copy parent
/// A); the rest are redrawn uniformly in [-0.1, 0.1].
GnnModel crossover_significant(const GnnModel& a, const GnnModel& b, std::mt19937_64& rng);

struct GenerationRecord {
    int generation = 0;
    Fitness best;
};

struct EvolveResult {
    Individual best; // all-time best
    std::vector<GenerationRecord> history;
};

/// Truncation selection with elitism: sort by fitness, carry the champion
/// over unchanged, refill from operators applied to parents drawn
/// uniformly from the top T. Champion fitness never worsens. Fitness
/// evaluation may fan out over workers; selection and mutation are
/// single-threaded, so a fixed seed fixes the run. on_generation, when
/// set, sees the champion after every generation (checkpointing hook).
EvolveResult evolve(std::vector<GnnModel> initial, const std::vector<CsrGraph>& graphs,
                    const EvolveConfig& cfg,
                    const std::function<void(int, const Individual&)>& on_generation = {});

} // namespace gnncol
