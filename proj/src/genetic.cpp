#include "gnncol/genetic.hpp"
#include "gnncol/ordering.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <omp.h>

namespace gnncol {

namespace {

Fitness fitness_ws(const GnnModel& model, const std::vector<CsrGraph>& graphs,
                   std::vector<InferenceWorkspace>& ws) {
    Fitness fit;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        Coloring col = greedy_color(graphs[i], infer_priorities(graphs[i], model, 1, ws[i]));
        fit.colors += col.num_colors;
        fit.top_multiplicity += col.max_color_multiplicity;
    }
    return fit;
}

} // namespace

Fitness fitness(const GnnModel& model, const std::vector<CsrGraph>& graphs, int workers) {
    if (graphs.empty())
        throw std::invalid_argument("fitness: empty graph list");
    std::int64_t colors = 0, multiplicity = 0;
#pragma omp parallel for schedule(dynamic) num_threads(workers) \
    reduction(+ : colors, multiplicity) if (workers > 1)
    for (std::int64_t i = 0; i < std::int64_t(graphs.size()); ++i) {
        Coloring col = greedy_color(graphs[i], infer_priorities(graphs[i], model, 1));
        colors += col.num_colors;
        multiplicity += col.max_color_multiplicity;
    }
    return {colors, multiplicity};
}

GnnModel mutate_gaussian(const GnnModel& model, double sigma, std::mt19937_64& rng) {
    GnnModel child = model;
    if (sigma <= 0.0) return child;
    std::normal_distribution<float> noise(0.0f, float(sigma));
    for (auto& l : child.layers) {
        for (auto& w : l.W) w += noise(rng);
        for (auto& b : l.b) b += noise(rng);
    }
    return child;
}

GnnModel mutate_node(const GnnModel& model, double sigma, std::mt19937_64& rng) {
    GnnModel child = model;
    std::uniform_int_distribution<std::size_t> pick_layer(0, child.layers.size() - 1);
    auto& l = child.layers[pick_layer(rng)];
    std::uniform_int_distribution<std::uint32_t> pick_feature(0, l.d_out - 1);
    const std::uint32_t j = pick_feature(rng);
    if (sigma <= 0.0) return child;
    std::normal_distribution<float> noise(0.0f, float(sigma));
    for (std::size_t i = 0; i < std::size_t(2) * l.d_in; ++i)
        l.W[i * l.d_out + j] += noise(rng);
    l.b[j] += noise(rng);
    return child;
}

GnnModel crossover_significant(const GnnModel& a, const GnnModel& b, std::mt19937_64& rng) {
    if (a.layers.size() != b.layers.size())
        throw std::invalid_argument("crossover_significant: layer count mismatch");
    GnnModel child = a;
    std::uniform_real_distribution<float> fresh(-0.1f, 0.1f);
    for (std::size_t li = 0; li < a.layers.size(); ++li) {
        const auto& la = a.layers[li];
        const auto& lb = b.layers[li];
        auto& lc = child.layers[li];
        if (la.W.size() != lb.W.size() || la.b.size() != lb.b.size())
            throw std::invalid_argument("crossover_significant: layer shape mismatch");

        const std::size_t count = la.W.size() + la.b.size();
        auto value_a = [&](std::size_t i) { return i < la.W.size() ? la.W[i] : la.b[i - la.W.size()]; };
        auto value_b = [&](std::size_t i) { return i < lb.W.size() ? lb.W[i] : lb.b[i - lb.W.size()]; };

        std::vector<float> mag(count);
        for (std::size_t i = 0; i < count; ++i)
            mag[i] = std::max(std::abs(value_a(i)), std::abs(value_b(i)));

        // Threshold = the floor(count/2)-th largest magnitude; positions at
        // or above it count as the top half (ties included, so all-zero
        // parents copy parent A everywhere).
        std::vector<float> sorted = mag;
        const std::size_t keep = (count + 1) / 2;
        std::nth_element(sorted.begin(), sorted.begin() + (keep - 1), sorted.end(),
                         std::greater<float>());
        const float threshold = sorted[keep - 1];

        for (std::size_t i = 0; i < count; ++i) {
            float out;
            if (mag[i] >= threshold)
                out = std::abs(value_a(i)) >= std::abs(value_b(i)) ? value_a(i) : value_b(i);
            else
                out = fresh(rng);
            if (i < lc.W.size()) lc.W[i] = out;
            else lc.b[i - lc.W.size()] = out;
        }
    }
    return child;
}

EvolveResult evolve(std::vector<GnnModel> initial, const std::vector<CsrGraph>& graphs,
                    const EvolveConfig& cfg,
                    const std::function<void(int, const Individual&)>& on_generation) {
    if (int(initial.size()) != cfg.population)
        throw std::invalid_argument("evolve: initial population size mismatch");
    if (cfg.truncation < 1 || cfg.truncation > cfg.population)
        throw std::invalid_argument("evolve: truncation outside [1, population]");
    if (graphs.empty())
        throw std::invalid_argument("evolve: empty graph list");

    const int N = cfg.population;
    std::vector<Individual> pop(N);
    for (int i = 0; i < N; ++i) pop[i].model = std::move(initial[i]);

    // Per-graph inference buffers are reused across the whole population.
    std::vector<std::vector<InferenceWorkspace>> ws(std::max(1, cfg.workers));
    for (auto& w : ws) w.resize(graphs.size());

    auto evaluate = [&](std::vector<Individual>& individuals, int from) {
#pragma omp parallel for schedule(dynamic) num_threads(cfg.workers) if (cfg.workers > 1)
        for (int i = from; i < int(individuals.size()); ++i)
            individuals[i].fit = fitness_ws(individuals[i].model, graphs,
                                            ws[omp_get_thread_num()]);
    };
    evaluate(pop, 0);

    auto by_fitness = [](const Individual& x, const Individual& y) { return x.fit < y.fit; };
    std::stable_sort(pop.begin(), pop.end(), by_fitness);

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int> pick_parent(0, cfg.truncation - 1);
    std::discrete_distribution<int> pick_op(
        {cfg.weight_gaussian, cfg.weight_node, cfg.weight_crossover});

    EvolveResult result;
    result.best = pop.front();
    result.history.push_back({0, pop.front().fit});

    std::vector<Individual> next(N);
    for (int gen = 1; gen <= cfg.generations; ++gen) {
        next[0] = pop.front(); // elitism
        for (int i = 1; i < N; ++i) {
            switch (pick_op(rng)) {
            case 0:
                next[i].model = mutate_gaussian(pop[pick_parent(rng)].model, cfg.sigma, rng);
                break;
            case 1:
                next[i].model = mutate_node(pop[pick_parent(rng)].model, cfg.sigma, rng);
                break;
            default: {
                const auto& pa = pop[pick_parent(rng)].model;
                const auto& pb = pop[pick_parent(rng)].model;
                next[i].model = crossover_significant(pa, pb, rng);
            }
            }
        }
        evaluate(next, 1);
        pop.swap(next);
        std::stable_sort(pop.begin(), pop.end(), by_fitness);
        if (pop.front().fit < result.best.fit) result.best = pop.front();
        result.history.push_back({gen, pop.front().fit});
        if (on_generation) on_generation(gen, pop.front());
    }
    return result;
}

} // namespace gnncol
