#include "doctest.h"

#include "gnncol/genetic.hpp"
#include "gnncol/training.hpp"
#include "testutil.hpp"

#include <random>

using namespace gnncol;
namespace tu = gnncol::testutil;

namespace {

GnnModel zero_model(int layers) {
    GnnModel model;
    std::uint32_t d_in = kInputDim;
    for (int l = 0; l < layers; ++l) {
        GnnLayer layer;
        layer.d_in = d_in;
        layer.d_out = kHiddenDim;
        layer.W.assign(std::size_t(2) * d_in * kHiddenDim, 0.0f);
        layer.b.assign(kHiddenDim, 0.0f);
        model.layers.push_back(std::move(layer));
        d_in = kHiddenDim;
    }
    return model;
}

GnnModel seeded_model(int layers, std::uint64_t seed) {
    TrainConfig cfg;
    cfg.layers = layers;
    cfg.seed = seed;
    return parameter_init(cfg);
}

std::size_t count_diffs(const GnnModel& a, const GnnModel& b) {
    std::size_t diffs = 0;
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        for (std::size_t i = 0; i < a.layers[l].W.size(); ++i)
            if (a.layers[l].W[i] != b.layers[l].W[i]) ++diffs;
        for (std::size_t i = 0; i < a.layers[l].b.size(); ++i)
            if (a.layers[l].b[i] != b.layers[l].b[i]) ++diffs;
    }
    return diffs;
}

} // namespace

TEST_CASE("fitness: lexicographic ordering and the K3 value") {
    Fitness a{10, 5};
    Fitness b{10, 3};
    CHECK(b < a);
    CHECK(Fitness{9, 99} < b);

    // greedy on K3 always uses colors {0,1,2}, each exactly once
    std::vector<CsrGraph> graphs{tu::complete_graph(3)};
    Fitness fit = fitness(zero_model(2), graphs);
    CHECK(fit.colors == 3);
    CHECK(fit.top_multiplicity == 1);

    CHECK_THROWS_AS(fitness(zero_model(2), {}), std::invalid_argument);
}

TEST_CASE("fitness is identical across worker counts") {
    std::mt19937_64 rng(3);
    std::vector<CsrGraph> graphs;
    for (int i = 0; i < 6; ++i) graphs.push_back(tu::er_gnm(30, 80, rng()));
    GnnModel model = seeded_model(2, 5);
    Fitness one = fitness(model, graphs, 1);
    Fitness four = fitness(model, graphs, 4);
    CHECK(one == four);
}

TEST_CASE("mutate_gaussian") {
    GnnModel parent = seeded_model(2, 11);
    std::mt19937_64 rng(1);
    GnnModel same = mutate_gaussian(parent, 0.0, rng);
    CHECK(count_diffs(parent, same) == 0);

    std::mt19937_64 r1(2), r2(2);
    GnnModel c1 = mutate_gaussian(parent, 0.05, r1);
    GnnModel c2 = mutate_gaussian(parent, 0.05, r2);
    CHECK(count_diffs(c1, c2) == 0);

    // over repeated draws the child essentially always moves
    std::mt19937_64 r3(3);
    int moved = 0;
    for (int i = 0; i < 100; ++i)
        if (count_diffs(parent, mutate_gaussian(parent, 0.01, r3)) > 0) ++moved;
    CHECK(moved == 100);
}

TEST_CASE("mutate_node touches exactly one feature column") {
    GnnModel parent = seeded_model(3, 13);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        GnnModel child = mutate_node(parent, 0.5, rng);
        std::size_t changed_layers = 0;
        for (std::size_t l = 0; l < parent.layers.size(); ++l) {
            std::size_t diffs = 0;
            for (std::size_t i = 0; i < parent.layers[l].W.size(); ++i)
                if (parent.layers[l].W[i] != child.layers[l].W[i]) ++diffs;
            std::size_t bias_diffs = 0;
            for (std::size_t i = 0; i < parent.layers[l].b.size(); ++i)
                if (parent.layers[l].b[i] != child.layers[l].b[i]) ++bias_diffs;
            if (diffs + bias_diffs == 0) continue;
            ++changed_layers;
            // a Gaussian draw can land on exactly zero only with measure
            // zero, so demand the full column plus its bias entry
            CHECK(diffs == 2 * parent.layers[l].d_in);
            CHECK(bias_diffs == 1);
        }
        CHECK(changed_layers == 1);
    }

    std::mt19937_64 r1(9), r2(9);
    CHECK(count_diffs(mutate_node(parent, 0.1, r1), mutate_node(parent, 0.1, r2)) == 0);
}

TEST_CASE("crossover_significant") {
    GnnModel a = seeded_model(2, 17);
    GnnModel b = seeded_model(2, 19);
    std::mt19937_64 rng(21);
    GnnModel child = crossover_significant(a, b, rng);
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        CHECK(child.layers[l].W.size() == a.layers[l].W.size());
        CHECK(child.layers[l].b.size() == a.layers[l].b.size());
    }

    // identical parents: at least the top half of each layer is copied
    std::mt19937_64 rng2(23);
    GnnModel same = crossover_significant(a, a, rng2);
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        std::size_t copied = 0;
        const std::size_t count = a.layers[l].W.size() + a.layers[l].b.size();
        for (std::size_t i = 0; i < a.layers[l].W.size(); ++i)
            if (same.layers[l].W[i] == a.layers[l].W[i]) ++copied;
        for (std::size_t i = 0; i < a.layers[l].b.size(); ++i)
            if (same.layers[l].b[i] == a.layers[l].b[i]) ++copied;
        CHECK(copied >= (count + 1) / 2);
    }

    // all-zero parents: every magnitude ties, so parent A is copied wholesale
    GnnModel za = zero_model(2), zb = zero_model(2);
    std::mt19937_64 rng3(29);
    GnnModel zchild = crossover_significant(za, zb, rng3);
    CHECK(count_diffs(zchild, za) == 0);

    CHECK_THROWS_AS(crossover_significant(seeded_model(2, 1), seeded_model(3, 1), rng),
                    std::invalid_argument);
}

TEST_CASE("evolve: elitism keeps the champion monotone") {
    std::mt19937_64 rng(31);
    std::vector<CsrGraph> graphs;
    for (int i = 0; i < 5; ++i) graphs.push_back(tu::er_gnm(20, 45, rng()));

    EvolveConfig cfg;
    cfg.population = 12;
    cfg.truncation = 4;
    cfg.generations = 50;
    cfg.seed = 33;
    cfg.sigma = 0.02;

    std::vector<GnnModel> initial;
    for (int i = 0; i < cfg.population; ++i) initial.push_back(seeded_model(2, 100 + i));

    auto result = evolve(initial, graphs, cfg);
    REQUIRE(result.history.size() == std::size_t(cfg.generations) + 1);
    for (std::size_t gen = 1; gen < result.history.size(); ++gen) {
        CHECK_FALSE(result.history[gen - 1].best < result.history[gen].best);
        CHECK(result.history[gen].generation == int(gen));
    }
    CHECK(result.best.fit == result.history.back().best);
    CHECK_FALSE(result.history.front().best < result.best.fit);
}

TEST_CASE("evolve is deterministic under a fixed seed") {
    std::mt19937_64 rng(41);
    std::vector<CsrGraph> graphs{tu::er_gnm(18, 40, rng()), tu::er_gnm(22, 55, rng())};

    EvolveConfig cfg;
    cfg.population = 8;
    cfg.truncation = 3;
    cfg.generations = 6;
    cfg.seed = 43;

    std::vector<GnnModel> initial;
    for (int i = 0; i < cfg.population; ++i) initial.push_back(seeded_model(2, 200 + i));

    auto a = evolve(initial, graphs, cfg);
    auto b = evolve(initial, graphs, cfg);
    CHECK(a.best.fit == b.best.fit);
    CHECK(flatten_params(a.best.model) == flatten_params(b.best.model));
    for (std::size_t i = 0; i < a.history.size(); ++i)
        CHECK(a.history[i].best == b.history[i].best);
}

TEST_CASE("evolve validates its configuration") {
    std::vector<CsrGraph> graphs{tu::complete_graph(3)};
    EvolveConfig cfg;
    cfg.population = 4;
    cfg.truncation = 9;
    cfg.generations = 1;
    std::vector<GnnModel> initial(4, zero_model(2));
    CHECK_THROWS_AS(evolve(initial, graphs, cfg), std::invalid_argument);
    cfg.truncation = 2;
    std::vector<GnnModel> short_pop(3, zero_model(2));
    CHECK_THROWS_AS(evolve(short_pop, graphs, cfg), std::invalid_argument);
}
