// gnncol: greedy + Jones-Plassmann graph coloring with classical and
// GNN-based ordering heuristics, plus the training drivers.
//
// Exit codes: 0 success, 1 invalid input, 2 internal validation failure.

#include "CLI11.hpp"

#include "gnncol/coloring.hpp"
#include "gnncol/genetic.hpp"
#include "gnncol/gnn.hpp"
#include "gnncol/graph.hpp"
#include "gnncol/ordering.hpp"
#include "gnncol/training.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

using namespace gnncol;
namespace fs = std::filesystem;

namespace {

constexpr int kExitInvalidInput = 1;
constexpr int kExitValidationFailure = 2;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string instance_name(const std::string& path) {
    return fs::path(path).stem().string();
}

struct Manifest {
    std::vector<std::string> train, test, valid;
};

Manifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open manifest: " + path);
    Manifest m;
    fs::path base = fs::path(path).parent_path();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string graph_path, tag;
        if (!(ls >> graph_path)) continue;
        if (graph_path[0] == '#') continue;
        if (!(ls >> tag))
            throw ParseError("manifest line " + std::to_string(line_no) +
                             ": expected '<path> <train|test|valid>'");
        std::string resolved = fs::path(graph_path).is_absolute()
                                   ? graph_path
                                   : (base / graph_path).string();
        if (tag == "train") m.train.push_back(resolved);
        else if (tag == "test") m.test.push_back(resolved);
        else if (tag == "valid") m.valid.push_back(resolved);
        else
            throw ParseError("manifest line " + std::to_string(line_no) + ": unknown tag '" +
                             tag + "'");
    }
    return m;
}

std::vector<CsrGraph> load_graphs(const std::vector<std::string>& paths) {
    std::vector<CsrGraph> graphs;
    graphs.reserve(paths.size());
    for (const auto& p : paths) graphs.push_back(load_graph_file(p));
    return graphs;
}

// ---------------------------------------------------------------- color --

struct ColorArgs {
    std::string graph_path;
    std::string heuristic = "ff";
    std::string mode = "seq";
    int workers = 1;
    int reps = 5;
    int culberson = 0;
    std::string out_path;
    std::string priorities_path;
};

int run_color(const ColorArgs& args) {
    CsrGraph g = load_graph_file(args.graph_path);
    const bool parallel = args.mode == "par";
    const std::string inst = instance_name(args.graph_path);

    std::optional<GnnModel> model;
    std::optional<PriorityMap> fixed_pm;
    if (args.heuristic.rfind("gnn:", 0) == 0) {
        model = load_model(args.heuristic.substr(4));
    } else if (args.heuristic.rfind("file:", 0) == 0) {
        std::ifstream in(args.heuristic.substr(5));
        if (!in)
            throw std::runtime_error("cannot open priority dump: " + args.heuristic.substr(5));
        fixed_pm = read_priorities(in);
        if (fixed_pm->size() != g.n)
            throw std::runtime_error("priority dump size does not match the graph");
    } else if (args.heuristic != "ff" && args.heuristic != "lf" && args.heuristic != "sl" &&
               args.heuristic != "id" && args.heuristic != "sd") {
        throw std::runtime_error("unknown heuristic: " + args.heuristic);
    }

    auto build_pm = [&]() -> PriorityMap {
        int w = parallel ? args.workers : 1;
        if (model) return infer_priorities(g, *model, w);
        if (fixed_pm) return *fixed_pm;
        if (args.heuristic == "ff") return order_ff(g, w);
        if (args.heuristic == "lf") return order_lf(g, w);
        if (args.heuristic == "sl") return order_sl(g, w);
        if (args.heuristic == "id") return order_id(g);
        return order_sd(g);
    };

    struct Row {
        std::string heuristic;
        int rep;
        double seconds;
        std::int32_t colors;
    };
    std::vector<Row> rows;
    Coloring last;
    PriorityMap last_pm;

    for (int rep = 0; rep < args.reps; ++rep) {
        auto t0 = std::chrono::steady_clock::now();
        PriorityMap pm = build_pm();
        Coloring col = parallel ? jp_color(g, pm, args.workers) : greedy_color(g, pm);
        double secs = seconds_since(t0);
        if (!validate(g, col)) {
            std::cerr << "validation failed for heuristic " << args.heuristic << "\n";
            return kExitValidationFailure;
        }
        rows.push_back({args.heuristic, rep, secs, col.num_colors});
        for (int k = 1; k <= args.culberson; ++k) {
            auto tc = std::chrono::steady_clock::now();
            col = culberson_recolor(g, col);
            double csecs = seconds_since(tc);
            if (!validate(g, col)) {
                std::cerr << "validation failed after culberson iteration " << k << "\n";
                return kExitValidationFailure;
            }
            rows.push_back({args.heuristic + "+c" + std::to_string(k), rep, csecs,
                            col.num_colors});
        }
        last = std::move(col);
        last_pm = std::move(pm);
    }

    // deterministic heuristics must reproduce their colors across reps
    std::map<std::string, std::int32_t> first_colors;
    for (const auto& row : rows) {
        auto [it, fresh] = first_colors.emplace(row.heuristic, row.colors);
        if (!fresh && it->second != row.colors) {
            std::cerr << "color count changed across repetitions for " << row.heuristic
                      << " (" << it->second << " vs " << row.colors << ")\n";
            return kExitValidationFailure;
        }
    }

    std::cout << "instance,heuristic,workers,rep,seconds,colors\n";
    char buf[64];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%.6f", row.seconds);
        std::cout << inst << ',' << row.heuristic << ',' << (parallel ? args.workers : 1)
                  << ',' << row.rep << ',' << buf << ',' << row.colors << '\n';
    }

    double best = rows.front().seconds;
    for (const auto& row : rows)
        if (row.heuristic == args.heuristic) best = std::min(best, row.seconds);
    std::snprintf(buf, sizeof(buf), "%.6f", best);
    std::cerr << inst << ": " << args.heuristic << " best of " << args.reps << " reps " << buf
              << " s, " << first_colors[args.heuristic] << " colors";
    if (args.culberson > 0) {
        std::string final_name = args.heuristic + "+c" + std::to_string(args.culberson);
        std::cerr << " (" << first_colors[final_name] << " after " << args.culberson
                  << " culberson iterations)";
    }
    std::cerr << "\n";

    if (!args.out_path.empty()) {
        std::ofstream out(args.out_path);
        if (!out)
            throw std::runtime_error("cannot open for writing: " + args.out_path);
        write_coloring(last, out);
    }
    if (!args.priorities_path.empty()) {
        std::ofstream out(args.priorities_path);
        if (!out)
            throw std::runtime_error("cannot open for writing: " + args.priorities_path);
        write_priorities(last_pm, out);
    }
    return 0;
}

// ---------------------------------------------------------------- train --

struct TrainArgs {
    std::string manifest;
    std::string labels = "sl";
    int layers = 2;
    int epochs = 200;
    std::uint64_t seed = 1;
    double lr = 1e-3;
    std::string out_path;
    std::string metrics_path;
    std::string warm_start;
};

int run_train(const TrainArgs& args) {
    Manifest manifest = read_manifest(args.manifest);
    if (manifest.train.empty())
        throw std::runtime_error("manifest has no train graphs");
    auto train_graphs = load_graphs(manifest.train);
    auto holdout_graphs = load_graphs(manifest.test);

    TrainConfig cfg;
    cfg.epochs = args.epochs;
    cfg.layers = args.layers;
    cfg.seed = args.seed;
    cfg.learning_rate = float(args.lr);
    if (args.labels == "sl") cfg.source = LabelSource::SL;
    else if (args.labels == "sd") cfg.source = LabelSource::SD;
    else if (args.labels == "lf") cfg.source = LabelSource::LF;
    else
        throw std::runtime_error("unknown label source: " + args.labels);

    std::optional<GnnModel> warm;
    if (!args.warm_start.empty()) warm = load_model(args.warm_start);
    TrainResult result =
        train_supervised(train_graphs, holdout_graphs, cfg, warm ? &*warm : nullptr);

    save_model(result.model, args.out_path);
    std::string metrics = args.metrics_path.empty() ? args.out_path + ".metrics.csv"
                                                    : args.metrics_path;
    std::ofstream out(metrics);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + metrics);
    out << "epoch,loss,f1,holdout_colors\n";
    char buf[96];
    for (const auto& em : result.history) {
        std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%lld", em.epoch, em.loss, em.f1,
                      static_cast<long long>(em.holdout_colors));
        out << buf << '\n';
    }
    if (!result.history.empty()) {
        std::cerr << "final loss " << result.history.back().loss << ", holdout F1 "
                  << result.history.back().f1 << "\n";
    }
    return 0;
}

// --------------------------------------------------------------- evolve --

struct EvolveArgs {
    std::vector<std::string> init_paths;
    std::string manifest;
    EvolveConfig cfg;
    std::string out_path;
    std::string history_path;
    int checkpoint_every = 0;
};

int run_evolve(const EvolveArgs& args) {
    std::vector<GnnModel> checkpoints;
    for (const auto& p : args.init_paths) checkpoints.push_back(load_model(p));
    for (const auto& m : checkpoints)
        if (m.layers.size() != checkpoints.front().layers.size())
            throw std::runtime_error("initial checkpoints mix different layer counts");

    Manifest manifest = read_manifest(args.manifest);
    if (manifest.train.empty())
        throw std::runtime_error("manifest has no train graphs");
    auto graphs = load_graphs(manifest.train);

    // Fill the population by jittering the checkpoints when there are
    // fewer than N of them.
    std::vector<GnnModel> population;
    population.reserve(args.cfg.population);
    for (int i = 0; i < args.cfg.population && i < int(checkpoints.size()); ++i)
        population.push_back(checkpoints[i]);
    std::mt19937_64 jitter_rng(args.cfg.seed + 0x5eed);
    for (int i = int(population.size()); i < args.cfg.population; ++i)
        population.push_back(mutate_gaussian(checkpoints[i % checkpoints.size()],
                                             args.cfg.sigma, jitter_rng));

    auto checkpoint_hook = [&](int gen, const Individual& champion) {
        if (args.checkpoint_every > 0 && gen % args.checkpoint_every == 0)
            save_model(champion.model, args.out_path + ".gen" + std::to_string(gen));
    };
    EvolveResult result = evolve(std::move(population), graphs, args.cfg, checkpoint_hook);

    save_model(result.best.model, args.out_path);
    std::string history = args.history_path.empty() ? args.out_path + ".history.csv"
                                                    : args.history_path;
    std::ofstream out(history);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + history);
    out << "generation,best_colors,best_tiebreak\n";
    for (const auto& rec : result.history)
        out << rec.generation << ',' << rec.best.colors << ',' << rec.best.top_multiplicity
            << '\n';
    std::cerr << "champion: " << result.best.fit.colors << " colors, tiebreak "
              << result.best.fit.top_multiplicity << "\n";
    return 0;
}

// -------------------------------------------------------------- profile --

int run_profile(const std::vector<std::string>& record_paths, const std::string& out_path) {
    // (instance, heuristic) -> colors
    std::map<std::pair<std::string, std::string>, std::int64_t> colors;
    std::vector<std::string> heuristics; // first-appearance order
    std::set<std::string> instances;

    for (const auto& path : record_paths) {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open record file: " + path);
        std::string line;
        if (!std::getline(in, line) || line.rfind("instance,heuristic", 0) != 0)
            throw std::runtime_error("missing RunRecord header in " + path);
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            std::vector<std::string> fields;
            std::istringstream ls(line);
            std::string field;
            while (std::getline(ls, field, ',')) fields.push_back(field);
            if (fields.size() != 6)
                throw std::runtime_error(path + " line " + std::to_string(line_no) +
                                         ": expected 6 CSV fields");
            const std::string& inst = fields[0];
            const std::string& heur = fields[1];
            std::int64_t c = std::stoll(fields[5]);
            auto key = std::make_pair(inst, heur);
            auto [it, fresh] = colors.emplace(key, c);
            if (!fresh && it->second != c)
                throw std::runtime_error("inconsistent colors for " + inst + "/" + heur);
            if (std::find(heuristics.begin(), heuristics.end(), heur) == heuristics.end())
                heuristics.push_back(heur);
            instances.insert(inst);
        }
    }
    if (heuristics.empty())
        throw std::runtime_error("no records given");
    for (const auto& inst : instances)
        for (const auto& heur : heuristics)
            if (!colors.count({inst, heur}))
                throw std::runtime_error("heuristic " + heur + " is missing instance " + inst);

    // best per instance, then the profile
    std::map<std::string, std::int64_t> best;
    for (const auto& inst : instances) {
        std::int64_t b = std::numeric_limits<std::int64_t>::max();
        for (const auto& heur : heuristics) b = std::min(b, colors[{inst, heur}]);
        best[inst] = b;
    }
    std::int64_t max_gap = 0;
    for (const auto& [key, c] : colors) max_gap = std::max(max_gap, c - best[key.first]);

    std::ostringstream csv;
    csv << "k";
    for (const auto& heur : heuristics) csv << ',' << heur;
    csv << '\n';
    for (std::int64_t k = 0; k <= max_gap; ++k) {
        csv << k;
        for (const auto& heur : heuristics) {
            std::int64_t within = 0;
            for (const auto& inst : instances)
                if (colors[{inst, heur}] <= best[inst] + k) ++within;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.6g", double(within) / double(instances.size()));
            csv << ',' << buf;
        }
        csv << '\n';
    }

    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path);
        if (!out)
            throw std::runtime_error("cannot open for writing: " + out_path);
        out << csv.str();
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"parallel graph coloring with greedy and GNN-based ordering heuristics"};
    app.require_subcommand(1);

    ColorArgs color_args;
    auto* color = app.add_subcommand("color", "order and color one graph, emit RunRecords");
    color->add_option("graph", color_args.graph_path, "graph file (.col, .csrg, or edge list)")
        ->required();
    color->add_option("--heuristic", color_args.heuristic,
                      "ff|lf|sl|id|sd|gnn:<weights>|file:<priorities>");
    color->add_option("--mode", color_args.mode, "seq|par")
        ->check(CLI::IsMember({"seq", "par"}));
    color->add_option("--workers", color_args.workers, "worker threads for par mode")
        ->check(CLI::PositiveNumber);
    color->add_option("--reps", color_args.reps, "repetitions (best time reported)")
        ->check(CLI::PositiveNumber);
    color->add_option("--culberson", color_args.culberson, "repeated recoloring iterations")
        ->check(CLI::NonNegativeNumber);
    color->add_option("--out", color_args.out_path, "write the final coloring here");
    color->add_option("--dump-priorities", color_args.priorities_path,
                      "write the priority map here");

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "supervised training on edge labels");
    train->add_option("--manifest", train_args.manifest, "graph list with train/test/valid tags")
        ->required();
    train->add_option("--labels", train_args.labels, "label source: sl|sd|lf");
    train->add_option("--layers", train_args.layers, "2, 3, or 4")
        ->check(CLI::Range(2, 4));
    train->add_option("--epochs", train_args.epochs)->check(CLI::NonNegativeNumber);
    train->add_option("--seed", train_args.seed);
    train->add_option("--lr", train_args.lr, "Adam learning rate");
    train->add_option("--out", train_args.out_path, "checkpoint path")->required();
    train->add_option("--metrics", train_args.metrics_path,
                      "metrics CSV (default: <out>.metrics.csv)");
    train->add_option("--warm-start", train_args.warm_start, "continue from this checkpoint");

    EvolveArgs evolve_args;
    auto* evolve_cmd = app.add_subcommand("evolve", "genetic refinement of trained models");
    evolve_cmd->add_option("--init", evolve_args.init_paths, "initial checkpoints")
        ->required()
        ->expected(-1);
    evolve_cmd->add_option("--manifest", evolve_args.manifest)->required();
    evolve_cmd->add_option("--population", evolve_args.cfg.population)
        ->check(CLI::PositiveNumber);
    evolve_cmd->add_option("--truncation", evolve_args.cfg.truncation)
        ->check(CLI::PositiveNumber);
    evolve_cmd->add_option("--generations", evolve_args.cfg.generations)
        ->check(CLI::NonNegativeNumber);
    evolve_cmd->add_option("--seed", evolve_args.cfg.seed);
    evolve_cmd->add_option("--sigma", evolve_args.cfg.sigma)->check(CLI::PositiveNumber);
    evolve_cmd->add_option("--workers", evolve_args.cfg.workers)->check(CLI::PositiveNumber);
    evolve_cmd->add_option("--weight-gaussian", evolve_args.cfg.weight_gaussian);
    evolve_cmd->add_option("--weight-node", evolve_args.cfg.weight_node);
    evolve_cmd->add_option("--weight-crossover", evolve_args.cfg.weight_crossover);
    evolve_cmd->add_option("--checkpoint-every", evolve_args.checkpoint_every,
                           "write <out>.gen<k> every k generations");
    evolve_cmd->add_option("--out", evolve_args.out_path, "champion checkpoint path")
        ->required();
    evolve_cmd->add_option("--history", evolve_args.history_path,
                           "fitness history CSV (default: <out>.history.csv)");

    std::vector<std::string> record_paths;
    std::string profile_out;
    auto* profile = app.add_subcommand("profile", "performance profile from RunRecord CSVs");
    profile->add_option("records", record_paths, "RunRecord CSV files")
        ->required()
        ->expected(-1);
    profile->add_option("--out", profile_out, "output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitInvalidInput;
    }

    try {
        if (*color) return run_color(color_args);
        if (*train) return run_train(train_args);
        if (*evolve_cmd) return run_evolve(evolve_args);
        if (*profile) return run_profile(record_paths, profile_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    }
    return 0;
}
