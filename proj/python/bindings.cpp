#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gnncol/coloring.hpp"
#include "gnncol/genetic.hpp"
#include "gnncol/gnn.hpp"
#include "gnncol/graph.hpp"
#include "gnncol/ordering.hpp"
#include "gnncol/training.hpp"

#include <sstream>

namespace py = pybind11;
using namespace gnncol;

namespace {

CsrGraph graph_from_edges(Vertex n, const std::vector<std::pair<Vertex, Vertex>>& edges) {
    return CsrGraph::from_edges(n, edges);
}

CsrGraph edge_list_from_text(const std::string& text) {
    std::istringstream in(text);
    return load_edge_list(in);
}

CsrGraph dimacs_from_text(const std::string& text) {
    std::istringstream in(text);
    return load_dimacs_col(in);
}

PriorityMap pm_from_list(std::vector<double> p) {
    PriorityMap pm;
    pm.p = std::move(p);
    return pm;
}

LabelSource label_source(const std::string& name) {
    if (name == "sl") return LabelSource::SL;
    if (name == "sd") return LabelSource::SD;
    if (name == "lf") return LabelSource::LF;
    throw std::invalid_argument("label source must be one of sl, sd, lf");
}

} // namespace

PYBIND11_MODULE(_gnncol, m) {
    m.doc() = "Parallel graph coloring: greedy orderings, Jones-Plassmann, and a "
              "GraphSAGE ordering heuristic with its training pipelines";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<TrainError>(m, "TrainError", PyExc_RuntimeError);

    py::class_<CsrGraph>(m, "CsrGraph")
        .def_readonly("n", &CsrGraph::n)
        .def_readonly("m", &CsrGraph::m)
        .def_readonly("max_degree", &CsrGraph::max_degree)
        .def("degree", &CsrGraph::degree, py::arg("u"))
        .def("neighbors",
             [](const CsrGraph& g, Vertex u) {
                 auto s = g.neighbors(u);
                 return std::vector<Vertex>(s.begin(), s.end());
             },
             py::arg("u"))
        .def("__repr__", [](const CsrGraph& g) {
            return "CsrGraph(n=" + std::to_string(g.n) + ", m=" + std::to_string(g.m) + ")";
        });

    m.def("from_edges", &graph_from_edges, py::arg("n"), py::arg("edges"));
    m.def("load_edge_list_text", &edge_list_from_text, py::arg("text"));
    m.def("load_dimacs_text", &dimacs_from_text, py::arg("text"));
    m.def("load_graph", &load_graph_file, py::arg("path"));
    m.def("save_csr_binary", &save_csr_binary, py::arg("graph"), py::arg("path"));
    m.def("check_invariants", &check_invariants, py::arg("graph"));

    py::class_<PriorityMap>(m, "PriorityMap")
        .def(py::init(&pm_from_list), py::arg("p"))
        .def_readonly("p", &PriorityMap::p)
        .def("__len__", &PriorityMap::size);
    m.def("precedes", &precedes, py::arg("pm"), py::arg("u"), py::arg("v"));
    m.def("sorted_by_priority", &sorted_by_priority, py::arg("pm"));

    m.def("order_ff", &order_ff, py::arg("graph"), py::arg("workers") = 1);
    m.def("order_lf", &order_lf, py::arg("graph"), py::arg("workers") = 1);
    m.def("order_sl", &order_sl, py::arg("graph"), py::arg("workers") = 1);
    m.def("order_id", &order_id, py::arg("graph"));
    m.def("order_sd", &order_sd, py::arg("graph"));

    py::class_<Coloring>(m, "Coloring")
        .def_readonly("c", &Coloring::c)
        .def_readonly("num_colors", &Coloring::num_colors)
        .def_readonly("max_color_multiplicity", &Coloring::max_color_multiplicity);
    m.def("greedy_color", &greedy_color, py::arg("graph"), py::arg("pm"));
    m.def("jp_color", &jp_color, py::arg("graph"), py::arg("pm"), py::arg("workers") = 1);
    m.def("culberson_recolor", &culberson_recolor, py::arg("graph"), py::arg("prev"));
    m.def("validate", &validate, py::arg("graph"), py::arg("coloring"));

    py::class_<GnnLayer>(m, "GnnLayer")
        .def_readonly("d_in", &GnnLayer::d_in)
        .def_readonly("d_out", &GnnLayer::d_out)
        .def_readwrite("W", &GnnLayer::W)
        .def_readwrite("b", &GnnLayer::b);
    py::class_<GnnModel>(m, "GnnModel")
        .def_readwrite("layers", &GnnModel::layers)
        .def("num_params", &GnnModel::num_params);
    m.def("save_model", &save_model, py::arg("model"), py::arg("path"));
    m.def("load_model", &load_model, py::arg("path"));
    m.def("infer_priorities",
          [](const CsrGraph& g, const GnnModel& model, int workers) {
              return infer_priorities(g, model, workers);
          },
          py::arg("graph"), py::arg("model"), py::arg("workers") = 1);

    m.def("make_labels",
          [](const CsrGraph& g, const std::string& source) {
              return make_labels(g, label_source(source)).labels;
          },
          py::arg("graph"), py::arg("source"));
    m.def("predict_edge", &predict_edge, py::arg("model"), py::arg("graph"), py::arg("u"),
          py::arg("v"));
    m.def("bce_loss",
          [](const std::vector<double>& preds, const std::vector<std::uint8_t>& labels) {
              return bce_loss(preds, labels);
          },
          py::arg("predictions"), py::arg("labels"));
    m.def("f1_score",
          [](const std::vector<double>& preds, const std::vector<std::uint8_t>& labels) {
              return f1_score(preds, labels);
          },
          py::arg("predictions"), py::arg("labels"));

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("layers", &TrainConfig::layers)
        .def_property(
            "source",
            [](const TrainConfig& cfg) {
                switch (cfg.source) {
                case LabelSource::SL: return "sl";
                case LabelSource::SD: return "sd";
                default: return "lf";
                }
            },
            [](TrainConfig& cfg, const std::string& s) { cfg.source = label_source(s); });
    py::class_<EpochMetrics>(m, "EpochMetrics")
        .def_readonly("epoch", &EpochMetrics::epoch)
        .def_readonly("loss", &EpochMetrics::loss)
        .def_readonly("f1", &EpochMetrics::f1)
        .def_readonly("holdout_colors", &EpochMetrics::holdout_colors);
    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("model", &TrainResult::model)
        .def_readonly("history", &TrainResult::history);
    m.def("parameter_init", &parameter_init, py::arg("config"));
    m.def("train_supervised",
          [](const std::vector<CsrGraph>& train, const std::vector<CsrGraph>& holdout,
             const TrainConfig& cfg) { return train_supervised(train, holdout, cfg); },
          py::arg("train_graphs"), py::arg("holdout_graphs"), py::arg("config"));

    py::class_<Fitness>(m, "Fitness")
        .def_readonly("colors", &Fitness::colors)
        .def_readonly("top_multiplicity", &Fitness::top_multiplicity);
    py::class_<EvolveConfig>(m, "EvolveConfig")
        .def(py::init<>())
        .def_readwrite("population", &EvolveConfig::population)
        .def_readwrite("truncation", &EvolveConfig::truncation)
        .def_readwrite("generations", &EvolveConfig::generations)
        .def_readwrite("seed", &EvolveConfig::seed)
        .def_readwrite("sigma", &EvolveConfig::sigma)
        .def_readwrite("workers", &EvolveConfig::workers);
    py::class_<GenerationRecord>(m, "GenerationRecord")
        .def_readonly("generation", &GenerationRecord::generation)
        .def_readonly("best", &GenerationRecord::best);
    py::class_<Individual>(m, "Individual")
        .def_readonly("model", &Individual::model)
        .def_readonly("fit", &Individual::fit);
    py::class_<EvolveResult>(m, "EvolveResult")
        .def_readonly("best", &EvolveResult::best)
        .def_readonly("history", &EvolveResult::history);
    m.def("fitness",
          [](const GnnModel& model, const std::vector<CsrGraph>& graphs, int workers) {
              return fitness(model, graphs, workers);
          },
          py::arg("model"), py::arg("graphs"), py::arg("workers") = 1);
    m.def("evolve",
          [](std::vector<GnnModel> initial, const std::vector<CsrGraph>& graphs,
             const EvolveConfig& cfg) { return evolve(std::move(initial), graphs, cfg); },
          py::arg("initial"), py::arg("graphs"), py::arg("config"));
}
