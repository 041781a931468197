"""Parallel graph coloring toolkit.

Greedy ordering heuristics (FF, LF, SL, ID, SD), Jones-Plassmann parallel
coloring, Culberson repeated recoloring, and a GraphSAGE-based ordering
heuristic with supervised and genetic training. The heavy lifting lives in
the compiled `_gnncol` extension; this package just re-exports it.
"""

from _gnncol import (  # noqa: F401
    Coloring,
    CsrGraph,
    EpochMetrics,
    EvolveConfig,
    EvolveResult,
    Fitness,
    GenerationRecord,
    GnnLayer,
    GnnModel,
    Individual,
    ParseError,
    PriorityMap,
    TrainConfig,
    TrainError,
    TrainResult,
    bce_loss,
    check_invariants,
    culberson_recolor,
    evolve,
    f1_score,
    fitness,
    from_edges,
    greedy_color,
    infer_priorities,
    jp_color,
    load_dimacs_text,
    load_edge_list_text,
    load_graph,
    load_model,
    make_labels,
    order_ff,
    order_id,
    order_lf,
    order_sd,
    order_sl,
    parameter_init,
    precedes,
    predict_edge,
    save_csr_binary,
    save_model,
    sorted_by_priority,
    train_supervised,
    validate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
