"""Long-run fate analysis of safe Petri nets via unfoldings."""

from .doom import (
    BadSpec,
    DoomStatus,
    MinDooResult,
    classify_marking,
    close_bad,
    free_check,
    is_bad,
    is_unchallenged,
    min_bad_configs,
    min_doo,
    ridges_witnessed,
    shave,
    wreath,
)
from .errors import AnalysisLimitError, CliffedgeError, InputError
from .net import (
    Attractor,
    FairnessTrace,
    PetriNet,
    ReachabilityGraph,
    RoundRobin,
    Scripted,
    attractor_distance,
    attractors,
    basin,
    build_reachability_graph,
    enabled,
    fire,
    is_situation_fair,
    net_distance,
    simulate,
)
from .oracle import oracle_classify, oracle_loops, oracle_mindoo, oracle_ridges
from .pep import emit_pep, parse_bad, parse_pep
from .protect import (
    SAFE,
    Finite,
    HeightMode,
    Safe,
    dheight,
    dheight_order,
    dheight_order_key,
    mindoo_extensions,
    protectedness,
    strict_opponents,
)
from .unfold import (
    Configuration,
    CutoffPolicy,
    DheightOrder,
    ErvTotalOrder,
    Prefix,
    SubsetOrder,
    causal,
    compare,
    concurrent,
    cone,
    crest,
    cut,
    direct_conflict,
    enabled_events,
    enumerate_configurations,
    in_conflict,
    is_configuration,
    mark,
    stump,
    unfold,
)

__version__ = "0.1.0"
