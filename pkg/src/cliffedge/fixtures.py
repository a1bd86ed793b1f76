"""Built-in example nets.

``RUN``
    eight places, nine transitions; two independent binary choices decide
    whether the run loops back through ``kappa`` or falls into ``{p8}``.
``FAIR``
    two local loops (``a``/``b`` and ``c``/``d``) and a synchronising exit
    ``x`` into the fixed point ``{A}``.
``CONF``
    acyclic net whose unfolding is the net itself; used for decisional height.
``RACE``
    acyclic net where doom is decided by a race between concurrent events.
"""

from .net import PetriNet

RUN_TRANSITION_ORDER = ("alpha", "beta", "gamma", "delta", "zeta", "eta", "theta", "xi", "kappa")


def run_net() -> PetriNet:
    arcs = {
        "alpha": (["p1"], ["p3"]),
        "beta": (["p1"], ["p4"]),
        "gamma": (["p2"], ["p5"]),
        "delta": (["p2"], ["p6"]),
        "zeta": (["p4", "p5"], ["p7"]),
        "eta": (["p4", "p6"], ["p8"]),
        "theta": (["p3", "p6"], ["p7"]),
        "xi": (["p3", "p5"], ["p8"]),
        "kappa": (["p7"], ["p1", "p2"]),
    }
    return PetriNet.build(
        [f"p{i}" for i in range(1, 9)],
        {t: arcs[t] for t in RUN_TRANSITION_ORDER},
        ["p1", "p2"],
    )


def fair_net() -> PetriNet:
    return PetriNet.build(
        ["p1", "p2", "p3", "p4", "A"],
        {
            "a": (["p3"], ["p1"]),
            "b": (["p1"], ["p3"]),
            "c": (["p4"], ["p2"]),
            "d": (["p2"], ["p4"]),
            "x": (["p3", "p4"], ["A"]),
        },
        ["p1", "p2"],
    )


def conf_net() -> PetriNet:
    return PetriNet.build(
        [f"b{i}" for i in range(1, 9)],
        {
            "x": (["b1"], ["b3"]),
            "y": (["b2"], ["b4"]),
            "z": (["b2"], ["b5"]),
            "alpha": (["b3"], ["b6"]),
            "beta": (["b3", "b4"], ["b7"]),
            "gamma": (["b4"], ["b8"]),
        },
        ["b1", "b2"],
    )


def race_net() -> PetriNet:
    return PetriNet.build(
        [f"b{i}" for i in range(1, 8)],
        {
            "x": (["b1"], ["b3"]),
            "y": (["b2"], ["b4"]),
            "alpha": (["b3"], ["b5"]),
            "beta": (["b3", "b4"], ["b6"]),
            "gamma": (["b4"], ["b7"]),
        },
        ["b1", "b2"],
    )


# bad markings used with the fixtures throughout
RUN_BAD = (("p8",),)
FAIR_BAD = (("A",),)
RACE_BAD = (("b5", "b7"),)

FIXTURES = {
    "run": (run_net, RUN_BAD),
    "fair": (fair_net, FAIR_BAD),
    "conf": (conf_net, ()),
    "race": (race_net, RACE_BAD),
}
