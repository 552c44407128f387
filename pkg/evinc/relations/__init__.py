"""
Максимально монотонные отношения, заданные резольвентой
"""
from evinc.relations.base import MonotoneRelation, RelationSplit, ValueSet
from evinc.relations.catalog import (
    RELATION_REGISTRY,
    BallSaturation,
    DeviatoricSaturation,
    LinearRelation,
    SoftThreshold,
    ZeroRelation,
    build_relation,
    identity_relation,
)
from evinc.relations.combinators import (
    DirectSumRelation,
    LiftedRelation,
    LipschitzSum,
    NodewiseRelation,
    SlotRelation,
    YosidaRelation,
)
from evinc.relations.operations import (
    MintyReport,
    lift,
    minty_scan,
    resolvent,
    sum_with_lipschitz,
    yosida,
)
from evinc.relations.stationary import solve_stationary

__all__ = [
    "MonotoneRelation",
    "RelationSplit",
    "ValueSet",
    "RELATION_REGISTRY",
    "BallSaturation",
    "DeviatoricSaturation",
    "LinearRelation",
    "SoftThreshold",
    "ZeroRelation",
    "build_relation",
    "identity_relation",
    "DirectSumRelation",
    "LiftedRelation",
    "LipschitzSum",
    "NodewiseRelation",
    "SlotRelation",
    "YosidaRelation",
    "MintyReport",
    "lift",
    "minty_scan",
    "resolvent",
    "sum_with_lipschitz",
    "yosida",
    "solve_stationary",
]
