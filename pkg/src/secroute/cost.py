"""Multi-metric path cost and route selection.

Cost accumulates per link from hop count, bandwidth, and delay under
nonnegative weights.  Selection runs in one of seven modes, each keyed to
a single metric or metric product, with a fixed tie-break ladder:
primary objective, then maximum hop*bandwidth*delay product, then maximum
bandwidth-delay-product upper bound, then lexicographically smallest path.
Route maintenance watches the installed route's bandwidth-delay product
and neighbor liveness.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Sequence, Tuple

from .errors import MissingEdge, NoCandidates, NonpositiveBandwidth


@dataclass(frozen=True)
class Weights:
    alpha: float = 1.0  # hop count
    beta: float = 0.1  # bandwidth
    gamma: float = 1.0  # delay


class Mode(enum.Enum):
    HC = "hc"
    BW = "bw"
    ND = "nd"
    HC_BW = "hc_bw"
    BW_ND = "bw_nd"
    HC_ND = "hc_nd"
    HC_BW_ND = "hc_bw_nd"


# Which weight components each mode keeps active.
_MODE_MASK = {
    Mode.HC: (True, False, False),
    Mode.BW: (False, True, False),
    Mode.ND: (False, False, True),
    Mode.HC_BW: (True, True, False),
    Mode.BW_ND: (False, True, True),
    Mode.HC_ND: (True, False, True),
    Mode.HC_BW_ND: (True, True, True),
}


def weights_for_mode(mode: Mode, base: Weights = Weights()) -> Weights:
    a, b, g = _MODE_MASK[mode]
    return Weights(
        alpha=base.alpha if a else 0.0,
        beta=base.beta if b else 0.0,
        gamma=base.gamma if g else 0.0,
    )


def path_cost_step(
    prev: float, link_bw: float, link_delay: float, w: Weights, literal: bool = False
) -> float:
    """One link's cost increment.

    By default the bandwidth term is the reciprocal 1/bw (in Mb/s), so
    minimizing cost prefers fast links.  With literal=True the bandwidth
    value itself is added, which penalizes fast links; kept for
    comparison runs.
    """
    if link_bw <= 0:
        raise NonpositiveBandwidth(str(link_bw))
    bw_term = link_bw if literal else 1.0 / link_bw
    return prev + w.alpha * 1.0 + w.beta * bw_term + w.gamma * link_delay


@dataclass(frozen=True)
class PathMetrics:
    hc: int  # hop count
    bw: float  # bottleneck bandwidth, Mb/s
    nd: float  # total delay, ms


@dataclass
class CostMatrices:
    """Per-edge hop/bandwidth/delay tables over the topology's edges."""

    m_hc: Dict[FrozenSet[str], float]
    m_bw: Dict[FrozenSet[str], float]
    m_nd: Dict[FrozenSet[str], float]

    @classmethod
    def from_topology(cls, topo) -> "CostMatrices":
        m_hc, m_bw, m_nd = {}, {}, {}
        for key, link in topo.links.items():
            m_hc[key] = 1.0
            m_bw[key] = link.avl_bw
            m_nd[key] = link.nw_delay
        return cls(m_hc, m_bw, m_nd)


def aggregate(path: Sequence[str], matrices: CostMatrices) -> PathMetrics:
    """Hop count, bottleneck bandwidth, total delay along a node sequence."""
    if len(path) < 2:
        raise MissingEdge("path needs at least one edge")
    bws, nds = [], []
    for a, b in zip(path, path[1:]):
        key = frozenset((a, b))
        if key not in matrices.m_bw:
            raise MissingEdge("%s-%s" % (a, b))
        bws.append(matrices.m_bw[key])
        nds.append(matrices.m_nd[key])
    return PathMetrics(hc=len(path) - 1, bw=min(bws), nd=sum(nds))


def products(m: PathMetrics) -> Tuple[float, float, float, float, float]:
    """(hbp, bdp, hdp, hbdp, bdp_ub) metric products for tie-breaking."""
    hbp = m.hc * m.bw
    bdp = m.bw * m.nd
    hdp = m.hc * m.nd
    hbdp = m.hc * m.bw * m.nd
    bdp_ub = m.bw * m.nd  # bottleneck bandwidth x end-to-end delay
    return hbp, bdp, hdp, hbdp, bdp_ub


Candidate = Tuple[Sequence[str], float, PathMetrics]


def selection_key(candidate: Candidate, mode: Mode) -> tuple:
    """Sort key whose minimum is the selected candidate.

    Tuple order: primary objective, max HBDP, max BDP-UB, lexicographic
    path.  Maximized quantities are negated.
    """
    path, path_cost, m = candidate
    hbp, bdp, hdp, hbdp, bdp_ub = products(m)
    primary = {
        Mode.HC: m.hc,
        Mode.BW: -m.bw,
        Mode.ND: m.nd,
        Mode.HC_BW: -hbp,
        Mode.BW_ND: -bdp,
        Mode.HC_ND: hdp,
        Mode.HC_BW_ND: path_cost,
    }[mode]
    return (primary, -hbdp, -bdp_ub, tuple(path))


def select_route(candidates: Sequence[Candidate], mode: Mode) -> Sequence[str]:
    if not candidates:
        raise NoCandidates()
    return min(candidates, key=lambda c: selection_key(c, mode))[0]


# -- route maintenance ------------------------------------------------

LINK_BREAK = 1
BDP_DEGRADE = 2


class MonitorAction(enum.Enum):
    KEEP = "keep"
    SEND_REP = "send_rep"
    REDISCOVER = "rediscover"


@dataclass
class MonitorState:
    route: Sequence[str]
    last_bdp: float
    interval: float = 100.0  # ms
    epsilon: float = 0.1  # relative BDP decrease tolerated


def monitor(state: MonitorState, neighbor_responsive: bool, current_bdp: float):
    """One interval-boundary check of the installed route.

    Returns (action, error_code).  An unresponsive neighbor outranks a
    BDP drop; a drop beyond epsilon triggers rediscovery.
    """
    if not neighbor_responsive:
        return MonitorAction.SEND_REP, LINK_BREAK
    if current_bdp < (1.0 - state.epsilon) * state.last_bdp:
        return MonitorAction.REDISCOVER, BDP_DEGRADE
    state.last_bdp = current_bdp
    return MonitorAction.KEEP, None
