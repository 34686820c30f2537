"""Deterministic discrete-event simulator.

Single-threaded event loop over a Topology: timed broadcast/unicast frame
delivery, per-node timers, scripted link breaks, and a full event trace.
Identical (topology, seed, behavior script) always reproduces the
identical trace; ties at equal timestamps break FIFO by insertion order.
"""

from __future__ import annotations

import heapq
import math
import random
from typing import Any, Dict, List, Optional, Tuple

from .errors import UnknownLink, UnknownNode
from .topology import Topology

MAX_EVENTS_DEFAULT = 1_000_000


class NodeBehavior:
    """Per-node handler hooks; honest behaviors are pure given node state."""

    def on_frame(self, sim: "Simulator", node: str, sender: str, frame: bytes, clock) -> None:
        pass

    def on_timer(self, sim: "Simulator", node: str, tag: Any, clock) -> None:
        pass


class Simulator:
    def __init__(self, topo: Topology, seed: int = 0):
        self.topo = topo
        self.clock = 0
        self.rng = random.Random(seed)
        self.behaviors: Dict[str, NodeBehavior] = {}
        self.trace: List[Dict[str, Any]] = []
        self._queue: List[Tuple[Any, int, str, tuple]] = []
        self._seq = 0
        self._breaks: Dict[frozenset, Any] = {}  # link -> break time

    def install(self, node: str, behavior: NodeBehavior) -> None:
        if node not in self.topo.nodes:
            raise UnknownNode(node)
        self.behaviors[node] = behavior

    def log(self, ev: str, **fields) -> None:
        entry = {"t": self.clock, "ev": ev}
        entry.update(fields)
        self.trace.append(entry)

    def log_drop(self, node: str, reason: str, **detail) -> None:
        self.log("drop", node=node, reason=reason, **detail)

    # -- scheduling ----------------------------------------------------

    def _push(self, at, kind: str, payload: tuple) -> None:
        heapq.heappush(self._queue, (at, self._seq, kind, payload))
        self._seq += 1

    def _link_up(self, a: str, b: str) -> bool:
        broken_at = self._breaks.get(frozenset((a, b)))
        return broken_at is None or self.clock < broken_at

    def _delivery_time(self, a: str, b: str, frame: bytes):
        link = self.topo.link(a, b)
        tx = math.ceil(len(frame) * 8 / (link.avl_bw * 1000.0))  # bw Mb/s = 1000 bits/ms
        return self.clock + link.nw_delay + tx

    def broadcast(self, sender: str, frame: bytes) -> int:
        """Schedule one delivery per unbroken adjacent link; returns fan-out."""
        if sender not in self.topo.nodes:
            raise UnknownNode(sender)
        sent = 0
        for neighbor in sorted(self.topo.rdn(sender)):
            sent += self._send_one(sender, neighbor, frame)
        self.log("send", node=sender, kind="broadcast", n=sent, size=len(frame))
        return sent

    def unicast(self, sender: str, to: str, frame: bytes) -> bool:
        if sender not in self.topo.nodes:
            raise UnknownNode(sender)
        if not self.topo.has_link(sender, to):
            self.log("send", node=sender, kind="unicast", to=to, n=0, size=len(frame))
            return False
        ok = bool(self._send_one(sender, to, frame))
        self.log("send", node=sender, kind="unicast", to=to, n=int(ok), size=len(frame))
        return ok

    def _send_one(self, sender: str, to: str, frame: bytes) -> int:
        if not self._link_up(sender, to):
            self.log("suppress", node=sender, to=to)
            return 0
        self._push(self._delivery_time(sender, to, frame), "deliver", (sender, to, frame))
        return 1

    def set_timer(self, node: str, delay, tag: Any) -> None:
        self._push(self.clock + delay, "timer", (node, tag))

    def break_link(self, a: str, b: str, at) -> None:
        key = frozenset((a, b))
        if key not in self.topo.links:
            raise UnknownLink("%s-%s" % (a, b))
        self._breaks[key] = at

    # -- event loop ----------------------------------------------------

    def run_until(self, stop: Optional[float] = None, max_events: int = MAX_EVENTS_DEFAULT):
        """Process events until quiescence, the stop time, or the budget.

        Returns the trace.  A truncation marker is appended if the budget
        runs out before quiescence.
        """
        processed = 0
        while self._queue:
            at, _, kind, payload = self._queue[0]
            if stop is not None and at > stop:
                break
            if processed >= max_events:
                self.log("truncated", budget=max_events)
                break
            heapq.heappop(self._queue)
            self.clock = at
            processed += 1
            if kind == "deliver":
                sender, to, frame = payload
                self.log("deliver", node=to, sender=sender, size=len(frame))
                behavior = self.behaviors.get(to)
                if behavior is not None:
                    behavior.on_frame(self, to, sender, frame, self.clock)
            elif kind == "timer":
                node, tag = payload
                self.log("timer", node=node, tag=repr(tag))
                behavior = self.behaviors.get(node)
                if behavior is not None:
                    behavior.on_timer(self, node, tag, self.clock)
        return self.trace
