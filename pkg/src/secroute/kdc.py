"""Key distribution: pooled broadcast-encryption keys, per-node rings,
pairwise keys, and revocation-aware secret broadcasts.

The KDC holds a pool of k keys.  Each node is publicly mapped to m pool
indices; its decryption secrets are the pool keys at those indices, and
its encryption secrets are per-node hashes of every pool key.  A node can
broadcast a secret readable by everyone except a revoked set by sealing
it under the encryption secrets whose indices no revoked node holds.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Sequence, Tuple

from . import crypto
from .crypto import SealedBox, hash_bytes, mac, open_box, seal
from .errors import (
    AuthFailure,
    BadParams,
    DuplicateNode,
    EmptyCover,
    NoUsableIndex,
    SelfPair,
    TagMismatch,
)


@dataclass(frozen=True)
class KdcParams:
    k: int
    m: int
    master_seed: bytes


@dataclass(frozen=True)
class KeyPool:
    keys: Tuple[bytes, ...]  # K_1..K_k, index 1-based externally

    def key(self, index: int) -> bytes:
        return self.keys[index - 1]


@dataclass
class NodeKeyRing:
    """All secret material issued to one node."""

    node: str
    indices: List[int]
    decryption_secrets: List[bytes]  # pool keys at `indices`
    encryption_secrets: List[bytes]  # hash(K_j || node) for every j in [1,k]
    rdn_group_key: bytes  # shared with the node's one-hop neighborhood
    broadcast_secret: bytes  # confined from the one-hop neighborhood

    def encryption_secret(self, index: int) -> bytes:
        return self.encryption_secrets[index - 1]


@dataclass(frozen=True)
class BroadcastMessage:
    """Secret sealed for everyone outside the revoked set."""

    revoked: FrozenSet[str]
    cover_indices: Tuple[int, ...]
    envelopes: Tuple[SealedBox, ...]
    tag: bytes


class PairwiseKeyService:
    """Derives a shared secret for any unordered node pair."""

    def __init__(self, root: bytes):
        self._root = root

    def pairwise_key(self, a: str, b: str) -> bytes:
        if a == b:
            raise SelfPair("no pairwise key for a node with itself")
        lo, hi = sorted((a, b))
        return mac(self._root, [b"pairwise", lo.encode(), hi.encode()])


def setup(k: int, m: int, seed: bytes) -> Tuple[KdcParams, KeyPool, PairwiseKeyService]:
    """Derive the key pool and pairwise-key root deterministically from seed."""
    if k <= 0 or m < 1 or m >= k or k > 4096:
        raise BadParams("require 1 <= m < k <= 4096, got k=%d m=%d" % (k, m))
    params = KdcParams(k=k, m=m, master_seed=bytes(seed))
    keys = tuple(
        mac(params.master_seed, [b"pool", i.to_bytes(4, "big")]) for i in range(1, k + 1)
    )
    svc = PairwiseKeyService(mac(params.master_seed, [b"pairwise-root"]))
    return params, KeyPool(keys), svc


def index_set(params: KdcParams, node: str) -> List[int]:
    """Public mapping from node id to its m pool indices (1-based).

    Takes the first m distinct values of hash(node || counter) mod k.
    Needs no secrets, so any node can compute any other node's indices.
    """
    if not node:
        raise ValueError("node id must be nonempty")
    out: List[int] = []
    seen = set()
    counter = 0
    while len(out) < params.m:
        h = hash_bytes(node.encode() + counter.to_bytes(4, "big"))
        idx = int.from_bytes(h[:8], "big") % params.k + 1
        if idx not in seen:
            seen.add(idx)
            out.append(idx)
        counter += 1
    return out


class Kdc:
    """Issues key rings; refuses to issue the same node twice."""

    def __init__(self, params: KdcParams, pool: KeyPool):
        self.params = params
        self.pool = pool
        self._issued: Dict[str, NodeKeyRing] = {}

    def issue(self, node: str) -> NodeKeyRing:
        if node in self._issued:
            raise DuplicateNode(node)
        params = self.params
        indices = index_set(params, node)
        node_master = mac(params.master_seed, [b"node", node.encode()])
        ring = NodeKeyRing(
            node=node,
            indices=indices,
            decryption_secrets=[self.pool.key(i) for i in indices],
            encryption_secrets=[
                hash_bytes(self.pool.key(j) + node.encode()) for j in range(1, params.k + 1)
            ],
            rdn_group_key=mac(node_master, [b"rdn-group"]),
            broadcast_secret=mac(node_master, [b"broadcast-secret"]),
        )
        self._issued[node] = ring
        return ring


def cover_indices(params: KdcParams, revoked: Sequence[str]) -> List[int]:
    """All pool indices held by no revoked node."""
    held = set()
    for node in revoked:
        held.update(index_set(params, node))
    cover = [i for i in range(1, params.k + 1) if i not in held]
    if not cover:
        raise EmptyCover("revoked nodes jointly hold all %d indices" % params.k)
    return cover


def _broadcast_tag(secret: bytes, revoked: Sequence[str], envelopes: Sequence[SealedBox]) -> bytes:
    parts = [b"broadcast-tag"]
    parts.extend(n.encode() for n in sorted(revoked))
    parts.extend(e.to_bytes() for e in envelopes)
    return mac(secret, parts)


def build_broadcast(
    ring: NodeKeyRing, secret: bytes, revoked: Sequence[str], params: KdcParams
) -> BroadcastMessage:
    """Seal `secret` once per cover index under the sender's encryption secrets."""
    cover = cover_indices(params, revoked)
    envelopes = tuple(seal(ring.encryption_secret(i), secret) for i in cover)
    return BroadcastMessage(
        revoked=frozenset(revoked),
        cover_indices=tuple(cover),
        envelopes=envelopes,
        tag=_broadcast_tag(secret, sorted(revoked), envelopes),
    )


def open_broadcast(
    receiver: NodeKeyRing, msg: BroadcastMessage, sender: str, params: KdcParams
) -> bytes:
    """Recover the broadcast secret using any pool key the cover includes.

    Verifies the broadcast tag with the recovered secret before returning it.
    """
    by_index = dict(zip(msg.cover_indices, msg.envelopes))
    usable = [i for i in receiver.indices if i in by_index]
    if not usable:
        raise NoUsableIndex(receiver.node)
    secret = None
    for i in usable:
        # Receiver reconstructs the sender's encryption secret from its own
        # pool key; a tampered envelope just fails authentication.
        k_pool = receiver.decryption_secrets[receiver.indices.index(i)]
        try:
            secret = open_box(hash_bytes(k_pool + sender.encode()), by_index[i])
            break
        except AuthFailure:
            continue
    if secret is None:
        raise TagMismatch("no envelope authenticated")
    if _broadcast_tag(secret, sorted(msg.revoked), msg.envelopes) != msg.tag:
        raise TagMismatch("broadcast tag mismatch")
    return secret


def coverage_estimate(k: int, m: int, r: int, trials: int, seed: int) -> float:
    """Monte Carlo probability that a random non-revoked node can open a
    broadcast excluding r random revoked nodes."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    params, pool, _ = setup(k, m, b"\x00" * 32)
    rng = random.Random(seed)
    hits = 0
    for t in range(trials):
        revoked = ["rev-%d-%d" % (t, j) for j in range(r)]
        receiver = "rcv-%d-%d" % (rng.getrandbits(32), t)
        try:
            cover = set(cover_indices(params, revoked))
        except EmptyCover:
            continue
        if set(index_set(params, receiver)) & cover:
            hits += 1
    return hits / trials
