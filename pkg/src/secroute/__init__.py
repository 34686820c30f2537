"""Secure route discovery over dynamic source routing, with cost-driven
route selection and maintenance, broadcast-encryption key distribution,
broker/cloud handshakes, and a deterministic simulation harness."""

from . import cost, crypto, frames, harness, kdc, oracle, session, sim, srdp, topology
from .errors import SecrouteError

__all__ = [
    "cost",
    "crypto",
    "frames",
    "harness",
    "kdc",
    "oracle",
    "session",
    "sim",
    "srdp",
    "topology",
    "SecrouteError",
]
