"""Wire format for the four frame types.

Layout: 1-byte frame type (1=RREQ, 2=RREP, 3=REP, 4=SESSION), big-endian
fixed-width header fields, 2-byte length-prefixed variable sections, and
sealed boxes as nonce||body||tag.  decode_frame never raises anything but
MalformedFrame on arbitrary input.  See docs/wire-format.md for the
byte-layout tables.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .crypto import DIGEST_LEN, NONCE_LEN, TAG_LEN, SealedBox
from .errors import MalformedFrame

FRAME_RREQ = 1
FRAME_RREP = 2
FRAME_REP = 3
FRAME_SESSION = 4


# -- primitives --------------------------------------------------------


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.data):
            raise MalformedFrame("truncated")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u8(self) -> int:
        return self.take(1)[0]

    def u16(self) -> int:
        return struct.unpack(">H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack(">I", self.take(4))[0]

    def f64(self) -> float:
        return struct.unpack(">d", self.take(8))[0]

    def blob(self) -> bytes:
        return self.take(self.u16())

    def text(self) -> str:
        try:
            return self.blob().decode("utf-8")
        except UnicodeDecodeError:
            raise MalformedFrame("bad utf-8") from None

    def done(self) -> None:
        if self.pos != len(self.data):
            raise MalformedFrame("trailing bytes")


def _u8(v: int) -> bytes:
    return struct.pack(">B", v)


def _u16(v: int) -> bytes:
    return struct.pack(">H", v)


def _u32(v: int) -> bytes:
    return struct.pack(">I", v)


def _f64(v: float) -> bytes:
    return struct.pack(">d", v)


def _blob(b: bytes) -> bytes:
    if len(b) > 0xFFFF:
        raise MalformedFrame("section too long")
    return _u16(len(b)) + b


def _text(s: str) -> bytes:
    return _blob(s.encode("utf-8"))


def _box(b: SealedBox) -> bytes:
    return _blob(b.to_bytes())


def _read_box(r: _Reader) -> SealedBox:
    raw = r.blob()
    if len(raw) < NONCE_LEN + TAG_LEN:
        raise MalformedFrame("sealed box too short")
    return SealedBox(raw[:NONCE_LEN], raw[NONCE_LEN:-TAG_LEN], raw[-TAG_LEN:])


def _path_bytes(path: Tuple[str, ...]) -> bytes:
    out = _u16(len(path))
    for n in path:
        out += _text(n)
    return out


def _read_path(r: _Reader) -> Tuple[str, ...]:
    return tuple(r.text() for _ in range(r.u16()))


# -- RREQ --------------------------------------------------------------


@dataclass(frozen=True)
class RreqImmutable:
    """Fields fixed for the whole discovery round."""

    s_addr: str
    s_seqno: int
    b_id: int
    d_addr: str
    d_seqno: int
    max_hops: int

    def to_bytes(self) -> bytes:
        return (
            _text(self.s_addr)
            + _u32(self.s_seqno)
            + _u32(self.b_id)
            + _text(self.d_addr)
            + _u32(self.d_seqno)
            + _u8(self.max_hops)
        )

    @classmethod
    def read(cls, r: _Reader) -> "RreqImmutable":
        return cls(r.text(), r.u32(), r.u32(), r.text(), r.u32(), r.u8())

    def round_id(self) -> Tuple[str, int, int]:
        return (self.s_addr, self.s_seqno, self.b_id)


@dataclass
class RreqMutable:
    """Fields every relay revises; ride in the clear, unauthenticated."""

    hop_count: int = 0
    path_cost: float = 0.0
    hc: int = 0
    bw: float = 0.0  # bottleneck so far, Mb/s; 0 before the first hop
    nd: float = 0.0  # summed delay so far, ms

    def to_bytes(self) -> bytes:
        return _u8(self.hop_count) + _f64(self.path_cost) + _u16(self.hc) + _f64(self.bw) + _f64(self.nd)

    @classmethod
    def read(cls, r: _Reader) -> "RreqMutable":
        return cls(r.u8(), r.f64(), r.u16(), r.f64(), r.f64())


@dataclass(frozen=True)
class RreqBody:
    """Plaintext inside an RREQ's sealed section."""

    rreq: RreqImmutable
    path: Tuple[str, ...]
    mac_prev: Optional[bytes]  # absent only at the origin
    mac_curr: bytes
    h: bytes  # hash-chain value, advanced once per hop

    def to_bytes(self) -> bytes:
        out = self.rreq.to_bytes() + _path_bytes(self.path)
        out += _u8(1) + self.mac_prev if self.mac_prev is not None else _u8(0)
        return out + self.mac_curr + self.h

    @classmethod
    def from_bytes(cls, raw: bytes) -> "RreqBody":
        r = _Reader(raw)
        rreq = RreqImmutable.read(r)
        path = _read_path(r)
        mac_prev = r.take(DIGEST_LEN) if r.u8() else None
        body = cls(rreq, path, mac_prev, r.take(DIGEST_LEN), r.take(DIGEST_LEN))
        r.done()
        return body


@dataclass(frozen=True)
class RreqPacket:
    sender_addr: str
    sender_seqno: int
    b_id: int
    mutable: RreqMutable
    sealed: SealedBox


# -- RREP --------------------------------------------------------------


@dataclass(frozen=True)
class RrepInfo:
    """Route reply contents: the round identity plus the selected path."""

    s_addr: str
    s_seqno: int
    d_addr: str
    d_seqno: int
    route: Tuple[str, ...]  # intermediate nodes, source->destination order

    def to_bytes(self) -> bytes:
        return (
            _text(self.s_addr)
            + _u32(self.s_seqno)
            + _text(self.d_addr)
            + _u32(self.d_seqno)
            + _path_bytes(self.route)
        )

    @classmethod
    def read(cls, r: _Reader) -> "RrepInfo":
        return cls(r.text(), r.u32(), r.text(), r.u32(), _read_path(r))


@dataclass(frozen=True)
class RrepBody:
    rrep: RrepInfo
    q: bytes  # reverse-path hash chain value
    mac_prev: Optional[bytes]
    mac_curr: Optional[bytes]  # absent once no verifier is two hops ahead

    def to_bytes(self) -> bytes:
        out = self.rrep.to_bytes() + self.q
        out += _u8(1) + self.mac_prev if self.mac_prev is not None else _u8(0)
        out += _u8(1) + self.mac_curr if self.mac_curr is not None else _u8(0)
        return out

    @classmethod
    def from_bytes(cls, raw: bytes) -> "RrepBody":
        r = _Reader(raw)
        rrep = RrepInfo.read(r)
        q = r.take(DIGEST_LEN)
        mac_prev = r.take(DIGEST_LEN) if r.u8() else None
        mac_curr = r.take(DIGEST_LEN) if r.u8() else None
        body = cls(rrep, q, mac_prev, mac_curr)
        r.done()
        return body


@dataclass(frozen=True)
class RrepPacket:
    sender_addr: str
    sender_seqno: int
    sealed: SealedBox


# -- REP (route error) -------------------------------------------------


@dataclass(frozen=True)
class RepPacket:
    s_addr: str
    s_seqno: int
    d_addr: str
    d_seqno: int
    sealed_code: SealedBox  # 1-byte error code under the source-dest key
    route: Tuple[str, ...]


# -- session -----------------------------------------------------------


@dataclass(frozen=True)
class SessionFrame:
    """Handshake message: 1-byte step tag plus an opaque payload."""

    sender_addr: str
    step: int
    payload: bytes


# -- top-level codec ---------------------------------------------------


def encode_frame(packet) -> bytes:
    if isinstance(packet, RreqPacket):
        return (
            _u8(FRAME_RREQ)
            + _text(packet.sender_addr)
            + _u32(packet.sender_seqno)
            + _u32(packet.b_id)
            + packet.mutable.to_bytes()
            + _box(packet.sealed)
        )
    if isinstance(packet, RrepPacket):
        return _u8(FRAME_RREP) + _text(packet.sender_addr) + _u32(packet.sender_seqno) + _box(packet.sealed)
    if isinstance(packet, RepPacket):
        return (
            _u8(FRAME_REP)
            + _text(packet.s_addr)
            + _u32(packet.s_seqno)
            + _text(packet.d_addr)
            + _u32(packet.d_seqno)
            + _box(packet.sealed_code)
            + _path_bytes(packet.route)
        )
    if isinstance(packet, SessionFrame):
        return _u8(FRAME_SESSION) + _text(packet.sender_addr) + _u8(packet.step) + _blob(packet.payload)
    raise MalformedFrame("unknown packet type %r" % type(packet).__name__)


def decode_frame(raw: bytes):
    if not raw:
        raise MalformedFrame("empty")
    try:
        r = _Reader(raw)
        ftype = r.u8()
        if ftype == FRAME_RREQ:
            pkt = RreqPacket(r.text(), r.u32(), r.u32(), RreqMutable.read(r), _read_box(r))
        elif ftype == FRAME_RREP:
            pkt = RrepPacket(r.text(), r.u32(), _read_box(r))
        elif ftype == FRAME_REP:
            pkt = RepPacket(r.text(), r.u32(), r.text(), r.u32(), _read_box(r), _read_path(r))
        elif ftype == FRAME_SESSION:
            pkt = SessionFrame(r.text(), r.u8(), r.blob())
        else:
            raise MalformedFrame("unknown frame type %d" % ftype)
        r.done()
        return pkt
    except MalformedFrame:
        raise
    except Exception as exc:  # any structural failure is a malformed frame
        raise MalformedFrame(str(exc)) from None
