"""Incremental variable-rate distributed coding with a feedback ACK.

Both encoders announce their phrase count in a short header, then stream
the binary expansion of their block's position inside a shared, seeded
permutation of its phrase-count class.  After every channel use the
decoder scans all pairs consistent with the received position prefixes,
compares an empirical-correlation metric against a shrinking threshold,
and fires a one-bit ACK when some pair passes.  An encoder also stops on
its own once everything it can usefully send is out.

The protocol length of a class with phrase count ``c`` is
``ceil(c*log2 c)`` bits (the unnormalized complexity); the concrete
codec length and the exact position length are recorded in every trace
alongside it.  The per-use transmitted bits are capped by the position
length and the codec-length stop rule, whichever binds first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

from .errors import EmptyClassError, InvalidParamsError, ScaleExceededError
from .lzcodec import plain_code_length
from .lzparse import complexity_profile, parse_lz78, rho_value
from .prf import derive_seed, generator
from .seqio import Alphabet, PairSequence, Sequence
from .bounds import min_phrases

__all__ = [
    "TypeClass",
    "NestedBin",
    "ProtocolTrace",
    "StepRecord",
    "build_type_class",
    "metric_and_threshold",
    "critical_times",
    "run_protocol",
    "ENUMERATION_BIT_CAP",
]

ENUMERATION_BIT_CAP = 20


@lru_cache(maxsize=8)
def _class_table(k: int, alpha: int):
    """Lexicographic members of every phrase-count class of length k."""
    if k * math.log2(alpha) > ENUMERATION_BIT_CAP:
        raise ScaleExceededError(
            f"enumerating alphabet^{k} sequences exceeds the desk-scale cap"
        )
    table: dict[int, list] = {}
    for syms in product(range(alpha), repeat=k):
        children: list[dict] = [{}]
        cur = 0
        c = 0
        for s in syms:
            nxt = children[cur].get(s)
            if nxt is None:
                children[cur][s] = len(children)
                children.append({})
                c += 1
                cur = 0
            else:
                cur = nxt
        if cur != 0:
            c += 1
        table.setdefault(c, []).append(syms)
    return table


@dataclass(frozen=True)
class TypeClass:
    """All length-k sequences with one phrase count, in shared seeded order."""

    k: int
    alphabet: Alphabet
    c: int
    seed: int
    members: tuple[tuple[int, ...], ...]
    position: dict = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def position_bits(self) -> int:
        return (self.size - 1).bit_length() if self.size > 1 else 0


def build_type_class(k: int, alphabet: Alphabet, c: int, seed: int) -> TypeClass:
    """Enumerate the class and apply a seed-keyed pseudorandom permutation.

    Encoder and decoder call this with the same seed, so the position of
    every member is shared knowledge.
    """
    table = _class_table(k, alphabet.size)
    lex = table.get(c)
    if lex is None:
        raise EmptyClassError(f"no length-{k} sequence has phrase count {c}")
    rng = generator(seed, 31, k, alphabet.size, c)
    perm = rng.permutation(len(lex))
    members = tuple(lex[int(i)] for i in perm)
    return TypeClass(
        k=k,
        alphabet=alphabet,
        c=c,
        seed=seed,
        members=members,
        position={m: i for i, m in enumerate(members)},
    )


@dataclass(frozen=True)
class NestedBin:
    """Members whose position shares the first ``len(prefix_bits)`` bits."""

    type_class: TypeClass
    prefix_bits: str
    lo: int
    hi: int

    @property
    def size(self) -> int:
        return self.hi - self.lo

    def members(self):
        return self.type_class.members[self.lo : self.hi]

    def contains(self, symbols: tuple[int, ...]) -> bool:
        pos = self.type_class.position.get(symbols)
        return pos is not None and self.lo <= pos < self.hi


def bin_at(tc: TypeClass, truth_position: int, bits_received: int) -> NestedBin:
    """Bin after the decoder has the first ``bits_received`` position bits."""
    p = tc.position_bits
    b = min(max(bits_received, 0), p)
    prefix = truth_position >> (p - b)
    lo = prefix << (p - b)
    hi = min(lo + (1 << (p - b)), tc.size)
    return NestedBin(
        type_class=tc,
        prefix_bits=format(prefix, f"0{b}b") if b else "",
        lo=lo,
        hi=hi,
    )


def protocol_length(c: int, k: int) -> int:
    """Threshold/stop length of a phrase-count class: ceil(c*log2 c)."""
    return math.ceil(c * math.log2(c)) if c > 1 else 0


def metric_and_threshold(
    pair: PairSequence,
    m: float,
    r_x: float,
    r_y: float,
    l_x: float,
    l_y: float,
    eps: float,
) -> tuple[float, float]:
    """Correlation metric of a candidate pair and the time-m threshold.

    The metric switches form according to which encoders are still short
    of their lengths; once both are done every candidate scores +inf (the
    positions are then fully known and the decoder reads them off).
    """
    if m < 1:
        raise InvalidParamsError("channel-use index m starts at 1")
    if eps <= 0:
        raise InvalidParamsError("eps must be positive")
    k = len(pair)
    theta = (max(0.0, l_x - m * r_x) + max(0.0, l_y - m * r_y)) / k + eps
    prof = complexity_profile(pair)
    x_short = m * r_x < l_x
    y_short = m * r_y < l_y
    if x_short and y_short:
        metric = prof.rho_x + prof.rho_y - prof.rho_xy
    elif x_short:
        metric = prof.rho_x - prof.rho_x_given_y
    elif y_short:
        metric = prof.rho_y - prof.rho_y_given_x
    else:
        metric = math.inf
    return metric, theta


def critical_times(
    l_x: float, l_y: float, l_xy: float, r_x: float, r_y: float
) -> tuple[float, float, float]:
    """Channel uses at which cumulative bits reach the three lengths."""
    if r_x <= 0 or r_y <= 0:
        raise InvalidParamsError("rates must be positive")
    return l_x / r_x, l_y / r_y, l_xy / (r_x + r_y)


@dataclass(frozen=True)
class StepRecord:
    m: int
    bits_x: int
    bits_y: int
    theta: float
    winner_metric: float
    bin_x_lo: int
    bin_x_hi: int
    bin_y_lo: int
    bin_y_hi: int
    scanned: bool
    ack: bool

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "bits_x": self.bits_x,
            "bits_y": self.bits_y,
            "theta": self.theta,
            "winner_metric": self.winner_metric,
            "bin_x_size": self.bin_x_hi - self.bin_x_lo,
            "bin_y_size": self.bin_y_hi - self.bin_y_lo,
            "scanned": self.scanned,
            "ack": self.ack,
        }


@dataclass(frozen=True)
class ProtocolTrace:
    """Full record of one protocol run."""

    k: int
    r_x: float
    r_y: float
    eps: float
    seed: int
    c_x: int
    c_y: int
    header_bits: int
    length_x: int
    length_y: int
    length_xy: int
    codec_len_x: int
    codec_len_y: int
    position_len_x: int
    position_len_y: int
    class_size_x: int
    class_size_y: int
    m_x: float
    m_y: float
    m_xy: float
    steps: tuple[StepRecord, ...]
    channel_uses: int
    bits_x: int
    bits_y: int
    ack_uses: int
    decoded_x: tuple[int, ...]
    decoded_y: tuple[int, ...]
    correct: bool
    flagged: bool

    @property
    def payload_bits(self) -> int:
        return self.bits_x + self.bits_y

    def as_dict(self, include_steps: bool = True) -> dict:
        d = {
            "k": self.k,
            "r_x": self.r_x,
            "r_y": self.r_y,
            "eps": self.eps,
            "seed": self.seed,
            "c_x": self.c_x,
            "c_y": self.c_y,
            "header_bits": self.header_bits,
            "length_x": self.length_x,
            "length_y": self.length_y,
            "length_xy": self.length_xy,
            "codec_len_x": self.codec_len_x,
            "codec_len_y": self.codec_len_y,
            "position_len_x": self.position_len_x,
            "position_len_y": self.position_len_y,
            "class_size_x": self.class_size_x,
            "class_size_y": self.class_size_y,
            "m_x": self.m_x,
            "m_y": self.m_y,
            "m_xy": self.m_xy,
            "channel_uses": self.channel_uses,
            "bits_x": self.bits_x,
            "bits_y": self.bits_y,
            "payload_bits": self.payload_bits,
            "ack_uses": self.ack_uses,
            "decoded_x": list(self.decoded_x),
            "decoded_y": list(self.decoded_y),
            "correct": self.correct,
            "flagged": self.flagged,
        }
        if include_steps:
            d["steps"] = [s.as_dict() for s in self.steps]
        return d


def _pair_trio(xs, ys, beta, k, cache):
    """(rho_xy, rho_x_given_y, rho_y_given_x) of a candidate pair, cached."""
    key = (xs, ys)
    got = cache.get(key)
    if got is not None:
        return got
    from .lzparse import _joint_records, _phrase_projections

    records, incomplete = _joint_records(xs, ys, beta)
    px, py = _phrase_projections(records)
    ids = list(range(1, len(records) + 1))
    if incomplete:
        ids.append(incomplete)
    occ_y: dict = {}
    occ_x: dict = {}
    for pid in ids:
        occ_y[py[pid]] = occ_y.get(py[pid], 0) + 1
        occ_x[px[pid]] = occ_x.get(px[pid], 0) + 1
    trio = (
        rho_value(len(ids), k),
        math.fsum(c * math.log2(c) for c in occ_y.values() if c > 1) / k,
        math.fsum(c * math.log2(c) for c in occ_x.values() if c > 1) / k,
    )
    cache[key] = trio
    return trio


def run_protocol(p: PairSequence, r_x: float, r_y: float, eps: float, seed: int) -> ProtocolTrace:
    """Simulate one block through the incremental scheme."""
    if r_x <= 0 or r_y <= 0:
        raise InvalidParamsError("rates must be positive")
    if eps <= 0:
        raise InvalidParamsError("eps must be positive")
    k = len(p)
    beta = p.y.alphabet.size
    c_x = parse_lz78(p.x).c
    c_y = parse_lz78(p.y).c
    header_bits = 2 * max(1, (k - 1).bit_length())

    tc_x = build_type_class(k, p.x.alphabet, c_x, derive_seed(seed, 41, c_x))
    tc_y = build_type_class(k, p.y.alphabet, c_y, derive_seed(seed, 42, c_y))
    pos_x = tc_x.position[p.x.symbols]
    pos_y = tc_y.position[p.y.symbols]

    l_x = protocol_length(c_x, k)
    l_y = protocol_length(c_y, k)
    codec_x = plain_code_length(p.x.symbols, p.x.alphabet.size)
    codec_y = plain_code_length(p.y.symbols, beta)
    cap_x = min(tc_x.position_bits, codec_x)
    cap_y = min(tc_y.position_bits, codec_y)

    rho_cx = rho_value(c_x, k)
    rho_cy = rho_value(c_y, k)
    rho_floor = rho_value(min_phrases(k, 2), k)

    from .lzparse import parse_joint

    _, _, c_xy_truth = parse_joint(p)
    l_xy = protocol_length(c_xy_truth, k)
    m_x, m_y, m_xy = critical_times(l_x, l_y, l_xy, r_x, r_y)
    m_stop = math.ceil(max(l_x / r_x, l_y / r_y)) + 1

    cache: dict = {}
    steps: list[StepRecord] = []
    decoded = None
    flagged = False
    m = 0
    while True:
        m += 1
        bits_x = min(int(m * r_x), cap_x)
        bits_y = min(int(m * r_y), cap_y)
        bx = bin_at(tc_x, pos_x, bits_x)
        by = bin_at(tc_y, pos_y, bits_y)
        x_short = m * r_x < l_x
        y_short = m * r_y < l_y
        theta = (max(0.0, l_x - m * r_x) + max(0.0, l_y - m * r_y)) / k + eps
        if x_short and y_short:
            reachable = rho_cx + rho_cy - rho_floor
        elif x_short:
            reachable = rho_cx
        elif y_short:
            reachable = rho_cy
        else:
            reachable = math.inf
        scanned = False
        best_pair = None
        best_metric = -math.inf
        if reachable >= theta:
            scanned = True
            cand_y = sorted(by.members())
            for xs in sorted(bx.members()):
                for ys in cand_y:
                    if x_short and y_short:
                        metric = rho_cx + rho_cy - _pair_trio(xs, ys, beta, k, cache)[0]
                    elif x_short:
                        metric = rho_cx - _pair_trio(xs, ys, beta, k, cache)[1]
                    elif y_short:
                        metric = rho_cy - _pair_trio(xs, ys, beta, k, cache)[2]
                    else:
                        metric = math.inf
                    if metric > best_metric:
                        best_metric = metric
                        best_pair = (xs, ys)
        ack = scanned and best_metric >= theta
        steps.append(
            StepRecord(
                m=m,
                bits_x=bits_x,
                bits_y=bits_y,
                theta=theta,
                winner_metric=math.nan,
                bin_x_lo=bx.lo,
                bin_x_hi=bx.hi,
                bin_y_lo=by.lo,
                bin_y_hi=by.hi,
                scanned=scanned,
                ack=ack,
            )
        )
        if ack:
            decoded = best_pair
            break
        if m >= m_stop:
            # exhausted without a qualifying pair; output the best available
            flagged = True
            cand_y = sorted(by.members())
            for xs in sorted(bx.members()):
                for ys in cand_y:
                    trio = _pair_trio(xs, ys, beta, k, cache)
                    metric = rho_cx + rho_cy - trio[0]
                    if metric > best_metric:
                        best_metric = metric
                        best_pair = (xs, ys)
            decoded = best_pair
            break

    # fill in the eventual winner's metric at every recorded step
    filled = []
    wx, wy = decoded
    for st in steps:
        x_short = st.m * r_x < l_x
        y_short = st.m * r_y < l_y
        trio = _pair_trio(wx, wy, beta, k, cache)
        if x_short and y_short:
            wm = rho_cx + rho_cy - trio[0]
        elif x_short:
            wm = rho_cx - trio[1]
        elif y_short:
            wm = rho_cy - trio[2]
        else:
            wm = math.inf
        filled.append(
            StepRecord(
                m=st.m,
                bits_x=st.bits_x,
                bits_y=st.bits_y,
                theta=st.theta,
                winner_metric=wm,
                bin_x_lo=st.bin_x_lo,
                bin_x_hi=st.bin_x_hi,
                bin_y_lo=st.bin_y_lo,
                bin_y_hi=st.bin_y_hi,
                scanned=st.scanned,
                ack=st.ack,
            )
        )
    last = filled[-1]
    return ProtocolTrace(
        k=k,
        r_x=r_x,
        r_y=r_y,
        eps=eps,
        seed=seed,
        c_x=c_x,
        c_y=c_y,
        header_bits=header_bits,
        length_x=l_x,
        length_y=l_y,
        length_xy=l_xy,
        codec_len_x=codec_x,
        codec_len_y=codec_y,
        position_len_x=tc_x.position_bits,
        position_len_y=tc_y.position_bits,
        class_size_x=tc_x.size,
        class_size_y=tc_y.size,
        m_x=m_x,
        m_y=m_y,
        m_xy=m_xy,
        steps=tuple(filled),
        channel_uses=last.m,
        bits_x=last.bits_x,
        bits_y=last.bits_y,
        ack_uses=last.m,
        decoded_x=wx,
        decoded_y=wy,
        correct=(wx, wy) == (p.x.symbols, p.y.symbols),
        flagged=flagged,
    )
