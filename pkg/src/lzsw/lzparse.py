"""Incremental (LZ78) parsing and the derived complexity measures.

Parsing splits a string into phrases, each the shortest string not seen
before as a phrase; only the final phrase may be incomplete, in which
case it duplicates an earlier phrase and is still counted.  The joint
parse applies the same procedure to the sequence of symbol pairs.

All logarithms are base 2 and ``1*log2(1) == 0``, so every measure is in
bits per symbol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DivisibilityError
from .seqio import PairSequence, Sequence

__all__ = [
    "ParseResult",
    "ConditionalParseResult",
    "ComplexityProfile",
    "BlockProfile",
    "parse_lz78",
    "parse_joint",
    "complexity_profile",
    "blockwise_profile",
    "rho_value",
]


def rho_value(c: int, k: int) -> float:
    """Normalized complexity ``c*log2(c)/k`` of a phrase count ``c``."""
    if c <= 1:
        return 0.0
    return c * math.log2(c) / k


@dataclass(frozen=True)
class ParseResult:
    """Phrase partition of a single sequence.

    ``phrases`` holds half-open index ranges ``(start, end)`` covering the
    input in order; ``c`` counts all phrases including an incomplete final
    one.
    """

    phrases: tuple[tuple[int, int], ...]
    c: int
    last_complete: bool

    def phrase_symbols(self, seq: Sequence) -> list[tuple[int, ...]]:
        return [tuple(seq.symbols[a:b]) for a, b in self.phrases]


@dataclass(frozen=True)
class ConditionalParseResult:
    """Context occurrence counts extracted from a joint parse.

    ``c_xy`` is the joint phrase count, ``c_y`` the number of distinct
    conditioning-side phrase strings (in order of first appearance), and
    ``counts[l]`` the number of joint phrases whose conditioning-side
    string is the ``l``-th one.  ``sum(counts) == c_xy`` always.
    """

    c_xy: int
    c_y: int
    counts: tuple[int, ...]

    def rho(self, k: int) -> float:
        return math.fsum(c * math.log2(c) for c in self.counts if c > 1) / k


def _walk(symbols) -> tuple[list[tuple[int, int]], bool]:
    """Trie walk shared by the public parsers; returns ranges and whether
    the final phrase is complete."""
    children: list[dict] = [{}]
    ranges: list[tuple[int, int]] = []
    cur = 0
    start = 0
    for pos, s in enumerate(symbols):
        nxt = children[cur].get(s)
        if nxt is None:
            children[cur][s] = len(children)
            children.append({})
            ranges.append((start, pos + 1))
            cur = 0
            start = pos + 1
        else:
            cur = nxt
    if cur != 0:
        ranges.append((start, len(symbols)))
        return ranges, False
    return ranges, True


def parse_lz78(x: Sequence) -> ParseResult:
    """Incremental parse of a single sequence."""
    ranges, complete = _walk(x.symbols)
    return ParseResult(tuple(ranges), len(ranges), complete)


def _joint_records(xs, ys, beta: int):
    """Joint parse over pair symbols encoded as ``sx*beta + sy``.

    Returns ``(records, incomplete_id)`` where ``records[j] = (pred, sx, sy)``
    describes complete phrase ``j+1`` (pred is the 0-based id of the phrase
    it extends, 0 meaning the empty phrase), and ``incomplete_id`` is the id
    of the phrase the unfinished tail duplicates, or 0 if the parse ended on
    a boundary.
    """
    children: list[dict] = [{}]
    node_phrase = [0]
    records: list[tuple[int, int, int]] = []
    cur = 0
    for sx, sy in zip(xs, ys):
        key = sx * beta + sy
        nxt = children[cur].get(key)
        if nxt is None:
            children[cur][key] = len(children)
            children.append({})
            records.append((node_phrase[cur], sx, sy))
            node_phrase.append(len(records))
            cur = 0
        else:
            cur = nxt
    return records, node_phrase[cur]


def _phrase_projections(records):
    """Reconstruct per-phrase x and y strings (index 0 = empty phrase)."""
    xs: list[tuple[int, ...]] = [()]
    ys: list[tuple[int, ...]] = [()]
    for pred, sx, sy in records:
        xs.append(xs[pred] + (sx,))
        ys.append(ys[pred] + (sy,))
    return xs, ys


def _context_counts(proj, ids):
    """Occurrence counts of distinct projections, first-appearance order."""
    order: dict[tuple[int, ...], int] = {}
    counts: list[int] = []
    for pid in ids:
        w = proj[pid]
        at = order.get(w)
        if at is None:
            order[w] = len(counts)
            counts.append(1)
        else:
            counts[at] += 1
    return counts


def parse_joint(p: PairSequence) -> tuple[ConditionalParseResult, ConditionalParseResult, int]:
    """Joint parse of a pair; returns (x given y, y given x, c_xy).

    Both conditional results derive from the single parse of the pair
    sequence and share the joint phrase count.
    """
    records, incomplete = _joint_records(p.x.symbols, p.y.symbols, p.y.alphabet.size)
    xs, ys = _phrase_projections(records)
    ids = list(range(1, len(records) + 1))
    if incomplete:
        ids.append(incomplete)
    c_xy = len(ids)
    y_counts = _context_counts(ys, ids)
    x_counts = _context_counts(xs, ids)
    x_given_y = ConditionalParseResult(c_xy, len(y_counts), tuple(y_counts))
    y_given_x = ConditionalParseResult(c_xy, len(x_counts), tuple(x_counts))
    return x_given_y, y_given_x, c_xy


@dataclass(frozen=True)
class ComplexityProfile:
    """All six complexity measures of a pair plus their chain-rule extremes.

    ``rho_plus``/``rho_minus`` are the max/min of ``rho_xy``,
    ``rho_x + rho_y_given_x`` and ``rho_y + rho_x_given_y``.
    """

    k: int
    rho_x: float
    rho_y: float
    rho_xy: float
    rho_x_given_y: float
    rho_y_given_x: float
    rho_plus: float
    rho_minus: float

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "rho_x": self.rho_x,
            "rho_y": self.rho_y,
            "rho_xy": self.rho_xy,
            "rho_x_given_y": self.rho_x_given_y,
            "rho_y_given_x": self.rho_y_given_x,
            "rho_plus": self.rho_plus,
            "rho_minus": self.rho_minus,
        }


def complexity_profile(p: PairSequence) -> ComplexityProfile:
    k = len(p)
    cx = parse_lz78(p.x).c
    cy = parse_lz78(p.y).c
    x_given_y, y_given_x, c_xy = parse_joint(p)
    rho_x = rho_value(cx, k)
    rho_y = rho_value(cy, k)
    rho_xy = rho_value(c_xy, k)
    rho_xgy = x_given_y.rho(k)
    rho_ygx = y_given_x.rho(k)
    combos = (rho_xy, rho_x + rho_ygx, rho_y + rho_xgy)
    return ComplexityProfile(
        k=k,
        rho_x=rho_x,
        rho_y=rho_y,
        rho_xy=rho_xy,
        rho_x_given_y=rho_xgy,
        rho_y_given_x=rho_ygx,
        rho_plus=max(combos),
        rho_minus=min(combos),
    )


@dataclass(frozen=True)
class BlockProfile:
    """Per-block profiles for non-overlapping k-blocks plus their means."""

    n: int
    k: int
    per_block: tuple[ComplexityProfile, ...]
    rho_k_xy: float
    rho_k_x_given_y: float
    rho_k_y_given_x: float
    rho_k_plus: float
    rho_k_minus: float

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "rho_k_xy": self.rho_k_xy,
            "rho_k_x_given_y": self.rho_k_x_given_y,
            "rho_k_y_given_x": self.rho_k_y_given_x,
            "rho_k_plus": self.rho_k_plus,
            "rho_k_minus": self.rho_k_minus,
            "per_block": [b.as_dict() for b in self.per_block],
        }


def blockwise_profile(p: PairSequence, k: int) -> BlockProfile:
    """Profiles of the blocks ``(x[ik:ik+k], y[ik:ik+k])`` and exact means."""
    n = len(p)
    if k < 1 or n % k != 0:
        raise DivisibilityError(f"k={k} does not divide n={n}")
    blocks = []
    for i in range(0, n, k):
        bx = Sequence(p.x.alphabet, p.x.symbols[i : i + k])
        by = Sequence(p.y.alphabet, p.y.symbols[i : i + k])
        blocks.append(complexity_profile(PairSequence(bx, by)))
    m = len(blocks)
    mean = lambda vals: math.fsum(vals) / m
    return BlockProfile(
        n=n,
        k=k,
        per_block=tuple(blocks),
        rho_k_xy=mean(b.rho_xy for b in blocks),
        rho_k_x_given_y=mean(b.rho_x_given_y for b in blocks),
        rho_k_y_given_x=mean(b.rho_y_given_x for b in blocks),
        rho_k_plus=mean(b.rho_plus for b in blocks),
        rho_k_minus=mean(b.rho_minus for b in blocks),
    )
