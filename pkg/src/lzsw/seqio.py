"""Sequences over finite alphabets: construction, generation, file I/O.

File format: one header line ``alphabet=<comma-separated labels>``, then
the symbol body as contiguous single-character tokens (newlines in the
body are ignored).  The format is deliberately human-inspectable so the
worked examples used in tests can live in plain text fixtures.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field

from .errors import (
    EmptyInputError,
    InvalidParamsError,
    LengthMismatchError,
    UnknownSymbolError,
)
from .prf import generator

_DEFAULT_LABELS = string.ascii_lowercase + string.ascii_uppercase + string.digits

GENERATOR_FAMILIES = ("constant", "periodic", "thue-morse", "uniform-random", "markov")
NOISE_KINDS = ("symmetric-flip", "deterministic-mask")


@dataclass(frozen=True)
class Alphabet:
    """Finite symbol alphabet; indices run 0..size-1."""

    size: int
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if not 2 <= self.size <= 256:
            raise InvalidParamsError(f"alphabet size must be in [2, 256], got {self.size}")
        if not self.labels:
            object.__setattr__(self, "labels", default_labels(self.size))
        if len(self.labels) != self.size:
            raise InvalidParamsError("label count must equal alphabet size")
        if len(set(self.labels)) != self.size:
            raise InvalidParamsError("labels must be distinct")
        if any(not lab or not lab.isprintable() for lab in self.labels):
            raise InvalidParamsError("labels must be printable and non-empty")

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownSymbolError(f"token {label!r} not in alphabet {self.labels}") from None


def default_labels(size: int) -> tuple[str, ...]:
    if size <= len(_DEFAULT_LABELS):
        return tuple(_DEFAULT_LABELS[:size])
    return tuple(_DEFAULT_LABELS) + tuple(f"<{i}>" for i in range(len(_DEFAULT_LABELS), size))


@dataclass(frozen=True)
class Sequence:
    """Immutable symbol-index string over an alphabet."""

    alphabet: Alphabet
    symbols: tuple[int, ...]

    def __post_init__(self):
        if len(self.symbols) < 1:
            raise EmptyInputError("sequence must contain at least one symbol")
        size = self.alphabet.size
        if any(not 0 <= s < size for s in self.symbols):
            raise UnknownSymbolError("symbol index out of alphabet range")

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def length(self) -> int:
        return len(self.symbols)

    def text(self) -> str:
        return "".join(self.alphabet.labels[s] for s in self.symbols)


@dataclass(frozen=True)
class PairSequence:
    """A pair of equal-length sequences observed jointly."""

    x: Sequence
    y: Sequence

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise LengthMismatchError(
                f"pair lengths differ: {len(self.x)} vs {len(self.y)}"
            )

    def __len__(self) -> int:
        return len(self.x)

    @property
    def length(self) -> int:
        return len(self.x)


def from_text(text: str, alphabet: Alphabet) -> Sequence:
    return Sequence(alphabet, tuple(alphabet.index(ch) for ch in text))


def load_sequence(path, alphabet: Alphabet | None = None) -> Sequence:
    """Read a sequence file; the header line declares the alphabet.

    If ``alphabet`` is given it must agree with the header.
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline()
        body = fh.read()
    if not header.startswith("alphabet="):
        raise InvalidParamsError(f"{path}: missing 'alphabet=' header line")
    labels = tuple(header[len("alphabet="):].strip().split(","))
    if any(len(lab) != 1 for lab in labels):
        raise InvalidParamsError("file alphabets must use single-character labels")
    file_alpha = Alphabet(len(labels), labels)
    if alphabet is not None and alphabet != file_alpha:
        raise InvalidParamsError(f"{path}: header alphabet differs from the requested one")
    body = "".join(body.split())
    if not body:
        raise EmptyInputError(f"{path}: empty sequence body")
    return from_text(body, file_alpha)


def save_sequence(seq: Sequence, path) -> None:
    if any(len(lab) != 1 for lab in seq.alphabet.labels):
        raise InvalidParamsError("file format requires single-character labels")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("alphabet=" + ",".join(seq.alphabet.labels) + "\n")
        fh.write(seq.text() + "\n")


def generate(
    family: str,
    length: int,
    seed: int = 0,
    alphabet: Alphabet | None = None,
    **params,
) -> Sequence:
    """Deterministic sequence generator; output depends only on the arguments.

    Families: ``constant`` (param ``symbol``), ``periodic`` (param
    ``pattern``), ``thue-morse`` (base-alpha digit-sum construction),
    ``uniform-random``, ``markov`` (params ``transition`` row-stochastic
    matrix and optional ``init`` distribution).
    """
    if length < 1:
        raise InvalidParamsError("length must be >= 1")
    if alphabet is None:
        alphabet = Alphabet(int(params.pop("alpha", 2)))
    alpha = alphabet.size

    if family == "constant":
        symbol = int(params.pop("symbol", 0))
        if not 0 <= symbol < alpha:
            raise InvalidParamsError("constant symbol outside alphabet")
        _reject_extras(params)
        return Sequence(alphabet, (symbol,) * length)

    if family == "periodic":
        pattern = tuple(int(s) for s in params.pop("pattern", (0, 1)))
        if not pattern or any(not 0 <= s < alpha for s in pattern):
            raise InvalidParamsError("periodic pattern outside alphabet")
        _reject_extras(params)
        reps = -(-length // len(pattern))
        return Sequence(alphabet, (pattern * reps)[:length])

    if family == "thue-morse":
        _reject_extras(params)
        syms = []
        for n in range(length):
            total = 0
            v = n
            while v:
                total += v % alpha
                v //= alpha
            syms.append(total % alpha)
        return Sequence(alphabet, tuple(syms))

    if family == "uniform-random":
        _reject_extras(params)
        rng = generator(seed, 1)
        return Sequence(alphabet, tuple(int(s) for s in rng.integers(0, alpha, size=length)))

    if family == "markov":
        transition = params.pop("transition", None)
        init = params.pop("init", None)
        _reject_extras(params)
        if transition is None:
            raise InvalidParamsError("markov family requires a transition matrix")
        rows = [tuple(float(p) for p in row) for row in transition]
        if len(rows) != alpha or any(len(r) != alpha for r in rows):
            raise InvalidParamsError("transition matrix must be alpha x alpha")
        for r in rows:
            if any(p < 0 for p in r) or abs(sum(r) - 1.0) > 1e-9:
                raise InvalidParamsError("transition rows must sum to 1 within 1e-9")
        if init is None:
            init = tuple(1.0 / alpha for _ in range(alpha))
        else:
            init = tuple(float(p) for p in init)
            if len(init) != alpha or abs(sum(init) - 1.0) > 1e-9:
                raise InvalidParamsError("init distribution must sum to 1 within 1e-9")
        rng = generator(seed, 2)
        u = rng.random(size=length)
        syms = []
        state = _draw(init, float(u[0]))
        syms.append(state)
        for t in range(1, length):
            state = _draw(rows[state], float(u[t]))
            syms.append(state)
        return Sequence(alphabet, tuple(syms))

    raise InvalidParamsError(f"unknown family {family!r}; choose from {GENERATOR_FAMILIES}")


def _draw(dist, u: float) -> int:
    acc = 0.0
    for i, p in enumerate(dist):
        acc += p
        if u < acc:
            return i
    return len(dist) - 1


def _reject_extras(params: dict) -> None:
    if params:
        raise InvalidParamsError(f"unexpected parameters: {sorted(params)}")


def correlate(x: Sequence, noise: str, param, seed: int = 0) -> PairSequence:
    """Produce a correlated partner for ``x``.

    ``symmetric-flip``: with probability ``param`` replace the symbol by a
    uniformly chosen different one (for a binary alphabet this is a bit
    flip).  ``deterministic-mask``: add the mask symbol-wise mod alpha.
    """
    alpha = x.alphabet.size
    if noise == "symmetric-flip":
        p = float(param)
        if not 0.0 <= p <= 1.0:
            raise InvalidParamsError("flip probability must lie in [0, 1]")
        if p == 0.0:
            return PairSequence(x, Sequence(x.alphabet, x.symbols))
        rng = generator(seed, 3)
        u = rng.random(size=len(x))
        shift = rng.integers(1, alpha, size=len(x))
        ys = tuple(
            (s + int(shift[i])) % alpha if float(u[i]) < p else s
            for i, s in enumerate(x.symbols)
        )
        return PairSequence(x, Sequence(x.alphabet, ys))

    if noise == "deterministic-mask":
        mask = tuple(int(v) for v in param)
        if len(mask) != len(x):
            raise InvalidParamsError("mask length must equal sequence length")
        ys = tuple((s + m) % alpha for s, m in zip(x.symbols, mask))
        return PairSequence(x, Sequence(x.alphabet, ys))

    raise InvalidParamsError(f"unknown noise kind {noise!r}; choose from {NOISE_KINDS}")
