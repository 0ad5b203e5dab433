"""Block empirical entropies, packing bounds, and inequality margins.

Everything here is an auxiliary quantity: exact non-overlapping block
statistics, the packing bound on phrase counts, the slack terms tying
block entropies to the parse-based complexities, Hamming-sphere sizes
with their exponents, and the state-count penalty of block codes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DivisibilityError, InvalidParamsError
from .lzparse import complexity_profile
from .seqio import PairSequence, Sequence

__all__ = [
    "BlockEmpirical",
    "BoundsReport",
    "ZivMargins",
    "block_empirical",
    "max_phrases",
    "min_phrases",
    "state_count",
    "slack_terms",
    "sphere_and_exponents",
    "delta_s",
    "verify_ziv_inequalities",
]


@dataclass(frozen=True)
class BlockEmpirical:
    """Joint distribution of non-overlapping ell-blocks, exact frequencies.

    ``joint`` maps ``(x_block, y_block)`` tuples to Fractions summing to 1;
    entropies are in bits.  The conditional entropies are computed directly
    (not via the chain rule), so the chain-rule identity is a genuine check.
    """

    ell: int
    joint: dict
    H_x: float
    H_y: float
    H_xy: float
    H_x_given_y: float
    H_y_given_x: float


def _entropy(freqs) -> float:
    return -math.fsum(float(f) * math.log2(float(f)) for f in freqs if f > 0)


def block_empirical(p: PairSequence, ell: int) -> BlockEmpirical:
    """Relative frequencies of the n/ell non-overlapping block pairs."""
    n = len(p)
    if ell < 1 or n % ell != 0:
        raise DivisibilityError(f"ell={ell} does not divide n={n}")
    m = n // ell
    unit = Fraction(1, m)
    joint: dict = {}
    xs, ys = p.x.symbols, p.y.symbols
    for i in range(0, n, ell):
        key = (xs[i : i + ell], ys[i : i + ell])
        joint[key] = joint.get(key, Fraction(0)) + unit
    margin_x: dict = {}
    margin_y: dict = {}
    for (bx, by), f in joint.items():
        margin_x[bx] = margin_x.get(bx, Fraction(0)) + f
        margin_y[by] = margin_y.get(by, Fraction(0)) + f
    h_x = _entropy(margin_x.values())
    h_y = _entropy(margin_y.values())
    h_xy = _entropy(joint.values())
    # direct conditionals: sum over conditioning blocks of weighted entropies
    h_xgy = math.fsum(
        float(f) * (-math.log2(float(f / margin_y[by])))
        for (bx, by), f in joint.items()
    )
    h_ygx = math.fsum(
        float(f) * (-math.log2(float(f / margin_x[bx])))
        for (bx, by), f in joint.items()
    )
    return BlockEmpirical(
        ell=ell,
        joint=joint,
        H_x=h_x,
        H_y=h_y,
        H_xy=h_xy,
        H_x_given_y=h_xgy,
        H_y_given_x=h_ygx,
    )


def max_phrases(k: int, alpha: int) -> int:
    """Largest possible phrase count of any length-k sequence.

    Greedy packing: use every string of length 1, 2, ... while they fit,
    then as many next-length strings as fit, and one final duplicated
    phrase if symbols remain (the incomplete phrase is counted, matching
    the parser).  Verified against exhaustive parsing for small k in the
    tests.
    """
    if k < 1 or alpha < 2:
        raise InvalidParamsError("need k >= 1 and alpha >= 2")
    total = 0
    count = 0
    i = 1
    p = alpha
    while total + i * p <= k:
        total += i * p
        count += p
        i += 1
        p *= alpha
    rem = k - total
    count += rem // i
    if rem % i:
        count += 1
    return count


def min_phrases(k: int, alpha: int) -> int:
    """Smallest possible phrase count: one phrase per length 1, 2, ...
    plus a duplicated remainder."""
    if k < 1 or alpha < 2:
        raise InvalidParamsError("need k >= 1 and alpha >= 2")
    total = 0
    count = 0
    i = 1
    while total + i <= k:
        total += i
        count += 1
        i += 1
    if k - total:
        count += 1
    return count


def state_count(ell: int, alpha: int) -> int:
    """States of a block code on length-ell blocks: (alpha^ell - 1)/(alpha - 1)."""
    return (alpha**ell - 1) // (alpha - 1)


def slack_terms(k: int, ell: int, alpha: int, beta: int) -> tuple[float, float]:
    """Slack between block entropy rates and parse complexities.

    The single-sequence slack is
    ``c_max(k, alpha) * log2(4 S^2) / k + S^2 log2(4 S^2) / k + 1/ell``
    with ``S = state_count(ell, alpha)``; the first term instantiates the
    generic phrase-count factor with the exact packing bound, which is the
    tightest value for which the underlying inequality holds for every
    sequence.  The conditional/joint variant replaces S by the product
    alphabet state count and the packing bound by the product-alphabet one.
    Both converge to 1/ell as k grows.
    """
    if ell < 1 or k % ell != 0:
        raise DivisibilityError(f"ell={ell} does not divide k={k}")
    if k < 2:
        raise InvalidParamsError("k too small: the log2(k) denominator needs k >= 2")

    def one(a: int) -> float:
        s = state_count(ell, a)
        t = math.log2(4 * s * s)
        return (max_phrases(k, a) * t) / k + (s * s * t) / k + 1.0 / ell

    return one(alpha), one(alpha * beta)


def sphere_and_exponents(
    ell: int, eps: float, alpha: int, beta: int
) -> tuple[int, float, float]:
    """Hamming sphere size over the pair alphabet and its exponents.

    Returns ``(B, Q, delta)`` where ``B = sum_{j<=floor(ell*eps)}
    C(ell,j) (alpha*beta-1)^j`` exactly, ``Q`` is the two-branch Chernoff
    exponent, and ``delta = h2(eps) + eps*log2(alpha*beta - 1)``.
    """
    if not 0.0 <= eps <= 1.0:
        raise InvalidParamsError("eps must lie in [0, 1]")
    ab = alpha * beta
    radius = int(math.floor(ell * eps + 1e-9))
    b = sum(math.comb(ell, j) * (ab - 1) ** j for j in range(min(radius, ell) + 1))
    delta = _h2(eps) + eps * math.log2(ab - 1)
    if eps < 1.0 - 1.0 / ab:
        q = delta
    else:
        q = math.log2(ab)
    return b, q, delta


def _h2(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def delta_s(s: int, ell: int, alpha: int, beta: int) -> float:
    """State-count penalty of an s-state block code on length-ell blocks:
    ``(1/ell) log2(s^2 (1 + log2(1 + (alpha*beta)^ell / s^2)))``."""
    if s < 1:
        raise InvalidParamsError("s must be >= 1")
    ab_pow = (alpha * beta) ** ell
    return math.log2(s * s * (1.0 + math.log2(1.0 + ab_pow / (s * s)))) / ell


@dataclass(frozen=True)
class ZivMargins:
    """Minimum margins (over k-blocks) of the three entropy inequalities:
    each is block entropy rate minus parse complexity plus slack and must
    be nonnegative."""

    unconditional: float
    conditional: float
    joint: float

    def as_dict(self) -> dict:
        return {
            "unconditional": self.unconditional,
            "conditional": self.conditional,
            "joint": self.joint,
        }


def verify_ziv_inequalities(p: PairSequence, k: int, ell: int) -> ZivMargins:
    """Margins of the three block-entropy inequalities on every k-block."""
    n = len(p)
    if k < 1 or n % k != 0:
        raise DivisibilityError(f"k={k} does not divide n={n}")
    alpha = p.x.alphabet.size
    beta = p.y.alphabet.size
    delta, delta_prime = slack_terms(k, ell, alpha, beta)
    m1 = m2 = m3 = math.inf
    for i in range(0, n, k):
        block = PairSequence(
            Sequence(p.x.alphabet, p.x.symbols[i : i + k]),
            Sequence(p.y.alphabet, p.y.symbols[i : i + k]),
        )
        emp = block_empirical(block, ell)
        prof = complexity_profile(block)
        m1 = min(m1, emp.H_x / ell - prof.rho_x + delta)
        m2 = min(m2, emp.H_x_given_y / ell - prof.rho_x_given_y + delta_prime)
        m3 = min(m3, emp.H_xy / ell - prof.rho_xy + delta_prime)
    return ZivMargins(unconditional=m1, conditional=m2, joint=m3)


@dataclass(frozen=True)
class BoundsReport:
    """Bundle of the auxiliary quantities for one (k, ell, eps) setting."""

    k: int
    ell: int
    eps: float
    alpha: int
    beta: int
    s: int
    S: int
    S_prime: int
    delta_k: float
    delta_k_prime: float
    B: int
    Q: float
    delta_eps: float
    delta_s_value: float
    max_phrases_k: int

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "ell": self.ell,
            "eps": self.eps,
            "alpha": self.alpha,
            "beta": self.beta,
            "s": self.s,
            "S": self.S,
            "S_prime": self.S_prime,
            "delta_k": self.delta_k,
            "delta_k_prime": self.delta_k_prime,
            "B": self.B,
            "Q": self.Q,
            "delta_eps": self.delta_eps,
            "delta_s": self.delta_s_value,
            "max_phrases": self.max_phrases_k,
        }


def bounds_report(
    k: int, ell: int, eps: float, alpha: int = 2, beta: int = 2, s: int = 1
) -> BoundsReport:
    delta, delta_prime = slack_terms(k, ell, alpha, beta)
    b, q, d_eps = sphere_and_exponents(ell, eps, alpha, beta)
    return BoundsReport(
        k=k,
        ell=ell,
        eps=eps,
        alpha=alpha,
        beta=beta,
        s=s,
        S=state_count(ell, alpha),
        S_prime=state_count(ell, alpha * beta),
        delta_k=delta,
        delta_k_prime=delta_prime,
        B=b,
        Q=q,
        delta_eps=d_eps,
        delta_s_value=delta_s(s, ell, alpha, beta),
        max_phrases_k=max_phrases(k, alpha),
    )
