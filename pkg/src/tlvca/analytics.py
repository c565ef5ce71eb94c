"""Closed-form probabilities, decay times, light-cone and sparse-set bounds.

Everything here is pure.  Probabilities that can underflow (large L, small
p) have ``log_`` variants; the plain versions return floats that may be 0.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "NoiseParams",
    "UndefinedRegimeError",
    "BoundValue",
    "flip_prob",
    "logical_fail_prob",
    "log_logical_fail_prob",
    "logical_fail_upper",
    "reg_incomplete_beta",
    "log_reg_incomplete_beta",
    "decay_time",
    "decay_time_lower",
    "stabilized_survival",
    "lightcone_bound",
    "ScalingRegime",
    "Regime",
    "lightcone_scaling_limit",
    "logpower_critical_rate",
    "SparseBoundParams",
    "sparse_params",
    "survival_bound_finite",
    "decode_failure_bound",
    "decreasing_tail_start",
    "Cluster",
    "ClusterFamily",
    "sparse_decompose",
    "check_independence",
    "check_completeness",
]

_LN2 = math.log(2.0)


class UndefinedRegimeError(ValueError):
    """Raised when a quantity is undefined, e.g. a decay time at P >= 1/2."""


@dataclass(frozen=True)
class NoiseParams:
    p0: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p0 <= 1.0:
            raise ValueError(f"p0 must lie in [0, 1], got {self.p0}")


@dataclass(frozen=True)
class BoundValue:
    """An upper bound as computed (``raw``) and clamped to [0, 1]."""

    raw: float
    clamped: float

    @classmethod
    def of(cls, raw: float) -> "BoundValue":
        return cls(raw, min(1.0, max(0.0, raw)))

    def __float__(self):
        return self.clamped


def _check_prob(p: float, name: str = "p") -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")


# ------------------------------------------------------------ single-site flips


def flip_prob(p0: float, t: int) -> float:
    """Probability that a site is flipped after ``t`` independent noise rounds."""
    _check_prob(p0, "p0")
    if t < 0:
        raise ValueError("t must be non-negative")
    return 0.5 * (1.0 - (1.0 - 2.0 * p0) ** t)


# ------------------------------------------------------ majority-vote failure


def _logsumexp(v: Sequence[float]) -> float:
    m = max(v)
    if m == -math.inf:
        return -math.inf
    return m + math.log(math.fsum(math.exp(x - m) for x in v))


def _log_binom_pmf(n: int, k: int, lp: float, lq: float) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1) + k * lp + (n - k) * lq


def _threshold(L: int) -> int:
    # smallest error count that flips the vote; for even L a tie is not a flip
    return L // 2 + 1


def log_logical_fail_prob(L: int, p: float, method: str = "beta", ties: str = "success") -> float:
    """Natural log of the probability that more than half of ``L`` sites flip.

    ``method`` is ``"direct"`` (log-sum-exp over the binomial tail) or
    ``"beta"`` (regularized incomplete beta).  For even ``L``, ``ties``
    says how an exact half counts: ``"success"`` (not a failure), ``"half"``
    (a failure with probability 1/2, which is what any syndrome-only
    decoder achieves) or ``"fail"``.
    """
    if L < 1:
        raise ValueError("L must be positive")
    if ties not in ("success", "half", "fail"):
        raise ValueError(f"unknown tie rule {ties!r}")
    _check_prob(p)
    if p == 0.0:
        return -math.inf
    if p == 1.0:
        return 0.0
    k0 = _threshold(L)
    if L % 2 == 0 and ties != "success":
        head = log_logical_fail_prob(L, p, method)
        tie = _log_binom_pmf(L, L // 2, math.log(p), math.log1p(-p)) - (_LN2 if ties == "half" else 0.0)
        return _logsumexp([head, tie])
    if method == "direct":
        lp, lq = math.log(p), math.log1p(-p)
        return _logsumexp([_log_binom_pmf(L, k, lp, lq) for k in range(k0, L + 1)])
    if method == "beta":
        return log_reg_incomplete_beta(p, k0, L - k0 + 1)
    raise ValueError(f"unknown method {method!r}")


def logical_fail_prob(L: int, p: float, method: str = "beta", ties: str = "success") -> float:
    """Failure probability of the global majority vote on ``L`` sites.

    Odd ``L`` is the standard case.  Even ``L`` is accepted; by default ties
    count as success, matching :func:`tlvca.decoders.majority_array`.
    """
    return math.exp(log_logical_fail_prob(L, p, method, ties))


def logical_fail_upper(L: int, p: float) -> float:
    """Closed-form upper bound on the majority failure probability (odd ``L``)."""
    if L % 2 == 0:
        raise ValueError("bound is stated for odd L")
    _check_prob(p)
    if p == 0.0:
        return 0.0
    h = (L + 1) // 2
    q = math.sqrt(p * (1.0 - p))
    if q == 0.0:
        return math.inf
    lb = math.log(h) + math.lgamma(L + 1) - math.lgamma(h + 1) - math.lgamma(L - h + 1)
    return math.exp(lb + math.log(p) + (L - 1) * math.log(q))


# ------------------------------------------------------- incomplete beta


def _betacf(x: float, a: float, b: float, eps: float = 1e-16, max_iter: int = 100_000) -> float:
    """Continued fraction for I_x(a, b) (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = tiny if abs(d) < tiny else d
        c = 1.0 + aa / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = tiny if abs(d) < tiny else d
        c = 1.0 + aa / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        dl = d * c
        h *= dl
        if abs(dl - 1.0) < eps:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (x={x}, a={a}, b={b})")


def _log_front(x: float, a: float, b: float) -> float:
    # log of x^a (1-x)^b / (a B(a, b))
    lbeta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    return a * math.log(x) + b * math.log1p(-x) - lbeta - math.log(a)


def log_reg_incomplete_beta(x: float, a: float, b: float) -> float:
    """Natural log of the regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    _check_prob(x, "x")
    if x == 0.0:
        return -math.inf
    if x == 1.0:
        return 0.0
    if x == 0.5 and a == b:
        return -_LN2  # exact by symmetry; the fraction leaves ~1e-12 here at large a
    if x <= (a + 1.0) / (a + b + 2.0):
        return _log_front(x, a, b) + math.log(_betacf(x, a, b))
    # symmetric branch converges here; I_x(a,b) = 1 - I_{1-x}(b,a)
    comp = math.exp(_log_front(1.0 - x, b, a)) * _betacf(1.0 - x, b, a)
    return math.log1p(-comp)


def reg_incomplete_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    return math.exp(log_reg_incomplete_beta(x, a, b))


# --------------------------------------------------- decay time and survival


def decay_time(L: int, p0: float) -> float:
    """Time scale of logical information loss under repeated global decoding.

    Raises :class:`UndefinedRegimeError` when the per-round failure
    probability is 1/2 or more.
    """
    lp = log_logical_fail_prob(L, p0)
    if lp >= -_LN2 - 1e-12:
        raise UndefinedRegimeError(f"failure probability {math.exp(lp):.3g} >= 1/2; no decay time")
    if lp == -math.inf:
        return math.inf
    P = math.exp(lp)
    if P < 1e-8:
        # -log1p(-2P) = 2P (1 + P + ...); keeps T finite even when P underflows
        return math.exp(-lp - _LN2) / (1.0 + P)
    return -1.0 / math.log1p(-2.0 * P)


def decay_time_lower(L: int, p0: float) -> float:
    """Asymptotic estimate exp(L log(1/2q)) / sqrt(L), q = sqrt(p0 (1-p0))."""
    q = math.sqrt(p0 * (1.0 - p0))
    if q == 0.0:
        return math.inf
    return math.exp(L * math.log(1.0 / (2.0 * q)) - 0.5 * math.log(L))


def stabilized_survival(L: int, p0: float, t: int) -> float:
    """Probability that the majority is intact after ``t`` decode rounds."""
    if t < 0:
        raise ValueError("t must be non-negative")
    P = logical_fail_prob(L, p0)
    return 0.5 * (1.0 + (1.0 - 2.0 * P) ** t)


# ------------------------------------------------------------------ light cone


def lightcone_bound(L: int, D: int, p0: float) -> float:
    """Upper bound on the success probability of any radius-``D`` decoder."""
    if L < 0 or D < 0:
        raise ValueError("L and D must be non-negative")
    if not 0.0 <= p0 <= 0.5:
        raise ValueError("p0 must lie in [0, 1/2]")
    if p0 == 0.0:
        return 1.0
    w = 2 * D + 1
    r = p0 / (1.0 - p0)
    return math.exp(-(L / w) * math.log1p(r**w))


class ScalingRegime(enum.Enum):
    CONST_D = "const"
    POWER_LAW = "power"
    LOG_POWER = "logpower"


@dataclass(frozen=True)
class Regime:
    """How the decoder radius grows with L: constant, L^k, or (log L)^k."""

    kind: ScalingRegime
    kappa: float | None = None

    def __post_init__(self):
        if self.kind is not ScalingRegime.CONST_D and not (self.kappa and self.kappa > 0):
            raise ValueError("kappa must be positive")


def logpower_critical_rate(kappa: float) -> float:
    return 1.0 / (1.0 + math.exp(1.0 / kappa))


def lightcone_scaling_limit(regime: Regime, p0: float) -> float:
    """Limit of :func:`lightcone_bound` as L grows, per radius regime."""
    if not 0.0 <= p0 <= 0.5:
        raise ValueError("p0 must lie in [0, 1/2]")
    if regime.kind is ScalingRegime.CONST_D:
        return 0.0 if p0 > 0 else 1.0
    if regime.kind is ScalingRegime.POWER_LAW:
        if p0 < 0.5:
            return 1.0
        if regime.kappa < 1:
            return 0.0
        return 0.5 if regime.kappa == 1 else 1.0
    return 1.0 if p0 <= logpower_critical_rate(regime.kappa) else 0.0


# -------------------------------------------------------------- sparse bounds


@dataclass(frozen=True)
class SparseBoundParams:
    """Constants of the sparse-set decay bound.

    ``k``, ``p_tilde_c`` and ``a`` are exact rationals.
    """

    R: int
    m: int
    p0: float
    k: int
    alpha: float
    beta: float
    gamma: float
    p_tilde_c: Fraction
    a: Fraction

    def uncovered_bound(self, l: int) -> float:
        """Per-site bound alpha ** (l ** beta) on staying uncovered up to level ``l``."""
        return math.exp(-self.gamma * l**self.beta) if self.alpha > 0 else 0.0


def sparse_params(R: int = 4, m: int = 1, p0: float = 0.0) -> SparseBoundParams:
    if R < 1 or m < 1:
        raise ValueError("R and m must be at least 1")
    _check_prob(p0, "p0")
    k = 2 * R * m
    alpha = 2 * k * (4 * k + 3) * math.sqrt(p0)
    gamma = -math.log(alpha) if alpha > 0 else math.inf
    return SparseBoundParams(
        R=R,
        m=m,
        p0=p0,
        k=k,
        alpha=alpha,
        beta=_LN2 / math.log(4 * k + 3),
        gamma=gamma,
        p_tilde_c=Fraction(1, (2 * k * (4 * k + 3)) ** 2),
        a=Fraction(1, (2 * R * m + 1) * (R * m + 1)),
    )


def _decay_factor(gamma: float, n: int, beta: float) -> float:
    # exp(-gamma * n**beta) with the n = 0 and gamma = inf corner cases
    if n == 0:
        return 1.0
    return math.exp(-gamma * n**beta)


def survival_bound_finite(L: int, t: int, params: SparseBoundParams) -> BoundValue:
    """Bound on the failure to decode a mirrored chain of length ``L`` within ``t`` steps."""
    if L < 1 or t < 0:
        raise ValueError("need L >= 1 and t >= 0")
    ts = min(t, L // (2 * params.R))
    raw = (4 * params.R * ts + L) * _decay_factor(params.gamma, ts // params.m, params.beta)
    return BoundValue.of(raw)


def decode_failure_bound(L: int, kappa: float, params: SparseBoundParams) -> BoundValue:
    """Bound on decoding failure with the step budget floor(L ** kappa)."""
    if not 0.0 < kappa < 1.0:
        raise ValueError("kappa must lie in (0, 1)")
    n = math.floor(L**kappa / params.m)
    raw = (4 * params.R + 1) * L * _decay_factor(params.gamma, n, params.beta)
    return BoundValue.of(raw)


def decreasing_tail_start(values: Sequence[float]) -> int | None:
    """Index from which ``values`` decrease strictly to the end, or None."""
    v = list(values)
    if len(v) < 2 or not v[-1] < v[-2]:
        return None
    i = len(v) - 1
    while i > 0 and v[i] < v[i - 1]:
        i -= 1
    return i


# -------------------------------------------------------- cluster families


@dataclass(frozen=True)
class Cluster:
    level: int
    sites: tuple[int, ...]

    @property
    def lo(self) -> int:
        return self.sites[0]

    @property
    def hi(self) -> int:
        return self.sites[-1]

    @property
    def diameter(self) -> int:
        return self.sites[-1] - self.sites[0]

    def territory(self, k: int) -> tuple[int, int]:
        # singletons get the radius of a diameter-1 cluster
        r = k * max(self.diameter, 1)
        return self.lo - r, self.hi + r


@dataclass(frozen=True)
class ClusterFamily:
    """Independent clusters found level by level, plus what stays uncovered.

    ``residual[l]`` holds the sites not covered by clusters of level
    ``<= l``; ``residual[0]`` is the input set.
    """

    k: int
    sites: tuple[int, ...]
    clusters: list[Cluster] = field(default_factory=list)
    residual: list[tuple[int, ...]] = field(default_factory=list)

    def uncovered(self, l: int) -> tuple[int, ...]:
        return self.residual[min(l, len(self.residual) - 1)]

    def uncovered_counts(self, l_max: int) -> np.ndarray:
        return np.array([len(self.uncovered(l)) for l in range(l_max + 1)], dtype=np.int64)


def _isolated(y: list[int], ia: int, ib: int, radius: int) -> bool:
    a, b = y[ia], y[ib]
    left_ok = ia == 0 or y[ia - 1] < a - radius
    right_ok = ib == len(y) - 1 or y[ib + 1] > b + radius
    return left_ok and right_ok


def _level_clusters(y: list[int], l: int, k: int) -> list[Cluster]:
    """All clusters of effective diameter ``l`` that are independent in ``y``."""
    out = []
    pos = {s: n for n, s in enumerate(y)}
    radius = k * l
    for ia, a in enumerate(y):
        if l == 1 and _isolated(y, ia, ia, radius):
            out.append(Cluster(1, (a,)))
        ib = pos.get(a + l)
        if ib is not None and _isolated(y, ia, ib, radius):
            out.append(Cluster(l, tuple(y[ia : ib + 1])))
    return out


def sparse_decompose(x: Iterable[int], k: int, l_max: int | None = None) -> ClusterFamily:
    """Build the level-by-level family of independent clusters of ``x``.

    ``x`` is a finite set of integer sites; everything outside it is empty.
    Level ``l`` takes every cluster of diameter ``l`` whose territory meets
    no other site left after removing lower levels.  Single sites count as
    diameter 1.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    y = sorted(set(int(s) for s in x))
    fam = ClusterFamily(k=k, sites=tuple(y), residual=[tuple(y)])
    if l_max is None:
        l_max = (y[-1] - y[0]) if len(y) > 1 else 1
    for l in range(1, l_max + 1):
        level = _level_clusters(y, l, k) if y else []
        if level:
            fam.clusters.extend(level)
            covered = {s for c in level for s in c.sites}
            y = [s for s in y if s not in covered]
        fam.residual.append(tuple(y))
    return fam


def _meets(sites: Sequence[int], span: tuple[int, int]) -> bool:
    i = bisect.bisect_left(sites, span[0])
    return i < len(sites) and sites[i] <= span[1]


def check_independence(fam: ClusterFamily) -> bool:
    """Brute-force pairwise check: one of each pair avoids the other's territory."""
    cl = fam.clusters
    for i in range(len(cl)):
        for j in range(i + 1, len(cl)):
            a, b = cl[i], cl[j]
            if _meets(a.sites, b.territory(fam.k)) and _meets(b.sites, a.territory(fam.k)):
                return False
    return True


def check_completeness(fam: ClusterFamily) -> bool:
    """No uncovered site at level l lies in an independent cluster of diameter <= l.

    Candidates are drawn from the residual set before level ``l`` and
    enumerated by brute force over all site pairs.
    """
    k = fam.k
    for l in range(1, len(fam.residual)):
        before = list(fam.residual[l - 1])
        after = set(fam.residual[l])
        if not after:
            continue
        n = len(before)
        for ia in range(n):
            for ib in range(ia, n):
                d = before[ib] - before[ia]
                if d > l:
                    break
                if _isolated(before, ia, ib, k * max(d, 1)) and after.intersection(before[ia : ib + 1]):
                    return False
    return True
