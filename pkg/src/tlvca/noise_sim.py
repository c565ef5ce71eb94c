"""Monte Carlo harness: sampling, decoding sweeps and continuous-noise runs.

Decoding trials are bit-sliced: a block of trials is a ``(L, W)`` array of
``uint64`` words, lane ``j`` of word ``w`` being trial ``64*w + j``.  Every
block draws from its own counter-based stream keyed by
``(seed, point index, block index)``, so results do not depend on the order
in which blocks are run.
"""

from __future__ import annotations

import enum
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .analytics import check_completeness, check_independence, logical_fail_prob, sparse_decompose, sparse_params
from .ca_core import (
    TLV_MIRRORED,
    ChainState,
    EvolutionOutcome,
    RuleSet,
    Terminal,
    classify_evolution,
    default_cap,
    step_all_states,
    step_array,
)
from .decoders import boundary, global_majority_decode, majority_array

__all__ = [
    "TmaxKind",
    "TmaxPolicy",
    "CorrectionMode",
    "TrialClass",
    "TrialOutcome",
    "ExperimentConfig",
    "DecodePoint",
    "FFPoint",
    "SweepStats",
    "SparseRow",
    "make_rng",
    "sample_bernoulli",
    "sample_mirrored_bernoulli",
    "sample_packed",
    "run_decode_trial",
    "decode_block",
    "estimate_pdec",
    "exact_pdec",
    "run_ff_trial",
    "ff_block",
    "estimate_tff",
    "validate_sparse_bound",
    "binomial_stderr",
]

BLOCK = 4096  # trials per RNG block (a multiple of 64)
FF_BLOCK = 1000


# ------------------------------------------------------------------ policies


class TmaxKind(str, enum.Enum):
    UNBOUNDED = "unbounded"
    LINEAR = "linear"
    POWER = "pow"
    CONST = "const"


@dataclass(frozen=True)
class TmaxPolicy:
    """Decoding-time budget as a function of L."""

    kind: TmaxKind = TmaxKind.UNBOUNDED
    value: float | None = None

    def __post_init__(self):
        k = self.kind
        if k is TmaxKind.POWER and not (self.value is not None and 0 < self.value <= 1):
            raise ValueError("pow:<kappa> needs 0 < kappa <= 1")
        if k is TmaxKind.LINEAR and not (self.value is not None and self.value > 0):
            raise ValueError("linear:<c> needs c > 0")
        if k is TmaxKind.CONST and not (self.value is not None and self.value >= 0 and float(self.value).is_integer()):
            raise ValueError("const:<T> needs a non-negative integer T")

    @classmethod
    def parse(cls, text: str) -> "TmaxPolicy":
        """Parse ``unbounded``, ``linear[:c]``, ``pow:<kappa>`` or ``const:<T>``."""
        m = re.fullmatch(r"\s*(unbounded|linear|pow|const)(?::([0-9.eE+-]+))?\s*", text)
        if not m:
            raise ValueError(f"bad t_max policy {text!r}")
        kind = TmaxKind(m.group(1))
        if kind is TmaxKind.UNBOUNDED:
            if m.group(2) is not None:
                raise ValueError("unbounded takes no argument")
            return cls(kind)
        if m.group(2) is None:
            if kind is TmaxKind.LINEAR:
                return cls(kind, 1.0)
            raise ValueError(f"{kind.value} needs an argument")
        return cls(kind, float(m.group(2)))

    def __str__(self):
        if self.kind is TmaxKind.UNBOUNDED:
            return "unbounded"
        v = self.value
        return f"{self.kind.value}:{int(v) if float(v).is_integer() else v}"

    @property
    def bounded(self) -> bool:
        return self.kind is not TmaxKind.UNBOUNDED

    def cap(self, L: int) -> int:
        """Step budget for length ``L``; unbounded falls back to a cycle-safe cap."""
        if self.kind is TmaxKind.UNBOUNDED:
            return default_cap(L)
        if self.kind is TmaxKind.LINEAR:
            return math.floor(self.value * L)
        if self.kind is TmaxKind.POWER:
            # guard against 784**0.5 = 27.999...
            return math.floor(L**self.value + 1e-9)
        return int(self.value)


class CorrectionMode(str, enum.Enum):
    TLV1D = "tlv1d"
    GLOBAL = "global"
    NONE = "none"


class TrialClass(str, enum.Enum):
    DECODED_CLEAN = "decoded_clean"
    LOGICAL_FLIP = "logical_flip"
    RESIDUAL_CYCLE = "residual_cycle"
    TIMED_OUT = "timed_out"


_CODES = {1: TrialClass.DECODED_CLEAN, 2: TrialClass.LOGICAL_FLIP, 3: TrialClass.RESIDUAL_CYCLE, 4: TrialClass.TIMED_OUT}


@dataclass(frozen=True)
class TrialOutcome:
    klass: TrialClass
    t_dec: int | None = None

    def __post_init__(self):
        if (self.klass is TrialClass.DECODED_CLEAN) != (self.t_dec is not None):
            raise ValueError("t_dec is defined exactly for clean decodes")


@dataclass(frozen=True)
class ExperimentConfig:
    L_grid: tuple[int, ...]
    p0_grid: tuple[float, ...]
    trials: int = 1000
    tmax: TmaxPolicy = TmaxPolicy()
    seed: int = 0
    mode: CorrectionMode = CorrectionMode.TLV1D
    ff_cap: int = 10**7
    tdec_bin: int = 10
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "L_grid", tuple(int(L) for L in self.L_grid))
        object.__setattr__(self, "p0_grid", tuple(float(p) for p in self.p0_grid))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.L_grid or not self.p0_grid:
            raise ValueError("empty grid")
        for p in self.p0_grid:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"p0 {p} outside [0, 1]")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def points(self) -> list[tuple[int, float]]:
        return [(L, p) for L in self.L_grid for p in self.p0_grid]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tmax"] = str(self.tmax)
        d["mode"] = self.mode.value
        return d


def binomial_stderr(k: int, n: int) -> float:
    p = k / n
    return math.sqrt(p * (1.0 - p) / n)


# ------------------------------------------------------------------- results


@dataclass
class DecodePoint:
    L: int
    p0: float
    tmax_policy: str
    t_cap: int
    trials: int
    n_clean: int
    n_flip: int
    n_cycle: int
    n_timeout: int
    tdec_hist: np.ndarray = field(repr=False)
    tdec_bin: int = 10
    mean_tdec: float = math.nan
    median_tdec: float = math.nan

    @property
    def n_fail(self) -> int:
        return self.trials - self.n_clean

    @property
    def p_fail(self) -> float:
        return self.n_fail / self.trials

    @property
    def p_fail_stderr(self) -> float:
        return binomial_stderr(self.n_fail, self.trials)

    @property
    def p_success(self) -> float:
        return self.n_clean / self.trials

    @property
    def cycle_frac(self) -> float:
        return self.n_cycle / self.trials

    def row(self) -> dict:
        return {
            "L": self.L,
            "p0": self.p0,
            "tmax_policy": self.tmax_policy,
            "trials": self.trials,
            "p_fail": self.p_fail,
            "p_fail_stderr": self.p_fail_stderr,
            "cycle_frac": self.cycle_frac,
            "mean_tdec": self.mean_tdec,
            "median_tdec": self.median_tdec,
        }


@dataclass
class FFPoint:
    L: int
    p0: float
    mode: str
    trials: int
    samples: np.ndarray = field(repr=False)  # float64, NaN marks a censored run
    cap: float = math.inf
    sampler: str = "stepped"

    @property
    def n_censored(self) -> int:
        return int(np.isnan(self.samples).sum())

    @property
    def censored_frac(self) -> float:
        return self.n_censored / self.trials

    def _done(self) -> np.ndarray:
        return self.samples[~np.isnan(self.samples)]

    @property
    def mean_tff(self) -> float:
        d = self._done()
        return float(d.mean()) if d.size else math.nan

    @property
    def stderr_tff(self) -> float:
        d = self._done()
        return float(d.std(ddof=1) / math.sqrt(d.size)) if d.size > 1 else math.nan

    def row(self) -> dict:
        return {
            "L": self.L,
            "p0": self.p0,
            "mode": self.mode,
            "trials": self.trials,
            "mean_tff": self.mean_tff,
            "stderr_tff": self.stderr_tff,
            "censored_frac": self.censored_frac,
            "cap": self.cap,
            "sampler": self.sampler,
        }


@dataclass
class SweepStats:
    """Per-point results of a sweep; ``points`` are in config order."""

    kind: str
    config: ExperimentConfig
    points: list = field(default_factory=list)

    def rows(self) -> list[dict]:
        return [p.row() for p in self.points]

    def point(self, L: int, p0: float):
        for p in self.points:
            if p.L == L and math.isclose(p.p0, p0):
                return p
        raise KeyError((L, p0))

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "config": self.config.to_dict(), "points": self.rows()}
        if self.kind == "decode":
            for r, p in zip(out["points"], self.points):
                r["tdec_hist"] = p.tdec_hist.tolist()
                r["tdec_bin"] = p.tdec_bin
                r["n_flip"], r["n_cycle"], r["n_timeout"] = p.n_flip, p.n_cycle, p.n_timeout
        return out


# ------------------------------------------------------------------ sampling


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Counter-based stream for ``(seed, *key)``; independent of call order."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=tuple(key))))


def sample_bernoulli(L: int, p0: float, rng: np.random.Generator) -> ChainState:
    return ChainState(rng.random(L) < p0)


def sample_mirrored_bernoulli(half_width: int, p0: float, rng: np.random.Generator) -> np.ndarray:
    """Error sites in the window ``1 - half_width .. half_width``.

    Sites ``i >= 1`` are i.i.d.; site ``1 - i`` copies site ``i``.
    """
    if half_width < 1:
        raise ValueError("half_width must be >= 1")
    right = np.flatnonzero(rng.random(half_width) < p0) + 1
    return np.sort(np.concatenate([1 - right, right]))


def _pack(bits: np.ndarray) -> np.ndarray:
    """Bool ``(L, n)`` with ``n % 64 == 0`` -> ``(L, n // 64)`` uint64 lanes."""
    return np.packbits(bits, axis=1, bitorder="little").view("<u8").astype(np.uint64, copy=False)


def _unpack(words: np.ndarray) -> np.ndarray:
    """``(..., W)`` uint64 -> ``(..., 64 W)`` bool, lane order as in :func:`_pack`."""
    w = np.ascontiguousarray(words.astype("<u8", copy=False))
    return np.unpackbits(w.view(np.uint8), axis=-1, bitorder="little").astype(bool)


def sample_packed(L: int, p0: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` Bernoulli chains bit-sliced into ``ceil(n / 64)`` words (spare lanes filled too)."""
    lanes = -(-n // 64) * 64
    return _pack(rng.random((L, lanes)) < p0)


# ----------------------------------------------------------- decoding trials


def _outcome(ev: EvolutionOutcome, cap: int) -> TrialOutcome:
    if ev.terminal is Terminal.CLEAN_ZERO:
        return TrialOutcome(TrialClass.DECODED_CLEAN, ev.steps_taken)
    if ev.terminal is Terminal.CLEAN_ONE:
        return TrialOutcome(TrialClass.LOGICAL_FLIP)
    if ev.terminal is Terminal.CYCLE:
        return TrialOutcome(TrialClass.RESIDUAL_CYCLE)
    return TrialOutcome(TrialClass.TIMED_OUT)


def run_decode_trial(
    L: int, p0: float, t_max: TmaxPolicy | int | None, rng: np.random.Generator, rules: RuleSet = TLV_MIRRORED
) -> TrialOutcome:
    """Decode one Bernoulli sample with TLV under a step budget."""
    if isinstance(t_max, TmaxPolicy):
        cap = t_max.cap(L)
    else:
        cap = default_cap(L) if t_max is None else int(t_max)
    x = sample_bernoulli(L, p0, rng)
    if cap == 0:
        code = 1 if x.is_zero() else 2 if x.is_one() else 4
        return TrialOutcome(_CODES[code], 0 if code == 1 else None)
    return _outcome(classify_evolution(x, rules, cap), cap)


def decode_block(x: np.ndarray, cap: int, rules: RuleSet = TLV_MIRRORED) -> tuple[np.ndarray, np.ndarray]:
    """Classify every lane of a bit-sliced block.

    Follows :func:`tlvca.ca_core.classify_evolution` lane by lane (same
    Brent schedule, same check order), so each lane gets the class a scalar
    run would give.  Returns ``(codes, t_dec)`` per lane with codes
    1 clean, 2 flip, 3 cycle, 4 timeout and ``t_dec = -1`` unless clean.
    """
    L, W = x.shape
    n = 64 * W
    codes = np.zeros(n, dtype=np.int8)
    tdec = np.full(n, -1, dtype=np.int64)
    full = np.uint64(0xFFFFFFFFFFFFFFFF)

    def mark(words: np.ndarray, mask: np.ndarray, code: int, t: int):
        lanes = _unpack(mask[None, :])[0].reshape(-1, 64)
        idx = (words[:, None] * 64 + np.arange(64)[None, :])[lanes]
        codes[idx] = code
        if code == 1:
            tdec[idx] = t

    words = np.arange(W)
    unres = np.full(W, full, dtype=np.uint64)
    z = ~np.bitwise_or.reduce(x, axis=0)
    o = np.bitwise_and.reduce(x, axis=0)
    mark(words, z, 1, 0)
    mark(words, o & ~z, 2, 0)
    unres &= ~(z | o)
    if cap == 0:
        mark(words, unres, 4, 0)
        return codes, tdec

    keep = unres != 0
    words, unres, tort = words[keep], unres[keep], x[:, keep]
    hare = step_array(tort, rules)
    power = lam = 1
    t = 1
    while words.size:
        z = ~np.bitwise_or.reduce(hare, axis=0) & unres
        o = np.bitwise_and.reduce(hare, axis=0) & unres
        mark(words, z, 1, t)
        mark(words, o, 2, t)
        unres &= ~(z | o)
        e = ~np.bitwise_or.reduce(tort ^ hare, axis=0) & unres
        mark(words, e, 3, t)
        unres &= ~e
        if t >= cap:
            mark(words, unres, 4, t)
            break
        keep = unres != 0
        if not keep.all():
            words, unres, tort, hare = words[keep], unres[keep], tort[:, keep], hare[:, keep]
        if power == lam:
            tort = hare
            power *= 2
            lam = 0
        hare = step_array(hare, rules)
        t += 1
        lam += 1
    return codes, tdec


def _decode_point(
    idx: int, L: int, p0: float, cfg: ExperimentConfig, rules: RuleSet
) -> DecodePoint:
    cap = cfg.tmax.cap(L)
    codes, tdecs = [], []
    for b, start in enumerate(range(0, cfg.trials, BLOCK)):
        nb = min(BLOCK, cfg.trials - start)
        x = sample_packed(L, p0, nb, make_rng(cfg.seed, idx, b))
        c, t = decode_block(x, cap, rules)
        codes.append(c[:nb])
        tdecs.append(t[:nb])
    codes = np.concatenate(codes)
    tdec = np.concatenate(tdecs)
    clean = tdec[codes == 1]
    nbins = int(clean.max()) // cfg.tdec_bin + 1 if clean.size else 0
    hist = np.bincount(clean // cfg.tdec_bin, minlength=nbins) if clean.size else np.zeros(0, np.int64)
    return DecodePoint(
        L=L,
        p0=p0,
        tmax_policy=str(cfg.tmax),
        t_cap=cap,
        trials=cfg.trials,
        n_clean=int((codes == 1).sum()),
        n_flip=int((codes == 2).sum()),
        n_cycle=int((codes == 3).sum()),
        n_timeout=int((codes == 4).sum()),
        tdec_hist=hist,
        tdec_bin=cfg.tdec_bin,
        mean_tdec=float(clean.mean()) if clean.size else math.nan,
        median_tdec=float(np.median(clean)) if clean.size else math.nan,
    )


def _map_points(fn, cfg: ExperimentConfig) -> list:
    jobs = list(enumerate(cfg.points()))
    if cfg.threads == 1 or len(jobs) == 1:
        return [fn(i, L, p) for i, (L, p) in jobs]
    with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
        return list(ex.map(lambda j: fn(j[0], *j[1]), jobs))


def estimate_pdec(cfg: ExperimentConfig, rules: RuleSet = TLV_MIRRORED) -> SweepStats:
    """Decoding-failure statistics for every (L, p0) point of ``cfg``."""
    for L in cfg.L_grid:
        rules.check_length(L)
    return SweepStats("decode", cfg, _map_points(lambda i, L, p: _decode_point(i, L, p, cfg, rules), cfg))


def exact_pdec(L: int, p0: float, t_max: int | None = None, rules: RuleSet = TLV_MIRRORED) -> dict[str, float]:
    """Exact outcome probabilities by weighting every one of the 2^L patterns.

    With ``t_max=None`` a pattern counts as clean if it ever reaches zero.
    """
    f = step_all_states(L, rules).astype(np.int64)
    states = np.arange(1 << L, dtype=np.int64)
    if t_max is None:
        g = f.copy()
        for _ in range(L + 1):  # g = f^(2^(L+1)), past any transient
            g = g[g]
        final = g[states]
    else:
        final = states.copy()
        for _ in range(t_max):
            final = f[final]
    ones = (1 << L) - 1
    w = np.array([bin(s).count("1") for s in range(1 << L)], dtype=np.int64)
    with np.errstate(divide="ignore"):
        logp = w * math.log(p0) if p0 > 0 else np.where(w == 0, 0.0, -np.inf)
        logq = (L - w) * math.log1p(-p0) if p0 < 1 else np.where(w == L, 0.0, -np.inf)
    prob = np.exp(logp + logq)
    p_clean = float(prob[final == 0].sum())
    p_flip = float(prob[final == ones].sum())
    return {"p_clean": p_clean, "p_flip": p_flip, "p_other": 1.0 - p_clean - p_flip, "p_fail": 1.0 - p_clean}


# ------------------------------------------------------- continuous noise (1D)


def _global_threshold(L: int) -> int:
    # lightest error pattern the global decoder can turn into a flip
    return (L + 1) // 2


def _global_event_prob(L: int, p0: float) -> float:
    """Probability that one noise round reaches the flip-capable weight."""
    return logical_fail_prob(L, p0, ties="fail")


def _sample_heavy_weight(L: int, p0: float, rng: np.random.Generator) -> int:
    """Binomial(L, p0) weight conditioned on reaching the flip-capable threshold."""
    ks = np.arange(_global_threshold(L), L + 1)
    lg = np.array([math.lgamma(L + 1) - math.lgamma(k + 1) - math.lgamma(L - k + 1) for k in ks])
    logw = lg + ks * math.log(p0) + (L - ks) * math.log1p(-p0)
    w = np.exp(logw - logw.max())
    return int(rng.choice(ks, p=w / w.sum()))


def _ff_global_skip(L: int, p0: float, n: int, rng: np.random.Generator, cap: float) -> np.ndarray:
    """Global correction each step, skipping rounds too light to cause a flip.

    A round whose error weight is below the threshold is always decoded back
    to zero, so only the waiting time to the next heavy round is drawn; the
    heavy round itself goes through the real decoder.
    """
    q = _global_event_prob(L, p0)
    out = np.full(n, np.nan)
    if q == 0.0:
        return out
    log1mq = math.log1p(-q)
    for j in range(n):
        t = 0.0
        while t <= cap:
            u = 1.0 - rng.random()
            t += max(1.0, math.ceil(math.log(u) / log1mq)) if q < 1 else 1.0
            if t > cap:
                break
            e = np.zeros(L, dtype=bool)
            e[rng.choice(L, size=_sample_heavy_weight(L, p0, rng), replace=False)] = True
            x = e ^ global_majority_decode(boundary(ChainState(e))).bits
            if majority_array(x):
                out[j] = t
                break
    return out


def ff_block(
    L: int,
    p0: float,
    mode: CorrectionMode,
    n: int,
    rng: np.random.Generator,
    cap: float = 10**7,
    rules: RuleSet = TLV_MIRRORED,
) -> np.ndarray:
    """First-flip times of ``n`` independent runs, stepped in lockstep.

    Each step adds fresh noise, applies the correction action of ``mode``
    and then checks the majority.  Runs still unflipped after ``cap`` steps
    are NaN.
    """
    out = np.full(n, np.nan)
    if p0 == 0.0 or n == 0:
        return out
    lanes = np.arange(n)
    x = np.zeros((L, n), dtype=bool)
    t = 0
    while lanes.size and t < cap:
        t += 1
        x ^= rng.random((L, lanes.size)) < p0
        if mode is CorrectionMode.TLV1D:
            x = step_array(x, rules)
        elif mode is CorrectionMode.GLOBAL:
            y = np.concatenate([np.zeros((1, lanes.size), bool), np.bitwise_xor.accumulate(x[:-1] ^ x[1:], axis=0)])
            heavy = 2 * y.sum(axis=0) > L
            x = x ^ (y ^ heavy[None, :])
        flipped = majority_array(x)
        if flipped.any():
            out[lanes[flipped]] = t
            keep = ~flipped
            lanes, x = lanes[keep], x[:, keep]
    return out


def run_ff_trial(
    L: int, p0: float, mode: CorrectionMode, rng: np.random.Generator, cap: float = 10**7
) -> float:
    """Time to the first majority flip of one run; NaN if ``cap`` is reached first."""
    return float(ff_block(L, p0, CorrectionMode(mode), 1, rng, cap)[0])


def _use_skip(L: int, p0: float, mode: CorrectionMode, sampler: str) -> bool:
    if mode is not CorrectionMode.GLOBAL or sampler == "stepped":
        return False
    if sampler == "skip":
        return True
    q = _global_event_prob(L, p0) if p0 > 0 else 0.0
    return q < 1e-4


def _ff_point(idx: int, L: int, p0: float, cfg: ExperimentConfig, sampler: str) -> FFPoint:
    skip = _use_skip(L, p0, cfg.mode, sampler)
    chunks = []
    for b, start in enumerate(range(0, cfg.trials, FF_BLOCK)):
        nb = min(FF_BLOCK, cfg.trials - start)
        rng = make_rng(cfg.seed, idx, b)
        if skip:
            chunks.append(_ff_global_skip(L, p0, nb, rng, math.inf))
        else:
            chunks.append(ff_block(L, p0, cfg.mode, nb, rng, cfg.ff_cap))
    return FFPoint(
        L=L,
        p0=p0,
        mode=cfg.mode.value,
        trials=cfg.trials,
        samples=np.concatenate(chunks),
        cap=math.inf if skip else float(cfg.ff_cap),
        sampler="skip" if skip else "stepped",
    )


def estimate_tff(cfg: ExperimentConfig, sampler: str = "auto") -> SweepStats:
    """Mean time to first majority flip per point.

    ``sampler`` applies to global correction only: ``stepped`` simulates
    every round, ``skip`` jumps over rounds too light to matter, ``auto``
    skips when a heavy round is rarer than 1e-4 per step.
    """
    if sampler not in ("auto", "stepped", "skip"):
        raise ValueError(f"unknown sampler {sampler!r}")
    return SweepStats("ff", cfg, _map_points(lambda i, L, p: _ff_point(i, L, p, cfg, sampler), cfg))


# ------------------------------------------------------------ sparse validation


@dataclass(frozen=True)
class SparseRow:
    level: int
    uncovered_frac: float
    stderr: float
    bound_raw: float
    bound_clamped: float


def validate_sparse_bound(
    p0: float,
    k: int = 8,
    half_width: int = 32,
    windows: int = 1000,
    l_max: int | None = None,
    seed: int = 0,
    check: bool = True,
    R: int = 4,
    m: int = 1,
) -> list[SparseRow]:
    """Uncovered-site fraction per level on mirrored windows, next to the decay bound.

    With ``check`` every family is verified for independence and
    completeness; a failure raises ``AssertionError``.
    """
    l_max = 2 * half_width if l_max is None else l_max
    rng = make_rng(seed, 0)
    counts = np.zeros(l_max + 1, dtype=np.int64)
    for _ in range(windows):
        fam = sparse_decompose(sample_mirrored_bernoulli(half_width, p0, rng), k, l_max)
        if check and not (check_independence(fam) and check_completeness(fam)):
            raise AssertionError(f"cluster family check failed for {fam.sites}")
        counts += fam.uncovered_counts(l_max)
    n_sites = windows * 2 * half_width
    params = sparse_params(R, m, p0)
    rows = []
    for l in range(1, l_max + 1):
        f = counts[l] / n_sites
        raw = params.alpha ** (l**params.beta) if params.alpha > 0 else 0.0
        rows.append(SparseRow(l, f, math.sqrt(f * (1 - f) / n_sites), raw, min(1.0, raw)))
    return rows
