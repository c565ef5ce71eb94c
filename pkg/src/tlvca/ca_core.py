"""Cellular-automaton engine for the TLV and GKL density classifiers.

Sites are stored 0-based; the *paper parity* of a cell is the parity of its
1-based index, so cell ``j`` uses the even-site rule when ``j + 1`` is even.

Every rule is a composition of three-input majorities (and, for GKL, a
state-dependent select), so the engine only uses ``&``, ``|``, ``^`` and
``~``.  That lets the same code step a single ``bool`` chain or a
bit-sliced batch of ``uint64`` words in which every bit is an independent
chain.  Arrays are always indexed with the site axis first.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Family",
    "BoundaryKind",
    "BoundaryMode",
    "RuleSet",
    "ChainState",
    "Terminal",
    "EvolutionOutcome",
    "EroderTable",
    "MIRRORED",
    "PERIODIC",
    "TLV_MIRRORED",
    "maj3",
    "tlv_local_rule",
    "gkl_local_rule",
    "resolve_index",
    "step",
    "step_array",
    "evolve",
    "evolve_array",
    "classify_evolution",
    "enumerate_fixed_points",
    "step_all_states",
    "measure_eroder",
    "CausalityError",
]


class CausalityError(ValueError):
    """Raised when an open-window evolution would read past its padding."""


class Family(str, enum.Enum):
    TLV = "tlv"
    GKL = "gkl"

    @property
    def radius(self) -> int:
        return 4 if self is Family.TLV else 3


class BoundaryKind(str, enum.Enum):
    MIRRORED = "mirrored"
    PERIODIC = "periodic"
    OPEN_WINDOW = "open"


@dataclass(frozen=True)
class BoundaryMode:
    """How indices outside ``1..L`` are resolved.

    ``OPEN_WINDOW`` emulates a finite window of the infinite chain: cells
    beyond the window read as ``background``.  Only the cells farther than
    ``R*t`` from the window edge are exact after ``t`` steps, so callers
    declare a ``padding`` and :func:`evolve` refuses to run longer than
    ``padding // R`` steps.
    """

    kind: BoundaryKind = BoundaryKind.MIRRORED
    padding: int = 0
    background: int = 0

    def __post_init__(self):
        if self.kind is BoundaryKind.OPEN_WINDOW:
            if self.padding < 0:
                raise ValueError("padding must be non-negative")
            if self.background not in (0, 1):
                raise ValueError("background must be 0 or 1")

    @classmethod
    def open_window(cls, padding: int, background: int = 0) -> "BoundaryMode":
        return cls(BoundaryKind.OPEN_WINDOW, padding, background)


MIRRORED = BoundaryMode(BoundaryKind.MIRRORED)
PERIODIC = BoundaryMode(BoundaryKind.PERIODIC)


@dataclass(frozen=True)
class RuleSet:
    family: Family = Family.TLV
    boundary: BoundaryMode = MIRRORED

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.family is Family.GKL and self.boundary.kind is BoundaryKind.MIRRORED:
            raise ValueError("GKL has no mirrored-boundary form; use periodic or open window")

    @property
    def radius(self) -> int:
        return self.family.radius

    @property
    def self_dual(self) -> bool:
        return self.family is Family.TLV

    def check_length(self, L: int) -> None:
        if L < 2:
            raise ValueError(f"chain length must be at least 2, got {L}")
        if self.family is Family.TLV and self.boundary.kind is not BoundaryKind.OPEN_WINDOW and L % 2:
            # first cell odd, last cell even; a periodic ring must keep the parity pattern
            raise ValueError(f"TLV with {self.boundary.kind.value} boundaries needs even L, got {L}")


TLV_MIRRORED = RuleSet(Family.TLV, MIRRORED)


@dataclass(frozen=True, eq=False)
class ChainState:
    """Immutable length-L bit configuration (1 = error present)."""

    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.array(self.bits, dtype=bool, copy=True).reshape(-1)
        if b.size < 2:
            raise ValueError("a chain needs at least two cells")
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    @classmethod
    def zeros(cls, L: int) -> "ChainState":
        return cls(np.zeros(L, dtype=bool))

    @classmethod
    def ones(cls, L: int) -> "ChainState":
        return cls(np.ones(L, dtype=bool))

    @classmethod
    def from_string(cls, s: str) -> "ChainState":
        return cls(np.array([c == "1" for c in s.strip()], dtype=bool))

    @classmethod
    def from_sites(cls, L: int, sites: Iterable[int]) -> "ChainState":
        """Build a state from 0-based set sites."""
        b = np.zeros(L, dtype=bool)
        b[list(sites)] = True
        return cls(b)

    @property
    def length(self) -> int:
        return int(self.bits.size)

    @property
    def weight(self) -> int:
        return int(self.bits.sum())

    @property
    def density(self) -> float:
        return self.weight / self.length

    def complement(self) -> "ChainState":
        return ChainState(~self.bits)

    def is_zero(self) -> bool:
        return not self.bits.any()

    def is_one(self) -> bool:
        return bool(self.bits.all())

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChainState):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash(self.bits.tobytes())

    def __xor__(self, other: "ChainState") -> "ChainState":
        return ChainState(self.bits ^ other.bits)

    def __repr__(self) -> str:
        s = self.to_string()
        return f"ChainState({s if len(s) <= 64 else s[:61] + '...'})"


# --------------------------------------------------------------------------- rules


def maj3(a, b, c):
    """Three-input majority on bits, bools or packed words."""
    return (a & b) | (a & c) | (b & c)


def _tlv_offsets(paper_index: int) -> tuple[int, int, int]:
    if paper_index % 2 == 0:
        return (-1, 2, 4)
    return (1, -2, -4)


def tlv_local_rule(window: Sequence[int], site_parity: int) -> int:
    """Stretched TLV on a resolved 9-cell window centred on the site.

    ``window[4]`` is the site itself; ``site_parity`` is the parity of its
    1-based index.
    """
    if len(window) != 9:
        raise ValueError("TLV needs a 9-cell window")
    a, b, c = (window[4 + o] for o in _tlv_offsets(site_parity))
    return int(maj3(int(a), int(b), int(c)))


def gkl_local_rule(window: Sequence[int], center_state: int | None = None) -> int:
    """GKL soldiers rule on a resolved 7-cell window (``window[3]`` is the site)."""
    if len(window) != 7:
        raise ValueError("GKL needs a 7-cell window")
    x = int(window[3]) if center_state is None else int(center_state)
    if x == 0:
        return int(maj3(x, int(window[2]), int(window[0])))
    return int(maj3(x, int(window[4]), int(window[6])))


def resolve_index(i: int, L: int, mode: BoundaryMode = MIRRORED) -> int | None:
    """Map a 1-based paper index onto the chain ``1..L``.

    Returns the resolved 1-based index, or ``None`` for open-window cells
    outside the chain (they read as the window background).
    """
    if 1 <= i <= L:
        return i
    kind = mode.kind
    if kind is BoundaryKind.MIRRORED:
        # reflecting at both ends makes the extension 2L-periodic
        j = (i - 1) % (2 * L)
        return (j if j < L else 2 * L - 1 - j) + 1
    if kind is BoundaryKind.PERIODIC:
        return (i - 1) % L + 1
    return None


@lru_cache(maxsize=256)
def _gather_table(family: Family, L: int, boundary: BoundaryMode) -> np.ndarray:
    """0-based gather indices, shape (k, L).

    Out-of-window reads point at row ``L`` (background 0) or ``L + 1``
    (background 1) of the padded state.
    """
    bg_row = L + boundary.background

    def res(i: int) -> int:
        j = resolve_index(i, L, boundary)
        return bg_row if j is None else j - 1

    if family is Family.TLV:
        rows = [[res(i + _tlv_offsets(i)[k]) for i in range(1, L + 1)] for k in range(3)]
    else:
        offsets = (-1, -3, 1, 3)
        rows = [[res(i + o) for i in range(1, L + 1)] for o in offsets]
    table = np.array(rows, dtype=np.intp)
    table.setflags(write=False)
    return table


def _padded(x: np.ndarray) -> np.ndarray:
    zero = np.zeros((1,) + x.shape[1:], dtype=x.dtype)
    return np.concatenate([x, zero, ~zero])


def step_array(x: np.ndarray, rules: RuleSet = TLV_MIRRORED) -> np.ndarray:
    """One synchronous update of ``x`` (site axis first, bool or unsigned words)."""
    L = x.shape[0]
    table = _gather_table(rules.family, L, rules.boundary)
    xp = _padded(x) if rules.boundary.kind is BoundaryKind.OPEN_WINDOW else x
    if rules.family is Family.TLV:
        return maj3(xp[table[0]], xp[table[1]], xp[table[2]])
    # centre 0 -> maj(0, x_{i-1}, x_{i-3}); centre 1 -> maj(1, x_{i+1}, x_{i+3})
    return (~x & xp[table[0]] & xp[table[1]]) | (x & (xp[table[2]] | xp[table[3]]))


def evolve_array(x: np.ndarray, rules: RuleSet, t: int) -> np.ndarray:
    for _ in range(t):
        x = step_array(x, rules)
    return x


def _check_causality(rules: RuleSet, t: int) -> None:
    b = rules.boundary
    if b.kind is BoundaryKind.OPEN_WINDOW and rules.radius * t > b.padding:
        raise CausalityError(
            f"{t} steps at radius {rules.radius} need padding >= {rules.radius * t}, "
            f"window has {b.padding}"
        )


def step(state: ChainState, rules: RuleSet = TLV_MIRRORED) -> ChainState:
    rules.check_length(state.length)
    return ChainState(step_array(state.bits, rules))


def evolve(state: ChainState, rules: RuleSet = TLV_MIRRORED, t: int = 1) -> ChainState:
    """``t``-fold composition of :func:`step`."""
    if t < 0:
        raise ValueError("t must be non-negative")
    rules.check_length(state.length)
    _check_causality(rules, t)
    return ChainState(evolve_array(state.bits, rules, t))


# ------------------------------------------------------------- orbit classification


class Terminal(str, enum.Enum):
    CLEAN_ZERO = "clean_zero"
    CLEAN_ONE = "clean_one"
    CYCLE = "cycle"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class EvolutionOutcome:
    terminal: Terminal
    steps_taken: int
    period: int | None = None
    entry_time: int | None = None
    cycle_density: float | None = None

    @property
    def clean(self) -> bool:
        return self.terminal is Terminal.CLEAN_ZERO


def default_cap(L: int, expected_tdec: int = 8) -> int:
    return 4 * L * expected_tdec


def classify_evolution(
    state: ChainState, rules: RuleSet = TLV_MIRRORED, cap: int | None = None
) -> EvolutionOutcome:
    """Follow the orbit of ``state`` until it settles.

    Homogeneous fixed points are recognised on the step they are reached.
    Other cycles are found with Brent's algorithm (power-of-two
    teleporting), which keeps two states in memory regardless of orbit
    length.  ``steps_taken`` is the first time the terminal set was entered.
    """
    L = state.length
    rules.check_length(L)
    cap = default_cap(L) if cap is None else cap
    if cap < 1:
        raise ValueError("cap must be >= 1")

    x = state.bits
    if not x.any():
        return EvolutionOutcome(Terminal.CLEAN_ZERO, 0)
    if x.all():
        return EvolutionOutcome(Terminal.CLEAN_ONE, 0)

    power = lam = 1
    tortoise = x
    hare = step_array(x, rules)
    t = 1
    while True:
        if not hare.any():
            return EvolutionOutcome(Terminal.CLEAN_ZERO, t)
        if hare.all():
            return EvolutionOutcome(Terminal.CLEAN_ONE, t)
        if np.array_equal(tortoise, hare):
            break
        if t >= cap:
            return EvolutionOutcome(Terminal.TIMEOUT, t)
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = step_array(hare, rules)
        t += 1
        lam += 1

    # entry time: walk two pointers lam apart from the start
    tortoise = x
    hare = evolve_array(x, rules, lam)
    mu = 0
    while not np.array_equal(tortoise, hare):
        tortoise = step_array(tortoise, rules)
        hare = step_array(hare, rules)
        mu += 1
    return EvolutionOutcome(
        Terminal.CYCLE, mu, period=lam, entry_time=mu, cycle_density=float(tortoise.mean())
    )


# --------------------------------------------------------------- exhaustive tools


def step_all_states(L: int, rules: RuleSet = TLV_MIRRORED) -> np.ndarray:
    """Image of every state of length L, states encoded as integers (bit j = cell j)."""
    rules.check_length(L)
    if L > 26:
        raise ValueError("exhaustive stepping is limited to L <= 26")
    n = np.arange(1 << L, dtype=np.uint32)
    cells = [((n >> np.uint32(j)) & np.uint32(1)).astype(bool) for j in range(L)]
    # stack as (L, N) and reuse the array engine
    nxt = step_array(np.stack(cells), rules)
    out = np.zeros(1 << L, dtype=np.uint32)
    for j in range(L):
        out |= nxt[j].astype(np.uint32) << np.uint32(j)
    return out


def _int_to_state(v: int, L: int) -> ChainState:
    return ChainState(np.array([(v >> j) & 1 for j in range(L)], dtype=bool))


def enumerate_fixed_points(L: int, rules: RuleSet = TLV_MIRRORED) -> set[ChainState]:
    """All states with ``step(x) == x``.

    Exhaustive for ``L <= 24``.  Beyond that only constant and period-2/4
    patterns (all phases) are tried; these are the only candidates for TLV.
    """
    rules.check_length(L)
    if L <= 24:
        img = step_all_states(L, rules)
        fixed = np.nonzero(img == np.arange(1 << L, dtype=np.uint32))[0]
        return {_int_to_state(int(v), L) for v in fixed}
    found = set()
    for motif in range(16):
        pat = [(motif >> (j % 4)) & 1 for j in range(L)]
        s = ChainState(np.array(pat, dtype=bool))
        if step(s, rules) == s:
            found.add(s)
    return found


# ------------------------------------------------------------------------ eroder


@dataclass(frozen=True)
class EroderTable:
    rows: tuple[tuple[int, int], ...]
    m: float = 1.0

    def t_dec(self, l: int) -> int:
        return dict(self.rows)[l]

    def violations(self) -> list[tuple[int, int]]:
        """Rows breaking ``t_dec <= floor(3l/4) + 1`` or ``t_dec <= m*l``."""
        return [
            (l, t)
            for l, t in self.rows
            if t > (3 * l) // 4 + 1 or t > self.m * l
        ]


def measure_eroder(l_max: int, rules: RuleSet | None = None, m: float = 1.0) -> EroderTable:
    """Time to erase a contiguous cluster of ``l`` cells on a clean background.

    Each cluster is placed in an open window wide enough that no signal
    reaches the edge within ``m * l_max`` steps; the worst case over both
    start parities is recorded.
    """
    family = Family.TLV if rules is None else rules.family
    R = family.radius
    horizon = max(1, int(np.ceil(m * l_max)))
    pad = R * horizon
    boundary = BoundaryMode.open_window(pad, 0)
    rs = RuleSet(family, boundary)
    rows = [(0, 0)]
    for l in range(1, l_max + 1):
        worst = 0
        for shift in (0, 1):
            L = 2 * pad + l + 2
            x = np.zeros(L, dtype=bool)
            x[pad + shift : pad + shift + l] = True
            t = 0
            while x.any():
                if t >= horizon:
                    raise RuntimeError(
                        f"cluster of size {l} survived {horizon} steps; not an eroder with m={m}"
                    )
                x = step_array(x, rs)
                t += 1
            worst = max(worst, t)
        rows.append((l, worst))
    return EroderTable(tuple(rows), m)
