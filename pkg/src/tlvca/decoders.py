"""Syndromes, global majority voting and the syndrome-delta form of TLV.

Bond ``j`` (0-based) of a syndrome sits between cells ``j`` and ``j + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ca_core import (
    BoundaryKind,
    ChainState,
    RuleSet,
    TLV_MIRRORED,
    _gather_table,
    maj3,
)

__all__ = [
    "Syndrome",
    "CorrectionMask",
    "DecodeStep",
    "UnsupportedRuleError",
    "boundary",
    "boundary_array",
    "majority",
    "majority_array",
    "apply_correction",
    "global_majority_decode",
    "syndrome_delta_step",
    "syndrome_delta_array",
    "SyndromeWindow",
    "d_local_decode",
    "global_rule",
    "tlv_window_rule",
]


class UnsupportedRuleError(ValueError):
    """The rule has no syndrome-delta representation (it is not self-dual)."""


def _frozen_bits(bits, n_min: int) -> np.ndarray:
    b = np.array(bits, dtype=bool, copy=True).reshape(-1)
    if b.size < n_min:
        raise ValueError(f"need at least {n_min} bits")
    b.setflags(write=False)
    return b


@dataclass(frozen=True, eq=False)
class Syndrome:
    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "bits", _frozen_bits(self.bits, 1))

    @property
    def chain_length(self) -> int:
        return int(self.bits.size) + 1

    @classmethod
    def zeros(cls, L: int) -> "Syndrome":
        return cls(np.zeros(L - 1, dtype=bool))

    def is_zero(self) -> bool:
        return not self.bits.any()

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def __eq__(self, other):
        if not isinstance(other, Syndrome):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.tobytes())

    def __xor__(self, other: "Syndrome") -> "Syndrome":
        return Syndrome(self.bits ^ other.bits)

    def __repr__(self):
        return f"Syndrome({self.to_string()})"


@dataclass(frozen=True, eq=False)
class CorrectionMask:
    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "bits", _frozen_bits(self.bits, 2))

    @classmethod
    def zeros(cls, L: int) -> "CorrectionMask":
        return cls(np.zeros(L, dtype=bool))

    def is_zero(self) -> bool:
        return not self.bits.any()

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def __eq__(self, other):
        if not isinstance(other, CorrectionMask):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.tobytes())

    def __xor__(self, other: "CorrectionMask") -> "CorrectionMask":
        return CorrectionMask(self.bits ^ other.bits)

    def __repr__(self):
        return f"CorrectionMask({self.to_string()})"


@dataclass(frozen=True)
class DecodeStep:
    delta: CorrectionMask
    new_syndrome: Syndrome


# ----------------------------------------------------------------------- basics


def boundary_array(x: np.ndarray) -> np.ndarray:
    return x[:-1] ^ x[1:]


def boundary(x: ChainState | CorrectionMask) -> Syndrome:
    """Domain walls of ``x``: ``s_j = x_j xor x_{j+1}``."""
    return Syndrome(boundary_array(x.bits))


def majority_array(x: np.ndarray) -> np.ndarray:
    """Vectorised L-input majority over the site axis; ties give 0."""
    L = x.shape[0]
    return 2 * np.count_nonzero(x, axis=0) > L


def majority(x: ChainState | np.ndarray) -> int:
    bits = x.bits if isinstance(x, ChainState) else np.asarray(x, dtype=bool)
    return int(majority_array(bits))


def apply_correction(x: ChainState, delta: CorrectionMask) -> ChainState:
    return ChainState(x.bits ^ delta.bits)


def _preimage(s: np.ndarray) -> np.ndarray:
    """The preimage of ``s`` whose first cell is 0 (prefix XOR, site axis first)."""
    zero = np.zeros((1,) + s.shape[1:], dtype=s.dtype)
    return np.concatenate([zero, np.bitwise_xor.accumulate(s, axis=0)])


def global_majority_decode(s: Syndrome) -> CorrectionMask:
    """Minimum-weight preimage of ``s``.

    With even L and both preimages of weight L/2 the one with first cell 0
    is returned.
    """
    y = _preimage(s.bits)
    L = y.size
    if 2 * int(y.sum()) > L:
        y = ~y
    return CorrectionMask(y)


# -------------------------------------------------------------- syndrome-delta


def _require_self_dual(rules: RuleSet) -> None:
    if not rules.self_dual:
        raise UnsupportedRuleError(f"{rules.family.value} is not self-dual; no syndrome-delta form")
    if rules.boundary.kind is BoundaryKind.OPEN_WINDOW:
        raise UnsupportedRuleError("open-window background is not syndrome-determined")


def syndrome_delta_array(s: np.ndarray, rules: RuleSet = TLV_MIRRORED) -> tuple[np.ndarray, np.ndarray]:
    """Batched syndrome-delta step; returns ``(delta, new_syndrome)``.

    The relative state around site ``i`` is ``x_k xor x_i = P_k xor P_i``
    with ``P`` the prefix XOR of ``s``; by self-duality the change at ``i``
    is the rule evaluated on that relative state.
    """
    _require_self_dual(rules)
    L = s.shape[0] + 1
    rules.check_length(L)
    P = _preimage(s)
    table = _gather_table(rules.family, L, rules.boundary)
    delta = maj3(P[table[0]] ^ P, P[table[1]] ^ P, P[table[2]] ^ P)
    return delta, boundary_array(delta) ^ s


def syndrome_delta_step(s: Syndrome, rules: RuleSet = TLV_MIRRORED) -> DecodeStep:
    delta, s_new = syndrome_delta_array(s.bits, rules)
    return DecodeStep(CorrectionMask(delta), Syndrome(s_new))


# --------------------------------------------------------------- D-local decode


@dataclass(frozen=True)
class SyndromeWindow:
    """Syndromes of the clipped neighbourhood of a site.

    ``lo``/``hi`` are the 0-based first and last cells of the neighbourhood;
    ``bits`` are the ``hi - lo`` bonds between them.
    """

    site: int
    lo: int
    hi: int
    L: int
    bits: np.ndarray


def d_local_decode(
    s: Syndrome, D: int, f: Callable[[SyndromeWindow], int]
) -> CorrectionMask:
    """Apply a per-site rule that only ever sees its radius-``D`` syndromes."""
    if D < 0:
        raise ValueError("D must be non-negative")
    L = s.chain_length
    out = np.zeros(L, dtype=bool)
    for i in range(L):
        lo, hi = max(i - D, 0), min(i + D, L - 1)
        window = np.array(s.bits[lo:hi], dtype=bool)
        window.setflags(write=False)
        out[i] = bool(f(SyndromeWindow(i, lo, hi, L, window)))
    return CorrectionMask(out)


def global_rule(window: SyndromeWindow) -> int:
    """Per-site slice of the global decoder; exact once the window spans the chain."""
    y = _preimage(window.bits)
    if 2 * int(y.sum()) > y.size:
        y = ~y
    return int(y[window.site - window.lo])


def tlv_window_rule(t: int, rules: RuleSet = TLV_MIRRORED) -> Callable[[SyndromeWindow], int]:
    """Per-site rule giving bit ``i`` of the ``t``-step TLV correction.

    Needs ``D >= R*t``: the relative state is rebuilt on the window only,
    cells outside it are filled with zeros and never reach site ``i``.
    """
    _require_self_dual(rules)

    def f(w: SyndromeWindow) -> int:
        if w.site - w.lo < min(w.site, rules.radius * t) or w.hi - w.site < min(
            w.L - 1 - w.site, rules.radius * t
        ):
            raise ValueError(f"window radius too small for {t} steps")
        x = np.zeros(w.L, dtype=bool)
        x[w.lo : w.hi + 1] = _preimage(w.bits)
        y = x
        for _ in range(t):
            y = maj3(*(y[row] for row in _gather_table(rules.family, w.L, rules.boundary)))
        return int(x[w.site] ^ y[w.site])

    return f
