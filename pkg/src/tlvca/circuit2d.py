"""Feed-forward register pipeline that unrolls TLV decoding in space.

Each time step the circuit reads one syndrome, turns it into the syndrome
of the errors that arrived since the last read, and pushes that into a
stack of ``D_L`` rows.  Every row is one TLV step further along, so the
pattern leaves the bottom row ``D_L`` steps later as a correction that is
applied to the chain.  Patterns from different time steps never interact.

All registers carry a trailing lane axis so many independent circuits can
be run at once; the single-lane accessors return typed objects.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .ca_core import TLV_MIRRORED, ChainState, RuleSet, _gather_table
from .decoders import CorrectionMask, Syndrome, boundary_array, syndrome_delta_array

__all__ = [
    "CircuitState",
    "CoSimState",
    "CircuitSimResult",
    "circuit_init",
    "cosim_init",
    "circuit_time_step",
    "run_circuit_sim",
    "geometric_gof",
    "Gate",
    "Netlist",
    "maj3_netlist",
    "row_netlist",
    "evaluate_netlist",
    "gate_level_row_step",
]


# ------------------------------------------------------------------ registers


@dataclass
class CircuitState:
    """Register stack; every array ends with a lane axis of width ``lanes``.

    ``row_syndromes[r]`` / ``row_corrections[r]`` hold a pattern after ``r``
    TLV steps.  ``final_correction`` is the bottom register that gets
    applied; ``final_syndrome`` is what the last step left unresolved.
    """

    L: int
    D_L: int
    syndrome_register: np.ndarray
    syndrome_memory: np.ndarray
    row_syndromes: np.ndarray
    row_corrections: np.ndarray
    final_correction: np.ndarray
    final_syndrome: np.ndarray

    @property
    def lanes(self) -> int:
        return self.syndrome_register.shape[-1]

    def is_empty(self) -> bool:
        return not any(
            a.any()
            for a in (
                self.syndrome_register,
                self.syndrome_memory,
                self.row_syndromes,
                self.row_corrections,
                self.final_correction,
                self.final_syndrome,
            )
        )

    def rows(self, lane: int = 0) -> list[tuple[Syndrome, CorrectionMask]]:
        return [
            (Syndrome(self.row_syndromes[r, :, lane]), CorrectionMask(self.row_corrections[r, :, lane]))
            for r in range(self.D_L)
        ]

    def copy(self) -> "CircuitState":
        return CircuitState(
            self.L,
            self.D_L,
            *(
                a.copy()
                for a in (
                    self.syndrome_register,
                    self.syndrome_memory,
                    self.row_syndromes,
                    self.row_corrections,
                    self.final_correction,
                    self.final_syndrome,
                )
            ),
        )


def circuit_init(L: int, D_L: int, lanes: int = 1, rules: RuleSet = TLV_MIRRORED) -> CircuitState:
    """All-zero register stack."""
    rules.check_length(L)
    if D_L < 1:
        raise ValueError("D_L must be >= 1")
    if lanes < 1:
        raise ValueError("lanes must be >= 1")
    z = lambda *shape: np.zeros(shape + (lanes,), dtype=bool)  # noqa: E731
    return CircuitState(L, D_L, z(L - 1), z(L - 1), z(D_L, L - 1), z(D_L, L), z(L), z(L - 1))


@dataclass
class CoSimState:
    """Circuit plus the hidden chain it protects.

    ``truth`` is the error pattern on the chain; the circuit only ever sees
    its boundary.  ``pending`` keeps the last ``D_L`` injected patterns so a
    pattern can be judged when its correction comes out.  A pattern whose
    correction leaves exactly the all-ones residual counts as a logical
    flip, and the all-ones part is taken out of ``truth``.
    """

    circuit: CircuitState
    truth: np.ndarray
    logical_flip_count: np.ndarray
    pending: deque = field(default_factory=deque)
    t: int = 0

    @property
    def truth_chain(self) -> ChainState:
        return ChainState(self.truth[:, 0])


def cosim_init(L: int, D_L: int, lanes: int = 1, rules: RuleSet = TLV_MIRRORED) -> CoSimState:
    c = circuit_init(L, D_L, lanes, rules)
    return CoSimState(c, np.zeros((L, lanes), dtype=bool), np.zeros(lanes, dtype=np.int64))


def _as_lanes(e, L: int, lanes: int) -> np.ndarray:
    a = e.bits if isinstance(e, ChainState) else np.asarray(e, dtype=bool)
    if a.ndim == 1:
        a = a[:, None]
    if a.shape != (L, lanes):
        raise ValueError(f"error pattern of shape {a.shape}, circuit needs {(L, lanes)}")
    return a


def circuit_time_step(
    cosim: CoSimState, e_new, rules: RuleSet = TLV_MIRRORED
) -> tuple[CoSimState, np.ndarray | CorrectionMask, np.ndarray]:
    """Advance the co-simulation by one time step (in place).

    1. fresh errors hit the chain and its syndrome is read;
    2. the new-error syndrome enters row 0 while every row moves one TLV
       step down, the bottom row landing in the final register;
    3. the final correction is applied to the chain.

    Returns ``(cosim, applied, residual)``.  ``applied`` is a
    :class:`CorrectionMask` for single-lane runs and a ``(L, lanes)`` array
    otherwise.  ``residual`` is, per lane, whether the pattern that just
    came out (injected ``D_L`` steps ago) was left uncorrected; it is all
    False while the pipeline is still filling.
    """
    c = cosim.circuit
    e = _as_lanes(e_new, c.L, c.lanes)

    # substep 1: measure
    cosim.truth ^= e
    s_new = boundary_array(cosim.truth)
    fresh = s_new ^ c.syndrome_memory ^ boundary_array(c.final_correction)
    c.syndrome_register = s_new

    # substep 2: all rows advance together
    delta, s_out = syndrome_delta_array(c.row_syndromes[-1], rules)
    final_corr = c.row_corrections[-1] ^ delta
    if c.D_L > 1:
        # rows[0..D_L-2] -> rows[1..D_L-1] in one batched step
        d, s = syndrome_delta_array(np.moveaxis(c.row_syndromes[:-1], 0, -2), rules)
        c.row_syndromes[1:] = np.moveaxis(s, -2, 0)
        c.row_corrections[1:] = c.row_corrections[:-1] ^ np.moveaxis(d, -2, 0)
    c.row_syndromes[0] = fresh
    c.row_corrections[0] = False
    c.final_correction = final_corr
    c.final_syndrome = s_out
    c.syndrome_memory = s_new

    # substep 3: apply
    cosim.truth ^= final_corr
    cosim.t += 1

    cosim.pending.append(e.copy())
    residual = np.zeros(c.lanes, dtype=bool)
    if len(cosim.pending) > c.D_L:
        left = cosim.pending.popleft() ^ final_corr
        residual = left.any(axis=0)
        flipped = left.all(axis=0)
        if flipped.any():
            # an all-ones residual is a logical flip; relabel the chain
            cosim.truth[:, flipped] ^= True
            cosim.logical_flip_count += flipped
    applied = CorrectionMask(final_corr[:, 0]) if c.lanes == 1 else final_corr
    return cosim, applied, residual


# ------------------------------------------------------------- circuit runs


@dataclass
class CircuitSimResult:
    """Failure statistics of a batch of co-simulations.

    ``p_fail`` is failures per judged pattern.  ``ttff`` holds the times to
    first failure: from the start of a lane, and (with continued runs) from
    each failure to the next, since every time step decodes an independent
    pattern.  Only intervals starting at least ``guard`` steps before the
    horizon are kept, which makes the sample free of truncation bias up to
    the tail mass beyond ``guard``; ``censored`` counts kept intervals that
    had not ended by the horizon (they are not in ``ttff``).
    """

    L: int
    D_L: int
    p0: float
    horizon: int
    lanes: int
    patterns: int
    failures: int
    ttff: np.ndarray = field(repr=False)
    guard: int = 0
    censored: int = 0
    logical_flips: int = 0

    @property
    def p_fail(self) -> float:
        return self.failures / self.patterns if self.patterns else math.nan

    @property
    def p_fail_stderr(self) -> float:
        p = self.p_fail
        return math.sqrt(p * (1 - p) / self.patterns) if self.patterns else math.nan

    @property
    def mean_ttff(self) -> float:
        return float(self.ttff.mean()) if self.ttff.size else math.nan

    @property
    def stderr_ttff(self) -> float:
        return float(self.ttff.std(ddof=1) / math.sqrt(self.ttff.size)) if self.ttff.size > 1 else math.nan


def run_circuit_sim(
    L: int,
    D_L: int,
    p0: float,
    horizon: int,
    rng: np.random.Generator,
    lanes: int = 1,
    continue_after_failure: bool = True,
    guard: int | None = None,
    rules: RuleSet = TLV_MIRRORED,
) -> CircuitSimResult:
    """Run ``lanes`` independent co-simulations under i.i.d. noise.

    A pattern fails when its correction does not cancel it (flip, leftover
    syndrome or not finished in ``D_L`` steps all show up this way).  The
    run lasts ``horizon + D_L`` steps so the last pattern is judged.
    ``guard`` defaults to the length beyond which a geometric gap has
    probability below 1e-6 at the observed failure rate.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    cosim = cosim_init(L, D_L, lanes, rules)
    last = np.zeros(lanes, dtype=np.int64)  # start of the open interval per lane
    alive = np.ones(lanes, dtype=bool)
    starts: list[np.ndarray] = []
    lengths: list[np.ndarray] = []
    failures = 0
    patterns = 0
    for step in range(1, horizon + D_L + 1):
        if step <= horizon:
            e = rng.random((L, lanes)) < p0
        else:
            e = np.zeros((L, lanes), dtype=bool)
        _, _, bad = circuit_time_step(cosim, e, rules)
        k = step - D_L  # index of the pattern just judged
        if k < 1:
            continue
        patterns += int(alive.sum())
        bad &= alive
        if not bad.any():
            continue
        failures += int(bad.sum())
        starts.append(last[bad])
        lengths.append(k - last[bad])
        last[bad] = k
        if not continue_after_failure:
            alive &= ~bad
    p_hat = failures / patterns if patterns else 0.0
    if guard is None:
        guard = math.ceil(math.log(1e-6) / math.log1p(-p_hat)) if 0 < p_hat < 1 else 0
    st = np.concatenate(starts) if starts else np.zeros(0, dtype=np.int64)
    ln = np.concatenate(lengths) if lengths else np.zeros(0, dtype=np.int64)
    keep = st <= horizon - guard
    return CircuitSimResult(
        L=L,
        D_L=D_L,
        p0=p0,
        horizon=horizon,
        lanes=lanes,
        patterns=patterns,
        failures=failures,
        ttff=ln[keep],
        guard=guard,
        censored=int((alive & (last <= horizon - guard)).sum()),
        logical_flips=int(cosim.logical_flip_count.sum()),
    )


def geometric_gof(samples: np.ndarray, p: float | None = None, min_expected: float = 5.0) -> tuple[float, float]:
    """Chi-square test of positive integer samples against Geometric(p).

    ``p`` defaults to the maximum-likelihood ``1 / mean`` (one degree of
    freedom is then spent on it).  Tail bins are merged until every bin
    expects at least ``min_expected`` counts.  Returns ``(statistic, p_value)``.
    """
    x = np.asarray(samples, dtype=np.int64)
    n = x.size
    fitted = p is None
    if fitted:
        p = 1.0 / x.mean()
    edges = []
    k, tail = 1, 1.0
    while tail * n >= 2 * min_expected:
        lo, mass = k, 0.0
        while mass * n < min_expected:
            mass += p * (1 - p) ** (k - 1)
            k += 1
        edges.append((lo, k - 1, mass))
        tail -= mass
    tail = max(tail, 0.0)
    obs = [int(((x >= lo) & (x <= hi)).sum()) for lo, hi, _ in edges]
    obs.append(n - sum(obs))
    exp = [m * n for *_, m in edges] + [tail * n]
    if exp[-1] < min_expected and len(exp) > 1:
        o, e = obs.pop(), exp.pop()
        obs[-1] += o
        exp[-1] += e
    ddof = 1 if fitted else 0
    if len(obs) - 1 - ddof < 1:
        return 0.0, 1.0
    stat, pval = stats.chisquare(obs, exp, ddof=ddof)
    return float(stat), float(pval)


# --------------------------------------------------------------- gate level


GATE_OPS = ("IN", "OUT", "AND", "OR", "XOR", "NOT")


@dataclass(frozen=True)
class Gate:
    id: int
    op: str
    inputs: tuple[int, ...] = ()
    name: str | None = None


@dataclass
class Netlist:
    """Combinational netlist in topological order."""

    gates: list[Gate] = field(default_factory=list)

    @property
    def inputs(self) -> list[Gate]:
        return [g for g in self.gates if g.op == "IN"]

    @property
    def outputs(self) -> list[Gate]:
        return [g for g in self.gates if g.op == "OUT"]

    def add(self, op: str, *inputs: int, name: str | None = None) -> int:
        if op not in GATE_OPS:
            raise ValueError(f"unknown gate {op}")
        gid = len(self.gates)
        self.gates.append(Gate(gid, op, tuple(inputs), name))
        return gid

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for g in self.gates:
            out[g.op] = out.get(g.op, 0) + 1
        return out

    def to_text(self) -> str:
        """One gate per line: ``<id> <op> <input ids...>``."""
        return "".join(" ".join([str(g.id), g.op, *map(str, g.inputs)]) + "\n" for g in self.gates)

    @classmethod
    def from_text(cls, text: str) -> "Netlist":
        net = cls()
        for n, line in enumerate(l for l in text.splitlines() if l.strip()):
            parts = line.split()
            gid, op, ins = int(parts[0]), parts[1], tuple(int(p) for p in parts[2:])
            if gid != n or any(i >= gid for i in ins):
                raise ValueError(f"netlist line {n} is out of order: {line!r}")
            net.add(op, *ins)
        return net


def maj3_netlist() -> Netlist:
    """Three-input majority as (X AND Y) OR (X AND Z) OR (Y AND Z)."""
    net = Netlist()
    x, y, z = (net.add("IN", name=n) for n in "XYZ")
    xy, xz, yz = net.add("AND", x, y), net.add("AND", x, z), net.add("AND", y, z)
    net.add("OUT", net.add("OR", net.add("OR", xy, xz), yz), name="M")
    return net


def evaluate_netlist(net: Netlist, inputs: Sequence[np.ndarray] | np.ndarray) -> np.ndarray:
    """Evaluate on bool inputs (first axis indexes the IN gates) -> outputs stacked likewise."""
    ins = list(inputs)
    if len(ins) != len(net.inputs):
        raise ValueError(f"netlist has {len(net.inputs)} inputs, got {len(ins)}")
    vals: list = [None] * len(net.gates)
    it = iter(ins)
    outs = []
    for g in net.gates:
        a = [vals[i] for i in g.inputs]
        if g.op == "IN":
            v = np.asarray(next(it), dtype=bool)
        elif g.op == "AND":
            v = a[0] & a[1]
        elif g.op == "OR":
            v = a[0] | a[1]
        elif g.op == "XOR":
            v = a[0] ^ a[1]
        elif g.op == "NOT":
            v = ~a[0]
        else:
            v = a[0]
            outs.append(v)
        vals[g.id] = v
    return np.array(outs)


class _RowBuilder:
    """Emits XOR/MAJ3 gates with the trivial identities folded away.

    A wire is a gate id or ``None`` for constant 0.
    """

    def __init__(self, net: Netlist):
        self.net = net
        self.maj = maj3_netlist()
        self.xor_memo: dict[tuple[int, int], int] = {}
        self.maj_memo: dict[tuple[int, ...], int | None] = {}

    def xor(self, a: int | None, b: int | None) -> int | None:
        if a is None:
            return b
        if b is None:
            return a
        if a == b:
            return None
        key = (min(a, b), max(a, b))
        if key not in self.xor_memo:
            self.xor_memo[key] = self.net.add("XOR", *key)
        return self.xor_memo[key]

    def maj3(self, a: int | None, b: int | None, c: int | None) -> int | None:
        w = sorted((a, b, c), key=lambda v: -1 if v is None else v)
        if w[0] == w[1] or w[1] == w[2]:
            return w[1]  # maj(u, u, v) = u, also for u = 0
        key = tuple(-1 if v is None else v for v in w)
        if key in self.maj_memo:
            return self.maj_memo[key]
        if w[0] is None:
            # maj(0, u, v) = u AND v: the constant input prunes the template
            out = self.net.add("AND", w[1], w[2])
        else:
            # instantiate the majority template with its inputs rewired
            wire = {}
            ins = iter(w)
            for g in self.maj.gates:
                if g.op == "IN":
                    wire[g.id] = next(ins)
                elif g.op == "OUT":
                    wire[g.id] = wire[g.inputs[0]]
                else:
                    wire[g.id] = self.net.add(g.op, *(wire[i] for i in g.inputs))
            out = wire[self.maj.outputs[0].id]
        self.maj_memo[key] = out
        return out


def row_netlist(L: int, rules: RuleSet = TLV_MIRRORED) -> Netlist:
    """Gate-level version of one pipeline row.

    Inputs are the ``L - 1`` syndrome bits followed by the ``L`` correction
    bits; outputs are the next syndrome row followed by the next correction
    row.  The state of a neighbour relative to site ``i`` is the XOR of the
    syndrome bits between them, and the site's update is the majority of
    its three relative neighbours.
    """
    rules.check_length(L)
    net = Netlist()
    b = _RowBuilder(net)
    s = [net.add("IN", name=f"s{j}") for j in range(L - 1)]
    c = [net.add("IN", name=f"c{i}") for i in range(L)]
    span: dict[tuple[int, int], int | None] = {}

    def rel(i: int, j: int) -> int | None:
        # XOR of bonds between cells i and j
        lo, hi = min(i, j), max(i, j)
        if lo == hi:
            return None
        if (lo, hi) not in span:
            span[(lo, hi)] = b.xor(rel(lo, hi - 1), s[hi - 1])
        return span[(lo, hi)]

    table = _gather_table(rules.family, L, rules.boundary)
    delta = [b.maj3(*(rel(int(table[k, i]), i) for k in range(3))) for i in range(L)]
    for j in range(L - 1):
        net.add("OUT", b.xor(s[j], b.xor(delta[j], delta[j + 1])), name=f"s'{j}")
    for i in range(L):
        w = b.xor(c[i], delta[i])
        if w is None:
            raise AssertionError("correction output folded to a constant")
        net.add("OUT", w, name=f"c'{i}")
    return net


def _const_safe(net: Netlist) -> None:
    # OUT gates are added with a wire id; a folded constant would be None
    for g in net.outputs:
        if None in g.inputs:
            raise AssertionError(f"output {g.name} folded to a constant")


def gate_level_row_step(
    s: np.ndarray, c: np.ndarray | None = None, rules: RuleSet = TLV_MIRRORED, net: Netlist | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """One row step evaluated through :func:`row_netlist`.

    ``s`` is ``(L-1, ...)`` and ``c`` is ``(L, ...)`` (zeros if omitted).
    Returns ``(next_syndrome, next_correction)``.
    """
    s = np.asarray(s, dtype=bool)
    L = s.shape[0] + 1
    c = np.zeros((L,) + s.shape[1:], dtype=bool) if c is None else np.asarray(c, dtype=bool)
    net = row_netlist(L, rules) if net is None else net
    _const_safe(net)
    out = evaluate_netlist(net, np.concatenate([s, c]))
    return out[: L - 1], out[L - 1 :]
