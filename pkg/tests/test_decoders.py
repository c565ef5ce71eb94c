import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tlvca.ca_core import PERIODIC, ChainState, Family, RuleSet, evolve, evolve_array, step, step_array
from tlvca.decoders import (
    CorrectionMask,
    Syndrome,
    apply_correction,
    boundary,
    boundary_array,
    d_local_decode,
    global_majority_decode,
    global_rule,
    majority,
    syndrome_delta_array,
    syndrome_delta_step,
    tlv_window_rule,
)


def all_states(L):
    n = np.arange(1 << L, dtype=np.uint32)
    return np.stack([((n >> np.uint32(j)) & np.uint32(1)).astype(bool) for j in range(L)])


def bits(n_min=2, n_max=60):
    return st.lists(st.booleans(), min_size=n_min, max_size=n_max).map(lambda b: np.array(b, dtype=bool))


def S(s):
    return ChainState.from_string(s)


# ----------------------------------------------------------------- boundary


def test_boundary_examples():
    assert boundary(S("0110")).to_string() == "101"
    assert boundary(ChainState.zeros(6)).is_zero()


@given(bits())
def test_boundary_complement_degeneracy(x):
    assert np.array_equal(boundary_array(x), boundary_array(~x))


def test_syndrome_width():
    s = boundary(ChainState.zeros(9))
    assert len(s.bits) == 8 and s.chain_length == 9


# ----------------------------------------------------------------- majority


def test_majority_examples():
    assert majority(S("110")) == 1
    assert majority(S("1010")) == 0
    for L in (2, 7, 10):
        assert majority(ChainState.ones(L)) == 1


@given(bits(2))
def test_majority_matches_floor_formula(x):
    L = x.size
    want = int(np.floor(0.5 + (x.sum() - 0.5) / L))
    assert majority(x) == want


# ---------------------------------------------------------- global decoder


def test_global_decode_examples():
    assert global_majority_decode(boundary(S("00100"))).to_string() == "00100"
    assert global_majority_decode(Syndrome.zeros(5)).is_zero()
    x = S("11101")
    d = global_majority_decode(boundary(x))
    assert apply_correction(x, d).is_one()


def test_global_decode_exhaustive():
    for L in range(2, 15):
        x = all_states(L)
        for v in range(x.shape[1]):
            xs = ChainState(x[:, v])
            d = global_majority_decode(boundary(xs))
            assert boundary(d) == boundary(xs)
            assert 2 * int(d.bits.sum()) <= L
            assert d.bits[0] == 0 or 2 * int(d.bits.sum()) < L
            if L % 2:
                res = apply_correction(xs, d).bits
                assert res.all() == bool(majority(xs)) and (res.all() or not res.any())


def test_global_decode_chain_complex_identity():
    for L in range(2, 15):
        full = 1 << (L - 1)
        for v in range(full):
            s = Syndrome(np.array([(v >> j) & 1 for j in range(L - 1)], dtype=bool))
            assert global_majority_decode(s).bits.size == L
            assert boundary(global_majority_decode(s)) == s


@given(bits(), st.data())
def test_double_application_is_identity(x, data):
    d = data.draw(st.lists(st.booleans(), min_size=x.size, max_size=x.size))
    xs, dm = ChainState(x), CorrectionMask(np.array(d, dtype=bool))
    assert apply_correction(apply_correction(xs, dm), dm) == xs


# ------------------------------------------------------------ syndrome-delta


def test_syndrome_delta_zero():
    out = syndrome_delta_step(Syndrome.zeros(12))
    assert out.delta.is_zero() and out.new_syndrome.is_zero()


def test_syndrome_delta_exhaustive_L12():
    x = all_states(12)
    s = boundary_array(x)
    for _ in range(10):
        delta, s2 = syndrome_delta_array(s)
        x2 = step_array(x)
        assert np.array_equal(delta, x ^ x2)
        assert np.array_equal(s2, boundary_array(x2))
        assert np.array_equal(s2, s ^ boundary_array(delta))
        x, s = x2, s2


def test_syndrome_delta_single_cluster():
    x = ChainState.from_sites(20, [10])
    out = syndrome_delta_step(boundary(x))
    assert np.array_equal(out.delta.bits, x.bits ^ step(x).bits)


@given(st.integers(2, 100).map(lambda h: 2 * h).flatmap(lambda L: bits(L, L)))
def test_syndrome_delta_random(x):
    delta, s2 = syndrome_delta_array(boundary_array(x))
    assert np.array_equal(delta, x ^ step_array(x))
    assert np.array_equal(s2, boundary_array(step_array(x)))


def test_syndrome_delta_rejects_gkl():
    with pytest.raises(ValueError):
        syndrome_delta_step(Syndrome.zeros(12), RuleSet(Family.GKL, PERIODIC))


# ------------------------------------------------------------- D-local decoders


def test_d_local_global_rule_reproduces_global_decoder():
    rng = np.random.default_rng(0)
    for L in (5, 8, 11):
        for _ in range(50):
            s = boundary(ChainState(rng.random(L) < 0.4))
            assert d_local_decode(s, L, global_rule) == global_majority_decode(s)


def test_d_local_zero_radius_sees_two_bonds():
    seen = []

    def f(w):
        seen.append(w.bits.size)
        return 0

    d_local_decode(Syndrome.zeros(10), 0, f)
    assert max(seen) <= 2
    with pytest.raises(ValueError):
        d_local_decode(Syndrome.zeros(10), -1, f)


def test_d_local_window_is_read_only():
    def f(w):
        w.bits[0] = True

    with pytest.raises(ValueError):
        d_local_decode(Syndrome.zeros(10), 2, f)


@pytest.mark.parametrize("t", [1, 2, 3])
def test_tlv_window_rule_matches_engine(t):
    rng = np.random.default_rng(t)
    L = 40
    for _ in range(20):
        x = ChainState(rng.random(L) < 0.3)
        got = d_local_decode(boundary(x), 4 * t, tlv_window_rule(t))
        want = x.bits ^ evolve(x, t=t).bits
        assert np.array_equal(got.bits, want)


@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_tlv_t_steps_is_Rt_local(t, seed):
    # flipping a syndrome bond beyond distance R*t never changes bit i of the t-step correction
    rng = np.random.default_rng(seed)
    L = 60
    x = rng.random(L) < 0.3
    i = int(rng.integers(0, L))
    far = [b for b in range(L - 1) if min(abs(b - i), abs(b + 1 - i)) > 4 * t]
    if not far:
        return
    s = boundary_array(x)
    s2 = s.copy()
    s2[rng.choice(far, size=min(3, len(far)), replace=False)] ^= True
    d1 = x ^ evolve_array(x, RuleSet(), t)
    # rebuild a state with the perturbed syndrome that agrees with x at site i
    y = np.concatenate([[False], np.bitwise_xor.accumulate(s2)])
    if y[i] != x[i]:
        y = ~y
    d2 = y ^ evolve_array(y, RuleSet(), t)
    assert d1[i] == d2[i]
